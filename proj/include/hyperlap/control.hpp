#pragma once

#include "hyperlap/dynamics.hpp"
#include "hyperlap/energy.hpp"
#include "hyperlap/hypergraph.hpp"

#include <Eigen/Dense>
#include <vector>

namespace hyperlap {

struct ControlProblem
{
    Hypergraph G;
    EnergyParams params{4.0, 4.0};
    double lambda = 0.1;
    TimeGrid grid;
    Path h;                  // forcing samples (K + 1 vectors in R^N)
    Eigen::VectorXd x0_free; // initial values of the n free vertices
    Path x_target;           // x_* samples
    Eigen::VectorXd z_target; // dummy final target z_*
    double M = 1.0;           // budget on the control derivative energy
};

// Grid-sampled adjoint state; gamma[K] = -(x(T) - z_*) exactly.
using AdjointPath = Path;

struct OptOptions
{
    int max_iters = 500;
    double step0 = 1.0;
    double backtrack = 0.5;
    double armijo = 1e-4;
    double tol = 1e-6;
};

struct OptResult
{
    Path a;
    Trajectory x;
    AdjointPath gamma;
    std::vector<double> cost_history;
    double residual = 0.0;     // |a - H gamma| / (1 + |a|)
    double budget_usage = 0.0; // dt * sum |a'|^2
    int iterations = 0;
    bool converged = false;
};

struct SweepStage
{
    double q = 0.0;
    double lambda = 0.0;
    OptResult opt;
    double J_penalized = 0.0;
    double J_original = 0.0;        // cost of a* under the constrained dynamics
    double free_adjoint_norm = 0.0; // sup_t |(id - H) gamma(t)|
    double lambda_gamma_sup = 0.0;  // lambda * sup_t |gamma(t)|
};

struct SweepReport
{
    std::vector<SweepStage> stages;
    std::vector<double> distances; // sup-norm distance between successive optimal controls
};

// Initial state (x0_free, a(0)) of the controlled dynamics.
Eigen::VectorXd initial_state(const ControlProblem& pb, const Path& a);

// Penalized trajectory Lambda^{q,lambda}(a).
Trajectory forward(const ControlProblem& pb, const Path& a);

/**
 * Tracking cost (1/2) int |x - x_*|^2 + (1/2) int |a|^2. The state integral
 * uses the trapezoidal rule; the control integral uses right-endpoint samples,
 * matching the nodes at which the scheme consumes the control.
 */
double cost_J(const ControlProblem& pb, const Path& a, const Trajectory& traj);

// cost_J + (lambda/2)|x(T) - z_*|^2 + (lambda/2)|a(0)|^2
double cost_Jql(const ControlProblem& pb, const Path& a, const Trajectory& traj);

// Derivative of the discrete control-to-state map in direction b.
Path solve_linearized(const ControlProblem& pb, const Path& a, const Trajectory& traj, const Path& b);

// Backward adjoint recursion, the transpose of the forward scheme.
AdjointPath solve_adjoint(const ControlProblem& pb, const Path& a, const Trajectory& traj);

// lambda (a(0) - gamma(0)).b(0) + dt sum_{k>=1} (a_k - gamma_k).b_k
double gateaux_dJ(const ControlProblem& pb, const Path& a, const Path& b, const Trajectory& traj,
                  const AdjointPath& gamma);

// Inner product on controls that represents dJ: lambda u0.v0 + dt sum_{k>=1} uk.vk
double control_inner(const ControlProblem& pb, const Path& u, const Path& v);
double control_norm(const ControlProblem& pb, const Path& u);

// Representer of dJ in control_inner: g_k = H(a_k - gamma_k).
Path control_gradient(const ControlProblem& pb, const Path& a);

double budget(const Path& a, const TimeGrid& grid);
Path project_admissible(const Path& a, double M, const TimeGrid& grid);

OptResult optimize(const ControlProblem& pb, const Path& a_init, const OptOptions& opts = {});

struct SweepPoint
{
    double q;
    double lambda;
};

SweepReport sweep_to_original(const ControlProblem& pb, const std::vector<SweepPoint>& schedule,
                              const Path& a_init, const OptOptions& opts = {});

} // namespace hyperlap
