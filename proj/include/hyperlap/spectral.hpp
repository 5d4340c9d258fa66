#pragma once

#include "hyperlap/energy.hpp"
#include "hyperlap/hypergraph.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace hyperlap {

struct PoincareConstants
{
    double gamma = 0.0; // lower Poincare constant
    double Gamma = 0.0; // upper Poincare constant
    double nu_E = 0.0;
    int diam = 0;
};

struct Envelope
{
    double lower = 0.0;
    double upper = 0.0;
};

struct EigenOptions
{
    int restarts = 16;
    int iters = 5000;
    double tol = 1e-10; // target for the stationarity residual
    std::uint64_t seed = 0;
    // additional deterministic starting points (need not be normalized)
    std::vector<Eigen::VectorXd> extra_starts;
};

struct EigenResult
{
    double lambda1q = 0.0;
    Eigen::VectorXd zeta;
    int restarts = 0;
    double residual = 0.0; // |lambda zeta - D phi(zeta)|
};

PoincareConstants poincare_constants(const Hypergraph& g, double p);

// Bounds on X(t) = |x(t) - mean| for the free decay started at X(0) = X0.
Envelope decay_envelope(const PoincareConstants& c, double p, double X0, double t);

// (id + lambda D phi_{p,q})^{-1} x by damped Newton.
Eigen::VectorXd resolvent_pq(const Hypergraph& g, const EnergyParams& prm, double lambda, const Eigen::VectorXd& x);

// (id + lambda d phi_p)^{-1} x, the exact prox of the nonsmooth energy.
Eigen::VectorXd resolvent_p(const Hypergraph& g, double p, double lambda, const Eigen::VectorXd& x);

// (x - R x) / lambda; q = kInf selects the nonsmooth resolvent.
Eigen::VectorXd yosida(const Hypergraph& g, double p, double q, double lambda, const Eigen::VectorXd& x);

// Smallest q with p log(nu) / log(lambda^(1+delta) + 1) <= q.
double yosida_schedule_q(double nu, double p, double lambda, double delta);

// p phi_{p,q}(x) / |x|^p on mean-free x != 0.
double rayleigh(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x);

EigenResult eigen_first_positive(const Hypergraph& g, const EnergyParams& prm, const EigenOptions& opts = {});

} // namespace hyperlap
