#pragma once

#include "hyperlap/energy.hpp"
#include "hyperlap/hypergraph.hpp"
#include "hyperlap/prox.hpp"

#include <Eigen/Dense>
#include <vector>

namespace hyperlap {

// Uniform time grid t_k = k * T / K, k = 0..K.
struct TimeGrid
{
    double T = 1.0;
    int K = 1;

    double dt() const { return T / K; }
    double t(int k) const { return k == K ? T : k * dt(); }
    bool operator==(const TimeGrid& o) const { return T == o.T && K == o.K; }
};

// Grid-sampled path in R^N, one vector per node (K + 1 entries).
using Path = std::vector<Eigen::VectorXd>;

struct Trajectory
{
    TimeGrid grid;
    Path x;
};

Path constant_path(const Eigen::VectorXd& v, const TimeGrid& grid);

// Hz = (0,...,0, z_{n+1},...,z_{n+m})
Eigen::VectorXd apply_H(const Hypergraph& g, const Eigen::VectorXd& z);

// Projection onto K_a(t) = { z : Hz = a(t) }.
Eigen::VectorXd project_K(const Hypergraph& g, const Eigen::VectorXd& z, const Eigen::VectorXd& a_t);

/**
 * Penalized problem x' + D phi_{p,q}(x) + (Hx - a)/lambda = h. Semi-implicit
 * Euler: the penalty is taken at t_{k+1} (implicit), the Laplacian at t_k.
 * Forcing and control use their right-endpoint samples.
 */
Trajectory solve_penalized(const Hypergraph& g, const EnergyParams& prm, double lambda, const Path& a,
                           const Path& h, const Eigen::VectorXd& x0, const TimeGrid& grid);

/**
 * Constrained inclusion x' + d phi_p(x) + d I_{K_a(t)}(x) contains h, by the
 * proximal implicit Euler scheme; the controlled coordinates are pinned to a
 * exactly at every node.
 */
Trajectory solve_constrained(const Hypergraph& g, double p, const Path& a, const Path& h,
                             const Eigen::VectorXd& x0, const TimeGrid& grid, const ProxOptions& prox = {});

/**
 * Free decay x' + D phi_{p,q}(x) = 0. Explicit Euler; for p < 2 the scheme
 * switches to implicit resolvent steps once the state is close enough to its
 * mean that explicit steps would overshoot.
 */
Trajectory solve_free(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x0,
                      const TimeGrid& grid);

// max_k |H x(t_k) - a(t_k)|
double constraint_violation(const Hypergraph& g, const Trajectory& traj, const Path& a);

} // namespace hyperlap
