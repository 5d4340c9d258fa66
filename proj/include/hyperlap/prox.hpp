#pragma once

#include "hyperlap/hypergraph.hpp"

#include <Eigen/Dense>
#include <vector>

namespace hyperlap {

struct ProxOptions
{
    int max_iters = 200;
    double tol = 1e-13; // relative tolerance on the optimality conditions
};

struct ProxResult
{
    Eigen::VectorXd z;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0; // scaled optimality measure of the returned (best) iterate
};

/**
 * Proximal map of the nonsmooth energy with some coordinates pinned:
 *
 *   argmin_z  |z_F - y_F|^2 / (2 tau) + phi_p(z)   subject to z_i = y_i, i not in F,
 *
 * where F = { i : free[i] }. Solved exactly (up to tolerance) by a primal-dual
 * interior point method on the epigraph form f_e(z) = u_e - l_e with
 * l_e <= z_i <= u_e for i in e.
 */
ProxResult prox_phi_p(const Hypergraph& g, double p, double tau, const Eigen::VectorXd& y,
                      const std::vector<char>& free, const ProxOptions& opts = {});

} // namespace hyperlap
