#pragma once

#include "hyperlap/hypergraph.hpp"

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace hyperlap {

// Sentinel for q = infinity: routes the smoothed energy to the nonsmooth one.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct EnergyParams
{
    double p = 2.0;
    double q = 2.0; // may be kInf
};

struct EdgeFace
{
    int edge = 0;
    double value = 0.0;   // f_e(x)
    std::vector<int> argmax;
    std::vector<int> argmin;
};

struct SubgradientFace
{
    std::vector<EdgeFace> faces;
    Eigen::VectorXd eta; // canonical element of the subdifferential
};

struct KappaBounds
{
    double kappa = 0.0;       // bounds phi_p and its subgradients
    double kappa_prime = 0.0; // q-uniform bound for phi_pq and its gradient
};

double f_e(const Eigen::VectorXd& x, const Edge& e);
double phi_p(const Hypergraph& g, double p, const Eigen::VectorXd& x);
SubgradientFace subdiff_face(const Hypergraph& g, double p, const Eigen::VectorXd& x);

double f_eq(const Eigen::VectorXd& x, const Edge& e, double q);
double phi_pq(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x);

// Requires p, q > 1 (finite q).
Eigen::VectorXd grad_phi_pq(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x);

// Requires p, q > 2 (finite q).
Eigen::MatrixXd hess_phi_pq(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x);

KappaBounds kappa_bounds(const Hypergraph& g, double p);

namespace detail {

// Hessian without the exponent guard, used by the Newton-type solvers for
// 1 < p, q. Pair terms that would be singular (coincident values, q < 2) are
// dropped.
Eigen::MatrixXd hess_unchecked(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x);

void check_params(const EnergyParams& prm, double min_exponent, const char* what);

} // namespace detail

} // namespace hyperlap
