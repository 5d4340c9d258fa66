#include "hyperlap/energy.hpp"
#include "hyperlap/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hyperlap {

namespace {

// Edge data in scaled form. With M = max - min over the edge and
// r_ij = |x_i - x_j| / M we have f_{e,q} = M * S^(1/q), S = sum_{i<j} r_ij^q.
// S lies in [1, #e(#e-1)/2], so every power below stays representable even
// for q in the thousands.
struct Scaled
{
    double M = 0.0;
    double S = 0.0;
};

double spread(const Eigen::VectorXd& x, const Edge& e)
{
    double lo = x[e.v[0]], hi = x[e.v[0]];
    for (int i : e.v) {
        lo = std::min(lo, x[i]);
        hi = std::max(hi, x[i]);
    }
    return hi - lo;
}

Scaled scaled(const Eigen::VectorXd& x, const Edge& e, double q)
{
    Scaled s;
    s.M = spread(x, e);
    if (s.M == 0.0)
        return s;
    for (std::size_t a = 0; a < e.v.size(); ++a)
        for (std::size_t b = a + 1; b < e.v.size(); ++b)
            s.S += std::pow(std::abs(x[e.v[a]] - x[e.v[b]]) / s.M, q);
    return s;
}

double sgn(double d) { return (d > 0.0) - (d < 0.0); }

} // namespace

namespace detail {

void check_params(const EnergyParams& prm, double min_exponent, const char* what)
{
    if (!(prm.p > min_exponent) || !(prm.q > min_exponent) || !std::isfinite(prm.q))
        throw Error("energy", "DegenerateExponent",
                    std::string(what) + " requires finite p, q > " + std::to_string(static_cast<int>(min_exponent)) +
                        " (got p=" + std::to_string(prm.p) + ", q=" + std::to_string(prm.q) + ")");
}

Eigen::MatrixXd hess_unchecked(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x)
{
    const double p = prm.p, q = prm.q;
    Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(g.N(), g.N());
    for (const Edge& e : g.edges()) {
        const std::size_t k = e.v.size();
        Scaled s = scaled(x, e, q);
        if (s.M == 0.0) {
            // phi is quadratic for p = q = 2, so its Hessian is the clique
            // Laplacian everywhere; in every other case the limit is dropped.
            if (p == 2.0 && q == 2.0) {
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b)
                        Hm(e.v[a], e.v[b]) += e.w * (a == b ? double(k - 1) : -1.0);
            }
            continue;
        }
        const double c1 = e.w * (q - 1.0) * std::pow(s.M, p - 2.0) * std::pow(s.S, (p - q) / q);
        const double c2 = e.w * (p - q) * std::pow(s.M, p - 2.0) * std::pow(s.S, (p - 2.0 * q) / q);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(k);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                if (a == b)
                    continue;
                const double d = x[e.v[a]] - x[e.v[b]];
                const double r = std::abs(d) / s.M;
                u[a] += std::pow(r, q - 1.0) * sgn(d);
                if (b > a) {
                    double pw = std::pow(r, q - 2.0);
                    if (!std::isfinite(pw))
                        pw = 0.0;
                    Hm(e.v[a], e.v[b]) -= c1 * pw;
                    Hm(e.v[b], e.v[a]) -= c1 * pw;
                    Hm(e.v[a], e.v[a]) += c1 * pw;
                    Hm(e.v[b], e.v[b]) += c1 * pw;
                }
            }
        }
        if (c2 != 0.0)
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b)
                    Hm(e.v[a], e.v[b]) += c2 * u[a] * u[b];
    }
    return Hm;
}

} // namespace detail

namespace {

// Energies and subgradients are defined for p >= 1 and q >= 1 (q may be infinite).
void require_exponents(double p, double q, const char* what)
{
    if (!(p >= 1.0) || !std::isfinite(p) || !(q >= 1.0))
        throw Error("energy", "DegenerateExponent",
                    std::string(what) + " requires p >= 1 and q >= 1 (got p=" + std::to_string(p) +
                        ", q=" + std::to_string(q) + ")");
}

} // namespace

double f_e(const Eigen::VectorXd& x, const Edge& e)
{
    return spread(x, e);
}

double phi_p(const Hypergraph& g, double p, const Eigen::VectorXd& x)
{
    require_exponents(p, kInf, "phi_p");
    double s = 0.0;
    for (const Edge& e : g.edges())
        s += e.w * std::pow(f_e(x, e), p);
    return s / p;
}

SubgradientFace subdiff_face(const Hypergraph& g, double p, const Eigen::VectorXd& x)
{
    require_exponents(p, kInf, "subdiff_face");
    SubgradientFace out;
    out.eta = Eigen::VectorXd::Zero(g.N());
    const double tol = 1e-12 * (1.0 + x.norm());
    for (std::size_t id = 0; id < g.edges().size(); ++id) {
        const Edge& e = g.edges()[id];
        EdgeFace face;
        face.edge = static_cast<int>(id);
        double lo = x[e.v[0]], hi = x[e.v[0]];
        for (int i : e.v) {
            lo = std::min(lo, x[i]);
            hi = std::max(hi, x[i]);
        }
        face.value = hi - lo;
        for (int i : e.v) {
            if (x[i] >= hi - tol)
                face.argmax.push_back(i);
            if (x[i] <= lo + tol)
                face.argmin.push_back(i);
        }
        if (face.value > 0.0) {
            // uniform average of 1_i - 1_j over argmax x argmin
            const double scale = e.w * std::pow(face.value, p - 1.0);
            for (int i : face.argmax)
                out.eta[i] += scale / face.argmax.size();
            for (int j : face.argmin)
                out.eta[j] -= scale / face.argmin.size();
        }
        out.faces.push_back(std::move(face));
    }
    return out;
}

double f_eq(const Eigen::VectorXd& x, const Edge& e, double q)
{
    require_exponents(1.0, q, "f_eq");
    if (std::isinf(q))
        return f_e(x, e);
    Scaled s = scaled(x, e, q);
    return s.M == 0.0 ? 0.0 : s.M * std::pow(s.S, 1.0 / q);
}

double phi_pq(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x)
{
    require_exponents(prm.p, prm.q, "phi_pq");
    if (std::isinf(prm.q))
        return phi_p(g, prm.p, x);
    double total = 0.0;
    for (const Edge& e : g.edges()) {
        Scaled s = scaled(x, e, prm.q);
        if (s.M > 0.0)
            total += e.w * std::pow(s.M, prm.p) * std::pow(s.S, prm.p / prm.q);
    }
    return total / prm.p;
}

Eigen::VectorXd grad_phi_pq(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x)
{
    detail::check_params(prm, 1.0, "gradient");
    const double p = prm.p, q = prm.q;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(g.N());
    for (const Edge& e : g.edges()) {
        Scaled s = scaled(x, e, q);
        if (s.M == 0.0)
            continue;
        const double coeff = e.w * std::pow(s.M, p - 1.0) * std::pow(s.S, (p - q) / q);
        for (int l : e.v) {
            double acc = 0.0;
            for (int i : e.v) {
                if (i == l)
                    continue;
                const double d = x[l] - x[i];
                acc += std::pow(std::abs(d) / s.M, q - 1.0) * sgn(d);
            }
            grad[l] += coeff * acc;
        }
    }
    return grad;
}

Eigen::MatrixXd hess_phi_pq(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x)
{
    detail::check_params(prm, 2.0, "Hessian");
    return detail::hess_unchecked(g, prm, x);
}

KappaBounds kappa_bounds(const Hypergraph& g, double p)
{
    require_exponents(p, kInf, "kappa_bounds");
    KappaBounds kb;
    const double W = g.total_weight();
    kb.kappa = std::max(std::pow(2.0, p) / p * W, std::sqrt(2.0) * std::pow(2.0, p - 1.0) * W);
    double a = 0.0, b = 0.0;
    for (const Edge& e : g.edges()) {
        const double s = static_cast<double>(e.v.size());
        a += e.w * std::pow(s * (s - 1.0), p);
        b += e.w * s * s * std::pow(s * (s - 1.0), p - 1.0);
    }
    kb.kappa_prime = std::max(a / p, b);
    return kb;
}

} // namespace hyperlap
