#include "hyperlap/spectral.hpp"
#include "hyperlap/error.hpp"
#include "hyperlap/prox.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hyperlap {

namespace {

Eigen::VectorXd centered(const Eigen::VectorXd& x)
{
    return (x.array() - x.mean()).matrix();
}

void require_connected(const Hypergraph& g)
{
    if (!is_connected(g))
        throw Error("spectral", "Disconnected", "hypergraph must be connected");
}

// Shifts xi so that its mean equals that of x. The exact resolvent preserves
// the mean; this removes the solver's tolerance-level drift.
void restore_mean(Eigen::VectorXd& xi, const Eigen::VectorXd& x)
{
    xi.array() += x.mean() - xi.mean();
}

// Fixes the reflection ambiguity zeta ~ -zeta: first nonzero entry positive.
void fix_sign(Eigen::VectorXd& z)
{
    for (int i = 0; i < z.size(); ++i) {
        if (std::abs(z[i]) > 1e-12) {
            if (z[i] < 0.0)
                z = -z;
            return;
        }
    }
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    for (int i = 0; i < a.size(); ++i)
        if (a[i] != b[i])
            return a[i] < b[i];
    return false;
}

struct Candidate
{
    double value = 0.0;
    Eigen::VectorXd zeta;
    double residual = 0.0;
};

double stationarity(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& z, double value)
{
    return (value * z - grad_phi_pq(g, prm, z)).norm();
}

Eigen::VectorXd to_sphere(Eigen::VectorXd z)
{
    z = centered(z);
    return z / z.norm();
}

// Projected gradient with Armijo backtracking on the unit sphere of the
// mean-free subspace.
Candidate descend(const Hypergraph& g, const EnergyParams& prm, Eigen::VectorXd z, const EigenOptions& opts)
{
    z = to_sphere(z);
    double val = rayleigh(g, prm, z);
    double step = 1.0;
    for (int it = 0; it < opts.iters; ++it) {
        Eigen::VectorXd dir = centered(grad_phi_pq(g, prm, z) - val * z);
        const double gn2 = dir.squaredNorm();
        if (std::sqrt(gn2) <= 0.1 * opts.tol)
            break;
        step = std::min(1.0, 2.0 * step);
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            Eigen::VectorXd trial = to_sphere(z - step * dir);
            const double tv = rayleigh(g, prm, trial);
            if (tv <= val - 1e-4 * step * prm.p * gn2) {
                z = trial;
                val = tv;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved)
            break;
    }
    return {val, z, stationarity(g, prm, z, val)};
}

// Newton on the bordered system  D phi(z) - l z - mu 1 = 0, (1 - z.z)/2 = 0,
// 1.z = 0. Used to drive the stationarity residual to rounding level once
// projected gradient has found the basin.
Candidate polish(const Hypergraph& g, const EnergyParams& prm, const Candidate& start)
{
    const int N = g.N();
    Candidate best = start;
    Eigen::VectorXd z = start.zeta;
    double l = start.value, mu = 0.0;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd gr = grad_phi_pq(g, prm, z);
        Eigen::VectorXd F(N + 2);
        F.head(N) = gr - l * z - mu * Eigen::VectorXd::Ones(N);
        F[N] = 0.5 * (1.0 - z.squaredNorm());
        F[N + 1] = z.sum();
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(N + 2, N + 2);
        J.topLeftCorner(N, N) = detail::hess_unchecked(g, prm, z) - l * Eigen::MatrixXd::Identity(N, N);
        J.block(0, N, N, 1) = -z;
        J.block(0, N + 1, N, 1) = -Eigen::VectorXd::Ones(N);
        J.block(N, 0, 1, N) = -z.transpose();
        J.block(N + 1, 0, 1, N) = Eigen::RowVectorXd::Ones(N);
        Eigen::VectorXd d = J.completeOrthogonalDecomposition().solve(-F);
        if (!d.allFinite())
            break;
        z += d.head(N);
        l += d[N];
        mu += d[N + 1];
        Eigen::VectorXd zs = to_sphere(z);
        const double val = rayleigh(g, prm, zs);
        const double res = stationarity(g, prm, zs, val);
        if (res < best.residual && val <= start.value + 1e-10 * std::abs(start.value)) {
            best = {val, zs, res};
        }
        if (res <= 1e-14 * (1.0 + std::abs(val)))
            break;
    }
    return best;
}

} // namespace

PoincareConstants poincare_constants(const Hypergraph& g, double p)
{
    require_connected(g);
    PoincareConstants c;
    c.diam = diameter(g);
    c.nu_E = nu_E(g);
    const double N = g.N();
    double wmin = std::numeric_limits<double>::infinity(), upper = 0.0;
    for (const Edge& e : g.edges()) {
        wmin = std::min(wmin, e.w);
        upper += e.w * std::pow(static_cast<double>(e.v.size()), p);
    }
    c.gamma = wmin / (std::pow(N, p) * std::pow(static_cast<double>(c.diam), p - 1.0));
    c.Gamma = upper * std::pow(N, p / 2.0);
    return c;
}

Envelope decay_envelope(const PoincareConstants& c, double p, double X0, double t)
{
    auto bound = [&](double k) {
        if (p == 2.0)
            return X0 * std::exp(-k * t);
        if (p < 2.0) {
            const double s = std::pow(X0, 2.0 - p) - (2.0 - p) * k * t;
            return s > 0.0 ? std::pow(s, 1.0 / (2.0 - p)) : 0.0;
        }
        if (X0 == 0.0)
            return 0.0;
        return std::pow(std::pow(X0, -(p - 2.0)) + (p - 2.0) * k * t, -1.0 / (p - 2.0));
    };
    return {bound(c.Gamma), bound(c.gamma)};
}

Eigen::VectorXd resolvent_pq(const Hypergraph& g, const EnergyParams& prm, double lambda, const Eigen::VectorXd& x)
{
    detail::check_params(prm, 1.0, "resolvent_pq");
    if (!(lambda > 0.0))
        throw Error("spectral", "InvalidArgument", "lambda must be positive");
    const double tol = 1e-10 * (1.0 + x.norm());
    const int N = g.N();
    auto residual = [&](const Eigen::VectorXd& xi) { return Eigen::VectorXd(xi + lambda * grad_phi_pq(g, prm, xi) - x); };
    auto merit = [&](const Eigen::VectorXd& xi) { return (xi - x).squaredNorm() / (2.0 * lambda) + phi_pq(g, prm, xi); };

    Eigen::VectorXd xi = x;
    Eigen::VectorXd F = residual(xi);
    double fn = F.norm();
    for (int it = 0; it < 500 && fn > tol; ++it) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Identity(N, N) + lambda * detail::hess_unchecked(g, prm, xi);
        Eigen::VectorXd d = -J.ldlt().solve(F);
        bool accepted = false;
        if (d.allFinite()) {
            double alpha = 1.0;
            for (int h = 0; h <= 30; ++h, alpha *= 0.5) {
                Eigen::VectorXd trial = xi + alpha * d;
                Eigen::VectorXd Ft = residual(trial);
                if (Ft.norm() < fn) {
                    xi = trial;
                    F = Ft;
                    fn = Ft.norm();
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) {
            // gradient step on the strongly convex merit function, whose
            // gradient is F / lambda
            const double m0 = merit(xi);
            double step = lambda;
            for (int h = 0; h < 60; ++h, step *= 0.5) {
                Eigen::VectorXd trial = xi - step / lambda * F;
                if (merit(trial) <= m0 - 1e-4 * step / (lambda * lambda) * fn * fn) {
                    xi = trial;
                    F = residual(xi);
                    fn = F.norm();
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
                break;
        }
    }
    if (!(fn <= tol))
        throw Error("spectral", "NewtonNoConverge",
                    "resolvent residual " + std::to_string(fn) + " above tolerance " + std::to_string(tol));
    restore_mean(xi, x);
    return xi;
}

Eigen::VectorXd resolvent_p(const Hypergraph& g, double p, double lambda, const Eigen::VectorXd& x)
{
    if (!(p >= 1.0))
        throw Error("energy", "DegenerateExponent", "resolvent_p requires p >= 1");
    if (!(lambda > 0.0))
        throw Error("spectral", "InvalidArgument", "lambda must be positive");
    // On 2-uniform hypergraphs the smoothed and nonsmooth energies coincide.
    if (p > 1.0 && nu_E(g) <= 1.0)
        return resolvent_pq(g, {p, 2.0}, lambda, x);
    ProxResult pr = prox_phi_p(g, p, lambda, x, std::vector<char>(g.N(), 1));
    if (!pr.converged && !(pr.residual <= 1e-9))
        throw Error("spectral", "NoConverge", "prox solver residual " + std::to_string(pr.residual));
    restore_mean(pr.z, x);
    return pr.z;
}

Eigen::VectorXd yosida(const Hypergraph& g, double p, double q, double lambda, const Eigen::VectorXd& x)
{
    Eigen::VectorXd r = std::isinf(q) ? resolvent_p(g, p, lambda, x) : resolvent_pq(g, {p, q}, lambda, x);
    return (x - r) / lambda;
}

double yosida_schedule_q(double nu, double p, double lambda, double delta)
{
    if (nu <= 1.0)
        return 1.0;
    return std::ceil(p * std::log(nu) / std::log1p(std::pow(lambda, 1.0 + delta)));
}

double rayleigh(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x)
{
    const double nx = x.norm();
    if (nx == 0.0)
        throw Error("spectral", "ZeroVector", "Rayleigh quotient of the zero vector");
    if (std::abs(x.sum()) > 1e-10 * nx)
        throw Error("spectral", "NotMeanFree", "Rayleigh quotient needs a mean-free vector");
    return prm.p * phi_pq(g, prm, x) / std::pow(nx, prm.p);
}

EigenResult eigen_first_positive(const Hypergraph& g, const EnergyParams& prm, const EigenOptions& opts)
{
    require_connected(g);
    detail::check_params(prm, 1.0, "eigen_first_positive");
    const int N = g.N();
    if (N < 2)
        throw Error("spectral", "ZeroVector", "mean-free subspace is trivial for N = 1");

    std::vector<Eigen::VectorXd> starts;
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    for (int r = 0; r < opts.restarts; ++r) {
        Eigen::VectorXd z(N);
        for (int i = 0; i < N; ++i)
            z[i] = normal(rng);
        starts.push_back(z);
    }
    for (const Eigen::VectorXd& z : opts.extra_starts)
        if (z.size() == N && centered(z).norm() > 0.0)
            starts.push_back(z);

    bool have = false;
    Candidate best;
    for (const Eigen::VectorXd& z0 : starts) {
        Candidate c = descend(g, prm, z0, opts);
        if (c.residual > opts.tol)
            c = polish(g, prm, c);
        fix_sign(c.zeta);
        if (!have || c.value < best.value || (c.value == best.value && lex_less(c.zeta, best.zeta))) {
            best = c;
            have = true;
        }
    }
    EigenResult out;
    out.lambda1q = best.value;
    out.zeta = best.zeta;
    out.restarts = static_cast<int>(starts.size());
    out.residual = best.residual;
    return out;
}

} // namespace hyperlap
