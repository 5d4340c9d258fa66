#include "hyperlap/dynamics.hpp"
#include "hyperlap/error.hpp"
#include "hyperlap/spectral.hpp"

#include <cmath>
#include <string>

namespace hyperlap {

namespace {

constexpr double kBlowup = 1e12;

void check_path(const Hypergraph& g, const Path& path, const TimeGrid& grid, const char* name)
{
    if (static_cast<int>(path.size()) != grid.K + 1)
        throw Error("dynamics", "GridMismatch",
                    std::string(name) + " has " + std::to_string(path.size()) + " samples, grid needs " +
                        std::to_string(grid.K + 1));
    for (const Eigen::VectorXd& v : path)
        if (v.size() != g.N())
            throw Error("dynamics", "GridMismatch", std::string(name) + " sample has wrong dimension");
}

void check_state(const Hypergraph& g, const Eigen::VectorXd& x0)
{
    if (x0.size() != g.N())
        throw Error("dynamics", "DimensionMismatch",
                    "initial state has " + std::to_string(x0.size()) + " entries, expected " + std::to_string(g.N()));
}

void check_grid(const TimeGrid& grid)
{
    if (!(grid.T > 0.0) || grid.K < 1)
        throw Error("dynamics", "InvalidGrid", "time grid needs T > 0 and at least one step");
}

void guard(const Eigen::VectorXd& x, int k)
{
    if (!x.allFinite() || x.norm() > kBlowup)
        throw Error("dynamics", "StepUnstable",
                    "state norm exceeded 1e12 at step " + std::to_string(k) + "; use a smaller time step");
}

} // namespace

Path constant_path(const Eigen::VectorXd& v, const TimeGrid& grid)
{
    return Path(grid.K + 1, v);
}

Eigen::VectorXd apply_H(const Hypergraph& g, const Eigen::VectorXd& z)
{
    Eigen::VectorXd out = z;
    out.head(g.n()).setZero();
    return out;
}

Eigen::VectorXd project_K(const Hypergraph& g, const Eigen::VectorXd& z, const Eigen::VectorXd& a_t)
{
    Eigen::VectorXd out = z;
    out.tail(g.m()) = a_t.tail(g.m());
    return out;
}

Trajectory solve_penalized(const Hypergraph& g, const EnergyParams& prm, double lambda, const Path& a,
                           const Path& h, const Eigen::VectorXd& x0, const TimeGrid& grid)
{
    detail::check_params(prm, 1.0, "solve_penalized");
    check_grid(grid);
    if (!(lambda > 0.0))
        throw Error("dynamics", "InvalidArgument", "penalty parameter lambda must be positive");
    check_state(g, x0);
    check_path(g, a, grid, "control");
    check_path(g, h, grid, "forcing");

    const double dt = grid.dt();
    const double r = dt / lambda;
    const int m = g.m();
    Trajectory traj{grid, {}};
    traj.x.reserve(grid.K + 1);
    traj.x.push_back(x0);
    Eigen::VectorXd x = x0;
    for (int k = 0; k < grid.K; ++k) {
        Eigen::VectorXd next = x - dt * grad_phi_pq(g, prm, x) + dt * h[k + 1];
        next.tail(m) = (next.tail(m) + r * a[k + 1].tail(m)) / (1.0 + r);
        x = std::move(next);
        guard(x, k + 1);
        traj.x.push_back(x);
    }
    return traj;
}

Trajectory solve_constrained(const Hypergraph& g, double p, const Path& a, const Path& h,
                             const Eigen::VectorXd& x0, const TimeGrid& grid, const ProxOptions& prox)
{
    if (!(p >= 1.0))
        throw Error("energy", "DegenerateExponent", "solve_constrained requires p >= 1");
    check_grid(grid);
    check_state(g, x0);
    check_path(g, a, grid, "control");
    check_path(g, h, grid, "forcing");
    const int m = g.m();
    const double dev = (x0.tail(m) - a[0].tail(m)).lpNorm<Eigen::Infinity>();
    if (dev > 1e-12 * (1.0 + a[0].tail(m).lpNorm<Eigen::Infinity>()))
        throw Error("dynamics", "InfeasibleInit", "controlled components of x0 differ from a(0)");

    std::vector<char> free(g.N(), 0);
    for (int i = 0; i < g.n(); ++i)
        free[i] = 1;

    const double dt = grid.dt();
    Trajectory traj{grid, {}};
    traj.x.reserve(grid.K + 1);
    Eigen::VectorXd x = project_K(g, x0, a[0]);
    traj.x.push_back(x);
    for (int k = 0; k < grid.K; ++k) {
        Eigen::VectorXd y = project_K(g, x + dt * h[k + 1], a[k + 1]);
        ProxResult pr = prox_phi_p(g, p, dt, y, free, prox);
        if (!pr.converged && !(pr.residual <= 1e-9))
            throw Error("dynamics", "ProxNoConverge",
                        "inner prox solver stalled at step " + std::to_string(k + 1) + " (residual " +
                            std::to_string(pr.residual) + ")");
        x = project_K(g, pr.z, a[k + 1]);
        guard(x, k + 1);
        traj.x.push_back(x);
    }
    return traj;
}

Trajectory solve_free(const Hypergraph& g, const EnergyParams& prm, const Eigen::VectorXd& x0,
                      const TimeGrid& grid)
{
    detail::check_params(prm, 1.0, "solve_free");
    check_grid(grid);
    check_state(g, x0);
    const double dt = grid.dt();

    // Below this distance from the mean an explicit step would overshoot the
    // finite-time extinction of the p < 2 flow: |dt * grad| ~ dt kappa' X^(p-1) >= X.
    double switch_radius = 0.0;
    if (prm.p < 2.0)
        switch_radius = std::max(1e-6, std::pow(dt * kappa_bounds(g, prm.p).kappa_prime, 1.0 / (2.0 - prm.p)));

    Trajectory traj{grid, {}};
    traj.x.reserve(grid.K + 1);
    traj.x.push_back(x0);
    Eigen::VectorXd x = x0;
    bool implicit = false;
    for (int k = 0; k < grid.K; ++k) {
        if (!implicit && prm.p < 2.0)
            implicit = (x.array() - x.mean()).matrix().norm() < switch_radius;
        if (implicit)
            x = resolvent_pq(g, prm, dt, x);
        else
            x = x - dt * grad_phi_pq(g, prm, x);
        guard(x, k + 1);
        traj.x.push_back(x);
    }
    return traj;
}

double constraint_violation(const Hypergraph& g, const Trajectory& traj, const Path& a)
{
    if (a.size() != traj.x.size())
        throw Error("dynamics", "GridMismatch", "control and trajectory have different node counts");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        worst = std::max(worst, (traj.x[k].tail(g.m()) - a[k].tail(g.m())).norm());
    return worst;
}

} // namespace hyperlap
