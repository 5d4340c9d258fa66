#include "hyperlap/control.hpp"
#include "hyperlap/error.hpp"

#include <cmath>
#include <string>

namespace hyperlap {

namespace {

void require_smooth(const ControlProblem& pb, const char* what)
{
    const EnergyParams& prm = pb.params;
    if (!(prm.p > 3.0) || !(prm.q > 3.0) || !std::isfinite(prm.q))
        throw Error("control", "DegenerateExponent",
                    std::string(what) + " requires p, q > 3 (got p=" + std::to_string(prm.p) +
                        ", q=" + std::to_string(prm.q) + ")");
    if (!(pb.lambda > 0.0))
        throw Error("control", "InvalidArgument", "penalty parameter lambda must be positive");
}

void require_grid(const ControlProblem& pb, const Path& path, const char* name)
{
    if (static_cast<int>(path.size()) != pb.grid.K + 1)
        throw Error("control", "GridMismatch",
                    std::string(name) + " has " + std::to_string(path.size()) + " samples, grid needs " +
                        std::to_string(pb.grid.K + 1));
    for (const Eigen::VectorXd& v : path)
        if (v.size() != pb.G.N())
            throw Error("control", "GridMismatch", std::string(name) + " sample has wrong dimension");
}

void require_traj(const ControlProblem& pb, const Trajectory& traj)
{
    if (!(traj.grid == pb.grid))
        throw Error("control", "GridMismatch", "trajectory grid differs from the problem grid");
    require_grid(pb, traj.x, "trajectory");
}

// Trapezoidal weights of the state integral.
double trap_weight(const TimeGrid& grid, int k)
{
    return (k == 0 || k == grid.K) ? 0.5 * grid.dt() : grid.dt();
}

// P = (I + (dt/lambda) H)^{-1}, diagonal.
Eigen::VectorXd apply_P(const ControlProblem& pb, Eigen::VectorXd v)
{
    v.tail(pb.G.m()) /= 1.0 + pb.grid.dt() / pb.lambda;
    return v;
}

// Adjoint value at t_K as seen by the discrete gradient. It differs from the
// stored terminal value -(x(T) - z_*) by O(dt / lambda).
Eigen::VectorXd effective_terminal(const ControlProblem& pb, const Trajectory& traj, const AdjointPath& gamma)
{
    const int K = pb.grid.K;
    Eigen::VectorXd r = traj.x[K] - pb.x_target[K];
    return apply_P(pb, gamma[K] - trap_weight(pb.grid, K) / pb.lambda * r);
}

Path shape(const ControlProblem& pb, Path a)
{
    for (Eigen::VectorXd& v : a)
        v.head(pb.G.n()).setZero();
    return a;
}

struct Evaluation
{
    Trajectory traj;
    AdjointPath gamma;
    Path grad;
    double J = 0.0;
};

Evaluation evaluate(const ControlProblem& pb, const Path& a, bool with_gradient)
{
    Evaluation ev;
    ev.traj = forward(pb, a);
    ev.J = cost_Jql(pb, a, ev.traj);
    if (with_gradient) {
        ev.gamma = solve_adjoint(pb, a, ev.traj);
        const int K = pb.grid.K;
        ev.grad.resize(K + 1);
        for (int k = 0; k < K; ++k)
            ev.grad[k] = apply_H(pb.G, a[k] - ev.gamma[k]);
        ev.grad[K] = apply_H(pb.G, a[K] - effective_terminal(pb, ev.traj, ev.gamma));
    }
    return ev;
}

Path axpy(const Path& a, double s, const Path& g)
{
    Path out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        out[k] = a[k] + s * g[k];
    return out;
}

double sup_distance(const Path& a, const Path& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        d = std::max(d, (a[k] - b[k]).norm());
    return d;
}

} // namespace

Eigen::VectorXd initial_state(const ControlProblem& pb, const Path& a)
{
    if (pb.x0_free.size() != pb.G.n())
        throw Error("control", "DimensionMismatch", "x0_free must have n entries");
    Eigen::VectorXd x0(pb.G.N());
    x0.head(pb.G.n()) = pb.x0_free;
    x0.tail(pb.G.m()) = a.at(0).tail(pb.G.m());
    return x0;
}

Trajectory forward(const ControlProblem& pb, const Path& a)
{
    require_grid(pb, a, "control");
    return solve_penalized(pb.G, pb.params, pb.lambda, a, pb.h, initial_state(pb, a), pb.grid);
}

double cost_J(const ControlProblem& pb, const Path& a, const Trajectory& traj)
{
    require_traj(pb, traj);
    require_grid(pb, a, "control");
    require_grid(pb, pb.x_target, "x_target");
    double J = 0.0;
    for (int k = 0; k <= pb.grid.K; ++k)
        J += 0.5 * trap_weight(pb.grid, k) * (traj.x[k] - pb.x_target[k]).squaredNorm();
    for (int k = 1; k <= pb.grid.K; ++k)
        J += 0.5 * pb.grid.dt() * a[k].squaredNorm();
    return J;
}

double cost_Jql(const ControlProblem& pb, const Path& a, const Trajectory& traj)
{
    if (pb.z_target.size() != pb.G.N())
        throw Error("control", "DimensionMismatch", "z_target must have N entries");
    return cost_J(pb, a, traj) + 0.5 * pb.lambda * (traj.x.back() - pb.z_target).squaredNorm() +
           0.5 * pb.lambda * a[0].squaredNorm();
}

Path solve_linearized(const ControlProblem& pb, const Path& a, const Trajectory& traj, const Path& b)
{
    require_smooth(pb, "solve_linearized");
    require_traj(pb, traj);
    require_grid(pb, a, "control");
    require_grid(pb, b, "direction");
    const double dt = pb.grid.dt();
    Path xi(pb.grid.K + 1);
    xi[0] = apply_H(pb.G, b[0]);
    for (int k = 0; k < pb.grid.K; ++k) {
        Eigen::MatrixXd A = hess_phi_pq(pb.G, pb.params, traj.x[k]);
        Eigen::VectorXd v = xi[k] - dt * (A * xi[k]) + dt / pb.lambda * apply_H(pb.G, b[k + 1]);
        xi[k + 1] = apply_P(pb, v);
    }
    return xi;
}

AdjointPath solve_adjoint(const ControlProblem& pb, const Path& a, const Trajectory& traj)
{
    require_smooth(pb, "solve_adjoint");
    require_traj(pb, traj);
    require_grid(pb, a, "control");
    require_grid(pb, pb.x_target, "x_target");
    if (pb.z_target.size() != pb.G.N())
        throw Error("control", "DimensionMismatch", "z_target must have N entries");
    const int K = pb.grid.K;
    const double dt = pb.grid.dt();
    AdjointPath gamma(K + 1);
    gamma[K] = -(traj.x[K] - pb.z_target);
    Eigen::VectorXd sigma = effective_terminal(pb, traj, gamma);
    for (int k = K - 1; k >= 0; --k) {
        Eigen::MatrixXd A = hess_phi_pq(pb.G, pb.params, traj.x[k]);
        Eigen::VectorXd r = traj.x[k] - pb.x_target[k];
        Eigen::VectorXd v = sigma - dt * (A * sigma) - trap_weight(pb.grid, k) / pb.lambda * r;
        // the initial node carries no implicit penalty step
        sigma = k > 0 ? apply_P(pb, v) : v;
        gamma[k] = sigma;
    }
    return gamma;
}

double gateaux_dJ(const ControlProblem& pb, const Path& a, const Path& b, const Trajectory& traj,
                  const AdjointPath& gamma)
{
    require_grid(pb, a, "control");
    require_grid(pb, b, "direction");
    require_grid(pb, gamma, "adjoint");
    require_traj(pb, traj);
    const int K = pb.grid.K, m = pb.G.m();
    double d = pb.lambda * (a[0] - gamma[0]).tail(m).dot(b[0].tail(m));
    for (int k = 1; k < K; ++k)
        d += pb.grid.dt() * (a[k] - gamma[k]).tail(m).dot(b[k].tail(m));
    d += pb.grid.dt() * (a[K] - effective_terminal(pb, traj, gamma)).tail(m).dot(b[K].tail(m));
    return d;
}

double control_inner(const ControlProblem& pb, const Path& u, const Path& v)
{
    const int m = pb.G.m();
    double s = pb.lambda * u[0].tail(m).dot(v[0].tail(m));
    for (int k = 1; k <= pb.grid.K; ++k)
        s += pb.grid.dt() * u[k].tail(m).dot(v[k].tail(m));
    return s;
}

double control_norm(const ControlProblem& pb, const Path& u)
{
    return std::sqrt(control_inner(pb, u, u));
}

Path control_gradient(const ControlProblem& pb, const Path& a)
{
    require_smooth(pb, "control_gradient");
    return evaluate(pb, shape(pb, a), true).grad;
}

double budget(const Path& a, const TimeGrid& grid)
{
    double B = 0.0;
    for (int k = 0; k < grid.K; ++k)
        B += (a[k + 1] - a[k]).squaredNorm();
    return B / grid.dt();
}

Path project_admissible(const Path& a, double M, const TimeGrid& grid)
{
    if (!(M > 0.0))
        throw Error("control", "InvalidArgument", "budget M must be positive");
    if (static_cast<int>(a.size()) != grid.K + 1)
        throw Error("control", "GridMismatch", "control does not match the grid");
    const double B = budget(a, grid);
    if (B <= M * (1.0 + 1e-12))
        return a;
    // scale the derivative samples, keep a(0), integrate again
    const double s = std::sqrt(M / B);
    Path out(a.size());
    out[0] = a[0];
    for (int k = 0; k < grid.K; ++k)
        out[k + 1] = out[k] + s * (a[k + 1] - a[k]);
    return out;
}

OptResult optimize(const ControlProblem& pb, const Path& a_init, const OptOptions& opts)
{
    require_smooth(pb, "optimize");
    require_grid(pb, a_init, "initial control");

    OptResult res;
    Path a = project_admissible(shape(pb, a_init), pb.M, pb.grid);
    Evaluation ev = evaluate(pb, a, true);
    res.cost_history.push_back(ev.J);

    auto stationarity = [&](const Path& aa, const Path& g) {
        Path step = project_admissible(axpy(aa, -1.0, g), pb.M, pb.grid);
        return control_norm(pb, axpy(aa, -1.0, step)) / (1.0 + control_norm(pb, aa));
    };

    int it = 0;
    for (; it < opts.max_iters; ++it) {
        if (stationarity(a, ev.grad) <= opts.tol) {
            res.converged = true;
            break;
        }
        double s = opts.step0 / (1.0 + control_norm(pb, ev.grad));
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt, s *= opts.backtrack) {
            Path trial = project_admissible(axpy(a, -s, ev.grad), pb.M, pb.grid);
            Evaluation tv = evaluate(pb, trial, false);
            const double decrease = control_inner(pb, ev.grad, axpy(trial, -1.0, a));
            if (tv.J <= ev.J + opts.armijo * decrease && tv.J <= ev.J) {
                a = std::move(trial);
                ev = evaluate(pb, a, true);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // no representable decrease left: accept if we are at rounding level
            if (stationarity(a, ev.grad) <= std::max(opts.tol, 1e-10))
                res.converged = true;
            else
                throw Error("control", "NoDescent", "line search exhausted at iteration " + std::to_string(it));
            break;
        }
        res.cost_history.push_back(ev.J);
    }

    res.iterations = it;
    res.a = a;
    res.x = ev.traj;
    res.gamma = ev.gamma;
    res.residual = control_norm(pb, ev.grad) / (1.0 + control_norm(pb, a));
    res.budget_usage = budget(a, pb.grid);
    return res;
}

SweepReport sweep_to_original(const ControlProblem& pb, const std::vector<SweepPoint>& schedule,
                              const Path& a_init, const OptOptions& opts)
{
    SweepReport rep;
    Path a = a_init;
    for (const SweepPoint& sp : schedule) {
        ControlProblem stage_pb = pb;
        stage_pb.params.q = sp.q;
        stage_pb.lambda = sp.lambda;
        SweepStage st;
        st.q = sp.q;
        st.lambda = sp.lambda;
        st.opt = optimize(stage_pb, a, opts);
        st.J_penalized = st.opt.cost_history.back();
        Trajectory orig = solve_constrained(pb.G, pb.params.p, st.opt.a, pb.h, initial_state(pb, st.opt.a), pb.grid);
        st.J_original = cost_J(pb, st.opt.a, orig);
        for (const Eigen::VectorXd& gk : st.opt.gamma) {
            st.free_adjoint_norm = std::max(st.free_adjoint_norm, gk.head(pb.G.n()).norm());
            st.lambda_gamma_sup = std::max(st.lambda_gamma_sup, sp.lambda * gk.norm());
        }
        if (!rep.stages.empty())
            rep.distances.push_back(sup_distance(rep.stages.back().opt.a, st.opt.a));
        a = st.opt.a;
        rep.stages.push_back(std::move(st));
    }
    return rep;
}

} // namespace hyperlap
