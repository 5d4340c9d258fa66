#include "hyperlap/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyperlap {

namespace {

constexpr double kInfResidual = std::numeric_limits<double>::infinity();

// One linear inequality  sum_t coef[t] * v[idx[t]] <= rhs  (at most two terms).
struct Row
{
    int idx[2] = {-1, -1};
    double coef[2] = {0.0, 0.0};
    double rhs = 0.0;

    double dot(const Eigen::VectorXd& v) const
    {
        double s = 0.0;
        for (int t = 0; t < 2; ++t)
            if (idx[t] >= 0)
                s += coef[t] * v[idx[t]];
        return s;
    }
};

struct Problem
{
    int nf = 0; // free coordinates
    int nv = 0; // total variables
    std::vector<int> var_of;            // vertex -> variable index or -1
    std::vector<int> edge_ids;          // edges carried by the program
    std::vector<Row> rows;
    Eigen::VectorXd y;
    double tau = 1.0;
    double p = 2.0;
    const Hypergraph* g = nullptr;

    int u_index(std::size_t k) const { return nf + static_cast<int>(k); }
    int l_index(std::size_t k) const { return nf + static_cast<int>(edge_ids.size() + k); }
};

Eigen::VectorXd objective_grad(const Problem& P, const Eigen::VectorXd& v)
{
    Eigen::VectorXd gr = Eigen::VectorXd::Zero(P.nv);
    for (int i = 0; i < P.g->N(); ++i)
        if (P.var_of[i] >= 0)
            gr[P.var_of[i]] = (v[P.var_of[i]] - P.y[i]) / P.tau;
    for (std::size_t k = 0; k < P.edge_ids.size(); ++k) {
        const double w = P.g->edges()[P.edge_ids[k]].w;
        const double d = v[P.u_index(k)] - v[P.l_index(k)];
        const double t = w * std::pow(d, P.p - 1.0);
        gr[P.u_index(k)] += t;
        gr[P.l_index(k)] -= t;
    }
    return gr;
}

Eigen::MatrixXd objective_hess(const Problem& P, const Eigen::VectorXd& v)
{
    Eigen::MatrixXd Hm = Eigen::MatrixXd::Zero(P.nv, P.nv);
    for (int j = 0; j < P.nf; ++j)
        Hm(j, j) = 1.0 / P.tau;
    if (P.p != 1.0) {
        for (std::size_t k = 0; k < P.edge_ids.size(); ++k) {
            const double w = P.g->edges()[P.edge_ids[k]].w;
            const double d = v[P.u_index(k)] - v[P.l_index(k)];
            const double c = w * (P.p - 1.0) * std::pow(d, P.p - 2.0);
            const int a = P.u_index(k), b = P.l_index(k);
            Hm(a, a) += c;
            Hm(b, b) += c;
            Hm(a, b) -= c;
            Hm(b, a) -= c;
        }
    }
    return Hm;
}

} // namespace

ProxResult prox_phi_p(const Hypergraph& g, double p, double tau, const Eigen::VectorXd& y,
                      const std::vector<char>& free, const ProxOptions& opts)
{
    ProxResult res;
    res.z = y;

    Problem P;
    P.g = &g;
    P.y = y;
    P.tau = tau;
    P.p = p;
    P.var_of.assign(g.N(), -1);
    for (int i = 0; i < g.N(); ++i)
        if (free[i])
            P.var_of[i] = P.nf++;
    for (std::size_t id = 0; id < g.edges().size(); ++id) {
        const Edge& e = g.edges()[id];
        if (std::any_of(e.v.begin(), e.v.end(), [&](int i) { return free[i] != 0; }))
            P.edge_ids.push_back(static_cast<int>(id));
    }
    const std::size_t ne = P.edge_ids.size();
    P.nv = P.nf + 2 * static_cast<int>(ne);
    if (P.nf == 0 || ne == 0) {
        res.converged = true;
        return res;
    }

    const double ys = 1.0 + y.lpNorm<Eigen::Infinity>();

    // starting point: z = y, edge bounds strictly outside the edge range
    Eigen::VectorXd v(P.nv);
    for (int i = 0; i < g.N(); ++i)
        if (P.var_of[i] >= 0)
            v[P.var_of[i]] = y[i];
    for (std::size_t k = 0; k < ne; ++k) {
        const Edge& e = g.edges()[P.edge_ids[k]];
        double lo = y[e.v[0]], hi = y[e.v[0]];
        for (int i : e.v) {
            lo = std::min(lo, y[i]);
            hi = std::max(hi, y[i]);
        }
        const double pad = 0.1 * ys + 0.5 * (hi - lo);
        v[P.u_index(k)] = hi + pad;
        v[P.l_index(k)] = lo - pad;
        for (int i : e.v) {
            const int vi = P.var_of[i];
            Row upper, lower;
            // z_i - u_e <= 0  and  l_e - z_i <= 0
            upper.idx[0] = P.u_index(k);
            upper.coef[0] = -1.0;
            lower.idx[0] = P.l_index(k);
            lower.coef[0] = 1.0;
            if (vi >= 0) {
                upper.idx[1] = vi;
                upper.coef[1] = 1.0;
                lower.idx[1] = vi;
                lower.coef[1] = -1.0;
            } else {
                upper.rhs = -y[i];
                lower.rhs = y[i];
            }
            P.rows.push_back(upper);
            P.rows.push_back(lower);
        }
    }
    const int nc = static_cast<int>(P.rows.size());

    auto slacks = [&](const Eigen::VectorXd& vv) {
        Eigen::VectorXd s(nc);
        for (int j = 0; j < nc; ++j)
            s[j] = P.rows[j].rhs - P.rows[j].dot(vv);
        return s;
    };
    auto apply_GT = [&](const Eigen::VectorXd& c) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(P.nv);
        for (int j = 0; j < nc; ++j)
            for (int t = 0; t < 2; ++t)
                if (P.rows[j].idx[t] >= 0)
                    out[P.rows[j].idx[t]] += P.rows[j].coef[t] * c[j];
        return out;
    };

    Eigen::VectorXd s = slacks(v);
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(nc, 1.0);

    auto measures = [&](const Eigen::VectorXd& vv, const Eigen::VectorXd& ss, const Eigen::VectorXd& mm) {
        Eigen::VectorXd rd = objective_grad(P, vv) + apply_GT(mm);
        const double dual = tau * rd.lpNorm<Eigen::Infinity>() / ys;
        const double comp = tau * mm.dot(ss) / nc / (ys * ys);
        return std::pair<double, double>(dual, comp);
    };

    // Near the optimum the Newton systems become ill-conditioned and the
    // iterates can wander at the rounding level, so the best iterate is kept
    // and the loop stops once it has not improved for a while.
    Eigen::VectorXd best_v = v;
    double best = kInfResidual;
    int stalled = 0;
    for (int it = 0; it < opts.max_iters; ++it) {
        auto [dual, comp] = measures(v, s, mu);
        res.iterations = it;
        const double r = std::max(dual, std::sqrt(comp));
        if (r < best) {
            best = r;
            best_v = v;
            stalled = 0;
        } else if (++stalled >= 15) {
            break;
        }
        if (dual <= opts.tol && comp <= opts.tol * opts.tol) {
            res.converged = true;
            break;
        }

        const double target = 0.1 * mu.dot(s) / nc;
        Eigen::VectorXd rd = objective_grad(P, v) + apply_GT(mu);
        Eigen::MatrixXd K = objective_hess(P, v);
        Eigen::VectorXd corr(nc);
        for (int j = 0; j < nc; ++j) {
            const Row& r = P.rows[j];
            const double d = mu[j] / s[j];
            for (int a = 0; a < 2; ++a) {
                if (r.idx[a] < 0)
                    continue;
                for (int b = 0; b < 2; ++b)
                    if (r.idx[b] >= 0)
                        K(r.idx[a], r.idx[b]) += d * r.coef[a] * r.coef[b];
            }
            corr[j] = (target - mu[j] * s[j]) / s[j];
        }
        Eigen::VectorXd rhs = -rd - apply_GT(corr);
        Eigen::VectorXd dv = K.ldlt().solve(rhs);
        Eigen::VectorXd Gdv(nc);
        for (int j = 0; j < nc; ++j)
            Gdv[j] = P.rows[j].dot(dv);
        Eigen::VectorXd dmu = (Eigen::VectorXd::Constant(nc, target) - mu.cwiseProduct(s) + mu.cwiseProduct(Gdv))
                                  .cwiseQuotient(s);

        double alpha = 1.0;
        for (int j = 0; j < nc; ++j) {
            if (Gdv[j] > 0.0)
                alpha = std::min(alpha, 0.99 * s[j] / Gdv[j]);
            if (dmu[j] < 0.0)
                alpha = std::min(alpha, -0.99 * mu[j] / dmu[j]);
        }
        if (!(alpha > 0.0) || !dv.allFinite())
            break;
        // Slacks are advanced along the step rather than recomputed from v:
        // near the solution the active slacks are far below the rounding
        // level of the primal coordinates.
        v += alpha * dv;
        s -= alpha * Gdv;
        mu += alpha * dmu;
    }

    res.residual = best;
    for (int i = 0; i < g.N(); ++i)
        if (P.var_of[i] >= 0)
            res.z[i] = best_v[P.var_of[i]];
    return res;
}

} // namespace hyperlap
