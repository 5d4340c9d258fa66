#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hyperlap/error.hpp"
#include "hyperlap/spectral.hpp"
#include "support.hpp"

#include <functional>

using namespace hyperlap;
using testsupport::random_hypergraph;
using testsupport::random_mean_free;
using testsupport::random_vector;

namespace {

const Hypergraph& single_edge()
{
    static const Hypergraph g = Hypergraph::validate(2, 0, {{{0, 1}, 1.0}});
    return g;
}

std::string error_code(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.tag();
    }
    return "none";
}

double spread(const Eigen::VectorXd& x)
{
    return (x.array() - x.mean()).matrix().norm();
}

} // namespace

TEST_CASE("poincare_constants examples")
{
    const PoincareConstants c = poincare_constants(single_edge(), 2.0);
    CHECK(c.gamma == doctest::Approx(0.25));
    CHECK(c.Gamma == doctest::Approx(8.0));
    CHECK(c.nu_E == 1.0);
    CHECK(c.diam == 1);

    std::mt19937_64 rng(61);
    for (int s = 0; s < 10; ++s) {
        const Hypergraph g = random_hypergraph(rng, 7, 0, 3, 4);
        std::vector<Edge> scaled = g.edges();
        for (Edge& e : scaled)
            e.w *= 3.0;
        const Hypergraph g3 = Hypergraph::validate(7, 0, scaled);
        const PoincareConstants c1 = poincare_constants(g, 3.0), c3 = poincare_constants(g3, 3.0);
        CHECK(c3.gamma == doctest::Approx(3.0 * c1.gamma));
        CHECK(c3.Gamma == doctest::Approx(3.0 * c1.Gamma));
        for (double q : {2.0, 8.0}) {
            for (int t = 0; t < 100; ++t) {
                const Eigen::VectorXd x = random_vector(rng, 7);
                const double v = 3.0 * phi_pq(g, {3.0, q}, x), X = std::pow(spread(x), 3.0);
                CHECK(c1.gamma * X <= v);
                CHECK(v <= c1.Gamma * X);
            }
        }
    }
    const Hypergraph split = Hypergraph::validate(4, 0, {{{0, 1}, 1.0}, {{2, 3}, 1.0}});
    CHECK(error_code([&] { poincare_constants(split, 2.0); }) == "spectral/Disconnected");
}

TEST_CASE("decay_envelope examples")
{
    const PoincareConstants c{0.5, 4.0, 1.0, 1};
    const Envelope e2 = decay_envelope(c, 2.0, 3.0, 0.7);
    CHECK(e2.lower == doctest::Approx(3.0 * std::exp(-4.0 * 0.7)));
    CHECK(e2.upper == doctest::Approx(3.0 * std::exp(-0.5 * 0.7)));
    for (double p : {1.5, 2.0, 4.0}) {
        const Envelope e0 = decay_envelope(c, p, 2.0, 0.0);
        CHECK(e0.lower == doctest::Approx(2.0));
        CHECK(e0.upper == doctest::Approx(2.0));
        double prev_lo = kInf, prev_hi = kInf;
        for (double t = 0.0; t <= 5.0; t += 0.25) {
            const Envelope e = decay_envelope(c, p, 2.0, t);
            CHECK(e.lower <= e.upper);
            CHECK(e.lower <= prev_lo);
            CHECK(e.upper <= prev_hi);
            prev_lo = e.lower;
            prev_hi = e.upper;
        }
    }
    const Envelope late = decay_envelope(c, 1.5, 1.0, 100.0);
    CHECK(late.lower == 0.0);
    CHECK(late.upper == 0.0);
}

TEST_CASE("resolvent_pq examples and properties")
{
    CHECK((resolvent_pq(single_edge(), {2, 2}, 0.5, Eigen::Vector2d(1, 0)) - Eigen::Vector2d(0.75, 0.25)).norm() <=
          1e-12);
    std::mt19937_64 rng(62);
    for (int s = 0; s < 30; ++s) {
        const Hypergraph g = random_hypergraph(rng, 6, 0, 3, 4);
        const EnergyParams prm{2.0 + s % 3, 2.0 + 2 * (s % 4)};
        const Eigen::VectorXd c = Eigen::VectorXd::Constant(6, 0.3 * s);
        CHECK((resolvent_pq(g, prm, 0.5, c) - c).norm() <= 1e-14 * (1.0 + c.norm()));
        const Eigen::VectorXd x = random_vector(rng, 6), y = random_vector(rng, 6);
        const Eigen::VectorXd rx = resolvent_pq(g, prm, 0.5, x), ry = resolvent_pq(g, prm, 0.5, y);
        CHECK(std::abs(rx.mean() - x.mean()) <= 1e-12);
        CHECK((rx - ry).norm() <= (x - y).norm() * (1.0 + 1e-10));
        CHECK((rx + 0.5 * grad_phi_pq(g, prm, rx) - x).norm() <= 1e-10 * (1.0 + x.norm()));
        // Yosida-on-resolvent identity
        CHECK((yosida(g, prm.p, prm.q, 0.5, x) - grad_phi_pq(g, prm, rx)).norm() <= 1e-9 * (1.0 + x.norm()));
    }
}

TEST_CASE("resolvent_p examples and properties")
{
    const Eigen::Vector2d x(1, 0);
    CHECK((resolvent_p(single_edge(), 2.0, 0.5, x) - resolvent_pq(single_edge(), {2, 2}, 0.5, x)).norm() <= 1e-14);
    std::mt19937_64 rng(63);
    for (int s = 0; s < 30; ++s) {
        const Hypergraph g = random_hypergraph(rng, 6, 0, 3, 4);
        const double p = s % 3 == 0 ? 1.0 : (s % 3 == 1 ? 2.0 : 4.0);
        const Eigen::VectorXd c = Eigen::VectorXd::Constant(6, -1.0 + 0.1 * s);
        CHECK((resolvent_p(g, p, 0.5, c) - c).norm() <= 1e-10);
        const Eigen::VectorXd a = random_vector(rng, 6), b = random_vector(rng, 6);
        const Eigen::VectorXd ra = resolvent_p(g, p, 0.5, a), rb = resolvent_p(g, p, 0.5, b);
        CHECK(std::abs(ra.mean() - a.mean()) <= 1e-12);
        CHECK((ra - rb).norm() <= (a - b).norm() * (1.0 + 1e-8));
        // prox optimality: the objective cannot be lowered by random perturbations
        auto obj = [&](const Eigen::VectorXd& z) { return (z - a).squaredNorm() / 1.0 + phi_p(g, p, z); };
        const double best = obj(ra);
        for (int t = 0; t < 200; ++t)
            CHECK(obj(ra + random_vector(rng, 6, 1e-3)) >= best - 1e-10);
    }
}

TEST_CASE("resolvent gap bound on 3-uniform instances")
{
    std::mt19937_64 rng(64);
    for (int s = 0; s < 10; ++s) {
        const Hypergraph g = testsupport::random_uniform_hypergraph(rng, 7, 5, 3);
        const double p = 2.0, lam = 0.5, kappa = kappa_bounds(g, p).kappa, nu = nu_E(g);
        for (int t = 0; t < 10; ++t) {
            const Eigen::VectorXd x = random_vector(rng, 7);
            const double gap = (resolvent_p(g, p, lam, x) - resolvent_pq(g, {p, 8.0}, lam, x)).squaredNorm();
            CHECK(gap <= lam * kappa * (std::pow(nu, p / 8.0) - 1.0) * std::pow(x.norm(), p));
        }
    }
}

TEST_CASE("yosida examples")
{
    CHECK((yosida(single_edge(), 2.0, kInf, 0.5, Eigen::Vector2d(1, 0)) - Eigen::Vector2d(0.5, -0.5)).norm() <=
          1e-12);
    CHECK(yosida(single_edge(), 2.0, 4.0, 0.5, Eigen::Vector2d(2, 2)).isZero());
    CHECK(yosida_schedule_q(1.0, 2.0, 0.1, 0.5) == 1.0);
    const double q = yosida_schedule_q(3.0, 2.0, 0.1, 0.5);
    CHECK(2.0 * std::log(3.0) / std::log1p(std::pow(0.1, 1.5)) <= q);
    CHECK(q < 2.0 * std::log(3.0) / std::log1p(std::pow(0.1, 1.5)) + 1.0);

    std::mt19937_64 rng(65);
    for (int s = 0; s < 10; ++s) {
        const Hypergraph g = random_hypergraph(rng, 6, 0, 2, 4);
        const double kappa = kappa_bounds(g, 2.0).kappa, nu = nu_E(g);
        const Eigen::VectorXd x = random_vector(rng, 6);
        for (double lam : {1e-1, 1e-2}) {
            const double qs = yosida_schedule_q(nu, 2.0, lam, 0.5);
            const double gap = (yosida(g, 2.0, kInf, lam, x) - yosida(g, 2.0, qs, lam, x)).squaredNorm();
            CHECK(gap <= std::pow(lam, 0.5) * kappa * x.squaredNorm());
        }
    }
}

TEST_CASE("rayleigh examples")
{
    CHECK(rayleigh(single_edge(), {2, 2}, Eigen::Vector2d(1, -1)) == doctest::Approx(2.0));
    std::mt19937_64 rng(66);
    const Hypergraph g = random_hypergraph(rng, 7, 0, 3, 4);
    const PoincareConstants c = poincare_constants(g, 3.0);
    for (int s = 0; s < 100; ++s) {
        const Eigen::VectorXd x = random_mean_free(rng, 7);
        const double r = rayleigh(g, {3.0, 6.0}, x);
        CHECK(rayleigh(g, {3.0, 6.0}, 4.5 * x) == doctest::Approx(r).epsilon(1e-12));
        CHECK(r >= c.gamma);
    }
    CHECK(error_code([&] { rayleigh(g, {3, 6}, Eigen::VectorXd::Zero(7)); }) == "spectral/ZeroVector");
    CHECK(error_code([&] { rayleigh(g, {3, 6}, Eigen::VectorXd::Ones(7)); }) == "spectral/NotMeanFree");
}

TEST_CASE("eigen_first_positive examples")
{
    const EigenResult e = eigen_first_positive(single_edge(), {2, 2});
    CHECK(e.lambda1q == doctest::Approx(2.0).epsilon(1e-10));
    CHECK((e.zeta - Eigen::Vector2d(1, -1) / std::sqrt(2.0)).norm() <= 1e-10);

    std::mt19937_64 rng(67);
    for (int s = 0; s < 3; ++s) {
        const Hypergraph g = testsupport::random_uniform_hypergraph(rng, 6, 5, 3);
        const PoincareConstants c = poincare_constants(g, 2.0);
        EigenOptions o;
        o.seed = s;
        const EigenResult r = eigen_first_positive(g, {2.0, 4.0}, o);
        CHECK(c.gamma <= r.lambda1q);
        CHECK(r.lambda1q <= c.Gamma);
        CHECK(std::abs(r.zeta.sum()) <= 1e-12);
        CHECK(std::abs(r.zeta.norm() - 1.0) <= 1e-12);
        CHECK(r.residual <= o.tol);
        CHECK((r.lambda1q * r.zeta - grad_phi_pq(g, {2.0, 4.0}, r.zeta)).norm() <= o.tol);
        // no random mean-free vector beats the reported minimum
        for (int t = 0; t < 500; ++t)
            CHECK(rayleigh(g, {2.0, 4.0}, random_mean_free(rng, 6)) >= r.lambda1q * (1.0 - 1e-12));
        const EigenResult again = eigen_first_positive(g, {2.0, 4.0}, o);
        CHECK(again.lambda1q == r.lambda1q);
        CHECK(again.zeta == r.zeta);
    }
    const Hypergraph split = Hypergraph::validate(4, 0, {{{0, 1}, 1.0}, {{2, 3}, 1.0}});
    CHECK(error_code([&] { eigen_first_positive(split, {2, 2}); }) == "spectral/Disconnected");
}
