#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hyperlap/error.hpp"
#include "hyperlap/hypergraph.hpp"
#include "hyperlap/io.hpp"
#include "support.hpp"

#include <functional>
#include <string>

using namespace hyperlap;

namespace {

std::string error_code(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.tag();
    }
    return "none";
}

// All-pairs minimal chain lengths by Floyd-Warshall on the "share an edge" relation.
int brute_force_diameter(const Hypergraph& g)
{
    const int N = g.N();
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(N, std::vector<int>(N, inf));
    for (int i = 0; i < N; ++i)
        d[i][i] = 0;
    for (const Edge& e : g.edges())
        for (int a : e.v)
            for (int b : e.v)
                if (a != b)
                    d[a][b] = 1;
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    int best = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            best = std::max(best, d[i][j]);
    return best >= inf ? -1 : best;
}

} // namespace

TEST_CASE("validate accepts a well-formed hypergraph")
{
    const Hypergraph g = Hypergraph::validate(2, 1, {{{0, 1, 2}, 1.0}});
    CHECK(g.N() == 3);
    CHECK(g.n() == 2);
    CHECK(g.m() == 1);
    CHECK(g.total_weight() == 1.0);
}

TEST_CASE("validate rejects malformed input with specific codes")
{
    CHECK(error_code([] { Hypergraph::validate(1, 0, {{{0}, 1.0}}); }) == "hypergraph/EdgeTooSmall");
    CHECK(error_code([] { Hypergraph::validate(2, 0, {{{0, 1}, -1.0}}); }) == "hypergraph/NonpositiveWeight");
    CHECK(error_code([] { Hypergraph::validate(2, 0, {{{0, 1}, 0.0}}); }) == "hypergraph/NonpositiveWeight");
    CHECK(error_code([] { Hypergraph::validate(2, 0, {{{0, 5}, 1.0}}); }) == "hypergraph/VertexOutOfRange");
    CHECK(error_code([] { Hypergraph::validate(0, 0, {}); }) == "hypergraph/EmptyVertexSet");
    CHECK(error_code([] { Hypergraph::validate(3, 0, {{{0, 1, 1}, 1.0}}); }) == "hypergraph/DuplicateVertex");
}

TEST_CASE("edges are stored sorted and incidence lists are consistent")
{
    const Hypergraph g = Hypergraph::validate(4, 0, {{{3, 0, 2}, 1.0}, {{1, 0}, 2.0}});
    CHECK(g.edges()[0].v == std::vector<int>{0, 2, 3});
    CHECK(g.edges()[1].v == std::vector<int>{0, 1});
    CHECK(g.incidence()[0] == std::vector<int>{0, 1});
    CHECK(g.incidence()[3] == std::vector<int>{0});
}

TEST_CASE("is_connected examples")
{
    CHECK(is_connected(Hypergraph::validate(3, 0, {{{0, 1, 2}, 1.0}})));
    CHECK_FALSE(is_connected(Hypergraph::validate(4, 0, {{{0, 1}, 1.0}, {{2, 3}, 1.0}})));
    CHECK(is_connected(Hypergraph::validate(3, 0, {{{0, 1}, 1.0}, {{1, 2}, 1.0}})));
}

TEST_CASE("diameter examples")
{
    CHECK(diameter(Hypergraph::validate(3, 0, {{{0, 1, 2}, 1.0}})) == 1);
    CHECK(diameter(Hypergraph::validate(3, 0, {{{0, 1}, 1.0}, {{1, 2}, 1.0}})) == 2);
    CHECK(diameter(Hypergraph::validate(5, 0, {{{0, 1}, 1.0}, {{1, 2}, 1.0}, {{2, 3}, 1.0}, {{3, 4}, 1.0}})) == 4);
    CHECK(error_code([] { diameter(Hypergraph::validate(4, 0, {{{0, 1}, 1.0}, {{2, 3}, 1.0}})); }) ==
          "hypergraph/Disconnected");
}

TEST_CASE("diameter agrees with a brute-force oracle for N <= 6")
{
    std::mt19937_64 rng(11);
    int connected = 0;
    for (int s = 0; s < 500; ++s) {
        const int N = 2 + s % 5;
        const Hypergraph g = testsupport::random_hypergraph(rng, N, 0, 1 + s % 4, 4, s % 3 == 0);
        const int oracle = brute_force_diameter(g);
        CHECK(is_connected(g) == (oracle >= 0));
        if (oracle >= 0) {
            CHECK(diameter(g) == oracle);
            ++connected;
        }
    }
    CHECK(connected > 100);
}

TEST_CASE("nu_E examples")
{
    CHECK(nu_E(Hypergraph::validate(2, 0, {{{0, 1}, 1.0}})) == 1.0);
    CHECK(nu_E(Hypergraph::validate(3, 0, {{{0, 1, 2}, 1.0}})) == 3.0);
    CHECK(nu_E(Hypergraph::validate(4, 0, {{{0, 1}, 1.0}, {{0, 1, 2, 3}, 1.0}})) == 6.0);
}

TEST_CASE("clique_weights examples")
{
    const Eigen::MatrixXd w1 = clique_weights(Hypergraph::validate(3, 0, {{{0, 1, 2}, 1.0}}));
    CHECK(w1(0, 1) == 1.0);
    CHECK(w1(0, 2) == 1.0);
    CHECK(w1(1, 2) == 1.0);
    CHECK(w1.diagonal().isZero());

    const Eigen::MatrixXd w2 = clique_weights(Hypergraph::validate(3, 0, {{{0, 1}, 2.0}, {{0, 1, 2}, 1.0}}));
    CHECK(w2(0, 1) == 3.0);
    CHECK(w2(0, 2) == 1.0);
    CHECK(w2(1, 2) == 1.0);

    const Eigen::MatrixXd w3 = clique_weights(Hypergraph::validate(3, 0, {{{0, 1}, 1.0}}));
    CHECK(w3(0, 2) == 0.0);
    CHECK(w3(1, 2) == 0.0);
}

TEST_CASE("clique_weights are symmetric with zero diagonal")
{
    std::mt19937_64 rng(12);
    for (int s = 0; s < 100; ++s) {
        const Hypergraph g = testsupport::random_hypergraph(rng, 8, 2, 5, 5);
        const Eigen::MatrixXd w = clique_weights(g);
        CHECK((w - w.transpose()).norm() == 0.0);
        CHECK(w.diagonal().isZero());
        CHECK((w.array() >= 0.0).all());
    }
}

TEST_CASE("serialization round-trips through the 1-based file format")
{
    std::mt19937_64 rng(13);
    for (int s = 0; s < 50; ++s) {
        const Hypergraph g = testsupport::random_hypergraph(rng, 5, 3, 4, 4, s % 2 == 0);
        const io::json j = io::hypergraph_to_json(g);
        const Hypergraph back = io::hypergraph_from_json(io::parse_json(io::dump_json(j), "roundtrip"));
        REQUIRE(back.N() == g.N());
        CHECK(back.n() == g.n());
        REQUIRE(back.edges().size() == g.edges().size());
        for (std::size_t k = 0; k < g.edges().size(); ++k) {
            CHECK(back.edges()[k].v == g.edges()[k].v);
            CHECK(back.edges()[k].w == g.edges()[k].w);
        }
        CHECK(io::dump_json(io::hypergraph_to_json(back)) == io::dump_json(j));
    }
}
