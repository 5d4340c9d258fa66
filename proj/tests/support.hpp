#pragma once

#include "hyperlap/dynamics.hpp"
#include "hyperlap/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace testsupport {

using hyperlap::Edge;
using hyperlap::Hypergraph;
using hyperlap::Path;
using hyperlap::TimeGrid;

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0)
{
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = scale * normal(rng);
    return v;
}

inline Eigen::VectorXd random_mean_free(std::mt19937_64& rng, int n)
{
    Eigen::VectorXd v = random_vector(rng, n);
    v.array() -= v.mean();
    return v;
}

// Random edge of the given size over 0..N-1.
inline std::vector<int> random_edge(std::mt19937_64& rng, int N, int size)
{
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    perm.resize(size);
    return perm;
}

/**
 * Random hypergraph with N = n + m vertices. When connected is set, a chain of
 * overlapping edges through a random vertex order is laid down first.
 */
inline Hypergraph random_hypergraph(std::mt19937_64& rng, int n, int m, int extra_edges, int max_size,
                                    bool connected = true, int min_size = 2)
{
    const int N = n + m;
    std::uniform_real_distribution<double> weight(0.2, 2.0);
    std::vector<Edge> edges;
    auto size_of = [&] {
        std::uniform_int_distribution<int> sz(std::min(min_size, N), std::min(max_size, N));
        return sz(rng);
    };
    if (connected && N >= 2) {
        std::vector<int> order(N);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        int start = 0;
        while (start < N - 1) {
            const int s = std::min(size_of(), N - start);
            const int sz = std::max(s, 2);
            Edge e;
            for (int t = 0; t < sz; ++t)
                e.v.push_back(order[std::min(start + t, N - 1)]);
            std::sort(e.v.begin(), e.v.end());
            e.v.erase(std::unique(e.v.begin(), e.v.end()), e.v.end());
            if (e.v.size() < 2)
                e.v = {order[N - 2], order[N - 1]};
            e.w = weight(rng);
            edges.push_back(e);
            start += sz - 1;
        }
    }
    for (int k = 0; k < extra_edges && N >= 2; ++k)
        edges.push_back({random_edge(rng, N, size_of()), weight(rng)});
    return Hypergraph::validate(n, m, edges);
}

// Uniform hypergraph: every edge has exactly `size` vertices.
inline Hypergraph random_uniform_hypergraph(std::mt19937_64& rng, int N, int num_edges, int size)
{
    for (;;) {
        std::uniform_real_distribution<double> weight(0.5, 2.0);
        std::vector<Edge> edges;
        for (int k = 0; k < num_edges; ++k)
            edges.push_back({random_edge(rng, N, size), weight(rng)});
        Hypergraph g = Hypergraph::validate(N, 0, edges);
        if (hyperlap::is_connected(g))
            return g;
    }
}

// Smooth random path: c0 + c1 sin(w t) + c2 t^2 on coordinates >= first.
inline Path smooth_path(std::mt19937_64& rng, const TimeGrid& grid, int N, int first, double amp)
{
    std::normal_distribution<double> normal;
    Path P(grid.K + 1, Eigen::VectorXd::Zero(N));
    for (int i = first; i < N; ++i) {
        const double c0 = normal(rng), c1 = normal(rng), c2 = normal(rng);
        const double w = 1.0 + 2.0 * std::abs(normal(rng));
        for (int k = 0; k <= grid.K; ++k) {
            const double t = grid.t(k);
            P[k][i] = amp * (c0 + c1 * std::sin(w * t) + c2 * t * t);
        }
    }
    return P;
}

inline double sup_distance(const Path& a, const Path& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        d = std::max(d, (a[k] - b[k]).norm());
    return d;
}

} // namespace testsupport
