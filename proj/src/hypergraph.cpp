#include "hyperlap/hypergraph.hpp"
#include "hyperlap/error.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace hyperlap {

namespace {

Error graph_error(const char* code, const std::string& msg)
{
    return Error("hypergraph", code, msg);
}

// Breadth-first search over the vertex-edge incidence structure. Returns the
// chain distance from src to every vertex (-1 if unreachable).
std::vector<int> bfs(const Hypergraph& g, int src)
{
    std::vector<int> dist(g.N(), -1);
    std::vector<char> edge_seen(g.edges().size(), 0);
    std::queue<int> queue;
    dist[src] = 0;
    queue.push(src);
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop();
        for (int e : g.incidence()[i]) {
            if (edge_seen[e])
                continue;
            edge_seen[e] = 1;
            for (int j : g.edges()[e].v) {
                if (dist[j] < 0) {
                    dist[j] = dist[i] + 1;
                    queue.push(j);
                }
            }
        }
    }
    return dist;
}

} // namespace

Hypergraph Hypergraph::validate(int n, int m, std::vector<Edge> edges)
{
    if (n < 0 || m < 0)
        throw graph_error("EmptyVertexSet", "vertex counts must be nonnegative");
    const int N = n + m;
    if (N < 1)
        throw graph_error("EmptyVertexSet", "hypergraph needs at least one vertex");

    for (std::size_t id = 0; id < edges.size(); ++id) {
        Edge& e = edges[id];
        if (e.v.size() < 2)
            throw graph_error("EdgeTooSmall", "edge " + std::to_string(id + 1) + " has fewer than 2 vertices");
        if (!(e.w > 0.0))
            throw graph_error("NonpositiveWeight", "edge " + std::to_string(id + 1) + " has nonpositive weight");
        for (int v : e.v) {
            if (v < 0 || v >= N)
                throw graph_error("VertexOutOfRange", "edge " + std::to_string(id + 1) + " references vertex " +
                                                          std::to_string(v + 1) + " outside 1.." + std::to_string(N));
        }
        std::sort(e.v.begin(), e.v.end());
        if (std::adjacent_find(e.v.begin(), e.v.end()) != e.v.end())
            throw graph_error("DuplicateVertex", "edge " + std::to_string(id + 1) + " repeats a vertex");
    }

    Hypergraph g;
    g.n_ = n;
    g.m_ = m;
    g.edges_ = std::move(edges);
    g.incidence_.assign(N, {});
    for (std::size_t id = 0; id < g.edges_.size(); ++id)
        for (int v : g.edges_[id].v)
            g.incidence_[v].push_back(static_cast<int>(id));
    return g;
}

double Hypergraph::total_weight() const
{
    double s = 0.0;
    for (const Edge& e : edges_)
        s += e.w;
    return s;
}

bool is_connected(const Hypergraph& g)
{
    if (g.N() == 0)
        return false;
    std::vector<int> dist = bfs(g, 0);
    return std::all_of(dist.begin(), dist.end(), [](int d) { return d >= 0; });
}

int diameter(const Hypergraph& g)
{
    int diam = 0;
    for (int i = 0; i < g.N(); ++i) {
        std::vector<int> dist = bfs(g, i);
        for (int d : dist) {
            if (d < 0)
                throw graph_error("Disconnected", "diameter is undefined for a disconnected hypergraph");
            diam = std::max(diam, d);
        }
    }
    return diam;
}

double nu_E(const Hypergraph& g)
{
    double nu = 0.0;
    for (const Edge& e : g.edges()) {
        double s = static_cast<double>(e.v.size());
        nu = std::max(nu, s * (s - 1.0) / 2.0);
    }
    return nu;
}

Eigen::MatrixXd clique_weights(const Hypergraph& g)
{
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(g.N(), g.N());
    for (const Edge& e : g.edges()) {
        for (std::size_t a = 0; a < e.v.size(); ++a)
            for (std::size_t b = a + 1; b < e.v.size(); ++b) {
                W(e.v[a], e.v[b]) += e.w;
                W(e.v[b], e.v[a]) += e.w;
            }
    }
    return W;
}

} // namespace hyperlap
