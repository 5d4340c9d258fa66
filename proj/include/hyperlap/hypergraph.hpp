#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hyperlap {

struct Edge
{
    std::vector<int> v; // 0-based vertex indices, sorted ascending
    double w = 1.0;
};

/**
 * Weighted hypergraph G = (V, E, w). Vertices 0..n-1 are free, n..n+m-1 are
 * controlled. Instances can only be obtained through validate() and are
 * immutable afterwards.
 */
class Hypergraph
{
public:
    Hypergraph() = default;

    // Indices are 0-based. Throws hyperlap::Error on invalid input.
    static Hypergraph validate(int n, int m, std::vector<Edge> edges);

    int n() const { return n_; }
    int m() const { return m_; }
    int N() const { return n_ + m_; }
    const std::vector<Edge>& edges() const { return edges_; }
    double total_weight() const;

    // incidence()[i] lists the edge ids containing vertex i
    const std::vector<std::vector<int>>& incidence() const { return incidence_; }

private:
    int n_ = 0;
    int m_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> incidence_;
};

bool is_connected(const Hypergraph& g);

// Largest minimal edge-chain length between two vertices. Throws Disconnected.
int diameter(const Hypergraph& g);

// max over edges of #e(#e-1)/2
double nu_E(const Hypergraph& g);

// w_ij = sum of w(e) over edges containing both i and j, zero diagonal
Eigen::MatrixXd clique_weights(const Hypergraph& g);

} // namespace hyperlap
