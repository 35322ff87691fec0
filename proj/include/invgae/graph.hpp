#pragma once

#include <span>
#include <utility>
#include <vector>

#include "invgae/common.hpp"
#include "invgae/rng.hpp"
#include "invgae/sparse.hpp"

namespace invgae {

// Bijection on {0..n-1}; mapping[i] is the new index of node i.
struct Permutation {
    std::vector<int> mapping;

    explicit Permutation(std::vector<int> m);
    static Permutation identity(int n);
    int size() const { return static_cast<int>(mapping.size()); }
};

// Simple undirected graph: no self-loops, no duplicate edges. Immutable
// after construction; safe to share across threads.
class Graph {
public:
    Graph() = default;

    // build_graph: validates indices, self-loops and duplicates.
    static Graph build(int node_count, std::span<const std::pair<int, int>> edge_list);
    static Graph build(int node_count, std::initializer_list<std::pair<int, int>> edge_list) {
        return build(node_count, std::span<const std::pair<int, int>>(edge_list.begin(), edge_list.size()));
    }

    int node_count() const { return node_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    // canonical edges: i < j, sorted
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int i) const { return adjacency_[i]; }
    const std::vector<int>& degrees() const { return degrees_; }
    int degree(int i) const { return degrees_[i]; }
    bool has_edge(int i, int j) const;

private:
    int node_count_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<int> degrees_;
};

Graph permute_graph(const Graph& g, const Permutation& p);

// Node-induced subgraph on all nodes within distance <= k of any seed.
// Second result maps new index -> original index (ascending originals).
std::pair<Graph, std::vector<int>> k_hop_subgraph(const Graph& g, const std::vector<int>& seeds,
                                                  int k);

struct WlColoring {
    std::vector<int> colors;  // canonical: contiguous ids in first-occurrence order
    int rounds = 0;

    int num_classes() const;
};

// 1-WL color refinement. Each round recolors node i by (color[i], sorted
// multiset of neighbor colors) and canonicalizes; rounds=0 just
// canonicalizes the initial coloring.
WlColoring wl_refine(const Graph& g, std::span<const int> initial_colors, int rounds);

// Exhaustive isomorphism check, guarded at 8 nodes (8! permutations).
// Differing node counts compare as non-isomorphic.
bool is_isomorphic_bruteforce(const Graph& g1, const Graph& g2);

// All automorphisms by exhaustive search (same 8-node guard).
std::vector<Permutation> automorphisms_bruteforce(const Graph& g);

// Erdos-Renyi G(n,p) sample from the given rng.
Graph random_gnp_graph(int n, double edge_prob, RngState& rng);

// Random permutation of {0..n-1}.
Permutation random_permutation(int n, RngState& rng);

// Graph-derived aggregation operators used by the encoder and the
// neighborhood losses.
struct GraphOperators {
    CsrMatrix gcn_norm;           // (D+I)^-1/2 (A+I) (D+I)^-1/2
    CsrMatrix neighbor_sum;       // A + I
    CsrMatrix neighborhood_mean;  // (D+I)^-1 (A+I)

    static GraphOperators build(const Graph& g);
};

}  // namespace invgae
