#include "invgae/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>

namespace invgae {

namespace {

std::string pair_str(int i, int j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

Permutation::Permutation(std::vector<int> m) : mapping(std::move(m)) {
    std::vector<int> sorted = mapping;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < static_cast<int>(sorted.size()); ++i)
        if (sorted[i] != i)
            throw ShapeError("Permutation: mapping is not a bijection on {0.." +
                             std::to_string(sorted.size() - 1) + "}");
}

Permutation Permutation::identity(int n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
}

Graph Graph::build(int node_count, std::span<const std::pair<int, int>> edge_list) {
    if (node_count < 0) throw ShapeError("build_graph: negative node count");
    Graph g;
    g.node_count_ = node_count;
    g.adjacency_.resize(node_count);
    g.degrees_.assign(node_count, 0);
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : edge_list) {
        if (a < 0 || a >= node_count || b < 0 || b >= node_count)
            throw ShapeError("build_graph: edge endpoint out of range " + pair_str(a, b) +
                             " for node count " + std::to_string(node_count));
        if (a == b) throw ShapeError("build_graph: self-loop " + pair_str(a, b));
        const std::pair<int, int> e{std::min(a, b), std::max(a, b)};
        if (!seen.insert(e).second)
            throw ShapeError("build_graph: duplicate edge " + pair_str(a, b));
    }
    g.edges_.assign(seen.begin(), seen.end());
    for (const auto& [i, j] : g.edges_) {
        g.adjacency_[i].push_back(j);
        g.adjacency_[j].push_back(i);
    }
    for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
    for (int i = 0; i < node_count; ++i) g.degrees_[i] = static_cast<int>(g.adjacency_[i].size());
    return g;
}

bool Graph::has_edge(int i, int j) const {
    if (i < 0 || i >= node_count_ || j < 0 || j >= node_count_) return false;
    const auto& nbrs = adjacency_[i];
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

Graph permute_graph(const Graph& g, const Permutation& p) {
    if (p.size() != g.node_count())
        throw ShapeError("permute_graph: permutation size " + std::to_string(p.size()) +
                         " != node count " + std::to_string(g.node_count()));
    std::vector<std::pair<int, int>> edges;
    edges.reserve(g.edge_count());
    for (const auto& [i, j] : g.edges()) edges.emplace_back(p.mapping[i], p.mapping[j]);
    return Graph::build(g.node_count(), edges);
}

std::pair<Graph, std::vector<int>> k_hop_subgraph(const Graph& g, const std::vector<int>& seeds,
                                                  int k) {
    if (seeds.empty()) throw ShapeError("k_hop_subgraph: empty seed set");
    if (k < 1) throw ShapeError("k_hop_subgraph: k must be >= 1");
    std::vector<int> dist(g.node_count(), -1);
    std::queue<int> frontier;
    for (int s : seeds) {
        if (s < 0 || s >= g.node_count())
            throw ShapeError("k_hop_subgraph: seed " + std::to_string(s) + " out of range");
        if (dist[s] == -1) {
            dist[s] = 0;
            frontier.push(s);
        }
    }
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        if (dist[u] == k) continue;
        for (int v : g.neighbors(u))
            if (dist[v] == -1) {
                dist[v] = dist[u] + 1;
                frontier.push(v);
            }
    }
    std::vector<int> new_to_old;
    for (int v = 0; v < g.node_count(); ++v)
        if (dist[v] != -1) new_to_old.push_back(v);
    std::vector<int> old_to_new(g.node_count(), -1);
    for (int idx = 0; idx < static_cast<int>(new_to_old.size()); ++idx)
        old_to_new[new_to_old[idx]] = idx;
    std::vector<std::pair<int, int>> edges;
    for (const auto& [i, j] : g.edges())
        if (old_to_new[i] != -1 && old_to_new[j] != -1)
            edges.emplace_back(old_to_new[i], old_to_new[j]);
    return {Graph::build(static_cast<int>(new_to_old.size()), edges), std::move(new_to_old)};
}

int WlColoring::num_classes() const {
    return colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
}

namespace {

std::vector<int> canonicalize_colors(const std::vector<int>& raw) {
    std::map<int, int> relabel;
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto [it, inserted] = relabel.try_emplace(raw[i], static_cast<int>(relabel.size()));
        out[i] = it->second;
    }
    return out;
}

}  // namespace

WlColoring wl_refine(const Graph& g, std::span<const int> initial_colors, int rounds) {
    if (static_cast<int>(initial_colors.size()) != g.node_count())
        throw ShapeError("wl_refine: got " + std::to_string(initial_colors.size()) +
                         " colors for " + std::to_string(g.node_count()) + " nodes");
    if (rounds < 0) throw ShapeError("wl_refine: negative round count");
    std::vector<int> colors =
        canonicalize_colors(std::vector<int>(initial_colors.begin(), initial_colors.end()));
    for (int r = 0; r < rounds; ++r) {
        // signature of node i: (own color, sorted neighbor colors)
        std::map<std::pair<int, std::vector<int>>, int> sig_ids;
        std::vector<int> next(g.node_count());
        for (int i = 0; i < g.node_count(); ++i) {
            std::vector<int> nbr_colors;
            nbr_colors.reserve(g.neighbors(i).size());
            for (int j : g.neighbors(i)) nbr_colors.push_back(colors[j]);
            std::sort(nbr_colors.begin(), nbr_colors.end());
            auto [it, inserted] = sig_ids.try_emplace({colors[i], std::move(nbr_colors)},
                                                      static_cast<int>(sig_ids.size()));
            next[i] = it->second;
        }
        colors = canonicalize_colors(next);
    }
    return {std::move(colors), rounds};
}

namespace {

constexpr int kBruteforceNodeCap = 8;

template <typename Visit>
void for_each_permutation(int n, Visit&& visit) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        if (visit(perm)) return;
    } while (std::next_permutation(perm.begin(), perm.end()));
}

bool maps_edges_exactly(const Graph& g1, const Graph& g2, const std::vector<int>& perm) {
    // perm maps g1 indices to g2 indices
    for (const auto& [i, j] : g1.edges())
        if (!g2.has_edge(perm[i], perm[j])) return false;
    return true;
}

}  // namespace

bool is_isomorphic_bruteforce(const Graph& g1, const Graph& g2) {
    if (g1.node_count() != g2.node_count()) return false;
    if (g1.node_count() > kBruteforceNodeCap)
        throw ShapeError("is_isomorphic_bruteforce: node count " +
                         std::to_string(g1.node_count()) + " exceeds guard of " +
                         std::to_string(kBruteforceNodeCap));
    if (g1.edge_count() != g2.edge_count()) return false;
    bool found = false;
    for_each_permutation(g1.node_count(), [&](const std::vector<int>& perm) {
        if (maps_edges_exactly(g1, g2, perm)) {
            found = true;
            return true;
        }
        return false;
    });
    return found;
}

std::vector<Permutation> automorphisms_bruteforce(const Graph& g) {
    if (g.node_count() > kBruteforceNodeCap)
        throw ShapeError("automorphisms_bruteforce: node count exceeds guard of " +
                         std::to_string(kBruteforceNodeCap));
    std::vector<Permutation> autos;
    for_each_permutation(g.node_count(), [&](const std::vector<int>& perm) {
        if (maps_edges_exactly(g, g, perm)) autos.emplace_back(perm);
        return false;
    });
    return autos;
}

Graph random_gnp_graph(int n, double edge_prob, RngState& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.next_uniform() <= edge_prob) edges.emplace_back(i, j);
    return Graph::build(n, edges);
}

Permutation random_permutation(int n, RngState& rng) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    for (std::size_t i = m.size(); i > 1; --i)
        std::swap(m[i - 1], m[rng.next_below(i)]);
    return Permutation(std::move(m));
}

GraphOperators GraphOperators::build(const Graph& g) {
    const int n = g.node_count();
    std::vector<Triplet> norm, sum, mean;
    norm.reserve(2 * g.edge_count() + n);
    sum.reserve(2 * g.edge_count() + n);
    mean.reserve(2 * g.edge_count() + n);
    for (int i = 0; i < n; ++i) {
        const double di = static_cast<double>(g.degree(i)) + 1.0;
        norm.push_back({i, i, 1.0 / di});
        sum.push_back({i, i, 1.0});
        mean.push_back({i, i, 1.0 / di});
        for (int j : g.neighbors(i)) {
            const double dj = static_cast<double>(g.degree(j)) + 1.0;
            norm.push_back({i, j, 1.0 / std::sqrt(di * dj)});
            sum.push_back({i, j, 1.0});
            mean.push_back({i, j, 1.0 / di});
        }
    }
    GraphOperators ops;
    ops.gcn_norm = CsrMatrix(n, n, std::move(norm));
    ops.neighbor_sum = CsrMatrix(n, n, std::move(sum));
    ops.neighborhood_mean = CsrMatrix(n, n, std::move(mean));
    return ops;
}

}  // namespace invgae
