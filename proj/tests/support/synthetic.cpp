#include "support/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <utility>
#include <vector>

#include "invgae/common.hpp"
#include "invgae/rng.hpp"

namespace invgae::synth {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

}  // namespace

void write_citation_dataset(const std::string& dir, const CitationSpec& spec) {
    std::filesystem::create_directories(dir);
    RngState rng{spec.seed, 0};

    const int total_blocks = spec.classes * spec.blocks_per_class;
    std::vector<int> block_of(spec.nodes), class_of(spec.nodes);
    for (int i = 0; i < spec.nodes; ++i) {
        block_of[i] = i % total_blocks;
        class_of[i] = block_of[i] % spec.classes;
    }

    std::ofstream edges = open_out(dir + "/edges.txt");
    for (int i = 0; i < spec.nodes; ++i) {
        for (int j = i + 1; j < spec.nodes; ++j) {
            double p = spec.p_out;
            if (block_of[i] == block_of[j]) p = spec.p_in_block;
            else if (class_of[i] == class_of[j]) p = spec.p_in_class;
            if (rng.next_uniform() <= p) edges << i << ' ' << j << '\n';
        }
    }

    const int class_base = 0;
    const int block_base = spec.classes * spec.words_per_class;
    const int background_base = block_base + total_blocks * spec.words_per_block;
    std::ofstream features = open_out(dir + "/features.txt");
    for (int i = 0; i < spec.nodes; ++i) {
        std::vector<int> row(spec.feature_dim(), 0);
        for (int w = 0; w < spec.words_per_class; ++w)
            if (rng.next_uniform() <= spec.class_word_rate)
                row[class_base + class_of[i] * spec.words_per_class + w] = 1;
        for (int w = 0; w < spec.words_per_block; ++w)
            if (rng.next_uniform() <= spec.block_word_rate)
                row[block_base + block_of[i] * spec.words_per_block + w] = 1;
        for (int w = 0; w < spec.background_words; ++w)
            if (rng.next_uniform() <= spec.background_rate) row[background_base + w] = 1;
        for (int c = 0; c < spec.feature_dim(); ++c) features << (c ? " " : "") << row[c];
        features << '\n';
    }

    std::ofstream labels = open_out(dir + "/labels.txt");
    for (int i = 0; i < spec.nodes; ++i) labels << class_of[i] << '\n';
}

namespace {

struct MoleculeGraph {
    int nodes = 0;
    std::vector<std::pair<int, int>> edges;

    int add_node() { return nodes++; }
    void add_edge(int a, int b) { edges.emplace_back(a, b); }
};

MoleculeGraph make_ring_with_tail(RngState& rng) {
    MoleculeGraph g;
    const int ring = 5 + static_cast<int>(rng.next_below(3));  // 5..7
    const int tail = 2 + static_cast<int>(rng.next_below(3));  // 2..4
    for (int i = 0; i < ring; ++i) g.add_node();
    for (int i = 0; i < ring; ++i) g.add_edge(i, (i + 1) % ring);
    int prev = 0;
    for (int t = 0; t < tail; ++t) {
        const int v = g.add_node();
        g.add_edge(prev, v);
        prev = v;
    }
    return g;
}

MoleculeGraph make_bridged_triangles(RngState& rng) {
    MoleculeGraph g;
    for (int i = 0; i < 6; ++i) g.add_node();
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 0);
    g.add_edge(3, 4);
    g.add_edge(4, 5);
    g.add_edge(5, 3);
    const int bridge = 1 + static_cast<int>(rng.next_below(3));  // 1..3 extra atoms
    int prev = 2;
    for (int t = 0; t < bridge; ++t) {
        const int v = g.add_node();
        g.add_edge(prev, v);
        prev = v;
    }
    g.add_edge(prev, 3);
    return g;
}

void add_pendants(MoleculeGraph& g, RngState& rng) {
    const int extra = static_cast<int>(rng.next_below(3));  // 0..2
    for (int t = 0; t < extra; ++t) {
        const int attach = static_cast<int>(rng.next_below(g.nodes));
        const int v = g.add_node();
        g.add_edge(attach, v);
    }
}

}  // namespace

void write_tu_dataset(const std::string& dir, const std::string& name,
                      const MoleculeSpec& spec) {
    std::filesystem::create_directories(dir);
    RngState rng{spec.seed, 0};

    std::vector<MoleculeGraph> graphs;
    std::vector<int> labels;
    for (int gi = 0; gi < spec.graphs; ++gi) {
        const int cls = gi % 2;
        MoleculeGraph g = cls == 0 ? make_ring_with_tail(rng) : make_bridged_triangles(rng);
        add_pendants(g, rng);
        graphs.push_back(std::move(g));
        labels.push_back(cls == 0 ? -1 : 1);
    }

    const std::string base = dir + "/" + name;
    std::ofstream adj = open_out(base + "_A.txt");
    std::ofstream indicator = open_out(base + "_graph_indicator.txt");
    std::ofstream glabels = open_out(base + "_graph_labels.txt");
    std::ofstream nlabels = open_out(base + "_node_labels.txt");

    int offset = 0;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const MoleculeGraph& g = graphs[gi];
        std::vector<int> degree(g.nodes, 0);
        for (const auto& [a, b] : g.edges) {
            ++degree[a];
            ++degree[b];
        }
        for (const auto& [a, b] : g.edges) {
            adj << offset + a + 1 << ", " << offset + b + 1 << '\n';
            adj << offset + b + 1 << ", " << offset + a + 1 << '\n';
        }
        for (int v = 0; v < g.nodes; ++v) {
            indicator << gi + 1 << '\n';
            nlabels << std::min(degree[v], 3) << '\n';
        }
        glabels << labels[gi] << '\n';
        offset += g.nodes;
    }
}

}  // namespace invgae::synth
