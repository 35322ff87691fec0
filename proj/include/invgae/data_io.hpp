#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invgae/eval.hpp"
#include "invgae/graph.hpp"
#include "invgae/params.hpp"
#include "invgae/rng.hpp"

#include "json.hpp"

namespace invgae {

// Single-graph dataset in the edge-list flat format:
//   edge file     two whitespace-separated 0-based node indices per line
//   feature file  one whitespace-separated float row per node
//   label file    one integer per node (defines the node count)
//   split files   one node index per line (train/val/test), optional
struct CitationDataset {
    Graph graph;
    Tensor features;
    std::vector<int> labels;
    std::optional<NodeSplit> shipped_split;
    int num_classes = 0;
};

struct SplitFiles {
    std::string train, val, test;
};

// Duplicate undirected pairs ("0 1" and "1 0") collapse to one edge; every
// other inconsistency is rejected with the offending line.
CitationDataset load_edgelist_dataset(const std::string& edge_file,
                                      const std::string& feature_file,
                                      const std::string& label_file,
                                      const std::optional<SplitFiles>& split_files = std::nullopt);

// Multi-graph dataset in the TU flat format: NAME_A.txt (1-based
// comma-separated edges), NAME_graph_indicator.txt, NAME_graph_labels.txt,
// optional NAME_node_labels.txt.
struct TuDataset {
    std::vector<Graph> graphs;
    std::vector<Tensor> features;  // one-hot node labels, or capped degree one-hot
    std::vector<int> labels;       // graph labels remapped to [0, classes)
    bool featureless = false;      // no node-label file; degree features substituted
    int num_classes = 0;
    int feature_dim = 0;
};

TuDataset load_tu_dataset(const std::string& directory, const std::string& name,
                          int degree_cap = 64);

// Checkpoint: one-line JSON manifest (format version, config echo, rng
// state, named tensor shapes) followed by the raw little-endian f64
// payload. Round trips are bitwise.
struct Checkpoint {
    int format_version = 0;
    nlohmann::json config;
    RngState rng;
    ParameterStore params;
};

inline constexpr int kCheckpointFormatVersion = 1;

void save_checkpoint(const ParameterStore& params, const nlohmann::json& config,
                     const RngState& rng, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// One whitespace-separated row per node, after a header line naming the
// dataset, layer and dimension.
void export_embeddings(const Tensor& embeddings, const std::string& dataset_name, int layer,
                       const std::string& path);

}  // namespace invgae
