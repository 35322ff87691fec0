#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invgae/eval.hpp"
#include "invgae/training.hpp"

#include "json.hpp"

namespace invgae {

// Flat key-value run configuration. File format: one `key = value` per
// line, '#' comments. Unknown keys are rejected; command-line flags
// override file values; the merged effective config is echoed into output
// artifacts.
struct RunConfig {
    std::string task = "node";         // node | link | graph
    std::string dataset = "citation";  // citation | tu
    std::string dataset_name;

    std::string edge_file, feature_file, label_file;
    std::string split_train_file, split_val_file, split_test_file;
    std::string tu_dir, tu_name;

    std::string encoder = "gcn";  // gcn | gin
    int layers = 2;
    int hidden = 512;
    int gin_hidden = 0;
    int decoder_hidden = 0;

    double lambda_nei = 0.1;
    double lambda_deg = 1.0;
    double learning_rate = 1e-3;
    int max_epochs = 0;  // 0: 500 for node/link, 300 for graph
    int patience = 20;
    double tolerance = 1e-4;
    std::uint64_t seed = 1;
    std::uint64_t split_seed = 42;
    int eval_seeds = 5;

    int head_hidden = 256;
    int head_layers = 4;
    double head_learning_rate = 1e-3;
    int head_epochs = 300;
    int head_patience = 30;

    double link_train_ratio = 0.85, link_val_ratio = 0.05, link_test_ratio = 0.10;
    double node_train_ratio = 0.60, node_val_ratio = 0.20, node_test_ratio = 0.20;
    double graph_train_ratio = 0.50, graph_val_ratio = 0.20, graph_test_ratio = 0.30;
    int degree_cap = 64;

    std::string checkpoint;
    std::string log_file;
    std::string metrics_file;
    std::string embeddings_file;
    bool parallel_seeds = false;
    std::string kernels = "auto";  // auto | scalar | avx2

    void set(const std::string& key, const std::string& value);
    static RunConfig from_file(const std::string& path);
    static RunConfig from_json(const nlohmann::json& j);

    // full effective configuration, every key present
    nlohmann::json to_json() const;
    std::vector<std::string> echo_lines() const;  // "key = value"

    int resolved_max_epochs() const { return max_epochs > 0 ? max_epochs : (task == "graph" ? 300 : 500); }
    TrainConfig train_config(int input_dim) const;
    MlpHeadConfig head_config() const;

    // full validation before any heavy computation
    void validate() const;
};

}  // namespace invgae
