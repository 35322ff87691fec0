#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "invgae/training.hpp"

namespace invgae {

// Downstream classifier over frozen embeddings: affine layers with relu
// between, softmax cross-entropy, Adam, early stopping on validation
// accuracy (best-validation parameters are restored).
struct MlpHeadConfig {
    int hidden = 256;
    int num_layers = 4;
    double learning_rate = 1e-3;
    int max_epochs = 300;
    int patience = 30;
    std::uint64_t seed = 0;
};

struct NodeSplit {
    std::vector<int> train, val, test;
};

// Seeded stratified fallback split used when no split files ship with a
// dataset.
NodeSplit stratified_node_split(const std::vector<int>& labels, double train_ratio,
                                double val_ratio, double test_ratio, std::uint64_t seed);

struct ClassifyReport {
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    int epochs = 0;
};

// Train the MLP head on the train rows of `inputs`; early stop on val
// accuracy; report accuracies per partition. Warns (stderr) if a class is
// absent from the training partition.
ClassifyReport node_classify(const Tensor& inputs, const std::vector<int>& labels,
                             const NodeSplit& split, const MlpHeadConfig& config);

// score(i,j) = <z_i, z_j>
std::vector<double> link_scores(const Tensor& z, std::span<const std::pair<int, int>> pairs);

// Probability that a random positive outranks a random negative, ties 1/2
// (rank-based). Throws DataError when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

// column-sum of H^(L); 1 x C_L
Tensor graph_embedding(const EmbeddingStack& stack);

struct LinkSplit {
    std::vector<std::pair<int, int>> train_pos, val_pos, test_pos;
    std::vector<std::pair<int, int>> train_neg, val_neg, test_neg;
    std::uint64_t seed = 0;
};

// Splits edges train/val/test (floor counts, remainder distributed
// train-first), samples one negative non-edge per positive without
// replacement, and returns the training graph containing only the train
// positives. Throws DataError when the graph has too few non-edges.
std::pair<LinkSplit, Graph> make_link_split(const Graph& g, double train_ratio, double val_ratio,
                                            double test_ratio, std::uint64_t seed);

struct GraphSplit {
    std::vector<int> train, val, test;
};

GraphSplit make_graph_split(int graph_count, double train_ratio, double val_ratio,
                            double test_ratio, std::uint64_t seed);

// ---- task drivers -------------------------------------------------------

struct NodeTaskResult {
    ClassifyReport report;
    TrainReport train_report;
};
NodeTaskResult run_node_task(const Graph& g, const Tensor& x, const std::vector<int>& labels,
                             const NodeSplit& split, const TrainConfig& train_config,
                             MlpHeadConfig head_config);

struct LinkTaskResult {
    double val_auc = 0.0;
    double test_auc = 0.0;
    TrainReport train_report;
};
LinkTaskResult run_link_task(const Graph& g, const Tensor& x, const TrainConfig& train_config,
                             double train_ratio, double val_ratio, double test_ratio,
                             std::uint64_t split_seed);

struct GraphTaskResult {
    ClassifyReport report;
    TrainReport train_report;
};
GraphTaskResult run_graph_task(const std::vector<Graph>& graphs,
                               const std::vector<Tensor>& features,
                               const std::vector<int>& labels, const GraphSplit& split,
                               const TrainConfig& train_config, MlpHeadConfig head_config);

// ---- ablation / sensitivity ---------------------------------------------

struct AblationVariant {
    std::string name;
    double lambda_nei;
    double lambda_deg;
};

// full, w/o nei., w/o deg., w/o deg. & nei.
std::vector<AblationVariant> standard_ablation_variants(double lambda_nei, double lambda_deg);

struct MetricRow {
    std::string variant;
    std::string dataset;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
    int seeds = 0;
    std::vector<double> values;
};

// metric value for one (train config, seed)
using TaskRunner = std::function<double(const TrainConfig&, std::uint64_t seed)>;

// Runs every variant x seed, aggregating mean and sample standard
// deviation; seeds are base_seed..base_seed+num_seeds-1. With
// `parallel_seeds` the per-seed runs of a variant execute on threads;
// aggregation order stays fixed.
std::vector<MetricRow> run_ablation(const std::string& dataset_name,
                                    const std::string& metric_name, const TrainConfig& base,
                                    const std::vector<AblationVariant>& variants, int num_seeds,
                                    const TaskRunner& runner, bool parallel_seeds = false);

void write_metric_rows(std::ostream& out, const std::vector<MetricRow>& rows);

}  // namespace invgae
