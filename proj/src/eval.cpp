#include "invgae/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "invgae/kernels.hpp"

namespace invgae {

namespace {

void validate_ratios(double tr, double va, double te, const char* what) {
    if (tr < 0.0 || va < 0.0 || te < 0.0)
        throw ConfigError(std::string(what) + ": ratios must be >= 0");
    if (std::abs(tr + va + te - 1.0) > 1e-9)
        throw ConfigError(std::string(what) + ": ratios must sum to 1, got " +
                          std::to_string(tr + va + te));
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, RngState& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.next_below(i)]);
}

// floor counts per ratio, remainder distributed train, val, test, cyclically
std::array<std::size_t, 3> split_counts(std::size_t n, double tr, double va, double te) {
    std::array<std::size_t, 3> c{static_cast<std::size_t>(std::floor(tr * n)),
                                 static_cast<std::size_t>(std::floor(va * n)),
                                 static_cast<std::size_t>(std::floor(te * n))};
    std::size_t used = c[0] + c[1] + c[2];
    for (int k = 0; used < n; k = (k + 1) % 3, ++used) ++c[k];
    return c;
}

int num_classes_of(const std::vector<int>& labels) {
    int k = 0;
    for (int l : labels) {
        if (l < 0) throw DataError("labels must be non-negative");
        k = std::max(k, l + 1);
    }
    return k;
}

}  // namespace

NodeSplit stratified_node_split(const std::vector<int>& labels, double train_ratio,
                                double val_ratio, double test_ratio, std::uint64_t seed) {
    validate_ratios(train_ratio, val_ratio, test_ratio, "node split");
    const int k = num_classes_of(labels);
    std::vector<std::vector<int>> by_class(k);
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) by_class[labels[i]].push_back(i);
    RngState rng{seed, 0};
    NodeSplit split;
    for (auto& members : by_class) {
        seeded_shuffle(members, rng);
        const auto c = split_counts(members.size(), train_ratio, val_ratio, test_ratio);
        std::size_t pos = 0;
        for (std::size_t i = 0; i < c[0]; ++i) split.train.push_back(members[pos++]);
        for (std::size_t i = 0; i < c[1]; ++i) split.val.push_back(members[pos++]);
        for (std::size_t i = 0; i < c[2]; ++i) split.test.push_back(members[pos++]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

namespace {

void init_head_params(ParameterStore& store, int input_dim, int num_classes,
                      const MlpHeadConfig& cfg, RngState& rng) {
    if (cfg.num_layers < 1) throw ConfigError("mlp head: num_layers must be >= 1");
    int in = input_dim;
    for (int l = 0; l < cfg.num_layers; ++l) {
        const int out = l == cfg.num_layers - 1 ? num_classes : cfg.hidden;
        const std::string prefix = "head.l" + std::to_string(l) + ".";
        store.add(prefix + "w", glorot_uniform(in, out, rng));
        store.add(prefix + "b", Tensor(1, out));
        in = out;
    }
}

NodeId mlp_forward_on_tape(Tape& tape, NodeId x, int num_layers, TapeBinder& binder) {
    NodeId h = x;
    for (int l = 0; l < num_layers; ++l) {
        const std::string prefix = "head.l" + std::to_string(l) + ".";
        h = tape.add_rowvec(tape.matmul(h, binder.leaf(prefix + "w")), binder.leaf(prefix + "b"));
        if (l + 1 < num_layers) h = tape.relu(h);
    }
    return h;
}

int argmax_row(const Tensor& logits, int row) {
    int best = 0;
    for (int c = 1; c < logits.cols(); ++c)
        if (logits.at(row, c) > logits.at(row, best)) best = c;
    return best;
}

double accuracy_on(const Tensor& logits, const std::vector<int>& labels,
                   const std::vector<int>& rows) {
    if (rows.empty()) return 0.0;
    int correct = 0;
    for (int r : rows)
        if (argmax_row(logits, r) == labels[r]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace

ClassifyReport node_classify(const Tensor& inputs, const std::vector<int>& labels,
                             const NodeSplit& split, const MlpHeadConfig& config) {
    if (static_cast<int>(labels.size()) != inputs.rows())
        throw ShapeError("node_classify: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(inputs.rows()) + " rows");
    if (split.train.empty()) throw DataError("node_classify: empty training partition");
    const int k = num_classes_of(labels);

    std::set<int> train_classes;
    for (int i : split.train) train_classes.insert(labels[i]);
    for (int c = 0; c < k; ++c)
        if (!train_classes.count(c))
            std::cerr << "warning: class " << c << " absent from training partition\n";

    // constants for the masked cross-entropy
    Tensor onehot_train(inputs.rows(), k);
    Tensor trainmask_col(inputs.rows(), 1);
    for (int i : split.train) {
        onehot_train.at(i, labels[i]) = 1.0;
        trainmask_col.at(i, 0) = 1.0;
    }
    const double inv_ntrain = 1.0 / static_cast<double>(split.train.size());

    ParameterStore params;
    RngState rng{config.seed, 0};
    init_head_params(params, inputs.cols(), k, config, rng);
    AdamState adam(AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8});

    ParameterStore best_params = params;
    double best_val = -1.0;
    int since_best = 0;
    ClassifyReport report;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        Tape tape;
        TapeBinder binder(tape, params, true);
        const NodeId logits =
            mlp_forward_on_tape(tape, tape.constant(inputs), config.num_layers, binder);
        const Tensor& lv = tape.value(logits);

        const double val_acc = accuracy_on(lv, labels, split.val);
        if (val_acc > best_val) {
            best_val = val_acc;
            best_params = params;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            report.epochs = epoch;
            break;
        }
        report.epochs = epoch;

        // stable log-softmax: the row maxima enter as constants, which
        // changes neither the value nor the gradient
        Tensor rowmax_mat(lv.rows(), lv.cols());
        Tensor rowmax_col(lv.rows(), 1);
        for (int r = 0; r < lv.rows(); ++r) {
            double m = lv.at(r, 0);
            for (int c = 1; c < lv.cols(); ++c) m = std::max(m, lv.at(r, c));
            rowmax_col.at(r, 0) = m;
            for (int c = 0; c < lv.cols(); ++c) rowmax_mat.at(r, c) = m;
        }
        const NodeId shifted = tape.sub(logits, tape.constant(std::move(rowmax_mat)));
        const NodeId lse = tape.add(tape.log(tape.row_sum(tape.exp(shifted))),
                                    tape.constant(std::move(rowmax_col)));
        const NodeId picked =
            tape.sum(tape.elementwise_mul(logits, tape.constant(onehot_train)));
        const NodeId lse_train =
            tape.sum(tape.elementwise_mul(lse, tape.constant(trainmask_col)));
        const NodeId ce = tape.scale(tape.sub(lse_train, picked), inv_ntrain);

        adam.step(params, tape.backward(ce));
    }

    // accuracies at the best-validation parameters
    Tape tape;
    TapeBinder binder(tape, best_params, false);
    const Tensor logits =
        tape.value(mlp_forward_on_tape(tape, tape.constant(inputs), config.num_layers, binder));
    report.train_accuracy = accuracy_on(logits, labels, split.train);
    report.val_accuracy = accuracy_on(logits, labels, split.val);
    report.test_accuracy = accuracy_on(logits, labels, split.test);
    return report;
}

std::vector<double> link_scores(const Tensor& z, std::span<const std::pair<int, int>> pairs) {
    std::vector<double> scores;
    scores.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        if (i < 0 || i >= z.rows() || j < 0 || j >= z.rows())
            throw ShapeError("link_scores: node index out of range");
        scores.push_back(kernels::active().dot(z.row(i).data(), z.row(j).data(), z.cols()));
    }
    return scores;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ShapeError("auc: scores/labels size mismatch");
    std::size_t npos = 0, nneg = 0;
    for (int l : labels) (l != 0 ? npos : nneg)++;
    if (npos == 0 || nneg == 0) throw DataError("auc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks over tie groups, 1-based
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t)
            if (labels[order[t]] != 0) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double np = static_cast<double>(npos), nn = static_cast<double>(nneg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

Tensor graph_embedding(const EmbeddingStack& stack) {
    if (stack.layers.empty() || stack.top().rows() == 0)
        throw ShapeError("graph_embedding: empty graph");
    const Tensor& h = stack.top();
    Tensor out(1, h.cols());
    kernels::active().col_sum(h.data(), out.data(), h.rows(), h.cols());
    return out;
}

std::pair<LinkSplit, Graph> make_link_split(const Graph& g, double train_ratio, double val_ratio,
                                            double test_ratio, std::uint64_t seed) {
    validate_ratios(train_ratio, val_ratio, test_ratio, "link split");
    RngState rng{seed, 0};

    std::vector<std::pair<int, int>> edges = g.edges();
    seeded_shuffle(edges, rng);
    const auto counts = split_counts(edges.size(), train_ratio, val_ratio, test_ratio);

    LinkSplit split;
    split.seed = seed;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < counts[0]; ++i) split.train_pos.push_back(edges[pos++]);
    for (std::size_t i = 0; i < counts[1]; ++i) split.val_pos.push_back(edges[pos++]);
    for (std::size_t i = 0; i < counts[2]; ++i) split.test_pos.push_back(edges[pos++]);

    const std::size_t n = static_cast<std::size_t>(g.node_count());
    const std::size_t total_pairs = n * (n - 1) / 2;
    const std::size_t needed = edges.size();
    const std::size_t available = total_pairs - edges.size();
    if (needed > available)
        throw DataError("make_link_split: need " + std::to_string(needed) +
                        " negative samples but the graph has only " + std::to_string(available) +
                        " non-edges");

    std::vector<std::pair<int, int>> negatives;
    negatives.reserve(needed);
    if (total_pairs <= 200000) {
        for (int i = 0; i < g.node_count(); ++i)
            for (int j = i + 1; j < g.node_count(); ++j)
                if (!g.has_edge(i, j)) negatives.emplace_back(i, j);
        seeded_shuffle(negatives, rng);
        negatives.resize(needed);
    } else {
        std::set<std::pair<int, int>> chosen;
        while (chosen.size() < needed) {
            const int i = static_cast<int>(rng.next_below(n));
            const int j = static_cast<int>(rng.next_below(n));
            if (i == j) continue;
            const std::pair<int, int> e{std::min(i, j), std::max(i, j)};
            if (g.has_edge(e.first, e.second)) continue;
            if (chosen.insert(e).second) negatives.push_back(e);
        }
    }
    pos = 0;
    for (std::size_t i = 0; i < counts[0]; ++i) split.train_neg.push_back(negatives[pos++]);
    for (std::size_t i = 0; i < counts[1]; ++i) split.val_neg.push_back(negatives[pos++]);
    for (std::size_t i = 0; i < counts[2]; ++i) split.test_neg.push_back(negatives[pos++]);

    Graph train_graph = Graph::build(g.node_count(), split.train_pos);
    return {std::move(split), std::move(train_graph)};
}

GraphSplit make_graph_split(int graph_count, double train_ratio, double val_ratio,
                            double test_ratio, std::uint64_t seed) {
    validate_ratios(train_ratio, val_ratio, test_ratio, "graph split");
    std::vector<int> order(graph_count);
    std::iota(order.begin(), order.end(), 0);
    RngState rng{seed, 0};
    seeded_shuffle(order, rng);
    const auto counts = split_counts(order.size(), train_ratio, val_ratio, test_ratio);
    GraphSplit split;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < counts[0]; ++i) split.train.push_back(order[pos++]);
    for (std::size_t i = 0; i < counts[1]; ++i) split.val.push_back(order[pos++]);
    for (std::size_t i = 0; i < counts[2]; ++i) split.test.push_back(order[pos++]);
    return split;
}

NodeTaskResult run_node_task(const Graph& g, const Tensor& x, const std::vector<int>& labels,
                             const NodeSplit& split, const TrainConfig& train_config,
                             MlpHeadConfig head_config) {
    TrainResult trained = train_unsupervised(g, x, train_config);
    NodeTaskResult result;
    result.train_report = std::move(trained.report);
    result.report = node_classify(trained.stacks[0].top(), labels, split, head_config);
    return result;
}

LinkTaskResult run_link_task(const Graph& g, const Tensor& x, const TrainConfig& train_config,
                             double train_ratio, double val_ratio, double test_ratio,
                             std::uint64_t split_seed) {
    auto [split, train_graph] = make_link_split(g, train_ratio, val_ratio, test_ratio, split_seed);
    TrainResult trained = train_unsupervised(train_graph, x, train_config);
    const Tensor& z = trained.stacks[0].top();

    auto auc_of = [&](const std::vector<std::pair<int, int>>& pos,
                      const std::vector<std::pair<int, int>>& neg) {
        std::vector<std::pair<int, int>> pairs = pos;
        pairs.insert(pairs.end(), neg.begin(), neg.end());
        std::vector<int> labels(pos.size(), 1);
        labels.resize(pairs.size(), 0);
        const std::vector<double> scores = link_scores(z, pairs);
        return auc(scores, labels);
    };

    LinkTaskResult result;
    result.train_report = std::move(trained.report);
    result.val_auc = split.val_pos.empty() ? 0.0 : auc_of(split.val_pos, split.val_neg);
    result.test_auc = split.test_pos.empty() ? 0.0 : auc_of(split.test_pos, split.test_neg);
    return result;
}

GraphTaskResult run_graph_task(const std::vector<Graph>& graphs,
                               const std::vector<Tensor>& features,
                               const std::vector<int>& labels, const GraphSplit& split,
                               const TrainConfig& train_config, MlpHeadConfig head_config) {
    TrainResult trained = train_unsupervised(std::span<const Graph>(graphs),
                                             std::span<const Tensor>(features), train_config);
    Tensor table(static_cast<int>(graphs.size()), train_config.encoder.dims.back());
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const Tensor emb = graph_embedding(trained.stacks[i]);
        for (int c = 0; c < emb.cols(); ++c) table.at(static_cast<int>(i), c) = emb.at(0, c);
    }
    NodeSplit as_rows{split.train, split.val, split.test};
    GraphTaskResult result;
    result.train_report = std::move(trained.report);
    result.report = node_classify(table, labels, as_rows, head_config);
    return result;
}

std::vector<AblationVariant> standard_ablation_variants(double lambda_nei, double lambda_deg) {
    return {
        {"full", lambda_nei, lambda_deg},
        {"w/o nei.", 0.0, lambda_deg},
        {"w/o deg.", lambda_nei, 0.0},
        {"w/o deg. & nei.", 0.0, 0.0},
    };
}

std::vector<MetricRow> run_ablation(const std::string& dataset_name,
                                    const std::string& metric_name, const TrainConfig& base,
                                    const std::vector<AblationVariant>& variants, int num_seeds,
                                    const TaskRunner& runner, bool parallel_seeds) {
    if (num_seeds < 1) throw ConfigError("run_ablation: num_seeds must be >= 1");
    std::vector<MetricRow> rows;
    for (const AblationVariant& variant : variants) {
        TrainConfig cfg = base;
        cfg.lambda_nei = variant.lambda_nei;
        cfg.lambda_deg = variant.lambda_deg;

        std::vector<double> values(num_seeds, 0.0);
        if (parallel_seeds) {
            std::vector<std::thread> workers;
            workers.reserve(num_seeds);
            for (int s = 0; s < num_seeds; ++s)
                workers.emplace_back([&, s] { values[s] = runner(cfg, base.seed + s); });
            for (auto& w : workers) w.join();
        } else {
            for (int s = 0; s < num_seeds; ++s) values[s] = runner(cfg, base.seed + s);
        }

        MetricRow row;
        row.variant = variant.name;
        row.dataset = dataset_name;
        row.metric = metric_name;
        row.seeds = num_seeds;
        row.values = values;
        for (double v : values) row.mean += v;
        row.mean /= num_seeds;
        if (num_seeds > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - row.mean) * (v - row.mean);
            row.stddev = std::sqrt(ss / (num_seeds - 1));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_metric_rows(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "variant,dataset,metric,mean,std,seeds\n";
    for (const MetricRow& r : rows)
        out << r.variant << ',' << r.dataset << ',' << r.metric << ',' << r.mean << ','
            << r.stddev << ',' << r.seeds << '\n';
}

}  // namespace invgae
