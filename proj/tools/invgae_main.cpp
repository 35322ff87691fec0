// invgae command line: train, eval, gradcheck, ablate, export-embeddings.
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// failure, 1 anything else.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "invgae/data_io.hpp"
#include "invgae/eval.hpp"
#include "invgae/kernels.hpp"
#include "invgae/run_config.hpp"
#include "invgae/training.hpp"

namespace {

using namespace invgae;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

using KvList = std::vector<std::pair<std::string, std::string>>;

RunConfig merge_config(const std::string& config_path, const KvList& overrides) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    return cfg;
}

void apply_kernel_choice(const RunConfig& cfg) {
    if (cfg.kernels == "scalar") kernels::force_backend(kernels::Backend::Scalar);
    else if (cfg.kernels == "avx2") kernels::force_backend(kernels::Backend::Avx2);
}

struct LoadedCitation {
    CitationDataset ds;
    NodeSplit split;
    std::string split_source;
};

LoadedCitation load_citation(const RunConfig& cfg) {
    std::optional<SplitFiles> files;
    if (!cfg.split_train_file.empty())
        files = SplitFiles{cfg.split_train_file, cfg.split_val_file, cfg.split_test_file};
    LoadedCitation out;
    out.ds = load_edgelist_dataset(cfg.edge_file, cfg.feature_file, cfg.label_file, files);
    if (out.ds.shipped_split) {
        out.split = *out.ds.shipped_split;
        out.split_source = "file";
    } else {
        out.split = stratified_node_split(out.ds.labels, cfg.node_train_ratio,
                                          cfg.node_val_ratio, cfg.node_test_ratio,
                                          cfg.split_seed);
        out.split_source = "generated-fallback(seed=" + std::to_string(cfg.split_seed) + ")";
    }
    return out;
}

std::string effective_name(const RunConfig& cfg) {
    if (!cfg.dataset_name.empty()) return cfg.dataset_name;
    return cfg.dataset == "tu" ? cfg.tu_name : "citation";
}

void echo_config(std::ostream& out, const RunConfig& cfg) {
    for (const std::string& line : cfg.echo_lines()) out << "# " << line << '\n';
}

void write_metrics(const RunConfig& cfg, const std::vector<MetricRow>& rows) {
    write_metric_rows(std::cout, rows);
    if (!cfg.metrics_file.empty()) {
        std::ofstream out(cfg.metrics_file);
        if (!out) throw DataError("cannot write metrics file: " + cfg.metrics_file);
        echo_config(out, cfg);
        write_metric_rows(out, rows);
    }
}

int cmd_train(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.checkpoint.empty()) throw ConfigError("train: checkpoint output path required");
    apply_kernel_choice(cfg);

    std::ofstream log_stream;
    std::ostream* log = &std::cout;
    if (!cfg.log_file.empty()) {
        log_stream.open(cfg.log_file);
        if (!log_stream) throw DataError("cannot write log file: " + cfg.log_file);
        echo_config(log_stream, cfg);
        log = &log_stream;
    }
    *log << "epoch,l_self,l_nei,l_deg,total\n";
    const EpochLogger logger = [log](int epoch, const LossBreakdown& b) {
        char line[160];
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g", epoch, b.l_self, b.l_nei,
                      b.l_deg, b.total);
        *log << line << '\n';
    };

    TrainResult result;
    if (cfg.dataset == "citation") {
        const LoadedCitation data = load_citation(cfg);
        const TrainConfig tc = cfg.train_config(data.ds.features.cols());
        if (cfg.task == "link") {
            auto [split, train_graph] = make_link_split(data.ds.graph, cfg.link_train_ratio,
                                                        cfg.link_val_ratio, cfg.link_test_ratio,
                                                        cfg.split_seed);
            result = train_unsupervised(train_graph, data.ds.features, tc, logger);
        } else {
            result = train_unsupervised(data.ds.graph, data.ds.features, tc, logger);
        }
    } else {
        const TuDataset data = load_tu_dataset(cfg.tu_dir, cfg.tu_name, cfg.degree_cap);
        const TrainConfig tc = cfg.train_config(data.feature_dim);
        result = train_unsupervised(std::span<const Graph>(data.graphs),
                                    std::span<const Tensor>(data.features), tc, logger);
    }

    save_checkpoint(result.params, cfg.to_json(), result.rng, cfg.checkpoint);

    const LossBreakdown& final_losses = result.report.history.back();
    std::cout << "epochs=" << result.report.epochs << " stop="
              << (result.report.stop_reason == TrainReport::StopReason::Converged ? "converged"
                                                                                  : "max_epochs")
              << '\n';
    std::cout << "l_self=" << final_losses.l_self << " l_nei=" << final_losses.l_nei
              << " l_deg=" << final_losses.l_deg << " total=" << final_losses.total << '\n';
    std::cout << "checkpoint=" << cfg.checkpoint << '\n';
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    if (cfg.checkpoint.empty()) throw ConfigError("eval: checkpoint path required");
    const Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
    // model architecture (and, for link, the split identity) comes from the
    // checkpoint; dataset paths and head settings from the current config
    const RunConfig trained = RunConfig::from_json(ckpt.config);
    cfg.encoder = trained.encoder;
    cfg.layers = trained.layers;
    cfg.hidden = trained.hidden;
    cfg.gin_hidden = trained.gin_hidden;
    cfg.decoder_hidden = trained.decoder_hidden;
    if (cfg.task == "link") {
        cfg.link_train_ratio = trained.link_train_ratio;
        cfg.link_val_ratio = trained.link_val_ratio;
        cfg.link_test_ratio = trained.link_test_ratio;
        cfg.split_seed = trained.split_seed;
    }
    cfg.validate();
    apply_kernel_choice(cfg);

    std::vector<MetricRow> rows;
    if (cfg.task == "link") {
        const LoadedCitation data = load_citation(cfg);
        auto [split, train_graph] = make_link_split(data.ds.graph, cfg.link_train_ratio,
                                                    cfg.link_val_ratio, cfg.link_test_ratio,
                                                    cfg.split_seed);
        const TrainConfig tc = cfg.train_config(data.ds.features.cols());
        const EmbeddingStack stack =
            encode(train_graph, data.ds.features, ckpt.params, tc.encoder);
        auto auc_of = [&](const std::vector<std::pair<int, int>>& pos,
                          const std::vector<std::pair<int, int>>& neg) {
            std::vector<std::pair<int, int>> pairs = pos;
            pairs.insert(pairs.end(), neg.begin(), neg.end());
            std::vector<int> labels(pos.size(), 1);
            labels.resize(pairs.size(), 0);
            return auc(link_scores(stack.top(), pairs), labels);
        };
        MetricRow row;
        row.variant = "checkpoint";
        row.dataset = effective_name(cfg);
        row.metric = "link_auc";
        row.mean = auc_of(split.test_pos, split.test_neg);
        row.stddev = 0.0;
        row.seeds = 1;
        rows.push_back(row);
    } else {
        Tensor table;
        std::vector<int> labels;
        NodeSplit split;
        std::string name = effective_name(cfg);
        if (cfg.task == "node") {
            const LoadedCitation data = load_citation(cfg);
            const TrainConfig tc = cfg.train_config(data.ds.features.cols());
            table = encode(data.ds.graph, data.ds.features, ckpt.params, tc.encoder).top();
            labels = data.ds.labels;
            split = data.split;
            std::cout << "# node split source: " << data.split_source << '\n';
        } else {
            const TuDataset data = load_tu_dataset(cfg.tu_dir, cfg.tu_name, cfg.degree_cap);
            const TrainConfig tc = cfg.train_config(data.feature_dim);
            table = Tensor(static_cast<int>(data.graphs.size()), tc.encoder.dims.back());
            for (std::size_t i = 0; i < data.graphs.size(); ++i) {
                const EmbeddingStack stack =
                    encode(data.graphs[i], data.features[i], ckpt.params, tc.encoder);
                const Tensor emb = graph_embedding(stack);
                for (int c = 0; c < emb.cols(); ++c)
                    table.at(static_cast<int>(i), c) = emb.at(0, c);
            }
            labels = data.labels;
            const GraphSplit gs =
                make_graph_split(static_cast<int>(data.graphs.size()), cfg.graph_train_ratio,
                                 cfg.graph_val_ratio, cfg.graph_test_ratio, cfg.split_seed);
            split = NodeSplit{gs.train, gs.val, gs.test};
        }
        MetricRow row;
        row.variant = "checkpoint";
        row.dataset = name;
        row.metric = cfg.task == "node" ? "node_accuracy" : "graph_accuracy";
        row.seeds = cfg.eval_seeds;
        for (int s = 0; s < cfg.eval_seeds; ++s) {
            MlpHeadConfig hc = cfg.head_config();
            hc.seed = cfg.seed + static_cast<std::uint64_t>(s);
            const ClassifyReport report = node_classify(table, labels, split, hc);
            row.values.push_back(report.test_accuracy);
            row.mean += report.test_accuracy;
        }
        row.mean /= cfg.eval_seeds;
        if (cfg.eval_seeds > 1) {
            double ss = 0.0;
            for (double v : row.values) ss += (v - row.mean) * (v - row.mean);
            row.stddev = std::sqrt(ss / (cfg.eval_seeds - 1));
        }
        rows.push_back(row);
    }
    write_metrics(cfg, rows);
    return kExitOk;
}

struct GradcheckOptions {
    int nodes = 12;
    int layers = 2;
    int width = 8;
    std::uint64_t seed = 7;
    double step = 1e-5;
    double tolerance = 1e-4;
    std::string encoder = "gcn";
    std::string kernels = "auto";
    bool corrupt = false;  // test hook: falsify one gradient entry
};

int cmd_gradcheck(const GradcheckOptions& opt) {
    if (opt.nodes < 2 || opt.nodes > 16)
        throw ConfigError("gradcheck: nodes must be in [2, 16]");
    if (opt.layers < 1) throw ConfigError("gradcheck: layers must be >= 1");
    if (opt.width < 1) throw ConfigError("gradcheck: width must be >= 1");
    RunConfig kcfg;
    kcfg.kernels = opt.kernels;
    if (opt.kernels != "auto" && opt.kernels != "scalar" && opt.kernels != "avx2")
        throw ConfigError("gradcheck: kernels must be auto, scalar or avx2");
    apply_kernel_choice(kcfg);

    RngState rng{opt.seed, 0};
    const Graph g = random_gnp_graph(opt.nodes, 3.0 / std::max(1, opt.nodes - 1), rng);
    const Tensor x = sample_standard_normal(opt.nodes, opt.width, rng);

    TrainConfig tc;
    tc.encoder = EncoderConfig::uniform(opt.encoder == "gin" ? LayerKind::Gin : LayerKind::Gcn,
                                        opt.width, opt.width, opt.layers);
    tc.decoder.hidden = 2 * opt.width;
    tc.seed = opt.seed;

    ParameterStore params;
    RngState init_rng{opt.seed, 0};
    init_encoder_params(tc.encoder, params, init_rng);
    init_decoder_params(tc.encoder, tc.decoder, params, init_rng);

    std::vector<Tensor> eps;
    for (int l = 0; l < tc.encoder.num_layers(); ++l)
        eps.push_back(sample_standard_normal(opt.nodes, tc.encoder.dims[l], rng));

    LossFn fn = frozen_loss_fn(g, x, tc, std::move(eps));
    if (opt.corrupt) {
        LossFn inner = std::move(fn);
        fn = [inner](const ParameterStore& p, bool want_grads) {
            LossEval ev = inner(p, want_grads);
            if (want_grads && !ev.grads.empty()) ev.grads.begin()->second.data()[0] += 1.0;
            return ev;
        };
    }

    const FdReport report = finite_diff_check(fn, params, opt.step, opt.tolerance);
    for (const auto& entry : report.entries) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-24s max_rel_err=%.3e", entry.param.c_str(),
                      entry.max_rel_err);
        std::cout << line << '\n';
    }
    std::cout << "worst: " << report.worst_param << " rel_err=" << report.worst_rel_err
              << " tolerance=" << report.tolerance << '\n';
    if (!report.passed()) {
        std::cout << "gradcheck FAIL\n";
        return kExitNumeric;
    }
    std::cout << "gradcheck PASS\n";
    return kExitOk;
}

int cmd_ablate(const RunConfig& cfg, const std::string& sweep) {
    cfg.validate();
    apply_kernel_choice(cfg);

    std::vector<AblationVariant> variants;
    if (sweep.empty()) {
        variants = standard_ablation_variants(cfg.lambda_nei, cfg.lambda_deg);
    } else {
        const auto eq = sweep.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--sweep expects lambda_nei=v1,v2,... or lambda_deg=v1,v2,...");
        const std::string key = sweep.substr(0, eq);
        if (key != "lambda_nei" && key != "lambda_deg")
            throw ConfigError("--sweep key must be lambda_nei or lambda_deg");
        std::stringstream ss(sweep.substr(eq + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const double v = std::stod(tok);
            AblationVariant variant{key + "=" + tok,
                                    key == "lambda_nei" ? v : cfg.lambda_nei,
                                    key == "lambda_deg" ? v : cfg.lambda_deg};
            variants.push_back(variant);
        }
        if (variants.empty()) throw ConfigError("--sweep: no values given");
    }

    const std::string name = effective_name(cfg);
    std::vector<MetricRow> rows;
    if (cfg.dataset == "citation") {
        const LoadedCitation data = load_citation(cfg);
        const TrainConfig base = cfg.train_config(data.ds.features.cols());
        if (cfg.task == "node") {
            const TaskRunner runner = [&](const TrainConfig& tc, std::uint64_t seed) {
                TrainConfig run_tc = tc;
                run_tc.seed = seed;
                MlpHeadConfig hc = cfg.head_config();
                hc.seed = seed;
                return run_node_task(data.ds.graph, data.ds.features, data.ds.labels, data.split,
                                     run_tc, hc)
                    .report.test_accuracy;
            };
            rows = run_ablation(name, "node_accuracy", base, variants, cfg.eval_seeds, runner,
                                cfg.parallel_seeds);
        } else {
            const TaskRunner runner = [&](const TrainConfig& tc, std::uint64_t seed) {
                TrainConfig run_tc = tc;
                run_tc.seed = seed;
                return run_link_task(data.ds.graph, data.ds.features, run_tc,
                                     cfg.link_train_ratio, cfg.link_val_ratio,
                                     cfg.link_test_ratio, cfg.split_seed)
                    .test_auc;
            };
            rows = run_ablation(name, "link_auc", base, variants, cfg.eval_seeds, runner,
                                cfg.parallel_seeds);
        }
    } else {
        const TuDataset data = load_tu_dataset(cfg.tu_dir, cfg.tu_name, cfg.degree_cap);
        const TrainConfig base = cfg.train_config(data.feature_dim);
        const GraphSplit split =
            make_graph_split(static_cast<int>(data.graphs.size()), cfg.graph_train_ratio,
                             cfg.graph_val_ratio, cfg.graph_test_ratio, cfg.split_seed);
        const TaskRunner runner = [&](const TrainConfig& tc, std::uint64_t seed) {
            TrainConfig run_tc = tc;
            run_tc.seed = seed;
            MlpHeadConfig hc = cfg.head_config();
            hc.seed = seed;
            return run_graph_task(data.graphs, data.features, data.labels, split, run_tc, hc)
                .report.test_accuracy;
        };
        rows = run_ablation(name, "graph_accuracy", base, variants, cfg.eval_seeds, runner,
                            cfg.parallel_seeds);
    }
    write_metrics(cfg, rows);
    return kExitOk;
}

int cmd_export(const RunConfig& cfg_in, int layer) {
    RunConfig cfg = cfg_in;
    if (cfg.checkpoint.empty()) throw ConfigError("export-embeddings: checkpoint path required");
    if (cfg.embeddings_file.empty()) throw ConfigError("export-embeddings: output path required");
    const Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
    const RunConfig trained = RunConfig::from_json(ckpt.config);
    cfg.encoder = trained.encoder;
    cfg.layers = trained.layers;
    cfg.hidden = trained.hidden;
    cfg.gin_hidden = trained.gin_hidden;
    cfg.decoder_hidden = trained.decoder_hidden;
    cfg.validate();
    apply_kernel_choice(cfg);

    const int out_layer = layer < 0 ? cfg.layers : layer;
    if (out_layer > cfg.layers)
        throw ConfigError("export-embeddings: layer " + std::to_string(out_layer) +
                          " out of range (encoder has " + std::to_string(cfg.layers) +
                          " layers)");

    if (cfg.dataset == "citation") {
        const LoadedCitation data = load_citation(cfg);
        const TrainConfig tc = cfg.train_config(data.ds.features.cols());
        const EmbeddingStack stack = encode(data.ds.graph, data.ds.features, ckpt.params,
                                            tc.encoder);
        export_embeddings(stack.layers[out_layer], effective_name(cfg), out_layer,
                          cfg.embeddings_file);
    } else {
        const TuDataset data = load_tu_dataset(cfg.tu_dir, cfg.tu_name, cfg.degree_cap);
        const TrainConfig tc = cfg.train_config(data.feature_dim);
        int total_nodes = 0;
        for (const Graph& g : data.graphs) total_nodes += g.node_count();
        const int width = tc.encoder.dims[out_layer];
        Tensor all(total_nodes, width);
        int row = 0;
        for (std::size_t i = 0; i < data.graphs.size(); ++i) {
            const EmbeddingStack stack =
                encode(data.graphs[i], data.features[i], ckpt.params, tc.encoder);
            const Tensor& h = stack.layers[out_layer];
            for (int r = 0; r < h.rows(); ++r, ++row)
                for (int c = 0; c < width; ++c) all.at(row, c) = h.at(r, c);
        }
        export_embeddings(all, effective_name(cfg), out_layer, cfg.embeddings_file);
    }
    std::cout << "embeddings=" << cfg.embeddings_file << '\n';
    return kExitOk;
}

void add_override_option(CLI::App* cmd, KvList& sets, const std::string& flag,
                         const std::string& key, const std::string& desc) {
    cmd->add_option_function<std::string>(
        flag, [&sets, key](const std::string& v) { sets.emplace_back(key, v); }, desc);
}

void add_common_options(CLI::App* cmd, std::string& config_path, KvList& sets) {
    cmd->add_option("--config", config_path, "key = value configuration file");
    cmd->add_option_function<std::vector<std::string>>(
        "--set",
        [&sets](const std::vector<std::string>& kvs) {
            for (const std::string& kv : kvs) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--set expects key=value");
                sets.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            }
        },
        "override any config key (key=value, repeatable)");
    add_override_option(cmd, sets, "--task", "task", "node | link | graph");
    add_override_option(cmd, sets, "--seed", "seed", "training / evaluation seed");
    add_override_option(cmd, sets, "--kernels", "kernels", "auto | scalar | avx2");
    add_override_option(cmd, sets, "--checkpoint", "checkpoint", "checkpoint path");
    add_override_option(cmd, sets, "--metrics-file", "metrics_file", "metric table output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"inverse-GNN variational graph auto-encoder"};
    app.require_subcommand(1);

    std::string config_path;
    KvList sets;

    CLI::App* train = app.add_subcommand("train", "unsupervised training");
    add_common_options(train, config_path, sets);
    add_override_option(train, sets, "--max-epochs", "max_epochs", "epoch cap");
    add_override_option(train, sets, "--log-file", "log_file", "per-epoch loss log");
    add_override_option(train, sets, "--encoder", "encoder", "gcn | gin");
    add_override_option(train, sets, "--layers", "layers", "encoder layers");
    add_override_option(train, sets, "--hidden", "hidden", "encoder channel width");
    add_override_option(train, sets, "--lambda-nei", "lambda_nei", "neighborhood loss weight");
    add_override_option(train, sets, "--lambda-deg", "lambda_deg", "degree loss weight");

    CLI::App* eval_cmd = app.add_subcommand("eval", "downstream evaluation of a checkpoint");
    add_common_options(eval_cmd, config_path, sets);
    add_override_option(eval_cmd, sets, "--seeds", "eval_seeds", "number of head seeds");

    CLI::App* ablate = app.add_subcommand("ablate", "loss-term ablations / lambda sweeps");
    add_common_options(ablate, config_path, sets);
    add_override_option(ablate, sets, "--seeds", "eval_seeds", "seeds per variant");
    std::string sweep;
    ablate->add_option("--sweep", sweep, "lambda_nei=v1,v2,... or lambda_deg=v1,v2,...");

    GradcheckOptions gopt;
    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    gradcheck->add_option("--nodes", gopt.nodes, "synthetic node count (<= 16)");
    gradcheck->add_option("--layers", gopt.layers, "encoder layers");
    gradcheck->add_option("--width", gopt.width, "channel width");
    gradcheck->add_option("--seed", gopt.seed, "instance seed");
    gradcheck->add_option("--step", gopt.step, "finite-difference step");
    gradcheck->add_option("--tolerance", gopt.tolerance, "max relative error");
    gradcheck->add_option("--encoder", gopt.encoder, "gcn | gin");
    gradcheck->add_option("--kernels", gopt.kernels, "auto | scalar | avx2");
    gradcheck->add_flag("--corrupt-gradient", gopt.corrupt, "test hook: falsify one gradient")
        ->group("");  // hidden

    CLI::App* export_cmd = app.add_subcommand("export-embeddings", "write embeddings to a file");
    add_common_options(export_cmd, config_path, sets);
    add_override_option(export_cmd, sets, "--out", "embeddings_file", "output path");
    int export_layer = -1;
    export_cmd->add_option("--layer", export_layer, "stack layer to export (default: top)");

    try {
        app.parse(argc, argv);
        if (gradcheck->parsed()) return cmd_gradcheck(gopt);
        const RunConfig cfg = merge_config(config_path, sets);
        if (train->parsed()) return cmd_train(cfg);
        if (eval_cmd->parsed()) return cmd_eval(cfg);
        if (ablate->parsed()) return cmd_ablate(cfg, sweep);
        if (export_cmd->parsed()) return cmd_export(cfg, export_layer);
        return kExitConfig;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ShapeError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
