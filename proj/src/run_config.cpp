#include "invgae/run_config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace invgae {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    int out;
    try {
        out = std::stoi(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long out;
    try {
        out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + v + "'");
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "task") task = value;
    else if (key == "dataset") dataset = value;
    else if (key == "dataset_name") dataset_name = value;
    else if (key == "edge_file") edge_file = value;
    else if (key == "feature_file") feature_file = value;
    else if (key == "label_file") label_file = value;
    else if (key == "split_train_file") split_train_file = value;
    else if (key == "split_val_file") split_val_file = value;
    else if (key == "split_test_file") split_test_file = value;
    else if (key == "tu_dir") tu_dir = value;
    else if (key == "tu_name") tu_name = value;
    else if (key == "encoder") encoder = value;
    else if (key == "layers") layers = to_int(key, value);
    else if (key == "hidden") hidden = to_int(key, value);
    else if (key == "gin_hidden") gin_hidden = to_int(key, value);
    else if (key == "decoder_hidden") decoder_hidden = to_int(key, value);
    else if (key == "lambda_nei") lambda_nei = to_double(key, value);
    else if (key == "lambda_deg") lambda_deg = to_double(key, value);
    else if (key == "learning_rate") learning_rate = to_double(key, value);
    else if (key == "max_epochs") max_epochs = to_int(key, value);
    else if (key == "patience") patience = to_int(key, value);
    else if (key == "tolerance") tolerance = to_double(key, value);
    else if (key == "seed") seed = to_u64(key, value);
    else if (key == "split_seed") split_seed = to_u64(key, value);
    else if (key == "eval_seeds") eval_seeds = to_int(key, value);
    else if (key == "head_hidden") head_hidden = to_int(key, value);
    else if (key == "head_layers") head_layers = to_int(key, value);
    else if (key == "head_learning_rate") head_learning_rate = to_double(key, value);
    else if (key == "head_epochs") head_epochs = to_int(key, value);
    else if (key == "head_patience") head_patience = to_int(key, value);
    else if (key == "link_train_ratio") link_train_ratio = to_double(key, value);
    else if (key == "link_val_ratio") link_val_ratio = to_double(key, value);
    else if (key == "link_test_ratio") link_test_ratio = to_double(key, value);
    else if (key == "node_train_ratio") node_train_ratio = to_double(key, value);
    else if (key == "node_val_ratio") node_val_ratio = to_double(key, value);
    else if (key == "node_test_ratio") node_test_ratio = to_double(key, value);
    else if (key == "graph_train_ratio") graph_train_ratio = to_double(key, value);
    else if (key == "graph_val_ratio") graph_val_ratio = to_double(key, value);
    else if (key == "graph_test_ratio") graph_test_ratio = to_double(key, value);
    else if (key == "degree_cap") degree_cap = to_int(key, value);
    else if (key == "checkpoint") checkpoint = value;
    else if (key == "log_file") log_file = value;
    else if (key == "metrics_file") metrics_file = value;
    else if (key == "embeddings_file") embeddings_file = value;
    else if (key == "parallel_seeds") parallel_seeds = to_bool(key, value);
    else if (key == "kernels") kernels = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + " line " + std::to_string(number) +
                              ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string())
            cfg.set(key, value.get<std::string>());
        else
            cfg.set(key, value.dump());
    }
    return cfg;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["task"] = task;
    j["dataset"] = dataset;
    j["dataset_name"] = dataset_name;
    j["edge_file"] = edge_file;
    j["feature_file"] = feature_file;
    j["label_file"] = label_file;
    j["split_train_file"] = split_train_file;
    j["split_val_file"] = split_val_file;
    j["split_test_file"] = split_test_file;
    j["tu_dir"] = tu_dir;
    j["tu_name"] = tu_name;
    j["encoder"] = encoder;
    j["layers"] = layers;
    j["hidden"] = hidden;
    j["gin_hidden"] = gin_hidden;
    j["decoder_hidden"] = decoder_hidden;
    j["lambda_nei"] = lambda_nei;
    j["lambda_deg"] = lambda_deg;
    j["learning_rate"] = learning_rate;
    j["max_epochs"] = max_epochs;
    j["patience"] = patience;
    j["tolerance"] = tolerance;
    j["seed"] = seed;
    j["split_seed"] = split_seed;
    j["eval_seeds"] = eval_seeds;
    j["head_hidden"] = head_hidden;
    j["head_layers"] = head_layers;
    j["head_learning_rate"] = head_learning_rate;
    j["head_epochs"] = head_epochs;
    j["head_patience"] = head_patience;
    j["link_train_ratio"] = link_train_ratio;
    j["link_val_ratio"] = link_val_ratio;
    j["link_test_ratio"] = link_test_ratio;
    j["node_train_ratio"] = node_train_ratio;
    j["node_val_ratio"] = node_val_ratio;
    j["node_test_ratio"] = node_test_ratio;
    j["graph_train_ratio"] = graph_train_ratio;
    j["graph_val_ratio"] = graph_val_ratio;
    j["graph_test_ratio"] = graph_test_ratio;
    j["degree_cap"] = degree_cap;
    j["checkpoint"] = checkpoint;
    j["log_file"] = log_file;
    j["metrics_file"] = metrics_file;
    j["embeddings_file"] = embeddings_file;
    j["parallel_seeds"] = parallel_seeds;
    j["kernels"] = kernels;
    return j;
}

std::vector<std::string> RunConfig::echo_lines() const {
    std::vector<std::string> lines;
    for (const auto& [key, value] : to_json().items()) {
        std::string v = value.is_string() ? value.get<std::string>() : value.dump();
        lines.push_back(key + " = " + v);
    }
    return lines;
}

TrainConfig RunConfig::train_config(int input_dim) const {
    TrainConfig tc;
    tc.encoder = EncoderConfig::uniform(encoder == "gin" ? LayerKind::Gin : LayerKind::Gcn,
                                        input_dim, hidden, layers);
    tc.encoder.gin_hidden = gin_hidden;
    tc.decoder.hidden = decoder_hidden;
    tc.lambda_nei = lambda_nei;
    tc.lambda_deg = lambda_deg;
    tc.learning_rate = learning_rate;
    tc.max_epochs = resolved_max_epochs();
    tc.patience = patience;
    tc.tolerance = tolerance;
    tc.seed = seed;
    return tc;
}

MlpHeadConfig RunConfig::head_config() const {
    MlpHeadConfig hc;
    hc.hidden = head_hidden;
    hc.num_layers = head_layers;
    hc.learning_rate = head_learning_rate;
    hc.max_epochs = head_epochs;
    hc.patience = head_patience;
    hc.seed = seed;
    return hc;
}

void RunConfig::validate() const {
    if (task != "node" && task != "link" && task != "graph")
        throw ConfigError("task must be node, link or graph; got '" + task + "'");
    if (dataset != "citation" && dataset != "tu")
        throw ConfigError("dataset must be citation or tu; got '" + dataset + "'");
    if (encoder != "gcn" && encoder != "gin")
        throw ConfigError("encoder must be gcn or gin; got '" + encoder + "'");
    if (kernels != "auto" && kernels != "scalar" && kernels != "avx2")
        throw ConfigError("kernels must be auto, scalar or avx2; got '" + kernels + "'");
    if (dataset == "citation") {
        if (edge_file.empty() || feature_file.empty() || label_file.empty())
            throw ConfigError("citation dataset needs edge_file, feature_file and label_file");
        const int with_split = (!split_train_file.empty()) + (!split_val_file.empty()) +
                               (!split_test_file.empty());
        if (with_split != 0 && with_split != 3)
            throw ConfigError("provide all three split files or none");
        if (task == "graph") throw ConfigError("graph task requires a tu dataset");
    } else {
        if (tu_dir.empty() || tu_name.empty())
            throw ConfigError("tu dataset needs tu_dir and tu_name");
        if (task != "graph") throw ConfigError("tu datasets support the graph task only");
    }
    if (layers < 1) throw ConfigError("layers must be >= 1");
    if (hidden < 1) throw ConfigError("hidden must be >= 1");
    if (lambda_nei < 0 || lambda_deg < 0) throw ConfigError("lambda weights must be >= 0");
    if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
    if (max_epochs < 0) throw ConfigError("max_epochs must be >= 1 (0 selects the default)");
    if (patience < 1 || head_patience < 1) throw ConfigError("patience must be >= 1");
    if (eval_seeds < 1) throw ConfigError("eval_seeds must be >= 1");
    if (head_layers < 1 || head_hidden < 1 || head_epochs < 1)
        throw ConfigError("invalid head configuration");
    if (degree_cap < 1) throw ConfigError("degree_cap must be >= 1");

    auto check_ratios = [](double a, double b, double c, const char* what) {
        if (a < 0 || b < 0 || c < 0 || std::abs(a + b + c - 1.0) > 1e-9)
            throw ConfigError(std::string(what) + " ratios must be >= 0 and sum to 1");
    };
    check_ratios(link_train_ratio, link_val_ratio, link_test_ratio, "link");
    check_ratios(node_train_ratio, node_val_ratio, node_test_ratio, "node");
    check_ratios(graph_train_ratio, graph_val_ratio, graph_test_ratio, "graph");
}

}  // namespace invgae
