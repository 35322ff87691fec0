#include "invgae/data_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace invgae {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    return in;
}

struct Line {
    std::string text;
    int number;
};

std::vector<Line> read_lines(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<Line> lines;
    std::string text;
    int number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank
        lines.push_back({text, number});
    }
    return lines;
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw DataError(path + " line " + std::to_string(line) + ": " + what);
}

long parse_int(const std::string& token, const std::string& path, int line) {
    std::size_t pos = 0;
    long v;
    try {
        v = std::stol(token, &pos);
    } catch (const std::exception&) {
        parse_fail(path, line, "expected integer, got '" + token + "'");
    }
    if (pos != token.size()) parse_fail(path, line, "trailing characters in '" + token + "'");
    return v;
}

double parse_double(const std::string& token, const std::string& path, int line) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        parse_fail(path, line, "expected number, got '" + token + "'");
    }
    if (pos != token.size()) parse_fail(path, line, "trailing characters in '" + token + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream iss(s);
    std::vector<std::string> out;
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

std::vector<int> read_index_file(const std::string& path) {
    std::vector<int> out;
    for (const Line& l : read_lines(path)) {
        const auto toks = split_ws(l.text);
        if (toks.size() != 1) parse_fail(path, l.number, "expected one index per line");
        out.push_back(static_cast<int>(parse_int(toks[0], path, l.number)));
    }
    return out;
}

}  // namespace

CitationDataset load_edgelist_dataset(const std::string& edge_file,
                                      const std::string& feature_file,
                                      const std::string& label_file,
                                      const std::optional<SplitFiles>& split_files) {
    CitationDataset ds;

    // labels define the node count
    for (const Line& l : read_lines(label_file)) {
        const auto toks = split_ws(l.text);
        if (toks.size() != 1) parse_fail(label_file, l.number, "expected one label per line");
        const long v = parse_int(toks[0], label_file, l.number);
        if (v < 0) parse_fail(label_file, l.number, "labels must be non-negative");
        ds.labels.push_back(static_cast<int>(v));
        ds.num_classes = std::max(ds.num_classes, static_cast<int>(v) + 1);
    }
    const int n = static_cast<int>(ds.labels.size());
    if (n == 0) throw DataError(label_file + ": no labels");

    // features: one row per node
    const std::vector<Line> feat_lines = read_lines(feature_file);
    if (static_cast<int>(feat_lines.size()) != n)
        throw DataError(feature_file + ": " + std::to_string(feat_lines.size()) +
                        " feature rows for " + std::to_string(n) + " nodes");
    int width = -1;
    for (int i = 0; i < n; ++i) {
        const auto toks = split_ws(feat_lines[i].text);
        if (width == -1) {
            width = static_cast<int>(toks.size());
            if (width == 0) parse_fail(feature_file, feat_lines[i].number, "empty feature row");
            ds.features = Tensor(n, width);
        } else if (static_cast<int>(toks.size()) != width) {
            parse_fail(feature_file, feat_lines[i].number,
                       "expected " + std::to_string(width) + " values, got " +
                           std::to_string(toks.size()));
        }
        for (int c = 0; c < width; ++c)
            ds.features.at(i, c) = parse_double(toks[c], feature_file, feat_lines[i].number);
    }

    // edges: 0-based pairs, both orientations collapse
    std::set<std::pair<int, int>> edges;
    for (const Line& l : read_lines(edge_file)) {
        const auto toks = split_ws(l.text);
        if (toks.size() != 2) parse_fail(edge_file, l.number, "expected two indices per line");
        const long a = parse_int(toks[0], edge_file, l.number);
        const long b = parse_int(toks[1], edge_file, l.number);
        if (a < 0 || a >= n || b < 0 || b >= n)
            parse_fail(edge_file, l.number,
                       "node index out of range for " + std::to_string(n) + " nodes");
        if (a == b) parse_fail(edge_file, l.number, "self-loop");
        edges.emplace(static_cast<int>(std::min(a, b)), static_cast<int>(std::max(a, b)));
    }
    ds.graph = Graph::build(n, std::vector<std::pair<int, int>>(edges.begin(), edges.end()));

    if (split_files) {
        NodeSplit split;
        split.train = read_index_file(split_files->train);
        split.val = read_index_file(split_files->val);
        split.test = read_index_file(split_files->test);
        for (const auto* part : {&split.train, &split.val, &split.test})
            for (int idx : *part)
                if (idx < 0 || idx >= n)
                    throw DataError("split file index " + std::to_string(idx) +
                                    " out of range for " + std::to_string(n) + " nodes");
        ds.shipped_split = std::move(split);
    }
    return ds;
}

TuDataset load_tu_dataset(const std::string& directory, const std::string& name,
                          int degree_cap) {
    if (degree_cap < 1) throw ConfigError("load_tu_dataset: degree_cap must be >= 1");
    const std::string base = directory + "/" + name;
    const std::string indicator_file = base + "_graph_indicator.txt";
    const std::string adj_file = base + "_A.txt";
    const std::string glabel_file = base + "_graph_labels.txt";
    const std::string nlabel_file = base + "_node_labels.txt";

    // graph indicator: 1-based graph id per node, contiguous blocks
    std::vector<int> indicator;
    for (const Line& l : read_lines(indicator_file)) {
        const auto toks = split_ws(l.text);
        if (toks.size() != 1) parse_fail(indicator_file, l.number, "expected one id per line");
        indicator.push_back(static_cast<int>(parse_int(toks[0], indicator_file, l.number)));
    }
    if (indicator.empty()) throw DataError(indicator_file + ": empty");
    const int num_graphs = *std::max_element(indicator.begin(), indicator.end());
    if (indicator.front() != 1)
        throw DataError(indicator_file + ": non-contiguous indicator (must start at 1)");
    for (std::size_t i = 1; i < indicator.size(); ++i) {
        const int delta = indicator[i] - indicator[i - 1];
        if (delta < 0 || delta > 1)
            throw DataError(indicator_file + ": non-contiguous indicator near node " +
                            std::to_string(i + 1));
    }
    std::vector<int> node_offset(num_graphs + 1, 0);  // first global node of each graph
    std::vector<int> node_count(num_graphs, 0);
    for (int id : indicator) ++node_count[id - 1];
    for (int gi = 0; gi < num_graphs; ++gi) node_offset[gi + 1] = node_offset[gi] + node_count[gi];

    // edges: 1-based global node ids, both orientations collapse
    std::vector<std::set<std::pair<int, int>>> edges(num_graphs);
    for (const Line& l : read_lines(adj_file)) {
        std::string text = l.text;
        std::replace(text.begin(), text.end(), ',', ' ');
        const auto toks = split_ws(text);
        if (toks.size() != 2) parse_fail(adj_file, l.number, "expected 'u, v'");
        const long u = parse_int(toks[0], adj_file, l.number);
        const long v = parse_int(toks[1], adj_file, l.number);
        if (u < 1 || u > static_cast<long>(indicator.size()) || v < 1 ||
            v > static_cast<long>(indicator.size()))
            parse_fail(adj_file, l.number, "node id out of range");
        const int gu = indicator[u - 1], gv = indicator[v - 1];
        if (gu != gv)
            parse_fail(adj_file, l.number,
                       "edge joins graphs " + std::to_string(gu) + " and " + std::to_string(gv));
        const int a = static_cast<int>(u) - 1 - node_offset[gu - 1];
        const int b = static_cast<int>(v) - 1 - node_offset[gu - 1];
        if (a == b) parse_fail(adj_file, l.number, "self-loop");
        edges[gu - 1].emplace(std::min(a, b), std::max(a, b));
    }

    TuDataset ds;
    for (int gi = 0; gi < num_graphs; ++gi)
        ds.graphs.push_back(Graph::build(
            node_count[gi], std::vector<std::pair<int, int>>(edges[gi].begin(), edges[gi].end())));

    // graph labels remapped to [0, classes) by sorted value
    std::vector<int> raw_glabels;
    for (const Line& l : read_lines(glabel_file)) {
        const auto toks = split_ws(l.text);
        if (toks.size() != 1) parse_fail(glabel_file, l.number, "expected one label per line");
        raw_glabels.push_back(static_cast<int>(parse_int(toks[0], glabel_file, l.number)));
    }
    if (static_cast<int>(raw_glabels.size()) != num_graphs)
        throw DataError(glabel_file + ": " + std::to_string(raw_glabels.size()) +
                        " labels for " + std::to_string(num_graphs) + " graphs");
    std::map<int, int> glabel_map;
    for (int v : raw_glabels) glabel_map.emplace(v, 0);
    int next_class = 0;
    for (auto& [value, cls] : glabel_map) cls = next_class++;
    ds.num_classes = next_class;
    for (int v : raw_glabels) ds.labels.push_back(glabel_map.at(v));

    // node labels one-hot, or capped degree one-hot when absent
    std::ifstream nlabel_probe(nlabel_file);
    if (nlabel_probe) {
        nlabel_probe.close();
        std::vector<int> raw_nlabels;
        for (const Line& l : read_lines(nlabel_file)) {
            const auto toks = split_ws(l.text);
            if (toks.size() != 1) parse_fail(nlabel_file, l.number, "expected one label per line");
            raw_nlabels.push_back(static_cast<int>(parse_int(toks[0], nlabel_file, l.number)));
        }
        if (raw_nlabels.size() != indicator.size())
            throw DataError(nlabel_file + ": " + std::to_string(raw_nlabels.size()) +
                            " labels for " + std::to_string(indicator.size()) + " nodes");
        std::map<int, int> nlabel_map;
        for (int v : raw_nlabels) nlabel_map.emplace(v, 0);
        int next = 0;
        for (auto& [value, cls] : nlabel_map) cls = next++;
        ds.feature_dim = next;
        for (int gi = 0; gi < num_graphs; ++gi) {
            Tensor x(node_count[gi], ds.feature_dim);
            for (int v = 0; v < node_count[gi]; ++v)
                x.at(v, nlabel_map.at(raw_nlabels[node_offset[gi] + v])) = 1.0;
            ds.features.push_back(std::move(x));
        }
    } else {
        ds.featureless = true;
        ds.feature_dim = degree_cap;
        for (int gi = 0; gi < num_graphs; ++gi) {
            Tensor x(node_count[gi], degree_cap);
            for (int v = 0; v < node_count[gi]; ++v)
                x.at(v, std::min(ds.graphs[gi].degree(v), degree_cap - 1)) = 1.0;
            ds.features.push_back(std::move(x));
        }
    }
    return ds;
}

void save_checkpoint(const ParameterStore& params, const nlohmann::json& config,
                     const RngState& rng, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "checkpoint payload assumes a little-endian host");
    nlohmann::json manifest;
    manifest["format_version"] = kCheckpointFormatVersion;
    manifest["config"] = config;
    manifest["rng"] = {{"seed", rng.seed}, {"counter", rng.counter}};
    nlohmann::json tensors = nlohmann::json::array();
    std::size_t payload_bytes = 0;
    for (const std::string& name : params.names()) {
        const Tensor& t = params.get(name);
        tensors.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
        payload_bytes += t.size() * sizeof(double);
    }
    manifest["tensors"] = std::move(tensors);
    manifest["payload_bytes"] = payload_bytes;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out << manifest.dump() << '\n';
    for (const std::string& name : params.names()) {
        const Tensor& t = params.get(name);
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!out) throw DataError("failed writing checkpoint payload: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    std::string manifest_line;
    if (!std::getline(in, manifest_line)) throw DataError("checkpoint manifest missing: " + path);

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(manifest_line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupted checkpoint manifest: " + std::string(e.what()));
    }

    Checkpoint ckpt;
    try {
        ckpt.format_version = manifest.at("format_version").get<int>();
        if (ckpt.format_version != kCheckpointFormatVersion)
            throw DataError("checkpoint format version " + std::to_string(ckpt.format_version) +
                            " != supported version " + std::to_string(kCheckpointFormatVersion));
        ckpt.config = manifest.value("config", nlohmann::json::object());
        ckpt.rng.seed = manifest.at("rng").at("seed").get<std::uint64_t>();
        ckpt.rng.counter = manifest.at("rng").at("counter").get<std::uint64_t>();

        const std::size_t recorded_bytes = manifest.at("payload_bytes").get<std::size_t>();
        std::size_t expected_bytes = 0;
        for (const auto& t : manifest.at("tensors"))
            expected_bytes += static_cast<std::size_t>(t.at("rows").get<int>()) *
                              t.at("cols").get<int>() * sizeof(double);
        if (expected_bytes != recorded_bytes)
            throw DataError("checkpoint shape-product mismatch: tensor shapes give " +
                            std::to_string(expected_bytes) + " bytes, manifest records " +
                            std::to_string(recorded_bytes));

        std::string payload((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        if (payload.size() != expected_bytes)
            throw DataError("checkpoint payload length mismatch: expected " +
                            std::to_string(expected_bytes) + " bytes, got " +
                            std::to_string(payload.size()));

        std::size_t offset = 0;
        for (const auto& t : manifest.at("tensors")) {
            Tensor tensor(t.at("rows").get<int>(), t.at("cols").get<int>());
            std::memcpy(tensor.data(), payload.data() + offset, tensor.size() * sizeof(double));
            offset += tensor.size() * sizeof(double);
            ckpt.params.add(t.at("name").get<std::string>(), std::move(tensor));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupted checkpoint manifest: " + std::string(e.what()));
    }
    return ckpt;
}

void export_embeddings(const Tensor& embeddings, const std::string& dataset_name, int layer,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write embeddings: " + path);
    out << "dataset=" << dataset_name << " layer=" << layer << " dim=" << embeddings.cols()
        << '\n';
    char buf[32];
    for (int r = 0; r < embeddings.rows(); ++r) {
        for (int c = 0; c < embeddings.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", embeddings.at(r, c));
            out << (c ? " " : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("failed writing embeddings: " + path);
}

}  // namespace invgae
