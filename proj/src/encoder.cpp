#include "invgae/encoder.hpp"

#include <cmath>
#include <string>

namespace invgae {

void EncoderConfig::validate() const {
    if (dims.size() < 2) throw ConfigError("encoder: need at least one layer (C_0 and C_1)");
    for (int d : dims)
        if (d < 1) throw ConfigError("encoder: channel dims must be >= 1");
    if (gin_hidden < 0) throw ConfigError("encoder: gin_hidden must be >= 0");
}

EncoderConfig EncoderConfig::uniform(LayerKind kind, int input_dim, int width, int layers) {
    if (layers < 1) throw ConfigError("encoder: num_layers must be >= 1");
    EncoderConfig cfg;
    cfg.kind = kind;
    cfg.dims.push_back(input_dim);
    for (int l = 0; l < layers; ++l) cfg.dims.push_back(width);
    cfg.validate();
    return cfg;
}

Tensor glorot_uniform(int rows, int cols, RngState& rng) {
    const double bound = std::sqrt(6.0 / (static_cast<double>(rows) + cols));
    Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i)
        t.data()[i] = rng.next_uniform_in(-bound, bound);
    return t;
}

Tensor identity_features(int n) {
    Tensor t(n, n);
    for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

void init_encoder_params(const EncoderConfig& config, ParameterStore& store, RngState& rng) {
    config.validate();
    for (int l = 0; l < config.num_layers(); ++l) {
        const std::string prefix = "enc.l" + std::to_string(l) + ".";
        if (config.kind == LayerKind::Gcn) {
            store.add(prefix + "w", glorot_uniform(config.dims[l], config.dims[l + 1], rng));
        } else {
            const int hid = config.gin_hidden_for(l);
            store.add(prefix + "w1", glorot_uniform(config.dims[l], hid, rng));
            store.add(prefix + "b1", Tensor(1, hid));
            store.add(prefix + "w2", glorot_uniform(hid, config.dims[l + 1], rng));
            store.add(prefix + "b2", Tensor(1, config.dims[l + 1]));
        }
    }
}

NodeId gcn_layer_on_tape(Tape& tape, NodeId h, const CsrMatrix& gcn_norm, NodeId w) {
    return tape.relu(tape.spmm(gcn_norm, tape.matmul(h, w)));
}

NodeId gin_layer_on_tape(Tape& tape, NodeId h, const CsrMatrix& neighbor_sum, NodeId w1,
                         NodeId b1, NodeId w2, NodeId b2) {
    const NodeId agg = tape.spmm(neighbor_sum, h);
    const NodeId hidden = tape.relu(tape.add_rowvec(tape.matmul(agg, w1), b1));
    return tape.add_rowvec(tape.matmul(hidden, w2), b2);
}

std::vector<NodeId> encode_on_tape(Tape& tape, const GraphOperators& ops, NodeId x,
                                   const EncoderConfig& config, TapeBinder& binder) {
    config.validate();
    if (tape.value(x).cols() != config.dims[0])
        throw ShapeError("encode: feature width " + std::to_string(tape.value(x).cols()) +
                         " != C_0 = " + std::to_string(config.dims[0]));
    auto leaf = [&](const std::string& name) { return binder.leaf(name); };
    std::vector<NodeId> stack{x};
    for (int l = 0; l < config.num_layers(); ++l) {
        const std::string prefix = "enc.l" + std::to_string(l) + ".";
        const NodeId h = stack.back();
        if (config.kind == LayerKind::Gcn) {
            const bool last = l + 1 == config.num_layers();
            const NodeId pre = tape.spmm(ops.gcn_norm, tape.matmul(h, leaf(prefix + "w")));
            stack.push_back(config.top_linear && last ? pre : tape.relu(pre));
        } else {
            stack.push_back(gin_layer_on_tape(tape, h, ops.neighbor_sum, leaf(prefix + "w1"),
                                              leaf(prefix + "b1"), leaf(prefix + "w2"),
                                              leaf(prefix + "b2")));
        }
    }
    return stack;
}

Tensor gcn_layer(const Tensor& h, const Graph& g, const Tensor& w) {
    if (h.rows() != g.node_count())
        throw ShapeError("gcn_layer: " + std::to_string(h.rows()) + " feature rows for " +
                         std::to_string(g.node_count()) + " nodes");
    const GraphOperators ops = GraphOperators::build(g);
    Tape tape;
    return tape.value(gcn_layer_on_tape(tape, tape.constant(h), ops.gcn_norm, tape.constant(w)));
}

Tensor gin_layer(const Tensor& h, const Graph& g, const GinLayerParams& fnn) {
    if (h.rows() != g.node_count())
        throw ShapeError("gin_layer: " + std::to_string(h.rows()) + " feature rows for " +
                         std::to_string(g.node_count()) + " nodes");
    const GraphOperators ops = GraphOperators::build(g);
    Tape tape;
    return tape.value(gin_layer_on_tape(tape, tape.constant(h), ops.neighbor_sum,
                                        tape.constant(fnn.w1), tape.constant(fnn.b1),
                                        tape.constant(fnn.w2), tape.constant(fnn.b2)));
}

EmbeddingStack encode(const Graph& g, const Tensor& x, const ParameterStore& store,
                      const EncoderConfig& config) {
    if (x.rows() != g.node_count())
        throw ShapeError("encode: " + std::to_string(x.rows()) + " feature rows for " +
                         std::to_string(g.node_count()) + " nodes");
    const GraphOperators ops = GraphOperators::build(g);
    Tape tape;
    TapeBinder binder(tape, store, false);
    const auto ids = encode_on_tape(tape, ops, tape.constant(x), config, binder);
    EmbeddingStack stack;
    stack.layers.reserve(ids.size());
    for (NodeId id : ids) stack.layers.push_back(tape.value(id));
    return stack;
}

}  // namespace invgae
