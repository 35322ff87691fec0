#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "invgae/graph.hpp"
#include "invgae/params.hpp"
#include "invgae/rng.hpp"
#include "invgae/tape.hpp"

namespace invgae {

// Fetches named parameters onto a tape, as trainable leaves or constants,
// binding each name at most once (multi-graph epochs share one binding).
class TapeBinder {
public:
    TapeBinder(Tape& tape, const ParameterStore& store, bool bind_params)
        : tape_(tape), store_(store), bind_(bind_params) {}

    NodeId leaf(const std::string& name) {
        auto it = cache_.find(name);
        if (it != cache_.end()) return it->second;
        const NodeId id =
            bind_ ? tape_.param(name, store_.get(name)) : tape_.constant(store_.get(name));
        cache_.emplace(name, id);
        return id;
    }

private:
    Tape& tape_;
    const ParameterStore& store_;
    bool bind_;
    std::unordered_map<std::string, NodeId> cache_;
};

enum class LayerKind { Gcn, Gin };

struct EncoderConfig {
    LayerKind kind = LayerKind::Gcn;
    // channel dims C_0..C_L; dims[0] is the input feature width
    std::vector<int> dims;
    // hidden width of each GIN FNN; 0 means "use the layer's output width"
    int gin_hidden = 0;
    // leave the top GCN layer linear (GIN layers always end in an affine)
    bool top_linear = false;

    int num_layers() const { return static_cast<int>(dims.size()) - 1; }
    int gin_hidden_for(int layer) const { return gin_hidden > 0 ? gin_hidden : dims[layer + 1]; }
    void validate() const;

    static EncoderConfig uniform(LayerKind kind, int input_dim, int width, int layers);
};

// Per-layer embedding matrices H^(0..L); layers[0] is the input features.
struct EmbeddingStack {
    std::vector<Tensor> layers;

    const Tensor& top() const { return layers.back(); }
    int num_layers() const { return static_cast<int>(layers.size()) - 1; }
};

// scaled uniform init in +-sqrt(6/(fan_in+fan_out))
Tensor glorot_uniform(int rows, int cols, RngState& rng);

// Identity-column substitute features for a featureless single graph.
Tensor identity_features(int n);

// Parameter names: GCN "enc.l<l>.w"; GIN "enc.l<l>.w1|b1|w2|b2".
void init_encoder_params(const EncoderConfig& config, ParameterStore& store, RngState& rng);

// One GCN layer: relu(P (h w)) with P the symmetric-normalized operator
// with implicit self-loops.
NodeId gcn_layer_on_tape(Tape& tape, NodeId h, const CsrMatrix& gcn_norm, NodeId w);

// One GIN layer: FNN((A+I) h), FNN = two affine layers with relu between.
NodeId gin_layer_on_tape(Tape& tape, NodeId h, const CsrMatrix& neighbor_sum, NodeId w1,
                         NodeId b1, NodeId w2, NodeId b2);

// Full encoder; returns node ids of H^(0..L) (front is `x` itself).
std::vector<NodeId> encode_on_tape(Tape& tape, const GraphOperators& ops, NodeId x,
                                   const EncoderConfig& config, TapeBinder& binder);

// Plain-tensor entry points.
Tensor gcn_layer(const Tensor& h, const Graph& g, const Tensor& w);

struct GinLayerParams {
    Tensor w1, b1, w2, b2;
};
Tensor gin_layer(const Tensor& h, const Graph& g, const GinLayerParams& fnn);

EmbeddingStack encode(const Graph& g, const Tensor& x, const ParameterStore& store,
                      const EncoderConfig& config);

}  // namespace invgae
