#pragma once

#include <vector>

#include "invgae/encoder.hpp"
#include "invgae/graph.hpp"
#include "invgae/params.hpp"
#include "invgae/rng.hpp"
#include "invgae/tape.hpp"

namespace invgae {

// Decoder that inverts the encoder's aggregation: walking the embedding
// stack top-down, each layer reconstructs the previous layer's
// self-embedding distribution (mean/log-std FNNs + reparameterized sample),
// the node degree, and feeds the sample forward as the next prior mean.
struct DecoderConfig {
    // hidden width of every decoder FNN; 0 means "match the FNN's input
    // width C_{l+1}" (the encoder width, for uniform encoders)
    int hidden = 0;
    double log_sigma_min = -10.0;
    double log_sigma_max = 10.0;

    int hidden_for(const EncoderConfig& enc, int layer) const {
        return hidden > 0 ? hidden : enc.dims[layer + 1];
    }
};

// Parameter names, for l = L-1..0:
//   dec.l<l>.mu.{w1,b1,w2,b2}     C_{l+1} -> hidden -> C_l
//   dec.l<l>.sigma.{w1,b1,w2,b2}  C_{l+1} -> hidden -> C_l   (log-std)
//   dec.l<l>.deg.{w1,b1,w2,b2}    C_{l+1} -> hidden -> 1
//   dec.l<l>.prior.{w1,b1,w2,b2}  C_l -> hidden -> C_{l-1}   (l >= 1 only)
void init_decoder_params(const EncoderConfig& enc, const DecoderConfig& dec,
                         ParameterStore& store, RngState& rng);

// Per-layer noise for the reparameterized samples: either drawn from an rng
// (training) or injected tensors (tests). Draw order is layer L-1 first.
class NoiseSource {
public:
    static NoiseSource from_rng(RngState* rng) {
        NoiseSource n;
        n.rng_ = rng;
        return n;
    }
    static NoiseSource fixed(const std::vector<Tensor>* eps_by_layer) {
        NoiseSource n;
        n.fixed_ = eps_by_layer;
        return n;
    }

    Tensor draw(int layer, int rows, int cols);

private:
    RngState* rng_ = nullptr;
    const std::vector<Tensor>* fixed_ = nullptr;
};

// Vectors are indexed by layer l = 0..L-1.
struct DecodeTapeResult {
    std::vector<NodeId> mu;         // FNN_mu(H^(l+1))
    std::vector<NodeId> log_sigma;  // clamped FNN_sigma(H^(l+1))
    std::vector<NodeId> sigma;      // exp(log_sigma)
    std::vector<NodeId> mu_prior;   // prior mean (0 at l = L-1)
    std::vector<NodeId> q_mean;     // mu_prior + mu
    std::vector<NodeId> z;          // q_mean + sigma .* eps
    std::vector<NodeId> deg_pred;   // relu(FNN_deg(H^(l+1))), N x 1
};

DecodeTapeResult decode_on_tape(Tape& tape, const std::vector<NodeId>& stack,
                                const EncoderConfig& enc, const DecoderConfig& dec,
                                TapeBinder& binder, NoiseSource noise);

// Two affine layers with relu between; names under `prefix` as above.
NodeId fnn2_on_tape(Tape& tape, NodeId input, const std::string& prefix, TapeBinder& binder);

struct DecoderOutputs {
    std::vector<Tensor> mu, sigma, z, mu_prior, deg_pred;

    int num_layers() const { return static_cast<int>(mu.size()); }
};

DecoderOutputs decode(const EmbeddingStack& stack, const EncoderConfig& enc,
                      const DecoderConfig& dec, const ParameterStore& store, RngState& rng);
DecoderOutputs decode_with_noise(const EmbeddingStack& stack, const EncoderConfig& enc,
                                 const DecoderConfig& dec, const ParameterStore& store,
                                 const std::vector<Tensor>& eps_by_layer);

struct LossBreakdown {
    double l_self = 0.0;
    double l_nei = 0.0;
    double l_deg = 0.0;
    double total = 0.0;
    double lambda_nei = 0.0;
    double lambda_deg = 0.0;
};

// sum_l sum_i ||h_i^(l) - z_i^(l)||^2, l = 0..L-1
double loss_self(const EmbeddingStack& stack, const DecoderOutputs& outputs);

// row i = (h_i + sum_{j in N(i)} h_j) / (d_i + 1)
Tensor neighborhood_posterior_mean(const Tensor& h, const Graph& g);

// Per-row KL between diagonal Gaussians:
// 1/2 sum_d [ (mq-mp)^2/sp^2 + sq^2/sp^2 + 2(ln sp - ln sq) - 1 ]
Tensor kl_diag_gaussian(const Tensor& mu_q, const Tensor& sigma_q, const Tensor& mu_p,
                        const Tensor& sigma_p);

// sum_l sum_i KL[ N(q_mean_i, diag sigma_i^2) || N(m_i^(l), I) ]
double loss_nei(const DecoderOutputs& outputs, const EmbeddingStack& stack, const Graph& g);

// sum_l sum_i (d_i - dhat_i^(l))^2
double loss_deg(const Graph& g, const DecoderOutputs& outputs);

LossBreakdown total_loss(const EmbeddingStack& stack, const DecoderOutputs& outputs,
                         const Graph& g, double lambda_nei, double lambda_deg);

struct LossTapeNodes {
    NodeId self;
    NodeId nei;
    NodeId deg;
    NodeId total;
};

LossTapeNodes build_loss_on_tape(Tape& tape, const std::vector<NodeId>& stack,
                                 const DecodeTapeResult& decoded, const Graph& g,
                                 const GraphOperators& ops, double lambda_nei,
                                 double lambda_deg);

LossBreakdown loss_breakdown_from_tape(const Tape& tape, const LossTapeNodes& nodes,
                                       double lambda_nei, double lambda_deg);

}  // namespace invgae
