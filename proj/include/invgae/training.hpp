#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "invgae/decoder.hpp"
#include "invgae/encoder.hpp"
#include "invgae/gradcheck.hpp"
#include "invgae/optim.hpp"

namespace invgae {

struct TrainConfig {
    EncoderConfig encoder;
    DecoderConfig decoder;
    double lambda_nei = 0.1;
    double lambda_deg = 1.0;
    double learning_rate = 1e-3;
    int max_epochs = 500;
    int patience = 20;
    double tolerance = 1e-4;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainReport {
    enum class StopReason { Converged, MaxEpochs };

    std::vector<LossBreakdown> history;  // one entry per executed epoch
    int epochs = 0;
    StopReason stop_reason = StopReason::MaxEpochs;
};

struct TrainResult {
    ParameterStore params;
    // final embeddings, one stack per input graph, recomputed without
    // decoder sampling noise (the encoder path is deterministic)
    std::vector<EmbeddingStack> stacks;
    TrainReport report;
    RngState rng;  // state after training, for checkpointing
};

// True iff the best total loss has not improved by more than `tolerance`
// (relative) for `patience` consecutive epochs.
bool has_converged(const std::vector<LossBreakdown>& history, double tolerance, int patience);

using EpochLogger = std::function<void(int epoch, const LossBreakdown&)>;

// Optimization loop: encode -> decode -> losses -> backward -> Adam step,
// full batch, per epoch; multi-graph inputs sum losses over graphs.
// Throws NumericError naming the epoch if the total loss becomes
// non-finite.
TrainResult train_unsupervised(std::span<const Graph> graphs, std::span<const Tensor> features,
                               const TrainConfig& config, const EpochLogger& log = {});
TrainResult train_unsupervised(const Graph& g, const Tensor& x, const TrainConfig& config,
                               const EpochLogger& log = {});

// The full reconstruction loss as a deterministic evaluator with frozen
// decoder noise, for finite-difference verification.
LossFn frozen_loss_fn(const Graph& g, const Tensor& x, const TrainConfig& config,
                      std::vector<Tensor> eps_by_layer);

}  // namespace invgae
