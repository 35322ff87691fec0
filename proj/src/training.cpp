#include "invgae/training.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace invgae {

void TrainConfig::validate() const {
    encoder.validate();
    if (lambda_nei < 0.0 || lambda_deg < 0.0)
        throw ConfigError("train: lambda weights must be >= 0");
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning rate must be > 0");
    if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (patience < 1) throw ConfigError("train: patience must be >= 1");
    if (tolerance < 0.0) throw ConfigError("train: tolerance must be >= 0");
}

bool has_converged(const std::vector<LossBreakdown>& history, double tolerance, int patience) {
    if (history.empty()) throw ShapeError("has_converged: empty history");
    double best = history.front().total;
    int streak = 0;
    for (std::size_t i = 1; i < history.size(); ++i) {
        const double cur = history[i].total;
        if (best - cur > tolerance * std::abs(best)) {
            best = cur;
            streak = 0;
        } else {
            ++streak;
        }
    }
    return streak >= patience;
}

TrainResult train_unsupervised(std::span<const Graph> graphs, std::span<const Tensor> features,
                               const TrainConfig& config, const EpochLogger& log) {
    config.validate();
    if (graphs.empty()) throw ConfigError("train: no graphs");
    if (graphs.size() != features.size())
        throw ConfigError("train: " + std::to_string(graphs.size()) + " graphs but " +
                          std::to_string(features.size()) + " feature matrices");
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        if (features[i].rows() != graphs[i].node_count())
            throw ShapeError("train: graph " + std::to_string(i) + " has " +
                             std::to_string(graphs[i].node_count()) + " nodes but " +
                             std::to_string(features[i].rows()) + " feature rows");
        if (features[i].cols() != config.encoder.dims[0])
            throw ShapeError("train: graph " + std::to_string(i) + " feature width " +
                             std::to_string(features[i].cols()) + " != C_0 = " +
                             std::to_string(config.encoder.dims[0]));
    }

    TrainResult result;
    result.rng = RngState{config.seed, 0};
    init_encoder_params(config.encoder, result.params, result.rng);
    init_decoder_params(config.encoder, config.decoder, result.params, result.rng);

    std::vector<GraphOperators> ops;
    ops.reserve(graphs.size());
    for (const Graph& g : graphs) ops.push_back(GraphOperators::build(g));

    AdamState adam(AdamConfig{config.learning_rate, 0.9, 0.999, 1e-8});

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        Tape tape;
        TapeBinder binder(tape, result.params, true);
        NodeId grand_total;
        LossBreakdown epoch_losses;
        epoch_losses.lambda_nei = config.lambda_nei;
        epoch_losses.lambda_deg = config.lambda_deg;
        for (std::size_t i = 0; i < graphs.size(); ++i) {
            const auto stack = encode_on_tape(tape, ops[i], tape.constant(features[i]),
                                              config.encoder, binder);
            const auto decoded = decode_on_tape(tape, stack, config.encoder, config.decoder,
                                                binder, NoiseSource::from_rng(&result.rng));
            const auto nodes = build_loss_on_tape(tape, stack, decoded, graphs[i], ops[i],
                                                  config.lambda_nei, config.lambda_deg);
            epoch_losses.l_self += tape.scalar_value(nodes.self);
            epoch_losses.l_nei += tape.scalar_value(nodes.nei);
            epoch_losses.l_deg += tape.scalar_value(nodes.deg);
            grand_total = i == 0 ? nodes.total : tape.add(grand_total, nodes.total);
        }
        epoch_losses.total = epoch_losses.l_self + config.lambda_nei * epoch_losses.l_nei +
                             config.lambda_deg * epoch_losses.l_deg;
        if (!std::isfinite(epoch_losses.total))
            throw NumericError("train: loss diverged to a non-finite value at epoch " +
                               std::to_string(epoch));

        result.report.history.push_back(epoch_losses);
        result.report.epochs = epoch;
        if (log) log(epoch, epoch_losses);

        const GradientMap grads = tape.backward(grand_total);
        adam.step(result.params, grads);

        if (has_converged(result.report.history, config.tolerance, config.patience)) {
            result.report.stop_reason = TrainReport::StopReason::Converged;
            break;
        }
    }

    result.stacks.reserve(graphs.size());
    for (std::size_t i = 0; i < graphs.size(); ++i)
        result.stacks.push_back(encode(graphs[i], features[i], result.params, config.encoder));
    return result;
}

TrainResult train_unsupervised(const Graph& g, const Tensor& x, const TrainConfig& config,
                               const EpochLogger& log) {
    return train_unsupervised(std::span<const Graph>(&g, 1), std::span<const Tensor>(&x, 1),
                              config, log);
}

LossFn frozen_loss_fn(const Graph& g, const Tensor& x, const TrainConfig& config,
                      std::vector<Tensor> eps_by_layer) {
    auto ops = std::make_shared<GraphOperators>(GraphOperators::build(g));
    auto eps = std::make_shared<std::vector<Tensor>>(std::move(eps_by_layer));
    return [ops, eps, g, x, config](const ParameterStore& params, bool want_grads) -> LossEval {
        Tape tape;
        TapeBinder binder(tape, params, true);
        const auto stack = encode_on_tape(tape, *ops, tape.constant(x), config.encoder, binder);
        const auto decoded = decode_on_tape(tape, stack, config.encoder, config.decoder, binder,
                                            NoiseSource::fixed(eps.get()));
        const auto nodes = build_loss_on_tape(tape, stack, decoded, g, *ops, config.lambda_nei,
                                              config.lambda_deg);
        LossEval ev;
        ev.value = tape.scalar_value(nodes.total);
        if (want_grads) ev.grads = tape.backward(nodes.total);
        return ev;
    };
}

}  // namespace invgae
