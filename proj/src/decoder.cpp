#include "invgae/decoder.hpp"

#include <cmath>
#include <string>

#include "invgae/kernels.hpp"

namespace invgae {

void init_decoder_params(const EncoderConfig& enc, const DecoderConfig& dec,
                         ParameterStore& store, RngState& rng) {
    enc.validate();
    const int L = enc.num_layers();
    auto add_fnn = [&](const std::string& prefix, int in, int hid, int out) {
        store.add(prefix + ".w1", glorot_uniform(in, hid, rng));
        store.add(prefix + ".b1", Tensor(1, hid));
        store.add(prefix + ".w2", glorot_uniform(hid, out, rng));
        store.add(prefix + ".b2", Tensor(1, out));
    };
    for (int l = L - 1; l >= 0; --l) {
        const std::string base = "dec.l" + std::to_string(l) + ".";
        const int hid = dec.hidden_for(enc, l);
        add_fnn(base + "mu", enc.dims[l + 1], hid, enc.dims[l]);
        add_fnn(base + "sigma", enc.dims[l + 1], hid, enc.dims[l]);
        add_fnn(base + "deg", enc.dims[l + 1], hid, 1);
        if (l >= 1) add_fnn(base + "prior", enc.dims[l], hid, enc.dims[l - 1]);
    }
}

Tensor NoiseSource::draw(int layer, int rows, int cols) {
    if (rng_) return sample_standard_normal(rows, cols, *rng_);
    if (!fixed_) throw ConfigError("NoiseSource: not initialized");
    if (layer < 0 || layer >= static_cast<int>(fixed_->size()))
        throw ShapeError("NoiseSource: no injected noise for layer " + std::to_string(layer));
    const Tensor& eps = (*fixed_)[layer];
    if (eps.rows() != rows || eps.cols() != cols)
        throw ShapeError("NoiseSource: injected noise " + eps.shape_str() + " for layer " +
                         std::to_string(layer) + ", expected (" + std::to_string(rows) + "x" +
                         std::to_string(cols) + ")");
    return eps;
}

NodeId fnn2_on_tape(Tape& tape, NodeId input, const std::string& prefix, TapeBinder& binder) {
    const NodeId hidden = tape.relu(
        tape.add_rowvec(tape.matmul(input, binder.leaf(prefix + ".w1")), binder.leaf(prefix + ".b1")));
    return tape.add_rowvec(tape.matmul(hidden, binder.leaf(prefix + ".w2")),
                           binder.leaf(prefix + ".b2"));
}

DecodeTapeResult decode_on_tape(Tape& tape, const std::vector<NodeId>& stack,
                                const EncoderConfig& enc, const DecoderConfig& dec,
                                TapeBinder& binder, NoiseSource noise) {
    const int L = enc.num_layers();
    if (static_cast<int>(stack.size()) != L + 1)
        throw ShapeError("decode: stack has " + std::to_string(stack.size()) +
                         " layers, expected " + std::to_string(L + 1));
    const int n = tape.value(stack[0]).rows();

    DecodeTapeResult r;
    r.mu.resize(L);
    r.log_sigma.resize(L);
    r.sigma.resize(L);
    r.mu_prior.resize(L);
    r.q_mean.resize(L);
    r.z.resize(L);
    r.deg_pred.resize(L);

    NodeId next_prior;  // invalid at the top layer
    for (int l = L - 1; l >= 0; --l) {
        const std::string base = "dec.l" + std::to_string(l) + ".";
        const NodeId h_above = stack[l + 1];
        if (tape.value(h_above).cols() != enc.dims[l + 1])
            throw ShapeError("decode: H^(" + std::to_string(l + 1) + ") has width " +
                             std::to_string(tape.value(h_above).cols()) + ", expected " +
                             std::to_string(enc.dims[l + 1]));

        r.mu[l] = fnn2_on_tape(tape, h_above, base + "mu", binder);
        r.log_sigma[l] = tape.clamp(fnn2_on_tape(tape, h_above, base + "sigma", binder),
                                    dec.log_sigma_min, dec.log_sigma_max);
        r.sigma[l] = tape.exp(r.log_sigma[l]);
        r.deg_pred[l] = tape.relu(fnn2_on_tape(tape, h_above, base + "deg", binder));

        r.mu_prior[l] = next_prior.valid() ? next_prior : tape.constant(Tensor(n, enc.dims[l]));
        r.q_mean[l] = tape.add(r.mu_prior[l], r.mu[l]);
        const NodeId eps = tape.constant(noise.draw(l, n, enc.dims[l]));
        r.z[l] = tape.add(r.q_mean[l], tape.elementwise_mul(r.sigma[l], eps));

        if (l >= 1) next_prior = fnn2_on_tape(tape, r.z[l], base + "prior", binder);
    }
    return r;
}

namespace {

DecoderOutputs run_decode(const EmbeddingStack& stack, const EncoderConfig& enc,
                          const DecoderConfig& dec, const ParameterStore& store,
                          NoiseSource noise) {
    Tape tape;
    TapeBinder binder(tape, store, false);
    std::vector<NodeId> ids;
    ids.reserve(stack.layers.size());
    for (const Tensor& h : stack.layers) ids.push_back(tape.constant(h));
    const DecodeTapeResult r = decode_on_tape(tape, ids, enc, dec, binder, noise);
    DecoderOutputs out;
    const int L = enc.num_layers();
    for (int l = 0; l < L; ++l) {
        out.mu.push_back(tape.value(r.mu[l]));
        out.sigma.push_back(tape.value(r.sigma[l]));
        out.z.push_back(tape.value(r.z[l]));
        out.mu_prior.push_back(tape.value(r.mu_prior[l]));
        out.deg_pred.push_back(tape.value(r.deg_pred[l]));
    }
    return out;
}

}  // namespace

DecoderOutputs decode(const EmbeddingStack& stack, const EncoderConfig& enc,
                      const DecoderConfig& dec, const ParameterStore& store, RngState& rng) {
    return run_decode(stack, enc, dec, store, NoiseSource::from_rng(&rng));
}

DecoderOutputs decode_with_noise(const EmbeddingStack& stack, const EncoderConfig& enc,
                                 const DecoderConfig& dec, const ParameterStore& store,
                                 const std::vector<Tensor>& eps_by_layer) {
    return run_decode(stack, enc, dec, store, NoiseSource::fixed(&eps_by_layer));
}

double loss_self(const EmbeddingStack& stack, const DecoderOutputs& outputs) {
    const int L = outputs.num_layers();
    if (stack.num_layers() != L)
        throw ShapeError("loss_self: stack/output layer count mismatch");
    double total = 0.0;
    for (int l = 0; l < L; ++l) {
        require_same_shape(stack.layers[l], outputs.z[l], "loss_self");
        total += kernels::active().sqdiff(stack.layers[l].data(), outputs.z[l].data(),
                                          stack.layers[l].size());
    }
    return total;
}

Tensor neighborhood_posterior_mean(const Tensor& h, const Graph& g) {
    if (h.rows() != g.node_count())
        throw ShapeError("neighborhood_posterior_mean: " + std::to_string(h.rows()) +
                         " rows for " + std::to_string(g.node_count()) + " nodes");
    Tensor m(h.rows(), h.cols());
    for (int i = 0; i < g.node_count(); ++i) {
        auto out = m.row(i);
        auto self = h.row(i);
        for (int c = 0; c < h.cols(); ++c) out[c] = self[c];
        for (int j : g.neighbors(i)) {
            auto nbr = h.row(j);
            for (int c = 0; c < h.cols(); ++c) out[c] += nbr[c];
        }
        const double inv = 1.0 / (static_cast<double>(g.degree(i)) + 1.0);
        for (int c = 0; c < h.cols(); ++c) out[c] *= inv;
    }
    return m;
}

Tensor kl_diag_gaussian(const Tensor& mu_q, const Tensor& sigma_q, const Tensor& mu_p,
                        const Tensor& sigma_p) {
    require_same_shape(mu_q, sigma_q, "kl_diag_gaussian");
    require_same_shape(mu_q, mu_p, "kl_diag_gaussian");
    require_same_shape(mu_q, sigma_p, "kl_diag_gaussian");
    for (std::size_t i = 0; i < sigma_q.size(); ++i)
        if (sigma_q.data()[i] <= 0.0 || sigma_p.data()[i] <= 0.0)
            throw NumericError("kl_diag_gaussian: non-positive sigma entry");
    Tensor out(mu_q.rows(), 1);
    for (int r = 0; r < mu_q.rows(); ++r) {
        double acc = 0.0;
        for (int c = 0; c < mu_q.cols(); ++c) {
            const double dm = mu_q.at(r, c) - mu_p.at(r, c);
            const double sq = sigma_q.at(r, c);
            const double sp = sigma_p.at(r, c);
            acc += dm * dm / (sp * sp) + (sq * sq) / (sp * sp) +
                   2.0 * (std::log(sp) - std::log(sq)) - 1.0;
        }
        out.at(r, 0) = 0.5 * acc;
    }
    return out;
}

double loss_nei(const DecoderOutputs& outputs, const EmbeddingStack& stack, const Graph& g) {
    const int L = outputs.num_layers();
    if (stack.num_layers() != L)
        throw ShapeError("loss_nei: stack/output layer count mismatch");
    double total = 0.0;
    for (int l = 0; l < L; ++l) {
        Tensor q_mean(outputs.mu[l].rows(), outputs.mu[l].cols());
        kernels::active().add(outputs.mu_prior[l].data(), outputs.mu[l].data(), q_mean.data(),
                              q_mean.size());
        const Tensor m = neighborhood_posterior_mean(stack.layers[l], g);
        const Tensor ones = Tensor::filled(m.rows(), m.cols(), 1.0);
        const Tensor kl = kl_diag_gaussian(q_mean, outputs.sigma[l], m, ones);
        total += kernels::active().sum(kl.data(), kl.size());
    }
    return total;
}

double loss_deg(const Graph& g, const DecoderOutputs& outputs) {
    double total = 0.0;
    for (int l = 0; l < outputs.num_layers(); ++l) {
        const Tensor& dhat = outputs.deg_pred[l];
        if (dhat.rows() != g.node_count() || dhat.cols() != 1)
            throw ShapeError("loss_deg: degree predictions " + dhat.shape_str() + " for " +
                             std::to_string(g.node_count()) + " nodes");
        for (int i = 0; i < g.node_count(); ++i) {
            const double d = static_cast<double>(g.degree(i)) - dhat.at(i, 0);
            total += d * d;
        }
    }
    return total;
}

LossBreakdown total_loss(const EmbeddingStack& stack, const DecoderOutputs& outputs,
                         const Graph& g, double lambda_nei, double lambda_deg) {
    if (!std::isfinite(lambda_nei) || !std::isfinite(lambda_deg))
        throw ConfigError("total_loss: lambda weights must be finite");
    LossBreakdown b;
    b.lambda_nei = lambda_nei;
    b.lambda_deg = lambda_deg;
    b.l_self = loss_self(stack, outputs);
    b.l_nei = loss_nei(outputs, stack, g);
    b.l_deg = loss_deg(g, outputs);
    b.total = b.l_self + lambda_nei * b.l_nei + lambda_deg * b.l_deg;
    return b;
}

LossTapeNodes build_loss_on_tape(Tape& tape, const std::vector<NodeId>& stack,
                                 const DecodeTapeResult& decoded, const Graph& g,
                                 const GraphOperators& ops, double lambda_nei,
                                 double lambda_deg) {
    if (!std::isfinite(lambda_nei) || !std::isfinite(lambda_deg))
        throw ConfigError("total_loss: lambda weights must be finite");
    const int L = static_cast<int>(decoded.z.size());

    Tensor deg_target(g.node_count(), 1);
    for (int i = 0; i < g.node_count(); ++i)
        deg_target.at(i, 0) = static_cast<double>(g.degree(i));
    const NodeId deg_const = tape.constant(std::move(deg_target));

    NodeId self_total, nei_total, deg_total;
    for (int l = 0; l < L; ++l) {
        const NodeId self_l = tape.squared_frobenius(stack[l], decoded.z[l]);
        self_total = l == 0 ? self_l : tape.add(self_total, self_l);

        // KL against N(m, I): 1/2 ||q_mean - m||^2 + 1/2 sum(sigma^2)
        //                     - sum(log sigma) - N*C/2
        const NodeId m = tape.spmm(ops.neighborhood_mean, stack[l]);
        const Tensor& mu_v = tape.value(decoded.q_mean[l]);
        const double half_nc = 0.5 * static_cast<double>(mu_v.rows()) * mu_v.cols();
        NodeId nei_l = tape.scale(tape.squared_frobenius(decoded.q_mean[l], m), 0.5);
        nei_l = tape.add(nei_l, tape.scale(tape.sum(tape.elementwise_mul(decoded.sigma[l],
                                                                         decoded.sigma[l])),
                                           0.5));
        nei_l = tape.add(nei_l, tape.scale(tape.sum(decoded.log_sigma[l]), -1.0));
        nei_l = tape.add(nei_l, tape.scalar_constant(-half_nc));
        nei_total = l == 0 ? nei_l : tape.add(nei_total, nei_l);

        const NodeId deg_l = tape.squared_frobenius(decoded.deg_pred[l], deg_const);
        deg_total = l == 0 ? deg_l : tape.add(deg_total, deg_l);
    }

    LossTapeNodes nodes;
    nodes.self = self_total;
    nodes.nei = nei_total;
    nodes.deg = deg_total;
    // association matches the LossBreakdown identity bitwise
    nodes.total = tape.add(tape.add(self_total, tape.scale(nei_total, lambda_nei)),
                           tape.scale(deg_total, lambda_deg));
    return nodes;
}

LossBreakdown loss_breakdown_from_tape(const Tape& tape, const LossTapeNodes& nodes,
                                       double lambda_nei, double lambda_deg) {
    LossBreakdown b;
    b.l_self = tape.scalar_value(nodes.self);
    b.l_nei = tape.scalar_value(nodes.nei);
    b.l_deg = tape.scalar_value(nodes.deg);
    b.lambda_nei = lambda_nei;
    b.lambda_deg = lambda_deg;
    b.total = b.l_self + lambda_nei * b.l_nei + lambda_deg * b.l_deg;
    return b;
}

}  // namespace invgae
