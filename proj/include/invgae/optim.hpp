#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "invgae/params.hpp"
#include "invgae/tape.hpp"

namespace invgae {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam. Moments are keyed by parameter name and created on
// first use with the parameter's shape.
class AdamState {
public:
    AdamState() = default;
    explicit AdamState(AdamConfig cfg) : cfg_(cfg) {}

    const AdamConfig& config() const { return cfg_; }
    std::int64_t step_count() const { return step_; }

    // One update over every parameter in the store; parameters missing from
    // `grads` are treated as zero-gradient (moments still decay).
    void step(ParameterStore& params, const GradientMap& grads);

private:
    struct Moments {
        Tensor m;
        Tensor v;
    };

    AdamConfig cfg_;
    std::int64_t step_ = 0;
    std::unordered_map<std::string, Moments> moments_;
};

}  // namespace invgae
