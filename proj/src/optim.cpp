#include "invgae/optim.hpp"

#include <cmath>

namespace invgae {

void AdamState::step(ParameterStore& params, const GradientMap& grads) {
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (const std::string& name : params.names()) {
        Tensor& theta = params.get(name);
        auto [it, inserted] = moments_.try_emplace(name);
        if (inserted) {
            it->second.m = Tensor(theta.rows(), theta.cols());
            it->second.v = Tensor(theta.rows(), theta.cols());
        }
        Tensor& m = it->second.m;
        Tensor& v = it->second.v;
        if (!theta.same_shape(m))
            throw ShapeError("adam_step: parameter '" + name + "' changed shape");
        auto git = grads.find(name);
        if (git != grads.end()) {
            require_same_shape(theta, git->second, "adam_step");
            const double* g = git->second.data();
            for (std::size_t i = 0; i < theta.size(); ++i) {
                m.data()[i] = cfg_.beta1 * m.data()[i] + (1.0 - cfg_.beta1) * g[i];
                v.data()[i] = cfg_.beta2 * v.data()[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            }
        } else {
            for (std::size_t i = 0; i < theta.size(); ++i) {
                m.data()[i] *= cfg_.beta1;
                v.data()[i] *= cfg_.beta2;
            }
        }
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double mhat = m.data()[i] / bc1;
            const double vhat = v.data()[i] / bc2;
            theta.data()[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

}  // namespace invgae
