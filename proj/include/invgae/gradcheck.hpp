#pragma once

#include <functional>
#include <string>
#include <vector>

#include "invgae/params.hpp"
#include "invgae/tape.hpp"

namespace invgae {

struct LossEval {
    double value = 0.0;
    GradientMap grads;  // filled only when requested
};

// Evaluates the loss at the store's current parameter values. Must be
// deterministic for fixed parameters (freeze any sampling noise outside).
using LossFn = std::function<LossEval(const ParameterStore&, bool want_grads)>;

struct FdReport {
    struct Entry {
        std::string param;
        double max_rel_err = 0.0;
        double analytic_at_worst = 0.0;
        double numeric_at_worst = 0.0;
    };
    std::vector<Entry> entries;
    double worst_rel_err = 0.0;
    std::string worst_param;
    double tolerance = 0.0;

    bool passed() const { return worst_rel_err < tolerance; }
};

// Central finite differences against reverse-mode gradients for every
// parameter entry. Relative error is |a-n| / max(1, |a|, |n|): central
// differences at step h carry an absolute noise floor of about
// eps*|f|/h, so a pure ratio is meaningless for near-zero entries.
// Throws NumericError if loss_fn is not deterministic (two evaluations at
// the same point disagree bitwise).
FdReport finite_diff_check(const LossFn& loss_fn, ParameterStore& params, double step,
                           double tolerance);

}  // namespace invgae
