#include "invgae/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "invgae/common.hpp"

namespace invgae {

FdReport finite_diff_check(const LossFn& loss_fn, ParameterStore& params, double step,
                           double tolerance) {
    if (step <= 0.0) throw ShapeError("finite_diff_check: step must be positive");

    const double f0 = loss_fn(params, false).value;
    const double f0_again = loss_fn(params, false).value;
    if (f0 != f0_again)
        throw NumericError("finite_diff_check: loss_fn is not deterministic (" +
                           std::to_string(f0) + " vs " + std::to_string(f0_again) + ")");

    const GradientMap analytic = loss_fn(params, true).grads;

    FdReport report;
    report.tolerance = tolerance;
    for (const std::string& name : params.names()) {
        Tensor& theta = params.get(name);
        auto git = analytic.find(name);
        if (git == analytic.end())
            throw NumericError("finite_diff_check: no analytic gradient for '" + name + "'");
        const Tensor& grad = git->second;

        FdReport::Entry entry;
        entry.param = name;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta.data()[i];
            theta.data()[i] = saved + step;
            const double fp = loss_fn(params, false).value;
            theta.data()[i] = saved - step;
            const double fm = loss_fn(params, false).value;
            theta.data()[i] = saved;

            const double numeric = (fp - fm) / (2.0 * step);
            const double a = grad.data()[i];
            const double rel =
                std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
            if (rel >= entry.max_rel_err) {
                entry.max_rel_err = rel;
                entry.analytic_at_worst = a;
                entry.numeric_at_worst = numeric;
            }
        }
        if (entry.max_rel_err >= report.worst_rel_err) {
            report.worst_rel_err = entry.max_rel_err;
            report.worst_param = name;
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace invgae
