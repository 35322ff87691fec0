#include <algorithm>
#include <cmath>
#include <cstring>

#include "invgae/kernels.hpp"

// Reference implementations. The loop nests here define the canonical
// accumulation order that the AVX2 variants of the bitwise-contract
// kernels must reproduce exactly.

namespace invgae::kernels {
namespace {

void s_matmul_ab(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * n;
        std::memset(ci, 0, sizeof(double) * n);
        const double* ai = a + static_cast<std::size_t>(i) * k;
        for (int p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = b + static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void s_matmul_atb(const double* a, const double* b, double* c, int m, int k, int n) {
    std::memset(c, 0, sizeof(double) * static_cast<std::size_t>(k) * n);
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * k;
        const double* bi = b + static_cast<std::size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const double av = ai[p];
            double* cp = c + static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) cp[j] += av * bi[j];
        }
    }
}

void s_matmul_abt(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * k;
        double* ci = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* bj = b + static_cast<std::size_t>(j) * k;
            double acc = 0.0;
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] = acc;
        }
    }
}

void s_spmm(const int* row_ptr, const int* cols, const double* vals, int rows, const double* b,
            double* c, int n) {
    for (int i = 0; i < rows; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * n;
        std::memset(ci, 0, sizeof(double) * n);
        for (int e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
            const double v = vals[e];
            const double* br = b + static_cast<std::size_t>(cols[e]) * n;
            for (int j = 0; j < n; ++j) ci[j] += v * br[j];
        }
    }
}

void s_spmm_t(const int* row_ptr, const int* cols, const double* vals, int rows, int /*out_rows*/,
              const double* g, double* c, int n) {
    for (int i = 0; i < rows; ++i) {
        const double* gi = g + static_cast<std::size_t>(i) * n;
        for (int e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
            const double v = vals[e];
            double* cr = c + static_cast<std::size_t>(cols[e]) * n;
            for (int j = 0; j < n; ++j) cr[j] += v * gi[j];
        }
    }
}

void s_add(const double* a, const double* b, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = a[i] + b[i];
}

void s_sub(const double* a, const double* b, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = a[i] - b[i];
}

void s_mul(const double* a, const double* b, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = a[i] * b[i];
}

void s_scale(const double* a, double s, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = s * a[i];
}

void s_axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void s_acc_scalar(double s, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += s;
}

void s_relu(const double* a, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = a[i] > 0.0 ? a[i] : 0.0;
}

void s_relu_grad_acc(const double* x, const double* g, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] > 0.0) out[i] += g[i];
}

void s_clamp(const double* a, double lo, double hi, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = std::min(hi, std::max(lo, a[i]));
}

void s_clamp_grad_acc(const double* x, double lo, double hi, const double* g, double* out,
                      std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] > lo && x[i] < hi) out[i] += g[i];
}

void s_exp(const double* a, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = std::exp(a[i]);
}

void s_log(const double* a, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = std::log(a[i]);
}

void s_add_rowvec(const double* a, const double* v, double* c, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * cols;
        double* ci = c + static_cast<std::size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) ci[j] = ai[j] + v[j];
    }
}

void s_col_sum(const double* a, double* out, int rows, int cols) {
    std::memset(out, 0, sizeof(double) * cols);
    for (int i = 0; i < rows; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) out[j] += ai[j];
    }
}

void s_row_sum(const double* a, double* out, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * cols;
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) acc += ai[j];
        out[i] = acc;
    }
}

double s_sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double s_dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double s_sqdiff(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

constexpr KernelTable kScalarTable = {
    "scalar",    s_matmul_ab, s_matmul_atb,    s_matmul_abt, s_spmm,    s_spmm_t,
    s_add,       s_sub,       s_mul,           s_scale,      s_axpy,    s_acc_scalar,
    s_relu,      s_relu_grad_acc, s_clamp,     s_clamp_grad_acc, s_exp, s_log,
    s_add_rowvec, s_col_sum,  s_row_sum,       s_sum,        s_dot,     s_sqdiff,
};

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }

}  // namespace invgae::kernels
