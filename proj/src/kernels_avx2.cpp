// AVX2 variants. Built only on x86-64 (see CMakeLists); runtime selection
// happens in kernels_dispatch.cpp. Vectorization is across output columns
// with the same per-output operation order as the scalar reference and no
// FMA, so the bitwise-contract kernels match the scalar table exactly.
// matmul_abt and the reductions use 4-lane accumulators and match only up
// to roundoff.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "invgae/kernels.hpp"

namespace invgae::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

void v_matmul_ab(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * n;
        std::memset(ci, 0, sizeof(double) * n);
        const double* ai = a + static_cast<std::size_t>(i) * k;
        for (int p = 0; p < k; ++p) {
            const double av = ai[p];
            const __m256d avv = _mm256_set1_pd(av);
            const double* bp = b + static_cast<std::size_t>(p) * n;
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(ci + j);
                cj = _mm256_add_pd(cj, _mm256_mul_pd(avv, _mm256_loadu_pd(bp + j)));
                _mm256_storeu_pd(ci + j, cj);
            }
            for (; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void v_matmul_atb(const double* a, const double* b, double* c, int m, int k, int n) {
    std::memset(c, 0, sizeof(double) * static_cast<std::size_t>(k) * n);
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * k;
        const double* bi = b + static_cast<std::size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const double av = ai[p];
            const __m256d avv = _mm256_set1_pd(av);
            double* cp = c + static_cast<std::size_t>(p) * n;
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(cp + j);
                cj = _mm256_add_pd(cj, _mm256_mul_pd(avv, _mm256_loadu_pd(bi + j)));
                _mm256_storeu_pd(cp + j, cj);
            }
            for (; j < n; ++j) cp[j] += av * bi[j];
        }
    }
}

void v_matmul_abt(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * k;
        double* ci = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* bj = b + static_cast<std::size_t>(j) * k;
            __m256d acc = _mm256_setzero_pd();
            int p = 0;
            for (; p + 4 <= k; p += 4)
                acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(ai + p), _mm256_loadu_pd(bj + p)));
            double s = hsum(acc);
            for (; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
}

void v_spmm(const int* row_ptr, const int* cols, const double* vals, int rows, const double* b,
            double* c, int n) {
    for (int i = 0; i < rows; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * n;
        std::memset(ci, 0, sizeof(double) * n);
        for (int e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
            const double v = vals[e];
            const __m256d vv = _mm256_set1_pd(v);
            const double* br = b + static_cast<std::size_t>(cols[e]) * n;
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(ci + j);
                cj = _mm256_add_pd(cj, _mm256_mul_pd(vv, _mm256_loadu_pd(br + j)));
                _mm256_storeu_pd(ci + j, cj);
            }
            for (; j < n; ++j) ci[j] += v * br[j];
        }
    }
}

void v_spmm_t(const int* row_ptr, const int* cols, const double* vals, int rows, int /*out_rows*/,
              const double* g, double* c, int n) {
    for (int i = 0; i < rows; ++i) {
        const double* gi = g + static_cast<std::size_t>(i) * n;
        for (int e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
            const double v = vals[e];
            const __m256d vv = _mm256_set1_pd(v);
            double* cr = c + static_cast<std::size_t>(cols[e]) * n;
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(cr + j);
                cj = _mm256_add_pd(cj, _mm256_mul_pd(vv, _mm256_loadu_pd(gi + j)));
                _mm256_storeu_pd(cr + j, cj);
            }
            for (; j < n; ++j) cr[j] += v * gi[j];
        }
    }
}

void v_add(const double* a, const double* b, double* c, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) c[i] = a[i] + b[i];
}

void v_sub(const double* a, const double* b, double* c, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) c[i] = a[i] - b[i];
}

void v_mul(const double* a, const double* b, double* c, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) c[i] = a[i] * b[i];
}

void v_scale(const double* a, double s, double* c, std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_mul_pd(sv, _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) c[i] = s * a[i];
}

void v_axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yi = _mm256_loadu_pd(y + i);
        yi = _mm256_add_pd(yi, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, yi);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void v_acc_scalar(double s, double* y, std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), sv));
    for (; i < n; ++i) y[i] += s;
}

void v_relu(const double* a, double* c, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_max_pd(zero, _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) c[i] = a[i] > 0.0 ? a[i] : 0.0;
}

void v_relu_grad_acc(const double* x, const double* g, double* out, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
        const __m256d gi = _mm256_and_pd(mask, _mm256_loadu_pd(g + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), gi));
    }
    for (; i < n; ++i)
        if (x[i] > 0.0) out[i] += g[i];
}

void v_clamp(const double* a, double lo, double hi, double* c, std::size_t n) {
    const __m256d lov = _mm256_set1_pd(lo);
    const __m256d hiv = _mm256_set1_pd(hi);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_min_pd(hiv, _mm256_max_pd(lov, _mm256_loadu_pd(a + i))));
    for (; i < n; ++i) c[i] = std::min(hi, std::max(lo, a[i]));
}

void v_clamp_grad_acc(const double* x, double lo, double hi, const double* g, double* out,
                      std::size_t n) {
    const __m256d lov = _mm256_set1_pd(lo);
    const __m256d hiv = _mm256_set1_pd(hi);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x + i);
        const __m256d mask = _mm256_and_pd(_mm256_cmp_pd(xi, lov, _CMP_GT_OQ),
                                           _mm256_cmp_pd(xi, hiv, _CMP_LT_OQ));
        const __m256d gi = _mm256_and_pd(mask, _mm256_loadu_pd(g + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), gi));
    }
    for (; i < n; ++i)
        if (x[i] > lo && x[i] < hi) out[i] += g[i];
}

// exp/log stay on libm in both backends; the dispatch only exists so the
// table is complete.
void v_exp(const double* a, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = std::exp(a[i]);
}

void v_log(const double* a, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) c[i] = std::log(a[i]);
}

void v_add_rowvec(const double* a, const double* v, double* c, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * cols;
        double* ci = c + static_cast<std::size_t>(i) * cols;
        int j = 0;
        for (; j + 4 <= cols; j += 4)
            _mm256_storeu_pd(ci + j, _mm256_add_pd(_mm256_loadu_pd(ai + j), _mm256_loadu_pd(v + j)));
        for (; j < cols; ++j) ci[j] = ai[j] + v[j];
    }
}

void v_col_sum(const double* a, double* out, int rows, int cols) {
    std::memset(out, 0, sizeof(double) * cols);
    for (int i = 0; i < rows; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * cols;
        int j = 0;
        for (; j + 4 <= cols; j += 4)
            _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(ai + j)));
        for (; j < cols; ++j) out[j] += ai[j];
    }
}

void v_row_sum(const double* a, double* out, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * cols;
        __m256d acc = _mm256_setzero_pd();
        int j = 0;
        for (; j + 4 <= cols; j += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(ai + j));
        double s = hsum(acc);
        for (; j < cols; ++j) s += ai[j];
        out[i] = s;
    }
}

double v_sum(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double v_dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double v_sqdiff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

constexpr KernelTable kAvx2Table = {
    "avx2",      v_matmul_ab, v_matmul_atb,    v_matmul_abt, v_spmm,    v_spmm_t,
    v_add,       v_sub,       v_mul,           v_scale,      v_axpy,    v_acc_scalar,
    v_relu,      v_relu_grad_acc, v_clamp,     v_clamp_grad_acc, v_exp, v_log,
    v_add_rowvec, v_col_sum,  v_row_sum,       v_sum,        v_dot,     v_sqdiff,
};

}  // namespace

const KernelTable* avx2_table_impl() { return &kAvx2Table; }

}  // namespace invgae::kernels
