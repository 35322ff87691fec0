#pragma once

#include <cstddef>
#include <cstdint>

namespace invgae::kernels {

// Raw f64 kernels behind every tensor/tape operation. Two implementations:
// a scalar reference and an AVX2 variant, selected once at startup (cpuid,
// overridable via force_backend() or INVGAE_KERNELS=scalar|avx2).
//
// Accumulation-order contract: matmul_ab, matmul_atb, spmm, spmm_t,
// col_sum and all elementwise kernels produce bitwise-identical results
// across backends (per-output operation order matches the scalar loop and
// no FMA contraction is used). matmul_abt and the reductions (sum, dot,
// sqdiff, row_sum) use lane-parallel accumulators in the AVX2 variant and
// agree with the scalar reference only up to roundoff; the equivalence
// tests pin the tolerance.
struct KernelTable {
    const char* name;

    // c = a*b           a: m x k, b: k x n, c: m x n
    void (*matmul_ab)(const double* a, const double* b, double* c, int m, int k, int n);
    // c = a^T*b         a: m x k, b: m x n, c: k x n
    void (*matmul_atb)(const double* a, const double* b, double* c, int m, int k, int n);
    // c = a*b^T         a: m x k, b: n x k, c: m x n
    void (*matmul_abt)(const double* a, const double* b, double* c, int m, int k, int n);

    // c = A*b for CSR A (rows x *), b row-major with n cols
    void (*spmm)(const int* row_ptr, const int* cols, const double* vals, int rows,
                 const double* b, double* c, int n);
    // c = A^T*g; g: rows x n, c: out_rows x n (caller zeroes c)
    void (*spmm_t)(const int* row_ptr, const int* cols, const double* vals, int rows,
                   int out_rows, const double* g, double* c, int n);

    void (*add)(const double* a, const double* b, double* c, std::size_t n);
    void (*sub)(const double* a, const double* b, double* c, std::size_t n);
    void (*mul)(const double* a, const double* b, double* c, std::size_t n);
    void (*scale)(const double* a, double s, double* c, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y[i] += s
    void (*acc_scalar)(double s, double* y, std::size_t n);
    void (*relu)(const double* a, double* c, std::size_t n);
    // out += g * (x > 0)
    void (*relu_grad_acc)(const double* x, const double* g, double* out, std::size_t n);
    void (*clamp)(const double* a, double lo, double hi, double* c, std::size_t n);
    // out += g * (lo < x < hi)
    void (*clamp_grad_acc)(const double* x, double lo, double hi, const double* g, double* out,
                           std::size_t n);
    void (*exp_)(const double* a, double* c, std::size_t n);
    void (*log_)(const double* a, double* c, std::size_t n);

    // c = a + v broadcast over rows; v: 1 x cols
    void (*add_rowvec)(const double* a, const double* v, double* c, int rows, int cols);
    // out[j] = sum_i a[i][j]; out: 1 x cols
    void (*col_sum)(const double* a, double* out, int rows, int cols);
    // out[i] = sum_j a[i][j]; out: rows x 1
    void (*row_sum)(const double* a, double* out, int rows, int cols);

    double (*sum)(const double* a, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum((a-b)^2)
    double (*sqdiff)(const double* a, const double* b, std::size_t n);
};

enum class Backend { Scalar, Avx2 };

const KernelTable& scalar_table();
// nullptr when not compiled in or not supported by this CPU
const KernelTable* avx2_table();

const KernelTable& active();
Backend active_backend();
void force_backend(Backend b);  // throws invgae::ConfigError if unavailable

}  // namespace invgae::kernels
