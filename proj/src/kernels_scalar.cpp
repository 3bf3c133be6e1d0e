#include "t2fnn/kernels.hpp"

namespace t2fnn::simd {
namespace {

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i];
    return acc;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

void scale_scalar(double* x, std::size_t n, double s) {
    for (std::size_t i = 0; i < n; ++i)
        x[i] *= s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

void blend_scalar(double q, const double* lo, const double* up, double* out, std::size_t n) {
    const double p = 1.0 - q;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = q * lo[i] + p * up[i];
}

void gather_product_scalar(const double* table, const std::uint32_t* index, std::size_t factors, double* out,
                           std::size_t n) {
    for (std::size_t r = 0; r < n; ++r) {
        double p = 1.0;
        for (std::size_t i = 0; i < factors; ++i)
            p *= table[index[i * n + r]];
        out[r] = p;
    }
}

} // namespace

const KernelTable& scalar_kernels() noexcept {
    static const KernelTable table{"scalar",     sum_scalar,   dot_scalar,           scale_scalar,
                                   axpy_scalar, blend_scalar, gather_product_scalar};
    return table;
}

} // namespace t2fnn::simd
