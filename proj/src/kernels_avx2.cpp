// Built with -mavx2 -mfma; only reached through the dispatcher after a CPUID check.

#include "t2fnn/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace t2fnn::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += x[i];
    return acc;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

void scale_avx2(double* x, std::size_t n, double s) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
    for (; i < n; ++i)
        x[i] *= s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i)
        y[i] += a * x[i];
}

void blend_avx2(double q, const double* lo, const double* up, double* out, std::size_t n) {
    const double p = 1.0 - q;
    const __m256d vq = _mm256_set1_pd(q);
    const __m256d vp = _mm256_set1_pd(p);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(vp, _mm256_loadu_pd(up + i));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vq, _mm256_loadu_pd(lo + i), u));
    }
    for (; i < n; ++i)
        out[i] = q * lo[i] + p * up[i];
}

void gather_product_avx2(const double* table, const std::uint32_t* index, std::size_t factors, double* out,
                         std::size_t n) {
    std::size_t r = 0;
    for (; r + 4 <= n; r += 4) {
        __m256d p = _mm256_set1_pd(1.0);
        for (std::size_t i = 0; i < factors; ++i) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(index + i * n + r));
            p = _mm256_mul_pd(p, _mm256_i32gather_pd(table, idx, 8));
        }
        _mm256_storeu_pd(out + r, p);
    }
    for (; r < n; ++r) {
        double p = 1.0;
        for (std::size_t i = 0; i < factors; ++i)
            p *= table[index[i * n + r]];
        out[r] = p;
    }
}

} // namespace

const KernelTable& avx2_kernels() noexcept {
    static const KernelTable table{"avx2",    sum_avx2,   dot_avx2,           scale_avx2,
                                   axpy_avx2, blend_avx2, gather_product_avx2};
    return table;
}

} // namespace t2fnn::simd

#else

namespace t2fnn::simd {
// Non-x86 builds never report AVX2 support, so this is never selected.
const KernelTable& avx2_kernels() noexcept { return scalar_kernels(); }
} // namespace t2fnn::simd

#endif
