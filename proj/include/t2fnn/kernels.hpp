#pragma once

// Rule-axis arithmetic kernels.
//
// Every loop that runs over the N rules of the network goes through this
// table. There is one scalar reference implementation and one AVX2/FMA
// implementation; the active one is picked at first use from CPUID and can be
// pinned with the T2FNN_ISA environment variable ("scalar" or "avx2") or
// force_isa(). Results of the two differ only by summation order / FMA
// rounding; tests/test_kernels.cpp checks them against each other.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace t2fnn::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
    const char* name;
    double (*sum)(const double* x, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    void (*scale)(double* x, std::size_t n, double s);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // out = q * lo + (1 - q) * up
    void (*blend)(double q, const double* lo, const double* up, double* out, std::size_t n);
    // out[r] = prod_i table[index[i * n + r]], i < factors
    void (*gather_product)(const double* table, const std::uint32_t* index, std::size_t factors, double* out,
                           std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
// Only valid when isa_supported(Isa::avx2).
const KernelTable& avx2_kernels() noexcept;

bool isa_supported(Isa isa) noexcept;
Isa active_isa() noexcept;
const KernelTable& active() noexcept;
const KernelTable& kernels_for(Isa isa);

// Throws std::runtime_error when the CPU does not support the requested ISA.
void force_isa(Isa isa);
std::string_view isa_name(Isa isa) noexcept;

// Span front-ends over the active table.
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) { return active().dot(x.data(), y.data(), x.size()); }
inline void scale(std::span<double> x, double s) { active().scale(x.data(), x.size(), s); }
inline void axpy(double a, std::span<const double> x, std::span<double> y) { active().axpy(a, x.data(), y.data(), x.size()); }
inline void blend(double q, std::span<const double> lo, std::span<const double> up, std::span<double> out) {
    active().blend(q, lo.data(), up.data(), out.data(), out.size());
}

} // namespace t2fnn::simd
