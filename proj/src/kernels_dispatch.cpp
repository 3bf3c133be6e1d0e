#include "t2fnn/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace t2fnn::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() noexcept {
    if (const char* env = std::getenv("T2FNN_ISA")) {
        const std::string want(env);
        if (want == "scalar")
            return Isa::scalar;
        if (want == "avx2" && cpu_has_avx2())
            return Isa::avx2;
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<const KernelTable*>& slot() noexcept {
    static std::atomic<const KernelTable*> table{nullptr};
    return table;
}

} // namespace

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
        return cpu_has_avx2();
    }
    return false;
}

const KernelTable& kernels_for(Isa isa) {
    if (!isa_supported(isa))
        throw std::runtime_error("ISA not supported on this CPU: " + std::string(isa_name(isa)));
    return isa == Isa::avx2 ? avx2_kernels() : scalar_kernels();
}

const KernelTable& active() noexcept {
    const KernelTable* t = slot().load(std::memory_order_acquire);
    if (t == nullptr) {
        t = detect() == Isa::avx2 ? &avx2_kernels() : &scalar_kernels();
        slot().store(t, std::memory_order_release);
    }
    return *t;
}

Isa active_isa() noexcept { return &active() == &scalar_kernels() ? Isa::scalar : Isa::avx2; }

void force_isa(Isa isa) { slot().store(&kernels_for(isa), std::memory_order_release); }

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

} // namespace t2fnn::simd
