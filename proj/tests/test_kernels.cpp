#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "t2fnn/kernels.hpp"
#include "t2fnn/network.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace t2fnn;
using t2fnn::testing::Rng;

namespace {

std::vector<double> rand_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v)
        x = rng.uniform(-3.0, 3.0);
    return v;
}

bool have_avx2() { return simd::isa_supported(simd::Isa::avx2); }

// Reference sums accumulate in long double so both ISAs are judged against
// the same thing rather than against each other.
long double exact_dot(const std::vector<double>& x, const std::vector<double>& y) {
    long double acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += static_cast<long double>(x[i]) * y[i];
    return acc;
}

} // namespace

TEST_CASE("scalar kernels match plain loops") {
    const auto& k = simd::scalar_kernels();
    Rng rng(1);
    for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 27u, 64u, 81u}) {
        auto x = rand_vec(rng, n), y = rand_vec(rng, n);
        CHECK(k.sum(x.data(), n) == doctest::Approx(std::accumulate(x.begin(), x.end(), 0.0)).epsilon(1e-14));
        CHECK(static_cast<long double>(k.dot(x.data(), y.data(), n)) ==
              doctest::Approx(static_cast<double>(exact_dot(x, y))).epsilon(1e-13));
        auto z = y;
        k.axpy(0.5, x.data(), z.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(z[i] == y[i] + 0.5 * x[i]);
        std::vector<double> out(n);
        k.blend(0.25, x.data(), y.data(), out.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(out[i] == doctest::Approx(0.25 * x[i] + 0.75 * y[i]));
    }
}

TEST_CASE("gather_product walks the input-major index table") {
    const std::vector<double> table{2.0, 3.0, 5.0, 7.0};
    // two factors, three outputs
    const std::vector<std::uint32_t> index{0, 1, 2, 3, 3, 0};
    std::vector<double> out(3);
    simd::scalar_kernels().gather_product(table.data(), index.data(), 2, out.data(), 3);
    CHECK(out == std::vector<double>{14.0, 21.0, 10.0});
}

TEST_CASE("avx2 kernels agree with scalar kernels") {
    if (!have_avx2()) {
        MESSAGE("AVX2 not available on this CPU; skipping");
        return;
    }
    const auto& s = simd::scalar_kernels();
    const auto& v = simd::avx2_kernels();
    Rng rng(2);
    for (std::size_t n = 0; n <= 100; ++n) {
        auto x = rand_vec(rng, n), y = rand_vec(rng, n);
        const double scale = 1.0 + std::sqrt(static_cast<double>(n)) * 9.0;
        CHECK(std::abs(s.sum(x.data(), n) - v.sum(x.data(), n)) <= 1e-13 * scale);
        CHECK(std::abs(s.dot(x.data(), y.data(), n) - v.dot(x.data(), y.data(), n)) <= 1e-13 * scale);

        auto a1 = y, a2 = y;
        s.axpy(-1.7, x.data(), a1.data(), n);
        v.axpy(-1.7, x.data(), a2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(a1[i] - a2[i]) <= 1e-14 * 8);

        auto s1 = x, s2 = x;
        s.scale(s1.data(), n, 0.3);
        v.scale(s2.data(), n, 0.3);
        CHECK(s1 == s2);

        std::vector<double> b1(n), b2(n);
        s.blend(0.37, x.data(), y.data(), b1.data(), n);
        v.blend(0.37, x.data(), y.data(), b2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(b1[i] - b2[i]) <= 1e-14 * 8);

        std::vector<double> table(9);
        for (double& t : table)
            t = rng.uniform(0.0, 1.0);
        std::vector<std::uint32_t> index(3 * n);
        for (auto& ix : index)
            ix = static_cast<std::uint32_t>(rng.index(table.size()));
        std::vector<double> g1(n), g2(n);
        s.gather_product(table.data(), index.data(), 3, g1.data(), n);
        v.gather_product(table.data(), index.data(), 3, g2.data(), n);
        CHECK(g1 == g2);
    }
}

TEST_CASE("inference is the same under either kernel set") {
    if (!have_avx2()) {
        MESSAGE("AVX2 not available on this CPU; skipping");
        return;
    }
    const simd::Isa before = simd::active_isa();
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const NetworkState net = t2fnn::testing::random_network(rng);
        const auto x = t2fnn::testing::random_input(rng, 3);
        simd::force_isa(simd::Isa::scalar);
        const InferenceCache c1 = infer(net, x);
        simd::force_isa(simd::Isa::avx2);
        const InferenceCache c2 = infer(net, x);
        CHECK(std::abs(c1.y_n - c2.y_n) <= 1e-13);
        for (std::size_t r = 0; r < net.rules(); ++r) {
            CHECK(std::abs(c1.wt_lower[r] - c2.wt_lower[r]) <= 1e-15);
            CHECK(std::abs(c1.wt_upper[r] - c2.wt_upper[r]) <= 1e-15);
        }
    }
    simd::force_isa(before);
}

TEST_CASE("isa selection") {
    CHECK(simd::isa_supported(simd::Isa::scalar));
    CHECK(simd::isa_name(simd::Isa::scalar) == "scalar");
    CHECK(simd::isa_name(simd::Isa::avx2) == "avx2");
    const simd::Isa before = simd::active_isa();
    simd::force_isa(simd::Isa::scalar);
    CHECK(simd::active_isa() == simd::Isa::scalar);
    CHECK(&simd::active() == &simd::scalar_kernels());
    if (!have_avx2())
        CHECK_THROWS(simd::force_isa(simd::Isa::avx2));
    simd::force_isa(before);
}
