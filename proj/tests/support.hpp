#pragma once

// Shared helpers for the test executables: random states and a loop-only
// reference evaluation of the network that shares no code with the library.

#include "t2fnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace t2fnn::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

inline NetworkState random_network(Rng& rng, std::vector<std::size_t> shape = {3, 3, 3}, bool type1 = false) {
    NetworkState net(std::move(shape));
    for (auto& mf : net.mfs) {
        mf.center = rng.uniform(-2.0, 2.0);
        mf.sigma_upper = rng.uniform(0.4, 2.0);
        mf.sigma_lower = type1 ? mf.sigma_upper : mf.sigma_upper * rng.uniform(0.5, 0.95);
    }
    for (double& v : net.a)
        v = rng.uniform(-1.0, 1.0);
    for (double& v : net.b)
        v = rng.uniform(-1.0, 1.0);
    net.q = rng.uniform(0.05, 0.95);
    net.alpha = rng.uniform(0.0, 5.0);
    return net;
}

inline std::vector<double> random_input(Rng& rng, std::size_t n, double span = 2.0) {
    std::vector<double> x(n);
    for (double& v : x)
        v = rng.uniform(-span, span);
    return x;
}

// Rule r's MF index for input i under row-major enumeration (last input fastest).
inline std::size_t digit(const std::vector<std::size_t>& shape, std::size_t r, std::size_t i) {
    std::size_t stride = 1;
    for (std::size_t j = shape.size(); j-- > i + 1;)
        stride *= shape[j];
    return (r / stride) % shape[i];
}

struct Reference {
    std::vector<double> wt_lower, wt_upper, f;
    double y_lower = 0, y_upper = 0, y = 0;
};

// Direct transcription of the forward pass with plain loops.
inline Reference reference_infer(const NetworkState& net, const std::vector<double>& x) {
    const auto& shape = net.grid.mfs_per_input();
    std::size_t n = 1;
    for (auto k : shape)
        n *= k;
    Reference out;
    std::vector<double> wl(n, 1.0), wu(n, 1.0);
    out.f.assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        double f = net.b[r];
        std::size_t offset = 0;
        for (std::size_t i = 0; i < shape.size(); ++i) {
            const auto& mf = net.mfs[offset + digit(shape, r, i)];
            const double z = x[i] - mf.center;
            wl[r] *= std::exp(-0.5 * z * z / (mf.sigma_lower * mf.sigma_lower));
            wu[r] *= std::exp(-0.5 * z * z / (mf.sigma_upper * mf.sigma_upper));
            f += net.a[i * n + r] * x[i];
            offset += shape[i];
        }
        out.f[r] = f;
    }
    double sl = 0, su = 0;
    for (std::size_t r = 0; r < n; ++r) {
        sl += wl[r];
        su += wu[r];
    }
    out.wt_lower.resize(n);
    out.wt_upper.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        out.wt_lower[r] = wl[r] / sl;
        out.wt_upper[r] = wu[r] / su;
        out.y_lower += out.f[r] * out.wt_lower[r];
        out.y_upper += out.f[r] * out.wt_upper[r];
    }
    out.y = net.q * out.y_lower + (1.0 - net.q) * out.y_upper;
    return out;
}

// Plain type-1 TSK: one sigma per MF, no mixing weight.
struct Type1 {
    std::vector<std::size_t> shape;
    std::vector<double> center, sigma; // flat slots, input-major
    std::vector<std::vector<double>> a; // a[r][i]
    std::vector<double> b;

    double eval(const std::vector<double>& x) const {
        double num = 0, den = 0;
        for (std::size_t r = 0; r < b.size(); ++r) {
            double w = 1, f = b[r];
            std::size_t offset = 0;
            for (std::size_t i = 0; i < shape.size(); ++i) {
                const std::size_t s = offset + digit(shape, r, i);
                w *= std::exp(-0.5 * std::pow((x[i] - center[s]) / sigma[s], 2));
                f += a[r][i] * x[i];
                offset += shape[i];
            }
            num += w * f;
            den += w;
        }
        return num / den;
    }
};

inline Type1 as_type1(const NetworkState& net) {
    Type1 t;
    t.shape = net.grid.mfs_per_input();
    for (const auto& mf : net.mfs) {
        t.center.push_back(mf.center);
        t.sigma.push_back(mf.sigma_upper);
    }
    const std::size_t n = net.b.size();
    t.a.assign(n, std::vector<double>(t.shape.size()));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t i = 0; i < t.shape.size(); ++i)
            t.a[r][i] = net.a[i * n + r];
    t.b = net.b;
    return t;
}

inline double rel_err(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace t2fnn::testing
