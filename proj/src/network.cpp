#include "t2fnn/network.hpp"

#include "t2fnn/errors.hpp"
#include "t2fnn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace t2fnn {

bool Type2GaussianMF::valid() const noexcept {
    return std::isfinite(center) && std::isfinite(sigma_lower) && std::isfinite(sigma_upper) && sigma_lower > 0.0 &&
           sigma_upper > 0.0 && sigma_lower <= sigma_upper;
}

MembershipDegree eval_mf(const Type2GaussianMF& mf, double x) noexcept {
    const double d2 = (x - mf.center) * (x - mf.center);
    return {std::exp(-0.5 * d2 / (mf.sigma_lower * mf.sigma_lower)),
            std::exp(-0.5 * d2 / (mf.sigma_upper * mf.sigma_upper))};
}

double RuleConsequent::evaluate(std::span<const double> x) const {
    if (x.size() != a.size())
        throw ValidationError("consequent arity " + std::to_string(a.size()) + " != input size " +
                              std::to_string(x.size()));
    double f = b;
    for (std::size_t i = 0; i < a.size(); ++i)
        f += a[i] * x[i];
    return f;
}

RuleGrid::RuleGrid(std::vector<std::size_t> mfs_per_input) : mfs_per_input_(std::move(mfs_per_input)) {
    if (mfs_per_input_.empty())
        throw ValidationError("network needs at least one input");
    rules_ = 1;
    for (const std::size_t k : mfs_per_input_) {
        if (k == 0)
            throw ValidationError("every input needs at least one membership function");
        if (rules_ > std::numeric_limits<std::uint32_t>::max() / k)
            throw ValidationError("rule grid too large");
        offsets_.push_back(total_mfs_);
        total_mfs_ += k;
        rules_ *= k;
    }

    const std::size_t n_in = mfs_per_input_.size();
    index_.resize(n_in * rules_);
    for (std::size_t r = 0; r < rules_; ++r) {
        std::size_t rem = r;
        for (std::size_t i = n_in; i-- > 0;) {
            const std::size_t k = rem % mfs_per_input_[i];
            rem /= mfs_per_input_[i];
            index_[i * rules_ + r] = static_cast<std::uint32_t>(offsets_[i] + k);
        }
    }
}

NetworkState::NetworkState(std::vector<std::size_t> mfs_per_input) : grid(std::move(mfs_per_input)) {
    mfs.resize(grid.total_mfs());
    a.assign(grid.inputs() * grid.rules(), 0.0);
    b.assign(grid.rules(), 0.0);
}

RuleConsequent NetworkState::consequent(std::size_t rule) const {
    RuleConsequent c;
    c.a.resize(inputs());
    for (std::size_t i = 0; i < inputs(); ++i)
        c.a[i] = coeff(rule, i);
    c.b = b.at(rule);
    return c;
}

void NetworkState::set_consequent(std::size_t rule, const RuleConsequent& c) {
    if (c.a.size() != inputs())
        throw ValidationError("consequent arity mismatch");
    for (std::size_t i = 0; i < inputs(); ++i)
        coeff(rule, i) = c.a[i];
    b.at(rule) = c.b;
}

void NetworkState::validate() const {
    if (grid.inputs() == 0)
        throw ValidationError("empty network");
    if (mfs.size() != grid.total_mfs())
        throw ValidationError("MF table does not match grid");
    if (a.size() != grid.inputs() * grid.rules() || b.size() != grid.rules())
        throw ValidationError("consequent table does not match grid");
    for (std::size_t i = 0; i < grid.inputs(); ++i)
        for (std::size_t k = 0; k < grid.mfs(i); ++k)
            if (!mf(i, k).valid())
                throw ValidationError("invalid MF at input " + std::to_string(i) + ", set " + std::to_string(k) +
                                      " (need 0 < sigma_lower <= sigma_upper)");
    if (!(q >= 0.0 && q <= 1.0))
        throw ValidationError("q outside [0, 1]");
    if (!(alpha >= 0.0) || !(alpha_ant >= 0.0))
        throw ValidationError("learning rates must be nonnegative");
    if (!all_finite())
        throw ValidationError("non-finite parameter");
}

bool NetworkState::all_finite() const noexcept {
    auto finite = [](double v) { return std::isfinite(v); };
    for (const auto& m : mfs)
        if (!finite(m.center) || !finite(m.sigma_lower) || !finite(m.sigma_upper))
            return false;
    return std::all_of(a.begin(), a.end(), finite) && std::all_of(b.begin(), b.end(), finite) && finite(q) &&
           finite(alpha) && finite(alpha_ant);
}

void InferenceCache::resize(const RuleGrid& grid) {
    mu_lower.resize(grid.total_mfs());
    mu_upper.resize(grid.total_mfs());
    for (auto* v : {&w_lower, &w_upper, &wt_lower, &wt_upper, &f})
        v->resize(grid.rules());
}

NormalizeStatus normalize(std::span<const double> w, std::span<double> out) {
    const double total = simd::sum(w);
    if (!(total >= kDegenerateFiring)) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
        return NormalizeStatus::degenerate;
    }
    if (out.data() != w.data())
        std::copy(w.begin(), w.end(), out.begin());
    simd::scale(out, 1.0 / total);
    return NormalizeStatus::ok;
}

void membership_degrees(const NetworkState& net, std::span<const double> x, std::span<double> mu_lower,
                        std::span<double> mu_upper) {
    const RuleGrid& g = net.grid;
    for (std::size_t i = 0; i < g.inputs(); ++i)
        for (std::size_t k = 0; k < g.mfs(i); ++k) {
            const std::size_t s = g.slot(i, k);
            const auto mu = eval_mf(net.mfs[s], x[i]);
            mu_lower[s] = mu.lower;
            mu_upper[s] = mu.upper;
        }
}

void firing_strengths(const NetworkState& net, std::span<const double> mu_lower, std::span<const double> mu_upper,
                      std::span<double> w_lower, std::span<double> w_upper) {
    const auto& k = simd::active();
    const RuleGrid& g = net.grid;
    k.gather_product(mu_lower.data(), g.index().data(), g.inputs(), w_lower.data(), g.rules());
    k.gather_product(mu_upper.data(), g.index().data(), g.inputs(), w_upper.data(), g.rules());
}

std::pair<std::vector<double>, std::vector<double>> firing_strengths(const NetworkState& net,
                                                                     std::span<const double> x) {
    if (x.size() != net.inputs())
        throw ValidationError("input length mismatch");
    std::vector<double> mu_lo(net.grid.total_mfs()), mu_up(net.grid.total_mfs());
    membership_degrees(net, x, mu_lo, mu_up);
    std::vector<double> wl(net.rules()), wu(net.rules());
    firing_strengths(net, mu_lo, mu_up, wl, wu);
    return {std::move(wl), std::move(wu)};
}

void rule_outputs(const NetworkState& net, std::span<const double> x, std::span<double> f) {
    std::copy(net.b.begin(), net.b.end(), f.begin());
    for (std::size_t i = 0; i < net.inputs(); ++i)
        simd::axpy(x[i], net.coeffs_of_input(i), f);
}

std::vector<double> rule_outputs(const NetworkState& net, std::span<const double> x) {
    if (x.size() != net.inputs())
        throw ValidationError("input length mismatch");
    std::vector<double> f(net.rules());
    rule_outputs(net, x, f);
    return f;
}

void infer(const NetworkState& net, std::span<const double> x, InferenceCache& cache) {
    if (x.size() != net.inputs())
        throw ValidationError("input length mismatch: got " + std::to_string(x.size()) + ", network has " +
                              std::to_string(net.inputs()));
    cache.resize(net.grid);
    membership_degrees(net, x, cache.mu_lower, cache.mu_upper);
    firing_strengths(net, cache.mu_lower, cache.mu_upper, cache.w_lower, cache.w_upper);
    cache.degenerate_lower = normalize(cache.w_lower, cache.wt_lower) == NormalizeStatus::degenerate;
    cache.degenerate_upper = normalize(cache.w_upper, cache.wt_upper) == NormalizeStatus::degenerate;
    rule_outputs(net, x, cache.f);
    cache.y_lower = simd::dot(cache.f, cache.wt_lower);
    cache.y_upper = simd::dot(cache.f, cache.wt_upper);
    cache.y_n = net.q * cache.y_lower + (1.0 - net.q) * cache.y_upper;
}

InferenceCache infer(const NetworkState& net, std::span<const double> x) {
    InferenceCache cache;
    infer(net, x, cache);
    return cache;
}

} // namespace t2fnn
