#include "t2fnn/smc.hpp"

#include "t2fnn/errors.hpp"
#include "t2fnn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace t2fnn {

void SmcParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError(std::string(name) + " must be a positive finite number");
    };
    positive(gamma, "smc.gamma");
    positive(nu, "smc.nu");
    positive(delta_s, "smc.delta_s");
    positive(rho_ant, "smc.rho_ant");
    positive(denom_guard, "smc.denom_guard");
    positive(dt, "smc.dt");
    positive(sigma_floor, "smc.sigma_floor");
    if (rho_ant > 1.0)
        throw ValidationError("smc.rho_ant must be <= 1");
    if (!(alpha_init >= 0.0) || !std::isfinite(alpha_init))
        throw ValidationError("smc.alpha_init must be >= 0");
    // alpha_{k+1} = (1 - dt nu gamma) alpha_k + ...; past 1 the leakage flips sign.
    if (dt * nu * gamma > 1.0)
        throw ValidationError("smc.dt * smc.nu * smc.gamma must be <= 1");
}

double StabilityBounds::min_alpha_star(std::size_t inputs) const noexcept {
    const double n = static_cast<double>(inputs);
    return 2.0 * (n * b_a * b_xdot + b_ydot) / (2.0 + n * b_x2);
}

void StabilityBounds::validate(std::size_t inputs) const {
    for (double v : {b_xdot, b_x2, b_ydot, b_a, alpha_star})
        if (!(v > 0.0))
            throw ValidationError("stability bounds must be positive");
    if (alpha_star < min_alpha_star(inputs))
        throw ValidationError("alpha_star below 2 (I B_a B_xdot + B_ydot) / (2 + I B_x2)");
}

double smooth_sign(double e, double delta_s) noexcept { return e / (std::abs(e) + delta_s); }

double error_band(const StabilityBounds& bounds, double nu, std::size_t inputs) {
    if (nu < 0.0)
        throw ValidationError("nu must be >= 0");
    return bounds.alpha_star * nu / (2.0 * (2.0 + static_cast<double>(inputs) * bounds.b_x2));
}

void smc_derivatives(const NetworkState& net, const InferenceCache& cache, std::span<const double> x,
                     std::span<const double> x_dot, double e, const SmcParams& p, SmcDerivatives& d) {
    const RuleGrid& g = net.grid;
    const std::size_t n_in = g.inputs();
    const std::size_t n_rules = g.rules();

    d.center.resize(g.total_mfs());
    d.sigma_lower.resize(g.total_mfs());
    d.sigma_upper.resize(g.total_mfs());
    d.a.resize(n_in * n_rules);
    d.b.resize(n_rules);
    d.guard_hits = 0;

    const double s = smooth_sign(e, p.delta_s);
    const double alpha_ant = p.rho_ant * net.alpha;
    d.s = s;
    d.alpha_ant = alpha_ant;

    // Antecedents.
    const double gain_ant = alpha_ant * s;
    for (std::size_t i = 0; i < n_in; ++i)
        for (std::size_t k = 0; k < g.mfs(i); ++k) {
            const std::size_t slot = g.slot(i, k);
            const Type2GaussianMF& mf = net.mfs[slot];
            const double dist = x[i] - mf.center;
            double dist2 = dist * dist;
            if (dist2 < p.denom_guard) {
                dist2 = p.denom_guard;
                ++d.guard_hits;
            }
            d.center[slot] = x_dot[i] + dist * gain_ant;
            const double sl = mf.sigma_lower;
            const double su = mf.sigma_upper;
            d.sigma_lower[slot] = -(sl + sl * sl * sl / dist2) * gain_ant;
            d.sigma_upper[slot] = -(su + su * su * su / dist2) * gain_ant;
        }

    // Consequents: g_r = q wl_r + (1-q) wu_r, shared denominator sum_r g_r^2.
    simd::blend(net.q, cache.wt_lower, cache.wt_upper, d.b);
    double denom = simd::dot(d.b, d.b);
    if (denom < p.denom_guard) {
        denom = p.denom_guard;
        ++d.guard_hits;
    }
    const double coef = -net.alpha * s / denom;
    simd::scale(d.b, coef); // b' = coef * g
    for (std::size_t i = 0; i < n_in; ++i) {
        std::span<double> row(d.a.data() + i * n_rules, n_rules);
        std::fill(row.begin(), row.end(), 0.0);
        simd::axpy(x[i], d.b, row); // a'_i = x_i * b'
    }

    // Mixing weight: signed denominator sum_r f_r (wl_r - wu_r).
    double dq = cache.y_lower - cache.y_upper;
    if (std::abs(dq) < p.denom_guard) {
        dq = std::signbit(dq) ? -p.denom_guard : p.denom_guard;
        ++d.guard_hits;
    }
    d.q = -net.alpha * s / dq;

    d.alpha = p.gamma * (static_cast<double>(n_in) + 2.0) * std::abs(e) - p.nu * p.gamma * net.alpha;
}

double k_r_residual(const NetworkState& net, std::span<const double> x, std::span<const double> x_dot,
                    const SmcDerivatives& d) {
    const RuleGrid& g = net.grid;
    const std::size_t n_in = g.inputs();
    std::vector<double> prod_lower(g.total_mfs()), prod_upper(g.total_mfs());
    for (std::size_t i = 0; i < n_in; ++i)
        for (std::size_t k = 0; k < g.mfs(i); ++k) {
            const std::size_t slot = g.slot(i, k);
            const Type2GaussianMF& mf = net.mfs[slot];
            const double dist = x[i] - mf.center;
            const double ddist = x_dot[i] - d.center[slot];
            // A = dist / sigma, dA = ddist / sigma - dist * dsigma / sigma^2
            auto a_dot_a = [&](double sigma, double dsigma) {
                const double a = dist / sigma;
                const double da = ddist / sigma - dist * dsigma / (sigma * sigma);
                return a * da;
            };
            prod_lower[slot] = a_dot_a(mf.sigma_lower, d.sigma_lower[slot]);
            prod_upper[slot] = a_dot_a(mf.sigma_upper, d.sigma_upper[slot]);
        }

    const double target = static_cast<double>(n_in) * d.alpha_ant * d.s;
    double worst = 0.0;
    for (std::size_t r = 0; r < g.rules(); ++r) {
        double kl = 0.0, ku = 0.0;
        for (std::size_t i = 0; i < n_in; ++i) {
            const std::size_t slot = g.slot(i, g.mf_of(r, i));
            kl += prod_lower[slot];
            ku += prod_upper[slot];
        }
        worst = std::max({worst, std::abs(kl - target), std::abs(ku - target)});
    }
    return worst;
}

std::size_t project_sigmas(NetworkState& net, double floor) noexcept {
    std::size_t touched = 0;
    for (auto& mf : net.mfs) {
        bool hit = false;
        if (mf.sigma_lower < floor) {
            mf.sigma_lower = floor;
            hit = true;
        }
        if (mf.sigma_upper < floor) {
            mf.sigma_upper = floor;
            hit = true;
        }
        if (mf.sigma_lower > mf.sigma_upper) {
            std::swap(mf.sigma_lower, mf.sigma_upper);
            hit = true;
        }
        touched += hit ? 1 : 0;
    }
    return touched;
}

namespace {

void check_finite(const NetworkState& net) {
    if (net.all_finite())
        return;
    for (const auto& mf : net.mfs)
        if (!std::isfinite(mf.center) || !std::isfinite(mf.sigma_lower) || !std::isfinite(mf.sigma_upper))
            throw NonFiniteUpdate("membership function");
    if (!std::isfinite(net.q))
        throw NonFiniteUpdate("q");
    if (!std::isfinite(net.alpha))
        throw NonFiniteUpdate("alpha");
    throw NonFiniteUpdate("consequent");
}

} // namespace

SmcLearner::SmcLearner(SmcParams params) : params_(params) { params_.validate(); }

StepDiagnostics SmcLearner::step(NetworkState& net, std::span<const double> x, std::span<const double> x_dot,
                                 double y) {
    if (x.size() != net.inputs() || x_dot.size() != net.inputs())
        throw ValidationError("input length mismatch");
    const double dt = params_.dt;

    infer(net, x, cache_);
    StepDiagnostics diag;
    diag.y_n = cache_.y_n;
    diag.e = cache_.y_n - y;
    diag.degenerate_firings = (cache_.degenerate_lower ? 1 : 0) + (cache_.degenerate_upper ? 1 : 0);

    smc_derivatives(net, cache_, x, x_dot, diag.e, params_, deriv_);
    diag.denom_guard_hits = deriv_.guard_hits;
    diag.k_r_residual = k_r_residual(net, x, x_dot, deriv_);

    for (std::size_t slot = 0; slot < net.mfs.size(); ++slot) {
        auto& mf = net.mfs[slot];
        mf.center += dt * deriv_.center[slot];
        mf.sigma_lower += dt * deriv_.sigma_lower[slot];
        mf.sigma_upper += dt * deriv_.sigma_upper[slot];
    }
    diag.sigma_projections = project_sigmas(net, params_.sigma_floor);

    simd::axpy(dt, deriv_.a, net.a);
    simd::axpy(dt, deriv_.b, net.b);

    const double q = net.q + dt * deriv_.q;
    net.q = std::clamp(q, 0.0, 1.0);
    diag.q_saturated = net.q != q;

    net.alpha = std::max(0.0, net.alpha + dt * deriv_.alpha);
    net.alpha_ant = params_.rho_ant * net.alpha;

    check_finite(net);
    return diag;
}

std::pair<NetworkState, StepDiagnostics> smc_step(const NetworkState& net, std::span<const double> x,
                                                  std::span<const double> x_dot, double y, const SmcParams& params) {
    SmcLearner learner(params);
    NetworkState next = net;
    const StepDiagnostics diag = learner.step(next, x, x_dot, y);
    return {std::move(next), diag};
}

} // namespace t2fnn
