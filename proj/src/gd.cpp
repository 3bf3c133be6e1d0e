#include "t2fnn/gd.hpp"

#include "t2fnn/errors.hpp"
#include "t2fnn/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace t2fnn {

void GdParams::validate() const {
    if (!(eta > 0.0) || !(eta_ant > 0.0) || !std::isfinite(eta) || !std::isfinite(eta_ant))
        throw ValidationError("gd.eta and gd.eta_ant must be positive");
    if (!(sigma_floor > 0.0))
        throw ValidationError("gd.sigma_floor must be positive");
}

void gd_gradients(const NetworkState& net, const InferenceCache& cache, std::span<const double> x, double y,
                  Gradients& out) {
    const RuleGrid& g = net.grid;
    const std::size_t n_in = g.inputs();
    const std::size_t n_rules = g.rules();
    const double e = cache.y_n - y;

    out.center.assign(g.total_mfs(), 0.0);
    out.sigma_lower.assign(g.total_mfs(), 0.0);
    out.sigma_upper.assign(g.total_mfs(), 0.0);
    out.a.assign(n_in * n_rules, 0.0);
    out.b.resize(n_rules);

    // dE/db_r = e g_r, dE/da_ri = e g_r x_i
    simd::blend(net.q, cache.wt_lower, cache.wt_upper, out.b);
    simd::scale(out.b, e);
    for (std::size_t i = 0; i < n_in; ++i)
        simd::axpy(x[i], out.b, std::span<double>(out.a.data() + i * n_rules, n_rules));

    out.q = e * (cache.y_lower - cache.y_upper);

    // d y_level / d w_r = (f_r - y_level) / sum(w); pushed through the product
    // t-norm this becomes (f_r - y_level) * wt_r per factor.
    std::vector<double> acc_lower(g.total_mfs(), 0.0), acc_upper(g.total_mfs(), 0.0);
    const auto index = g.index();
    for (std::size_t r = 0; r < n_rules; ++r) {
        const double hl = cache.degenerate_lower ? 0.0 : (cache.f[r] - cache.y_lower) * cache.wt_lower[r];
        const double hu = cache.degenerate_upper ? 0.0 : (cache.f[r] - cache.y_upper) * cache.wt_upper[r];
        for (std::size_t i = 0; i < n_in; ++i) {
            acc_lower[index[i * n_rules + r]] += hl;
            acc_upper[index[i * n_rules + r]] += hu;
        }
    }

    const double wl = e * net.q;
    const double wu = e * (1.0 - net.q);
    for (std::size_t i = 0; i < n_in; ++i)
        for (std::size_t k = 0; k < g.mfs(i); ++k) {
            const std::size_t slot = g.slot(i, k);
            const Type2GaussianMF& mf = net.mfs[slot];
            const double dist = x[i] - mf.center;
            const double sl2 = mf.sigma_lower * mf.sigma_lower;
            const double su2 = mf.sigma_upper * mf.sigma_upper;
            // d mu / d c = mu (x - c) / sigma^2, d mu / d sigma = mu (x - c)^2 / sigma^3
            out.center[slot] = wl * acc_lower[slot] * dist / sl2 + wu * acc_upper[slot] * dist / su2;
            out.sigma_lower[slot] = wl * acc_lower[slot] * dist * dist / (sl2 * mf.sigma_lower);
            out.sigma_upper[slot] = wu * acc_upper[slot] * dist * dist / (su2 * mf.sigma_upper);
        }
}

Gradients gd_gradients(const NetworkState& net, const InferenceCache& cache, std::span<const double> x, double y) {
    Gradients g;
    gd_gradients(net, cache, x, y, g);
    return g;
}

void apply_gradients(NetworkState& net, const Gradients& grad, const GdParams& params, StepDiagnostics& diag) {
    for (std::size_t slot = 0; slot < net.mfs.size(); ++slot) {
        auto& mf = net.mfs[slot];
        mf.center -= params.eta_ant * grad.center[slot];
        mf.sigma_lower -= params.eta_ant * grad.sigma_lower[slot];
        mf.sigma_upper -= params.eta_ant * grad.sigma_upper[slot];
    }
    diag.sigma_projections = project_sigmas(net, params.sigma_floor);
    simd::axpy(-params.eta, grad.a, net.a);
    simd::axpy(-params.eta, grad.b, net.b);
    const double q = net.q - params.eta * grad.q;
    net.q = std::clamp(q, 0.0, 1.0);
    diag.q_saturated = net.q != q;
    if (!net.all_finite())
        throw NonFiniteUpdate("gradient step");
}

GdLearner::GdLearner(GdParams params) : params_(params) { params_.validate(); }

StepDiagnostics GdLearner::step(NetworkState& net, std::span<const double> x, double y) {
    if (x.size() != net.inputs())
        throw ValidationError("input length mismatch");
    infer(net, x, cache_);
    StepDiagnostics diag;
    diag.y_n = cache_.y_n;
    diag.e = cache_.y_n - y;
    diag.degenerate_firings = (cache_.degenerate_lower ? 1 : 0) + (cache_.degenerate_upper ? 1 : 0);
    gd_gradients(net, cache_, x, y, grad_);
    apply_gradients(net, grad_, params_, diag);
    return diag;
}

NetworkState gd_step(const NetworkState& net, std::span<const double> x, double y, const GdParams& params) {
    GdLearner learner(params);
    NetworkState next = net;
    learner.step(next, x, y);
    return next;
}

} // namespace t2fnn
