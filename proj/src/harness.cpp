#include "t2fnn/harness.hpp"

#include "t2fnn/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>
#include <variant>

namespace t2fnn {

LearnerKind parse_learner_kind(std::string_view name) {
    if (name == "smc")
        return LearnerKind::smc;
    if (name == "gd")
        return LearnerKind::gd;
    if (name == "none")
        return LearnerKind::none;
    throw ValidationError("unknown learner '" + std::string(name) + "' (expected smc, gd or none)");
}

std::string_view learner_name(LearnerKind kind) noexcept {
    switch (kind) {
    case LearnerKind::smc:
        return "smc";
    case LearnerKind::gd:
        return "gd";
    case LearnerKind::none:
        return "none";
    }
    return "?";
}

std::size_t ExperimentConfig::horizon() const noexcept {
    if (samples_per_epoch)
        return *samples_per_epoch;
    return plant == PlantKind::nonbibo ? 10000 : static_cast<std::size_t>(period);
}

std::size_t ExperimentConfig::train_samples() const noexcept {
    if (plant == PlantKind::nonbibo)
        return horizon();
    return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(horizon())));
}

std::size_t ExperimentConfig::test_samples() const noexcept {
    return plant == PlantKind::nonbibo ? horizon() : horizon() - train_samples();
}

Plant::Options ExperimentConfig::plant_options(bool test) const {
    Plant::Options o;
    o.kind = plant;
    o.t_o = sample_period;
    o.period = period;
    o.input_period = input_period;
    o.input_phase = (test && plant == PlantKind::nonbibo) ? test_phase : 0.0;
    o.constant_input = constant_input;
    return o;
}

void ExperimentConfig::validate() const {
    if (epochs == 0)
        throw ValidationError("epochs must be > 0");
    if (runs == 0)
        throw ValidationError("runs must be > 0");
    if (samples_per_epoch && *samples_per_epoch == 0)
        throw ValidationError("samples_per_epoch must be > 0");
    if (mfs_per_input == 0)
        throw ValidationError("mfs_per_input must be > 0");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ValidationError("train_fraction must lie in (0, 1)");
    if (!(noise_std >= 0.0))
        throw ValidationError("noise_std must be >= 0");
    if (!(sample_period > 0.0))
        throw ValidationError("sample_period must be > 0");
    if (period <= 0)
        throw ValidationError("period must be > 0");
    if (!(input_period > 0.0))
        throw ValidationError("input_period must be > 0");
    if (train_samples() == 0 || test_samples() == 0)
        throw ValidationError("train/test split leaves an empty segment");
    const auto& in = init;
    if (!(in.center_jitter >= 0.0))
        throw ValidationError("init.center_jitter must be >= 0");
    if (!(in.sigma_scale_min > 0.0 && in.sigma_scale_min <= in.sigma_scale_max))
        throw ValidationError("init.sigma_scale range must be positive and non-empty");
    if (!(in.sigma_ratio_min > 0.0 && in.sigma_ratio_min <= in.sigma_ratio_max && in.sigma_ratio_max <= 1.0))
        throw ValidationError("init.sigma_ratio range must lie in (0, 1] (sigma_lower <= sigma_upper)");
    if (!(in.consequent >= 0.0))
        throw ValidationError("init.consequent must be >= 0");
    if (!(in.q >= 0.0 && in.q <= 1.0))
        throw ValidationError("init.q must lie in [0, 1]");
    smc.validate();
    gd.validate();
}

Regressor build_regressor(double u, std::span<const double> history) {
    return {u, history.size() > 0 ? history[0] : 0.0, history.size() > 1 ? history[1] : 0.0};
}

double rmse(std::span<const double> errors) {
    if (errors.empty())
        throw EmptySequence();
    double acc = 0.0;
    for (const double e : errors)
        acc += e * e;
    return std::sqrt(acc / static_cast<double>(errors.size()));
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd out;
    if (values.empty())
        return out;
    for (const double v : values)
        out.mean += v;
    out.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values)
            ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

namespace {

// 53 random mantissa bits; independent of the standard library's distributions.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : gen_(seed) {}
    double operator()(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    std::mt19937_64& engine() noexcept { return gen_; }

private:
    std::mt19937_64 gen_;
};

// Streams one pass of (regressor, target) pairs through `fn`.
// Measured outputs carry optional additive noise; the plant itself stays clean.
template <class Fn>
void replay(const ExperimentConfig& cfg, bool test, std::normal_distribution<double>* noise,
            std::mt19937_64* engine, Fn&& fn) {
    Plant plant(cfg.plant_options(test));
    const std::size_t begin = (test && cfg.plant == PlantKind::timevarying) ? cfg.train_samples() : 0;
    const std::size_t end = test ? begin + cfg.test_samples() : cfg.train_samples();
    std::array<double, 2> measured{};
    for (std::size_t k = 0; k < end; ++k) {
        const double u = plant.next_input();
        const Regressor x = build_regressor(u, measured);
        double y = plant.step();
        if (noise != nullptr && cfg.noise_std > 0.0)
            y += (*noise)(*engine);
        measured[1] = measured[0];
        measured[0] = y;
        if (k >= begin)
            fn(k, u, x, y);
    }
}

NetworkState network_from_ranges(const ExperimentConfig& cfg, const Regressor& lo, const Regressor& hi,
                                 Uniform& uniform) {
    NetworkState net(std::vector<std::size_t>(kRegressorSize, cfg.mfs_per_input));
    const std::size_t K = cfg.mfs_per_input;
    for (std::size_t i = 0; i < kRegressorSize; ++i) {
        const double width = std::max(hi[i] - lo[i], 1e-3);
        const double spacing = K > 1 ? width / static_cast<double>(K - 1) : width;
        for (std::size_t k = 0; k < K; ++k) {
            Type2GaussianMF& mf = net.mf(i, k);
            const double base = K > 1 ? lo[i] + spacing * static_cast<double>(k) : 0.5 * (lo[i] + hi[i]);
            mf.center = base + uniform(-1.0, 1.0) * cfg.init.center_jitter * spacing;
            mf.sigma_upper =
                uniform(cfg.init.sigma_scale_min, cfg.init.sigma_scale_max) * width / static_cast<double>(K);
            mf.sigma_lower = mf.sigma_upper * uniform(cfg.init.sigma_ratio_min, cfg.init.sigma_ratio_max);
        }
    }
    for (double& v : net.a)
        v = uniform(-cfg.init.consequent, cfg.init.consequent);
    for (double& v : net.b)
        v = uniform(-cfg.init.consequent, cfg.init.consequent);
    net.q = cfg.init.q;
    net.alpha = cfg.smc.alpha_init;
    net.alpha_ant = cfg.smc.rho_ant * net.alpha;
    return net;
}

class AnyLearner {
public:
    explicit AnyLearner(const ExperimentConfig& cfg) {
        switch (cfg.learner) {
        case LearnerKind::smc:
            impl_.emplace<SmcLearner>(cfg.smc);
            break;
        case LearnerKind::gd:
            impl_.emplace<GdLearner>(cfg.gd);
            break;
        case LearnerKind::none:
            break;
        }
    }

    StepDiagnostics step(NetworkState& net, std::span<const double> x, std::span<const double> x_dot, double y) {
        if (auto* smc = std::get_if<SmcLearner>(&impl_))
            return smc->step(net, x, x_dot, y);
        if (auto* gd = std::get_if<GdLearner>(&impl_))
            return gd->step(net, x, y);
        infer(net, x, cache_);
        StepDiagnostics d;
        d.y_n = cache_.y_n;
        d.e = cache_.y_n - y;
        d.degenerate_firings = (cache_.degenerate_lower ? 1 : 0) + (cache_.degenerate_upper ? 1 : 0);
        return d;
    }

    // Trace column "alpha": the adaptive gain for SMC, the fixed step for GD.
    double reported_rate(const NetworkState& net) const {
        if (const auto* gd = std::get_if<GdLearner>(&impl_))
            return gd->params().eta;
        return net.alpha;
    }

private:
    std::variant<std::monostate, SmcLearner, GdLearner> impl_;
    InferenceCache cache_;
};

double evaluate_frozen(const ExperimentConfig& cfg, const NetworkState& net, bool test) {
    InferenceCache cache;
    std::vector<double> errors;
    std::normal_distribution<double> noise(0.0, cfg.noise_std > 0.0 ? cfg.noise_std : 1.0);
    std::mt19937_64 engine(0x5eed0000ULL);
    replay(cfg, test, cfg.noise_std > 0.0 ? &noise : nullptr, &engine,
           [&](std::size_t, double, const Regressor& x, double y) {
               infer(net, x, cache);
               errors.push_back(cache.y_n - y);
           });
    return rmse(errors);
}

} // namespace

NetworkState initial_network(const ExperimentConfig& cfg, std::uint64_t seed) {
    Regressor lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    replay(cfg, false, nullptr, nullptr, [&](std::size_t, double, const Regressor& x, double) {
        for (std::size_t i = 0; i < kRegressorSize; ++i) {
            lo[i] = std::min(lo[i], x[i]);
            hi[i] = std::max(hi[i], x[i]);
        }
    });
    Uniform uniform(seed);
    return network_from_ranges(cfg, lo, hi, uniform);
}

RunResult run_single(const ExperimentConfig& cfg, std::size_t run_index) {
    const auto started = std::chrono::steady_clock::now();
    RunResult res;
    res.run = run_index;
    res.seed = cfg.seed + run_index;

    NetworkState net = initial_network(cfg, res.seed);
    res.alpha_init = res.alpha_min = res.alpha_max = net.alpha;
    res.frozen_rmse = evaluate_frozen(cfg, net, false);

    AnyLearner learner(cfg);
    std::mt19937_64 noise_engine(res.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, cfg.noise_std > 0.0 ? cfg.noise_std : 1.0);
    const double dt = cfg.smc.dt;
    const std::size_t n_train = cfg.train_samples();
    std::vector<double> errors;
    errors.reserve(n_train);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        errors.clear();
        EpochRow row{run_index, epoch + 1, 0.0, 0.0, 0.0, 0, 0, 0, 0, 0.0};
        Regressor prev{};
        const bool tracing = run_index == 0 && (cfg.trace_all_epochs || epoch + 1 == cfg.epochs);
        replay(cfg, false, cfg.noise_std > 0.0 ? &noise : nullptr, &noise_engine,
               [&](std::size_t k, double u, const Regressor& x, double y) {
                   Regressor x_dot{};
                   if (k > 0)
                       for (std::size_t i = 0; i < kRegressorSize; ++i)
                           x_dot[i] = (x[i] - prev[i]) / dt;
                   prev = x;
                   const StepDiagnostics d = learner.step(net, x, x_dot, y);
                   errors.push_back(d.e);
                   res.e_abs_max = std::max(res.e_abs_max, std::abs(d.e));
                   res.alpha_max = std::max(res.alpha_max, net.alpha);
                   res.alpha_min = std::min(res.alpha_min, net.alpha);
                   row.guard_hits += d.denom_guard_hits;
                   row.sigma_projections += d.sigma_projections;
                   row.q_saturations += d.q_saturated ? 1 : 0;
                   row.degenerate_firings += d.degenerate_firings;
                   row.max_k_residual = std::max(row.max_k_residual, d.k_r_residual);
                   if (tracing) {
                       const auto kg = static_cast<std::int64_t>(epoch * n_train + k);
                       res.trace.push_back({kg, static_cast<double>(kg) * cfg.sample_period, u, y, d.y_n, d.e,
                                            learner.reported_rate(net), net.q});
                   }
               });
        row.train_rmse = rmse(errors);
        row.alpha = learner.reported_rate(net);
        row.q = net.q;
        res.epoch_rmse.push_back(row.train_rmse);
        res.epochs.push_back(row);
    }

    res.train_rmse = res.epoch_rmse.back();
    res.test_rmse = evaluate_frozen(cfg, net, true);
    res.final_network = std::move(net);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return res;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    ExperimentReport report;
    report.config = cfg;
    report.runs.resize(cfg.runs);

    std::vector<std::exception_ptr> errors(cfg.runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < cfg.runs; r = next++) {
            try {
                report.runs[r] = run_single(cfg, r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    std::size_t n_threads = cfg.threads;
    if (n_threads == 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, cfg.runs);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
    }

    for (std::size_t r = 0; r < cfg.runs; ++r) {
        if (!errors[r])
            continue;
        RunFailure::Cause cause = RunFailure::Cause::other;
        std::string what;
        try {
            std::rethrow_exception(errors[r]);
        } catch (const Diverged& e) {
            cause = RunFailure::Cause::diverged;
            what = e.what();
        } catch (const NonFiniteUpdate& e) {
            cause = RunFailure::Cause::non_finite;
            what = e.what();
        } catch (const std::exception& e) {
            what = e.what();
        }
        if (!cfg.allow_failed_runs)
            throw RunFailure(r, what, cause);
        report.runs[r].run = r;
        report.runs[r].seed = cfg.seed + r;
        report.runs[r].failed = true;
        report.runs[r].error = what;
        ++report.failed_runs;
    }
    if (report.failed_runs == cfg.runs)
        throw RunFailure(0, "every run failed", RunFailure::Cause::other);

    std::vector<double> train, test, frozen;
    report.epoch_rmse_mean.assign(cfg.epochs, 0.0);
    for (const auto& run : report.runs) {
        if (run.failed)
            continue;
        train.push_back(run.train_rmse);
        test.push_back(run.test_rmse);
        frozen.push_back(run.frozen_rmse);
        for (std::size_t e = 0; e < cfg.epochs; ++e)
            report.epoch_rmse_mean[e] += run.epoch_rmse[e];
    }
    for (double& v : report.epoch_rmse_mean)
        v /= static_cast<double>(train.size());
    report.train = mean_std(train);
    report.test = mean_std(test);
    report.frozen = mean_std(frozen);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

} // namespace t2fnn
