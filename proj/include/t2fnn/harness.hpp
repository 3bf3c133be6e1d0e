#pragma once

// Series-parallel identification runner: the identifier sees the plant input
// and the plant's own delayed outputs, predicts the current output, and adapts
// online. Epochs replay the training horizon from a resting plant while the
// network parameters persist.

#include "t2fnn/gd.hpp"
#include "t2fnn/network.hpp"
#include "t2fnn/plants.hpp"
#include "t2fnn/smc.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace t2fnn {

enum class LearnerKind { smc, gd, none };

LearnerKind parse_learner_kind(std::string_view name);
std::string_view learner_name(LearnerKind kind) noexcept;

struct InitRanges {
    double center_jitter = 0.1;   // fraction of MF spacing
    double sigma_scale_min = 0.5; // sigma_upper ~ U[min, max] * range / K
    double sigma_scale_max = 1.5;
    double sigma_ratio_min = 0.5; // sigma_lower = sigma_upper * U[min, max]
    double sigma_ratio_max = 1.0;
    double consequent = 0.1;      // a, b ~ U[-consequent, consequent]
    double q = 0.5;

    bool operator==(const InitRanges&) const = default;
};

struct ExperimentConfig {
    PlantKind plant = PlantKind::nonbibo;
    LearnerKind learner = LearnerKind::smc;
    std::size_t epochs = 30;
    std::optional<std::size_t> samples_per_epoch; // unset: 10 s for ex1, one period for ex2
    std::size_t runs = 10;
    std::uint64_t seed = 0;
    double train_fraction = 0.8; // ex2 only
    double noise_std = 0.0;
    std::size_t mfs_per_input = 3;
    double sample_period = 1e-3;
    std::int64_t period = 1000;      // ex2 plant period T
    double input_period = 25.0;      // ex2 excitation period, samples
    double test_phase = 1.0;         // ex1 test excitation phase shift, rad
    std::optional<double> constant_input;
    InitRanges init;
    SmcParams smc;
    GdParams gd;
    bool allow_failed_runs = false;
    std::size_t threads = 0; // 0: one per hardware thread
    bool trace_all_epochs = false;

    std::size_t horizon() const noexcept;
    std::size_t train_samples() const noexcept;
    std::size_t test_samples() const noexcept;
    Plant::Options plant_options(bool test = false) const;

    /// Throws ValidationError.
    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

inline constexpr std::size_t kRegressorSize = 3;
using Regressor = std::array<double, kRegressorSize>;

/// (u(k), y(k-1), y(k-2)) relative to the output being predicted; `history`
/// holds the plant's outputs newest first and is zero before the start.
Regressor build_regressor(double u, std::span<const double> history);

/// sqrt(mean(e^2)). Throws EmptySequence.
double rmse(std::span<const double> errors);

struct TraceRow {
    std::int64_t k;
    double t;
    double u;
    double y;
    double y_n;
    double e;
    double alpha;
    double q;
};

struct EpochRow {
    std::size_t run;
    std::size_t epoch;
    double train_rmse;
    double alpha;
    double q;
    std::size_t guard_hits;
    std::size_t sigma_projections;
    std::size_t q_saturations;
    std::size_t degenerate_firings;
    double max_k_residual;
};

struct RunResult {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::vector<double> epoch_rmse;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    double frozen_rmse = 0.0;
    double alpha_init = 0.0;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    double e_abs_max = 0.0;
    double wall_seconds = 0.0;
    std::vector<EpochRow> epochs;
    std::vector<TraceRow> trace; // run 0 only
    NetworkState final_network;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(std::span<const double> values);

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<RunResult> runs;
    std::vector<double> epoch_rmse_mean; // over successful runs
    MeanStd train;
    MeanStd test;
    MeanStd frozen;
    std::size_t failed_runs = 0;
    double wall_seconds = 0.0;
};

/// Random initial network for one run, spread over the regressor ranges seen
/// in a warm-up pass of the training horizon.
NetworkState initial_network(const ExperimentConfig& config, std::uint64_t seed);

RunResult run_single(const ExperimentConfig& config, std::size_t run_index);

/// Runs config.runs seeds (seed + run index). Throws RunFailure unless
/// config.allow_failed_runs.
ExperimentReport run_experiment(const ExperimentConfig& config);

} // namespace t2fnn
