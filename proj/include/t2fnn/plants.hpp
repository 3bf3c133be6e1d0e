#pragma once

// Discrete-time benchmark plants and their excitation signals.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace t2fnn {

/// Output history (newest first), last input and step counter.
struct PlantState {
    std::array<double, 3> history{}; // history[0] is the most recent output
    double u_prev = 0.0;
    std::int64_t k = 0;
    double t_o = 1e-3;

    void push(double y) noexcept {
        history[2] = history[1];
        history[1] = history[0];
        history[0] = y;
    }
};

inline constexpr double kDivergenceLimit = 1e6;

/// Non-BIBO plant:
///   y(k+1) = 0.2 y(k)^2 + 0.2 y(k-1) + 0.4 sin(0.5 (y(k) + y(k-1))) cos(0.5 (y(k) + y(k-1))) + 1.2 u(k)
/// Throws Diverged once |y| exceeds kDivergenceLimit.
double step_nonbibo(PlantState& state, double u);

/// Excitation 0.5 exp(-0.1 t) sin(5 t + phase), t = k t_o.
double input_ex1(std::int64_t k, double t_o, double phase = 0.0) noexcept;

struct TimeVaryingCoefficients {
    double a, b, c;
};

/// a = 1.2 - 0.2 cos(2 pi k / T), b = 1 - 0.4 sin(2 pi k / T), c = 1 + 0.4 sin(2 pi k / T)
TimeVaryingCoefficients time_varying_coefficients(std::int64_t k, std::int64_t period) noexcept;

/// Second-order time-varying plant:
///   y(k) = (x1 x2 + x3) / x4,  x1 = y(k-1) y(k-2) y(k-3) u(k-1), x2 = y(k-3) - b(k),
///   x3 = c(k) u(k),             x4 = a(k) + y(k-2)^2 + y(k-3)^2
double step_timevarying(PlantState& state, double u, std::int64_t period = 1000);

/// Default excitation for the time-varying plant: sin(2 pi k / input_period).
double input_ex2(std::int64_t k, double input_period = 25.0) noexcept;

/// Drives the non-BIBO plant with a constant input from rest and returns max |y|.
/// Propagates Diverged.
double bounded_sup_check(double amplitude, std::int64_t steps);

enum class PlantKind { nonbibo, timevarying };

PlantKind parse_plant_kind(std::string_view name);
std::string_view plant_name(PlantKind kind) noexcept;

/// Plant plus its excitation, stepping in lockstep.
class Plant {
public:
    struct Options {
        PlantKind kind = PlantKind::nonbibo;
        double t_o = 1e-3;
        std::int64_t period = 1000;      // time-varying plant
        double input_period = 25.0;      // time-varying plant excitation
        double input_phase = 0.0;        // non-BIBO excitation
        std::optional<double> constant_input;
    };

    explicit Plant(Options opts);

    void reset();
    /// Input that will be applied at the next step.
    double next_input() const noexcept;
    /// Applies next_input() and returns the new output.
    double step();

    const PlantState& state() const noexcept { return state_; }
    const Options& options() const noexcept { return opts_; }

private:
    Options opts_;
    PlantState state_;
};

struct PlantSample {
    std::int64_t k;
    double t;
    double u;
    double y;
};

/// Simulates `steps` samples from rest. Propagates Diverged.
std::vector<PlantSample> simulate(const Plant::Options& opts, std::int64_t steps);

} // namespace t2fnn
