#include "t2fnn/plants.hpp"

#include "t2fnn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace t2fnn {

double step_nonbibo(PlantState& s, double u) {
    const double y0 = s.history[0];
    const double y1 = s.history[1];
    const double half = 0.5 * (y0 + y1);
    const double y = 0.2 * y0 * y0 + 0.2 * y1 + 0.4 * std::sin(half) * std::cos(half) + 1.2 * u;
    ++s.k;
    if (!(std::abs(y) <= kDivergenceLimit))
        throw Diverged(s.k, y);
    s.push(y);
    s.u_prev = u;
    return y;
}

double input_ex1(std::int64_t k, double t_o, double phase) noexcept {
    const double t = static_cast<double>(k) * t_o;
    return 0.5 * std::exp(-0.1 * t) * std::sin(5.0 * t + phase);
}

TimeVaryingCoefficients time_varying_coefficients(std::int64_t k, std::int64_t period) noexcept {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(period);
    return {1.2 - 0.2 * std::cos(th), 1.0 - 0.4 * std::sin(th), 1.0 + 0.4 * std::sin(th)};
}

double step_timevarying(PlantState& s, double u, std::int64_t period) {
    if (period <= 0)
        throw ValidationError("time-varying plant period must be positive");
    const auto [a, b, c] = time_varying_coefficients(s.k, period);
    const double y1 = s.history[0];
    const double y2 = s.history[1];
    const double y3 = s.history[2];
    const double x1 = y1 * y2 * y3 * s.u_prev;
    const double x2 = y3 - b;
    const double x3 = c * u;
    const double x4 = a + y2 * y2 + y3 * y3;
    if (!(x4 >= 1.0))
        throw std::logic_error("time-varying plant denominator below 1 at step " + std::to_string(s.k));
    const double y = (x1 * x2 + x3) / x4;
    ++s.k;
    if (!(std::abs(y) <= kDivergenceLimit))
        throw Diverged(s.k, y);
    s.push(y);
    s.u_prev = u;
    return y;
}

double input_ex2(std::int64_t k, double input_period) noexcept {
    return std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / input_period);
}

double bounded_sup_check(double amplitude, std::int64_t steps) {
    PlantState s;
    double peak = 0.0;
    for (std::int64_t k = 0; k < steps; ++k)
        peak = std::max(peak, std::abs(step_nonbibo(s, amplitude)));
    return peak;
}

PlantKind parse_plant_kind(std::string_view name) {
    if (name == "ex1" || name == "nonbibo")
        return PlantKind::nonbibo;
    if (name == "ex2" || name == "timevarying")
        return PlantKind::timevarying;
    throw ValidationError("unknown plant '" + std::string(name) + "' (expected ex1 or ex2)");
}

std::string_view plant_name(PlantKind kind) noexcept { return kind == PlantKind::nonbibo ? "ex1" : "ex2"; }

Plant::Plant(Options opts) : opts_(opts) {
    if (!(opts_.t_o > 0.0))
        throw ValidationError("sampling period must be positive");
    if (opts_.period <= 0 || !(opts_.input_period > 0.0))
        throw ValidationError("plant periods must be positive");
    reset();
}

void Plant::reset() {
    state_ = PlantState{};
    state_.t_o = opts_.t_o;
}

double Plant::next_input() const noexcept {
    if (opts_.constant_input)
        return *opts_.constant_input;
    return opts_.kind == PlantKind::nonbibo ? input_ex1(state_.k, opts_.t_o, opts_.input_phase)
                                            : input_ex2(state_.k, opts_.input_period);
}

double Plant::step() {
    const double u = next_input();
    return opts_.kind == PlantKind::nonbibo ? step_nonbibo(state_, u) : step_timevarying(state_, u, opts_.period);
}

std::vector<PlantSample> simulate(const Plant::Options& opts, std::int64_t steps) {
    Plant plant(opts);
    std::vector<PlantSample> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(steps, 0)));
    for (std::int64_t k = 0; k < steps; ++k) {
        const double u = plant.next_input();
        const double y = plant.step();
        out.push_back({k, static_cast<double>(k) * opts.t_o, u, y});
    }
    return out;
}

} // namespace t2fnn
