#pragma once

// Sliding-mode online adaptation for the type-2 TSK network.
//
// The identification error e = y_N - y is the sliding surface. Every
// parameter has a closed-form continuous-time law driven by sgn(e) (replaced
// here by the smooth e / (|e| + delta_s)), and the gain alpha is itself adapted
// from |e| with a leakage term. Laws are integrated with one explicit Euler step
// per sample.

#include "t2fnn/network.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace t2fnn {

struct SmcParams {
    double gamma = 10.0;       // adaptation rate of alpha
    double nu = 1e-3;          // alpha leakage
    double delta_s = 0.05;     // width of the smoothed sign
    double rho_ant = 1e-3;     // antecedent gain as a fraction of alpha
    double denom_guard = 1e-3; // floor for every denominator in the laws
    double dt = 1e-3;          // Euler step, seconds
    double sigma_floor = 1e-3;
    double alpha_init = 0.0;

    /// Throws ValidationError.
    void validate() const;
    bool operator==(const SmcParams&) const = default;
};

/// Bounds on inputs, their rates and the target rate; only used for the
/// theoretical error band.
struct StabilityBounds {
    double b_xdot = 1.0;
    double b_x2 = 1.0;
    double b_ydot = 1.0;
    double b_a = 1.0;
    double alpha_star = 1.0;

    /// Smallest alpha* admissible for these bounds and input count.
    double min_alpha_star(std::size_t inputs) const noexcept;
    void validate(std::size_t inputs) const;
};

struct StepDiagnostics {
    double e = 0.0;
    double y_n = 0.0;
    double k_r_residual = 0.0;
    bool q_saturated = false;
    std::size_t denom_guard_hits = 0;
    std::size_t sigma_projections = 0;
    std::size_t degenerate_firings = 0;
};

/// e / (|e| + delta_s)
double smooth_sign(double e, double delta_s) noexcept;

/// Terminal band alpha* nu / (2 (2 + I B_x2)) on |e|.
double error_band(const StabilityBounds& bounds, double nu, std::size_t inputs);

/// Continuous-time right-hand sides of every adaptation law, evaluated at one
/// frozen snapshot. Laid out like NetworkState.
struct SmcDerivatives {
    std::vector<double> center, sigma_lower, sigma_upper; // by grid slot
    std::vector<double> a;                                // input-major, like NetworkState::a
    std::vector<double> b;
    double q = 0.0;
    double alpha = 0.0;

    double s = 0.0;         // smoothed sign actually applied
    double alpha_ant = 0.0; // antecedent gain used
    std::size_t guard_hits = 0;
};

/// Evaluates the laws for error `e` given the forward cache of (net, x).
void smc_derivatives(const NetworkState& net, const InferenceCache& cache, std::span<const double> x,
                     std::span<const double> x_dot, double e, const SmcParams& params, SmcDerivatives& out);

/// max over rules and both levels of |K_r - I * alpha_ant * s| where
/// K_r = sum_i A_ik dA_ik/dt, A_ik = (x_i - c_ik) / sigma_ik, evaluated from the
/// continuous-time derivatives in `d`.
double k_r_residual(const NetworkState& net, std::span<const double> x, std::span<const double> x_dot,
                    const SmcDerivatives& d);

/// Floors sigmas at `floor` and restores sigma_lower <= sigma_upper.
/// Returns the number of MFs touched.
std::size_t project_sigmas(NetworkState& net, double floor) noexcept;

/// Stateful front-end that keeps scratch buffers between samples.
class SmcLearner {
public:
    explicit SmcLearner(SmcParams params);

    const SmcParams& params() const noexcept { return params_; }

    /// One Euler step of all laws on `net` in place. Throws NonFiniteUpdate.
    StepDiagnostics step(NetworkState& net, std::span<const double> x, std::span<const double> x_dot, double y);

    const InferenceCache& last_cache() const noexcept { return cache_; }
    const SmcDerivatives& last_derivatives() const noexcept { return deriv_; }

private:
    SmcParams params_;
    InferenceCache cache_;
    SmcDerivatives deriv_;
};

/// Pure form of SmcLearner::step.
std::pair<NetworkState, StepDiagnostics> smc_step(const NetworkState& net, std::span<const double> x,
                                                  std::span<const double> x_dot, double y, const SmcParams& params);

} // namespace t2fnn
