#pragma once

// Online gradient-descent baseline on E = 0.5 (y_N - y)^2, over the same
// network and with the same sigma projection / q clamp as the sliding-mode
// learner.

#include "t2fnn/network.hpp"
#include "t2fnn/smc.hpp"

#include <span>
#include <vector>

namespace t2fnn {

struct GdParams {
    double eta = 1.0;       // consequents and q
    double eta_ant = 1e-3;  // centers and sigmas
    double sigma_floor = 1e-3;

    void validate() const;
    bool operator==(const GdParams&) const = default;
};

/// dE/dparameter for every parameter, laid out like NetworkState.
struct Gradients {
    std::vector<double> center, sigma_lower, sigma_upper; // by grid slot
    std::vector<double> a;                                // input-major
    std::vector<double> b;
    double q = 0.0;
};

/// Exact partials of 0.5 (y_N - y)^2. `cache` must come from infer(net, x).
void gd_gradients(const NetworkState& net, const InferenceCache& cache, std::span<const double> x, double y,
                  Gradients& out);
Gradients gd_gradients(const NetworkState& net, const InferenceCache& cache, std::span<const double> x, double y);

/// Applies net -= eta * grad (eta_ant on antecedents), then projects. Returns
/// the number of projected MFs and whether q saturated through `diag`.
void apply_gradients(NetworkState& net, const Gradients& grad, const GdParams& params, StepDiagnostics& diag);

class GdLearner {
public:
    explicit GdLearner(GdParams params);

    const GdParams& params() const noexcept { return params_; }

    /// Throws NonFiniteUpdate.
    StepDiagnostics step(NetworkState& net, std::span<const double> x, double y);

private:
    GdParams params_;
    InferenceCache cache_;
    Gradients grad_;
};

NetworkState gd_step(const NetworkState& net, std::span<const double> x, double y, const GdParams& params);

} // namespace t2fnn
