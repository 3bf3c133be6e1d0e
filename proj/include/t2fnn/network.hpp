#pragma once

// Interval type-2 TSK network with type-2 antecedents and crisp affine
// consequents (A2-C0). Membership functions are Gaussians with a fixed center
// and an uncertain standard deviation; rule firing uses the product t-norm and
// the output mixes the normalized lower and upper firing paths with a weight q.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace t2fnn {

struct Type2GaussianMF {
    double center = 0.0;
    double sigma_lower = 1.0;
    double sigma_upper = 1.0;

    bool valid() const noexcept;
    bool operator==(const Type2GaussianMF&) const = default;
};

struct MembershipDegree {
    double lower;
    double upper;
};

/// Lower/upper Gaussian membership of x. lower <= upper whenever sigma_lower <= sigma_upper.
MembershipDegree eval_mf(const Type2GaussianMF& mf, double x) noexcept;

struct RuleConsequent {
    std::vector<double> a;
    double b = 0.0;

    /// f = a . x + b
    double evaluate(std::span<const double> x) const;
    bool operator==(const RuleConsequent&) const = default;
};

/// Shape of the full Cartesian rule grid. Rules are enumerated row-major over
/// (k_1, ..., k_I): the last input's MF index varies fastest.
class RuleGrid {
public:
    RuleGrid() = default;
    explicit RuleGrid(std::vector<std::size_t> mfs_per_input);

    std::size_t inputs() const noexcept { return mfs_per_input_.size(); }
    std::size_t rules() const noexcept { return rules_; }
    std::size_t mfs(std::size_t input) const { return mfs_per_input_.at(input); }
    std::size_t total_mfs() const noexcept { return total_mfs_; }
    const std::vector<std::size_t>& mfs_per_input() const noexcept { return mfs_per_input_; }

    /// Flat slot of MF k of input i.
    std::size_t slot(std::size_t input, std::size_t k) const noexcept { return offsets_[input] + k; }
    /// MF index used by `rule` for `input`.
    std::size_t mf_of(std::size_t rule, std::size_t input) const noexcept {
        return index_[input * rules_ + rule] - offsets_[input];
    }
    /// Input-major table of flat MF slots: index()[i * rules() + r].
    std::span<const std::uint32_t> index() const noexcept { return index_; }

    bool operator==(const RuleGrid& o) const noexcept { return mfs_per_input_ == o.mfs_per_input_; }

private:
    std::vector<std::size_t> mfs_per_input_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> index_;
    std::size_t rules_ = 0;
    std::size_t total_mfs_ = 0;
};

/// Full mutable parameter set. Consequent coefficients are stored input-major
/// (a[i * N + r]) so the per-input rule loops are contiguous.
struct NetworkState {
    RuleGrid grid;
    std::vector<Type2GaussianMF> mfs; // indexed by grid.slot(i, k)
    std::vector<double> a;
    std::vector<double> b;
    double q = 0.5;
    double alpha = 0.0;
    double alpha_ant = 0.0;

    NetworkState() = default;
    explicit NetworkState(std::vector<std::size_t> mfs_per_input);

    std::size_t inputs() const noexcept { return grid.inputs(); }
    std::size_t rules() const noexcept { return grid.rules(); }

    Type2GaussianMF& mf(std::size_t input, std::size_t k) { return mfs.at(grid.slot(input, k)); }
    const Type2GaussianMF& mf(std::size_t input, std::size_t k) const { return mfs.at(grid.slot(input, k)); }

    double& coeff(std::size_t rule, std::size_t input) { return a[input * rules() + rule]; }
    double coeff(std::size_t rule, std::size_t input) const { return a[input * rules() + rule]; }
    std::span<double> coeffs_of_input(std::size_t input) { return {a.data() + input * rules(), rules()}; }
    std::span<const double> coeffs_of_input(std::size_t input) const { return {a.data() + input * rules(), rules()}; }

    RuleConsequent consequent(std::size_t rule) const;
    void set_consequent(std::size_t rule, const RuleConsequent& c);

    /// Throws ValidationError describing the first broken invariant.
    void validate() const;
    bool all_finite() const noexcept;

    bool operator==(const NetworkState&) const = default;
};

/// Per-sample intermediates shared by both learners.
struct InferenceCache {
    std::vector<double> mu_lower, mu_upper; // by grid slot
    std::vector<double> w_lower, w_upper;
    std::vector<double> wt_lower, wt_upper;
    std::vector<double> f;
    double y_lower = 0.0; // sum_r f_r * wt_lower_r
    double y_upper = 0.0; // sum_r f_r * wt_upper_r
    double y_n = 0.0;
    bool degenerate_lower = false;
    bool degenerate_upper = false;

    void resize(const RuleGrid& grid);
    bool degenerate() const noexcept { return degenerate_lower || degenerate_upper; }
};

enum class NormalizeStatus { ok, degenerate };

/// Firing-strength sum below which a level is treated as unfired.
inline constexpr double kDegenerateFiring = 1e-300;

/// out = w / sum(w). When sum(w) < kDegenerateFiring, writes uniform 1/N and
/// reports NormalizeStatus::degenerate.
NormalizeStatus normalize(std::span<const double> w, std::span<double> out);

void membership_degrees(const NetworkState& net, std::span<const double> x, std::span<double> mu_lower,
                        std::span<double> mu_upper);
void firing_strengths(const NetworkState& net, std::span<const double> mu_lower, std::span<const double> mu_upper,
                      std::span<double> w_lower, std::span<double> w_upper);
std::pair<std::vector<double>, std::vector<double>> firing_strengths(const NetworkState& net,
                                                                     std::span<const double> x);
void rule_outputs(const NetworkState& net, std::span<const double> x, std::span<double> f);
std::vector<double> rule_outputs(const NetworkState& net, std::span<const double> x);

/// Forward pass, reusing the buffers in `cache`.
void infer(const NetworkState& net, std::span<const double> x, InferenceCache& cache);
InferenceCache infer(const NetworkState& net, std::span<const double> x);

} // namespace t2fnn
