#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "t2fnn/errors.hpp"
#include "t2fnn/smc.hpp"

#include <cmath>
#include <vector>

using namespace t2fnn;
using namespace t2fnn::testing;

namespace {

// Input away from every center so that no (x - c)^2 guard engages.
std::vector<double> input_off_centers(Rng& rng, const NetworkState& net, double guard) {
    for (;;) {
        auto x = random_input(rng, net.inputs());
        bool ok = true;
        for (std::size_t i = 0; i < net.inputs() && ok; ++i)
            for (std::size_t k = 0; k < net.grid.mfs(i); ++k) {
                const double d = x[i] - net.mf(i, k).center;
                ok = ok && d * d > 10.0 * guard;
            }
        if (ok)
            return x;
    }
}

double sgn(double v) { return (v > 0) - (v < 0); }

} // namespace

TEST_CASE("smooth_sign") {
    CHECK(smooth_sign(0.0, 0.05) == 0.0);
    CHECK(smooth_sign(0.05, 0.05) == 0.5);
    CHECK(smooth_sign(-0.05, 0.05) == -0.5);
    CHECK(std::abs(smooth_sign(1e6, 0.05)) < 1.0);
    CHECK(smooth_sign(3.0, 1e-12) == doctest::Approx(1.0));
}

TEST_CASE("error band") {
    StabilityBounds b;
    CHECK(error_band(b, 0.0, 3) == 0.0);
    b.alpha_star = 1.0;
    b.b_x2 = 1.0;
    CHECK(error_band(b, 0.1, 3) == doctest::Approx(0.01).epsilon(1e-15));
    double prev = -1;
    for (double nu : {0.0, 0.01, 0.1, 0.5, 2.0}) {
        const double band = error_band(b, nu, 3);
        CHECK(band > prev);
        prev = band;
    }
    CHECK_THROWS_AS(error_band(b, -0.1, 3), ValidationError);
}

TEST_CASE("stability bounds") {
    StabilityBounds b{1.0, 1.0, 1.0, 1.0, 1.0};
    CHECK(b.min_alpha_star(3) == doctest::Approx(2.0 * 4.0 / 5.0));
    CHECK_THROWS_AS(b.validate(3), ValidationError);
    b.alpha_star = 1.6;
    CHECK_NOTHROW(b.validate(3));
    b.b_a = -1;
    CHECK_THROWS_AS(b.validate(3), ValidationError);
}

TEST_CASE("parameter validation") {
    SmcParams p;
    CHECK_NOTHROW(p.validate());
    p.delta_s = -1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.rho_ant = 1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.dt = 1.0;
    p.nu = 1.0;
    p.gamma = 2.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.alpha_init = -1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("zero error leaves everything but alpha's leak untouched") {
    Rng rng(20);
    SmcParams p;
    for (int t = 0; t < 50; ++t) {
        const NetworkState net = random_network(rng);
        const auto x = random_input(rng, 3);
        const std::vector<double> x_dot(3, 0.0);
        const double y = infer(net, x).y_n;
        const auto [next, diag] = smc_step(net, x, x_dot, y, p);
        CHECK(diag.e == 0.0);
        CHECK(next.mfs == net.mfs);
        CHECK(next.a == net.a);
        CHECK(next.b == net.b);
        CHECK(next.q == net.q);
        CHECK(next.alpha == doctest::Approx(net.alpha * (1.0 - p.dt * p.nu * p.gamma)).epsilon(1e-15));
    }
}

TEST_CASE("single rule trips the q denominator guard") {
    NetworkState net({1});
    net.mfs[0] = {0.0, 0.5, 1.0};
    net.set_consequent(0, {{0.3}, 0.1});
    net.alpha = 1.0;
    SmcLearner learner({});
    const std::vector<double> x{0.7}, x_dot{0.0};
    const auto diag = learner.step(net, x, x_dot, 2.0);
    CHECK(diag.denom_guard_hits >= 1);
    CHECK(std::isfinite(net.q));
    CHECK(net.q >= 0.0);
    CHECK(net.q <= 1.0);
}

TEST_CASE("property: K_r identity holds on the continuous-time laws") {
    Rng rng(21);
    SmcParams p;
    p.rho_ant = 0.3;
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        const NetworkState net = random_network(rng);
        const auto x = input_off_centers(rng, net, p.denom_guard);
        const auto x_dot = random_input(rng, 3, 5.0);
        const double e = rng.uniform(-2.0, 2.0);
        const auto cache = infer(net, x);
        SmcDerivatives d;
        smc_derivatives(net, cache, x, x_dot, e, p, d);
        worst = std::max(worst, k_r_residual(net, x, x_dot, d));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("property: consequent updates oppose the error") {
    Rng rng(22);
    SmcParams p;
    for (int t = 0; t < 500; ++t) {
        NetworkState net = random_network(rng);
        net.alpha = rng.uniform(0.01, 10.0);
        const auto x = random_input(rng, 3);
        const auto cache = infer(net, x);
        SmcDerivatives d;
        smc_derivatives(net, cache, x, std::vector<double>(3, 0.0), rng.uniform(-1, 1), p, d);
        for (std::size_t r = 0; r < net.rules(); ++r) {
            const double g = net.q * cache.wt_lower[r] + (1 - net.q) * cache.wt_upper[r];
            if (g > 0)
                CHECK(d.b[r] * d.s <= 0.0);
            for (std::size_t i = 0; i < 3; ++i)
                CHECK(d.a[i * net.rules() + r] * d.s * x[i] * g <= 0.0);
        }
    }
}

TEST_CASE("reduction: with alpha_ant = alpha and a sharp sign the consequent laws are the signum laws") {
    Rng rng(23);
    SmcParams p;
    p.rho_ant = 1.0;
    p.delta_s = 1e-12;
    for (int t = 0; t < 300; ++t) {
        NetworkState net = random_network(rng);
        net.alpha = rng.uniform(0.1, 5.0);
        const auto x = random_input(rng, 3);
        double e = rng.uniform(-1, 1);
        if (std::abs(e) < 1e-2)
            e = 0.5;
        SmcDerivatives d;
        smc_derivatives(net, infer(net, x), x, std::vector<double>(3, 0.0), e, p, d);
        CHECK(d.alpha_ant == net.alpha);

        // b_r' = -alpha sgn(e) g_r / sum g^2, a_ri' = x_i b_r'
        const auto ref = reference_infer(net, x);
        const std::size_t n = net.rules();
        std::vector<double> g(n);
        double gg = 0;
        for (std::size_t r = 0; r < n; ++r) {
            g[r] = net.q * ref.wt_lower[r] + (1 - net.q) * ref.wt_upper[r];
            gg += g[r] * g[r];
        }
        for (std::size_t r = 0; r < n; ++r) {
            const double b_dot = -net.alpha * sgn(e) * g[r] / gg;
            CHECK(rel_err(d.b[r], b_dot, 1e-12) < 1e-9);
            for (std::size_t i = 0; i < 3; ++i)
                CHECK(rel_err(d.a[i * n + r], x[i] * b_dot, 1e-12) < 1e-9);
        }
    }
}

TEST_CASE("property: alpha stays under its equilibrium bound and never goes negative") {
    SmcParams p;
    p.nu = 0.05;
    p.gamma = 2.0;
    p.rho_ant = 1e-4;
    Rng rng(24);
    for (int trial = 0; trial < 5; ++trial) {
        NetworkState net = random_network(rng);
        net.alpha = rng.uniform(0.0, 2.0);
        const double alpha0 = net.alpha;
        SmcLearner learner(p);
        double e_max = 0, a_max = alpha0, a_min = alpha0;
        const double w[3] = {rng.uniform(1, 5), rng.uniform(1, 5), rng.uniform(1, 5)};
        for (int k = 0; k < 20000; ++k) {
            const double t = k * p.dt;
            const std::vector<double> x{std::sin(w[0] * t), std::cos(w[1] * t), 0.5 * std::sin(w[2] * t)};
            // Zero rate: centers do not chase the input, so the run stays finite.
            const std::vector<double> x_dot(3, 0.0);
            const double y = 0.8 * std::sin(3 * t) * std::cos(t);
            const auto diag = learner.step(net, x, x_dot, y);
            e_max = std::max(e_max, std::abs(diag.e));
            a_max = std::max(a_max, net.alpha);
            a_min = std::min(a_min, net.alpha);
        }
        CHECK(a_min >= 0.0);
        CHECK(a_max <= std::max(alpha0, 5.0 * e_max / p.nu) + 1e-9);
    }
}

TEST_CASE("determinism: identical inputs give bit-identical trajectories") {
    Rng rng(25);
    const NetworkState start = random_network(rng);
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (int k = 0; k < 2000; ++k) {
        xs.push_back(random_input(rng, 3, 1.0));
        ys.push_back(rng.uniform(-1, 1));
    }
    auto run = [&] {
        NetworkState net = start;
        SmcLearner learner({});
        for (std::size_t k = 0; k < xs.size(); ++k)
            learner.step(net, xs[k], std::vector<double>(3, 0.0), ys[k]);
        return net;
    };
    CHECK(run() == run());
}

TEST_CASE("pure step and learner step agree") {
    Rng rng(26);
    const NetworkState net = random_network(rng);
    const auto x = random_input(rng, 3);
    const auto x_dot = random_input(rng, 3);
    NetworkState in_place = net;
    SmcLearner learner({});
    const auto d1 = learner.step(in_place, x, x_dot, 0.3);
    const auto [pure, d2] = smc_step(net, x, x_dot, 0.3, {});
    CHECK(pure == in_place);
    CHECK(d1.e == d2.e);
    CHECK(d1.k_r_residual == d2.k_r_residual);
}

TEST_CASE("sigma projection") {
    NetworkState net({2});
    net.mfs[0] = {0.0, 2.0, 1.0};
    net.mfs[1] = {0.0, -0.5, 0.5};
    CHECK(project_sigmas(net, 1e-3) == 2);
    CHECK(net.mfs[0].sigma_lower == 1.0);
    CHECK(net.mfs[0].sigma_upper == 2.0);
    CHECK(net.mfs[1].sigma_lower == 1e-3);
    CHECK(project_sigmas(net, 1e-3) == 0);
}

TEST_CASE("overflowing update raises NonFiniteUpdate") {
    Rng rng(27);
    NetworkState net = random_network(rng);
    net.alpha = 1e308;
    SmcLearner learner({});
    const auto x = random_input(rng, 3);
    CHECK_THROWS_AS(learner.step(net, x, std::vector<double>(3, 0.0), 1e6), NonFiniteUpdate);
}
