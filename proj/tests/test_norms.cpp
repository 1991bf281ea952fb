#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "twoway/norms.hpp"

using namespace twoway;
using doctest::Approx;

namespace {

OperatorSet operators(const ProblemSpec& spec, int N, double L, Framework f = Framework::simple) {
    return build_operators(std::make_shared<const Spectrum>(solve_spectrum(spec, N)), L, f);
}

}  // namespace

TEST_CASE("closed-form projection norm for h = cos at L = 1") {
    const PNormAnalytic p = p_norm_analytic_periodic(1.0);
    CHECK(p.value == Approx(4.0 * std::sqrt(6.0) / (3.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(p.sigma2 == Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-15));
    CHECK(p.sigma1 == Approx(std::sqrt(8.0 / 3.0 + std::numbers::pi + 1.0)).epsilon(1e-15));
    CHECK(p.value >= 1.0);
}

TEST_CASE("numeric projection norm matches the closed form across L") {
    const auto s = std::make_shared<const Spectrum>(solve_spectrum(presets::periodic_cos(), 16));
    for (double L : {0.3, 1.0, 4.0}) {
        const PNormNumeric num = p_norm_numeric(build_operators(s, L, Framework::extended));
        const PNormAnalytic exact = p_norm_analytic_periodic(L);
        CHECK(num.value == Approx(exact.value).epsilon(1e-9));
        CHECK(num.rho == Approx(exact.rho_sup).epsilon(1e-9));
    }
}

TEST_CASE("power-law fit recovers synthetic parameters") {
    const std::vector<double> N{25, 50, 100, 200, 400};
    std::vector<double> y;
    for (double n : N) y.push_back(0.9 - 1.1 * std::pow(n, -0.3));
    const PowerLawFit fit = powerlaw_fit(N, y);
    CHECK(fit.converged);
    CHECK(fit.A0 == Approx(0.9).epsilon(1e-8));
    CHECK(fit.B0 == Approx(1.1).epsilon(1e-8));
    CHECK(fit.nu == Approx(0.3).epsilon(1e-8));
    CHECK(fit.residual < 1e-10);
    CHECK_THROWS_AS(powerlaw_fit({1, 2}, {0.1, 0.2}), Error);
}

TEST_CASE("truncated W norms grow with N and the L factors only shrink them") {
    const OperatorSet ops = operators(presets::linear(), 60, 1.0);
    const std::vector<int> Ns{10, 20, 40, 60};
    const NormEstimate drop = wln_norm_sweep(ops, Ns, LMode::drop_transcendental);
    const NormEstimate keep = wln_norm_sweep(ops, Ns, LMode::include_L);
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (i) CHECK(drop.norms_squared[i] > drop.norms_squared[i - 1]);
        CHECK(keep.norms_squared[i] <= drop.norms_squared[i] * (1.0 + 1e-12));
        CHECK(drop.norms_squared[i] > 0.0);
    }
    CHECK(wln_norm_squared(ops, 20, LMode::drop_transcendental) == Approx(drop.norms_squared[1]));
    CHECK(norms_csv(drop).rfind("N,norm_squared\n", 0) == 0);
}

TEST_CASE("the two sides of the W-norm identity agree") {
    const OperatorSet ops = operators(presets::cubic(), 24, 1.0);
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd a(48);
        for (Eigen::Index i = 0; i < 48; ++i) a(i) = gauss(rng);
        const auto [lhs, rhs] = identity_check(a, ops);
        CHECK(lhs == Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("norm equivalence ratios are finite and ordered") {
    const OperatorSet ops = operators(presets::linear(), 16, 1.0);
    const auto [lo, hi] = norm_equivalence_range(ops, 50, 9);
    CHECK(lo > 0.0);
    CHECK(lo <= hi);
    CHECK(std::isfinite(hi));
}

TEST_CASE("opposite-sign overlaps decay with the turning-point exponent") {
    // Expected slope −(3m+4)/(4m+8): m = 1 gives −7/12, m = 3 gives −13/20.
    const OverlapSlope lin = overlap_decay_slope(operators(presets::linear(), 100, 1.0), 1);
    CHECK(lin.expected == Approx(-7.0 / 12.0));
    CHECK(lin.slope == Approx(lin.expected).epsilon(0.05 / 0.58));
    const OverlapSlope cub = overlap_decay_slope(operators(presets::cubic(), 100, 1.0), -1);
    CHECK(cub.expected == Approx(-0.65));
    CHECK(cub.slope == Approx(cub.expected).epsilon(0.05 / 0.65));
    CHECK_THROWS_AS(overlap_decay_slope(operators(presets::step(), 10, 1.0), 1), Error);
}

TEST_CASE("iteration operator norm is below one for the periodic problem") {
    const double pw = pw_norm(operators(presets::periodic_cos(), 32, 1.0, Framework::extended));
    CHECK(pw > 0.5);
    CHECK(pw < 0.9);
}

TEST_CASE("lower bound on the plain iteration for cos - r") {
    const Spectrum s = solve_spectrum(presets::periodic_cos_r(0.02), 16);
    const LowerBound far = wlp_lower_bound(s, 20.0);
    CHECK(far.bound > 1.0);
    CHECK(far.lambda_R == Approx(0.04).epsilon(0.01));
    const LowerBound near = wlp_lower_bound(s, 1.0);
    CHECK(near.bound < far.bound);
    CHECK(near.normalization_ratio == Approx(far.normalization_ratio));
    CHECK_THROWS_AS(wlp_lower_bound(solve_spectrum(presets::periodic_cos(), 4), 1.0), Error);
}
