#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "twoway/operators.hpp"

using namespace twoway;
using doctest::Approx;

namespace {

std::shared_ptr<const Spectrum> spectrum(const ProblemSpec& spec, int N) {
    return std::make_shared<const Spectrum>(solve_spectrum(spec, N));
}

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uni(rng);
    return v;
}

}  // namespace

TEST_CASE("zero-block expansion of two-level data has a closed form for h = cos") {
    // With g = −cos θ the conditions ∫(w − c − d g_L) h = 0 and ∫(w − c − d g_L) g h = 0 give
    // d = 2(ρ₂ − ρ₁)/(π + 2L) and c = (ρ₁ + ρ₂)/2 − d L/2.
    const double pi = std::numbers::pi;
    for (double L : {0.5, 1.0, 7.0}) {
        ProblemSpec spec = presets::periodic_cos(L);
        spec.w.rho_plus = 1.0;
        spec.w.rho_minus = 2.0;
        const OperatorSet ops = build_operators(spectrum(spec, 16), L, Framework::extended);
        const Expansion e = expand(boundary_samples(spec, ops.grid()), ops);
        const double d = 2.0 / (pi + 2.0 * L);
        CHECK(e.d == Approx(d).epsilon(1e-12));
        CHECK(e.c == Approx(1.5 - d * L / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("extended projection kills the complement and fixes the modes") {
    const OperatorSet ops = build_operators(spectrum(presets::periodic_cos(), 16), 1.0, Framework::extended);
    const Eigen::Index n = ops.grid().size();
    CHECK(norm_abs_h(apply_P(Eigen::VectorXd::Ones(n), ops), ops.grid()) < 1e-13);
    CHECK(norm_abs_h(apply_P(ops.g_L, ops), ops.grid()) < 1e-13);
    for (int j : {-16, -1, 1, 5}) {
        const Eigen::VectorXd v = ops.spectrum->mode(j);
        CHECK(norm_abs_h(apply_P(v, ops) - v, ops.grid()) < 1e-12);
    }
    const Eigen::VectorXd w = random_vector(n, 7);
    const Eigen::VectorXd pw = apply_P(w, ops);
    CHECK(norm_abs_h(apply_P(pw, ops) - pw, ops.grid()) < 1e-12 * norm_abs_h(pw, ops.grid()));
}

TEST_CASE("expand and reconstruct are inverse on the span") {
    const OperatorSet ops = build_operators(spectrum(presets::periodic_cos(), 12), 2.0, Framework::extended);
    Expansion e;
    e.c = 0.3;
    e.d = -1.2;
    e.a = random_vector(24, 3);
    e.framework = Framework::extended;
    const Expansion back = expand(reconstruct(e, ops), ops);
    CHECK(back.c == Approx(e.c).epsilon(1e-11));
    CHECK(back.d == Approx(e.d).epsilon(1e-11));
    CHECK((back.a - e.a).norm() < 1e-11);
    CHECK((synthesize(e.a, ops) - ops.spectrum->values * e.a).norm() < 1e-12);
}

TEST_CASE("simple framework on an absorbing problem") {
    const OperatorSet ops = build_operators(spectrum(presets::linear(), 10), 1.0, Framework::simple);
    CHECK(default_framework(presets::linear()) == Framework::simple);
    CHECK(default_framework(presets::periodic_cos()) == Framework::extended);
    const Eigen::VectorXd v = ops.spectrum->mode(3);
    CHECK(norm_abs_h(apply_P(v, ops) - v, ops.grid()) < 1e-12);
    CHECK_THROWS_AS(build_operators(ops.spectrum, 1.0, Framework::extended), Error);
}

TEST_CASE("V and W are complementary on span{v_j}") {
    const OperatorSet ops = build_operators(spectrum(presets::cubic(), 12), 1.0, Framework::simple);
    const VWMatrices vw = assemble_VW(ops);
    CHECK((vw.V + vw.W - Eigen::MatrixXd::Identity(24, 24)).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("W_L acts only across the sign change") {
    const OperatorSet ops = build_operators(spectrum(presets::linear(), 8), 0.5, Framework::simple);
    Expansion e;
    e.a = Eigen::VectorXd::Zero(16);
    e.a(ops.spectrum->position(2)) = 1.0;
    const Eigen::VectorXd wl = apply_WL(e, ops);
    const Eigen::VectorXd v = ops.spectrum->mode(2);
    const double factor = 1.0 - std::exp(-ops.spectrum->lambda(2) * 0.5);
    // A positive mode is moved onto h < 0 and scaled by (1 − e^{−λL}).
    CHECK((wl - factor * v.cwiseProduct(ops.grid().minus_mask())).lpNorm<Eigen::Infinity>() < 1e-13);
    CHECK(ops.decay(ops.spectrum->position(2)) == Approx(1.0 - factor));
}

TEST_CASE("thresholded framework moves small modes into the complement") {
    const auto s = spectrum(presets::periodic_cos_r(0.05), 12);
    const OperatorSet ops = build_operators(s, 1.0, Framework::thresholded, 2.0);
    CHECK(ops.small_modes.size() >= 1);
    for (int p : ops.small_modes) {
        CHECK(std::abs(s->eigenvalues(p)) < 2.0);
        CHECK(ops.is_small(p));
        CHECK(norm_abs_h(apply_P(ops.traces.col(p), ops), ops.grid()) < 1e-12);
    }
    const Eigen::Index n = ops.grid().size();
    CHECK(norm_abs_h(apply_P(Eigen::VectorXd::Ones(n), ops), ops.grid()) < 1e-12);
    CHECK(norm_abs_h(apply_P_lambda(Eigen::VectorXd::Ones(n), 2.0, ops), ops.grid()) < 1e-12);
    CHECK(ops.zero_block_condition >= 1.0);
    CHECK_THROWS_AS(build_operators(s, 1.0, Framework::thresholded, 0.0), Error);
    CHECK_THROWS_AS(build_operators(s, 1.0, Framework::thresholded, 1e9), Error);
}

TEST_CASE("boundary samples follow the sign of h") {
    ProblemSpec spec = presets::cubic();
    spec.w.rho_plus = 4.0;
    spec.w.rho_minus = -1.0;
    const Quadrature g = build_grid(spec, 256);
    const Eigen::VectorXd w = boundary_samples(spec, g);
    for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(w(i) == (g.h(i) > 0.0 ? 4.0 : -1.0));
    CHECK(norm_abs_h(Eigen::VectorXd::Ones(g.size()), g) == Approx(std::sqrt(0.5)).epsilon(1e-13));
}
