#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "twoway/spectral.hpp"

using namespace twoway;
using doctest::Approx;

namespace {

double cos_h(double t) { return std::cos(t); }

// tan k = −tanh k gives the positive Dirichlet eigenvalues k² of h = sgn θ on (−1, 1).
double step_eigenvalue(double k_lo, double k_hi) {
    const double k = oracle::root([](double k) { return std::tan(k) + std::tanh(k); }, k_lo, k_hi);
    return k * k;
}

}  // namespace

TEST_CASE("mode numbering skips zero") {
    CHECK(Spectrum::position(-3, 3) == 0);
    CHECK(Spectrum::position(-1, 3) == 2);
    CHECK(Spectrum::position(1, 3) == 3);
    CHECK(Spectrum::position(3, 3) == 5);
    for (int p = 0; p < 6; ++p) CHECK(Spectrum::position(Spectrum::mode_number(p, 3), 3) == p);
}

TEST_CASE("periodic cos eigenvalues agree with an ODE shooting oracle") {
    const Spectrum s = solve_spectrum(presets::periodic_cos(), 8);
    // The even sector holds λ₂ and λ₄; the odd one λ₁ and λ₃.
    CHECK(s.lambda(2) == Approx(oracle::even_periodic_eigenvalue(cos_h, 8.0, 13.0)).epsilon(1e-10));
    CHECK(s.lambda(4) == Approx(oracle::even_periodic_eigenvalue(cos_h, 30.0, 40.0)).epsilon(1e-10));
    for (int j = 1; j <= 8; ++j) CHECK(s.lambda(-j) == Approx(-s.lambda(j)).epsilon(1e-12));
    CHECK(s.has_zero_mode);
    CHECK(s.has_g);
}

TEST_CASE("linear weight eigenvalues agree with Airy-function roots") {
    const Spectrum s = solve_spectrum(presets::linear(), 6);
    const std::vector<std::pair<double, double>> brackets{{12.0, 13.0}, {68.0, 69.0}, {168.0, 169.0}};
    for (int j = 1; j <= 3; ++j) {
        const auto [lo, hi] = brackets[static_cast<std::size_t>(j - 1)];
        const double expected = oracle::linear_dirichlet_eigenvalue(lo, hi);
        CHECK(s.lambda(j) == Approx(expected).epsilon(1e-9));
        CHECK(s.lambda(-j) == Approx(-expected).epsilon(1e-9));
    }
    CHECK_FALSE(s.has_zero_mode);
}

TEST_CASE("step weight eigenvalues agree with the matching condition tan k = -tanh k") {
    const Spectrum s = solve_spectrum(presets::step(), 4);
    const double pi = std::numbers::pi;
    CHECK(s.lambda(1) == Approx(step_eigenvalue(pi / 2 + 1e-9, pi - 1e-9)).epsilon(1e-8));
    CHECK(s.lambda(2) == Approx(step_eigenvalue(3 * pi / 2 + 1e-9, 2 * pi - 1e-9)).epsilon(1e-8));
}

TEST_CASE("modes are h-biorthonormal with sgn(lambda) normalization and A-norm |lambda|") {
    for (const ProblemSpec& spec : {presets::periodic_cos(), presets::cubic(), presets::step()}) {
        const Spectrum s = solve_spectrum(spec, 10);
        const Eigen::MatrixXd gram = s.values.transpose() * s.grid.signed_weights.asDiagonal() * s.values;
        const Eigen::MatrixXd signed_gram = s.eigenvalues.cwiseSign().asDiagonal() * gram;
        CHECK((signed_gram - Eigen::MatrixXd::Identity(20, 20)).lpNorm<Eigen::Infinity>() < 1e-8);
        for (int j : {-10, -1, 1, 10}) {
            const Eigen::VectorXd v = s.mode(j);
            CHECK(inner_A(v, v, s.grid) == Approx(std::abs(s.lambda(j))).epsilon(1e-7));
        }
        CHECK(s.residuals.maxCoeff() < 1e-6);
    }
}

TEST_CASE("periodic cos modes obey the half-period symmetry") {
    const Spectrum s = solve_spectrum(presets::periodic_cos(), 12);
    std::vector<double> theta, shifted;
    for (int i = 0; i < 50; ++i) {
        theta.push_back(-std::numbers::pi + 0.1234 + i * 0.06);
        shifted.push_back(theta.back() + std::numbers::pi);
    }
    const Eigen::MatrixXd v = s.evaluate(theta), w = s.evaluate(shifted);
    for (int j = 1; j <= 12; ++j)
        CHECK((w.col(s.position(-j)) - v.col(s.position(j))).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("even mode shape agrees with the shooting oracle") {
    const Spectrum s = solve_spectrum(presets::periodic_cos(), 4);
    const double lambda = s.lambda(2);
    const std::vector<double> theta{0.0, 0.4, 1.3, 2.2, 3.0};
    const Eigen::VectorXd v = s.evaluate(theta).col(s.position(2));
    for (std::size_t i = 0; i < theta.size(); ++i)
        CHECK(v(static_cast<Eigen::Index>(i)) / v(0) ==
              Approx(oracle::even_periodic_value(cos_h, lambda, theta[i])).epsilon(1e-8).scale(1.0));
}

TEST_CASE("companion function g solves A g = -h with zero mean") {
    const Spectrum s = solve_spectrum(presets::periodic_cos(), 4);
    REQUIRE(s.has_g);
    // −g″ = −cos θ has the zero-mean solution g = −cos θ.
    const Eigen::VectorXd expected = -s.grid.nodes.array().cos().matrix();
    CHECK((s.g_values - expected).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK_FALSE(solve_spectrum(presets::periodic_cos_r(0.1), 4).has_g);
}

TEST_CASE("half-range moments vanish in the decoupled sector") {
    const Spectrum s = solve_spectrum(presets::periodic_cos(), 6);
    CHECK(std::abs(half_range_moment(s, 1)) < 1e-12);
    CHECK(std::abs(half_range_moment(s, 2)) > 1e-2);
}

TEST_CASE("Wronskian form of opposite-sign overlaps") {
    for (const ProblemSpec& spec : {presets::linear(), presets::cubic()}) {
        const Spectrum s = solve_spectrum(spec, 6);
        for (auto [j, k] : {std::pair{1, -1}, {1, -2}, {2, -1}}) {
            const auto [lhs, rhs] = wronskian_overlap_check(s, j, k);
            CHECK(lhs == Approx(rhs).epsilon(1e-6));
        }
    }
}

TEST_CASE("leading subsets, resampling and CSV export") {
    const Spectrum s = solve_spectrum(presets::linear(), 8);
    const Spectrum lead = s.leading(3);
    CHECK(lead.N == 3);
    CHECK(lead.lambda(3) == s.lambda(3));
    CHECK(lead.lambda(-3) == s.lambda(-3));
    const std::string csv = spectrum_csv(s);
    CHECK(csv.rfind("j,lambda,residual\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
    CHECK(samples_csv(lead).rfind("theta,h,v_-3,v_-2,v_-1,v_1,v_2,v_3\n", 0) == 0);
}

TEST_CASE("spectral options") {
    SpectralOptions opt;
    opt.min_nodes = 5000;
    const Spectrum s = solve_spectrum(presets::cubic(), 4, opt);
    CHECK(s.grid.size() >= 5000);
    CHECK_THROWS_AS(solve_spectrum(presets::cubic(), 0), Error);
}
