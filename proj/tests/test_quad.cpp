#include <cmath>
#include <numbers>

#include "doctest.h"
#include "twoway/quadrature.hpp"

using namespace twoway;
using doctest::Approx;

namespace {

double monomial_integral(int k) { return k % 2 ? 0.0 : 2.0 / (k + 1); }

}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials up to degree 2n-1 exactly") {
    for (int n : {1, 2, 5, 16, 33}) {
        const Rule r = gauss_legendre(n);
        REQUIRE(r.x.size() == static_cast<std::size_t>(n));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += r.w[i] * std::pow(r.x[i], k);
            CHECK(sum == Approx(monomial_integral(k)).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("Gauss-Lobatto includes the endpoints and is exact to degree 2n-3") {
    for (int n : {2, 3, 8, 33}) {
        const Rule r = gauss_lobatto(n);
        CHECK(r.x.front() == Approx(-1.0));
        CHECK(r.x.back() == Approx(1.0));
        for (int k = 0; k <= 2 * n - 3; ++k) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += r.w[i] * std::pow(r.x[i], k);
            CHECK(sum == Approx(monomial_integral(k)).epsilon(1e-13).scale(1.0));
        }
    }
    CHECK_THROWS_AS(gauss_lobatto(1), Error);
}

TEST_CASE("differentiation matrix is exact on polynomials of the node degree") {
    const Rule r = gauss_lobatto(12);
    const Eigen::MatrixXd D = differentiation_matrix(r.x);
    Eigen::VectorXd u(12), du(12);
    for (int i = 0; i < 12; ++i) {
        const double x = r.x[i];
        u(i) = std::pow(x, 11) - 3.0 * x * x + 2.0;
        du(i) = 11.0 * std::pow(x, 10) - 6.0 * x;
    }
    CHECK((D * u - du).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("grids split at turning points and keep nodes off them") {
    const ProblemSpec spec = presets::cubic();
    const Quadrature g = build_grid(spec, 512);
    bool has_zero_break = false;
    for (double b : g.breaks) has_zero_break = has_zero_break || b == 0.0;
    CHECK(has_zero_break);
    for (Eigen::Index i = 0; i < g.size(); ++i) CHECK(g.h(i) != 0.0);
    CHECK(g.integrate(Eigen::VectorXd::Ones(g.size())) == Approx(2.0).epsilon(1e-14));
    CHECK(g.pos.size() + g.neg.size() == static_cast<std::size_t>(g.size()));
    CHECK((g.plus_mask() + g.minus_mask() - Eigen::VectorXd::Ones(g.size())).norm() == 0.0);
}

TEST_CASE("graded panels still integrate smooth functions to near machine precision") {
    const Quadrature g = build_grid(presets::periodic_cos(), 1024);
    const auto f = g.sample([](double t) { return std::exp(std::sin(t)); });
    // ∫ e^{sin θ} over a period is 2π I₀(1).
    CHECK(g.integrate(f) == Approx(2.0 * std::numbers::pi * std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-13));
    CHECK(g.signed_weights.sum() == Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(g.abs_h_weights.sum() == Approx(4.0).epsilon(1e-13));
}

TEST_CASE("weighted inner products match closed forms") {
    const Quadrature g = build_grid(presets::periodic_cos(), 1024);
    const auto s = g.sample([](double t) { return std::sin(t); });
    const auto c = g.sample([](double t) { return std::cos(t); });
    const auto one = Eigen::VectorXd::Ones(g.size());
    CHECK(inner_A(s, s, g) == Approx(std::numbers::pi).epsilon(1e-12));
    CHECK(inner_signed(c, one, g) == Approx(std::numbers::pi).epsilon(1e-12));
    // ∫ |cos θ| cos² θ = 8/3
    CHECK(inner_abs_h(c, c, g) == Approx(8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("panelwise derivative and endpoint extrapolation") {
    const ProblemSpec spec = presets::linear();
    const Quadrature g = build_grid(spec, 256);
    const auto u = g.sample([](double t) { return std::sin(3.0 * t) + t * t; });
    const auto du = g.sample([](double t) { return 3.0 * std::cos(3.0 * t) + 2.0 * t; });
    CHECK((g.derivative(u) - du).lpNorm<Eigen::Infinity>() < 1e-9);
    const auto [left, right] = g.endpoint_values(u);
    CHECK(left == Approx(std::sin(-3.0) + 1.0).epsilon(1e-11));
    CHECK(right == Approx(std::sin(3.0) + 1.0).epsilon(1e-11));
}
