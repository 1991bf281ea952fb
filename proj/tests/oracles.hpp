#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of them touch the library's discretizations.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace oracle {

using State = std::array<double, 2>;

/// Integrates −v″ = λ h(θ) v from θ = 0 with the given initial state to θ_end.
inline State shoot(const std::function<double(double)>& h, double lambda, State start, double theta_end) {
    namespace ode = boost::numeric::odeint;
    auto rhs = [&](const State& y, State& dy, double t) {
        dy[0] = y[1];
        dy[1] = -lambda * h(t) * y[0];
    };
    auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, start, 0.0, theta_end, 1e-3);
    return start;
}

/// Root of f on [lo, hi] (sign change required) to about 1e-14 relative.
inline double root(const std::function<double(double)>& f, double lo, double hi) {
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)); };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    return 0.5 * (a + b);
}

/// Eigenvalue of an even 2π-periodic mode of −v″ = λ h v for even h: v′(0) = v′(π) = 0.
inline double even_periodic_eigenvalue(const std::function<double(double)>& h, double lo, double hi) {
    return root([&](double lam) { return shoot(h, lam, {1.0, 0.0}, std::numbers::pi)[1]; }, lo, hi);
}

/// Even periodic eigenfunction samples, v(0) = 1.
inline double even_periodic_value(const std::function<double(double)>& h, double lambda, double theta) {
    return shoot(h, lambda, {1.0, 0.0}, std::abs(theta))[0];
}

/// Dirichlet eigenvalue of −v″ = λ θ v on (−1, 1) from Airy functions: with s = λ^{1/3},
/// v = Bi(s) Ai(−sθ) − Ai(s) Bi(−sθ) vanishes at θ = −1, so λ is a root of v(1).
inline double airy_determinant(double lambda) {
    using boost::math::airy_ai;
    using boost::math::airy_bi;
    const double s = std::cbrt(lambda);
    return airy_bi(s) * airy_ai(-s) - airy_ai(s) * airy_bi(-s);
}

inline double linear_dirichlet_eigenvalue(double lo, double hi) {
    return root(airy_determinant, lo, hi);
}

}  // namespace oracle
