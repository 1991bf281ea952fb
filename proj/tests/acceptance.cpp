// Acceptance checks 1-10. Each prints its measurements followed by one
// "CRITERION k: PASS|FAIL" line; the exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "twoway/norms.hpp"
#include "twoway/periodic.hpp"

using namespace twoway;

namespace {

std::shared_ptr<const Spectrum> spectrum(const ProblemSpec& spec, int N) {
    return std::make_shared<const Spectrum>(solve_spectrum(spec, N));
}

ProblemSpec with_data(ProblemSpec spec, double rho1, double rho2) {
    spec.w.rho_plus = rho1;
    spec.w.rho_minus = rho2;
    return spec;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

void note(const char* fmt, auto... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
}

double default_threshold() { return first_coupled_eigenvalue(*spectrum(presets::periodic_cos(), 16)) / 2.0; }

bool projection_norm() {
    const PNormAnalytic exact = p_norm_analytic_periodic(1.0);
    const double closed = 4.0 * std::sqrt(6.0) / (3.0 * std::numbers::pi);
    const PNormNumeric numeric = p_norm_numeric(build_operators(spectrum(presets::periodic_cos(), 32), 1.0,
                                                                Framework::extended));
    note("analytic %.10f, 4*sqrt(6)/(3*pi) = %.10f, numeric %.10f", exact.value, closed, numeric.value);
    return within(exact.value, closed, 1e-4) && within(exact.value, 1.0395, 1e-4) &&
           within(numeric.value, exact.value, 1e-3);
}

bool spectrum_checks() {
    const auto s = spectrum(presets::periodic_cos(), 32);
    const double lambda1 = first_coupled_eigenvalue(*s);
    note("lambda_1 = %.8f, 1/lambda_1 = %.6f", lambda1, 1.0 / lambda1);

    std::vector<double> theta, shifted;
    for (int i = 0; i < 400; ++i) {
        theta.push_back(-std::numbers::pi + (i + 0.5) * std::numbers::pi / 400.0);
        shifted.push_back(theta.back() + std::numbers::pi);
    }
    const Eigen::MatrixXd v = s->evaluate(theta), w = s->evaluate(shifted);
    double symmetry = 0.0;
    for (int j = 1; j <= 32; ++j) {
        symmetry = std::max(symmetry, (w.col(s->position(-j)) - v.col(s->position(j))).lpNorm<Eigen::Infinity>());
        symmetry = std::max(symmetry, (w.col(s->position(j)) - v.col(s->position(-j))).lpNorm<Eigen::Infinity>());
    }
    const Eigen::MatrixXd gram = s->eigenvalues.cwiseSign().asDiagonal() *
                                 (s->values.transpose() * s->grid.signed_weights.asDiagonal() * s->values);
    const double biorth = (gram - Eigen::MatrixXd::Identity(64, 64)).lpNorm<Eigen::Infinity>();
    note("max symmetry defect %.3e, max biorthogonality defect %.3e", symmetry, biorth);
    return within(1.0 / lambda1, 0.094, 0.002) && symmetry <= 1e-6 && biorth <= 1e-6;
}

bool coefficient_constants() {
    const auto s = spectrum(presets::periodic_cos(), 200);
    const OperatorSet ops = build_operators(s, 1.0, Framework::extended);
    const LargeLApprox ap = large_L_approx(ops, 1.0);
    const SeriesCoefficients sc = series_coefficients(ops, 1.0, 2.0);
    note("N = 200 per sign, tail ratio %.2e", sc.tail_ratio);
    note("A(inf) = %.5f, B(inf) = %.5f", ap.A_inf, ap.B_inf);
    note("A one-exponential: %.5f - %.5f e^{-lambda_1 L}", ap.A_inf, ap.A_exp);
    note("B one-exponential: %.5f - %.5f e^{-lambda_1 L} (outer factor only; both factors: %.5f)", ap.B_inf,
         ap.B_exp_outer, ap.B_exp);
    return within(ap.A_inf, 0.070, 0.002) && within(ap.B_inf, 0.035, 0.002) && within(ap.A_inf, 0.0699, 0.003) &&
           within(ap.A_exp, 0.0446, 0.003) && within(ap.B_inf, 0.0349, 0.003) && within(ap.B_exp_outer, 0.016, 0.003);
}

bool transport_formulas() {
    const auto big = spectrum(presets::periodic_cos(), 200);
    const LargeLApprox ap = large_L_approx(build_operators(big, 1.0, Framework::extended), 1.0);
    const LargeLPolynomials p = large_L_polynomials(ap.A_inf, ap.B_inf);
    note("d L / drho: %.4f u + %.4f u^2 + %.5f u^3", p.d_u, p.d_u2, p.d_u3);
    note("  (iteration-consistent second order: %.4f, %.4f, %.5f)", p.d_u_iter, p.d_u2_iter, p.d_u3_iter);
    note("c: rho_bar - %.4f u drho - %.4f u^2 drho", p.c_u, p.c_u2);
    const DiffusivityEstimate est = diffusivity_estimate(spectrum(presets::periodic_cos(), 32), {20.0, 50.0, 100.0},
                                                         1.0, 2.0);
    for (std::size_t i = 0; i < est.L_values.size(); ++i)
        note("L = %g: flux %.8f, -flux L / drho = %.5f", est.L_values[i], est.flux[i],
             -est.flux[i] * est.L_values[i]);
    note("diffusivity fit D = %.6f (extrapolation length %.4f), naive mean %.4f", est.D, est.extrapolation_length,
         est.D_naive);
    return within(p.d_u, 0.97, 0.01) && within(p.d_u2, 0.04, 0.01) && within(p.d_u3, -0.005, 0.005) &&
           within(p.c_u, 0.47, 0.01) && within(p.c_u2, 0.035, 0.01) && est.all_converged &&
           within(est.D, std::numbers::pi, 0.05 * std::numbers::pi);
}

bool lambda_r_law() {
    std::vector<double> cubic_ratio, square_ratio;
    for (double r : {0.05, 0.1, 0.2}) {
        const LambdaR lr = lambda_R(*spectrum(presets::periodic_cos_r(r), 32));
        cubic_ratio.push_back(std::abs(lr.lambda_R - 2.0 * r) / (r * r * r));
        square_ratio.push_back(lr.deviation_norm / (r * r));
        note("r = %.2f: lambda_R = %.8f, |lambda_R - 2r| / r^3 = %.4f, |v_R - 1 - 2r cos| / r^2 = %.4f", r,
             lr.lambda_R, cubic_ratio.back(), square_ratio.back());
    }
    auto spread = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    };
    const double C = *std::max_element(cubic_ratio.begin(), cubic_ratio.end());
    note("single constant C = %.4f; spread of r^3 ratios %.3f, of r^2 ratios %.3f (limit 1.5)", C,
         spread(cubic_ratio), spread(square_ratio));
    return spread(cubic_ratio) <= 1.5 && spread(square_ratio) <= 1.5;
}

bool norm_diagnostics() {
    const std::vector<int> Ns{25, 50, 100, 200, 400};
    const std::vector<std::pair<std::string, double>> table{
        {"periodic-cos", 0.884}, {"step", 5.33}, {"linear", 0.916}, {"cubic", 0.187}};
    std::map<std::string, double> at100;
    bool ok = true;
    for (const auto& [name, A0] : table) {
        const auto s = spectrum(presets::by_name(name), Ns.back());
        const NormEstimate est =
            wln_norm_sweep(build_operators(s, 1.0, Framework::simple), Ns, LMode::drop_transcendental);
        bool monotone = true;
        for (std::size_t i = 1; i < Ns.size(); ++i)
            monotone = monotone && est.norms_squared[i] > est.norms_squared[i - 1];
        const PowerLawFit fit = powerlaw_fit({25, 50, 100, 200, 400}, est.norms_squared);
        at100[name] = est.norms_squared[2];
        const bool fit_ok = fit.converged && within(fit.A0, A0, 0.1);
        note("%-12s |W|^2 = %.4f %.4f %.4f %.4f %.4f; monotone %s; A0 = %.4f (table %.3f, %s), nu = %.3f",
             name.c_str(), est.norms_squared[0], est.norms_squared[1], est.norms_squared[2], est.norms_squared[3],
             est.norms_squared[4], monotone ? "yes" : "no", fit.A0, A0, fit_ok ? "within 0.1" : "outside 0.1",
             fit.nu);
        ok = ok && monotone && fit_ok;
        if (name == "periodic-cos")
            for (double v : est.norms_squared) ok = ok && v < 0.884;
    }
    const bool order = at100["step"] > at100["linear"] && at100["linear"] >= at100["periodic-cos"] &&
                       at100["periodic-cos"] > at100["cubic"];
    note("ordering at N = 100 (step > linear >= cos > cubic): %s", order ? "holds" : "violated");
    return ok && order;
}

bool oracle_equivalence() {
    const double threshold = default_threshold();
    bool ok = true;
    int eligible = 0;
    for (const std::string& name : presets::names()) {
        const ProblemSpec spec = presets::by_name(name, 1.0, 0.1);
        const Framework f = spec.h.kind == WeightKind::cos_minus_r ? Framework::thresholded : default_framework(spec);
        const OperatorSet ops = build_operators(spectrum(spec, 32), 1.0, f, f == Framework::thresholded ? threshold : 0);
        const double pw = pw_norm(ops);
        if (!(pw < 0.9)) {
            note("%-15s |P_N W_L,N| = %.4f >= 0.9, outside the criterion's scope", name.c_str(), pw);
            continue;
        }
        ++eligible;
        double worst = 0.0;
        bool converged = true;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const SyntheticData data = random_trace_data(ops, seed);
            const SolutionCoefficients series = neumann_solve(data.w, ops);
            const auto traced = [&](const Quadrature& g) { return boundary_trace(data.exact, ops, g); };
            const SolutionCoefficients direct = direct_solve(traced, ops).solution;
            converged = converged && series.converged;
            worst = std::max({worst, std::abs(series.c - direct.c), std::abs(series.d - direct.d),
                              (series.a - direct.a).lpNorm<Eigen::Infinity>()});
        }
        note("%-15s |P_N W_L,N| = %.4f, framework %s, max coefficient difference %.3e over 5 draws", name.c_str(), pw,
             framework_name(f), worst);
        ok = ok && converged && worst <= 1e-5;
    }
    return ok && eligible > 0;
}

bool identity_suite() {
    bool ok = true;
    const OperatorSet ops = build_operators(spectrum(presets::linear(), 32), 1.0, Framework::simple);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd a(64);
        for (Eigen::Index i = 0; i < 64; ++i) a(i) = gauss(rng);
        const auto [lhs, rhs] = identity_check(a, ops);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    note("W-norm identity: max relative defect %.3e over 100 vectors", worst);
    ok = ok && worst <= 1e-8;
    for (const char* name : {"linear", "cubic"}) {
        const auto s = spectrum(presets::by_name(name), 100);
        for (auto [j, k] : {std::pair{1, -1}, {1, -2}, {2, -1}}) {
            const auto [lhs, rhs] = wronskian_overlap_check(*s, j, k);
            const double rel = std::abs(lhs - rhs) / std::abs(rhs);
            note("%-6s Wronskian (%d,%d): %.8e vs %.8e, relative %.2e", name, j, k, lhs, rhs, rel);
            ok = ok && rel <= 1e-3;
        }
        const OverlapSlope slope = overlap_decay_slope(build_operators(s, 1.0, Framework::simple), 1);
        note("%-6s overlap slope %.4f (expected %.4f, %d points)", name, slope.slope, slope.expected,
             slope.points);
        ok = ok && within(slope.slope, slope.expected, 0.1);
    }
    return ok;
}

bool divergence_restoration() {
    const ProblemSpec spec = with_data(presets::periodic_cos_r(0.02, 20.0), 1.0, 2.0);
    const auto s = spectrum(spec, 32);
    const LowerBound lb = wlp_lower_bound(*s, 20.0);
    const OperatorSet plain = build_operators(s, 20.0, Framework::extended);
    const SolutionCoefficients diverging = neumann_solve(boundary_samples(spec, plain.grid()), plain);
    const double threshold = default_threshold();
    const OperatorSet fixed = build_operators(s, 20.0, Framework::thresholded, threshold);
    const SolutionCoefficients restored = neumann_solve(boundary_samples(spec, fixed.grid()), fixed);
    note("lower bound on |W_L P| = %.4f (lambda_R = %.6f)", lb.bound, lb.lambda_R);
    note("plain projection: converged %s after %d orders, last ratio %.3f", diverging.converged ? "yes" : "no",
         diverging.iterations, diverging.ratio);
    note("threshold %.4f (%zu small modes): converged %s after %d orders, ratio %.3f, c = %.7f", threshold,
         fixed.small_modes.size(), restored.converged ? "yes" : "no", restored.iterations, restored.ratio,
         restored.c);
    return lb.bound > 1.0 && !diverging.converged && restored.converged;
}

bool trivial_and_physical() {
    const auto s = spectrum(presets::periodic_cos(), 32);
    const OperatorSet ops = build_operators(s, 1.0, Framework::extended);
    std::vector<double> theta;
    for (int i = 0; i < 64; ++i) theta.push_back(-std::numbers::pi + (i + 0.5) * 2.0 * std::numbers::pi / 64.0);

    const ProblemSpec flat = with_data(presets::periodic_cos(), 1.3, 1.3);
    const SolutionCoefficients constant = neumann_solve(boundary_samples(flat, ops.grid()), ops);
    double defect = 0.0;
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0})
        defect = std::max(defect, (evaluate(constant, ops, x, theta).array() - 1.3).abs().maxCoeff());
    note("equal data: max |f - rho| = %.3e", defect);

    const ProblemSpec spec = with_data(presets::periodic_cos(), 1.0, 2.0);
    const Eigen::VectorXd w = boundary_samples(spec, ops.grid());
    const SolutionCoefficients sol = neumann_solve(w, ops);
    const double f0 = flux_at(sol, ops, 0.0);
    double spread = 0.0;
    for (double x : {0.25, 0.5, 0.75, 1.0}) spread = std::max(spread, std::abs(flux_at(sol, ops, x) - f0));
    note("flux %.10f, max variation over x %.3e (relative %.3e)", f0, spread, spread / std::abs(f0));

    auto residual = [&](int order) {
        const auto [in, out] = boundary_residual(sol.partial(order), ops, w);
        return std::hypot(in, out);
    };
    const double r0 = residual(0), r2 = residual(2);
    note("boundary residual: order 0 %.4e, order 1 %.4e, order 2 %.4e, converged %.4e; reduction %.2fx (need 5x)",
         r0, residual(1), r2, residual(sol.iterations - 1), r0 / r2);
    return defect <= 1e-12 && spread <= 1e-8 * std::abs(f0) && r0 / r2 >= 5.0;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<bool()>>> criteria{
        {"projection norm", projection_norm},
        {"periodic spectrum", spectrum_checks},
        {"coefficient constants", coefficient_constants},
        {"transport formulas", transport_formulas},
        {"small-eigenvalue law", lambda_r_law},
        {"norm diagnostics", norm_diagnostics},
        {"oracle equivalence", oracle_equivalence},
        {"identity suite", identity_suite},
        {"divergence and restoration", divergence_restoration},
        {"trivial and physical checks", trivial_and_physical},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto& [name, check] = criteria[k];
        std::printf("[%zu] %s\n", k + 1, name);
        std::fflush(stdout);
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        try {
            pass = check();
        } catch (const std::exception& e) {
            std::printf("    error: %s\n", e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("CRITERION %zu: %s (%.1f s)\n", k + 1, pass ? "PASS" : "FAIL", seconds);
        std::fflush(stdout);
        failures += pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
