#include "twoway/periodic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "twoway/norms.hpp"

namespace twoway {

namespace {

void require_periodic_cos(const Spectrum& s) {
    if (s.spec.h.kind != WeightKind::cos || s.spec.bc != BoundaryKind::periodic || !s.has_g)
        throw Error("this quantity is defined for h = cos θ with periodic conditions");
}

Eigen::VectorXd moments(const Spectrum& s) {
    Eigen::VectorXd X(2 * s.N);
    for (int p = 0; p < 2 * s.N; ++p) X(p) = half_range_moment(s, s.mode_number(p));
    return X;
}

// 𝒞_j for given factors (1 − e^{λ_k L}) on the negative modes (position-indexed, zero elsewhere).
Eigen::VectorXd c_coefficients(const OperatorSet& ops, const Eigen::VectorXd& X, const Eigen::VectorXd& factor) {
    const Spectrum& s = *ops.spectrum;
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(2 * s.N), mirrored = Eigen::VectorXd::Zero(2 * s.N);
    for (int k = -s.N; k < 0; ++k) {
        const int pk = s.position(k);
        weight(pk) = X(pk) * factor(pk);
        mirrored(s.position(-k)) = weight(pk);
    }
    // ∫(Q₊v_k − Q₋v_{−k}) v_j h = q₊[k,j] + q₋[−k,j]
    return ops.sign.cwiseProduct(ops.q_plus_gram * weight + ops.q_minus_gram * mirrored);
}

struct AB {
    double A, B;
    Eigen::VectorXd C;
};

AB ab_from_factors(const OperatorSet& ops, const Eigen::VectorXd& X, const Eigen::VectorXd& factor) {
    const Spectrum& s = *ops.spectrum;
    AB out{0.0, 0.0, c_coefficients(ops, X, factor)};
    for (int k = -s.N; k < 0; ++k) {
        const int pk = s.position(k);
        out.A += X(pk) * X(pk) * factor(pk);
        out.B -= out.C(pk) * X(pk) * factor(pk);
    }
    return out;
}

Eigen::VectorXd negative_factors(const Spectrum& s, double L) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * s.N);
    for (int k = -s.N; k < 0; ++k) f(s.position(k)) = 1.0 - std::exp(s.lambda(k) * L);
    return f;
}

template <class F>
void parallel_for(std::size_t count, int jobs, F&& body) {
    const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, 64));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Eigen::VectorXd two_level_data(const Quadrature& g, double rho1, double rho2) {
    return rho1 * g.plus_mask() + rho2 * g.minus_mask();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SeriesCoefficients series_coefficients(const OperatorSet& ops, double rho1, double rho2) {
    const Spectrum& s = *ops.spectrum;
    require_periodic_cos(s);
    if (s.N < 16) throw Error("series_coefficients: needs at least 16 modes per sign");
    const double L = ops.L, dr = rho2 - rho1, denom = 2.0 * L + M_PI;

    SeriesCoefficients out;
    out.L = L;
    out.X = moments(s);
    const AB ab = ab_from_factors(ops, out.X, negative_factors(s, L));
    out.A_L = ab.A;
    out.B_L = ab.B;
    out.C = ab.C;

    out.c0 = 0.5 * (rho1 + rho2) - L / denom * dr;
    out.d0 = 2.0 / denom * dr;
    const double gap = dr - out.d0 * L;
    out.c1 = L / denom * out.A_L * gap;
    out.d1 = -2.0 / denom * out.A_L * gap;
    out.d2 = 2.0 / denom * out.B_L * gap + L * (2.0 / denom) * out.d1 * out.A_L;
    out.c = out.c0 + out.c1;
    out.d = out.d0 + out.d1 + out.d2;

    const double u = 2.0 * L / denom, A = out.A_L, B = out.B_L;
    out.d_headline = L > 0.0 ? dr / L * ((1.0 - A + B) * u + (A * A + A - B) * u * u - A * A * u * u * u) : out.d0;

    out.a_first_order = -gap * out.X + (-gap) * out.C + out.d1 * L * out.X;

    double tail = 0.0, total = 0.0;
    for (int k = -s.N; k < 0; ++k) {
        const double x2 = out.X(s.position(k)) * out.X(s.position(k));
        total += x2;
        if (-k > s.N / 2) tail += x2;
    }
    out.tail_ratio = total > 0.0 ? tail / total : 0.0;
    return out;
}

LargeLPolynomials large_L_polynomials(double A, double B) {
    LargeLPolynomials p;
    p.c_u = 0.5 * (1.0 - A);
    p.c_u2 = 0.5 * A;
    p.d_u = 1.0 - A + B;
    p.d_u2 = A * A + A - B;
    p.d_u3 = -A * A;
    p.d_u_iter = 1.0 - A + B;
    p.d_u2_iter = A - B - A * A;
    p.d_u3_iter = A * A;
    return p;
}

double first_coupled_eigenvalue(const Spectrum& s) {
    const Eigen::VectorXd X = moments(s);
    const double scale = X.cwiseAbs().maxCoeff();
    for (int j = 1; j <= s.N; ++j)
        if (std::abs(X(s.position(j))) > 1e-8 * scale) return s.lambda(j);
    throw Error("no positive mode couples to the half-range data");
}

LargeLApprox large_L_approx(const OperatorSet& ops, double L) {
    const Spectrum& s = *ops.spectrum;
    require_periodic_cos(s);
    LargeLApprox out;
    out.lambda1 = first_coupled_eigenvalue(s);
    const double e1 = std::exp(-out.lambda1 * L);
    out.A_reference = 0.0699 - 0.0446 * e1;
    out.B_reference = 0.0349 - 0.016 * e1;

    const Eigen::VectorXd X = moments(s);
    const Eigen::VectorXd ones = negative_factors(s, INFINITY);
    Eigen::VectorXd lead = Eigen::VectorXd::Zero(2 * s.N);
    for (int k = -s.N; k < 0; ++k)
        if (std::abs(std::abs(s.lambda(k)) - out.lambda1) < 1e-8 * out.lambda1) lead(s.position(k)) = 1.0;

    // ℬ is quadratic in the retained exponential ε, so a unit central difference is exact.
    const AB full = ab_from_factors(ops, X, ones);
    const AB plus = ab_from_factors(ops, X, ones - lead);
    const AB minus = ab_from_factors(ops, X, ones + lead);
    out.A_inf = full.A;
    out.A_exp = 0.5 * (minus.A - plus.A);
    out.B_inf = full.B;
    out.B_exp = 0.5 * (minus.B - plus.B);
    for (int k = -s.N; k < 0; ++k)
        if (lead(s.position(k)) != 0.0) out.B_exp_outer -= full.C(s.position(k)) * X(s.position(k));
    out.A_regenerated = out.A_inf - out.A_exp * e1;
    out.B_regenerated = out.B_inf - out.B_exp * e1;
    return out;
}

LambdaR lambda_R(const Spectrum& s) {
    if (s.spec.h.kind != WeightKind::cos_minus_r) throw Error("lambda_R: needs h = cos θ − r");
    const double r = s.spec.h.r;
    if (!(r > 0.0 && r < 1.0)) throw Error("lambda_R: r must lie in (0, 1)");
    const Quadrature& g = s.grid;
    LambdaR out;
    out.r = r;
    out.lambda_R = s.lambda(1);
    const Eigen::VectorXd raw = s.mode(1);
    out.v_R = raw / (g.integrate(raw) / (s.spec.b - s.spec.a));
    const Eigen::VectorXd dev = out.v_R - Eigen::VectorXd::Ones(g.size()) - 2.0 * r * g.nodes.array().cos().matrix();
    out.deviation_norm = norm_abs_h(dev, g);
    return out;
}

DiffusivityEstimate diffusivity_estimate(const std::shared_ptr<const Spectrum>& spectrum,
                                         const std::vector<double>& L_values, double rho1, double rho2,
                                         const SolveOptions& options) {
    if (L_values.size() < 2) throw Error("diffusivity_estimate: need at least two L values");
    const double dr = rho2 - rho1;
    if (dr == 0.0) throw Error("diffusivity_estimate: Δρ must be nonzero");
    DiffusivityEstimate est;
    est.L_values = L_values;
    const Eigen::VectorXd w = two_level_data(spectrum->grid, rho1, rho2);
    for (double L : L_values) {
        if (L < 10.0) est.short_L_warning = true;
        const OperatorSet ops = build_operators(spectrum, L, Framework::extended);
        const SolutionCoefficients sol = neumann_solve(w, ops, options);
        est.all_converged = est.all_converged && sol.converged;
        est.flux.push_back(flux(sol, ops));
    }
    const auto n = static_cast<Eigen::Index>(L_values.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = L_values[static_cast<std::size_t>(i)];
        design(i, 1) = 1.0;
        y(i) = dr / -est.flux[static_cast<std::size_t>(i)];
        est.D_naive += -est.flux[static_cast<std::size_t>(i)] * L_values[static_cast<std::size_t>(i)] / dr / static_cast<double>(n);
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
    est.D = 1.0 / coef(0);
    est.extrapolation_length = coef(1) / coef(0);
    est.residual = std::sqrt((design * coef - y).squaredNorm() / static_cast<double>(n));
    return est;
}

std::vector<LSweepRow> sweep_L(const std::shared_ptr<const Spectrum>& spectrum, const std::vector<double>& L_values,
                               double rho1, double rho2, const SolveOptions& options, int jobs) {
    std::vector<LSweepRow> rows(L_values.size());
    const Eigen::VectorXd w = two_level_data(spectrum->grid, rho1, rho2);
    parallel_for(L_values.size(), jobs, [&](std::size_t i) {
        const double L = L_values[i];
        const OperatorSet ops = build_operators(spectrum, L, Framework::extended);
        const SeriesCoefficients sc = series_coefficients(ops, rho1, rho2);
        const SolutionCoefficients sol = neumann_solve(w, ops, options);
        rows[i] = {L, sc.A_L, sc.B_L, sol.c, sol.d, flux(sol, ops), sol.converged};
    });
    return rows;
}

std::string sweep_L_csv(const std::vector<LSweepRow>& rows) {
    std::ostringstream os;
    os << "L,A_L,B_L,c,d,flux,converged\n";
    for (const auto& r : rows)
        os << fmt(r.L) << ',' << fmt(r.A_L) << ',' << fmt(r.B_L) << ',' << fmt(r.c) << ',' << fmt(r.d) << ','
           << fmt(r.flux) << ',' << (r.converged ? 1 : 0) << '\n';
    return os.str();
}

std::vector<RSweepRow> sweep_r(const std::vector<double>& r_values, double L, int N, int jobs) {
    std::vector<RSweepRow> rows(r_values.size());
    parallel_for(r_values.size(), jobs, [&](std::size_t i) {
        const Spectrum s = solve_spectrum(presets::periodic_cos_r(r_values[i], L), N);
        const LowerBound b = wlp_lower_bound(s, L);
        rows[i] = {r_values[i], b.lambda_R, b.normalization_ratio, b.bound};
    });
    return rows;
}

std::string sweep_r_csv(const std::vector<RSweepRow>& rows) {
    std::ostringstream os;
    os << "r,lambda_R,N_r,bound\n";
    for (const auto& r : rows)
        os << fmt(r.r) << ',' << fmt(r.lambda_R) << ',' << fmt(r.normalization_ratio) << ',' << fmt(r.bound) << '\n';
    return os.str();
}

}  // namespace twoway
