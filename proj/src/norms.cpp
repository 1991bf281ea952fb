#include "twoway/norms.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "json.hpp"
#include "twoway/linalg.hpp"

namespace twoway {

namespace {

std::vector<int> leading_positions(int n, int N) {
    if (n < 1 || n > N) throw Error("mode count " + std::to_string(n) + " outside 1.." + std::to_string(N));
    std::vector<int> idx;
    for (int j = -n; j <= n; ++j)
        if (j != 0) idx.push_back(Spectrum::position(j, N));
    return idx;
}

std::vector<int> retained_positions(const OperatorSet& ops) {
    std::vector<int> idx;
    for (int p = 0; p < 2 * ops.N(); ++p)
        if (!ops.is_small(p)) idx.push_back(p);
    return idx;
}

Eigen::MatrixXd pick(const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < cols.size(); ++k) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = m(rows[i], cols[k]);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct PowerLawResidual : Eigen::DenseFunctor<double> {
    const std::vector<double>& x;
    const std::vector<double>& y;
    PowerLawResidual(const std::vector<double>& xs, const std::vector<double>& ys)
        : Eigen::DenseFunctor<double>(3, static_cast<int>(xs.size())), x(xs), y(ys) {}
    int operator()(const InputType& p, ValueType& f) const {
        for (std::size_t i = 0; i < x.size(); ++i)
            f(static_cast<Eigen::Index>(i)) = p(0) - p(1) * std::pow(x[i], -p(2)) - y[i];
        return 0;
    }
    int df(const InputType& p, JacobianType& jac) const {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const double t = std::pow(x[i], -p(2));
            jac(r, 0) = 1.0;
            jac(r, 1) = -t;
            jac(r, 2) = p(1) * t * std::log(x[i]);
        }
        return 0;
    }
};

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> wln_grams(const OperatorSet& ops, int n, LMode mode) {
    const auto idx = leading_positions(n, ops.N());
    const Spectrum& s = *ops.spectrum;
    Eigen::MatrixXd A = pick(ops.gram_abs, idx, idx);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(A.rows(), A.cols());
    Eigen::VectorXd factor(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        factor(static_cast<Eigen::Index>(i)) = mode == LMode::include_L ? 1.0 - ops.decay(idx[i]) : 1.0;
    // W sends negative modes to h > 0 and positive modes to h < 0.
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const double li = s.eigenvalues(idx[i]), lk = s.eigenvalues(idx[k]);
            if ((li > 0.0) != (lk > 0.0)) continue;
            const double g = li < 0.0 ? ops.q_plus_gram(idx[i], idx[k]) : ops.q_minus_gram(idx[i], idx[k]);
            S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                factor(static_cast<Eigen::Index>(i)) * g * factor(static_cast<Eigen::Index>(k));
        }
    }
    return {A, S};
}

double wln_norm_squared(const OperatorSet& ops, int n, LMode mode) {
    const auto [A, S] = wln_grams(ops, n, mode);
    return linalg::largest_generalized_eigenvalue(S, A);
}

NormEstimate wln_norm_sweep(const OperatorSet& ops, const std::vector<int>& N_values, LMode mode) {
    NormEstimate est;
    est.mode = mode;
    est.L = ops.L;
    est.N_values = N_values;
    int largest = 0;
    for (int n : N_values) {
        const auto [A, S] = wln_grams(ops, n, mode);
        est.norms_squared.push_back(linalg::largest_generalized_eigenvalue(S, A));
        if (n > largest) {
            largest = n;
            est.gram_A = A;
            est.gram_S = S;
        }
    }
    return est;
}

PowerLawFit powerlaw_fit(const std::vector<double>& N, const std::vector<double>& y) {
    if (N.size() != y.size()) throw Error("powerlaw_fit: size mismatch");
    if (N.size() < 5) throw Error("powerlaw_fit: need at least 5 points");
    for (std::size_t i = 1; i < N.size(); ++i)
        if (!(N[i] > N[i - 1])) throw Error("powerlaw_fit: N must be strictly increasing");

    // Linear start for (A0, B0) at ν = 1.
    Eigen::MatrixXd design(N.size(), 2);
    Eigen::VectorXd rhs(N.size());
    for (std::size_t i = 0; i < N.size(); ++i) {
        design(static_cast<Eigen::Index>(i), 0) = 1.0;
        design(static_cast<Eigen::Index>(i), 1) = -1.0 / N[i];
        rhs(static_cast<Eigen::Index>(i)) = y[i];
    }
    const Eigen::VectorXd start = design.colPivHouseholderQr().solve(rhs);
    Eigen::VectorXd p(3);
    p << start(0), start(1), 1.0;

    PowerLawResidual functor(N, y);
    Eigen::LevenbergMarquardt<PowerLawResidual> lm(functor);
    lm.setMaxfev(2000);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    const auto status = lm.minimize(p);

    PowerLawFit fit;
    fit.A0 = p(0);
    fit.B0 = p(1);
    fit.nu = p(2);
    fit.iterations = static_cast<int>(lm.iterations());
    Eigen::VectorXd f(N.size());
    functor(p, f);
    fit.residual = std::sqrt(f.squaredNorm() / static_cast<double>(N.size()));
    fit.converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                    status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation && fit.nu > 0.0 &&
                    std::isfinite(fit.A0);
    return fit;
}

PNormAnalytic p_norm_analytic_periodic(double L) {
    if (!(L > 0.0)) throw Error("p_norm_analytic_periodic: L must be positive");
    PNormAnalytic p;
    p.sigma1 = std::sqrt(8.0 / 3.0 + M_PI * L + L * L);
    p.sigma2 = std::sqrt(8.0 / 3.0);
    p.r1 = 2.0 * p.sigma2 / M_PI;
    p.r2 = -2.0 * p.sigma1 / (2.0 * L + M_PI);
    if (!(p.r1 * p.r1 > p.r2 * p.r2)) throw Error("p_norm_analytic_periodic: r1² ≤ r2²");
    p.rho_sup = std::sqrt(p.r1 * p.r1 - 1.0);
    p.value = std::sqrt(1.0 + p.rho_sup * p.rho_sup);
    return p;
}

PNormNumeric p_norm_numeric(const OperatorSet& ops) {
    if (ops.framework != Framework::extended) throw Error("p_norm_numeric: extended framework required");
    const Spectrum& s = *ops.spectrum;
    const Quadrature& g = s.grid;
    std::vector<Eigen::VectorXd> cols{Eigen::VectorXd::Ones(g.size())};
    if (s.has_g) cols.push_back(ops.g_L);
    const auto complement_start = static_cast<Eigen::Index>(cols.size());
    cols.push_back(g.sign);
    if (s.has_g) cols.push_back(s.g_values.cwiseProduct(g.sign));

    Eigen::MatrixXd B(g.size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) B.col(static_cast<Eigen::Index>(i)) = cols[i];
    Eigen::MatrixXd PB(B.rows(), B.cols());
    for (Eigen::Index i = 0; i < B.cols(); ++i) PB.col(i) = apply_P(B.col(i), ops);

    const auto& wa = g.abs_h_weights;
    const Eigen::MatrixXd gram = B.transpose() * wa.asDiagonal() * B;
    const Eigen::MatrixXd gram_p = PB.transpose() * wa.asDiagonal() * PB;
    const Eigen::Index k = B.cols() - complement_start;

    PNormNumeric out;
    out.value = std::sqrt(linalg::largest_generalized_eigenvalue(gram_p, gram));
    out.rho = std::sqrt(linalg::largest_generalized_eigenvalue(gram_p.bottomRightCorner(k, k), gram.bottomRightCorner(k, k)));
    return out;
}

Eigen::MatrixXd pw_matrix(const OperatorSet& ops) {
    const Spectrum& s = *ops.spectrum;
    const Quadrature& g = s.grid;
    const int m = 2 * s.N;
    Eigen::VectorXd to_plus = Eigen::VectorXd::Zero(m), to_minus = Eigen::VectorXd::Zero(m);
    for (int p = 0; p < m; ++p) {
        if (ops.is_small(p)) continue;
        (s.eigenvalues(p) < 0.0 ? to_plus : to_minus)(p) = 1.0 - ops.decay(p);
    }
    Eigen::MatrixXd U = g.plus_mask().asDiagonal() * (s.values * to_plus.asDiagonal());
    U += g.minus_mask().asDiagonal() * (s.values * to_minus.asDiagonal());
    if (ops.zero_basis.cols() > 0) {
        const Eigen::MatrixXd rhs = ops.zero_tests.transpose() * g.signed_weights.asDiagonal() * U;
        U -= ops.zero_basis * ops.zero_block.partialPivLu().solve(rhs);
    }
    Eigen::MatrixXd T = ops.sign.asDiagonal() * (s.values.transpose() * g.signed_weights.asDiagonal() * U);
    for (int p : ops.small_modes) T.row(p).setZero();
    return T;
}

double pw_norm(const OperatorSet& ops) {
    const auto idx = retained_positions(ops);
    const Eigen::MatrixXd T = pick(pw_matrix(ops), idx, idx);
    const Eigen::MatrixXd G = pick(ops.gram_abs, idx, idx);
    return std::sqrt(linalg::largest_generalized_eigenvalue(T.transpose() * G * T, G));
}

std::pair<double, double> identity_check(const Eigen::VectorXd& a, const OperatorSet& ops) {
    const Spectrum& s = *ops.spectrum;
    if (a.size() != 2 * s.N) throw Error("identity_check: coefficient size mismatch");
    const Eigen::VectorXd pos = (s.eigenvalues.array() > 0.0).cast<double>().matrix().cwiseProduct(a);
    const Eigen::VectorXd neg = a - pos;
    const double lhs = 2.0 * (neg.dot(ops.q_plus_gram * neg) + pos.dot(ops.q_minus_gram * pos));

    const Quadrature& g = s.grid;
    const Eigen::VectorXd up = s.values * pos, um = s.values * neg, u = up + um;
    const double norm2 = inner_abs_h(u, u, g);
    const double norm1_2 = inner_signed(up, up, g) - inner_signed(um, um, g);
    const double cross = inner_abs_h(up, um, g);
    return {lhs, norm2 - norm1_2 - 2.0 * cross};
}

std::pair<double, double> norm_equivalence_range(const OperatorSet& ops, int samples, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double lo = INFINITY, hi = 0.0;
    const int m = 2 * ops.N();
    for (int i = 0; i < samples; ++i) {
        Eigen::VectorXd a(m);
        for (int p = 0; p < m; ++p) a(p) = uni(rng);
        const double ratio = a.norm() / std::sqrt(a.dot(ops.gram_abs * a));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo, hi};
}

LowerBound wlp_lower_bound(const Spectrum& s, double L) {
    if (s.spec.h.kind != WeightKind::cos_minus_r) throw Error("wlp_lower_bound: needs h = cos θ − r");
    const double r = s.spec.h.r;
    if (!(r > 0.0 && r < 1.0)) throw Error("wlp_lower_bound: r must lie in (0, 1)");
    const Quadrature& g = s.grid;
    LowerBound out;
    out.lambda_R = s.lambda(1);
    const Eigen::VectorXd raw = s.mode(1);
    const Eigen::VectorXd v = raw / (g.integrate(raw) / (s.spec.b - s.spec.a));
    const Eigen::VectorXd shifted = v.array() - 1.0;
    const double far = inner_abs_h(v.cwiseProduct(g.minus_mask()), v, g);
    out.normalization_ratio = std::sqrt(far / inner_abs_h(shifted, shifted, g));
    out.bound = (1.0 - std::exp(-out.lambda_R * L)) * out.normalization_ratio;
    return out;
}

OverlapSlope overlap_decay_slope(const OperatorSet& ops, int j) {
    const Spectrum& s = *ops.spectrum;
    const int pj = s.position(j);
    const int m = s.spec.h.turning_multiplicity();
    if (m < 1) throw Error("overlap_decay_slope: weight has no finite turning-point multiplicity");
    double top = 0.0;
    for (int p = 0; p < 2 * s.N; ++p)
        if (s.eigenvalues(p) * s.eigenvalues(pj) < 0.0) top = std::max(top, std::abs(s.eigenvalues(p)));
    std::vector<double> xs, ys;
    for (int p = 0; p < 2 * s.N; ++p) {
        const double lk = std::abs(s.eigenvalues(p));
        if (s.eigenvalues(p) * s.eigenvalues(pj) >= 0.0 || lk < top / 10.0) continue;
        const double overlap = std::abs(ops.gram_abs(pj, p));
        if (!(overlap > 0.0)) continue;
        xs.push_back(std::log(lk));
        ys.push_back(std::log(overlap));
    }
    if (xs.size() < 3) throw Error("overlap_decay_slope: too few modes in the top decade");
    const Eigen::Map<const Eigen::VectorXd> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const double xm = x.mean(), ym = y.mean();
    OverlapSlope out;
    out.slope = (x.array() - xm).matrix().dot((y.array() - ym).matrix()) / (x.array() - xm).square().sum();
    out.expected = -(3.0 * m + 4.0) / (4.0 * m + 8.0);
    out.points = static_cast<int>(xs.size());
    return out;
}

std::string norms_csv(const NormEstimate& est) {
    std::ostringstream os;
    os << "N,norm_squared\n";
    for (std::size_t i = 0; i < est.N_values.size(); ++i) os << est.N_values[i] << ',' << fmt(est.norms_squared[i]) << '\n';
    return os.str();
}

std::string fit_json(const PowerLawFit& fit) {
    nlohmann::ordered_json j{{"A0", fit.A0}, {"B0", fit.B0}, {"nu", fit.nu}, {"residual", fit.residual},
                             {"converged", fit.converged}, {"iterations", fit.iterations}};
    return j.dump(2);
}

}  // namespace twoway
