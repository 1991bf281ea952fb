#include "twoway/solver.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "json.hpp"

namespace twoway {

namespace {

double mode_part_norm(const Eigen::VectorXd& a, const OperatorSet& ops) {
    Eigen::VectorXd big = a;
    for (int p : ops.small_modes) big(p) = 0.0;
    return std::sqrt(std::max(0.0, big.dot(ops.gram_abs * big)));
}

Eigen::VectorXd x_factors(const Eigen::VectorXd& lambdas, double x, double L) {
    Eigen::VectorXd f(lambdas.size());
    for (Eigen::Index p = 0; p < lambdas.size(); ++p)
        f(p) = lambdas(p) > 0.0 ? std::exp(-lambdas(p) * x) : std::exp(lambdas(p) * (L - x));
    return f;
}

void check_x(double x, double L) {
    if (!(x >= 0.0 && x <= L)) throw Error("x must lie in [0, L]");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SolutionCoefficients SolutionCoefficients::partial(int n) const {
    SolutionCoefficients out = *this;
    const int last = std::min<int>(n, static_cast<int>(order_history.size()) - 1);
    out.order_history.resize(static_cast<std::size_t>(std::max(0, last + 1)));
    out.c = out.d = 0.0;
    out.a = Eigen::VectorXd::Zero(a.size());
    for (const auto& t : out.order_history) {
        out.c += t.c;
        out.d += t.d;
        out.a += t.a;
    }
    out.iterations = static_cast<int>(out.order_history.size());
    return out;
}

SolutionCoefficients neumann_solve(const Eigen::VectorXd& w, const OperatorSet& ops, const SolveOptions& options) {
    if (options.max_iter < 1) throw Error("max_iter must be at least 1");
    SolutionCoefficients sol;
    sol.L = ops.L;
    sol.framework = ops.framework;
    sol.threshold = ops.threshold;
    sol.a = Eigen::VectorXd::Zero(2 * ops.N());

    Expansion e = expand(w, ops);
    double first = 0.0, previous = 0.0;
    for (int n = 0; n < options.max_iter; ++n) {
        if (n > 0) e = expand(apply_WL(e, ops), ops);
        OrderTerm t{e.c, e.d, e.a, mode_part_norm(e.a, ops)};
        sol.c += t.c;
        sol.d += t.d;
        sol.a += t.a;
        sol.order_history.push_back(t);
        if (n == 0) first = t.increment_norm;
        else if (previous > 0.0) sol.ratio = t.increment_norm / previous;
        previous = t.increment_norm;
        if (t.increment_norm < options.tol) {
            sol.converged = true;
            break;
        }
        if (!std::isfinite(t.increment_norm) || t.increment_norm > 1e12 * std::max(first, 1.0)) break;
    }
    sol.iterations = static_cast<int>(sol.order_history.size());
    return sol;
}

DirectSolveReport direct_solve(const ProblemSpec& spec, const OperatorSet& ops, double oversample) {
    return direct_solve([&spec](const Quadrature& grid) { return boundary_samples(spec, grid); }, ops, oversample);
}

DirectSolveReport direct_solve(const BoundaryFunction& data, const OperatorSet& ops, double oversample) {
    if (!(oversample >= 2.0)) throw Error("direct_solve: oversample must be at least 2");
    const Spectrum& s = *ops.spectrum;
    const bool extended = ops.framework != Framework::simple && s.has_zero_mode;
    const bool with_g = extended && s.has_g;
    const Eigen::Index m = 2 * s.N;
    const Eigen::Index unknowns = m + (extended ? 1 : 0) + (with_g ? 1 : 0);

    double scale = oversample / 2.0;
    Quadrature grid = s.make_grid(scale);
    while (grid.size() < static_cast<Eigen::Index>(std::ceil(oversample * static_cast<double>(unknowns)))) {
        scale *= 2.0;
        grid = s.make_grid(scale);
    }
    const Eigen::Index rows = grid.size();
    const std::span<const double> nodes(grid.nodes.data(), static_cast<std::size_t>(rows));
    const Eigen::VectorXd plus = grid.plus_mask(), minus = grid.minus_mask();

    Eigen::MatrixXd design(rows, unknowns);
    Eigen::Index col = 0;
    if (extended) design.col(col++).setOnes();
    if (with_g) design.col(col++) = s.evaluate_g(nodes) + ops.L * minus;
    const Eigen::MatrixXd modes = s.evaluate(nodes);
    for (Eigen::Index p = 0; p < m; ++p) {
        const Eigen::VectorXd& far = s.eigenvalues(p) > 0.0 ? minus : plus;
        design.col(col++) = modes.col(p).cwiseProduct(Eigen::VectorXd::Ones(rows) - (1.0 - ops.decay(p)) * far);
    }
    const Eigen::VectorXd rhs = data(grid);
    const Eigen::VectorXd sqrt_w = grid.abs_h_weights.cwiseSqrt();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(sqrt_w.asDiagonal() * design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    DirectSolveReport report;
    report.rows = rows;
    report.unknowns = unknowns;
    report.smallest_singular_value = sv(unknowns - 1);
    report.condition = sv(0) / sv(unknowns - 1);
    if (!(sv(unknowns - 1) > 1e-13 * sv(0)))
        throw Error("direct_solve: rank-deficient system, smallest singular value " + fmt(sv(unknowns - 1)) +
                    " vs largest " + fmt(sv(0)));
    const Eigen::VectorXd coef = svd.solve(sqrt_w.cwiseProduct(rhs));

    SolutionCoefficients& sol = report.solution;
    sol.L = ops.L;
    sol.framework = ops.framework;
    sol.threshold = ops.threshold;
    col = 0;
    if (extended) sol.c = coef(col++);
    if (with_g) sol.d = coef(col++);
    sol.a = coef.tail(m);
    sol.converged = true;
    sol.iterations = 1;
    sol.order_history.push_back({sol.c, sol.d, sol.a, mode_part_norm(sol.a, ops)});
    return report;
}

Eigen::VectorXd evaluate(const SolutionCoefficients& sol, const OperatorSet& ops, double x,
                         std::span<const double> theta) {
    check_x(x, ops.L);
    const Spectrum& s = *ops.spectrum;
    Eigen::VectorXd f = s.evaluate(theta) * sol.a.cwiseProduct(x_factors(s.eigenvalues, x, ops.L));
    f.array() += sol.c + sol.d * x;
    if (sol.d != 0.0) f += sol.d * s.evaluate_g(theta);
    return f;
}

Eigen::VectorXd evaluate_nodes(const SolutionCoefficients& sol, const OperatorSet& ops, double x) {
    check_x(x, ops.L);
    const Spectrum& s = *ops.spectrum;
    Eigen::VectorXd f = s.values * sol.a.cwiseProduct(x_factors(s.eigenvalues, x, ops.L));
    f.array() += sol.c + sol.d * x;
    if (sol.d != 0.0) f += sol.d * s.g_values;
    return f;
}

double flux(const SolutionCoefficients& sol, const OperatorSet& ops) {
    const Spectrum& s = *ops.spectrum;
    if (sol.d == 0.0 || !s.has_g) return 0.0;
    return sol.d * s.grid.signed_weights.dot(s.g_values);
}

double flux_at(const SolutionCoefficients& sol, const OperatorSet& ops, double x) {
    return ops.grid().signed_weights.dot(evaluate_nodes(sol, ops, x));
}

std::pair<double, double> boundary_residual(const SolutionCoefficients& sol, const OperatorSet& ops,
                                            const Eigen::VectorXd& w) {
    const Quadrature& g = ops.grid();
    const Eigen::VectorXd in = (evaluate_nodes(sol, ops, 0.0) - w).cwiseProduct(g.plus_mask());
    const Eigen::VectorXd out = (evaluate_nodes(sol, ops, ops.L) - w).cwiseProduct(g.minus_mask());
    return {norm_abs_h(in, g), norm_abs_h(out, g)};
}

SyntheticData random_trace_data(const OperatorSet& ops, std::uint64_t seed) {
    const Spectrum& s = *ops.spectrum;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SyntheticData out;
    SolutionCoefficients& e = out.exact;
    e.L = ops.L;
    e.framework = ops.framework;
    e.threshold = ops.threshold;
    e.converged = true;
    e.iterations = 1;
    if (ops.framework != Framework::simple && s.has_zero_mode) {
        e.c = uni(rng);
        if (s.has_g) e.d = uni(rng);
    }
    e.a.resize(2 * s.N);
    for (Eigen::Index p = 0; p < e.a.size(); ++p) e.a(p) = uni(rng);
    out.w = ops.traces * e.a;
    out.w.array() += e.c;
    if (e.d != 0.0) out.w += e.d * ops.g_L;
    return out;
}

Eigen::VectorXd boundary_trace(const SolutionCoefficients& sol, const OperatorSet& ops, const Quadrature& grid) {
    const std::span<const double> nodes(grid.nodes.data(), static_cast<std::size_t>(grid.size()));
    return evaluate(sol, ops, 0.0, nodes).cwiseProduct(grid.plus_mask()) +
           evaluate(sol, ops, ops.L, nodes).cwiseProduct(grid.minus_mask());
}

std::string solution_json(const SolutionCoefficients& sol, const OperatorSet& ops) {
    const Spectrum& s = *ops.spectrum;
    nlohmann::ordered_json j;
    j["framework"] = framework_name(sol.framework);
    if (sol.framework == Framework::thresholded) j["lambda_threshold"] = sol.threshold;
    j["L"] = sol.L;
    j["c"] = sol.c;
    j["d"] = sol.d;
    j["flux"] = flux(sol, ops);
    auto modes = nlohmann::ordered_json::array();
    for (Eigen::Index p = 0; p < sol.a.size(); ++p)
        modes.push_back({{"j", s.mode_number(static_cast<int>(p))}, {"lambda", s.eigenvalues(p)}, {"a_j", sol.a(p)}});
    j["a"] = modes;
    j["converged"] = sol.converged;
    j["iterations"] = sol.iterations;
    j["ratio"] = sol.ratio;
    auto hist = nlohmann::ordered_json::array();
    for (const auto& t : sol.order_history)
        hist.push_back({{"c", t.c}, {"d", t.d}, {"increment_norm", t.increment_norm}});
    j["order_history"] = hist;
    return j.dump(2);
}

std::string profile_csv(const SolutionCoefficients& sol, const OperatorSet& ops, int n_x, int n_theta) {
    if (n_x < 2 || n_theta < 2) throw Error("profile_csv: need at least two samples per axis");
    const ProblemSpec& spec = ops.spectrum->spec;
    std::vector<double> theta(static_cast<std::size_t>(n_theta));
    for (int i = 0; i < n_theta; ++i)
        theta[static_cast<std::size_t>(i)] = spec.a + (spec.b - spec.a) * (i + 0.5) / n_theta;
    std::ostringstream os;
    os << "x,theta,f\n";
    for (int k = 0; k < n_x; ++k) {
        const double x = ops.L * k / (n_x - 1);
        const Eigen::VectorXd f = evaluate(sol, ops, x, theta);
        for (int i = 0; i < n_theta; ++i) os << fmt(x) << ',' << fmt(theta[static_cast<std::size_t>(i)]) << ',' << fmt(f(i)) << '\n';
    }
    return os.str();
}

}  // namespace twoway
