#include "twoway/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace twoway {

Rule gauss_legendre(int n) {
    if (n < 1) throw Error("gauss_legendre: n must be positive");
    Rule rule;
    if (n == 1) {
        rule.x = {0.0};
        rule.w = {2.0};
        return rule;
    }
    // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(n - 1);
    for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.w[i] = 2.0 * v0 * v0;
    }
    // Symmetrize to remove round-off asymmetry.
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (rule.x[n - 1 - i] - rule.x[i]);
        const double w = 0.5 * (rule.w[n - 1 - i] + rule.w[i]);
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        rule.w[i] = rule.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.x[n / 2] = 0.0;
    return rule;
}

Rule gauss_lobatto(int n) {
    if (n < 2) throw Error("gauss_lobatto: n must be at least 2");
    Rule rule;
    rule.x.assign(n, 0.0);
    rule.w.assign(n, 0.0);
    rule.x.front() = -1.0;
    rule.x.back() = 1.0;
    const int m = n - 2;
    if (m > 0) {
        // Interior nodes are the Gauss-Jacobi(1,1) points.
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd off(std::max(m - 1, 0));
        for (int k = 1; k < m; ++k) off(k - 1) = std::sqrt(k * (k + 2.0) / ((2.0 * k + 1.0) * (2.0 * k + 3.0)));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        if (m == 1) {
            rule.x[1] = 0.0;
        } else {
            es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
            for (int i = 0; i < m; ++i) rule.x[i + 1] = es.eigenvalues()(i);
        }
    }
    const int deg = n - 1;
    for (int i = 0; i < n; ++i) {
        // P_{n-1}(x_i) by three-term recurrence.
        const double x = rule.x[i];
        double p0 = 1.0, p1 = x;
        for (int k = 1; k < deg; ++k) {
            const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        const double pn = deg == 0 ? 1.0 : p1;
        rule.w[i] = 2.0 / (deg * (deg + 1.0) * pn * pn);
    }
    return rule;
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) w[i] /= (x[i] - x[j]);
    // Rescale for range; only ratios matter.
    const double s = *std::max_element(w.begin(), w.end(), [](double p, double q) { return std::abs(p) < std::abs(q); });
    for (auto& v : w) v /= std::abs(s);
    return w;
}

Eigen::MatrixXd differentiation_matrix(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    const auto bw = barycentric_weights(x);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            d(i, j) = (bw[j] / bw[i]) / (x[i] - x[j]);
            row += d(i, j);
        }
        d(i, i) = -row;
    }
    return d;
}

std::vector<double> graded_breaks(const ProblemSpec& spec, int n_panels) {
    std::vector<double> ends{spec.a};
    for (double t : spec.turning_points()) ends.push_back(t);
    ends.push_back(spec.b);
    const int n_sub = static_cast<int>(ends.size()) - 1;
    if (n_panels < n_sub) throw Error("graded_breaks: fewer panels than sign-definite intervals");

    // Phase density √|h| + ε, integrated on a fine uniform sampling per interval.
    constexpr int fine = 2048;
    std::vector<std::vector<double>> cum(n_sub);
    double mean_sqrt = 0.0;
    for (int s = 0; s < n_sub; ++s) {
        const double lo = ends[s], hi = ends[s + 1];
        double acc = 0.0;
        for (int k = 0; k < fine; ++k) acc += std::sqrt(std::abs(spec.h(lo + (k + 0.5) * (hi - lo) / fine)));
        mean_sqrt += acc * (hi - lo) / fine;
    }
    mean_sqrt /= (spec.b - spec.a);
    const double eps = 0.5 * std::max(mean_sqrt, 1e-12);

    std::vector<double> phase(n_sub);
    for (int s = 0; s < n_sub; ++s) {
        const double lo = ends[s], hi = ends[s + 1], dx = (hi - lo) / fine;
        cum[s].assign(fine + 1, 0.0);
        for (int k = 0; k < fine; ++k)
            cum[s][k + 1] = cum[s][k] + (std::sqrt(std::abs(spec.h(lo + (k + 0.5) * dx))) + eps) * dx;
        phase[s] = cum[s].back();
    }
    const double total = std::accumulate(phase.begin(), phase.end(), 0.0);

    // Largest-remainder allocation with at least one panel per interval.
    std::vector<int> count(n_sub, 1);
    int left = n_panels - n_sub;
    std::vector<double> want(n_sub);
    for (int s = 0; s < n_sub; ++s) want[s] = std::max(0.0, n_panels * phase[s] / total - 1.0);
    const double want_sum = std::accumulate(want.begin(), want.end(), 0.0);
    std::vector<std::pair<double, int>> rem;
    for (int s = 0; s < n_sub; ++s) {
        const double share = want_sum > 0 ? left * want[s] / want_sum : 0.0;
        const int whole = static_cast<int>(std::floor(share));
        count[s] += whole;
        rem.emplace_back(share - whole, s);
    }
    int assigned = std::accumulate(count.begin(), count.end(), 0);
    std::sort(rem.begin(), rem.end(), std::greater<>());
    for (std::size_t i = 0; assigned < n_panels; ++i, ++assigned) ++count[rem[i % rem.size()].second];

    std::vector<double> br{spec.a};
    for (int s = 0; s < n_sub; ++s) {
        const double lo = ends[s], hi = ends[s + 1], dx = (hi - lo) / fine;
        const auto& c = cum[s];
        for (int k = 1; k < count[s]; ++k) {
            const double target = phase[s] * k / count[s];
            const auto it = std::lower_bound(c.begin(), c.end(), target);
            const auto idx = std::max<std::ptrdiff_t>(1, it - c.begin());
            const double t = (target - c[idx - 1]) / (c[idx] - c[idx - 1]);
            br.push_back(lo + (static_cast<double>(idx - 1) + t) * dx);
        }
        br.push_back(hi);
    }
    return br;
}

Quadrature build_grid_on_breaks(const ProblemSpec& spec, std::vector<double> breaks, int q) {
    spec.validate();
    if (q < 2) throw Error("build_grid: need at least two points per panel");
    if (breaks.size() < 2) throw Error("build_grid: need at least one panel");
    const auto tps = spec.turning_points();
    if (tps.empty()) throw Error("build_grid: h has no sign change, the problem is not two-way");
    for (double t : tps) {
        const bool found = std::any_of(breaks.begin(), breaks.end(), [t](double b) { return std::abs(b - t) < 1e-12; });
        if (!found) throw Error("build_grid: panel breaks must include every turning point");
    }

    Quadrature g;
    g.breaks = std::move(breaks);
    g.points_per_panel = q;
    const Rule rule = gauss_legendre(q);
    g.ref_x_ = rule.x;
    g.ref_diff_ = differentiation_matrix(rule.x);
    g.ref_bary_ = barycentric_weights(rule.x);

    const int np = g.panels();
    const Eigen::Index n = static_cast<Eigen::Index>(np) * q;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int k = 0; k < np; ++k) {
        const double lo = g.breaks[k], hi = g.breaks[k + 1];
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < q; ++i) {
            g.nodes(k * q + i) = mid + half * rule.x[i];
            g.weights(k * q + i) = half * rule.w[i];
        }
    }
    g.h = g.sample([&](double t) { return spec.h(t); });
    g.p = g.sample([&](double t) { return spec.p.value(t); });
    g.sign.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (g.h(i) > 0.0) {
            g.sign(i) = 1.0;
            g.pos.push_back(static_cast<int>(i));
        } else if (g.h(i) < 0.0) {
            g.sign(i) = -1.0;
            g.neg.push_back(static_cast<int>(i));
        } else {
            throw Error("build_grid: a node coincides with a zero of h");
        }
    }
    g.abs_h_weights = g.weights.cwiseProduct(g.h.cwiseAbs());
    g.signed_weights = g.weights.cwiseProduct(g.h);

    if (spec.bc == BoundaryKind::separated) {
        const double sa = std::sin(spec.alpha), sb = std::sin(spec.beta);
        if (std::abs(sa) > 1e-14) g.robin_a = -spec.p.value(spec.a) * std::cos(spec.alpha) / sa;
        if (std::abs(sb) > 1e-14) g.robin_b = spec.p.value(spec.b) * std::cos(spec.beta) / sb;
    }
    return g;
}

Quadrature build_grid(const ProblemSpec& spec, int n_nodes) {
    constexpr int q = 16;
    if (n_nodes < 16) throw Error("build_grid: n_nodes must be at least 16");
    const int panels = n_nodes / q;
    const int n_sub = static_cast<int>(spec.turning_points().size()) + 1;
    if (spec.turning_points().empty()) throw Error("build_grid: h has no sign change, the problem is not two-way");
    if (panels < n_sub) throw Error("build_grid: n_nodes too small to resolve the panels between turning points");
    return build_grid_on_breaks(spec, graded_breaks(spec, panels), q);
}

Eigen::VectorXd Quadrature::sample(const std::function<double(double)>& f) const {
    Eigen::VectorXd out(nodes.size());
    for (Eigen::Index i = 0; i < nodes.size(); ++i) out(i) = f(nodes(i));
    return out;
}

Eigen::VectorXd Quadrature::derivative(const Eigen::VectorXd& u) const {
    if (u.size() != nodes.size()) throw Error("derivative: sample size does not match the grid");
    Eigen::VectorXd du(u.size());
    const int q = points_per_panel;
    for (int k = 0; k < panels(); ++k) {
        const double scale = 2.0 / (breaks[k + 1] - breaks[k]);
        du.segment(k * q, q) = scale * (ref_diff_ * u.segment(k * q, q));
    }
    return du;
}

namespace {
double interpolate_at(const std::vector<double>& x, const std::vector<double>& bw, const double* f, double t) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = t - x[j];
        if (d == 0.0) return f[j];
        num += bw[j] / d * f[j];
        den += bw[j] / d;
    }
    return num / den;
}
}  // namespace

std::pair<double, double> Quadrature::endpoint_values(const Eigen::VectorXd& u) const {
    const int q = points_per_panel;
    const double ua = interpolate_at(ref_x_, ref_bary_, u.data(), -1.0);
    const double ub = interpolate_at(ref_x_, ref_bary_, u.data() + (panels() - 1) * q, 1.0);
    return {ua, ub};
}

Eigen::VectorXd Quadrature::plus_mask() const { return (sign.array() > 0.0).cast<double>().matrix(); }
Eigen::VectorXd Quadrature::minus_mask() const { return (sign.array() < 0.0).cast<double>().matrix(); }

double inner_abs_h(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Quadrature& grid) {
    if (u.size() != grid.size() || v.size() != grid.size()) throw Error("inner_abs_h: shape mismatch");
    return u.cwiseProduct(grid.abs_h_weights).dot(v);
}

double inner_signed(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Quadrature& grid) {
    if (u.size() != grid.size() || v.size() != grid.size()) throw Error("inner_signed: shape mismatch");
    return u.cwiseProduct(grid.signed_weights).dot(v);
}

double inner_A(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Quadrature& grid) {
    if (u.size() != grid.size() || v.size() != grid.size()) throw Error("inner_A: shape mismatch");
    const Eigen::VectorXd du = grid.derivative(u), dv = grid.derivative(v);
    double s = du.cwiseProduct(grid.p).cwiseProduct(grid.weights).dot(dv);
    if (grid.robin_a != 0.0 || grid.robin_b != 0.0) {
        const auto [ua, ub] = grid.endpoint_values(u);
        const auto [va, vb] = grid.endpoint_values(v);
        s += grid.robin_a * ua * va + grid.robin_b * ub * vb;
    }
    return s;
}

}  // namespace twoway
