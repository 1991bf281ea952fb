#include "twoway/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "twoway/linalg.hpp"

namespace twoway {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Bordered solve of K g = −H·1 with ∫g = 0.
Eigen::VectorXd solve_g(const Discretization& basis) {
    const Eigen::Index n = basis.size();
    if (basis.constant().size() != n) throw Error("compute_g: constants are not admissible, no zero mode");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
    m.topLeftCorner(n, n) = basis.stiffness();
    m.block(0, n, n, 1) = basis.mass();
    m.block(n, 0, 1, n) = basis.mass().transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs.head(n) = -basis.weight() * basis.constant();
    const Eigen::VectorXd sol = m.partialPivLu().solve(rhs);
    if (!sol.allFinite()) throw Error("compute_g: singular bordered system");
    return sol.head(n);
}

bool shift_antisymmetric(const ProblemSpec& spec) {
    if (spec.bc != BoundaryKind::periodic) return false;
    const double period = spec.b - spec.a;
    double scale = 0.0, worst = 0.0;
    for (int k = 0; k < 97; ++k) {
        const double t = spec.a + period * (k + 0.37) / 97.0;
        const double s = t + 0.5 * period;
        const double ts = s >= spec.b ? s - period : s;
        scale = std::max(scale, std::abs(spec.h(t)));
        worst = std::max(worst, std::abs(spec.h(t) + spec.h(ts)));
    }
    return worst <= 1e-12 * scale;
}

}  // namespace

int Spectrum::position(int j, int n) {
    if (j == 0 || j < -n || j > n) throw Error("mode index out of range: " + std::to_string(j));
    return j < 0 ? j + n : j + n - 1;
}

int Spectrum::mode_number(int pos, int n) {
    if (pos < 0 || pos >= 2 * n) throw Error("mode position out of range");
    return pos < n ? pos - n : pos - n + 1;
}

Eigen::MatrixXd Spectrum::evaluate(std::span<const double> theta, int order) const {
    return basis->evaluate(theta, coefficients, order);
}

Eigen::VectorXd Spectrum::evaluate_g(std::span<const double> theta, int order) const {
    if (!has_g) throw Error("g is not defined for this problem");
    return basis->evaluate(theta, g_coefficients, order).col(0);
}

Eigen::MatrixXd Spectrum::sample_on(const Quadrature& other) const {
    return evaluate(std::span<const double>(other.nodes.data(), static_cast<std::size_t>(other.size())));
}

Quadrature Spectrum::make_grid(double scale) const {
    const int panels = std::max(1, static_cast<int>(std::ceil(scale * basis->recommended_panels())));
    return build_grid_on_breaks(spec, basis->quadrature_breaks(panels), basis->quadrature_order());
}

Spectrum Spectrum::leading(int n) const {
    if (n < 1 || n > N) throw Error("leading: mode count out of range");
    Spectrum out = *this;
    out.N = n;
    std::vector<int> cols;
    for (int j = -n; j <= n; ++j)
        if (j != 0) cols.push_back(position(j));
    const auto idx = Eigen::Map<const Eigen::VectorXi>(cols.data(), static_cast<Eigen::Index>(cols.size()));
    out.eigenvalues = eigenvalues(idx);
    out.residuals = residuals(idx);
    out.coefficients = coefficients(Eigen::all, idx);
    out.values = values(Eigen::all, idx);
    return out;
}

Spectrum solve_spectrum(const ProblemSpec& spec, int N, const SpectralOptions& options) {
    spec.validate();
    if (N < 1) throw Error("solve_spectrum: N must be at least 1");
    Spectrum s;
    s.spec = spec;
    s.N = N;
    s.basis = make_discretization(spec, N, options.resolution);
    const Discretization& basis = *s.basis;
    const Eigen::Index n = basis.size();
    const Eigen::MatrixXd& K = basis.stiffness();
    const Eigen::MatrixXd& H = basis.weight();

    s.has_zero_mode = spec.has_zero_mode();
    s.has_g = spec.has_secular_mode();
    Eigen::MatrixXd constraints(n, 0);
    if (s.has_zero_mode) {
        const Eigen::VectorXd he = H * basis.constant();
        if (s.has_g) {
            s.g_coefficients = solve_g(basis);
            constraints.resize(n, 2);
            constraints.col(0) = he;
            constraints.col(1) = H * s.g_coefficients;
        } else {
            constraints = he;
        }
    }

    struct Candidate {
        double lambda;
        Eigen::VectorXd x;
    };
    std::vector<Candidate> found;
    for (const auto& sector : basis.sectors()) {
        const auto idx = Eigen::Map<const Eigen::VectorXi>(sector.data(), static_cast<Eigen::Index>(sector.size()));
        const Eigen::MatrixXd ks = K(idx, idx), hs = H(idx, idx);
        std::vector<Eigen::VectorXd> cons;
        for (Eigen::Index c = 0; c < constraints.cols(); ++c) {
            Eigen::VectorXd col = constraints.col(c)(idx);
            if (col.norm() > 1e-12 * std::max(1.0, constraints.col(c).norm())) cons.push_back(col);
        }
        Eigen::MatrixXd cs(idx.size(), static_cast<Eigen::Index>(cons.size()));
        for (std::size_t c = 0; c < cons.size(); ++c) cs.col(static_cast<Eigen::Index>(c)) = cons[c];
        const auto modes = linalg::pencil_modes_near_zero(ks, hs, cs, N, N);
        for (Eigen::Index m = 0; m < modes.lambda.size(); ++m) {
            Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
            full(idx) = modes.vectors.col(m);
            found.push_back({modes.lambda(m), std::move(full)});
        }
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& l, const auto& r) { return l.lambda < r.lambda; });
    const auto first_pos = std::find_if(found.begin(), found.end(), [](const auto& c) { return c.lambda > 0.0; });
    const std::ptrdiff_t n_neg = first_pos - found.begin();
    if (n_neg < N || found.end() - first_pos < N) throw Error("solve_spectrum: too few modes of one sign");

    s.eigenvalues.resize(2 * N);
    s.coefficients.resize(n, 2 * N);
    for (int p = 0; p < 2 * N; ++p) {
        const auto& c = p < N ? found[static_cast<std::size_t>(n_neg - N + p)]
                              : found[static_cast<std::size_t>(n_neg + p - N)];
        s.eigenvalues(p) = c.lambda;
        // x is K-normalized; v = √|λ| x gives sgn(λ) vᵀHv = 1.
        s.coefficients.col(p) = std::sqrt(std::abs(c.lambda)) * c.x;
    }

    double scale = options.quadrature_scale;
    s.grid = s.make_grid(scale);
    while (s.grid.size() < options.min_nodes) {
        scale *= 2.0;
        s.grid = s.make_grid(scale);
    }
    s.values = s.evaluate(std::span<const double>(s.grid.nodes.data(), static_cast<std::size_t>(s.grid.size())));

    // Phase: positive at the first node where |v| exceeds half its maximum.
    for (int p = 0; p < 2 * N; ++p) {
        const auto col = s.values.col(p);
        const double half = 0.5 * col.cwiseAbs().maxCoeff();
        Eigen::Index first = 0;
        while (std::abs(col(first)) <= half) ++first;
        if (col(first) < 0.0) {
            s.values.col(p) *= -1.0;
            s.coefficients.col(p) *= -1.0;
        }
    }
    // When h(θ + T/2) = −h(θ), v_{−j} is tied to the shifted v_j.
    if (shift_antisymmetric(spec)) {
        Eigen::MatrixXd neg(n, N), pos(n, N);
        for (int j = 1; j <= N; ++j) {
            neg.col(j - 1) = s.coefficients.col(Spectrum::position(-j, N));
            pos.col(j - 1) = s.coefficients.col(Spectrum::position(j, N));
        }
        const Eigen::VectorXd overlap = basis.half_period_overlaps(neg, pos);
        for (int j = 1; j <= N; ++j) {
            const int pp = Spectrum::position(j, N), pn = Spectrum::position(-j, N);
            if (std::abs(s.eigenvalues(pp) + s.eigenvalues(pn)) > 1e-6 * s.eigenvalues(pp)) continue;
            if (overlap(j - 1) < 0.0) {
                s.values.col(pn) *= -1.0;
                s.coefficients.col(pn) *= -1.0;
            }
        }
    }

    s.residuals = basis.residuals(s.coefficients, s.eigenvalues);
    for (int p = 0; p < 2 * N; ++p) {
        if (!(s.residuals(p) <= options.residual_tolerance))
            throw Error("solve_spectrum: mode " + std::to_string(Spectrum::mode_number(p, N)) + " has residual " +
                        fmt(s.residuals(p)) + "; fewer than 2N modes pass the residual filter");
    }

    if (s.has_g)
        s.g_values = basis.evaluate(std::span<const double>(s.grid.nodes.data(), static_cast<std::size_t>(s.grid.size())),
                                    s.g_coefficients, 0)
                         .col(0);
    return s;
}

Eigen::VectorXd compute_g(const ProblemSpec& spec, const Quadrature& grid) {
    spec.validate();
    if (!spec.has_zero_mode()) throw Error("compute_g: no zero mode for these boundary conditions");
    if (!spec.has_secular_mode()) throw Error("compute_g: ∫h ≠ 0, so A g = −h has no periodic/Neumann solution");
    const auto basis = make_discretization(spec, 16);
    const Eigen::VectorXd coeffs = solve_g(*basis);
    return basis->evaluate(std::span<const double>(grid.nodes.data(), static_cast<std::size_t>(grid.size())), coeffs, 0)
        .col(0);
}

double half_range_moment(const Spectrum& spectrum, int j) {
    const Eigen::VectorXd v = spectrum.mode(j);
    double s = 0.0;
    for (int i : spectrum.grid.pos) s += spectrum.grid.signed_weights(i) * v(i);
    return spectrum.lambda(j) > 0.0 ? s : -s;
}

std::pair<double, double> wronskian_overlap_check(const Spectrum& spectrum, int j, int k) {
    const double lj = spectrum.lambda(j), lk = spectrum.lambda(k);
    if (lj * lk >= 0.0) throw Error("wronskian_overlap_check: eigenvalues must have opposite signs");
    const auto tps = spectrum.spec.turning_points();
    if (tps.size() != 1 || spectrum.spec.h.turning_multiplicity() % 2 == 0)
        throw Error("wronskian_overlap_check: needs a single turning point of odd multiplicity");
    const double lhs =
        std::abs(spectrum.mode(j).cwiseProduct(spectrum.grid.abs_h_weights).dot(spectrum.mode(k)));
    const double at[1] = {tps[0]};
    const Eigen::MatrixXd v = spectrum.evaluate(at, 0), dv = spectrum.evaluate(at, 1);
    const int pj = spectrum.position(j), pk = spectrum.position(k);
    const double wr = v(0, pj) * dv(0, pk) - dv(0, pj) * v(0, pk);
    const double rhs = 2.0 * std::abs(wr) / (std::abs(lj) + std::abs(lk));
    return {lhs, rhs};
}

std::string spectrum_csv(const Spectrum& s) {
    std::ostringstream out;
    out << "j,lambda,residual\n";
    for (int p = 0; p < 2 * s.N; ++p)
        out << s.mode_number(p) << ',' << fmt(s.eigenvalues(p)) << ',' << fmt(s.residuals(p)) << '\n';
    return out.str();
}

std::string samples_csv(const Spectrum& s) {
    std::ostringstream out;
    out << "theta,h";
    for (int p = 0; p < 2 * s.N; ++p) out << ",v_" << s.mode_number(p);
    if (s.has_g) out << ",g";
    out << '\n';
    for (Eigen::Index i = 0; i < s.grid.size(); ++i) {
        out << fmt(s.grid.nodes(i)) << ',' << fmt(s.grid.h(i));
        for (int p = 0; p < 2 * s.N; ++p) out << ',' << fmt(s.values(i, p));
        if (s.has_g) out << ',' << fmt(s.g_values(i));
        out << '\n';
    }
    return out.str();
}

}  // namespace twoway
