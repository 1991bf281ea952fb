#include "twoway/basis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace twoway {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> lagrange_row(const std::vector<double>& x, const std::vector<double>& bw, double t) {
    const std::size_t n = x.size();
    std::vector<double> row(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (t == x[j]) {
            row[j] = 1.0;
            return row;
        }
    }
    double den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        row[j] = bw[j] / (t - x[j]);
        den += row[j];
    }
    for (auto& r : row) r /= den;
    return row;
}

bool strong_dirichlet(double angle) { return std::abs(std::sin(angle)) < 1e-14; }

}  // namespace

std::vector<std::vector<int>> Discretization::sectors() const {
    std::vector<int> all(static_cast<std::size_t>(size()));
    std::iota(all.begin(), all.end(), 0);
    return {all};
}

Eigen::VectorXd Discretization::half_period_overlaps(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) const {
    const auto& breaks = quadrature_breaks(recommended_panels());
    const Rule rule = gauss_legendre(quadrature_order());
    std::vector<double> at, shifted;
    std::vector<double> w;
    const double lo = breaks.front(), hi = breaks.back(), period = hi - lo;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double mid = 0.5 * (breaks[k] + breaks[k + 1]), half = 0.5 * (breaks[k + 1] - breaks[k]);
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            const double t = mid + half * rule.x[i];
            const double s = t + 0.5 * period;
            at.push_back(t);
            shifted.push_back(s >= hi ? s - period : s);
            w.push_back(half * rule.w[i]);
        }
    }
    const Eigen::MatrixXd fv = evaluate(at, f, 0), gv = evaluate(shifted, g, 0);
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    return (wv.asDiagonal() * fv.cwiseProduct(gv)).colwise().sum().transpose();
}

// ---------------------------------------------------------------- Fourier

FourierDiscretization::FourierDiscretization(const ProblemSpec& spec, int harmonics)
    : spec_(spec), harmonics_(harmonics) {
    if (spec.bc != BoundaryKind::periodic) throw Error("Fourier discretization needs periodic conditions");
    if (!spec.p.is_constant()) throw Error("Fourier discretization needs constant p");
    if (harmonics < 1) throw Error("Fourier discretization needs at least one harmonic");
    const double period = spec.b - spec.a;
    omega_ = 2.0 * kPi / period;
    center_ = 0.5 * (spec.a + spec.b);
    const int n = static_cast<int>(size());

    // Complex Fourier coefficients of h up to |k| = 2M by the uniform trapezoid
    // rule, exact for trigonometric-polynomial h.
    const int nk = 2 * harmonics_;
    const int q = 2 * nk + 64;
    std::vector<double> hs(q), ts(q);
    for (int j = 0; j < q; ++j) {
        ts[j] = spec.a + period * j / q;
        hs[j] = spec.h(ts[j]);
    }
    std::vector<std::complex<double>> hk(2 * nk + 1);
    double hmax = 0.0;
    for (int k = -nk; k <= nk; ++k) {
        std::complex<double> s = 0.0;
        for (int j = 0; j < q; ++j) s += hs[j] * std::polar(1.0, -k * omega_ * (ts[j] - center_));
        hk[k + nk] = s / static_cast<double>(q);
        hmax = std::max(hmax, std::abs(hk[k + nk]));
    }
    even_h_ = true;
    const double drop = 64.0 * q * std::numeric_limits<double>::epsilon() * hmax;
    for (auto& c : hk) {
        if (std::abs(c.real()) < drop) c.real(0.0);
        if (std::abs(c.imag()) < drop) c.imag(0.0);
        if (c.imag() != 0.0) even_h_ = false;
    }
    for (int k = -nk; k <= nk; ++k)
        if (hk[k + nk] != 0.0) h_terms_.emplace_back(k, hk[k + nk]);

    // Basis index → (exponent, coefficient) pairs: 1 = E_0,
    // cos nt = (E_n + E_-n)/2, sin nt = (E_n − E_-n)/(2i).
    struct Term {
        int k;
        std::complex<double> c;
    };
    std::vector<std::vector<Term>> terms(n);
    terms[0] = {{0, 1.0}};
    const std::complex<double> i_unit(0.0, 1.0);
    for (int m = 1; m <= harmonics_; ++m) {
        terms[2 * m - 1] = {{m, 0.5}, {-m, 0.5}};
        terms[2 * m] = {{m, 0.5 / i_unit}, {-m, -0.5 / i_unit}};
    }
    const auto h_of = [&](int k) -> std::complex<double> { return std::abs(k) > nk ? 0.0 : hk[k + nk]; };

    weight_.setZero(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = r; c < n; ++c) {
            std::complex<double> s = 0.0;
            for (const auto& tr : terms[r])
                for (const auto& tc : terms[c]) s += tr.c * tc.c * h_of(-(tr.k + tc.k));
            weight_(r, c) = weight_(c, r) = period * s.real();
        }
    }

    stiffness_.setZero(n, n);
    const double p = spec.p.constant;
    for (int m = 1; m <= harmonics_; ++m) {
        const double kk = p * (m * omega_) * (m * omega_) * period / 2.0;
        stiffness_(2 * m - 1, 2 * m - 1) = kk;
        stiffness_(2 * m, 2 * m) = kk;
    }
    mass_.setZero(n);
    mass_(0) = period;
    constant_.setZero(n);
    constant_(0) = 1.0;
}

std::vector<std::vector<int>> FourierDiscretization::sectors() const {
    if (!even_h_) return Discretization::sectors();
    std::vector<int> even{0}, odd;
    for (int m = 1; m <= harmonics_; ++m) {
        even.push_back(2 * m - 1);
        odd.push_back(2 * m);
    }
    return {even, odd};
}

Eigen::MatrixXd FourierDiscretization::evaluate(std::span<const double> theta, const Eigen::MatrixXd& coeffs,
                                                int derivative) const {
    if (coeffs.rows() != size()) throw Error("evaluate: coefficient size mismatch");
    if (derivative < 0 || derivative > 2) throw Error("evaluate: derivative order must be 0, 1 or 2");
    const Eigen::Index nt = static_cast<Eigen::Index>(theta.size());
    Eigen::MatrixXd out(nt, coeffs.cols());
    constexpr Eigen::Index chunk = 512;
    const int n = static_cast<int>(size());
    for (Eigen::Index start = 0; start < nt; start += chunk) {
        const Eigen::Index rows = std::min(chunk, nt - start);
        Eigen::MatrixXd basis(rows, n);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double t = theta[start + r] - center_;
            const double c1 = std::cos(omega_ * t), s1 = std::sin(omega_ * t);
            double c = 1.0, sn = 0.0;
            basis(r, 0) = derivative == 0 ? 1.0 : 0.0;
            for (int m = 1; m <= harmonics_; ++m) {
                const double cn = c * c1 - sn * s1;
                sn = sn * c1 + c * s1;
                c = cn;
                const double k = m * omega_;
                if (derivative == 0) {
                    basis(r, 2 * m - 1) = c;
                    basis(r, 2 * m) = sn;
                } else if (derivative == 1) {
                    basis(r, 2 * m - 1) = -k * sn;
                    basis(r, 2 * m) = k * c;
                } else {
                    basis(r, 2 * m - 1) = -k * k * c;
                    basis(r, 2 * m) = -k * k * sn;
                }
            }
        }
        out.middleRows(start, rows).noalias() = basis * coeffs;
    }
    return out;
}

Eigen::VectorXd FourierDiscretization::residuals(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& lambdas) const {
    // Exact via Parseval: residual coefficients on exponentials E_k, |k| ≤ M + deg h.
    int spread = 0;
    for (const auto& [k, c] : h_terms_) spread = std::max(spread, std::abs(k));
    const int kmax = harmonics_ + spread;
    Eigen::VectorXd out(coeffs.cols());
    std::vector<std::complex<double>> v(2 * harmonics_ + 1), r(2 * kmax + 1);
    const std::complex<double> i_unit(0.0, 1.0);
    for (Eigen::Index col = 0; col < coeffs.cols(); ++col) {
        const auto c = coeffs.col(col);
        v[harmonics_] = c(0);
        for (int m = 1; m <= harmonics_; ++m) {
            v[harmonics_ + m] = 0.5 * (c(2 * m - 1) - i_unit * c(2 * m));
            v[harmonics_ - m] = 0.5 * (c(2 * m - 1) + i_unit * c(2 * m));
        }
        std::fill(r.begin(), r.end(), 0.0);
        double vnorm = 0.0;
        for (int m = -harmonics_; m <= harmonics_; ++m) {
            const std::complex<double> vm = v[harmonics_ + m];
            vnorm += std::norm(vm);
            r[kmax + m] += spec_.p.constant * (m * omega_) * (m * omega_) * vm;
            for (const auto& [k, hc] : h_terms_) r[kmax + m + k] -= lambdas(col) * hc * vm;
        }
        double rnorm = 0.0;
        for (const auto& x : r) rnorm += std::norm(x);
        out(col) = std::sqrt(rnorm / vnorm) / std::abs(lambdas(col));
    }
    return out;
}

Eigen::VectorXd FourierDiscretization::half_period_overlaps(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) const {
    // Shifting by T/2 multiplies harmonic m by (−1)^m.
    const double period = spec_.b - spec_.a;
    Eigen::VectorXd out(f.cols());
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
        double s = period * f(0, c) * g(0, c);
        for (int m = 1; m <= harmonics_; ++m) {
            const double sign = m % 2 == 0 ? 1.0 : -1.0;
            s += sign * 0.5 * period * (f(2 * m - 1, c) * g(2 * m - 1, c) + f(2 * m, c) * g(2 * m, c));
        }
        out(c) = s;
    }
    return out;
}

std::vector<double> FourierDiscretization::quadrature_breaks(int min_panels) const {
    return graded_breaks(spec_, std::max(min_panels, static_cast<int>(spec_.turning_points().size()) + 1));
}

// ------------------------------------------------------- spectral elements

ElementDiscretization::ElementDiscretization(const ProblemSpec& spec, int elements, int degree)
    : spec_(spec), degree_(degree) {
    if (degree < 2) throw Error("element degree must be at least 2");
    breaks_ = graded_breaks(spec, elements);
    const int ne = static_cast<int>(breaks_.size()) - 1;
    const int np = degree_ + 1;

    const Rule lob = gauss_lobatto(np);
    gll_ = lob.x;
    bary_ = barycentric_weights(gll_);
    diff_ = differentiation_matrix(gll_);

    // Node numbering with periodic identification and strong Dirichlet elimination.
    const int raw = ne * degree_ + 1;
    std::vector<int> raw_to_dof(raw, 0);
    const bool periodic = spec.bc == BoundaryKind::periodic;
    const bool drop_a = !periodic && strong_dirichlet(spec.alpha_effective());
    const bool drop_b = !periodic && strong_dirichlet(spec.beta_effective());
    int next = 0;
    for (int g = 0; g < raw; ++g) {
        if ((g == 0 && drop_a) || (g == raw - 1 && drop_b)) {
            raw_to_dof[g] = -1;
        } else if (g == raw - 1 && periodic) {
            raw_to_dof[g] = raw_to_dof[0];
        } else {
            raw_to_dof[g] = next++;
        }
    }
    dofs_ = next;
    global_.resize(static_cast<std::size_t>(ne) * np);
    for (int e = 0; e < ne; ++e)
        for (int i = 0; i < np; ++i) global_[e * np + i] = raw_to_dof[e * degree_ + i];

    const Rule gl = gauss_legendre(degree_ + 6);
    const int nq = static_cast<int>(gl.x.size());
    Eigen::MatrixXd phi(nq, np);
    for (int q = 0; q < nq; ++q) {
        const auto row = lagrange_row(gll_, bary_, gl.x[q]);
        for (int i = 0; i < np; ++i) phi(q, i) = row[i];
    }
    const Eigen::MatrixXd dphi = phi * diff_;

    stiffness_.setZero(dofs_, dofs_);
    weight_.setZero(dofs_, dofs_);
    mass_.setZero(dofs_);
    for (int e = 0; e < ne; ++e) {
        const double lo = breaks_[e], hi = breaks_[e + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
        Eigen::VectorXd wp(nq), wh(nq), w(nq);
        for (int q = 0; q < nq; ++q) {
            const double t = mid + half * gl.x[q];
            w(q) = half * gl.w[q];
            wp(q) = gl.w[q] * spec.p.value(t) / half;
            wh(q) = w(q) * spec.h(t);
        }
        const Eigen::MatrixXd ke = dphi.transpose() * wp.asDiagonal() * dphi;
        const Eigen::MatrixXd he = phi.transpose() * wh.asDiagonal() * phi;
        const Eigen::VectorXd me = phi.transpose() * w;
        for (int i = 0; i < np; ++i) {
            const int gi = global_[e * np + i];
            if (gi < 0) continue;
            mass_(gi) += me(i);
            for (int j = 0; j < np; ++j) {
                const int gj = global_[e * np + j];
                if (gj < 0) continue;
                stiffness_(gi, gj) += ke(i, j);
                weight_(gi, gj) += he(i, j);
            }
        }
    }

    // Robin boundary terms of the bilinear form.
    if (!periodic) {
        const double aa = spec.alpha_effective(), bb = spec.beta_effective();
        const int ga = global_.front(), gb = global_.back();
        if (ga >= 0 && std::abs(std::cos(aa)) > 1e-14)
            stiffness_(ga, ga) += -spec.p.value(spec.a) * std::cos(aa) / std::sin(aa);
        if (gb >= 0 && std::abs(std::cos(bb)) > 1e-14)
            stiffness_(gb, gb) += spec.p.value(spec.b) * std::cos(bb) / std::sin(bb);
    }

    if (!drop_a && !drop_b) constant_ = Eigen::VectorXd::Ones(dofs_);
}

int ElementDiscretization::element_of(double theta) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), theta);
    const int e = static_cast<int>(it - breaks_.begin()) - 1;
    return std::clamp(e, 0, static_cast<int>(breaks_.size()) - 2);
}

Eigen::VectorXd ElementDiscretization::element_values(const Eigen::VectorXd& coeffs, int e) const {
    const int np = degree_ + 1;
    Eigen::VectorXd u(np);
    for (int i = 0; i < np; ++i) {
        const int g = global_[e * np + i];
        u(i) = g < 0 ? 0.0 : coeffs(g);
    }
    return u;
}

Eigen::MatrixXd ElementDiscretization::evaluate(std::span<const double> theta, const Eigen::MatrixXd& coeffs,
                                                int derivative) const {
    if (coeffs.rows() != size()) throw Error("evaluate: coefficient size mismatch");
    if (derivative < 0 || derivative > 2) throw Error("evaluate: derivative order must be 0, 1 or 2");
    const int np = degree_ + 1;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(theta.size()), coeffs.cols());
    for (std::size_t t = 0; t < theta.size(); ++t) {
        const int e = element_of(theta[t]);
        const double lo = breaks_[e], hi = breaks_[e + 1];
        const double xi = 2.0 * (theta[t] - lo) / (hi - lo) - 1.0;
        const auto row = lagrange_row(gll_, bary_, xi);
        Eigen::RowVectorXd wts = Eigen::Map<const Eigen::RowVectorXd>(row.data(), np);
        for (int d = 0; d < derivative; ++d) wts = (wts * diff_) * (2.0 / (hi - lo));
        for (int i = 0; i < np; ++i) {
            const int g = global_[e * np + i];
            if (g >= 0 && wts(i) != 0.0) out.row(static_cast<Eigen::Index>(t)) += wts(i) * coeffs.row(g);
        }
    }
    return out;
}

Eigen::VectorXd ElementDiscretization::residuals(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& lambdas) const {
    const int np = degree_ + 1;
    const Rule gl = gauss_legendre(degree_ + 6);
    const int nq = static_cast<int>(gl.x.size());
    Eigen::MatrixXd phi(nq, np);
    for (int q = 0; q < nq; ++q) {
        const auto row = lagrange_row(gll_, bary_, gl.x[q]);
        for (int i = 0; i < np; ++i) phi(q, i) = row[i];
    }
    const Eigen::MatrixXd d1 = phi * diff_;
    const Eigen::MatrixXd d2 = d1 * diff_;
    const Eigen::Index nc = coeffs.cols();
    Eigen::VectorXd num = Eigen::VectorXd::Zero(nc), den = Eigen::VectorXd::Zero(nc);
    const int ne = static_cast<int>(breaks_.size()) - 1;
    for (int e = 0; e < ne; ++e) {
        const double lo = breaks_[e], hi = breaks_[e + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(np, nc);
        for (int i = 0; i < np; ++i) {
            const int g = global_[e * np + i];
            if (g >= 0) u.row(i) = coeffs.row(g);
        }
        Eigen::VectorXd w(nq), pv(nq), ps(nq), hv(nq);
        for (int q = 0; q < nq; ++q) {
            const double t = mid + half * gl.x[q];
            w(q) = half * gl.w[q];
            pv(q) = spec_.p.value(t);
            ps(q) = spec_.p.slope(t);
            hv(q) = spec_.h(t);
        }
        const Eigen::MatrixXd v = phi * u;
        const Eigen::MatrixXd r = -(pv.asDiagonal() * (d2 * u)) / (half * half) - (ps.asDiagonal() * (d1 * u)) / half -
                                  hv.asDiagonal() * v * lambdas.asDiagonal();
        num += (w.asDiagonal() * r.cwiseAbs2()).colwise().sum().transpose();
        den += (w.asDiagonal() * v.cwiseAbs2()).colwise().sum().transpose();
    }
    return (num.array() / den.array()).sqrt().matrix().cwiseQuotient(lambdas.cwiseAbs());
}

std::vector<double> ElementDiscretization::quadrature_breaks(int min_panels) const {
    const int ne = static_cast<int>(breaks_.size()) - 1;
    const int split = std::max(1, (min_panels + ne - 1) / ne);
    std::vector<double> out{breaks_.front()};
    for (int e = 0; e < ne; ++e)
        for (int k = 1; k <= split; ++k) out.push_back(breaks_[e] + (breaks_[e + 1] - breaks_[e]) * k / split);
    out.back() = breaks_.back();
    return out;
}

// ------------------------------------------------------------------ factory

std::shared_ptr<const Discretization> make_discretization(const ProblemSpec& spec, int modes_per_sign,
                                                          double resolution) {
    spec.validate();
    if (modes_per_sign < 1) throw Error("need at least one mode per sign");
    if (!(resolution > 0.0)) throw Error("resolution factor must be positive");
    const bool trig = spec.h.kind == WeightKind::cos || spec.h.kind == WeightKind::cos_minus_r;
    if (trig && spec.bc == BoundaryKind::periodic && spec.p.is_constant())
        return std::make_shared<FourierDiscretization>(
            spec, static_cast<int>(std::ceil(resolution * (3 * modes_per_sign + 48))));
    constexpr int degree = 32;
    const int n_sub = static_cast<int>(spec.turning_points().size()) + 1;
    const int dofs = static_cast<int>(std::ceil(resolution * (7 * modes_per_sign + 64)));
    const int elements = std::max(2 * n_sub, (dofs + degree - 1) / degree);
    return std::make_shared<ElementDiscretization>(spec, elements, degree);
}

}  // namespace twoway
