#include "twoway/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace twoway {

UniformTable::UniformTable(double a, double b, std::vector<double> samples)
    : a_(a), b_(b), samples_(std::move(samples)) {
    if (samples_.size() < 2) throw Error("tabulated function needs at least two samples");
    if (!(a_ < b_)) throw Error("tabulated function needs a < b");
}

namespace {

// Locate θ in the uniform table; returns the cell index and the local fraction.
std::pair<std::size_t, double> locate(double a, double b, std::size_t n, double theta) {
    const double step = (b - a) / static_cast<double>(n - 1);
    double s = (theta - a) / step;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i >= n - 1) i = n - 2;
    return {i, s - static_cast<double>(i)};
}

}  // namespace

double UniformTable::value(double theta) const {
    auto [i, t] = locate(a_, b_, samples_.size(), theta);
    return (1.0 - t) * samples_[i] + t * samples_[i + 1];
}

double UniformTable::slope(double theta) const {
    auto [i, t] = locate(a_, b_, samples_.size(), theta);
    (void)t;
    const double step = (b_ - a_) / static_cast<double>(samples_.size() - 1);
    return (samples_[i + 1] - samples_[i]) / step;
}

double Weight::operator()(double theta) const {
    switch (kind) {
        case WeightKind::cos: return std::cos(theta);
        case WeightKind::cos_minus_r: return std::cos(theta) - r;
        case WeightKind::sgn: return theta > 0.0 ? 1.0 : (theta < 0.0 ? -1.0 : 0.0);
        case WeightKind::linear: return theta;
        case WeightKind::cubic: return theta * theta * theta;
        case WeightKind::tabulated: return table.value(theta);
    }
    return 0.0;
}

int Weight::turning_multiplicity() const {
    switch (kind) {
        case WeightKind::sgn: return 0;
        case WeightKind::cubic: return 3;
        default: return 1;
    }
}

std::string Weight::name() const {
    switch (kind) {
        case WeightKind::cos: return "cos";
        case WeightKind::cos_minus_r: return "cos_minus_r";
        case WeightKind::sgn: return "sgn";
        case WeightKind::linear: return "linear";
        case WeightKind::cubic: return "cubic";
        case WeightKind::tabulated: return "tabulated";
    }
    return "unknown";
}

double BoundaryData::value(double theta, double h_at_theta) const {
    if (!table.empty()) return table.value(theta);
    return h_at_theta > 0.0 ? rho_plus : rho_minus;
}

void ProblemSpec::validate() const {
    if (!(a < b)) throw Error("problem: require a < b");
    if (!(L > 0.0)) throw Error("problem: require L > 0");
    if (p.is_constant()) {
        if (!(p.constant > 0.0)) throw Error("problem: require p > 0");
    } else {
        for (double s : p.table.samples())
            if (!(s > 0.0)) throw Error("problem: require p > 0 at every sample");
    }
    if (h.kind == WeightKind::cos_minus_r && !(h.r >= 0.0 && h.r < 1.0))
        throw Error("problem: cos_minus_r requires 0 <= r < 1");
    if (h.kind == WeightKind::tabulated && h.table.empty())
        throw Error("problem: tabulated weight has no samples");
    if (bc == BoundaryKind::separated) {
        // A must be non-negative: cot β ≥ 0 and cot α ≤ 0 in the boundary form.
        const double ca = std::cos(alpha), sa = std::sin(alpha);
        const double cb = std::cos(beta), sb = std::sin(beta);
        if (std::abs(sa) > 1e-14 && ca / sa > 1e-14)
            throw Error("problem: separated BC at a makes A indefinite (cot alpha > 0)");
        if (std::abs(sb) > 1e-14 && cb / sb < -1e-14)
            throw Error("problem: separated BC at b makes A indefinite (cot beta < 0)");
    }
}

std::vector<double> ProblemSpec::turning_points() const {
    std::vector<double> tp;
    auto keep = [&](double t) {
        if (t > a && t < b) tp.push_back(t);
    };
    switch (h.kind) {
        case WeightKind::cos:
            for (int k = -8; k <= 8; ++k) keep((k + 0.5) * std::numbers::pi);
            break;
        case WeightKind::cos_minus_r: {
            const double t0 = std::acos(h.r);
            for (int k = -4; k <= 4; ++k) {
                keep(t0 + 2.0 * k * std::numbers::pi);
                keep(-t0 + 2.0 * k * std::numbers::pi);
            }
            break;
        }
        case WeightKind::sgn:
        case WeightKind::linear:
        case WeightKind::cubic:
            keep(0.0);
            break;
        case WeightKind::tabulated: {
            const auto& s = h.table.samples();
            const double step = (b - a) / static_cast<double>(s.size() - 1);
            for (std::size_t i = 0; i + 1 < s.size(); ++i) {
                if (s[i] == 0.0 && i > 0 && s[i - 1] * s[i + 1] < 0.0) {
                    keep(a + step * static_cast<double>(i));
                } else if (s[i] * s[i + 1] < 0.0) {
                    const double t = s[i] / (s[i] - s[i + 1]);
                    keep(a + step * (static_cast<double>(i) + t));
                }
            }
            break;
        }
    }
    std::sort(tp.begin(), tp.end());
    tp.erase(std::unique(tp.begin(), tp.end(), [](double x, double y) { return std::abs(x - y) < 1e-13; }),
             tp.end());
    return tp;
}

double ProblemSpec::mean_h_integral() const {
    // Composite 8-point Gauss-Legendre, panels split at turning points.
    static constexpr double xg[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                     0.9602898564975363};
    static constexpr double wg[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                     0.1012285362903763};
    std::vector<double> br{a};
    for (double t : turning_points()) br.push_back(t);
    br.push_back(b);
    double sum = 0.0;
    constexpr int sub = 256;
    for (std::size_t s = 0; s + 1 < br.size(); ++s) {
        const double w = (br[s + 1] - br[s]) / sub;
        for (int k = 0; k < sub; ++k) {
            const double mid = br[s] + (k + 0.5) * w, half = 0.5 * w;
            for (int q = 0; q < 4; ++q)
                sum += half * wg[q] * (h(mid - half * xg[q]) + h(mid + half * xg[q]));
        }
    }
    return sum;
}

bool ProblemSpec::has_zero_mode() const {
    if (bc == BoundaryKind::periodic || bc == BoundaryKind::neumann) return true;
    if (bc == BoundaryKind::separated)
        return std::abs(std::cos(alpha)) < 1e-14 && std::abs(std::cos(beta)) < 1e-14;
    return false;
}

bool ProblemSpec::has_secular_mode() const {
    if (!has_zero_mode()) return false;
    // Mean-zero test relative to sup|h|·(b − a).
    double scale = 0.0;
    for (int i = 0; i <= 64; ++i) scale = std::max(scale, std::abs(h(a + (b - a) * i / 64.0)));
    return std::abs(mean_h_integral()) <= 1e-10 * scale * (b - a);
}

double ProblemSpec::alpha_effective() const {
    switch (bc) {
        case BoundaryKind::dirichlet: return 0.0;
        case BoundaryKind::neumann: return std::numbers::pi / 2.0;
        default: return alpha;
    }
}

double ProblemSpec::beta_effective() const {
    switch (bc) {
        case BoundaryKind::dirichlet: return 0.0;
        case BoundaryKind::neumann: return std::numbers::pi / 2.0;
        default: return beta;
    }
}

namespace presets {

ProblemSpec periodic_cos(double L) {
    ProblemSpec s;
    s.a = -std::numbers::pi;
    s.b = std::numbers::pi;
    s.h.kind = WeightKind::cos;
    s.bc = BoundaryKind::periodic;
    s.L = L;
    s.w = {1.0, 2.0, {}};
    s.label = "periodic-cos";
    return s;
}

ProblemSpec periodic_cos_r(double r, double L) {
    ProblemSpec s = periodic_cos(L);
    s.h.kind = WeightKind::cos_minus_r;
    s.h.r = r;
    s.label = "periodic-cos-r";
    return s;
}

namespace {
ProblemSpec absorbing(WeightKind kind, double L, const char* label) {
    ProblemSpec s;
    s.a = -1.0;
    s.b = 1.0;
    s.h.kind = kind;
    s.bc = BoundaryKind::dirichlet;
    s.L = L;
    s.w = {1.0, 2.0, {}};
    s.label = label;
    return s;
}
}  // namespace

ProblemSpec step(double L) { return absorbing(WeightKind::sgn, L, "step"); }
ProblemSpec linear(double L) { return absorbing(WeightKind::linear, L, "linear"); }
ProblemSpec cubic(double L) { return absorbing(WeightKind::cubic, L, "cubic"); }

ProblemSpec by_name(const std::string& name, double L, double r) {
    if (name == "periodic-cos") return periodic_cos(L);
    if (name == "periodic-cos-r") return periodic_cos_r(r, L);
    if (name == "step") return step(L);
    if (name == "linear") return linear(L);
    if (name == "cubic") return cubic(L);
    throw Error("unknown problem preset '" + name + "'");
}

std::vector<std::string> names() { return {"periodic-cos", "periodic-cos-r", "step", "linear", "cubic"}; }

}  // namespace presets

}  // namespace twoway
