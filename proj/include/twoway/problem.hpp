#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace twoway {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class WeightKind { cos, cos_minus_r, sgn, linear, cubic, tabulated };
enum class BoundaryKind { periodic, dirichlet, neumann, separated };

/// Piecewise-linear interpolant of samples taken uniformly on [a, b].
class UniformTable {
public:
    UniformTable() = default;
    UniformTable(double a, double b, std::vector<double> samples);

    bool empty() const { return samples_.empty(); }
    double value(double theta) const;
    double slope(double theta) const;
    const std::vector<double>& samples() const { return samples_; }

private:
    double a_ = 0.0;
    double b_ = 1.0;
    std::vector<double> samples_;
};

/// The weight h(θ) multiplying ∂f/∂x.
struct Weight {
    WeightKind kind = WeightKind::cos;
    double r = 0.0;       // offset for cos_minus_r
    UniformTable table;   // tabulated only

    double operator()(double theta) const;
    int turning_multiplicity() const;
    std::string name() const;
};

/// Diffusion coefficient p(θ); constant 1 unless samples are given.
struct Coefficient {
    double constant = 1.0;
    UniformTable table;

    double value(double theta) const { return table.empty() ? constant : table.value(theta); }
    double slope(double theta) const { return table.empty() ? 0.0 : table.slope(theta); }
    bool is_constant() const { return table.empty(); }
};

/// Boundary data w(θ): either (ρ₊ on h > 0, ρ₋ on h < 0) or a sampled function.
struct BoundaryData {
    double rho_plus = 0.0;
    double rho_minus = 0.0;
    UniformTable table;

    double value(double theta, double h_at_theta) const;
};

struct ProblemSpec {
    double a = -3.14159265358979323846;
    double b = 3.14159265358979323846;
    Weight h;
    Coefficient p;
    BoundaryKind bc = BoundaryKind::periodic;
    double alpha = 0.0;  // separated: cos α v(a) + sin α v'(a) = 0
    double beta = 0.0;   // separated: cos β v(b) + sin β v'(b) = 0
    double L = 1.0;
    BoundaryData w;
    std::string label;

    /// Throws Error on a violated invariant.
    void validate() const;

    /// Sorted interior zeros of h where it changes sign.
    std::vector<double> turning_points() const;

    /// ∫ h dθ over (a, b).
    double mean_h_integral() const;

    /// Constant functions satisfy the boundary conditions.
    bool has_zero_mode() const;

    /// Zero mode present and ∫h = 0, so the secular solution x + g exists.
    bool has_secular_mode() const;

    /// Effective separated-BC angles (Dirichlet: 0, Neumann: π/2).
    double alpha_effective() const;
    double beta_effective() const;
};

namespace presets {
ProblemSpec periodic_cos(double L = 1.0);
ProblemSpec periodic_cos_r(double r, double L = 1.0);
ProblemSpec step(double L = 1.0);
ProblemSpec linear(double L = 1.0);
ProblemSpec cubic(double L = 1.0);

/// Look up a preset by its CLI name ("periodic-cos", "periodic-cos-r", "step",
/// "linear", "cubic").
ProblemSpec by_name(const std::string& name, double L = 1.0, double r = 0.1);
std::vector<std::string> names();
}  // namespace presets

}  // namespace twoway
