#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "twoway/problem.hpp"

namespace twoway {

/// A quadrature rule on [-1, 1].
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

Rule gauss_legendre(int n);

/// Gauss-Lobatto-Legendre rule with n points (endpoints included), n >= 2.
Rule gauss_lobatto(int n);

/// Derivative matrix of the polynomial interpolant through the given nodes.
Eigen::MatrixXd differentiation_matrix(const std::vector<double>& x);

/// Barycentric weights for polynomial interpolation through x.
std::vector<double> barycentric_weights(const std::vector<double>& x);

/// Panel boundaries on [a, b] that include every turning point. Within each
/// sign-definite interval panels are graded so that each carries an equal
/// share of ∫(√|h| + ε) dθ, i.e. roughly equal oscillation phase for modes
/// of large |λ|.
std::vector<double> graded_breaks(const ProblemSpec& spec, int n_panels);

/// Composite Gauss-Legendre grid. Nodes never sit on a turning point.
struct Quadrature {
    std::vector<double> breaks;
    int points_per_panel = 16;

    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    Eigen::VectorXd h;       // h at nodes
    Eigen::VectorXd p;       // p at nodes
    Eigen::VectorXd sign;    // sgn h at nodes
    std::vector<int> pos;    // nodes with h > 0
    std::vector<int> neg;    // nodes with h < 0

    // Boundary form of A for separated Robin conditions:
    // ⟨u,v⟩_A = ∫ p u'v' + robin_b u(b)v(b) + robin_a u(a)v(a).
    double robin_a = 0.0;
    double robin_b = 0.0;

    Eigen::VectorXd abs_h_weights;     // w |h|
    Eigen::VectorXd signed_weights;    // w h

    Eigen::Index size() const { return nodes.size(); }
    int panels() const { return static_cast<int>(breaks.size()) - 1; }

    double integrate(const Eigen::VectorXd& f) const { return weights.dot(f); }
    Eigen::VectorXd sample(const std::function<double(double)>& f) const;

    /// Nodal derivative of a panelwise-smooth function (per-panel spectral differentiation).
    Eigen::VectorXd derivative(const Eigen::VectorXd& u) const;

    /// Values at θ = a and θ = b extrapolated from the end panels.
    std::pair<double, double> endpoint_values(const Eigen::VectorXd& u) const;

    /// Indicator of h > 0 (1.0) or h < 0 (0.0) at each node.
    Eigen::VectorXd plus_mask() const;
    Eigen::VectorXd minus_mask() const;

private:
    friend Quadrature build_grid_on_breaks(const ProblemSpec&, std::vector<double>, int);
    Eigen::MatrixXd ref_diff_;
    std::vector<double> ref_x_;
    std::vector<double> ref_bary_;
};

/// Default resolution of the inner-product grid.
inline constexpr int kDefaultNodes = 1024;

/// Grid with about n_nodes nodes (16 per panel), panels graded and split at turning points.
Quadrature build_grid(const ProblemSpec& spec, int n_nodes = kDefaultNodes);

/// Grid on prescribed panel boundaries (must contain every turning point).
Quadrature build_grid_on_breaks(const ProblemSpec& spec, std::vector<double> breaks, int points_per_panel);

/// ∫ u v |h| dθ
double inner_abs_h(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Quadrature& grid);

/// ∫ u v h dθ
double inner_signed(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Quadrature& grid);

/// ∫ p u' v' dθ plus Robin boundary terms, derivatives taken panelwise.
double inner_A(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Quadrature& grid);

}  // namespace twoway
