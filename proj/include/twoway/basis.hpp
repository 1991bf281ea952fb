#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "twoway/problem.hpp"
#include "twoway/quadrature.hpp"

namespace twoway {

/// Finite Galerkin discretization of the operator pair (A, h). Functions are
/// coefficient vectors; K and H are the stiffness and h-weighted mass matrices:
///   K_ab = ⟨φ_a, φ_b⟩_A,   H_ab = ∫ h φ_a φ_b dθ.
class Discretization {
public:
    virtual ~Discretization() = default;

    virtual Eigen::Index size() const = 0;
    virtual std::string name() const = 0;

    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    const Eigen::MatrixXd& weight() const { return weight_; }

    /// Coefficients of the constant function 1 (empty when 1 is not in the trial space).
    const Eigen::VectorXd& constant() const { return constant_; }
    /// m_a = ∫ φ_a dθ
    const Eigen::VectorXd& mass() const { return mass_; }

    /// Index subsets on which the pencil decouples (parity sectors).
    virtual std::vector<std::vector<int>> sectors() const;

    /// Values or derivatives (order 0, 1 or 2) of the functions
    /// whose coefficients are the columns of `coeffs`, one row per θ.
    virtual Eigen::MatrixXd evaluate(std::span<const double> theta, const Eigen::MatrixXd& coeffs,
                                     int derivative) const = 0;

    /// Relative strong residuals ‖−(p v′)′ − λ h v‖ / (|λ| ‖v‖) in L²(a, b),
    /// one per column of `coeffs`.
    virtual Eigen::VectorXd residuals(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& lambdas) const = 0;

    /// ∫ f_c(θ) g_c(θ + T/2) dθ for each column pair, T = b − a (periodic problems).
    virtual Eigen::VectorXd half_period_overlaps(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) const;

    /// Panel boundaries suitable for exact-enough quadrature of products of
    /// trial functions, with at least `min_panels` panels.
    virtual std::vector<double> quadrature_breaks(int min_panels) const = 0;

    /// Points per quadrature panel the discretization needs.
    virtual int quadrature_order() const { return 16; }

    /// Panel count at which Gram integrals of the trial space are converged.
    virtual int recommended_panels() const = 0;

protected:
    Eigen::MatrixXd stiffness_;
    Eigen::MatrixXd weight_;
    Eigen::VectorXd constant_;
    Eigen::VectorXd mass_;
};

/// Real trigonometric basis {1, cos nω(θ−c), sin nω(θ−c)}, n ≤ M, for periodic
/// problems with constant p and trigonometric-polynomial h. Even h splits the
/// basis into even (cos) and odd (sin) sectors, each yielding a tridiagonal
/// pencil for h = cos θ.
class FourierDiscretization final : public Discretization {
public:
    FourierDiscretization(const ProblemSpec& spec, int harmonics);

    Eigen::Index size() const override { return 2 * harmonics_ + 1; }
    std::string name() const override { return "fourier"; }
    int harmonics() const { return harmonics_; }

    std::vector<std::vector<int>> sectors() const override;
    Eigen::MatrixXd evaluate(std::span<const double> theta, const Eigen::MatrixXd& coeffs,
                             int derivative) const override;
    Eigen::VectorXd residuals(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& lambdas) const override;
    Eigen::VectorXd half_period_overlaps(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) const override;
    std::vector<double> quadrature_breaks(int min_panels) const override;
    int recommended_panels() const override { return std::max(64, (3 * harmonics_ + 3) / 4); }

private:
    ProblemSpec spec_;
    int harmonics_;
    double omega_;
    double center_;
    bool even_h_;
    std::vector<std::pair<int, std::complex<double>>> h_terms_;  // nonzero Fourier coefficients of h
};

/// Continuous spectral elements of degree P on panels split at every turning
/// point, with nodal (Gauss-Lobatto) basis. Handles periodic, Dirichlet, Neumann
/// and Robin conditions and arbitrary tabulated h and p.
class ElementDiscretization final : public Discretization {
public:
    ElementDiscretization(const ProblemSpec& spec, int elements, int degree);

    Eigen::Index size() const override { return dofs_; }
    std::string name() const override { return "spectral-element"; }
    int degree() const { return degree_; }
    const std::vector<double>& breaks() const { return breaks_; }

    Eigen::MatrixXd evaluate(std::span<const double> theta, const Eigen::MatrixXd& coeffs,
                             int derivative) const override;
    Eigen::VectorXd residuals(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& lambdas) const override;
    std::vector<double> quadrature_breaks(int min_panels) const override;
    int quadrature_order() const override { return degree_ + 4; }
    int recommended_panels() const override { return static_cast<int>(breaks_.size()) - 1; }

private:
    int element_of(double theta) const;
    Eigen::VectorXd element_values(const Eigen::VectorXd& coeffs, int e) const;

    ProblemSpec spec_;
    std::vector<double> breaks_;
    int degree_;
    Eigen::Index dofs_ = 0;
    std::vector<int> global_;   // element-local node → dof (−1 if eliminated)
    std::vector<double> gll_;
    std::vector<double> bary_;
    Eigen::MatrixXd diff_;      // GLL differentiation matrix on [-1, 1]
};

/// Discretization sized to resolve `modes_per_sign` modes of each sign;
/// `resolution` scales the trial-space size.
std::shared_ptr<const Discretization> make_discretization(const ProblemSpec& spec, int modes_per_sign,
                                                          double resolution = 1.0);

}  // namespace twoway
