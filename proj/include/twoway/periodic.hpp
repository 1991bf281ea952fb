#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "twoway/solver.hpp"

namespace twoway {

/// Closed-form series quantities for h = cos θ with data ρ₁ (cos θ > 0), ρ₂ (cos θ < 0).
struct SeriesCoefficients {
    double L = 0.0;
    double A_L = 0.0;   // Σ_{k<0} X_k² (1 − e^{λ_k L})
    double B_L = 0.0;   // −Σ_{k<0} 𝒞_k X_k (1 − e^{λ_k L})
    Eigen::VectorXd C;  // 𝒞_j(L), position-indexed
    Eigen::VectorXd X;  // half-range moments, position-indexed

    double c0 = 0.0, d0 = 0.0, c1 = 0.0, d1 = 0.0;
    double d2 = 0.0;          // order-2 term consistent with the iteration
    double c = 0.0;           // c₀ + c₁
    double d = 0.0;           // d₀ + d₁ + d₂
    double d_headline = 0.0;  // the summarized polynomial form in u = 2L/(2L+π)
    Eigen::VectorXd a_first_order;  // a_j⁰ + a_j¹
    double tail_ratio = 0.0;        // |last-decade contribution| / 𝒜(∞)
};

SeriesCoefficients series_coefficients(const OperatorSet& ops, double rho1, double rho2);

/// Large-L polynomial coefficients in u = 2L/(2L+π).
struct LargeLPolynomials {
    double c_u = 0.0, c_u2 = 0.0;              // c ≈ ρ̄ − c_u u Δρ − c_u2 u² Δρ
    double d_u = 0.0, d_u2 = 0.0, d_u3 = 0.0;  // summarized form of d L / Δρ
    double d_u_iter = 0.0, d_u2_iter = 0.0, d_u3_iter = 0.0;  // iteration-consistent form
};
LargeLPolynomials large_L_polynomials(double A_inf, double B_inf);

/// One-exponential approximations 𝒜 ≈ a∞ − a₁ e^{−λ₁L}, ℬ ≈ b∞ − b₁ e^{−λ₁L}.
struct LargeLApprox {
    double lambda1 = 0.0;
    double A_reference = 0.0, B_reference = 0.0;  // with the reference constants
    double A_inf = 0.0, A_exp = 0.0;      // regenerated constants
    double B_inf = 0.0, B_exp = 0.0;
    double B_exp_outer = 0.0;  // exponential kept only in the outer factor, 𝒞_k at L = ∞
    double A_regenerated = 0.0, B_regenerated = 0.0;
};
LargeLApprox large_L_approx(const OperatorSet& ops, double L);

/// Smallest positive eigenvalue whose mode couples to the half-range data.
double first_coupled_eigenvalue(const Spectrum& spectrum);

struct LambdaR {
    double r = 0.0;
    double lambda_R = 0.0;
    Eigen::VectorXd v_R;          // nodes, mean value 1
    double deviation_norm = 0.0;  // ‖v_R − 1 − 2r cos θ‖ (|h| weight)
};
LambdaR lambda_R(const Spectrum& spectrum);

struct DiffusivityEstimate {
    std::vector<double> L_values;
    std::vector<double> flux;
    double D = 0.0;                  // from Δρ/(−flux) = (L + ℓ)/D
    double extrapolation_length = 0.0;
    double residual = 0.0;
    double D_naive = 0.0;            // mean of −flux L / Δρ
    bool short_L_warning = false;    // some L < 10
    bool all_converged = true;
};
DiffusivityEstimate diffusivity_estimate(const std::shared_ptr<const Spectrum>& spectrum,
                                         const std::vector<double>& L_values, double rho1, double rho2,
                                         const SolveOptions& options = {});

struct LSweepRow {
    double L, A_L, B_L, c, d, flux;
    bool converged;
};
std::vector<LSweepRow> sweep_L(const std::shared_ptr<const Spectrum>& spectrum, const std::vector<double>& L_values,
                               double rho1, double rho2, const SolveOptions& options = {}, int jobs = 1);
std::string sweep_L_csv(const std::vector<LSweepRow>& rows);

struct RSweepRow {
    double r, lambda_R, normalization_ratio, bound;
};
std::vector<RSweepRow> sweep_r(const std::vector<double>& r_values, double L, int N, int jobs = 1);
std::string sweep_r_csv(const std::vector<RSweepRow>& rows);

}  // namespace twoway
