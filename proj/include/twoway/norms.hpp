#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "twoway/operators.hpp"

namespace twoway {

/// Whether the factors (1 − e^{−|λ_j|L}) enter ‖W_{L,N}‖.
enum class LMode { drop_transcendental, include_L };

struct PowerLawFit {
    double A0 = 0.0;
    double B0 = 0.0;
    double nu = 1.0;
    double residual = 0.0;  // RMS misfit
    bool converged = false;
    int iterations = 0;
};

struct NormEstimate {
    std::vector<int> N_values;
    std::vector<double> norms_squared;
    LMode mode = LMode::drop_transcendental;
    double L = 0.0;
    Eigen::MatrixXd gram_A;  // at the largest N
    Eigen::MatrixXd gram_S;
};

/// Gram pair (A, S) with ‖u‖² = aᵀAa and ‖W_{L,N}u‖² = aᵀSa on the leading n modes of `ops`.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> wln_grams(const OperatorSet& ops, int n, LMode mode);

double wln_norm_squared(const OperatorSet& ops, int n, LMode mode);

/// ‖W_{L,N}‖² for each N in `N_values` (nested leading subsets of one spectrum).
NormEstimate wln_norm_sweep(const OperatorSet& ops, const std::vector<int>& N_values, LMode mode);

/// Least-squares fit of y ≈ A0 − B0 N^{−ν}, started from ν = 1.
PowerLawFit powerlaw_fit(const std::vector<double>& N, const std::vector<double>& y);

/// Closed-form ‖P‖ for h = cos θ on a 2π-periodic domain.
struct PNormAnalytic {
    double sigma1 = 0.0;  // √(8/3 + πL + L²)
    double sigma2 = 0.0;  // √(8/3)
    double r1 = 0.0;
    double r2 = 0.0;
    double rho_sup = 0.0;
    double value = 0.0;
};
PNormAnalytic p_norm_analytic_periodic(double L);

/// ‖P‖ from the generalized eigenproblem on span{1, g_L, sgn h, g sgn h}, which P maps
/// into itself and which contains the maximizer.
struct PNormNumeric {
    double rho = 0.0;    // sup of ‖Pw‖ over unit w ⊥ 𝓗₁
    double value = 0.0;  // sup of ‖Pv‖ over unit v
};
PNormNumeric p_norm_numeric(const OperatorSet& ops);

/// Coefficient matrix of P W_L on the retained (non-small) modes.
Eigen::MatrixXd pw_matrix(const OperatorSet& ops);

/// ‖P_N W_{L,N}‖ in the |h| norm.
double pw_norm(const OperatorSet& ops);

/// (2‖Wu‖², ‖u‖² − ‖u‖₁² − 2⟨P₊u, P₋u⟩) for u = Σ a_j v_j. The left side uses
/// the Gram blocks, the right side node quadrature term by term.
std::pair<double, double> identity_check(const Eigen::VectorXd& a, const OperatorSet& ops);

/// ‖u‖₁ / ‖u‖ over `samples` seeded random u; returns (min, max).
std::pair<double, double> norm_equivalence_range(const OperatorSet& ops, int samples, unsigned seed);

/// Lower bound (1 − e^{−λ_R L}) 𝒩(r) on ‖W_L P‖ for h = cos θ − r.
struct LowerBound {
    double lambda_R = 0.0;
    double normalization_ratio = 0.0;  // 𝒩(r)
    double bound = 0.0;
};
LowerBound wlp_lower_bound(const Spectrum& spectrum, double L);

/// Log-log slope of |⟨v_j, v_k⟩| against |λ_k| for k of sign opposite to j over
/// the top decade of computed |λ_k|.
struct OverlapSlope {
    double slope = 0.0;
    double expected = 0.0;  // −(3m+4)/(4m+8)
    int points = 0;
};
OverlapSlope overlap_decay_slope(const OperatorSet& ops, int j);

std::string norms_csv(const NormEstimate& est);
std::string fit_json(const PowerLawFit& fit);

}  // namespace twoway
