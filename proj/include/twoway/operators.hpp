#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "twoway/spectral.hpp"

namespace twoway {

enum class Framework { simple, extended, thresholded };

const char* framework_name(Framework f);

/// Coefficients of a function against {1, g_L, v_j}. `a` is indexed by mode
/// position (see Spectrum::position). In the thresholded framework the entries
/// with |λ_j| < Λ multiply the boundary traces v̄_j rather than v_j.
struct Expansion {
    double c = 0.0;
    double d = 0.0;
    Eigen::VectorXd a;
    Framework framework = Framework::simple;
    double threshold = 0.0;
};

/// Finite-N realization of the half-range operators on a fixed spectrum and L.
///
/// Node-level conventions: Q₊/Q₋ are the h > 0 / h < 0 masks, P± keep the
/// positive/negative modes of an expansion, M_L scales v_j by e^{−|λ_j|L}, and
/// W_L = (Q₊P₋ + Q₋P₊)(I − M_L).
struct OperatorSet {
    std::shared_ptr<const Spectrum> spectrum;
    double L = 1.0;
    Framework framework = Framework::simple;
    double threshold = 0.0;

    Eigen::VectorXd sign;          // sgn λ_j
    Eigen::VectorXd decay;         // diagonal of M_L: e^{−|λ_j| L}
    Eigen::MatrixXd gram_abs;      // ⟨v_j, v_k⟩ with |h| weight
    Eigen::MatrixXd q_plus_gram;   // same, restricted to h > 0
    Eigen::MatrixXd q_minus_gram;  // same, restricted to h < 0
    Eigen::MatrixXd traces;        // v̄_j: boundary trace of the x-dependent mode j
    Eigen::VectorXd g_L;           // g on h > 0, g + L on h < 0 (empty without g)
    std::vector<int> small_modes;  // positions with |λ_j| < Λ (thresholded only)

    // Complement block: functions spanning 𝓗₀ (or 𝓗₀,Λ) and their test functions.
    Eigen::MatrixXd zero_basis;    // columns 1 [, g_L] [, v̄_s]
    Eigen::MatrixXd zero_tests;    // columns 1 [, g] [, v_s]; pairing ∫ · h
    Eigen::MatrixXd zero_block;    // ∫ zero_tests_i · zero_basis_j · h
    double zero_block_condition = 1.0;

    int N() const { return spectrum->N; }
    const Quadrature& grid() const { return spectrum->grid; }
    bool is_small(int pos) const;
};

/// Framework chosen from the boundary conditions: extended when constants are
/// admissible, simple otherwise.
Framework default_framework(const ProblemSpec& spec);

OperatorSet build_operators(std::shared_ptr<const Spectrum> spectrum, double L, Framework framework,
                            double threshold = 0.0);

/// Expansion of node samples against {1, g_L, v_j} (see Expansion).
Expansion expand(const Eigen::VectorXd& w, const OperatorSet& ops);

/// c + d g_L + Σ a_j v_j (or v̄_j for thresholded small modes) at the nodes.
Eigen::VectorXd reconstruct(const Expansion& e, const OperatorSet& ops);

/// W_L applied to the mode part of `e` (small modes of a thresholded expansion are skipped).
Eigen::VectorXd apply_WL(const Expansion& e, const OperatorSet& ops);

/// Projection killing the complement block of `ops` and fixing span{v_j}:
/// extended w − c − d g_L, thresholded also − Σ b_s v̄_s, simple Σ a_j v_j.
Eigen::VectorXd apply_P(const Eigen::VectorXd& w, const OperatorSet& ops);

/// apply_P with the thresholded complement at level Λ, regardless of ops.framework.
Eigen::VectorXd apply_P_lambda(const Eigen::VectorXd& w, double lambda_threshold, const OperatorSet& ops);

/// Matrices of V = Q₊P₊ + Q₋P₋ and W = Q₊P₋ + Q₋P₊ on span{v_j}, in biorthogonal coordinates.
struct VWMatrices {
    Eigen::MatrixXd V;
    Eigen::MatrixXd W;
};
VWMatrices assemble_VW(const OperatorSet& ops);

/// Node samples of Σ a_j v_j.
Eigen::VectorXd synthesize(const Eigen::VectorXd& a, const OperatorSet& ops);

/// |h|-weighted norm of node samples.
double norm_abs_h(const Eigen::VectorXd& u, const Quadrature& grid);

/// Boundary data ρ₊ on h > 0 and ρ₋ on h < 0, or the problem's sampled data.
Eigen::VectorXd boundary_samples(const ProblemSpec& spec, const Quadrature& grid);

}  // namespace twoway
