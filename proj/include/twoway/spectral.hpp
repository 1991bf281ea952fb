#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "twoway/basis.hpp"
#include "twoway/problem.hpp"
#include "twoway/quadrature.hpp"

namespace twoway {

struct SpectralOptions {
    double residual_tolerance = 1e-6;
    double resolution = 1.0;        // trial-space scale factor
    double quadrature_scale = 1.0;  // panel-count scale factor for the node grid
    Eigen::Index min_nodes = 0;     // panel count doubled until the grid has this many nodes
};

/// Eigenpairs of −(p v′)′ = λ h v, numbered j = −N..−1, 1..N with no zero index.
/// Column `position(j)` of `values` holds v_j at the grid nodes. Normalization
/// is sgn(λ_j) ∫ v_j² h = 1, so ⟨v_j, v_j⟩_A = |λ_j|.
struct Spectrum {
    ProblemSpec spec;
    std::shared_ptr<const Discretization> basis;
    int N = 0;
    Eigen::VectorXd eigenvalues;   // ascending, size 2N
    Eigen::MatrixXd coefficients;  // basis coefficients, one column per mode
    Eigen::VectorXd residuals;
    Quadrature grid;
    Eigen::MatrixXd values;        // node samples, one column per mode

    bool has_zero_mode = false;
    bool has_g = false;            // ∫h = 0 and g exists
    Eigen::VectorXd g_coefficients;
    Eigen::VectorXd g_values;      // node samples of g (empty when !has_g)

    static int position(int j, int n_per_sign);
    static int mode_number(int pos, int n_per_sign);
    int position(int j) const { return position(j, N); }
    int mode_number(int pos) const { return mode_number(pos, N); }

    double lambda(int j) const { return eigenvalues(position(j)); }
    Eigen::VectorXd mode(int j) const { return values.col(position(j)); }

    /// Mode values (order 0) or derivatives (order 1, 2) at arbitrary points.
    Eigen::MatrixXd evaluate(std::span<const double> theta, int order = 0) const;
    Eigen::VectorXd evaluate_g(std::span<const double> theta, int order = 0) const;

    /// Node samples on another grid (columns as in `values`).
    Eigen::MatrixXd sample_on(const Quadrature& other) const;

    /// The leading n modes of each sign, on the same grid.
    Spectrum leading(int n) const;

    /// Grid aligned with the trial space, `scale` times the default panel count.
    Quadrature make_grid(double scale) const;
};

Spectrum solve_spectrum(const ProblemSpec& spec, int N, const SpectralOptions& options = {});

/// g with A g = −h and ∫g = 0, sampled at the grid nodes.
Eigen::VectorXd compute_g(const ProblemSpec& spec, const Quadrature& grid);

/// X_j = sgn(λ_j) ∫_{h>0} v_j h dθ.
double half_range_moment(const Spectrum& spectrum, int j);

/// Both sides of the opposite-sign overlap identity for h = θ^m with a single
/// turning point at 0: lhs = |∫ v_j v_k |h||,
/// rhs = 2 |v_j(0) v_k′(0) − v_j′(0) v_k(0)| / (|λ_j| + |λ_k|).
std::pair<double, double> wronskian_overlap_check(const Spectrum& spectrum, int j, int k);

/// CSV with columns j,lambda,residual.
std::string spectrum_csv(const Spectrum& spectrum);

/// CSV of node samples: theta,h,v_{-N},...,v_N[,g].
std::string samples_csv(const Spectrum& spectrum);

}  // namespace twoway
