#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "twoway/operators.hpp"

namespace twoway {

struct SolveOptions {
    double tol = 1e-10;   // |h|-norm of the order-n increment
    int max_iter = 200;
};

/// One order of the series: the expansion of (W_L P)^n w.
struct OrderTerm {
    double c = 0.0;
    double d = 0.0;
    Eigen::VectorXd a;
    double increment_norm = 0.0;  // |h|-norm of the 𝓗₁ part
};

/// f(x,θ) = c + d (x + g) + Σ_{λ>0} a_j e^{−λ_j x} v_j + Σ_{λ<0} a_j e^{λ_j (L−x)} v_j.
struct SolutionCoefficients {
    double c = 0.0;
    double d = 0.0;
    Eigen::VectorXd a;  // position-indexed
    std::vector<OrderTerm> order_history;
    bool converged = false;
    int iterations = 0;
    double ratio = 0.0;  // last increment ratio ‖v_n‖ / ‖v_{n−1}‖
    double L = 0.0;
    Framework framework = Framework::simple;
    double threshold = 0.0;

    /// Coefficients summed through order `n` (inclusive).
    SolutionCoefficients partial(int n) const;
};

SolutionCoefficients neumann_solve(const Eigen::VectorXd& w, const OperatorSet& ops, const SolveOptions& options = {});

struct DirectSolveReport {
    SolutionCoefficients solution;
    Eigen::Index rows = 0;
    Eigen::Index unknowns = 0;
    double smallest_singular_value = 0.0;
    double condition = 0.0;
};

/// Weighted least-squares fit of the boundary conditions by c + d g_L + Σ a_j v̄_j
/// on a refined grid with at least `oversample` rows per unknown.
DirectSolveReport direct_solve(const ProblemSpec& spec, const OperatorSet& ops, double oversample = 4.0);

/// Same, with boundary data supplied as samples on an arbitrary grid.
using BoundaryFunction = std::function<Eigen::VectorXd(const Quadrature&)>;
DirectSolveReport direct_solve(const BoundaryFunction& data, const OperatorSet& ops, double oversample = 4.0);

/// f(x, θ) at the given angles.
Eigen::VectorXd evaluate(const SolutionCoefficients& sol, const OperatorSet& ops, double x,
                         std::span<const double> theta);

/// f(x, ·) at the grid nodes of the spectrum.
Eigen::VectorXd evaluate_nodes(const SolutionCoefficients& sol, const OperatorSet& ops, double x);

/// d ∫ g h, the x-independent flux.
double flux(const SolutionCoefficients& sol, const OperatorSet& ops);

/// ∫ f(x, θ) h dθ by quadrature.
double flux_at(const SolutionCoefficients& sol, const OperatorSet& ops, double x);

/// |h|-norms of f(0,·) − w on h > 0 and f(L,·) − w on h < 0.
std::pair<double, double> boundary_residual(const SolutionCoefficients& sol, const OperatorSet& ops,
                                            const Eigen::VectorXd& w);

/// Boundary data drawn from the trace span {1, g_L, v̄_j} with coefficients
/// uniform in [−1, 1]; `exact` holds the generating coefficients.
struct SyntheticData {
    Eigen::VectorXd w;
    SolutionCoefficients exact;
};
SyntheticData random_trace_data(const OperatorSet& ops, std::uint64_t seed);

/// Half-range boundary values of `sol`: f(0,·) on h > 0, f(L,·) on h < 0.
Eigen::VectorXd boundary_trace(const SolutionCoefficients& sol, const OperatorSet& ops, const Quadrature& grid);

std::string solution_json(const SolutionCoefficients& sol, const OperatorSet& ops);

/// CSV of f on an (x, θ) grid: header x,theta,f.
std::string profile_csv(const SolutionCoefficients& sol, const OperatorSet& ops, int n_x, int n_theta);

}  // namespace twoway
