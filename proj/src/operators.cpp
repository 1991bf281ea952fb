#include "twoway/operators.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace twoway {

namespace {

struct ZeroBlock {
    Eigen::MatrixXd basis;
    Eigen::MatrixXd tests;
    Eigen::MatrixXd block;
    std::vector<int> small;
    double condition = 1.0;
};

ZeroBlock make_zero_block(const Spectrum& s, const Eigen::MatrixXd& traces, const Eigen::VectorXd& g_L,
                          Framework framework, double threshold) {
    ZeroBlock z;
    const Eigen::Index n = s.grid.size();
    std::vector<Eigen::VectorXd> basis, tests;
    if (framework != Framework::simple && s.has_zero_mode) {
        basis.push_back(Eigen::VectorXd::Ones(n));
        tests.push_back(Eigen::VectorXd::Ones(n));
        if (s.has_g) {
            basis.push_back(g_L);
            tests.push_back(s.g_values);
        }
    } else if (framework == Framework::extended) {
        throw Error("extended framework needs a zero mode (periodic or Neumann conditions)");
    }
    if (framework == Framework::thresholded) {
        if (!(threshold > 0.0)) throw Error("thresholded framework needs Λ > 0");
        if (threshold > s.eigenvalues.cwiseAbs().maxCoeff())
            throw Error("Λ exceeds every computed |λ_j|; the thresholded range would be empty");
        for (int p = 0; p < 2 * s.N; ++p) {
            if (std::abs(s.eigenvalues(p)) < threshold) {
                z.small.push_back(p);
                basis.push_back(traces.col(p));
                tests.push_back(s.values.col(p));
            }
        }
    }
    const auto k = static_cast<Eigen::Index>(basis.size());
    z.basis.resize(n, k);
    z.tests.resize(n, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        z.basis.col(i) = basis[static_cast<std::size_t>(i)];
        z.tests.col(i) = tests[static_cast<std::size_t>(i)];
    }
    z.block = z.tests.transpose() * s.grid.signed_weights.asDiagonal() * z.basis;
    if (k > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(z.block);
        const auto& sv = svd.singularValues();
        z.condition = sv(0) / sv(k - 1);
        if (!(sv(k - 1) > 1e-14 * sv(0)))
            throw Error("singular coefficient system for the 𝓗₀ block (smallest singular value " +
                        std::to_string(sv(k - 1)) + ")");
    }
    return z;
}

// Coefficients of w on the complement block.
Eigen::VectorXd block_coefficients(const Eigen::VectorXd& w, const Eigen::MatrixXd& tests,
                                   const Eigen::MatrixXd& block, const Quadrature& grid) {
    if (tests.cols() == 0) return Eigen::VectorXd();
    const Eigen::VectorXd rhs = tests.transpose() * grid.signed_weights.asDiagonal() * w;
    return block.partialPivLu().solve(rhs);
}

}  // namespace

const char* framework_name(Framework f) {
    switch (f) {
        case Framework::simple: return "simple";
        case Framework::extended: return "extended";
        case Framework::thresholded: return "thresholded";
    }
    return "unknown";
}

bool OperatorSet::is_small(int pos) const {
    return std::find(small_modes.begin(), small_modes.end(), pos) != small_modes.end();
}

Framework default_framework(const ProblemSpec& spec) {
    return spec.has_zero_mode() ? Framework::extended : Framework::simple;
}

OperatorSet build_operators(std::shared_ptr<const Spectrum> spectrum, double L, Framework framework,
                            double threshold) {
    if (!spectrum) throw Error("build_operators: no spectrum");
    if (!(L >= 0.0)) throw Error("build_operators: L must be non-negative");
    const Spectrum& s = *spectrum;
    OperatorSet ops;
    ops.spectrum = spectrum;
    ops.L = L;
    ops.framework = framework;
    ops.threshold = threshold;

    const int m = 2 * s.N;
    ops.sign = s.eigenvalues.array().sign().matrix();
    ops.decay = (-s.eigenvalues.cwiseAbs() * L).array().exp().matrix();

    const Quadrature& g = s.grid;
    const Eigen::VectorXd plus = g.plus_mask(), minus = g.minus_mask();
    const Eigen::VectorXd wp = g.abs_h_weights.cwiseProduct(plus), wm = g.abs_h_weights.cwiseProduct(minus);
    ops.q_plus_gram = s.values.transpose() * wp.asDiagonal() * s.values;
    ops.q_minus_gram = s.values.transpose() * wm.asDiagonal() * s.values;
    ops.gram_abs = ops.q_plus_gram + ops.q_minus_gram;

    ops.traces = s.values;
    for (int p = 0; p < m; ++p) {
        const Eigen::VectorXd& far = s.eigenvalues(p) > 0.0 ? minus : plus;
        ops.traces.col(p) = s.values.col(p).cwiseProduct(Eigen::VectorXd::Ones(g.size()) - (1.0 - ops.decay(p)) * far);
    }
    if (s.has_g) ops.g_L = s.g_values + L * minus;

    const ZeroBlock z = make_zero_block(s, ops.traces, ops.g_L, framework, threshold);
    ops.zero_basis = z.basis;
    ops.zero_tests = z.tests;
    ops.zero_block = z.block;
    ops.zero_block_condition = z.condition;
    ops.small_modes = z.small;
    return ops;
}

Expansion expand(const Eigen::VectorXd& w, const OperatorSet& ops) {
    const Spectrum& s = *ops.spectrum;
    if (w.size() != s.grid.size()) throw Error("expand: samples do not match the grid");
    Expansion e;
    e.framework = ops.framework;
    e.threshold = ops.threshold;
    const Eigen::VectorXd zc = block_coefficients(w, ops.zero_tests, ops.zero_block, s.grid);
    Eigen::VectorXd rest = w;
    if (zc.size() > 0) rest -= ops.zero_basis * zc;
    e.a = ops.sign.cwiseProduct(s.values.transpose() * s.grid.signed_weights.asDiagonal() * rest);

    Eigen::Index next = 0;
    if (ops.framework != Framework::simple && s.has_zero_mode) {
        e.c = zc(next++);
        if (s.has_g) e.d = zc(next++);
    }
    for (int p : ops.small_modes) e.a(p) = zc(next++);
    return e;
}

Eigen::VectorXd synthesize(const Eigen::VectorXd& a, const OperatorSet& ops) { return ops.spectrum->values * a; }

Eigen::VectorXd reconstruct(const Expansion& e, const OperatorSet& ops) {
    const Spectrum& s = *ops.spectrum;
    Eigen::VectorXd big = e.a, small = Eigen::VectorXd::Zero(e.a.size());
    for (int p : ops.small_modes) {
        small(p) = big(p);
        big(p) = 0.0;
    }
    Eigen::VectorXd out = s.values * big + ops.traces * small;
    out.array() += e.c;
    if (e.d != 0.0) {
        if (ops.g_L.size() == 0) throw Error("reconstruct: d ≠ 0 but g_L is undefined");
        out += e.d * ops.g_L;
    }
    return out;
}

Eigen::VectorXd apply_WL(const Expansion& e, const OperatorSet& ops) {
    const Spectrum& s = *ops.spectrum;
    const int m = 2 * s.N;
    if (e.a.size() != m) throw Error("apply_WL: expansion size mismatch");
    Eigen::VectorXd pos = Eigen::VectorXd::Zero(m), neg = Eigen::VectorXd::Zero(m);
    for (int p = 0; p < m; ++p) {
        if (ops.is_small(p)) continue;
        const double v = e.a(p) * (1.0 - ops.decay(p));
        (s.eigenvalues(p) > 0.0 ? pos : neg)(p) = v;
    }
    const Quadrature& g = s.grid;
    return g.plus_mask().cwiseProduct(s.values * neg) + g.minus_mask().cwiseProduct(s.values * pos);
}

Eigen::VectorXd apply_P(const Eigen::VectorXd& w, const OperatorSet& ops) {
    if (ops.framework == Framework::simple) return synthesize(expand(w, ops).a, ops);
    const Eigen::VectorXd zc = block_coefficients(w, ops.zero_tests, ops.zero_block, ops.grid());
    return zc.size() > 0 ? Eigen::VectorXd(w - ops.zero_basis * zc) : w;
}

Eigen::VectorXd apply_P_lambda(const Eigen::VectorXd& w, double lambda_threshold, const OperatorSet& ops) {
    const ZeroBlock z = make_zero_block(*ops.spectrum, ops.traces, ops.g_L, Framework::thresholded, lambda_threshold);
    const Eigen::VectorXd zc = block_coefficients(w, z.tests, z.block, ops.grid());
    return zc.size() > 0 ? Eigen::VectorXd(w - z.basis * zc) : w;
}

VWMatrices assemble_VW(const OperatorSet& ops) {
    const Spectrum& s = *ops.spectrum;
    const int m = 2 * s.N;
    VWMatrices out;
    out.V.resize(m, m);
    out.W.resize(m, m);
    // h > 0 on Q₊ so ∫₊ v_j v_k h = q_plus_gram; on Q₋, ∫₋ v_j v_k h = −q_minus_gram.
    for (int j = 0; j < m; ++j) {
        const Eigen::VectorXd on_plus = ops.sign.cwiseProduct(ops.q_plus_gram.col(j));
        const Eigen::VectorXd on_minus = -ops.sign.cwiseProduct(ops.q_minus_gram.col(j));
        if (s.eigenvalues(j) > 0.0) {
            out.V.col(j) = on_plus;
            out.W.col(j) = on_minus;
        } else {
            out.V.col(j) = on_minus;
            out.W.col(j) = on_plus;
        }
    }
    return out;
}

double norm_abs_h(const Eigen::VectorXd& u, const Quadrature& grid) {
    return std::sqrt(std::max(0.0, inner_abs_h(u, u, grid)));
}

Eigen::VectorXd boundary_samples(const ProblemSpec& spec, const Quadrature& grid) {
    Eigen::VectorXd w(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) w(i) = spec.w.value(grid.nodes(i), grid.h(i));
    return w;
}

}  // namespace twoway
