#include "twoway/linalg.hpp"

#include <dlfcn.h>
#include <lapacke.h>

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <string>

#include "twoway/problem.hpp"

namespace twoway::linalg {

namespace {

using dsyevr_fn = lapack_int (*)(int, char, char, char, lapack_int, double*, lapack_int, double, double, lapack_int,
                                 lapack_int, double, lapack_int*, double*, double*, lapack_int, lapack_int*);

// LAPACK is resolved at first use. Some OpenBLAS builds pick an AVX-512 kernel
// that returns wrong eigenvectors on certain CPUs; the core type is pinned to
// the AVX2 kernels before the library loads unless the user chose one.
dsyevr_fn load_dsyevr() {
    static dsyevr_fn fn = nullptr;
    static std::once_flag once;
    std::call_once(once, [] {
        if (__builtin_cpu_supports("avx2")) setenv("OPENBLAS_CORETYPE", "Haswell", 0);
        void* lib = nullptr;
        for (const char* name : {"liblapacke.so.3", "liblapacke.so"})
            if ((lib = dlopen(name, RTLD_NOW | RTLD_LOCAL)) != nullptr) break;
        if (lib) fn = reinterpret_cast<dsyevr_fn>(dlsym(lib, "LAPACKE_dsyevr"));
    });
    if (!fn) throw Error("could not load LAPACKE_dsyevr from liblapacke");
    return fn;
}

}  // namespace

SymmetricEigen symmetric_eigen_range(const Eigen::MatrixXd& m, int first, int last) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw Error("symmetric_eigen_range: matrix is not square");
    if (first < 0 || last >= n || first > last) throw Error("symmetric_eigen_range: bad index range");
    Eigen::MatrixXd a = m;  // column-major copy, overwritten by LAPACK
    const int count = last - first + 1;
    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, count);
    Eigen::VectorXi support(2 * count);
    int found = 0;
    const lapack_int info = load_dsyevr()(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, first + 1,
                                           last + 1, 0.0, &found, out.values.data(), out.vectors.data(), n,
                                           support.data());
    if (info != 0) throw Error("dsyevr failed with info = " + std::to_string(info));
    out.values.conservativeResize(found);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int i = 0; i < found; ++i) {
        const double r = (m * out.vectors.col(i) - out.values(i) * out.vectors.col(i)).norm();
        if (!(r <= 1e-8 * scale * std::sqrt(static_cast<double>(n))))
            throw Error("dsyevr returned an inaccurate eigenpair; check the LAPACK/BLAS installation");
    }
    return out;
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m) {
    return symmetric_eigen_range(m, 0, static_cast<int>(m.rows()) - 1);
}

PencilModes pencil_modes_near_zero(const Eigen::MatrixXd& K, const Eigen::MatrixXd& H,
                                   const Eigen::MatrixXd& constraints, int n_pos, int n_neg) {
    const Eigen::Index n = K.rows();
    const Eigen::Index k = constraints.cols();
    const Eigen::Index m = n - k;

    Eigen::MatrixXd kz, hz;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr;
    if (k > 0) {
        qr.compute(constraints);
        Eigen::MatrixXd tk = K, th = H;
        tk.applyOnTheLeft(qr.householderQ().transpose());
        tk.applyOnTheRight(qr.householderQ());
        th.applyOnTheLeft(qr.householderQ().transpose());
        th.applyOnTheRight(qr.householderQ());
        kz = tk.bottomRightCorner(m, m);
        hz = th.bottomRightCorner(m, m);
    } else {
        kz = K;
        hz = H;
    }
    kz = 0.5 * (kz + kz.transpose()).eval();
    hz = 0.5 * (hz + hz.transpose()).eval();

    Eigen::LLT<Eigen::MatrixXd> llt(kz);
    if (llt.info() != Eigen::Success) throw Error("stiffness matrix is not positive definite on the constrained space");
    const auto lower = llt.matrixL();
    Eigen::MatrixXd mu_mat = lower.solve(hz);
    mu_mat = lower.solve(mu_mat.transpose().eval());
    mu_mat = 0.5 * (mu_mat + mu_mat.transpose()).eval();

    // μ = 1/λ: small positive λ are the largest μ, small negative λ the most negative μ.
    if (n_pos + n_neg > m) throw Error("requested more modes than the discretization holds");
    PencilModes out;
    out.lambda.resize(n_pos + n_neg);
    Eigen::MatrixXd y(m, n_pos + n_neg);
    int col = 0;
    if (n_neg > 0) {
        const auto neg = symmetric_eigen_range(mu_mat, 0, n_neg - 1);
        for (int i = n_neg - 1; i >= 0; --i) {
            out.lambda(col) = 1.0 / neg.values(i);
            y.col(col++) = neg.vectors.col(i);
        }
    }
    if (n_pos > 0) {
        const auto pos = symmetric_eigen_range(mu_mat, static_cast<int>(m) - n_pos, static_cast<int>(m) - 1);
        for (int i = n_pos - 1; i >= 0; --i) {
            out.lambda(col) = 1.0 / pos.values(i);
            y.col(col++) = pos.vectors.col(i);
        }
    }
    for (Eigen::Index i = 0; i < out.lambda.size(); ++i)
        if (!std::isfinite(out.lambda(i)) || (i < n_neg ? out.lambda(i) >= 0.0 : out.lambda(i) <= 0.0))
            throw Error("pencil has too few eigenvalues of the requested sign");

    // x = Z L^{-T} y, so that xᵀKx = yᵀy = 1.
    Eigen::MatrixXd xz = lower.transpose().solve(y);
    if (k > 0) {
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, xz.cols());
        full.bottomRows(m) = xz;
        full.applyOnTheLeft(qr.householderQ());
        out.vectors = std::move(full);
    } else {
        out.vectors = std::move(xz);
    }
    return out;
}

double largest_generalized_eigenvalue(const Eigen::MatrixXd& S, const Eigen::MatrixXd& A, Eigen::VectorXd* argmax) {
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (A + A.transpose()));
    if (llt.info() != Eigen::Success) throw Error("Gram matrix is not positive definite");
    const auto lower = llt.matrixL();
    Eigen::MatrixXd c = lower.solve(S);
    c = lower.solve(c.transpose().eval());
    c = 0.5 * (c + c.transpose()).eval();
    const int n = static_cast<int>(c.rows());
    const auto top = symmetric_eigen_range(c, n - 1, n - 1);
    if (argmax) *argmax = lower.transpose().solve(top.vectors.col(0));
    return top.values(0);
}

}  // namespace twoway::linalg
