#include "qmetro/linalg.hpp"

#include <algorithm>

namespace qmetro {

namespace {

template <int N>
EigDecompositionT<N> hermitian_eig_impl(const Eigen::Matrix<cplx, N, N>& a, double tol) {
    const double herm = hermiticity_residual<N>(a);
    if (herm > tol) {
        throw NotHermitianError("hermitian_eig: |a - a^dag|_max = " + std::to_string(herm));
    }
    // symmetrize so the solver sees an exactly Hermitian matrix
    Eigen::Matrix<cplx, N, N> h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<cplx, N, N>> solver(h);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("hermitian_eig: eigensolver did not converge");
    }
    EigDecompositionT<N> out;
    // Eigen sorts ascending; flip to descending
    for (int i = 0; i < N; ++i) {
        out.eigenvalues(i) = solver.eigenvalues()(N - 1 - i);
        out.eigenvectors.col(i) = solver.eigenvectors().col(N - 1 - i);
    }
    return out;
}

}  // namespace

EigDecomposition2 hermitian_eig(const Mat2& a, double tol) { return hermitian_eig_impl<2>(a, tol); }
EigDecomposition4 hermitian_eig(const Mat4& a, double tol) { return hermitian_eig_impl<4>(a, tol); }

Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

Mat4 partial_transpose_a(const Mat4& rho) {
    Mat4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = rho.block<2, 2>(2 * j, 2 * i);
    return out;
}

double trace_norm(const Mat4& a, double tol) {
    const auto eig = hermitian_eig(a, tol);
    return eig.eigenvalues.cwiseAbs().sum();
}

Mat4 matrix_log2_regularized(const Mat4& rho, double epsilon, double tol) {
    if (epsilon <= 0.0) throw RangeViolation("matrix_log2_regularized: epsilon must be > 0");
    auto eig = hermitian_eig(rho, tol);
    Eigen::Vector4d lg;
    for (int i = 0; i < 4; ++i) {
        double lam = eig.eigenvalues(i);
        if (lam < -kStructuralTol) {
            throw NegativeEigenvalueError("matrix_log2_regularized: eigenvalue " + std::to_string(lam));
        }
        lg(i) = std::log2(std::max(lam, 0.0) + epsilon);
    }
    Mat4 out = eig.eigenvectors * lg.asDiagonal() * eig.eigenvectors.adjoint();
    return 0.5 * (out + out.adjoint());
}

Mat4 matrix_sqrt_psd(const Mat4& rho, double tol) {
    auto eig = hermitian_eig(rho, tol);
    Eigen::Vector4d sq;
    for (int i = 0; i < 4; ++i) sq(i) = std::sqrt(std::max(eig.eigenvalues(i), 0.0));
    Mat4 out = eig.eigenvectors * sq.asDiagonal() * eig.eigenvectors.adjoint();
    return 0.5 * (out + out.adjoint());
}

Mat2 pauli_x() {
    Mat2 s;
    s << 0, 1, 1, 0;
    return s;
}

Mat2 pauli_y() {
    Mat2 s;
    s << 0, cplx(0, -1), cplx(0, 1), 0;
    return s;
}

Mat2 pauli_z() {
    Mat2 s;
    s << 1, 0, 0, -1;
    return s;
}

}  // namespace qmetro
