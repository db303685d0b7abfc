#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qmetro/errors.hpp"

namespace qmetro {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr double kStructuralTol = 1e-10;

// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending,
// eigenvector columns orthonormal.
template <int N>
struct EigDecompositionT {
    Eigen::Matrix<double, N, 1> eigenvalues;
    Eigen::Matrix<cplx, N, N> eigenvectors;

    Eigen::Matrix<cplx, N, N> reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
    }
};

using EigDecomposition2 = EigDecompositionT<2>;
using EigDecomposition4 = EigDecompositionT<4>;

template <int N>
double max_abs(const Eigen::Matrix<cplx, N, N>& a) {
    return a.cwiseAbs().maxCoeff();
}

template <int N>
double hermiticity_residual(const Eigen::Matrix<cplx, N, N>& a) {
    return max_abs<N>(a - a.adjoint());
}

EigDecomposition2 hermitian_eig(const Mat2& a, double assume_hermitian_tol = kStructuralTol);
EigDecomposition4 hermitian_eig(const Mat4& a, double assume_hermitian_tol = kStructuralTol);

// Kronecker product, row-major block convention: out(2i+k, 2j+l) = a(i,j) b(k,l).
// Qubit A is the slow (leftmost) index.
Mat4 kron(const Mat2& a, const Mat2& b);

// Partial transpose over subsystem A: the four 2x2 blocks are swapped across
// the block diagonal. Involution.
Mat4 partial_transpose_a(const Mat4& rho);

// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const Mat4& a, double assume_hermitian_tol = kStructuralTol);

// log2 of a Hermitian PSD matrix with eigenvalue regularization:
// each eigenvalue lambda is replaced by log2(lambda + epsilon).
Mat4 matrix_log2_regularized(const Mat4& rho, double epsilon = 1e-14,
                             double assume_hermitian_tol = kStructuralTol);

// Principal square root of a Hermitian PSD matrix (negative eigenvalues within
// tolerance are clamped to zero).
Mat4 matrix_sqrt_psd(const Mat4& rho, double assume_hermitian_tol = kStructuralTol);

Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();

}  // namespace qmetro
