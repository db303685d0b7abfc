#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmetro/states.hpp"

namespace qmetro {

// Hermitian phase generator, normalized to unit spectral norm.
struct Generator {
    Mat4 mat;
    std::string label;
};

enum class Axis { X, Y, Z };

// Checks hermiticity (1e-10) and max |eigenvalue| = 1 (1e-10).
Generator make_generator(const Mat4& mat, const std::string& label);

// kron of two Paulis; spectrum {+-1}, unit norm by construction.
Generator pauli_product_generator(Axis axis_a, Axis axis_b);

// (sigma_a x I + I x sigma_b)/2, the collective single-axis generator of
// standard two-probe phase estimation; spectral norm 1 after the division.
Generator local_sum_generator(Axis axis_a, Axis axis_b);

Generator generator_by_name(const std::string& name);  // "zz","xx","yy","local_z",...

struct LocalUnitaryPair {
    Mat2 u_a = Mat2::Identity();
    Mat2 u_b = Mat2::Identity();
};

struct MqfiConfig {
    int n_restarts = 8;
    int max_iter = 1000;
    double improvement_tol = 1e-6;
    double fd_step = 1e-6;                 // central-difference step on the angles
    double low_confidence_spread = 1e-3;   // top-two restart gap that flags the result
};

struct MqfiResult {
    double value = 0.0;
    LocalUnitaryPair optimal_rotation;
    int n_restarts_used = 0;
    double best_restart_spread = 0.0;  // |best - second best| over restarts
    bool low_confidence = false;
    bool all_restarts_failed = false;  // best equals the identity-start value with no converged restart
};

// Spectral-formula QFI: F = 2 sum_{ij} (p_i-p_j)^2/(p_i+p_j) |<i|H|j>|^2,
// pairs with p_i + p_j <= 1e-12 excluded.
double qfi(const DensityMatrix& rho, const Generator& h);

// Maximizes qfi((U_A x U_B) rho (U_A x U_B)^dag, h) over local unitaries via
// gradient ascent on 6 Euler angles (3 per qubit). Restart 0 starts from the
// identity, so the result never loses to the unrotated state; the remaining
// restart angles are drawn from (seed, restart index).
MqfiResult mqfi(const DensityMatrix& rho, const Generator& h, const MqfiConfig& config, std::uint64_t seed);

// Max pairwise |mqfi difference| across the given unit-norm generators.
double verify_generator_independence(const DensityMatrix& rho, const std::vector<Generator>& generators,
                                     const MqfiConfig& config, std::uint64_t seed);

// Rz(a) Ry(b) Rz(c)
Mat2 euler_unitary(double alpha, double beta, double gamma);

}  // namespace qmetro
