#pragma once

#include <array>
#include <cstdint>

#include "qmetro/states.hpp"

namespace qmetro {

// Wootters concurrence, in [0, 1]. Eigenvalues of rho (sy x sy) rho* (sy x sy)
// are computed through the Hermitian similarity sqrt(rho) S rho* S sqrt(rho);
// their square roots, sorted descending, enter max(0, l1 - l2 - l3 - l4).
double concurrence(const DensityMatrix& rho);

// (|rho^T_A|_1 - 1)/2, clamped to [0, 0.5].
double negativity(const DensityMatrix& rho);

// S(rho||sigma) = Tr(rho log2 rho) - Tr(rho log2 sigma), both logs regularized
// by epsilon. Clamped to >= 0.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon = 1e-14);

// Convex combination of 4 product states; the REE search space.
// 27 effective degrees of freedom: 3 independent weights + 8 Bloch vectors.
struct SeparableAnsatz {
    Eigen::Vector4d weights;                 // >= 0, sum 1
    std::array<Eigen::Vector3d, 4> bloch_a;  // |r| <= 1
    std::array<Eigen::Vector3d, 4> bloch_b;

    DensityMatrix materialize() const;
};

struct ReeConfig {
    int n_starts = 10;
    int max_iter = 2000;
    double objective_tol = 1e-8;
    double gradient_tol = 1e-6;
    double constraint_tol = 1e-8;
    double accept_spread = 1e-4;
    int accept_min_runs = 3;
    double epsilon = 1e-14;  // log regularization
};

struct ReeResult {
    double value = 0.0;  // bits, >= 0
    SeparableAnsatz closest_separable;
    int n_converged_runs = 0;
    double run_spread = 0.0;  // gap between best and accept_min_runs-th best converged run
};

// Multi-start constrained minimization of S(rho||sigma(theta)) over the
// separable ansatz. Starts are keyed by (seed, run index): flat Dirichlet
// weights, Bloch vectors uniform in the unit ball. Throws NotConvergedError
// unless >= accept_min_runs converged runs agree with the best value within
// accept_spread.
ReeResult ree(const DensityMatrix& rho, const ReeConfig& config, std::uint64_t seed);

namespace detail {
// Objective and its analytic gradient over the raw 28-parameter vector
// (4 weights + 4x(3+3) Bloch coordinates); exposed for the gradient test.
double ree_objective(const DensityMatrix& rho, const std::array<double, 28>& theta, double epsilon);
void ree_objective_grad(const DensityMatrix& rho, const std::array<double, 28>& theta, double epsilon,
                        double& value, std::array<double, 28>& grad);
std::array<double, 28> ree_project(const std::array<double, 28>& theta);
}  // namespace detail

}  // namespace qmetro
