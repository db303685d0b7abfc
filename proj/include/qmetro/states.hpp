#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmetro/linalg.hpp"

namespace qmetro {

inline constexpr double kStateTol = 1e-12;

// Two-qubit density matrix: Hermitian, PSD and unit-trace to 1e-12.
// Generators below guarantee these invariants; validate() re-checks them.
struct DensityMatrix {
    Mat4 mat;
};

struct Violation {
    std::string property;  // "hermiticity" | "positivity" | "trace"
    double residual;
};

// Empty iff all three state invariants hold at `tol`.
std::vector<Violation> validate(const DensityMatrix& rho, double tol = kStateTol);

double purity(const DensityMatrix& rho);

// Hilbert-Schmidt sample: rho = MM^dag / Tr(MM^dag) with M_ij ~ N(0,1) + i N(0,1),
// drawn from the counter-based stream keyed by `seed`. Deterministic in `seed`.
DensityMatrix gen_hs_random(std::uint64_t seed);

// |Phi+><Phi+| with |Phi+> = (|00> + |11>)/sqrt(2)
DensityMatrix bell_state();

// kron of two single-qubit Bloch states (I + r.sigma)/2
DensityMatrix product_state(const Eigen::Vector3d& bloch_a, const Eigen::Vector3d& bloch_b);

// Convex combination of product states: weights ~ flat Dirichlet, Bloch vectors
// uniform in the unit ball. PPT (zero negativity) by construction.
DensityMatrix separable_mixture(std::uint64_t seed, int n_components = 4);

// p |Phi+><Phi+| + (1-p) I/4
DensityMatrix werner(double p);

// One ensemble row. ree is empty when skipped for cost.
struct EnsembleRecord {
    std::uint64_t state_id = 0;
    std::uint64_t seed = 0;
    double purity = 0.0;
    double concurrence = 0.0;
    double negativity = 0.0;
    std::optional<double> ree;
    double mqfi = 0.0;
    double mqfi_norm = 0.0;  // mqfi / 4 exactly
    bool mqfi_low_confidence = false;
};

}  // namespace qmetro
