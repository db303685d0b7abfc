#include "qmetro/states.hpp"

#include <cmath>

#include "qmetro/rng.hpp"

namespace qmetro {

std::vector<Violation> validate(const DensityMatrix& rho, double tol) {
    std::vector<Violation> out;
    const double herm = hermiticity_residual<4>(rho.mat);
    if (herm > tol) out.push_back({"hermiticity", herm});

    // positivity / trace checked on the symmetrized matrix so a failed
    // hermiticity check does not poison the eigensolver
    Mat4 h = 0.5 * (rho.mat + rho.mat.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat4> solver(h);
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -tol) out.push_back({"positivity", -min_eig});

    const double tr_res = std::abs(rho.mat.trace().real() - 1.0) + std::abs(rho.mat.trace().imag());
    if (tr_res > tol) out.push_back({"trace", tr_res});
    return out;
}

double purity(const DensityMatrix& rho) { return (rho.mat * rho.mat).trace().real(); }

DensityMatrix gen_hs_random(std::uint64_t seed) {
    CounterRng rng(seed);
    for (int attempt = 0; attempt < 3; ++attempt) {
        Mat4 m;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double re = rng.normal();
                const double im = rng.normal();
                m(i, j) = cplx(re, im);
            }
        Mat4 w = m * m.adjoint();
        const double tr = w.trace().real();
        if (tr >= kStateTol) {
            DensityMatrix rho{w / tr};
            rho.mat = 0.5 * (rho.mat + rho.mat.adjoint());
            return rho;
        }
    }
    throw DegenerateSampleError("gen_hs_random: Tr(MM^dag) < 1e-12 after 3 attempts, seed " +
                                std::to_string(seed));
}

DensityMatrix bell_state() {
    Eigen::Vector4cd phi;
    phi << 1.0 / std::sqrt(2.0), 0, 0, 1.0 / std::sqrt(2.0);
    return DensityMatrix{phi * phi.adjoint()};
}

namespace {
Mat2 bloch_to_state(const Eigen::Vector3d& r) {
    Mat2 s = Mat2::Identity();
    s += r.x() * pauli_x() + r.y() * pauli_y() + r.z() * pauli_z();
    return 0.5 * s;
}
}  // namespace

DensityMatrix product_state(const Eigen::Vector3d& bloch_a, const Eigen::Vector3d& bloch_b) {
    if (bloch_a.norm() > 1.0 + kStateTol || bloch_b.norm() > 1.0 + kStateTol) {
        throw BlochNormViolation("product_state: Bloch vector norm exceeds 1");
    }
    return DensityMatrix{kron(bloch_to_state(bloch_a), bloch_to_state(bloch_b))};
}

DensityMatrix separable_mixture(std::uint64_t seed, int n_components) {
    if (n_components < 1) throw RangeViolation("separable_mixture: n_components must be >= 1");
    CounterRng rng(seed);
    const auto w = rng.dirichlet(static_cast<std::size_t>(n_components));
    Mat4 acc = Mat4::Zero();
    for (int i = 0; i < n_components; ++i) {
        const Eigen::Vector3d ra = rng.unit_ball();
        const Eigen::Vector3d rb = rng.unit_ball();
        acc += w[static_cast<std::size_t>(i)] * kron(bloch_to_state(ra), bloch_to_state(rb));
    }
    return DensityMatrix{0.5 * (acc + acc.adjoint())};
}

DensityMatrix werner(double p) {
    if (p < 0.0 || p > 1.0) throw RangeViolation("werner: p must be in [0, 1]");
    return DensityMatrix{p * bell_state().mat + (1.0 - p) * 0.25 * Mat4::Identity()};
}

}  // namespace qmetro
