#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "qmetro/metrology.hpp"

// Brute-force oracle for the local-unitary QFI maximization: a dense grid over
// the 6 Euler angles (20 points per angle, 64e6 evaluations). Independent of
// the gradient-ascent path in mqfi(); shares only the spectral QFI formula.

using namespace qmetro;

namespace {

struct GridOracle {
    Eigen::Matrix4d weights;
    Mat4 psi;
    Mat4 h;

    GridOracle(const DensityMatrix& rho, const Generator& gen) : h(gen.mat) {
        Eigen::SelfAdjointEigenSolver<Mat4> es(rho.mat);
        psi = es.eigenvectors();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double s = es.eigenvalues()(i) + es.eigenvalues()(j);
                const double d = es.eigenvalues()(i) - es.eigenvalues()(j);
                weights(i, j) = s > 1e-12 ? 2.0 * d * d / s : 0.0;
            }
    }

    double eval(const Mat2& ua, const Mat2& ub) const {
        const Mat4 v = kron(ua, ub) * psi;
        const Mat4 m = v.adjoint() * h * v;
        double f = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) f += weights(i, j) * std::norm(m(i, j));
        return f;
    }

    double grid_max(int points_per_angle) const {
        std::vector<double> grid(static_cast<std::size_t>(points_per_angle));
        for (int i = 0; i < points_per_angle; ++i) {
            grid[static_cast<std::size_t>(i)] = 2.0 * M_PI * i / points_per_angle;
        }
        std::vector<Mat2> rots_a, rots_b;  // all (alpha, beta, gamma) combinations
        rots_a.reserve(grid.size() * grid.size() * grid.size());
        for (double a : grid)
            for (double b : grid)
                for (double c : grid) rots_a.push_back(euler_unitary(a, b, c));
        rots_b = rots_a;

        const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
        std::vector<double> best(workers, 0.0);
        std::vector<std::thread> pool;
        const std::size_t chunk = (rots_a.size() + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(lo + chunk, rots_a.size());
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi, w] {
                double b = 0.0;
                for (std::size_t i = lo; i < hi; ++i)
                    for (const auto& ub : rots_b) b = std::max(b, eval(rots_a[i], ub));
                best[w] = b;
            });
        }
        for (auto& t : pool) t.join();
        double out = 0.0;
        for (double b : best) out = std::max(out, b);
        return out;
    }
};

}  // namespace

TEST_CASE("mqfi agrees with the dense 6-angle grid on werner(0.5)") {
    const DensityMatrix rho = werner(0.5);
    const Generator zz = pauli_product_generator(Axis::Z, Axis::Z);
    const GridOracle oracle(rho, zz);
    const double grid = oracle.grid_max(20);

    MqfiConfig cfg;
    const double opt = mqfi(rho, zz, cfg, 77).value;

    // closed form for the Werner family: 8 p^2 / (1 + p)
    CHECK(grid == doctest::Approx(4.0 / 3.0).epsilon(2e-3));
    CHECK(std::abs(opt - grid) <= 1e-3);
    CHECK(opt + 1e-9 >= grid);  // the grid can never beat a converged ascent
}

TEST_CASE("mqfi agrees with a coarser grid on a random mixed state") {
    const DensityMatrix rho = gen_hs_random(31415);
    const Generator zz = pauli_product_generator(Axis::Z, Axis::Z);
    const GridOracle oracle(rho, zz);
    const double grid = oracle.grid_max(12);

    MqfiConfig cfg;
    const double opt = mqfi(rho, zz, cfg, 31415).value;
    CHECK(opt + 1e-9 >= grid);          // a converged ascent never loses to the grid
    CHECK(std::abs(opt - grid) <= 0.05);  // 12-point grid resolution bound
}
