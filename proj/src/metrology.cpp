#include "qmetro/metrology.hpp"

#include <algorithm>
#include <cmath>

#include "qmetro/rng.hpp"

namespace qmetro {

namespace {
Mat2 pauli(Axis a) {
    switch (a) {
        case Axis::X: return pauli_x();
        case Axis::Y: return pauli_y();
        default: return pauli_z();
    }
}

char axis_char(Axis a) { return a == Axis::X ? 'x' : (a == Axis::Y ? 'y' : 'z'); }
}  // namespace

Generator make_generator(const Mat4& mat, const std::string& label) {
    const double herm = hermiticity_residual<4>(mat);
    if (herm > kStructuralTol) {
        throw NonUnitNormGenerator("generator '" + label + "' not Hermitian, residual " + std::to_string(herm));
    }
    const auto eig = hermitian_eig(mat);
    const double spectral = eig.eigenvalues.cwiseAbs().maxCoeff();
    if (std::abs(spectral - 1.0) > kStructuralTol) {
        throw NonUnitNormGenerator("generator '" + label + "' spectral norm " + std::to_string(spectral));
    }
    return Generator{mat, label};
}

Generator pauli_product_generator(Axis axis_a, Axis axis_b) {
    std::string label{"s"};
    label += axis_char(axis_a);
    label += "s";
    label += axis_char(axis_b);
    return make_generator(kron(pauli(axis_a), pauli(axis_b)), label);
}

Generator local_sum_generator(Axis axis_a, Axis axis_b) {
    std::string label{"local_"};
    label += axis_char(axis_a);
    label += axis_char(axis_b);
    const Mat4 g = 0.5 * (kron(pauli(axis_a), Mat2::Identity()) + kron(Mat2::Identity(), pauli(axis_b)));
    return make_generator(g, label);
}

Generator generator_by_name(const std::string& name) {
    auto parse_axis = [](char c) {
        switch (c) {
            case 'x': return Axis::X;
            case 'y': return Axis::Y;
            case 'z': return Axis::Z;
            default: throw RangeViolation(std::string("unknown generator axis '") + c + "'");
        }
    };
    if (name.size() == 2) return pauli_product_generator(parse_axis(name[0]), parse_axis(name[1]));
    if (name.rfind("local_", 0) == 0) {
        const std::string s = name.substr(6);
        if (s.size() == 1) return local_sum_generator(parse_axis(s[0]), parse_axis(s[0]));
        if (s.size() == 2) return local_sum_generator(parse_axis(s[0]), parse_axis(s[1]));
    }
    throw RangeViolation("unknown generator name '" + name + "'");
}

Mat2 euler_unitary(double alpha, double beta, double gamma) {
    const cplx ea = std::polar(1.0, -0.5 * alpha);
    const cplx eg = std::polar(1.0, -0.5 * gamma);
    const double cb = std::cos(0.5 * beta), sb = std::sin(0.5 * beta);
    Mat2 u;
    u(0, 0) = ea * cb * eg;
    u(0, 1) = -ea * sb * std::conj(eg);
    u(1, 0) = std::conj(ea) * sb * eg;
    u(1, 1) = std::conj(ea) * cb * std::conj(eg);
    return u;
}

namespace {

// Precomputed pieces of the spectral QFI formula for one state: weights
// W_ij = 2 (p_i - p_j)^2 / (p_i + p_j) and the eigenbasis Psi. Rotating the
// state only changes the matrix elements <i| U^dag H U |j>.
struct QfiKernel {
    Eigen::Matrix4d weights;
    Mat4 psi;

    explicit QfiKernel(const DensityMatrix& rho) {
        const auto eig = hermitian_eig(rho.mat, 1e-8);
        psi = eig.eigenvectors;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double s = eig.eigenvalues(i) + eig.eigenvalues(j);
                const double d = eig.eigenvalues(i) - eig.eigenvalues(j);
                weights(i, j) = s > 1e-12 ? 2.0 * d * d / s : 0.0;
            }
    }

    double eval(const Mat4& h, const Mat2& u_a, const Mat2& u_b) const {
        const Mat4 v = kron(u_a, u_b) * psi;
        const Mat4 m = v.adjoint() * h * v;
        double f = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) f += weights(i, j) * std::norm(m(i, j));
        return f;
    }

    double eval_angles(const Mat4& h, const std::array<double, 6>& x) const {
        return eval(h, euler_unitary(x[0], x[1], x[2]), euler_unitary(x[3], x[4], x[5]));
    }
};

struct AscentResult {
    double value = 0.0;
    std::array<double, 6> angles{};
    bool converged = false;
};

// Gradient ascent with Barzilai-Borwein steps and Armijo backtracking;
// central-difference gradients on the angles. Terminates when an accepted
// step improves by less than improvement_tol.
AscentResult ascend(const QfiKernel& kern, const Mat4& h, std::array<double, 6> x, const MqfiConfig& cfg) {
    const double hstep = cfg.fd_step;
    double fv = kern.eval_angles(h, x);
    std::array<double, 6> xp{}, gp{};
    bool have_prev = false;
    double step = 0.5;
    int small_gains = 0, stalls = 0;

    for (int it = 0; it < cfg.max_iter; ++it) {
        std::array<double, 6> grad{};
        double gnorm2 = 0.0;
        for (std::size_t k = 0; k < 6; ++k) {
            auto plus = x, minus = x;
            plus[k] += hstep;
            minus[k] -= hstep;
            grad[k] = (kern.eval_angles(h, plus) - kern.eval_angles(h, minus)) / (2.0 * hstep);
            gnorm2 += grad[k] * grad[k];
        }
        if (gnorm2 < 1e-24) return {fv, x, true};

        if (have_prev) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t k = 0; k < 6; ++k) {
                const double s = x[k] - xp[k], y = grad[k] - gp[k];
                ss += s * s;
                sy += s * y;
            }
            step = std::abs(sy) > 1e-300 ? std::clamp(std::abs(ss / sy), 1e-8, 1e2) : 0.5;
        }
        xp = x;
        gp = grad;
        have_prev = true;

        double s = step;
        bool accepted = false;
        std::array<double, 6> cand{};
        double fc = fv;
        for (int bt = 0; bt < 40; ++bt) {
            for (std::size_t k = 0; k < 6; ++k) cand[k] = x[k] + s * grad[k];
            fc = kern.eval_angles(h, cand);
            if (fc >= fv + 1e-4 * s * gnorm2) {
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            // retry from a conservative step before giving up on the direction
            if (++stalls >= 2) return {fv, x, true};
            have_prev = false;
            step = std::max(step * 1e-3, 1e-8);
            continue;
        }
        stalls = 0;
        const double gain = fc - fv;
        x = cand;
        fv = fc;
        if (gain < cfg.improvement_tol) {
            if (++small_gains >= 2) return {fv, x, true};
        } else {
            small_gains = 0;
        }
    }
    return {fv, x, false};
}

}  // namespace

double qfi(const DensityMatrix& rho, const Generator& h) {
    const QfiKernel kern(rho);
    return kern.eval(h.mat, Mat2::Identity(), Mat2::Identity());
}

MqfiResult mqfi(const DensityMatrix& rho, const Generator& h, const MqfiConfig& config, std::uint64_t seed) {
    const QfiKernel kern(rho);
    const double identity_value = kern.eval(h.mat, Mat2::Identity(), Mat2::Identity());

    std::vector<AscentResult> runs;
    int n_converged = 0;
    for (int k = 0; k < config.n_restarts; ++k) {
        std::array<double, 6> x0{};
        if (k > 0) {
            // stratify the two polar angles over a 3x3 grid so every
            // hemisphere pairing of the probe axes gets a nearby start;
            // azimuths come from the per-restart stream
            CounterRng rng(seed, static_cast<std::uint64_t>(k) + 0x30F1ULL);
            static constexpr double grid[3] = {1.0 / 6.0, 0.5, 5.0 / 6.0};
            const int cell = (k - 1) % 9;
            x0[1] = M_PI * grid[cell / 3];
            x0[4] = M_PI * grid[cell % 3];
            x0[0] = rng.uniform(0.0, 2.0 * M_PI);
            x0[2] = rng.uniform(0.0, 2.0 * M_PI);
            x0[3] = rng.uniform(0.0, 2.0 * M_PI);
            x0[5] = rng.uniform(0.0, 2.0 * M_PI);
        }
        AscentResult r = ascend(kern, h.mat, x0, config);
        if (r.converged) ++n_converged;
        runs.push_back(r);
    }

    // best value wins; ties keep the lowest restart index
    std::size_t best_idx = 0;
    for (std::size_t k = 1; k < runs.size(); ++k)
        if (runs[k].value > runs[best_idx].value) best_idx = k;

    double second = -1.0;
    for (std::size_t k = 0; k < runs.size(); ++k)
        if (k != best_idx) second = std::max(second, runs[k].value);

    MqfiResult out;
    out.value = std::max(runs[best_idx].value, identity_value);
    const auto& x = runs[best_idx].angles;
    out.optimal_rotation = {euler_unitary(x[0], x[1], x[2]), euler_unitary(x[3], x[4], x[5])};
    out.n_restarts_used = config.n_restarts;
    out.best_restart_spread = second >= 0.0 ? runs[best_idx].value - second : 0.0;
    out.low_confidence = out.best_restart_spread > config.low_confidence_spread;
    out.all_restarts_failed = n_converged == 0;
    return out;
}

double verify_generator_independence(const DensityMatrix& rho, const std::vector<Generator>& generators,
                                     const MqfiConfig& config, std::uint64_t seed) {
    if (generators.size() < 2) throw RangeViolation("verify_generator_independence: need >= 2 generators");
    for (const auto& g : generators) {
        const double spectral = hermitian_eig(g.mat).eigenvalues.cwiseAbs().maxCoeff();
        if (std::abs(spectral - 1.0) > kStructuralTol) {
            throw NonUnitNormGenerator("generator '" + g.label + "' spectral norm " + std::to_string(spectral));
        }
    }
    double lo = 4.0, hi = 0.0;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        const double v = mqfi(rho, generators[i], config, seed + i).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

}  // namespace qmetro
