#include "qmetro/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include "qmetro/rng.hpp"

namespace qmetro {

namespace {
const double kLn2 = std::log(2.0);

Mat4 spin_flip_matrix() { return kron(pauli_y(), pauli_y()); }

Mat2 bloch_to_state(const Eigen::Vector3d& r) {
    Mat2 s = Mat2::Identity();
    s += r.x() * pauli_x() + r.y() * pauli_y() + r.z() * pauli_z();
    return 0.5 * s;
}
}  // namespace

double concurrence(const DensityMatrix& rho) {
    const Mat4 flip = spin_flip_matrix();
    const Mat4 sq = matrix_sqrt_psd(rho.mat);
    const Mat4 r = sq * flip * rho.mat.conjugate() * flip * sq;
    const auto eig = hermitian_eig(r, 1e-8);
    // eigenvalues at the solver noise floor are zeroed before the square root,
    // otherwise sqrt amplifies 1e-16 noise into 1e-8 errors in the lambdas
    const double floor_ = 1e-13 * std::max(eig.eigenvalues(0), 0.0);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) {
        double mu = eig.eigenvalues(i);
        if (mu < -1e-8) throw SpectrumError("concurrence: spin-flip spectrum eigenvalue " + std::to_string(mu));
        lam[static_cast<std::size_t>(i)] = mu > floor_ ? std::sqrt(mu) : 0.0;
    }
    std::sort(lam.begin(), lam.end(), std::greater<>());
    const double c = lam[0] - lam[1] - lam[2] - lam[3];
    return std::clamp(c, 0.0, 1.0);
}

double negativity(const DensityMatrix& rho) {
    const double tn = trace_norm(partial_transpose_a(rho.mat));
    return std::clamp(0.5 * (tn - 1.0), 0.0, 0.5);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon) {
    const Mat4 log_rho = matrix_log2_regularized(rho.mat, epsilon);
    const Mat4 log_sigma = matrix_log2_regularized(sigma.mat, epsilon);
    const double s = ((rho.mat * log_rho).trace() - (rho.mat * log_sigma).trace()).real();
    return std::max(s, 0.0);
}

DensityMatrix SeparableAnsatz::materialize() const {
    Mat4 acc = Mat4::Zero();
    for (int i = 0; i < 4; ++i) {
        acc += weights(i) * kron(bloch_to_state(bloch_a[static_cast<std::size_t>(i)]),
                                 bloch_to_state(bloch_b[static_cast<std::size_t>(i)]));
    }
    return DensityMatrix{0.5 * (acc + acc.adjoint())};
}

// ---------------------------------------------------------------------------
// REE: spectral projected gradient over the 28 raw parameters
// [w0..w3, rA0, rB0, rA1, rB1, rA2, rB2, rA3, rB3], feasible set =
// (probability simplex) x (unit balls)^8.
// ---------------------------------------------------------------------------

namespace detail {

namespace {

Eigen::Vector4d project_simplex(const Eigen::Vector4d& w) {
    std::array<double, 4> u{w(0), w(1), w(2), w(3)};
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, lam = 0.0;
    int k = 0;
    for (int i = 0; i < 4; ++i) {
        css += u[static_cast<std::size_t>(i)];
        const double t = (1.0 - css) / (i + 1);
        if (u[static_cast<std::size_t>(i)] + t > 0.0) {
            k = i;
            lam = t;
        }
    }
    (void)k;
    Eigen::Vector4d out;
    for (int i = 0; i < 4; ++i) out(i) = std::max(w(i) + lam, 0.0);
    return out;
}

Mat4 build_sigma(const std::array<double, 28>& th, std::array<Mat2, 4>& rho_a, std::array<Mat2, 4>& rho_b) {
    Mat4 acc = Mat4::Zero();
    for (int i = 0; i < 4; ++i) {
        const int oa = 4 + 6 * i, ob = 7 + 6 * i;
        rho_a[static_cast<std::size_t>(i)] =
            bloch_to_state({th[static_cast<std::size_t>(oa)], th[static_cast<std::size_t>(oa + 1)],
                            th[static_cast<std::size_t>(oa + 2)]});
        rho_b[static_cast<std::size_t>(i)] =
            bloch_to_state({th[static_cast<std::size_t>(ob)], th[static_cast<std::size_t>(ob + 1)],
                            th[static_cast<std::size_t>(ob + 2)]});
        acc += th[static_cast<std::size_t>(i)] *
               kron(rho_a[static_cast<std::size_t>(i)], rho_b[static_cast<std::size_t>(i)]);
    }
    return acc;
}

}  // namespace

std::array<double, 28> ree_project(const std::array<double, 28>& theta) {
    std::array<double, 28> out = theta;
    Eigen::Vector4d w(theta[0], theta[1], theta[2], theta[3]);
    w = project_simplex(w);
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = w(i);
    for (int v = 0; v < 8; ++v) {
        const std::size_t off = static_cast<std::size_t>(4 + 3 * v);
        Eigen::Vector3d r(out[off], out[off + 1], out[off + 2]);
        const double n = r.norm();
        if (n > 1.0) r /= n;
        out[off] = r.x();
        out[off + 1] = r.y();
        out[off + 2] = r.z();
    }
    return out;
}

double ree_objective(const DensityMatrix& rho, const std::array<double, 28>& theta, double epsilon) {
    std::array<Mat2, 4> a, b;
    const Mat4 sigma = build_sigma(theta, a, b);
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (sigma + sigma.adjoint()));
    Eigen::Vector4d lg;
    for (int i = 0; i < 4; ++i) lg(i) = std::log(std::max(es.eigenvalues()(i), 0.0) + epsilon) / kLn2;
    const Mat4 log_sigma = es.eigenvectors() * lg.asDiagonal() * es.eigenvectors().adjoint();
    return -(rho.mat * log_sigma).trace().real();
}

// Gradient via the Daleckii-Krein formula: with sigma = U diag(l) U^dag,
// d/dp [-Tr(rho log2 sigma)] = -(1/ln2) sum_ij phi_ij A_ji B^p_ij where
// A = U^dag rho U, B^p = U^dag (dsigma/dp) U and phi is the divided
// difference of ln over the regularized spectrum.
void ree_objective_grad(const DensityMatrix& rho, const std::array<double, 28>& theta, double epsilon,
                        double& value, std::array<double, 28>& grad) {
    std::array<Mat2, 4> rho_a, rho_b;
    const Mat4 sigma = build_sigma(theta, rho_a, rho_b);
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (sigma + sigma.adjoint()));
    const Mat4& u = es.eigenvectors();
    Eigen::Vector4d lam = es.eigenvalues(), lt, ln;
    for (int i = 0; i < 4; ++i) {
        lt(i) = std::max(lam(i), 0.0) + epsilon;
        ln(i) = std::log(lt(i));
    }
    const Mat4 log_sigma = u * (ln / kLn2).asDiagonal() * u.adjoint();
    value = -(rho.mat * log_sigma).trace().real();

    Eigen::Matrix4d phi;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double d = lam(i) - lam(j);
            phi(i, j) = std::abs(d) > 1e-12 * std::max(1.0, std::abs(lam(i))) ? (ln(i) - ln(j)) / d : 1.0 / lt(i);
        }

    const Mat4 a = u.adjoint() * rho.mat * u;
    // C_ij = A_ji * phi_ij, so each directional derivative is -Re(sum C .* B)/ln2
    Mat4 c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c(i, j) = a(j, i) * phi(i, j);

    const std::array<Mat2, 3> half_pauli{0.5 * pauli_x(), 0.5 * pauli_y(), 0.5 * pauli_z()};
    auto dir_deriv = [&](const Mat4& dsigma) {
        const Mat4 b = u.adjoint() * dsigma * u;
        return -(c.cwiseProduct(b)).sum().real() / kLn2;
    };

    for (int i = 0; i < 4; ++i) {
        const auto si = static_cast<std::size_t>(i);
        grad[si] = dir_deriv(kron(rho_a[si], rho_b[si]));
        for (int x = 0; x < 3; ++x) {
            const auto sx_ = static_cast<std::size_t>(x);
            grad[static_cast<std::size_t>(4 + 6 * i + x)] =
                dir_deriv(theta[si] * kron(half_pauli[sx_], rho_b[si]));
            grad[static_cast<std::size_t>(7 + 6 * i + x)] =
                dir_deriv(theta[si] * kron(rho_a[si], half_pauli[sx_]));
        }
    }
}

}  // namespace detail

namespace {

using Params = std::array<double, 28>;

double dot(const Params& a, const Params& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 28; ++i) s += a[i] * b[i];
    return s;
}

struct SpgRun {
    double value = 0.0;
    Params theta{};
    bool converged = false;
};

// Projected L-BFGS on the feasible set (simplex x balls, all convex). The
// quasi-Newton direction handles the severe ill-conditioning near rank-
// deficient optima where plain projected gradient crawls; trial points are
// projected back and a steepest-descent step is the fallback whenever the
// projected direction stops being a descent direction.
SpgRun spg_minimize(const DensityMatrix& rho, const Params& theta0, const ReeConfig& cfg) {
    Params th = detail::ree_project(theta0);
    double fv;
    Params g{};
    detail::ree_objective_grad(rho, th, cfg.epsilon, fv, g);

    constexpr std::size_t kMem = 8;
    std::vector<Params> mem_s, mem_y;
    std::vector<double> mem_rho;
    double h0 = 1.0;

    int small_changes = 0, stalls = 0;
    double pg = 1.0;

    for (int it = 0; it < cfg.max_iter; ++it) {
        // projected-gradient stationarity; vanishes at boundary optima too
        Params probe = th;
        for (std::size_t i = 0; i < 28; ++i) probe[i] -= g[i];
        probe = detail::ree_project(probe);
        pg = 0.0;
        for (std::size_t i = 0; i < 28; ++i) pg += (probe[i] - th[i]) * (probe[i] - th[i]);
        pg = std::sqrt(pg);
        if (pg < cfg.gradient_tol) return {fv, th, true};

        // two-loop recursion
        Params q = g;
        std::vector<double> alpha(mem_s.size());
        for (std::size_t i = mem_s.size(); i-- > 0;) {
            alpha[i] = mem_rho[i] * dot(mem_s[i], q);
            for (std::size_t k = 0; k < 28; ++k) q[k] -= alpha[i] * mem_y[i][k];
        }
        for (std::size_t k = 0; k < 28; ++k) q[k] *= h0;
        for (std::size_t i = 0; i < mem_s.size(); ++i) {
            const double beta = mem_rho[i] * dot(mem_y[i], q);
            for (std::size_t k = 0; k < 28; ++k) q[k] += (alpha[i] - beta) * mem_s[i][k];
        }

        Params trial = th;
        for (std::size_t i = 0; i < 28; ++i) trial[i] -= q[i];
        trial = detail::ree_project(trial);
        Params d{};
        for (std::size_t i = 0; i < 28; ++i) d[i] = trial[i] - th[i];
        double gd = dot(g, d);
        if (!(gd < -1e-15)) {
            // projected quasi-Newton direction lost descent: steepest fallback
            mem_s.clear();
            mem_y.clear();
            mem_rho.clear();
            trial = probe;
            for (std::size_t i = 0; i < 28; ++i) d[i] = trial[i] - th[i];
            gd = dot(g, d);
            if (!(gd < 0.0)) return {fv, th, true};
        }

        double lam = 1.0;
        bool accepted = false;
        Params cand{};
        double fc = fv;
        for (int bt = 0; bt < 50; ++bt) {
            for (std::size_t i = 0; i < 28; ++i) cand[i] = th[i] + lam * d[i];
            fc = detail::ree_objective(rho, cand, cfg.epsilon);
            if (fc <= fv + 1e-4 * lam * gd) {
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted) {
            if (++stalls >= 3) return {fv, th, true};  // kink minimum
            mem_s.clear();
            mem_y.clear();
            mem_rho.clear();
            continue;
        }
        stalls = 0;

        double fv_new;
        Params g_new{};
        detail::ree_objective_grad(rho, cand, cfg.epsilon, fv_new, g_new);
        Params s{}, y{};
        for (std::size_t i = 0; i < 28; ++i) {
            s[i] = cand[i] - th[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
            mem_s.push_back(s);
            mem_y.push_back(y);
            mem_rho.push_back(1.0 / sy);
            if (mem_s.size() > kMem) {
                mem_s.erase(mem_s.begin());
                mem_y.erase(mem_y.begin());
                mem_rho.erase(mem_rho.begin());
            }
            h0 = sy / dot(y, y);
        }

        const double rel = std::abs(fv - fv_new) / std::max(std::abs(fv), 1e-12);
        th = cand;
        fv = fv_new;
        g = g_new;

        // relative change only counts near stationarity, otherwise slow
        // plateau phases would stop the run early
        if (rel < cfg.objective_tol && pg < 1e-4) {
            if (++small_changes >= 3) return {fv, th, true};
        } else {
            small_changes = 0;
        }
    }
    return {fv, th, false};
}

Params random_start(CounterRng& rng) {
    Params th{};
    const auto w = rng.dirichlet(4);
    for (std::size_t i = 0; i < 4; ++i) th[i] = w[i];
    for (int v = 0; v < 8; ++v) {
        const Eigen::Vector3d r = rng.unit_ball();
        const std::size_t off = static_cast<std::size_t>(4 + 3 * v);
        th[off] = r.x();
        th[off + 1] = r.y();
        th[off + 2] = r.z();
    }
    return th;
}

SeparableAnsatz unpack(const Params& th) {
    SeparableAnsatz a;
    a.weights = Eigen::Vector4d(th[0], th[1], th[2], th[3]);
    for (int i = 0; i < 4; ++i) {
        const std::size_t oa = static_cast<std::size_t>(4 + 6 * i), ob = oa + 3;
        a.bloch_a[static_cast<std::size_t>(i)] = {th[oa], th[oa + 1], th[oa + 2]};
        a.bloch_b[static_cast<std::size_t>(i)] = {th[ob], th[ob + 1], th[ob + 2]};
    }
    return a;
}

}  // namespace

ReeResult ree(const DensityMatrix& rho, const ReeConfig& config, std::uint64_t seed) {
    // state-specific term, computed once
    const auto eig = hermitian_eig(rho.mat, 1e-8);
    double s_rho = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double lam = std::max(eig.eigenvalues(i), 0.0);
        s_rho += eig.eigenvalues(i) * std::log(lam + config.epsilon) / kLn2;
    }

    std::vector<SpgRun> converged;
    for (int k = 0; k < config.n_starts; ++k) {
        CounterRng rng(seed, static_cast<std::uint64_t>(k) + 0x52EEULL);
        SpgRun run = spg_minimize(rho, random_start(rng), config);
        if (run.converged) converged.push_back(run);
    }
    std::sort(converged.begin(), converged.end(),
              [](const SpgRun& a, const SpgRun& b) { return a.value < b.value; });

    const int min_runs = config.accept_min_runs;
    if (static_cast<int>(converged.size()) < min_runs) {
        throw NotConvergedError("ree: only " + std::to_string(converged.size()) + " of " +
                                std::to_string(config.n_starts) + " runs converged");
    }
    const double best = converged.front().value;
    int agree = 0;
    for (const auto& r : converged)
        if (r.value - best <= config.accept_spread) ++agree;
    const double spread = converged[static_cast<std::size_t>(min_runs) - 1].value - best;
    if (agree < min_runs) {
        throw NotConvergedError("ree: best runs disagree, spread " + std::to_string(spread) + " over " +
                                std::to_string(config.accept_min_runs) + " runs (value " +
                                std::to_string(s_rho + best) + ")");
    }

    ReeResult out;
    out.value = std::max(s_rho + best, 0.0);
    out.closest_separable = unpack(converged.front().theta);
    out.n_converged_runs = static_cast<int>(converged.size());
    out.run_spread = spread;
    return out;
}

}  // namespace qmetro
