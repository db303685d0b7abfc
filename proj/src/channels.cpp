#include "qmetro/channels.hpp"

#include <algorithm>
#include <cmath>

#include "qmetro/entanglement.hpp"
#include "qmetro/parallel.hpp"
#include "qmetro/rng.hpp"

namespace qmetro {

std::string channel_name(ChannelKind k) {
    switch (k) {
        case ChannelKind::AmplitudeDamping: return "amplitude_damping";
        case ChannelKind::PhaseDamping: return "phase_damping";
        case ChannelKind::Depolarizing: return "depolarizing";
    }
    return "?";
}

ChannelKind channel_by_name(const std::string& name) {
    for (ChannelKind k :
         {ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping, ChannelKind::Depolarizing}) {
        if (channel_name(k) == name) return k;
    }
    throw RangeViolation("unknown channel '" + name + "'");
}

double channel_gamma_max(ChannelKind k) { return k == ChannelKind::Depolarizing ? 0.75 : 0.5; }

namespace {

std::vector<Mat2> single_qubit_kraus(ChannelKind kind, double gamma) {
    if (kind == ChannelKind::AmplitudeDamping) {
        Mat2 k0 = Mat2::Zero(), k1 = Mat2::Zero();
        k0(0, 0) = 1.0;
        k0(1, 1) = std::sqrt(1.0 - gamma);
        k1(0, 1) = std::sqrt(gamma);
        return {k0, k1};
    }
    // phase damping
    Mat2 k0 = std::sqrt(1.0 - gamma) * Mat2::Identity();
    Mat2 k1 = Mat2::Zero(), k2 = Mat2::Zero();
    k1(0, 0) = std::sqrt(gamma);
    k2(1, 1) = std::sqrt(gamma);
    return {k0, k1, k2};
}

void check_completeness(const std::vector<Mat4>& kraus) {
    Mat4 acc = Mat4::Zero();
    for (const auto& k : kraus) acc += k.adjoint() * k;
    if (max_abs<4>(acc - Mat4::Identity()) > 1e-12) {
        throw Error("channel Kraus set violates completeness");
    }
}

DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<Mat4>& kraus) {
    Mat4 out = Mat4::Zero();
    for (const auto& k : kraus) out += k * rho.mat * k.adjoint();
    return DensityMatrix{0.5 * (out + out.adjoint())};
}

}  // namespace

std::vector<Mat4> channel_kraus_operators(ChannelKind kind, double gamma) {
    if (kind == ChannelKind::Depolarizing) {
        throw RangeViolation("channel_kraus_operators: depolarizing uses the convex form");
    }
    const auto ks = single_qubit_kraus(kind, gamma);
    std::vector<Mat4> out;
    out.reserve(ks.size() * ks.size());
    for (const auto& ka : ks)
        for (const auto& kb : ks) out.push_back(kron(ka, kb));
    check_completeness(out);
    return out;
}

DensityMatrix amplitude_damping(const DensityMatrix& rho, double gamma) {
    if (gamma < 0.0 || gamma > 0.5) throw RangeViolation("amplitude_damping: gamma must be in [0, 0.5]");
    return apply_kraus(rho, channel_kraus_operators(ChannelKind::AmplitudeDamping, gamma));
}

DensityMatrix phase_damping(const DensityMatrix& rho, double gamma) {
    if (gamma < 0.0 || gamma > 0.5) throw RangeViolation("phase_damping: gamma must be in [0, 0.5]");
    return apply_kraus(rho, channel_kraus_operators(ChannelKind::PhaseDamping, gamma));
}

DensityMatrix depolarizing(const DensityMatrix& rho, double gamma) {
    if (gamma < 0.0 || gamma > 0.75) throw RangeViolation("depolarizing: gamma must be in [0, 0.75]");
    return DensityMatrix{(1.0 - gamma) * rho.mat + gamma * 0.25 * Mat4::Identity()};
}

DensityMatrix apply_channel(const ChannelSpec& spec, const DensityMatrix& rho) {
    switch (spec.kind) {
        case ChannelKind::AmplitudeDamping: return amplitude_damping(rho, spec.gamma);
        case ChannelKind::PhaseDamping: return phase_damping(rho, spec.gamma);
        case ChannelKind::Depolarizing: return depolarizing(rho, spec.gamma);
    }
    throw RangeViolation("apply_channel: bad kind");
}

double depolarizing_correction(double p_measured, double gamma_eff, double p_infinity) {
    if (gamma_eff < 0.0 || gamma_eff >= 1.0) {
        throw RangeViolation("depolarizing_correction: gamma_eff must be in [0, 1)");
    }
    return (p_measured - gamma_eff * p_infinity) / (1.0 - gamma_eff);
}

std::string measure_name(FitMeasure m) {
    switch (m) {
        case FitMeasure::Concurrence: return "concurrence";
        case FitMeasure::Negativity: return "negativity";
        case FitMeasure::Ree: return "ree";
    }
    return "?";
}

FitMeasure measure_by_name(const std::string& name) {
    for (FitMeasure m : {FitMeasure::Concurrence, FitMeasure::Negativity, FitMeasure::Ree}) {
        if (measure_name(m) == name) return m;
    }
    throw RangeViolation("unknown measure '" + name + "'");
}

SweepResult channel_sweep(std::uint64_t ensemble_seed, int n_sample, ChannelKind kind,
                          const std::vector<double>& gammas, FitMeasure fit_measure,
                          const SweepConfig& config) {
    if (n_sample < 200) throw RangeViolation("channel_sweep: n_sample must be >= 200");
    if (gammas.empty() || gammas.front() != 0.0) {
        throw RangeViolation("channel_sweep: gamma grid must start at 0");
    }
    for (std::size_t i = 1; i < gammas.size(); ++i) {
        if (gammas[i] <= gammas[i - 1]) throw RangeViolation("channel_sweep: gammas must be increasing");
        if (gammas[i] > channel_gamma_max(kind)) {
            throw RangeViolation("channel_sweep: gamma " + std::to_string(gammas[i]) + " out of range for " +
                                 channel_name(kind));
        }
    }
    if (fit_measure == FitMeasure::Ree && n_sample < 500) {
        throw RangeViolation("channel_sweep: ree sweeps need n_sample >= 500");
    }

    SweepResult out;
    out.kind = kind;
    out.measure = fit_measure;
    out.seed = ensemble_seed;
    out.n_sample = n_sample;

    std::vector<DensityMatrix> base(static_cast<std::size_t>(n_sample));
    parallel_for(base.size(), config.workers, [&](std::size_t i) {
        base[i] = gen_hs_random(CounterRng::derive_stream_key(ensemble_seed, i));
    });

    for (double gamma : gammas) {
        if (fit_measure == FitMeasure::Ree && gamma > 0.3) {
            out.warnings.push_back("gamma " + std::to_string(gamma) + " skipped: ree sweeps restricted to gamma <= 0.3");
            continue;
        }
        out.gammas.push_back(gamma);
        SweepResult::PerGamma pg;
        pg.gamma = gamma;

        std::vector<double> xs(base.size()), ys(base.size());
        std::vector<char> keep(base.size(), 1);
        parallel_for(base.size(), config.workers, [&](std::size_t i) {
            const DensityMatrix noisy = apply_channel({kind, gamma}, base[i]);
            const std::uint64_t state_seed = CounterRng::derive_stream_key(ensemble_seed, i);
            switch (fit_measure) {
                case FitMeasure::Concurrence: xs[i] = concurrence(noisy); break;
                case FitMeasure::Negativity: xs[i] = negativity(noisy); break;
                case FitMeasure::Ree:
                    try {
                        xs[i] = ree(noisy, config.ree, state_seed).value;
                    } catch (const NotConvergedError&) {
                        keep[i] = 0;
                    }
                    break;
            }
            ys[i] = mqfi(noisy, config.generator, config.mqfi, state_seed).value / 4.0;
        });
        std::vector<double> xk, yk;
        for (std::size_t i = 0; i < base.size(); ++i) {
            if (keep[i]) {
                xk.push_back(xs[i]);
                yk.push_back(ys[i]);
            }
        }

        try {
            int nb = config.n_bins;
            if (nb == 0) {
                try {
                    const double w = fd_bin_width(xk);
                    const auto [mn, mx] = std::minmax_element(xk.begin(), xk.end());
                    nb = std::max(2, static_cast<int>(std::lround((*mx - *mn) / w)));
                } catch (const DegenerateDataError&) {
                    // zero IQR at strong damping (most states separable):
                    // fall back to fixed bins and let min-occupancy dropping act
                    nb = 18;
                }
            }
            const BinnedSeries bs = bin_series(xk, yk, nb, config.min_occupancy, UnderfullPolicy::Drop);
            if (bs.n_dropped > 0) {
                out.warnings.push_back("gamma " + std::to_string(gamma) + ": dropped " +
                                       std::to_string(bs.n_dropped) + " underfull bins");
            }
            std::vector<double> bx, by, bw;
            for (const auto& b : bs.bins) {
                bx.push_back(b.center);
                by.push_back(b.mean);
                bw.push_back(b.standard_error > 0.0 ? 1.0 / (b.standard_error * b.standard_error) : 1.0);
            }
            pg.n_bins_used = static_cast<int>(bx.size());
            if (static_cast<int>(bx.size()) < model_arity(ModelKind::ExponentialSaturation) + 1) {
                throw DegenerateDataError("too few populated bins");
            }
            const FitResult fit = fit_model(ModelKind::ExponentialSaturation, bx, by, &bw);
            pg.a = fit.params[0];
            pg.alpha = fit.params[1];
            pg.b = fit.params[2];
            pg.r2 = fit.r2;
            pg.fit_ok = true;

            const RebinDirective rb{pg.n_bins_used, config.min_occupancy, true};
            try {
                const BootstrapSummary boot = bootstrap_fit(ModelKind::ExponentialSaturation, xk, yk,
                                                            config.bootstrap_n, ensemble_seed ^ 0x5EEDULL, rb);
                pg.a_ci = {boot.params[0].ci_low, boot.params[0].ci_high};
                pg.alpha_ci = {boot.params[1].ci_low, boot.params[1].ci_high};
                pg.b_ci = {boot.params[2].ci_low, boot.params[2].ci_high};
            } catch (const Error& e) {
                pg.note = std::string("bootstrap failed: ") + e.what();
            }
        } catch (const Error& e) {
            pg.fit_ok = false;
            pg.note = e.what();
            out.warnings.push_back("gamma " + std::to_string(gamma) + ": fit failed: " + e.what());
        }
        out.params.push_back(pg);
    }
    return out;
}

}  // namespace qmetro
