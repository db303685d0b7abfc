#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmetro/entanglement.hpp"
#include "qmetro/metrology.hpp"
#include "qmetro/states.hpp"
#include "qmetro/stats.hpp"

namespace qmetro {

enum class ChannelKind { AmplitudeDamping, PhaseDamping, Depolarizing };

std::string channel_name(ChannelKind k);
ChannelKind channel_by_name(const std::string& name);
double channel_gamma_max(ChannelKind k);  // 0.5 for the damping channels, 0.75 for depolarizing

struct ChannelSpec {
    ChannelKind kind = ChannelKind::AmplitudeDamping;
    double gamma = 0.0;
};

// Local two-Kraus energy-relaxation channel applied independently to both
// qubits (four two-qubit Kraus products). gamma in [0, 0.5].
DensityMatrix amplitude_damping(const DensityMatrix& rho, double gamma);

// Local three-Kraus pure-dephasing channel on both qubits: populations are
// preserved exactly, single-qubit coherences scale by (1-gamma), cross
// coherences by (1-gamma)^2. gamma in [0, 0.5].
DensityMatrix phase_damping(const DensityMatrix& rho, double gamma);

// (1-gamma) rho + gamma I/4, gamma in [0, 0.75].
DensityMatrix depolarizing(const DensityMatrix& rho, double gamma);

DensityMatrix apply_channel(const ChannelSpec& spec, const DensityMatrix& rho);

// Two-qubit Kraus operators of the local channels (for the completeness check).
std::vector<Mat4> channel_kraus_operators(ChannelKind kind, double gamma);

// Exact inversion of convex depolarizing mixing:
// (p_measured - gamma_eff * p_infinity) / (1 - gamma_eff).
double depolarizing_correction(double p_measured, double gamma_eff, double p_infinity);

enum class FitMeasure { Concurrence, Negativity, Ree };
std::string measure_name(FitMeasure m);
FitMeasure measure_by_name(const std::string& name);

struct SweepConfig {
    MqfiConfig mqfi;
    ReeConfig ree;
    Generator generator = pauli_product_generator(Axis::Z, Axis::Z);
    int n_bins = 0;               // 0 selects Freedman-Diaconis per gamma
    std::size_t min_occupancy = 30;
    int bootstrap_n = 100;
    unsigned workers = 0;
};

struct SweepResult {
    ChannelKind kind = ChannelKind::AmplitudeDamping;
    FitMeasure measure = FitMeasure::Concurrence;
    std::uint64_t seed = 0;
    int n_sample = 0;
    struct PerGamma {
        double gamma = 0.0;
        bool fit_ok = false;
        double a = 0.0, alpha = 0.0, b = 0.0, r2 = 0.0;
        std::pair<double, double> a_ci{0.0, 0.0}, alpha_ci{0.0, 0.0}, b_ci{0.0, 0.0};
        int n_bins_used = 0;
        std::string note;  // set when the fit is skipped or degraded
    };
    std::vector<double> gammas;
    std::vector<PerGamma> params;
    std::vector<std::string> warnings;
};

// For each gamma: apply the channel to fresh Hilbert-Schmidt states keyed by
// (ensemble_seed, index), recompute the entanglement measure and MQFI, bin,
// fit the exponential saturation model and bootstrap its parameter CIs.
// Underfull bins are dropped with a warning. fit_measure = Ree restricts the
// grid to gamma <= 0.3 and requires n_sample >= 500.
SweepResult channel_sweep(std::uint64_t ensemble_seed, int n_sample, ChannelKind kind,
                          const std::vector<double>& gammas, FitMeasure fit_measure, const SweepConfig& config);

}  // namespace qmetro
