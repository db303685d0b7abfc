#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qmetro/channels.hpp"
#include "qmetro/entanglement.hpp"
#include "qmetro/metrology.hpp"
#include "qmetro/states.hpp"

namespace qmetro {

inline constexpr const char* kVersion = "0.1.0";

struct SweepDirective {
    ChannelKind kind = ChannelKind::AmplitudeDamping;
    FitMeasure measure = FitMeasure::Concurrence;
    std::vector<double> gammas;
    int n_sample = 2000;
};

std::vector<SweepDirective> default_sweeps();

struct ExperimentConfig {
    std::uint64_t master_seed = 42;
    int n_states = 20000;
    int ree_subsample = 500;  // -1 computes REE for the full ensemble
    MqfiConfig mqfi;
    ReeConfig ree;
    std::string generator = "zz";  // phase generator for MQFI ("zz", "xx", "yy", "local_z", ...)
    int n_bins = 0;                // 0 = Freedman-Diaconis
    std::size_t min_occupancy = 100;
    int bootstrap_n = 1000;
    int cv_folds = 5;
    double test_fraction = 0.2;
    std::vector<SweepDirective> sweeps = default_sweeps();
    std::filesystem::path output_dir = "qmetro_out";
    unsigned workers = 0;  // 0 = all hardware threads
    bool force = false;    // overwrite existing outputs

    void validate() const;  // n_states >= 100, test_fraction in (0,1), cv_folds >= 2, ...
};

struct RunManifest {
    std::string version = kVersion;
    std::string started_at;
    std::string finished_at;
    std::uint64_t n_states = 0;
    std::uint64_t completed = 0;
    std::uint64_t skipped = 0;
    std::uint64_t failed = 0;
    std::uint64_t ree_requested = 0;
    std::uint64_t ree_completed = 0;
    std::vector<std::uint64_t> ree_failed_ids;
    std::vector<std::uint64_t> mqfi_low_confidence_ids;
    std::vector<std::string> warnings;
};

// Generates the ensemble (records in state_id order, REE on a concurrence-
// stratified subsample), writes ensemble.csv + manifest.json under
// config.output_dir. Identical results for any worker count.
struct EnsembleRun {
    std::vector<EnsembleRecord> records;
    RunManifest manifest;
    std::filesystem::path csv_path;
};
EnsembleRun run_ensemble(const ExperimentConfig& config);

// Full statistical report for an existing ensemble CSV: per measure the
// scatter data, binned series, all six model fits with train/CV/test tables
// (binned and raw variants), bootstrap summaries, boundary fits and the
// bin-count robustness study; plus a cross-measure summary.
void run_analysis(const std::filesystem::path& ensemble_csv, const ExperimentConfig& config);

// Runs every sweep directive and fits the parameter-evolution laws
// (exponential decay for amplitude damping, constant-model comparison for
// phase damping, linear interpolation + correction for depolarizing).
void run_sweeps(const ExperimentConfig& config);

// Direct MQFI statistics over certified separable mixtures.
struct SeparableBaseline {
    int n = 0;
    double mean = 0.0, median = 0.0, std_dev = 0.0, min = 0.0, max = 0.0;
    double max_negativity = 0.0;
};
SeparableBaseline run_separable_baseline(const ExperimentConfig& config, int n);

// Stratified (by concurrence decile, rank-based) deterministic subsample.
std::vector<std::size_t> stratified_ree_selection(const std::vector<double>& concurrence, int subsample);

}  // namespace qmetro
