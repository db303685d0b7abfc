#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qmetro/errors.hpp"

namespace qmetro {

// Freedman-Diaconis bin width, 2 * IQR * n^(-1/3). Percentiles use linear
// interpolation (type 7).
double fd_bin_width(const std::vector<double>& values);

double percentile(std::vector<double> values, double p);  // p in [0, 100]

struct BinnedSeries {
    struct Bin {
        double lo = 0.0, hi = 0.0, center = 0.0;
        std::size_t count = 0;
        double mean = 0.0, std_dev = 0.0, standard_error = 0.0, median = 0.0;
        double ci_low = 0.0, ci_high = 0.0;  // mean -/+ 1.96 SE
    };
    std::vector<double> edges;  // original equal-width grid
    std::vector<Bin> bins;      // retained bins, count >= min_occupancy
    std::size_t n_merged = 0;   // merge events (merge policy)
    std::size_t n_dropped = 0;  // dropped bins (drop policy)
};

enum class UnderfullPolicy { Merge, Drop };

// Equal-width bins of y grouped by x over [min(x), max(x)]. Underfull bins are
// merged into the adjacent bin (leftward tie-break) or dropped, per policy.
BinnedSeries bin_series(const std::vector<double>& x, const std::vector<double>& y, int n_bins,
                        std::size_t min_occupancy, UnderfullPolicy policy = UnderfullPolicy::Merge);

enum class ModelKind { Linear, Quadratic, Cubic, ExponentialSaturation, Logistic, MichaelisMenten };

int model_arity(ModelKind m);
std::string model_name(ModelKind m);
ModelKind model_by_name(const std::string& name);
double model_eval(ModelKind m, const std::vector<double>& params, double x);
std::vector<double> model_jacobian(ModelKind m, const std::vector<double>& params, double x);  // df/dp

struct FitResult {
    ModelKind model = ModelKind::Linear;
    std::vector<double> params;
    std::vector<std::pair<double, double>> param_cis;  // filled by bootstrap_fit
    double r2 = 0.0;
    double r2_cv = std::numeric_limits<double>::quiet_NaN();  // filled via kfold_cv
    double aic = 0.0;
    double bic = 0.0;
    double rss = 0.0;
    std::vector<double> residuals;
    bool converged = true;
};

struct FitConvergenceFailure : ConvergenceFailure {
    FitResult best_so_far;
    FitConvergenceFailure(const std::string& msg, FitResult best)
        : ConvergenceFailure(msg), best_so_far(std::move(best)) {}
};

// Least squares: closed form for polynomials, damped Gauss-Newton
// (Levenberg-Marquardt, analytic Jacobians) for the nonlinear families.
// Optional weights w_i multiply the squared residuals; R2/RSS/AIC/BIC are
// reported in the same weighting. AIC = n ln(RSS/n) + 2p, BIC with p ln(n).
FitResult fit_model(ModelKind model, const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>* weights = nullptr);

// Pooled out-of-fold R2_CV = 1 - sum_k RSS_k / sum_k TSS_k, TSS_k measured
// against the training-fold mean. Deterministic shuffle keyed by fold_seed.
double kfold_cv(ModelKind model, const std::vector<double>& x, const std::vector<double>& y, int k,
                std::uint64_t fold_seed);

// Cross-validation for fits on binned data: folds are drawn over the raw
// points, each fold's training points are binned and fitted, and the held-out
// points are evaluated through bins on the same edges. Avoids the
// extrapolation blow-ups of leaving whole bins out.
double binned_kfold_cv(ModelKind model, const std::vector<double>& x, const std::vector<double>& y, int k,
                       int n_bins, std::size_t min_occupancy, std::uint64_t fold_seed);

// Deterministic disjoint partition covering all indices; test gets
// round(n * test_fraction) of them.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(std::size_t n,
                                                                               double test_fraction,
                                                                               std::uint64_t seed);

struct BootstrapSummary {
    ModelKind model = ModelKind::Linear;
    int n_resamples = 0;  // requested
    int n_kept = 0;       // converged resamples
    struct ParamStats {
        double mean = 0.0, std_dev = 0.0, ci_low = 0.0, ci_high = 0.0;  // percentile 2.5/97.5
    };
    std::vector<ParamStats> params;
    std::vector<std::vector<double>> samples;  // per-resample parameter vectors
};

// Re-bin each resample before fitting (the ensemble-analysis mode). n_bins == 0
// selects Freedman-Diaconis on the resampled x.
struct RebinDirective {
    int n_bins = 0;
    std::size_t min_occupancy = 100;
    bool weighted = true;
};

// Resamples rows with replacement, optionally re-bins, refits, and summarizes
// the parameter distributions. Resamples that fail to converge are dropped;
// more than 10% dropped is an error.
BootstrapSummary bootstrap_fit(ModelKind model, const std::vector<double>& x, const std::vector<double>& y,
                               int n_resamples, std::uint64_t seed,
                               const std::optional<RebinDirective>& rebin = std::nullopt);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct BoundarySeries {
    std::vector<std::pair<double, double>> upper;  // (bin center, max y)
    std::vector<std::pair<double, double>> lower;  // (bin center, min y)
};

BoundarySeries boundary_extract(const std::vector<double>& x, const std::vector<double>& y, int n_bins,
                                std::size_t min_occupancy = 1);

}  // namespace qmetro
