#include "qmetro/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "qmetro/io.hpp"
#include "qmetro/parallel.hpp"
#include "qmetro/rng.hpp"

namespace qmetro {

using nlohmann::json;

namespace {

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json config_to_json(const ExperimentConfig& c) {
    json sweeps = json::array();
    for (const auto& s : c.sweeps) {
        sweeps.push_back({{"channel", channel_name(s.kind)},
                          {"measure", measure_name(s.measure)},
                          {"gammas", s.gammas},
                          {"n_sample", s.n_sample}});
    }
    return {{"master_seed", c.master_seed},
            {"n_states", c.n_states},
            {"ree_subsample", c.ree_subsample},
            {"generator", c.generator},
            {"n_bins", c.n_bins},
            {"min_occupancy", c.min_occupancy},
            {"bootstrap_n", c.bootstrap_n},
            {"cv_folds", c.cv_folds},
            {"test_fraction", c.test_fraction},
            {"workers", c.workers},
            {"mqfi", {{"n_restarts", c.mqfi.n_restarts},
                      {"max_iter", c.mqfi.max_iter},
                      {"improvement_tol", c.mqfi.improvement_tol}}},
            {"ree", {{"n_starts", c.ree.n_starts},
                     {"max_iter", c.ree.max_iter},
                     {"objective_tol", c.ree.objective_tol},
                     {"gradient_tol", c.ree.gradient_tol},
                     {"accept_spread", c.ree.accept_spread},
                     {"accept_min_runs", c.ree.accept_min_runs}}},
            {"sweeps", sweeps}};
}

json manifest_to_json(const RunManifest& m, const ExperimentConfig& c) {
    return {{"version", m.version},
            {"started_at", m.started_at},
            {"finished_at", m.finished_at},
            {"config", config_to_json(c)},
            {"n_states", m.n_states},
            {"completed", m.completed},
            {"skipped", m.skipped},
            {"failed", m.failed},
            {"ree", {{"requested", m.ree_requested},
                     {"completed", m.ree_completed},
                     {"failed_ids", m.ree_failed_ids}}},
            {"mqfi_low_confidence_ids", m.mqfi_low_confidence_ids},
            {"warnings", m.warnings}};
}

void write_json(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

int resolve_bins(int configured, const std::vector<double>& x) {
    if (configured > 0) return configured;
    const double w = fd_bin_width(x);
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    return std::max(2, static_cast<int>(std::lround((*mx - *mn) / w)));
}

constexpr std::uint64_t kSplitSalt = 0xA110;
constexpr std::uint64_t kFoldSalt = 0xF01D;
constexpr std::uint64_t kBootSalt = 0xB007;
constexpr std::uint64_t kSweepSalt = 0x53EE;
constexpr std::uint64_t kBaseSalt = 0xBA5E;

}  // namespace

std::vector<SweepDirective> default_sweeps() {
    const std::vector<double> damping_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    const std::vector<double> depol_grid{0.0, 0.15, 0.3, 0.45, 0.6, 0.75};
    return {{ChannelKind::AmplitudeDamping, FitMeasure::Concurrence, damping_grid, 2000},
            {ChannelKind::PhaseDamping, FitMeasure::Concurrence, damping_grid, 2000},
            {ChannelKind::Depolarizing, FitMeasure::Concurrence, depol_grid, 2000}};
}

void ExperimentConfig::validate() const {
    if (n_states < 100) throw RangeViolation("config: n_states must be >= 100");
    if (test_fraction <= 0.0 || test_fraction >= 1.0) {
        throw RangeViolation("config: test_fraction must be in (0,1)");
    }
    if (cv_folds < 2) throw RangeViolation("config: cv_folds must be >= 2");
    if (bootstrap_n < 100) throw RangeViolation("config: bootstrap_n must be >= 100");
    generator_by_name(generator);  // throws on unknown name
}

std::vector<std::size_t> stratified_ree_selection(const std::vector<double>& concurrence, int subsample) {
    const std::size_t n = concurrence.size();
    if (subsample < 0 || static_cast<std::size_t>(subsample) >= n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    // rank-based deciles; ties broken by index so the split is deterministic
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return concurrence[a] != concurrence[b] ? concurrence[a] < concurrence[b] : a < b;
    });
    std::vector<std::size_t> picked;
    const int deciles = 10;
    const auto per_decile = static_cast<std::size_t>((subsample + deciles - 1) / deciles);
    for (int d = 0; d < deciles; ++d) {
        const std::size_t lo = n * static_cast<std::size_t>(d) / deciles;
        const std::size_t hi = n * (static_cast<std::size_t>(d) + 1) / deciles;
        const std::size_t len = hi - lo;
        const std::size_t k = std::min(per_decile, len);
        for (std::size_t j = 0; j < k; ++j) {
            picked.push_back(order[lo + j * len / k]);
        }
    }
    std::sort(picked.begin(), picked.end());
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    if (picked.size() > static_cast<std::size_t>(subsample)) picked.resize(static_cast<std::size_t>(subsample));
    return picked;
}

EnsembleRun run_ensemble(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    const auto csv_path = config.output_dir / "ensemble.csv";
    if (std::filesystem::exists(csv_path) && !config.force) {
        throw Error("output already exists: " + csv_path.string() +
                    " (pass --force to overwrite, or use a fresh --output directory)");
    }

    EnsembleRun run;
    run.manifest.started_at = iso_now();
    run.manifest.n_states = static_cast<std::uint64_t>(config.n_states);
    const Generator gen = generator_by_name(config.generator);

    const auto n = static_cast<std::size_t>(config.n_states);
    std::vector<EnsembleRecord> records(n);
    std::vector<char> ok(n, 1);
    std::vector<std::string> errors(n);

    parallel_for(n, config.workers, [&](std::size_t i) {
        try {
            EnsembleRecord& r = records[i];
            r.state_id = i;
            r.seed = CounterRng::derive_stream_key(config.master_seed, i);
            const DensityMatrix rho = gen_hs_random(r.seed);
            r.purity = purity(rho);
            r.concurrence = concurrence(rho);
            r.negativity = negativity(rho);
            const MqfiResult m = mqfi(rho, gen, config.mqfi, r.seed);
            r.mqfi = m.value;
            r.mqfi_norm = m.value / 4.0;
            r.mqfi_low_confidence = m.low_confidence;
        } catch (const std::exception& e) {
            ok[i] = 0;
            errors[i] = e.what();
        }
    });

    std::vector<double> conc(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) conc[i] = records[i].concurrence;
    const auto ree_ids = stratified_ree_selection(conc, config.ree_subsample);
    run.manifest.ree_requested = ree_ids.size();

    std::vector<char> ree_ok(ree_ids.size(), 0);
    parallel_for(ree_ids.size(), config.workers, [&](std::size_t k) {
        const std::size_t i = ree_ids[k];
        if (!ok[i]) return;
        const DensityMatrix rho = gen_hs_random(records[i].seed);
        try {
            records[i].ree = ree(rho, config.ree, records[i].seed).value;
            ree_ok[k] = 1;
        } catch (const NotConvergedError&) {
            // one retry with doubled starts before recording the state as REE-missing
            ReeConfig wide = config.ree;
            wide.n_starts *= 2;
            try {
                records[i].ree = ree(rho, wide, records[i].seed ^ 0x0EEULL).value;
                ree_ok[k] = 1;
            } catch (const NotConvergedError&) {
            }
        }
    });

    for (std::size_t k = 0; k < ree_ids.size(); ++k) {
        if (ree_ok[k]) {
            ++run.manifest.ree_completed;
        } else {
            run.manifest.ree_failed_ids.push_back(ree_ids[k]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!ok[i]) {
            ++run.manifest.failed;
            run.manifest.warnings.push_back("state " + std::to_string(i) + " failed: " + errors[i]);
        } else {
            ++run.manifest.completed;
            if (records[i].mqfi_low_confidence) run.manifest.mqfi_low_confidence_ids.push_back(i);
        }
    }
    if (run.manifest.failed * 100 > run.manifest.n_states) {
        throw Error("ensemble generation: " + std::to_string(run.manifest.failed) + " of " +
                    std::to_string(n) + " states failed (> 1%)");
    }

    std::vector<EnsembleRecord> written;
    written.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (ok[i]) written.push_back(records[i]);
    }
    run.manifest.finished_at = iso_now();
    write_ensemble_csv(csv_path, written);
    write_json(config.output_dir / "manifest.json", manifest_to_json(run.manifest, config));
    run.records = std::move(written);
    run.csv_path = csv_path;
    return run;
}

// ---------------------------------------------------------------------------
// analysis
// ---------------------------------------------------------------------------

namespace {

struct BinnedXY {
    std::vector<double> x, y, w;
};

BinnedXY to_xyw(const BinnedSeries& bs) {
    BinnedXY out;
    for (const auto& b : bs.bins) {
        out.x.push_back(b.center);
        out.y.push_back(b.mean);
        out.w.push_back(b.standard_error > 0.0 ? 1.0 / (b.standard_error * b.standard_error) : 1.0);
    }
    return out;
}

json fit_to_json(const FitResult& f) {
    json j = {{"model", model_name(f.model)}, {"n_params", model_arity(f.model)},
              {"params", f.params},          {"r2", f.r2},
              {"aic", f.aic},                {"bic", f.bic},
              {"rss", f.rss},                {"converged", f.converged}};
    if (!std::isnan(f.r2_cv)) j["r2_cv"] = f.r2_cv;
    return j;
}

double r2_against(const std::vector<double>& x, const std::vector<double>& y, ModelKind m,
                  const std::vector<double>& params) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double rss = 0.0, tss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - model_eval(m, params, x[i]);
        rss += r * r;
        tss += (y[i] - mean) * (y[i] - mean);
    }
    return tss > 0.0 ? 1.0 - rss / tss : 0.0;
}

FitResult fit_or_best(ModelKind m, const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>* w) {
    try {
        return fit_model(m, x, y, w);
    } catch (const FitConvergenceFailure& e) {
        return e.best_so_far;
    }
}

std::string table1_csv(const std::vector<json>& rows) {
    std::ostringstream out;
    out << "model,n_params,r2_train,r2_cv,aic,bic,r2_test\n";
    for (const auto& r : rows) {
        out << r["model"].get<std::string>() << ',' << r["n_params"].get<int>() << ','
            << format_double(r["r2_train"].get<double>()) << ',' << format_double(r["r2_cv"].get<double>())
            << ',' << format_double(r["aic"].get<double>()) << ',' << format_double(r["bic"].get<double>())
            << ',' << format_double(r["r2_test"].get<double>()) << '\n';
    }
    return out.str();
}

constexpr ModelKind kAllModels[] = {ModelKind::Linear,  ModelKind::Quadratic,
                                    ModelKind::Cubic,   ModelKind::ExponentialSaturation,
                                    ModelKind::Logistic, ModelKind::MichaelisMenten};

}  // namespace

void run_analysis(const std::filesystem::path& ensemble_csv, const ExperimentConfig& config) {
    config.validate();
    if (!std::filesystem::exists(ensemble_csv)) {
        throw Error("ensemble file not found: " + ensemble_csv.string());
    }
    const auto records = read_ensemble_csv(ensemble_csv);
    if (records.size() < 100) throw Error("analysis: fewer than 100 ensemble rows");
    const auto analysis_dir = config.output_dir / "analysis";
    std::filesystem::create_directories(analysis_dir);

    json summary;
    {
        std::vector<double> pur, c, ng, f;
        for (const auto& r : records) {
            pur.push_back(r.purity);
            c.push_back(r.concurrence);
            ng.push_back(r.negativity);
            f.push_back(r.mqfi);
        }
        const double pm = std::accumulate(pur.begin(), pur.end(), 0.0) / static_cast<double>(pur.size());
        double ps = 0.0;
        for (double v : pur) ps += (v - pm) * (v - pm);
        const double frac_pure =
            static_cast<double>(std::count_if(pur.begin(), pur.end(), [](double v) { return v > 0.99; })) /
            static_cast<double>(pur.size());
        summary["n_records"] = records.size();
        summary["purity"] = {{"mean", pm},
                             {"std", std::sqrt(ps / (static_cast<double>(pur.size()) - 1.0))},
                             {"fraction_above_0.99", frac_pure}};
        summary["pearson"] = {{"concurrence_mqfi", pearson(c, f)},
                              {"negativity_mqfi", pearson(ng, f)},
                              {"concurrence_negativity", pearson(c, ng)}};
        std::vector<double> re, fre;
        for (const auto& r : records) {
            if (r.ree) {
                re.push_back(*r.ree);
                fre.push_back(r.mqfi);
            }
        }
        summary["ree_rows"] = re.size();
        if (re.size() >= 2) summary["pearson"]["ree_mqfi"] = pearson(re, fre);
    }

    json b_intercepts;
    for (const FitMeasure meas : {FitMeasure::Concurrence, FitMeasure::Negativity, FitMeasure::Ree}) {
        std::vector<double> x, y;
        for (const auto& r : records) {
            switch (meas) {
                case FitMeasure::Concurrence: x.push_back(r.concurrence); y.push_back(r.mqfi_norm); break;
                case FitMeasure::Negativity: x.push_back(r.negativity); y.push_back(r.mqfi_norm); break;
                case FitMeasure::Ree:
                    if (r.ree) {
                        x.push_back(*r.ree);
                        y.push_back(r.mqfi_norm);
                    }
                    break;
            }
        }
        const std::string mname = measure_name(meas);
        if (x.size() < 50) {
            summary["skipped_measures"].push_back(mname);
            continue;
        }
        const auto mdir = analysis_dir / mname;
        std::filesystem::create_directories(mdir);
        try {

        {
            std::ostringstream sc;
            sc << mname << ",mqfi_norm\n";
            for (std::size_t i = 0; i < x.size(); ++i)
                sc << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
            write_text_file(mdir / "scatter.csv", sc.str());
        }

        const auto [train_idx, test_idx] =
            train_test_split(x.size(), config.test_fraction, CounterRng::derive_stream_key(config.master_seed, kSplitSalt));
        std::vector<double> xtr, ytr, xte, yte;
        for (auto i : train_idx) {
            xtr.push_back(x[i]);
            ytr.push_back(y[i]);
        }
        for (auto i : test_idx) {
            xte.push_back(x[i]);
            yte.push_back(y[i]);
        }

        const int nb = resolve_bins(config.n_bins, xtr);
        const BinnedSeries bins = bin_series(xtr, ytr, nb, config.min_occupancy);
        {
            std::ostringstream bs;
            bs << "center,lo,hi,count,mean,std,standard_error,median,ci_low,ci_high\n";
            for (const auto& b : bins.bins) {
                bs << format_double(b.center) << ',' << format_double(b.lo) << ',' << format_double(b.hi)
                   << ',' << b.count << ',' << format_double(b.mean) << ',' << format_double(b.std_dev) << ','
                   << format_double(b.standard_error) << ',' << format_double(b.median) << ','
                   << format_double(b.ci_low) << ',' << format_double(b.ci_high) << '\n';
            }
            write_text_file(mdir / "bins.csv", bs.str());
        }
        const BinnedXY bxy = to_xyw(bins);
        const BinnedSeries test_bins = bin_series(xte, yte, nb, std::max<std::size_t>(config.min_occupancy / 4, 2));
        const BinnedXY txy = to_xyw(test_bins);

        json fits;
        fits["n_bins"] = nb;
        fits["bins_retained"] = bins.bins.size();
        std::vector<json> table_binned, table_raw;
        for (const ModelKind m : kAllModels) {
            try {
                FitResult fb = fit_or_best(m, bxy.x, bxy.y, &bxy.w);
                fb.r2_cv = binned_kfold_cv(m, xtr, ytr, config.cv_folds, nb, config.min_occupancy,
                                           CounterRng::derive_stream_key(config.master_seed, kFoldSalt));
                const double r2_test_binned = r2_against(txy.x, txy.y, m, fb.params);
                fits["binned"][model_name(m)] = fit_to_json(fb);
                table_binned.push_back({{"model", model_name(m)},
                                        {"n_params", model_arity(m)},
                                        {"r2_train", fb.r2},
                                        {"r2_cv", std::isnan(fb.r2_cv) ? 0.0 : fb.r2_cv},
                                        {"aic", fb.aic},
                                        {"bic", fb.bic},
                                        {"r2_test", r2_test_binned}});
            } catch (const Error& e) {
                fits["binned"][model_name(m)] = {{"error", e.what()}};
            }
            try {
                FitResult fr = fit_or_best(m, xtr, ytr, nullptr);
                fr.r2_cv = kfold_cv(m, xtr, ytr, config.cv_folds,
                                    CounterRng::derive_stream_key(config.master_seed, kFoldSalt + 1));
                const double r2_test_raw = r2_against(xte, yte, m, fr.params);
                fits["raw"][model_name(m)] = fit_to_json(fr);
                table_raw.push_back({{"model", model_name(m)},
                                     {"n_params", model_arity(m)},
                                     {"r2_train", fr.r2},
                                     {"r2_cv", fr.r2_cv},
                                     {"aic", fr.aic},
                                     {"bic", fr.bic},
                                     {"r2_test", r2_test_raw}});
            } catch (const Error& e) {
                fits["raw"][model_name(m)] = {{"error", e.what()}};
            }
        }
        write_text_file(mdir / "table1.csv", table1_csv(table_binned));
        write_text_file(mdir / "table1_raw.csv", table1_csv(table_raw));

        // boundaries + quadratic fits
        const BoundarySeries bd = boundary_extract(x, y, nb, std::max<std::size_t>(config.min_occupancy / 4, 2));
        {
            std::ostringstream bs;
            bs << "center,upper,lower\n";
            for (std::size_t i = 0; i < bd.upper.size(); ++i) {
                bs << format_double(bd.upper[i].first) << ',' << format_double(bd.upper[i].second) << ','
                   << format_double(bd.lower[i].second) << '\n';
            }
            write_text_file(mdir / "boundaries.csv", bs.str());
        }
        for (const char* side : {"upper", "lower"}) {
            const auto& pts = std::string(side) == "upper" ? bd.upper : bd.lower;
            std::vector<double> px, py;
            for (const auto& [cx, cy] : pts) {
                px.push_back(cx);
                py.push_back(cy);
            }
            if (px.size() >= 4) {
                const FitResult q = fit_or_best(ModelKind::Quadratic, px, py, nullptr);
                fits[std::string("boundary_") + side + "_quadratic"] = fit_to_json(q);
            }
        }

        // bootstrap over the full measure sample, re-binned per resample
        json boot_json;
        for (const ModelKind m : kAllModels) {
            const RebinDirective rb{nb, config.min_occupancy, true};
            try {
                const BootstrapSummary bsum =
                    bootstrap_fit(m, x, y, config.bootstrap_n,
                                  CounterRng::derive_stream_key(config.master_seed, kBootSalt), rb);
                json pj = json::array();
                for (const auto& p : bsum.params) {
                    pj.push_back({{"mean", p.mean}, {"std", p.std_dev}, {"ci_low", p.ci_low}, {"ci_high", p.ci_high}});
                }
                json mj = {{"n_resamples", bsum.n_resamples}, {"n_kept", bsum.n_kept}, {"params", pj}};
                if (m == ModelKind::ExponentialSaturation) {
                    // one-sided bootstrap test of the separable baseline B = 0:
                    // empirical tail when any resample crosses zero, otherwise the
                    // normal approximation from the bootstrap z score
                    int nonpos = 0;
                    for (const auto& s : bsum.samples)
                        if (s[2] <= 0.0) ++nonpos;
                    const double z = bsum.params[2].mean / std::max(bsum.params[2].std_dev, 1e-300);
                    const double p = nonpos > 0 ? (nonpos + 1.0) / (bsum.n_kept + 1.0)
                                                : 0.5 * std::erfc(z / std::sqrt(2.0));
                    mj["b_zero_test"] = {{"p_value", p}, {"z", z}, {"n_nonpositive", nonpos}};
                    b_intercepts[mname] = {{"mean", bsum.params[2].mean},
                                           {"ci_low", bsum.params[2].ci_low},
                                           {"ci_high", bsum.params[2].ci_high}};
                }
                boot_json[model_name(m)] = mj;
            } catch (const Error& e) {
                boot_json[model_name(m)] = {{"error", e.what()}};
            }
        }
        write_json(mdir / "bootstrap.json", boot_json);

        // bin-count robustness study
        json robust = json::array();
        for (const int rb_bins : {15, 20, 25, 30, 35}) {
            const BinnedSeries rbs = bin_series(xtr, ytr, rb_bins, config.min_occupancy);
            const BinnedXY rxy = to_xyw(rbs);
            json entry = {{"n_bins", rb_bins}, {"bins_retained", rbs.bins.size()}};
            if (rxy.x.size() >= 5) {
                try {
                    const FitResult fe = fit_or_best(ModelKind::ExponentialSaturation, rxy.x, rxy.y, &rxy.w);
                    const FitResult fc = fit_or_best(ModelKind::Cubic, rxy.x, rxy.y, &rxy.w);
                    entry["exponential_saturation"] = {{"params", fe.params}, {"r2", fe.r2}, {"converged", fe.converged}};
                    entry["cubic"] = {{"params", fc.params}, {"r2", fc.r2}};
                } catch (const Error& e) {
                    entry["error"] = e.what();
                }
            }
            robust.push_back(entry);
        }
        fits["bin_robustness"] = robust;
        write_json(mdir / "fits.json", fits);
        } catch (const Error& e) {
            summary["measure_errors"][mname] = e.what();
        }
    }

    summary["exponential_b_intercepts"] = b_intercepts;
    write_json(analysis_dir / "summary.json", summary);
}

// ---------------------------------------------------------------------------
// sweeps
// ---------------------------------------------------------------------------

namespace {

struct Ols {
    double intercept = 0.0, slope = 0.0, r2 = 0.0, slope_se = 0.0, rss = 0.0;
    int n = 0;
};

Ols ols_line(const std::vector<double>& x, const std::vector<double>& y) {
    Ols o;
    o.n = static_cast<int>(x.size());
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    o.slope = sxy / sxx;
    o.intercept = my - o.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (o.intercept + o.slope * x[i]);
        o.rss += r * r;
    }
    o.r2 = syy > 0.0 ? 1.0 - o.rss / syy : 1.0;
    o.slope_se = x.size() > 2 ? std::sqrt(o.rss / (n - 2.0) / sxx) : 0.0;
    return o;
}

double aic_of(double rss, int n, int p) {
    return n * std::log(std::max(rss / n, 1e-300)) + 2.0 * p;
}

// constant / linear / quadratic / exponential-decay comparison on a short
// parameter-evolution series; returns AIC per model and the winner
json evolution_model_selection(const std::vector<double>& g, const std::vector<double>& v) {
    const int n = static_cast<int>(g.size());
    json out;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double rss_const = 0.0;
    for (double y : v) rss_const += (y - mean) * (y - mean);
    out["constant"] = {{"aic", aic_of(rss_const, n, 1)}, {"rss", rss_const}, {"value", mean}};

    const Ols lin = ols_line(g, v);
    out["linear"] = {{"aic", aic_of(lin.rss, n, 2)}, {"rss", lin.rss}};

    std::vector<double> g2;
    for (double x : g) g2.push_back(x);
    FitResult quad;
    try {
        quad = fit_model(ModelKind::Quadratic, g2, v);
        out["quadratic"] = {{"aic", aic_of(quad.rss, n, 3)}, {"rss", quad.rss}};
    } catch (const Error&) {
        out["quadratic"] = {{"aic", 1e12}};
    }

    // P0 * exp(-beta g), log-space OLS (positive values only)
    bool pos = std::all_of(v.begin(), v.end(), [](double y) { return y > 0.0; });
    if (pos) {
        std::vector<double> lv;
        for (double y : v) lv.push_back(std::log(y));
        const Ols lg = ols_line(g, lv);
        double rss_exp = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double pred = std::exp(lg.intercept + lg.slope * g[i]);
            rss_exp += (v[i] - pred) * (v[i] - pred);
        }
        out["exponential"] = {{"aic", aic_of(rss_exp, n, 2)}, {"rss", rss_exp}, {"beta", -lg.slope}};
    } else {
        out["exponential"] = {{"aic", 1e12}};
    }

    std::string winner = "constant";
    double best = out["constant"]["aic"].get<double>();
    for (const char* name : {"linear", "quadratic", "exponential"}) {
        const double a = out[name]["aic"].get<double>();
        if (a < best) {
            best = a;
            winner = name;
        }
    }
    out["winner"] = winner;
    return out;
}

json sweep_to_json(const SweepResult& s) {
    json params = json::array();
    for (const auto& p : s.params) {
        json e = {{"gamma", p.gamma},
                  {"fit_ok", p.fit_ok},
                  {"n_bins_used", p.n_bins_used}};
        if (p.fit_ok) {
            e["A"] = p.a;
            e["A_ci"] = {p.a_ci.first, p.a_ci.second};
            e["alpha"] = p.alpha;
            e["alpha_ci"] = {p.alpha_ci.first, p.alpha_ci.second};
            e["B"] = p.b;
            e["B_ci"] = {p.b_ci.first, p.b_ci.second};
            e["r2"] = p.r2;
        }
        if (!p.note.empty()) e["note"] = p.note;
        params.push_back(e);
    }
    return {{"kind", channel_name(s.kind)}, {"measure", measure_name(s.measure)},
            {"gammas", s.gammas},           {"params", params},
            {"n_sample", s.n_sample},       {"seed", s.seed},
            {"warnings", s.warnings}};
}

}  // namespace

void run_sweeps(const ExperimentConfig& config) {
    config.validate();
    const auto dir = config.output_dir / "sweeps";
    std::filesystem::create_directories(dir);

    SweepConfig sc;
    sc.mqfi = config.mqfi;
    sc.ree = config.ree;
    sc.generator = generator_by_name(config.generator);
    sc.workers = config.workers;

    std::size_t directive_idx = 0;
    for (const auto& d : config.sweeps) {
        const std::uint64_t seed = CounterRng::derive_stream_key(config.master_seed, kSweepSalt + directive_idx);
        ++directive_idx;
        const SweepResult res = channel_sweep(seed, d.n_sample, d.kind, d.gammas, d.measure, sc);
        json j = sweep_to_json(res);

        std::vector<double> g, av, alv, bv;
        for (const auto& p : res.params) {
            if (p.fit_ok) {
                g.push_back(p.gamma);
                av.push_back(p.a);
                alv.push_back(p.alpha);
                bv.push_back(p.b);
            }
        }
        json evo;
        evo["n_fit_points"] = g.size();
        if (g.size() >= 3) {
            if (d.kind == ChannelKind::AmplitudeDamping) {
                // A(g) = A0 exp(-beta_A g): log-linear when the ratios stay positive
                const double a0 = av.front();
                bool pos = a0 > 0.0 && std::all_of(av.begin(), av.end(), [](double v) { return v > 0.0; });
                if (pos) {
                    std::vector<double> lr;
                    for (double v : av) lr.push_back(std::log(v / a0));
                    double num = 0.0, den = 0.0;
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        num += g[i] * lr[i];
                        den += g[i] * g[i];
                    }
                    const double beta = den > 0.0 ? -num / den : 0.0;
                    double rss = 0.0, tss = 0.0;
                    const double am = std::accumulate(av.begin(), av.end(), 0.0) / static_cast<double>(av.size());
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        const double pred = a0 * std::exp(-beta * g[i]);
                        rss += (av[i] - pred) * (av[i] - pred);
                        tss += (av[i] - am) * (av[i] - am);
                    }
                    evo["A"] = {{"form", "A0*exp(-beta*gamma)"},
                                {"A0", a0},
                                {"beta", beta},
                                {"r2", tss > 0.0 ? 1.0 - rss / tss : 1.0}};
                }
                const Ols al = ols_line(g, alv);
                evo["alpha"] = {{"form", "alpha0*(1+beta*gamma)"},
                                {"alpha0", al.intercept},
                                {"beta", al.intercept != 0.0 ? al.slope / al.intercept : 0.0},
                                {"r2", al.r2}};
                const Ols bl = ols_line(g, bv);
                evo["B"] = {{"form", "B0 + delta*gamma"},
                            {"B0", bl.intercept},
                            {"delta", bl.slope},
                            {"delta_ci", {bl.slope - 1.96 * bl.slope_se, bl.slope + 1.96 * bl.slope_se}},
                            {"r2", bl.r2}};
            } else if (d.kind == ChannelKind::PhaseDamping) {
                auto drift = [](const std::vector<double>& v) {
                    double m = 0.0;
                    for (double t : v) m = std::max(m, std::abs(t - v.front()) / std::max(std::abs(v.front()), 1e-12));
                    return m;
                };
                evo["A"] = {{"max_rel_drift", drift(av)}, {"model_selection", evolution_model_selection(g, av)}};
                evo["alpha"] = {{"max_rel_drift", drift(alv)}, {"model_selection", evolution_model_selection(g, alv)}};
                evo["B"] = {{"max_rel_drift", drift(bv)}, {"model_selection", evolution_model_selection(g, bv)}};
            } else {
                const Ols al = ols_line(g, av);
                const Ols bl = ols_line(g, bv);
                const double a_inf = al.intercept + al.slope;  // extrapolation to gamma = 1
                const double b_inf = bl.intercept + bl.slope;
                evo["A"] = {{"form", "(1-gamma)*A0 + gamma*A_inf"},
                            {"A0", al.intercept},
                            {"A_inf_extrapolated", a_inf},
                            {"slope", al.slope},
                            {"r2", al.r2}};
                evo["B"] = {{"form", "(1-gamma)*B0 + gamma*B_inf"},
                            {"B0", bl.intercept},
                            {"B_inf_extrapolated", b_inf},
                            {"slope", bl.slope},
                            {"r2", bl.r2}};
                json corrected = json::array();
                for (std::size_t i = 0; i < g.size(); ++i) {
                    if (g[i] < 1.0) {
                        corrected.push_back({{"gamma", g[i]},
                                             {"A_corrected", depolarizing_correction(av[i], g[i], a_inf)},
                                             {"B_corrected", depolarizing_correction(bv[i], g[i], b_inf)}});
                    }
                }
                evo["corrected"] = corrected;
            }
        }
        j["evolution"] = evo;
        write_json(dir / (channel_name(d.kind) + "_" + measure_name(d.measure) + ".json"), j);
    }
}

SeparableBaseline run_separable_baseline(const ExperimentConfig& config, int n) {
    config.validate();
    if (n < 100) throw RangeViolation("separable baseline: n must be >= 100");
    const Generator gen = generator_by_name(config.generator);

    std::vector<double> vals(static_cast<std::size_t>(n));
    std::vector<double> negs(static_cast<std::size_t>(n));
    parallel_for(vals.size(), config.workers, [&](std::size_t i) {
        const std::uint64_t seed = CounterRng::derive_stream_key(config.master_seed, kBaseSalt + i);
        const DensityMatrix rho = separable_mixture(seed);
        vals[i] = mqfi(rho, gen, config.mqfi, seed).value / 4.0;
        negs[i] = negativity(rho);
    });

    SeparableBaseline out;
    out.n = n;
    out.mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - out.mean) * (v - out.mean);
    out.std_dev = std::sqrt(ss / (static_cast<double>(vals.size()) - 1.0));
    out.median = percentile(vals, 50.0);
    out.min = *std::min_element(vals.begin(), vals.end());
    out.max = *std::max_element(vals.begin(), vals.end());
    out.max_negativity = *std::max_element(negs.begin(), negs.end());

    std::filesystem::create_directories(config.output_dir);
    write_json(config.output_dir / "separable_baseline.json",
               {{"n", out.n},
                {"mean_mqfi_norm", out.mean},
                {"median_mqfi_norm", out.median},
                {"std_mqfi_norm", out.std_dev},
                {"range", {out.min, out.max}},
                {"max_negativity", out.max_negativity},
                {"generator", config.generator}});
    return out;
}

}  // namespace qmetro
