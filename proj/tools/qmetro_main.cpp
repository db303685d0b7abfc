#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qmetro/channels.hpp"
#include "qmetro/entanglement.hpp"
#include "qmetro/io.hpp"
#include "qmetro/rng.hpp"
#include "qmetro/metrology.hpp"
#include "qmetro/pipeline.hpp"

namespace {

using namespace qmetro;

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& output, std::string& config_path) {
    cmd->add_option("--config", config_path, "configuration file (flat key = value lines)");
    cmd->add_option("--seed", cfg.master_seed, "master seed for all derived streams");
    cmd->add_option("--n-states", cfg.n_states, "ensemble size");
    cmd->add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
    cmd->add_option("--output", output, "output directory");
    cmd->add_option("--generator", cfg.generator,
                    "MQFI phase generator: zz (default), xx, yy, or local_z");
    cmd->add_option("--ree-subsample", cfg.ree_subsample, "REE subsample size (-1 = full ensemble)");
    cmd->add_option("--n-bins", cfg.n_bins, "bin count (0 = Freedman-Diaconis)");
    cmd->add_option("--bootstrap-n", cfg.bootstrap_n, "bootstrap resamples");
    cmd->add_option("--cv-folds", cfg.cv_folds, "cross-validation folds");
    cmd->add_option("--test-fraction", cfg.test_fraction, "held-out test fraction");
    cmd->add_option("--mqfi-restarts", cfg.mqfi.n_restarts, "MQFI optimizer restarts");
    cmd->add_option("--ree-starts", cfg.ree.n_starts, "REE optimizer starts");
    cmd->add_flag("--force", cfg.force, "overwrite existing outputs");
}

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Flat key = value configuration; '#' comments and [section] headers are
// allowed and sections are ignored. Values apply only where the matching
// command-line flag was not given (flag > config file > default).
void apply_config_file(const std::string& path, CLI::App* cmd, ExperimentConfig& cfg, std::string& output,
                       int& baseline_n) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open config file: " + path);

    const std::map<std::string, std::function<void(const std::string&)>> setters{
        {"seed", [&](const std::string& v) { cfg.master_seed = std::strtoull(v.c_str(), nullptr, 10); }},
        {"n-states", [&](const std::string& v) { cfg.n_states = std::stoi(v); }},
        {"workers", [&](const std::string& v) { cfg.workers = static_cast<unsigned>(std::stoul(v)); }},
        {"output", [&](const std::string& v) { output = v; }},
        {"generator", [&](const std::string& v) { cfg.generator = v; }},
        {"ree-subsample", [&](const std::string& v) { cfg.ree_subsample = std::stoi(v); }},
        {"n-bins", [&](const std::string& v) { cfg.n_bins = std::stoi(v); }},
        {"bootstrap-n", [&](const std::string& v) { cfg.bootstrap_n = std::stoi(v); }},
        {"cv-folds", [&](const std::string& v) { cfg.cv_folds = std::stoi(v); }},
        {"test-fraction", [&](const std::string& v) { cfg.test_fraction = std::stod(v); }},
        {"mqfi-restarts", [&](const std::string& v) { cfg.mqfi.n_restarts = std::stoi(v); }},
        {"ree-starts", [&](const std::string& v) { cfg.ree.n_starts = std::stoi(v); }},
        {"force", [&](const std::string& v) { cfg.force = v == "true" || v == "1"; }},
        {"n", [&](const std::string& v) { baseline_n = std::stoi(v); }},
    };

    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string t = trimmed(line);
        if (t.empty() || t[0] == '#' || t[0] == '[') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trimmed(t.substr(0, eq));
        const std::string value = trimmed(t.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw Error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        const std::string flag = "--" + key;
        const auto* opt = cmd->get_option_no_throw(flag);
        if (opt != nullptr && opt->count() > 0) continue;  // flag wins
        it->second(value);
    }
}

int run_verify() {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    const DensityMatrix bell = bell_state();
    check("bell purity = 1", std::abs(purity(bell) - 1.0) < 1e-12);
    check("bell concurrence = 1", std::abs(concurrence(bell) - 1.0) < 1e-9);
    check("bell negativity = 0.5", std::abs(negativity(bell) - 0.5) < 1e-9);
    check("maximally mixed purity = 0.25",
          std::abs(purity(DensityMatrix{0.25 * Mat4::Identity()}) - 0.25) < 1e-12);
    check("werner(0) validates", validate(werner(0.0)).empty());
    check("werner(0.5) concurrence = 0.25", std::abs(concurrence(werner(0.5)) - 0.25) < 1e-9);
    check("werner(0.5) negativity = 0.125", std::abs(negativity(werner(0.5)) - 0.125) < 1e-9);
    check("product state concurrence = 0",
          concurrence(product_state({0, 0, 1}, {1, 0, 0})) < 1e-12);
    check("separable mixture is PPT", negativity(separable_mixture(7)) <= 1e-10);
    check("hs sample validates at 1e-12", validate(gen_hs_random(123)).empty());

    const Generator zz = pauli_product_generator(Axis::Z, Axis::Z);
    check("qfi(I/4) = 0", qfi(DensityMatrix{0.25 * Mat4::Identity()}, zz) < 1e-12);
    const DensityMatrix plus = product_state({1, 0, 0}, {1, 0, 0});
    check("qfi(|++>, zz) = 4", std::abs(qfi(plus, zz) - 4.0) < 1e-9);

    for (ChannelKind k : {ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping}) {
        bool ok = true;
        for (double g : {0.0, 0.25, 0.5}) {
            try {
                channel_kraus_operators(k, g);
            } catch (const Error&) {
                ok = false;
            }
        }
        check("kraus completeness: " + channel_name(k), ok);
    }
    check("amplitude_damping(g=0) is identity",
          max_abs<4>(amplitude_damping(bell, 0.0).mat - bell.mat) < 1e-15);
    check("depolarizing(g=0.2) of bell = werner(0.8)",
          max_abs<4>(depolarizing(bell, 0.2).mat - werner(0.8).mat) < 1e-15);
    check("depolarizing_correction fixed point",
          std::abs(depolarizing_correction(0.3, 0.4, 0.3) - 0.3) < 1e-12);

    check("fd_bin_width example",
          [] {
              std::vector<double> v;
              CounterRng rng(1);
              for (int i = 0; i < 1000; ++i) v.push_back(rng.uniform());
              const double w = fd_bin_width(v);
              return w > 0.0 && w < 1.0;
          }());
    check("AIC identity: rss = n, p = 2 gives 4", [] {
        std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
        const FitResult f = fit_model(ModelKind::Linear, x, y);
        return std::abs(f.aic - (4.0 * std::log(std::max(f.rss / 4.0, 1e-300)) + 4.0)) < 1e-9 && f.r2 > 1.0 - 1e-12;
    }());
    check("pearson(y=x) = 1", [] {
        std::vector<double> x{1, 2, 3, 4}, y{1, 2, 3, 4};
        return std::abs(pearson(x, y) - 1.0) < 1e-12;
    }());

    std::cout << (failures == 0 ? "verify: all checks passed\n"
                                : "verify: " + std::to_string(failures) + " checks failed\n");
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qmetro: two-qubit entanglement vs maximized quantum Fisher information laboratory"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string output = cfg.output_dir.string();
    std::string ensemble_path;
    std::string config_path;
    int baseline_n = 1000;

    auto* c_gen = app.add_subcommand("generate", "generate the state ensemble with measures and MQFI");
    add_common_options(c_gen, cfg, output, config_path);

    auto* c_ana = app.add_subcommand("analyze", "statistical analysis of an existing ensemble CSV");
    add_common_options(c_ana, cfg, output, config_path);
    c_ana->add_option("--input", ensemble_path, "ensemble CSV (default <output>/ensemble.csv)");

    auto* c_swp = app.add_subcommand("sweep", "decoherence-channel parameter sweeps");
    add_common_options(c_swp, cfg, output, config_path);

    auto* c_base = app.add_subcommand("baseline", "direct MQFI over certified separable states");
    add_common_options(c_base, cfg, output, config_path);
    c_base->add_option("--n", baseline_n, "number of separable mixtures");

    auto* c_rep = app.add_subcommand("report", "full pipeline: generate, analyze, sweep, baseline");
    add_common_options(c_rep, cfg, output, config_path);
    c_rep->add_option("--n", baseline_n, "separable baseline sample size");

    auto* c_ver = app.add_subcommand("verify", "run the quick invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (!config_path.empty()) {
            CLI::App* active = c_gen->parsed() ? c_gen
                               : c_ana->parsed() ? c_ana
                               : c_swp->parsed() ? c_swp
                               : c_base->parsed() ? c_base
                                                  : c_rep;
            apply_config_file(config_path, active, cfg, output, baseline_n);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;  // malformed config is a usage error
    }

    if (cfg.workers == 0) {
        if (const char* env = std::getenv("QMETRO_WORKERS")) {
            cfg.workers = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
        }
    }
    cfg.output_dir = output;

    try {
        if (c_ver->parsed()) return run_verify();
        if (c_gen->parsed()) {
            const EnsembleRun run = run_ensemble(cfg);
            std::cout << "wrote " << run.records.size() << " records to " << run.csv_path.string() << "\n";
            return 0;
        }
        if (c_ana->parsed()) {
            const std::filesystem::path in =
                ensemble_path.empty() ? cfg.output_dir / "ensemble.csv" : std::filesystem::path(ensemble_path);
            run_analysis(in, cfg);
            std::cout << "analysis written to " << (cfg.output_dir / "analysis").string() << "\n";
            return 0;
        }
        if (c_swp->parsed()) {
            run_sweeps(cfg);
            std::cout << "sweeps written to " << (cfg.output_dir / "sweeps").string() << "\n";
            return 0;
        }
        if (c_base->parsed()) {
            const SeparableBaseline b = run_separable_baseline(cfg, baseline_n);
            std::cout << "separable baseline: mean MQFI/4 = " << b.mean << ", median = " << b.median
                      << ", std = " << b.std_dev << "\n";
            return 0;
        }
        if (c_rep->parsed()) {
            const EnsembleRun run = run_ensemble(cfg);
            std::cout << "ensemble: " << run.records.size() << " records\n";
            run_analysis(run.csv_path, cfg);
            std::cout << "analysis done\n";
            run_sweeps(cfg);
            std::cout << "sweeps done\n";
            run_separable_baseline(cfg, baseline_n);
            std::cout << "baseline done; report bundle in " << cfg.output_dir.string() << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
