#include "qmetro/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "qmetro/rng.hpp"

namespace qmetro {

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw DegenerateDataError("percentile: empty input");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - std::floor(h);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double fd_bin_width(const std::vector<double>& values) {
    if (values.size() < 4) throw DegenerateDataError("fd_bin_width: need n >= 4");
    const double iqr = percentile(values, 75.0) - percentile(values, 25.0);
    if (iqr <= 0.0) throw DegenerateDataError("fd_bin_width: IQR is zero");
    return 2.0 * iqr * std::pow(static_cast<double>(values.size()), -1.0 / 3.0);
}

namespace {

struct RawBin {
    double lo, hi;
    std::vector<double> ys;
};

BinnedSeries::Bin summarize(const RawBin& rb) {
    BinnedSeries::Bin b;
    b.lo = rb.lo;
    b.hi = rb.hi;
    b.center = 0.5 * (rb.lo + rb.hi);
    b.count = rb.ys.size();
    const double n = static_cast<double>(rb.ys.size());
    b.mean = std::accumulate(rb.ys.begin(), rb.ys.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : rb.ys) ss += (v - b.mean) * (v - b.mean);
    b.std_dev = rb.ys.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    b.standard_error = b.std_dev / std::sqrt(n);
    b.median = percentile(rb.ys, 50.0);
    b.ci_low = b.mean - 1.96 * b.standard_error;
    b.ci_high = b.mean + 1.96 * b.standard_error;
    return b;
}

}  // namespace

BinnedSeries bin_series(const std::vector<double>& x, const std::vector<double>& y, int n_bins,
                        std::size_t min_occupancy, UnderfullPolicy policy) {
    if (x.size() != y.size()) throw DegenerateDataError("bin_series: length mismatch");
    if (n_bins < 2) throw DegenerateDataError("bin_series: n_bins must be >= 2");
    if (x.empty()) throw DegenerateDataError("bin_series: empty input");

    const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *mn_it, hi = *mx_it;
    if (hi - lo <= 0.0) throw DegenerateDataError("bin_series: degenerate x range");

    BinnedSeries out;
    const double width = (hi - lo) / n_bins;
    out.edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int b = 0; b <= n_bins; ++b) out.edges[static_cast<std::size_t>(b)] = lo + width * b;

    std::vector<RawBin> raw(static_cast<std::size_t>(n_bins));
    for (int b = 0; b < n_bins; ++b) {
        raw[static_cast<std::size_t>(b)].lo = out.edges[static_cast<std::size_t>(b)];
        raw[static_cast<std::size_t>(b)].hi = out.edges[static_cast<std::size_t>(b) + 1];
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto b = static_cast<std::size_t>(std::clamp(
            static_cast<int>((x[i] - lo) / width), 0, n_bins - 1));
        raw[b].ys.push_back(y[i]);
    }

    if (policy == UnderfullPolicy::Merge) {
        // merge underfull bins into the left neighbor (the leftmost one merges right)
        bool changed = true;
        while (changed && raw.size() > 1) {
            changed = false;
            for (std::size_t b = 0; b < raw.size(); ++b) {
                if (raw[b].ys.size() >= min_occupancy) continue;
                const std::size_t target = b > 0 ? b - 1 : b + 1;
                auto& dst = raw[target];
                dst.ys.insert(dst.ys.end(), raw[b].ys.begin(), raw[b].ys.end());
                dst.lo = std::min(dst.lo, raw[b].lo);
                dst.hi = std::max(dst.hi, raw[b].hi);
                raw.erase(raw.begin() + static_cast<std::ptrdiff_t>(b));
                ++out.n_merged;
                changed = true;
                break;
            }
        }
        for (const auto& rb : raw)
            if (!rb.ys.empty()) out.bins.push_back(summarize(rb));
    } else {
        for (const auto& rb : raw) {
            if (rb.ys.size() >= min_occupancy) {
                out.bins.push_back(summarize(rb));
            } else {
                ++out.n_dropped;
            }
        }
    }
    return out;
}

int model_arity(ModelKind m) {
    switch (m) {
        case ModelKind::Linear: return 2;
        case ModelKind::Quadratic: return 3;
        case ModelKind::Cubic: return 4;
        case ModelKind::ExponentialSaturation: return 3;
        case ModelKind::Logistic: return 4;
        case ModelKind::MichaelisMenten: return 3;
    }
    return 0;
}

std::string model_name(ModelKind m) {
    switch (m) {
        case ModelKind::Linear: return "linear";
        case ModelKind::Quadratic: return "quadratic";
        case ModelKind::Cubic: return "cubic";
        case ModelKind::ExponentialSaturation: return "exponential_saturation";
        case ModelKind::Logistic: return "logistic";
        case ModelKind::MichaelisMenten: return "michaelis_menten";
    }
    return "?";
}

ModelKind model_by_name(const std::string& name) {
    for (ModelKind m : {ModelKind::Linear, ModelKind::Quadratic, ModelKind::Cubic,
                        ModelKind::ExponentialSaturation, ModelKind::Logistic, ModelKind::MichaelisMenten}) {
        if (model_name(m) == name) return m;
    }
    throw RangeViolation("unknown model '" + name + "'");
}

double model_eval(ModelKind m, const std::vector<double>& p, double x) {
    switch (m) {
        case ModelKind::Linear: return p[0] + p[1] * x;
        case ModelKind::Quadratic: return p[0] + x * (p[1] + x * p[2]);
        case ModelKind::Cubic: return p[0] + x * (p[1] + x * (p[2] + x * p[3]));
        case ModelKind::ExponentialSaturation: return p[0] * (1.0 - std::exp(-p[1] * x)) + p[2];
        case ModelKind::Logistic: return p[0] / (1.0 + std::exp(-p[1] * (x - p[2]))) + p[3];
        case ModelKind::MichaelisMenten: return p[0] * x / (p[1] + x) + p[2];
    }
    return 0.0;
}

namespace {

bool is_polynomial(ModelKind m) {
    return m == ModelKind::Linear || m == ModelKind::Quadratic || m == ModelKind::Cubic;
}

void model_jacobian_row(ModelKind m, const std::vector<double>& p, double x, double* row) {
    switch (m) {
        case ModelKind::Linear:
            row[0] = 1.0;
            row[1] = x;
            return;
        case ModelKind::Quadratic:
            row[0] = 1.0;
            row[1] = x;
            row[2] = x * x;
            return;
        case ModelKind::Cubic:
            row[0] = 1.0;
            row[1] = x;
            row[2] = x * x;
            row[3] = x * x * x;
            return;
        case ModelKind::ExponentialSaturation: {
            const double e = std::exp(-p[1] * x);
            row[0] = 1.0 - e;
            row[1] = p[0] * x * e;
            row[2] = 1.0;
            return;
        }
        case ModelKind::Logistic: {
            const double s = 1.0 / (1.0 + std::exp(-p[1] * (x - p[2])));
            row[0] = s;
            row[1] = p[0] * s * (1.0 - s) * (x - p[2]);
            row[2] = -p[0] * s * (1.0 - s) * p[1];
            row[3] = 1.0;
            return;
        }
        case ModelKind::MichaelisMenten: {
            const double d = p[1] + x;
            row[0] = x / d;
            row[1] = -p[0] * x / (d * d);
            row[2] = 1.0;
            return;
        }
    }
}

std::vector<double> initial_guess(ModelKind m, const std::vector<double>& x, const std::vector<double>& y) {
    const double ymin = *std::min_element(y.begin(), y.end());
    const double ymax = *std::max_element(y.begin(), y.end());
    const double xmin = *std::min_element(x.begin(), x.end());
    const double xmax = *std::max_element(x.begin(), x.end());
    const double yrange = std::max(ymax - ymin, 1e-12);
    const double xrange = std::max(xmax - xmin, 1e-12);
    switch (m) {
        case ModelKind::ExponentialSaturation: return {yrange, 2.0, ymin};
        case ModelKind::Logistic: return {yrange, 4.0 / xrange, percentile(std::vector<double>(x), 50.0), ymin};
        case ModelKind::MichaelisMenten: return {yrange, percentile(std::vector<double>(x), 50.0), ymin};
        default: return {};
    }
}

}  // namespace

std::vector<double> model_jacobian(ModelKind m, const std::vector<double>& params, double x) {
    std::vector<double> row(static_cast<std::size_t>(model_arity(m)));
    model_jacobian_row(m, params, x, row.data());
    return row;
}

namespace {

double weighted_rss(ModelKind m, const std::vector<double>& p, const std::vector<double>& x,
                    const std::vector<double>& y, const std::vector<double>& w) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - model_eval(m, p, x[i]);
        rss += w[i] * r * r;
    }
    return rss;
}

FitResult finalize(ModelKind m, std::vector<double> params, const std::vector<double>& x,
                   const std::vector<double>& y, const std::vector<double>& w, bool converged) {
    FitResult out;
    out.model = m;
    out.params = std::move(params);
    out.converged = converged;
    const auto n = static_cast<double>(x.size());
    double wsum = 0.0, wy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        wsum += w[i];
        wy += w[i] * y[i];
    }
    const double ybar = wy / wsum;
    double rss = 0.0, tss = 0.0;
    out.residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - model_eval(m, out.params, x[i]);
        out.residuals[i] = r;
        rss += w[i] * r * r;
        tss += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    out.rss = rss;
    out.r2 = tss > 0.0 ? 1.0 - rss / tss : (rss <= 1e-30 ? 1.0 : 0.0);
    const double p = model_arity(m);
    out.aic = n * std::log(std::max(rss / n, 1e-300)) + 2.0 * p;
    out.bic = n * std::log(std::max(rss / n, 1e-300)) + p * std::log(n);
    return out;
}

}  // namespace

FitResult fit_model(ModelKind model, const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>* weights) {
    const int arity = model_arity(model);
    if (x.size() != y.size()) throw DegenerateDataError("fit_model: length mismatch");
    // n == arity determines the parameters exactly (degree-d interpolation)
    if (static_cast<int>(x.size()) < arity) throw DegenerateDataError("fit_model: too few points");
    std::vector<double> w(x.size(), 1.0);
    if (weights != nullptr) {
        if (weights->size() != x.size()) throw DegenerateDataError("fit_model: weight length mismatch");
        w = *weights;
    }

    if (is_polynomial(model)) {
        const int deg = arity - 1;
        Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), arity);
        Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double sw = std::sqrt(w[i]);
            double xp = 1.0;
            for (int c = 0; c <= deg; ++c) {
                a(static_cast<Eigen::Index>(i), c) = sw * xp;
                xp *= x[i];
            }
            b(static_cast<Eigen::Index>(i)) = sw * y[i];
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        if (qr.rank() < arity) throw SingularDesignError("fit_model: singular design matrix");
        Eigen::VectorXd sol = qr.solve(b);
        std::vector<double> params(sol.data(), sol.data() + arity);
        return finalize(model, std::move(params), x, y, w, true);
    }

    // Levenberg-Marquardt
    std::vector<double> p = initial_guess(model, x, y);
    double rss = weighted_rss(model, p, x, y, w);
    double lambda = 1e-3;
    bool converged = false;
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd jac(n, arity);
    Eigen::VectorXd res(n);
    for (int it = 0; it < 500; ++it) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double sw = std::sqrt(w[i]);
            double row[4];
            model_jacobian_row(model, p, x[i], row);
            for (int c = 0; c < arity; ++c) jac(static_cast<Eigen::Index>(i), c) = sw * row[c];
            res(static_cast<Eigen::Index>(i)) = sw * (y[i] - model_eval(model, p, x[i]));
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * res;
        bool stepped = false;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::MatrixXd damped = jtj;
            for (int c = 0; c < arity; ++c) damped(c, c) += lambda * std::max(jtj(c, c), 1e-12);
            const Eigen::VectorXd delta = damped.ldlt().solve(jtr);
            std::vector<double> cand = p;
            for (int c = 0; c < arity; ++c) cand[static_cast<std::size_t>(c)] += delta(c);
            const double rss_cand = weighted_rss(model, cand, x, y, w);
            if (std::isfinite(rss_cand) && rss_cand < rss) {
                const double rel = (rss - rss_cand) / std::max(rss, 1e-300);
                p = cand;
                rss = rss_cand;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel < 1e-10) converged = true;
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e14) break;
        }
        if (converged) break;
        if (!stepped) {
            // no further improvement possible at any damping: a stationary point
            converged = true;
            break;
        }
    }
    FitResult out = finalize(model, p, x, y, w, converged);
    if (!converged) {
        throw FitConvergenceFailure("fit_model: " + model_name(model) + " did not converge", out);
    }
    return out;
}

double kfold_cv(ModelKind model, const std::vector<double>& x, const std::vector<double>& y, int k,
                std::uint64_t fold_seed) {
    if (k < 2) throw DegenerateDataError("kfold_cv: k must be >= 2");
    if (x.size() < 2 * static_cast<std::size_t>(k)) throw DegenerateDataError("kfold_cv: n must be >= 2k");
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    CounterRng rng(fold_seed, 0);
    rng.shuffle(idx);

    double rss_sum = 0.0, tss_sum = 0.0;
    for (int fold = 0; fold < k; ++fold) {
        std::vector<double> xtr, ytr, xte, yte;
        for (std::size_t r = 0; r < idx.size(); ++r) {
            if (static_cast<int>(r % static_cast<std::size_t>(k)) == fold) {
                xte.push_back(x[idx[r]]);
                yte.push_back(y[idx[r]]);
            } else {
                xtr.push_back(x[idx[r]]);
                ytr.push_back(y[idx[r]]);
            }
        }
        FitResult fit;
        try {
            fit = fit_model(model, xtr, ytr);
        } catch (const FitConvergenceFailure& e) {
            fit = e.best_so_far;
        }
        const double train_mean = std::accumulate(ytr.begin(), ytr.end(), 0.0) / static_cast<double>(ytr.size());
        for (std::size_t i = 0; i < xte.size(); ++i) {
            const double r = yte[i] - model_eval(model, fit.params, xte[i]);
            rss_sum += r * r;
            tss_sum += (yte[i] - train_mean) * (yte[i] - train_mean);
        }
    }
    if (tss_sum <= 0.0) throw DegenerateDataError("kfold_cv: zero out-of-fold variance");
    return 1.0 - rss_sum / tss_sum;
}

double binned_kfold_cv(ModelKind model, const std::vector<double>& x, const std::vector<double>& y, int k,
                       int n_bins, std::size_t min_occupancy, std::uint64_t fold_seed) {
    if (k < 2) throw DegenerateDataError("binned_kfold_cv: k must be >= 2");
    if (x.size() < 2 * static_cast<std::size_t>(k)) throw DegenerateDataError("binned_kfold_cv: n must be >= 2k");
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    CounterRng rng(fold_seed, 2);
    rng.shuffle(idx);

    double rss_sum = 0.0, tss_sum = 0.0;
    for (int fold = 0; fold < k; ++fold) {
        std::vector<double> xtr, ytr, xte, yte;
        for (std::size_t r = 0; r < idx.size(); ++r) {
            if (static_cast<int>(r % static_cast<std::size_t>(k)) == fold) {
                xte.push_back(x[idx[r]]);
                yte.push_back(y[idx[r]]);
            } else {
                xtr.push_back(x[idx[r]]);
                ytr.push_back(y[idx[r]]);
            }
        }
        const BinnedSeries train_bins = bin_series(xtr, ytr, n_bins, min_occupancy);
        std::vector<double> bx, by, bw;
        for (const auto& b : train_bins.bins) {
            bx.push_back(b.center);
            by.push_back(b.mean);
            bw.push_back(b.standard_error > 0.0 ? 1.0 / (b.standard_error * b.standard_error) : 1.0);
        }
        FitResult fit;
        try {
            fit = fit_model(model, bx, by, &bw);
        } catch (const FitConvergenceFailure& e) {
            fit = e.best_so_far;
        }
        const double train_mean = std::accumulate(by.begin(), by.end(), 0.0) / static_cast<double>(by.size());

        // held-out points grouped by the training bins' edges
        const std::size_t ho_min = std::max<std::size_t>(min_occupancy / static_cast<std::size_t>(k), 3);
        for (const auto& b : train_bins.bins) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < xte.size(); ++i) {
                if (xte[i] >= b.lo && (xte[i] < b.hi || (xte[i] == b.hi && &b == &train_bins.bins.back()))) {
                    sum += yte[i];
                    ++count;
                }
            }
            if (count < ho_min) continue;
            const double ho_mean = sum / static_cast<double>(count);
            const double pred = model_eval(model, fit.params, b.center);
            rss_sum += (ho_mean - pred) * (ho_mean - pred);
            tss_sum += (ho_mean - train_mean) * (ho_mean - train_mean);
        }
    }
    if (tss_sum <= 0.0) throw DegenerateDataError("binned_kfold_cv: zero out-of-fold variance");
    return 1.0 - rss_sum / tss_sum;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(std::size_t n,
                                                                               double test_fraction,
                                                                               std::uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0) {
        throw RangeViolation("train_test_split: test_fraction must be in (0,1)");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    CounterRng rng(seed, 1);
    rng.shuffle(idx);
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    std::vector<std::size_t> test(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return {train, test};
}

BootstrapSummary bootstrap_fit(ModelKind model, const std::vector<double>& x, const std::vector<double>& y,
                               int n_resamples, std::uint64_t seed, const std::optional<RebinDirective>& rebin) {
    if (n_resamples < 100) throw RangeViolation("bootstrap_fit: n_resamples must be >= 100");
    BootstrapSummary out;
    out.model = model;
    out.n_resamples = n_resamples;
    const std::size_t n = x.size();

    for (int r = 0; r < n_resamples; ++r) {
        CounterRng rng(seed, static_cast<std::uint64_t>(r) + 0xB007ULL);
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform_index(n));
            xs[i] = x[j];
            ys[i] = y[j];
        }
        try {
            FitResult fit;
            if (rebin) {
                int nb = rebin->n_bins;
                if (nb == 0) {
                    const double w = fd_bin_width(xs);
                    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
                    nb = std::max(2, static_cast<int>(std::lround((*mx - *mn) / w)));
                }
                const BinnedSeries bs = bin_series(xs, ys, nb, rebin->min_occupancy);
                std::vector<double> bx, by, bw;
                for (const auto& b : bs.bins) {
                    bx.push_back(b.center);
                    by.push_back(b.mean);
                    bw.push_back(b.standard_error > 0.0 ? 1.0 / (b.standard_error * b.standard_error) : 1.0);
                }
                fit = fit_model(model, bx, by, rebin->weighted ? &bw : nullptr);
            } else {
                fit = fit_model(model, xs, ys);
            }
            out.samples.push_back(fit.params);
        } catch (const Error&) {
            // non-converged resample: dropped
        }
    }

    out.n_kept = static_cast<int>(out.samples.size());
    if (out.n_kept < n_resamples - n_resamples / 10) {
        throw ConvergenceFailure("bootstrap_fit: " + std::to_string(n_resamples - out.n_kept) + " of " +
                                 std::to_string(n_resamples) + " resamples failed (> 10%)");
    }

    const auto arity = static_cast<std::size_t>(model_arity(model));
    out.params.resize(arity);
    for (std::size_t c = 0; c < arity; ++c) {
        std::vector<double> v;
        v.reserve(out.samples.size());
        for (const auto& s : out.samples) v.push_back(s[c]);
        auto& ps = out.params[c];
        ps.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double t : v) ss += (t - ps.mean) * (t - ps.mean);
        ps.std_dev = v.size() > 1 ? std::sqrt(ss / (static_cast<double>(v.size()) - 1.0)) : 0.0;
        ps.ci_low = percentile(v, 2.5);
        ps.ci_high = percentile(v, 97.5);
    }
    return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DegenerateDataError("pearson: need equal lengths >= 2");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw DegenerateDataError("pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

BoundarySeries boundary_extract(const std::vector<double>& x, const std::vector<double>& y, int n_bins,
                                std::size_t min_occupancy) {
    if (x.size() != y.size()) throw DegenerateDataError("boundary_extract: length mismatch");
    if (n_bins < 2) throw DegenerateDataError("boundary_extract: n_bins must be >= 2");
    const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *mn_it, hi = *mx_it;
    if (hi - lo <= 0.0) throw DegenerateDataError("boundary_extract: degenerate x range");
    const double width = (hi - lo) / n_bins;

    std::vector<std::vector<double>> per_bin(static_cast<std::size_t>(n_bins));
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto b = static_cast<std::size_t>(std::clamp(static_cast<int>((x[i] - lo) / width), 0, n_bins - 1));
        per_bin[b].push_back(y[i]);
    }
    BoundarySeries out;
    for (int b = 0; b < n_bins; ++b) {
        const auto& ys = per_bin[static_cast<std::size_t>(b)];
        if (ys.size() < std::max<std::size_t>(min_occupancy, 1)) continue;
        const double center = lo + width * (b + 0.5);
        out.upper.emplace_back(center, *std::max_element(ys.begin(), ys.end()));
        out.lower.emplace_back(center, *std::min_element(ys.begin(), ys.end()));
    }
    return out;
}

}  // namespace qmetro
