#include "propmc/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "propmc/errors.hpp"
#include "propmc/parallel.hpp"

namespace propmc {

namespace {

double int_pow(double base, int r) {
    double out = 1.0;
    for (int k = 0; k < r; ++k) out *= base;
    return out;
}

// Type-7 (linear interpolation) quantile of a sorted vector.
double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

MomentEstimate moment_of_values(std::span<const double> values, int r, int n_boot,
                                std::uint64_t seed, int threads) {
    if (r < 1) throw std::invalid_argument("moment: order r must be >= 1, got " + std::to_string(r));
    const std::size_t m = values.size();
    if (m < 2) throw std::invalid_argument("moment: need at least 2 samples");
    if (n_boot < 1) throw std::invalid_argument("moment: n_boot must be >= 1");

    std::vector<double> powers(m);
    for (std::size_t i = 0; i < m; ++i) {
        powers[i] = int_pow(values[i], r);
        if (!std::isfinite(powers[i]))
            throw NumericalError("scaling", "moment: overflow in value^" + std::to_string(r) +
                                                " at sample " + std::to_string(i));
    }

    double mean = 0.0;
    for (const double p : powers) mean += p;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (const double p : powers) var += (p - mean) * (p - mean);
    var /= static_cast<double>(m - 1);

    // Key the resampling streams off a derived seed so they never collide with
    // the sample-generation streams of the same run.
    const std::uint64_t boot_seed = mix_seed(seed, 0x626f6f74ull /* "boot" */);
    std::vector<double> boot_means(static_cast<std::size_t>(n_boot));
    parallel_for(boot_means.size(), threads, [&](std::size_t b) {
        RngStream stream(boot_seed, b);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += powers[stream.next_below(m)];
        boot_means[b] = acc / static_cast<double>(m);
    });
    std::sort(boot_means.begin(), boot_means.end());

    MomentEstimate est;
    est.r = r;
    est.mean = mean;
    est.std_error = std::sqrt(var / static_cast<double>(m));
    est.ci_lo = sorted_quantile(boot_means, 0.025);
    est.ci_hi = sorted_quantile(boot_means, 0.975);
    est.n_samples = static_cast<int>(m);
    return est;
}

MomentEstimate estimate_moment(const GammaEnsemble& ensemble, int r, int n_boot,
                               std::uint64_t seed, int threads) {
    if (ensemble.size() < 100)
        throw std::invalid_argument("estimate_moment: ensemble must hold at least 100 samples");
    if (n_boot < 200) throw std::invalid_argument("estimate_moment: n_boot must be >= 200");
    const std::vector<double> v = ensemble.values();
    return moment_of_values(v, r, n_boot, seed, threads);
}

ScalingFit fit_loglog(const std::vector<LogLogPoint>& points) {
    ScalingFit fit;
    std::vector<FitPoint> usable;
    std::vector<double> sigmas;
    for (const auto& p : points) {
        if (!(p.x > 0.0))
            throw std::invalid_argument("fit: abscissa must be positive");
        if (p.y == 0.0 || (p.ci_lo <= 0.0 && p.ci_hi >= 0.0)) {
            ++fit.n_excluded;
            fit.warnings.push_back("fit: excluded " + (p.label.empty() ? "point" : p.label) +
                                   ": magnitude indistinguishable from 0");
            continue;
        }
        const double ay = std::fabs(p.y);
        usable.push_back({std::log(p.x), std::log(ay), 0.0});
        sigmas.push_back(p.sigma / ay);  // delta method on log|y|
    }
    if (usable.size() < 3)
        throw NumericalError("scaling", "fit: fewer than 3 usable points (" +
                                            std::to_string(usable.size()) + " survived)");

    // Weights: inverse variance; if every point is exact the fit is unweighted.
    const bool all_exact =
        std::all_of(sigmas.begin(), sigmas.end(), [](double s) { return s == 0.0; });
    double min_pos = HUGE_VAL;
    for (const double s : sigmas)
        if (s > 0.0) min_pos = std::min(min_pos, s);
    for (std::size_t i = 0; i < usable.size(); ++i) {
        if (all_exact)
            usable[i].weight = 1.0;
        else {
            const double s = sigmas[i] > 0.0 ? sigmas[i] : min_pos * 1e-3;
            usable[i].weight = 1.0 / (s * s);
        }
    }

    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : usable) {
        sw += p.weight;
        sx += p.weight * p.log_x;
        sy += p.weight * p.log_y;
        sxx += p.weight * p.log_x * p.log_x;
        sxy += p.weight * p.log_x * p.log_y;
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 0.0))
        throw NumericalError("scaling", "fit: degenerate abscissas (need >= 3 distinct)");
    fit.slope = (sw * sxy - sx * sy) / det;
    fit.intercept = (sxx * sy - sx * sxy) / det;
    fit.slope_stderr = all_exact ? 0.0 : std::sqrt(sw / det);

    double ss_res = 0, ss_tot = 0;
    const double y_bar = sy / sw;
    for (const auto& p : usable) {
        const double pred = fit.intercept + fit.slope * p.log_x;
        ss_res += p.weight * (p.log_y - pred) * (p.log_y - pred);
        ss_tot += p.weight * (p.log_y - y_bar) * (p.log_y - y_bar);
    }
    fit.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    fit.points = std::move(usable);
    return fit;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, MomentEstimate>>& moments) {
    if (moments.size() < 3)
        throw std::invalid_argument("fit_scaling: need at least 3 tau values");
    const int r = moments.front().second.r;
    std::vector<LogLogPoint> pts;
    pts.reserve(moments.size());
    for (const auto& [tau, est] : moments) {
        if (est.r != r)
            throw std::invalid_argument("fit_scaling: mixed moment orders in input");
        if (!(tau > 0.0)) throw std::invalid_argument("fit_scaling: tau must be positive");
        for (const auto& [tau2, est2] : moments) {
            (void)est2;
            if (&tau2 != &tau && tau2 == tau)
                throw std::invalid_argument("fit_scaling: duplicate tau value " +
                                            std::to_string(tau));
        }
        pts.push_back({tau, est.mean, est.std_error, est.ci_lo, est.ci_hi,
                       "tau=" + std::to_string(tau)});
    }
    return fit_loglog(pts);
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    const double pi = 3.14159265358979323846;
    if (lambda < 1.18) {
        // Complement of the theta-series form of the CDF: accurate where the
        // direct alternating series would need many terms.
        const double t = std::exp(-pi * pi / (8.0 * lambda * lambda));
        const double cdf = std::sqrt(2.0 * pi) / lambda *
                           (t + std::pow(t, 9.0) + std::pow(t, 25.0) + std::pow(t, 49.0));
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double q = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        q += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(2.0 * q, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> sample1, std::vector<double> sample2) {
    if (sample1.size() < 2 || sample2.size() < 2)
        throw std::invalid_argument("ks_two_sample: need at least 2 samples per side");
    std::sort(sample1.begin(), sample1.end());
    std::sort(sample2.begin(), sample2.end());
    const std::size_t m1 = sample1.size();
    const std::size_t m2 = sample2.size();

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < m1 && j < m2) {
        const double x1 = sample1[i];
        const double x2 = sample2[j];
        const double x = std::min(x1, x2);
        while (i < m1 && sample1[i] <= x) ++i;
        while (j < m2 && sample2[j] <= x) ++j;
        const double f1 = static_cast<double>(i) / static_cast<double>(m1);
        const double f2 = static_cast<double>(j) / static_cast<double>(m2);
        d = std::max(d, std::fabs(f1 - f2));
    }

    const double ne = static_cast<double>(m1) * static_cast<double>(m2) /
                      static_cast<double>(m1 + m2);
    const double sqrt_ne = std::sqrt(ne);
    const double lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;

    KsResult res;
    res.statistic = d;
    res.p_value = kolmogorov_q(lambda);
    res.m1 = static_cast<int>(m1);
    res.m2 = static_cast<int>(m2);
    return res;
}

KsResult ks_scaling_test(const GammaEnsemble& ens1, const GammaEnsemble& ens2, double c,
                         double gamma) {
    if (!(c > 0.0)) throw std::invalid_argument("ks_scaling_test: c must be positive");
    const auto& c1 = ens1.config;
    const auto& c2 = ens2.config;
    if (c1.constant || c2.constant)
        throw std::invalid_argument("ks_scaling_test: constant ensembles are not comparable");
    if (c1.cov.form != CovForm::PowerLaw || c2.cov.form != CovForm::PowerLaw)
        throw std::invalid_argument("ks_scaling_test: both ensembles must use the PowerLaw form");
    if (c1.cov.epsilon != 0.0 || c2.cov.epsilon != 0.0)
        throw std::invalid_argument(
            "ks_scaling_test: exact self-similarity requires epsilon = 0 on both sides");
    if (c1.cov.gamma != c2.cov.gamma || c1.cov.gamma != gamma)
        throw std::invalid_argument("ks_scaling_test: gamma mismatch between ensembles");
    if (c1.grid.n_steps != c2.grid.n_steps)
        throw std::invalid_argument("ks_scaling_test: step counts must match");
    const double tau_ratio = c2.grid.tau / c1.grid.tau;
    if (std::fabs(tau_ratio - c) > 1e-9 * c)
        throw std::invalid_argument("ks_scaling_test: ens2 tau must equal c * ens1 tau");

    const double scale = std::pow(c, 1.0 - gamma);
    std::vector<double> scaled = ens1.values();
    for (double& v : scaled) v *= scale;
    return ks_two_sample(std::move(scaled), ens2.values());
}

double gaussian_even_moment(int r, double tau) {
    double dfact = 1.0;
    for (int k = 2 * r - 1; k > 1; k -= 2) dfact *= k;
    return dfact * int_pow(tau, r);
}

MomentEstimate even_moment_check(const TimeGrid& grid, int r, int n_samples, std::uint64_t seed,
                                 int n_boot, int threads) {
    if (r < 1) throw std::invalid_argument("even_moment_check: r must be >= 1");
    if (n_samples < 100)
        throw std::invalid_argument("even_moment_check: need at least 100 samples");
    std::vector<double> endpoints(static_cast<std::size_t>(n_samples));
    parallel_for(endpoints.size(), threads, [&](std::size_t i) {
        RngStream stream(seed, i);
        endpoints[i] = sample_path(grid, stream).endpoint();
    });
    MomentEstimate est = moment_of_values(endpoints, 2 * r, n_boot, seed, threads);
    est.r = r;  // report in the C_r tau^r convention
    return est;
}

}  // namespace propmc
