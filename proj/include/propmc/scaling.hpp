#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "propmc/gamma.hpp"
#include "propmc/paths.hpp"

namespace propmc {

struct MomentEstimate {
    int r = 1;               // moment order as requested by the caller
    double mean = 0.0;       // plug-in sample mean of the r-th power
    double std_error = 0.0;  // sample standard deviation / sqrt(M)
    double ci_lo = 0.0;      // 95% percentile-bootstrap interval
    double ci_hi = 0.0;
    int n_samples = 0;
};

struct FitPoint {
    double log_x = 0.0;
    double log_y = 0.0;
    double weight = 0.0;
};

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r2 = 0.0;
    std::vector<FitPoint> points;  // what actually entered the regression
    int n_excluded = 0;
    std::vector<std::string> warnings;
};

struct KsResult {
    double statistic = 0.0;  // sup-distance of the empirical CDFs
    double p_value = 1.0;
    int m1 = 0;
    int m2 = 0;
};

// Mean of v^r with standard error and a percentile bootstrap CI (n_boot
// resamples drawn from streams keyed by (seed, resample index): the interval
// is deterministic and independent of scheduling).  Integer powers are formed
// by repeated multiplication; a non-finite power aborts with a diagnostic.
MomentEstimate moment_of_values(std::span<const double> values, int r, int n_boot,
                                std::uint64_t seed, int threads = 0);

// Spec-facing wrapper over a Gamma ensemble.  Requires M >= 100 and
// n_boot >= 200 so the error bars mean something.
MomentEstimate estimate_moment(const GammaEnsemble& ensemble, int r, int n_boot,
                               std::uint64_t seed, int threads = 0);

// One observation for the generic log-log fit: y > 0 at abscissa x > 0 with a
// symmetric absolute error sigma and an exclusion interval [ci_lo, ci_hi]
// (points whose interval touches 0 carry no usable log-magnitude).
struct LogLogPoint {
    double x = 0.0;
    double y = 0.0;
    double sigma = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::string label;
};

// Weighted least squares of log|y| on log x, weights 1/Var[log y] by the
// delta method (sigma/|y|)^2.  Exact-input points (sigma = 0) fit unweighted
// when all points are exact, and dominate otherwise.  Fewer than 3 surviving
// points is a failure.
ScalingFit fit_loglog(const std::vector<LogLogPoint>& points);

// Moment-vs-tau scaling fit.  All entries must carry the same moment order;
// at least 3 distinct tau values must survive the sign-ambiguity exclusion.
ScalingFit fit_scaling(const std::vector<std::pair<double, MomentEstimate>>& moments);

// Survival function of the Kolmogorov distribution,
// Q(lambda) = 2 Sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2),
// with the theta-transformed series on the small-lambda side.
double kolmogorov_q(double lambda);

// Generic two-sample Kolmogorov-Smirnov test; p-value from the asymptotic
// distribution at the effective size m1*m2/(m1+m2) (finite-size-corrected
// argument, Stephens' practice).
KsResult ks_two_sample(std::vector<double> sample1, std::vector<double> sample2);

// Distributional self-similarity check: compares c^(1-gamma) * Gamma(tau)
// against Gamma(c*tau).  Exact invariance holds only for the unregularised
// power law on equal step counts, so mismatched N, gamma, epsilon or form is
// an error rather than a warning.
KsResult ks_scaling_test(const GammaEnsemble& ens1, const GammaEnsemble& ens2, double c,
                         double gamma);

// Moments of the even (Brownian-only) coordinate: estimates E[b(tau)^(2r)]
// from M sampled paths; the reference value is (2r-1)!! tau^r.
MomentEstimate even_moment_check(const TimeGrid& grid, int r, int n_samples, std::uint64_t seed,
                                 int n_boot = 1000, int threads = 0);

// (2r-1)!! tau^r, the Gaussian even-moment reference.
double gaussian_even_moment(int r, double tau);

}  // namespace propmc
