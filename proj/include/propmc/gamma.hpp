#pragma once

#include <cstdint>
#include <vector>

#include "propmc/covariance.hpp"
#include "propmc/paths.hpp"

namespace propmc {

// One draw of the discretised double Ito integral
//   Gamma = 2 Sum_{i=2..N} dA_i Sum_{j=1..i-1} dA_j G(B(t_{i-1}) - B(t_{j-1})),
// both stochastic factors read at increment left endpoints (non-anticipating
// convention; midpoints would add a drift and break the zero mean).
struct GammaSample {
    double value = 0.0;
    // Terms skipped because the covariance argument was exactly zero while
    // epsilon = 0.  A probability-zero event for sampled paths; skipping keeps
    // the estimate finite without bias.
    long n_singular_hits = 0;
};

struct GammaConfig {
    TimeGrid grid;
    CovarianceSpec cov;
    std::uint64_t seed = 0;
    bool constant = false;  // deterministic carrier, see constant_ensemble
};

struct GammaEnsemble {
    std::vector<GammaSample> samples;
    GammaConfig config;

    int size() const { return static_cast<int>(samples.size()); }
    std::vector<double> values() const;
};

// Single-sample estimator.  Paths must share one grid; spec must be a valid
// PowerLaw form (the Spectral form is a validation tool and is rejected here
// to keep quadrature out of the O(N^2) loop).
GammaSample gamma_estimate(const BrownianPath& path_a, const BrownianPath& path_b,
                           const CovarianceSpec& spec);

// M independent samples; sample i is built from sample_pair on the stream
// (seed, stream_id = i), so the ensemble is a pure function of its config and
// identical for any worker count.  A failing sample aborts the ensemble with
// its index.
GammaEnsemble gamma_ensemble(const TimeGrid& grid, const CovarianceSpec& spec, int n_samples,
                             std::uint64_t seed, int threads = 0);

// Ensemble whose every sample equals `value`: collapses the Monte Carlo mean
// in the propagator module to a deterministic evaluation.
GammaEnsemble constant_ensemble(const TimeGrid& grid, double value, int n_samples = 2);

}  // namespace propmc
