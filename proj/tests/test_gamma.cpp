#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "propmc/errors.hpp"
#include "propmc/gamma.hpp"
#include "propmc/parallel.hpp"

using namespace propmc;

TEST_SUITE_BEGIN("gamma");

namespace {

// Independent oracle: the literal time-ordered double sum, written with the
// opposite loop nesting and long-double accumulation.
double gamma_brute(const BrownianPath& a, const BrownianPath& b, const CovarianceSpec& spec) {
    const int n = a.grid.n_steps;
    long double total = 0.0L;
    for (int j = 0; j < n - 1; ++j) {
        for (int i = j + 1; i < n; ++i) {
            const double dx = b.values[i] - b.values[j];
            if (dx == 0.0 && spec.epsilon == 0.0 && spec.gamma > 0.0) continue;
            const double g =
                spec.amplitude * std::pow(dx * dx + spec.epsilon * spec.epsilon, -spec.gamma);
            total += static_cast<long double>(a.increments[i]) * a.increments[j] * g;
        }
    }
    return static_cast<double>(2.0L * total);
}

BrownianPath make_path(const TimeGrid& grid, std::vector<double> increments) {
    return path_from_increments(grid, std::move(increments));
}

}  // namespace

TEST_CASE("two-step hand oracle") {
    const TimeGrid g = make_grid(1.0, 2);
    const BrownianPath a = make_path(g, {0.3, -0.5});
    const BrownianPath b = make_path(g, {2.0, 0.7});  // B(t0)=0, B(t1)=2
    CovarianceSpec spec;
    spec.gamma = 0.25;
    const GammaSample s = gamma_estimate(a, b, spec);
    // 2 * (-0.5) * 0.3 * G(2.0) = -0.3 * 2^(-1/2)
    CHECK(s.value == doctest::Approx(-0.3 * std::pow(2.0, -0.5)).epsilon(1e-12));
    CHECK(s.n_singular_hits == 0);
}

TEST_CASE("matches the brute-force oracle on random paths") {
    for (const double gamma : {0.0, 0.1, 0.25, 0.4}) {
        for (const double eps : {0.0, 0.3}) {
            CovarianceSpec spec;
            spec.gamma = gamma;
            spec.epsilon = eps;
            const TimeGrid g = make_grid(0.7, 97);
            RngStream base(55, static_cast<std::uint64_t>(gamma * 100 + eps * 10));
            const auto [a, b] = sample_pair(g, base);
            const GammaSample s = gamma_estimate(a, b, spec);
            const double brute = gamma_brute(a, b, spec);
            CHECK(s.value == doctest::Approx(brute).epsilon(1e-11));
        }
    }
}

TEST_CASE("gamma zero collapses to the discrete Ito identity") {
    // G == 1: Gamma = (sum dA)^2 - sum dA^2 for every path, exactly.
    const TimeGrid g = make_grid(2.0, 256);
    CovarianceSpec spec;
    spec.gamma = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto [a, b] = sample_pair(g, RngStream(808, static_cast<std::uint64_t>(rep)));
        const GammaSample s = gamma_estimate(a, b, spec);
        double sum = 0.0, quad = 0.0;
        for (const double dx : a.increments) {
            sum += dx;
            quad += dx * dx;
        }
        const double identity = sum * sum - quad;
        const double scale = std::max({std::fabs(identity), quad, 1e-300});
        CHECK(std::fabs(s.value - identity) / scale < 1e-12);
    }
}

TEST_CASE("all-zero increments give an empty sum") {
    const TimeGrid g = make_grid(1.0, 8);
    const BrownianPath a = make_path(g, std::vector<double>(8, 0.0));
    const auto b = make_path(g, {0.1, 0.2, -0.1, 0.4, 0.0, 0.3, -0.2, 0.1});
    CovarianceSpec spec;
    spec.gamma = 0.25;
    const GammaSample s = gamma_estimate(a, b, spec);
    CHECK(s.value == 0.0);
}

TEST_CASE("exact-zero covariance arguments are skipped and counted") {
    const TimeGrid g = make_grid(1.0, 3);
    const BrownianPath a = make_path(g, {1.0, 1.0, 1.0});
    // B constant on the first two left endpoints: B(t1)-B(t0) = 0 exactly.
    const BrownianPath b = make_path(g, {0.0, 1.0, 1.0});
    CovarianceSpec spec;
    spec.gamma = 0.25;
    spec.epsilon = 0.0;
    const GammaSample s = gamma_estimate(a, b, spec);
    CHECK(s.n_singular_hits == 1);
    CHECK(std::isfinite(s.value));
    // The surviving terms: pairs (i=2,j=0) and (i=2,j=1) with B diff 1.0.
    CHECK(s.value == doctest::Approx(2.0 * (1.0 + 1.0)).epsilon(1e-12));

    spec.epsilon = 0.5;  // regularised: nothing to skip
    const GammaSample s2 = gamma_estimate(a, b, spec);
    CHECK(s2.n_singular_hits == 0);
}

TEST_CASE("NaN input is rejected") {
    const TimeGrid g = make_grid(1.0, 4);
    std::vector<double> bad = {0.1, std::numeric_limits<double>::quiet_NaN(), 0.2, 0.1};
    const BrownianPath a = make_path(g, bad);
    const BrownianPath b = make_path(g, {0.1, 0.2, 0.3, 0.4});
    CovarianceSpec spec;
    CHECK_THROWS_AS(gamma_estimate(a, b, spec), std::invalid_argument);
    CHECK_THROWS_AS(gamma_estimate(b, a, spec), std::invalid_argument);
}

TEST_CASE("grid mismatch and spectral form are rejected") {
    const auto a = make_path(make_grid(1.0, 4), {0.1, 0.2, 0.3, 0.4});
    const auto b = make_path(make_grid(2.0, 4), {0.1, 0.2, 0.3, 0.4});
    CovarianceSpec spec;
    CHECK_THROWS_AS(gamma_estimate(a, b, spec), std::invalid_argument);
    CovarianceSpec spectral;
    spectral.form = CovForm::Spectral;
    CHECK_THROWS_AS(gamma_estimate(a, a, spectral), std::invalid_argument);
}

TEST_CASE("sign symmetry is exact") {
    const TimeGrid g = make_grid(1.0, 64);
    const auto [a, b] = sample_pair(g, RngStream(17, 0));
    CovarianceSpec spec;
    spec.gamma = 0.3;
    std::vector<double> flipped = a.increments;
    for (double& dx : flipped) dx = -dx;
    const BrownianPath a_neg = make_path(g, std::move(flipped));
    CHECK(gamma_estimate(a, b, spec).value == gamma_estimate(a_neg, b, spec).value);
}

TEST_CASE("discrete self-similarity is exact term by term") {
    // (dA, B) -> (sqrt(c) dA, sqrt(c) B) sends Gamma to c^(1-gamma) Gamma.
    const double c = 4.0;
    for (const double gamma : {0.1, 0.25, 0.4}) {
        CovarianceSpec spec;
        spec.gamma = gamma;
        const TimeGrid g1 = make_grid(1.0, 128);
        const TimeGrid g2 = make_grid(c, 128);
        const auto [a1, b1] = sample_pair(g1, RngStream(5150, static_cast<std::uint64_t>(gamma * 100)));
        const double root_c = std::sqrt(c);
        std::vector<double> da2 = a1.increments;
        std::vector<double> db2 = b1.increments;
        for (double& v : da2) v *= root_c;
        for (double& v : db2) v *= root_c;
        const BrownianPath a2 = make_path(g2, std::move(da2));
        const BrownianPath b2 = make_path(g2, std::move(db2));
        const double g1v = gamma_estimate(a1, b1, spec).value;
        const double g2v = gamma_estimate(a2, b2, spec).value;
        CHECK(g2v == doctest::Approx(std::pow(c, 1.0 - gamma) * g1v).epsilon(1e-12));
    }
}

TEST_CASE("ensemble reproducibility across worker counts") {
    const TimeGrid g = make_grid(1.0, 32);
    CovarianceSpec spec;
    spec.gamma = 0.25;
    const GammaEnsemble e1 = gamma_ensemble(g, spec, 300, 42, 1);
    const GammaEnsemble e3 = gamma_ensemble(g, spec, 300, 42, 3);
    REQUIRE(e1.size() == e3.size());
    for (int i = 0; i < e1.size(); ++i) CHECK(e1.samples[i].value == e3.samples[i].value);

    const GammaEnsemble other = gamma_ensemble(g, spec, 300, 43, 1);
    bool differs = false;
    for (int i = 0; i < e1.size(); ++i)
        if (e1.samples[i].value != other.samples[i].value) differs = true;
    CHECK(differs);
}

TEST_CASE("martingale property at desk scale") {
    const TimeGrid g = make_grid(1.0, 128);
    for (const double gamma : {0.0, 0.1, 0.25, 0.4}) {
        CovarianceSpec spec;
        spec.gamma = gamma;
        const GammaEnsemble ens = gamma_ensemble(g, spec, 20000, 7000 + int(gamma * 100), 0);
        double mean = 0;
        for (const auto& s : ens.samples) mean += s.value;
        mean /= ens.size();
        double var = 0;
        for (const auto& s : ens.samples) var += (s.value - mean) * (s.value - mean);
        var /= (ens.size() - 1);
        const double se = std::sqrt(var / ens.size());
        CHECK(std::fabs(mean) <= 3.0 * se);
    }
}

TEST_CASE("exact second moment at gamma 0") {
    // E[Gamma^2] = 2 tau^2 (1 - 1/N) for the discrete estimator: Gamma is
    // 2 sum_{i<j} dA_i dA_j, and only the diagonal pairings survive the
    // Gaussian average, N(N-1)/2 of them, each worth 4 dt^2.
    const int n = 128;
    const double tau = 1.0;
    const TimeGrid g = make_grid(tau, n);
    CovarianceSpec spec;
    spec.gamma = 0.0;
    const GammaEnsemble ens = gamma_ensemble(g, spec, 50000, 2222, 0);
    double mean2 = 0;
    for (const auto& s : ens.samples) mean2 += s.value * s.value;
    mean2 /= ens.size();
    double var2 = 0;
    for (const auto& s : ens.samples) var2 += (s.value * s.value - mean2) * (s.value * s.value - mean2);
    var2 /= (ens.size() - 1);
    const double se = std::sqrt(var2 / ens.size());
    const double expected = 2.0 * tau * tau * (1.0 - 1.0 / n);
    CHECK(std::fabs(mean2 - expected) <= 3.0 * se);
}

TEST_CASE("variance stabilises in N for gamma 0.25") {
    // Coupled refinement: the N-step path is the pairwise coarsening of the
    // 2N-step path, so the discretisation difference is measured with common
    // randomness.
    CovarianceSpec spec;
    spec.gamma = 0.25;
    const int n_fine = 1024;
    const int m = 2000;
    const TimeGrid fine = make_grid(1.0, n_fine);
    const TimeGrid coarse = make_grid(1.0, n_fine / 2);

    std::vector<double> diff(m), coarse_sq(m);
    parallel_for(m, 0, [&](std::size_t i) {
        const auto [a_f, b_f] = sample_pair(fine, RngStream(31415, i));
        std::vector<double> da(coarse.n_steps), db(coarse.n_steps);
        for (int k = 0; k < coarse.n_steps; ++k) {
            da[k] = a_f.increments[2 * k] + a_f.increments[2 * k + 1];
            db[k] = b_f.increments[2 * k] + b_f.increments[2 * k + 1];
        }
        const auto a_c = path_from_increments(coarse, std::move(da));
        const auto b_c = path_from_increments(coarse, std::move(db));
        const double gf = gamma_estimate(a_f, b_f, spec).value;
        const double gc = gamma_estimate(a_c, b_c, spec).value;
        diff[i] = gf * gf - gc * gc;
        coarse_sq[i] = gc * gc;
    });
    double mean_diff = 0, mean_sq = 0;
    for (int i = 0; i < m; ++i) {
        mean_diff += diff[i];
        mean_sq += coarse_sq[i];
    }
    mean_diff /= m;
    mean_sq /= m;
    double var_diff = 0;
    for (int i = 0; i < m; ++i) var_diff += (diff[i] - mean_diff) * (diff[i] - mean_diff);
    var_diff /= (m - 1);
    const double se = std::sqrt(var_diff / m);
    CHECK(std::fabs(mean_diff) < 0.02 * mean_sq + 3.0 * se);
}

TEST_CASE("ensemble preconditions and failure propagation") {
    const TimeGrid g = make_grid(1.0, 8);
    CovarianceSpec spec;
    CHECK_THROWS_AS(gamma_ensemble(g, spec, 1, 0), std::invalid_argument);

    CovarianceSpec spectral;
    spectral.form = CovForm::Spectral;
    spectral.gamma = 0.2;
    try {
        (void)gamma_ensemble(g, spectral, 4, 0);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.module() == "gamma");
        CHECK(std::string(e.what()).find("sample 0") != std::string::npos);
    }
}

TEST_SUITE_END();
