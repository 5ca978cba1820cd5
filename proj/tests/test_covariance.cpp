#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "propmc/covariance.hpp"
#include "propmc/errors.hpp"
#include "propmc/rng.hpp"

using namespace propmc;

TEST_SUITE_BEGIN("covariance");

namespace {

// Brute-force oracle for the spectral form: composite Simpson over every
// half-period of cos(nu x^4) plus the substituted head.  Slow and entirely
// independent of the production integrator.
double spectral_brute(double x, double gamma, double nu_max, double amplitude) {
    const double s = 0.5 * gamma;
    const double a = x * x * x * x;
    const double pi = 3.14159265358979323846;

    auto simpson = [](auto f, double lo, double hi, int n) {
        const double h = (hi - lo) / n;
        double acc = f(lo) + f(hi);
        for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
        return acc * h / 3.0;
    };

    // Head [0, nu0] via nu = u^(2/gamma): integrand (2/gamma) cos(u^(2/gamma) a).
    const double nu0 = std::min(nu_max, 0.5 * pi / a);
    const double u_hi = std::pow(nu0, s);
    const double inv_s = 1.0 / s;
    double total = simpson([&](double u) { return inv_s * std::cos(std::pow(u, inv_s) * a); },
                           0.0, u_hi, 2000);

    double lo = nu0;
    while (lo < nu_max) {
        const double hi = std::min(nu_max, lo + pi / a);
        total += simpson([&](double nu) { return std::pow(nu, s - 1.0) * std::cos(nu * a); },
                         lo, hi, 16);
        lo = hi;
    }
    return 2.0 * amplitude * total;
}

}  // namespace

TEST_CASE("power law point values") {
    CovarianceSpec spec;
    spec.gamma = 0.25;
    spec.epsilon = 0.0;
    CHECK(g_power(2.0, spec) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));

    spec.gamma = 0.0;
    CHECK(g_power(5.7, spec) == 1.0);
    CHECK(g_power(0.0, spec) == 1.0);  // constant-field limit is total

    spec.gamma = 0.25;
    spec.epsilon = 1.0;
    CHECK(g_power(1.0, spec) == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-12));
}

TEST_CASE("power law singular argument") {
    CovarianceSpec spec;
    spec.gamma = 0.25;
    spec.epsilon = 0.0;
    CHECK_THROWS_AS(g_power(0.0, spec), NumericalError);
    spec.epsilon = 0.5;
    CHECK(g_power(0.0, spec) == doctest::Approx(std::pow(0.25, -0.25)));
}

TEST_CASE("spec validation bounds gamma") {
    CovarianceSpec spec;
    spec.gamma = 0.5;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.gamma = -0.1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.gamma = 0.49;
    CHECK_NOTHROW(spec.validate());
}

TEST_CASE("power law homogeneity") {
    // g(c x) = c^(-2 gamma) g(x) for epsilon = 0; exact up to rounding.
    RngStream s(7, 0);
    for (const double gamma : {0.1, 0.25, 0.4, 0.47}) {
        CovarianceSpec spec;
        spec.gamma = gamma;
        for (int i = 0; i < 200; ++i) {
            const double x = 0.01 + 10.0 * s.next_uniform();
            const double c = 0.1 + 5.0 * s.next_uniform();
            const double lhs = g_power(c * x, spec);
            const double rhs = std::pow(c, -2.0 * gamma) * g_power(x, spec);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
        }
    }
}

TEST_CASE("regularisation is pointwise monotone") {
    RngStream s(8, 0);
    for (int i = 0; i < 200; ++i) {
        const double x = 4.0 * s.next_uniform() - 2.0;
        CovarianceSpec tight, loose;
        tight.gamma = loose.gamma = 0.3;
        tight.epsilon = 0.1;
        loose.epsilon = 0.7;
        if (x == 0.0) continue;
        CHECK(g_power(x, loose) <= g_power(x, tight));
        CovarianceSpec bare = tight;
        bare.epsilon = 0.0;
        CHECK(g_power(x, tight) <= g_power(x, bare));
    }
}

TEST_CASE("spectral matches the brute-force oracle") {
    CovarianceSpec spec;
    spec.form = CovForm::Spectral;
    spec.gamma = 0.25;
    spec.nu_max = 1000.0;  // brute force stays affordable
    for (const double x : {0.8, 1.0, 1.3}) {
        const double fast = g_spectral(x, spec);
        const double brute = spectral_brute(x, spec.gamma, spec.nu_max, spec.amplitude);
        CHECK(fast == doctest::Approx(brute).epsilon(1e-6));
    }
}

TEST_CASE("spectral scaling ratio approaches the power law") {
    CovarianceSpec spec;
    spec.form = CovForm::Spectral;
    spec.gamma = 0.25;
    spec.nu_max = 1e6;
    const double ratio = g_spectral(2.0, spec) / g_spectral(1.0, spec);
    CHECK(std::fabs(ratio - std::pow(2.0, -0.5)) < 0.01 * std::pow(2.0, -0.5));
}

TEST_CASE("spectral log-log slope matches -2 gamma within 2%") {
    CovarianceSpec spec;
    spec.form = CovForm::Spectral;
    spec.gamma = 0.25;
    spec.nu_max = 1e6;
    std::vector<double> xs = {1.0, 2.0, 4.0, 8.0};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const double x : xs) {
        const double lx = std::log(x);
        const double ly = std::log(g_spectral(x, spec));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::fabs(slope - (-0.5)) < 0.02 * 0.5);
}

TEST_CASE("spectral symmetry and phase sign") {
    CovarianceSpec spec;
    spec.form = CovForm::Spectral;
    spec.gamma = 0.3;
    spec.nu_max = 1e4;
    const double plus = g_spectral(1.7, spec);
    CHECK(g_spectral(-1.7, spec) == plus);
    // (sqrt(i) x)^4 = -x^4 and cos is even: flipping the phase sign is the
    // identity G(sqrt(i) x) = G(x).
    CHECK(g_spectral_phase(1.7, spec, 64, -1) == plus);
}

TEST_CASE("spectral quadrature failure carries the estimate") {
    CovarianceSpec spec;
    spec.form = CovForm::Spectral;
    spec.gamma = 0.2;
    spec.nu_max = 10.0;
    try {
        (void)g_spectral(1.0, spec, 1);  // single midpoint: no error estimate
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(e.error_estimate() > 1e-6);
        CHECK(e.module() == "covariance");
    }
}

TEST_CASE("spectral preconditions") {
    CovarianceSpec spec;
    spec.form = CovForm::Spectral;
    spec.gamma = 0.2;
    CHECK_THROWS_AS(g_spectral(0.0, spec), std::invalid_argument);
    spec.gamma = 0.0;
    CHECK_THROWS_AS(g_spectral(1.0, spec), std::invalid_argument);
    CovarianceSpec power;
    CHECK_THROWS_AS(g_spectral(1.0, power), std::invalid_argument);
}

TEST_SUITE_END();
