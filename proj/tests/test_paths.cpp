#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "propmc/parallel.hpp"
#include "propmc/paths.hpp"

using namespace propmc;

TEST_SUITE_BEGIN("paths");

TEST_CASE("make_grid arithmetic and preconditions") {
    const TimeGrid g = make_grid(1.0, 4);
    CHECK(g.dt == doctest::Approx(0.25));
    CHECK(g.point(0) == 0.0);
    CHECK(g.point(1) == doctest::Approx(0.25));
    CHECK(g.point(4) == doctest::Approx(1.0));
    CHECK(g.dt * g.n_steps == doctest::Approx(g.tau).epsilon(1e-15));

    const TimeGrid single = make_grid(2.0, 1);
    CHECK(single.dt == doctest::Approx(2.0));

    CHECK_THROWS_AS(make_grid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1.0, 0), std::invalid_argument);
}

TEST_CASE("path values accumulate increments exactly") {
    const TimeGrid g = make_grid(1.0, 64);
    RngStream s(11, 0);
    const BrownianPath p = sample_path(g, s);
    REQUIRE(p.values.size() == 65);
    REQUIRE(p.increments.size() == 64);
    CHECK(p.values[0] == 0.0);
    for (std::size_t i = 1; i < p.values.size(); ++i)
        CHECK(p.values[i] - p.values[i - 1] == p.increments[i - 1]);
}

TEST_CASE("sampling is deterministic per stream") {
    const TimeGrid g = make_grid(1.0, 128);
    RngStream s1(77, 3), s2(77, 3);
    const BrownianPath a = sample_path(g, s1);
    const BrownianPath b = sample_path(g, s2);
    CHECK(a.values == b.values);

    RngStream s3(77, 4);
    const BrownianPath c = sample_path(g, s3);
    CHECK(a.values != c.values);
}

TEST_CASE("endpoint statistics match the normal law") {
    // E[b(1)] = 0, E[b(1)^2] = 1, E[b(1)^4] = 3 for tau = 1.
    const TimeGrid g = make_grid(1.0, 256);
    const int m = 100000;
    std::vector<double> endpoint(m);
    parallel_for(m, 0, [&](std::size_t i) {
        RngStream s(2025, i);
        endpoint[i] = sample_path(g, s).endpoint();
    });
    double mean = 0, m2 = 0, m4 = 0, m8 = 0;
    for (const double x : endpoint) {
        mean += x;
        m2 += x * x;
        m4 += x * x * x * x;
        m8 += std::pow(x, 8);
    }
    mean /= m;
    m2 /= m;
    m4 /= m;
    m8 /= m;
    const double root_m = std::sqrt(static_cast<double>(m));
    CHECK(std::fabs(mean) < 3.0 / root_m);
    CHECK(std::fabs(m2 - 1.0) < 3.0 * std::sqrt(2.0 / m));
    const double sd_b4 = std::sqrt((m8 - m4 * m4) / m);
    CHECK(std::fabs(m4 - 3.0) < 3.0 * sd_b4);
}

TEST_CASE("increment moments match N(0, dt)") {
    const TimeGrid g = make_grid(2.0, 16);
    const int m = 100000;
    double sum = 0, sum2 = 0, sum4 = 0;
    std::size_t count = 0;
    for (int i = 0; i < m / 100; ++i) {
        RngStream s(31337, static_cast<std::uint64_t>(i));
        const BrownianPath p = sample_path(g, s);
        for (const double dx : p.increments) {
            sum += dx;
            sum2 += dx * dx;
            sum4 += dx * dx * dx * dx;
            ++count;
        }
    }
    const double n = static_cast<double>(count);
    const double dt = g.dt;
    const double mean = sum / n;
    const double var = sum2 / n;
    const double kurt = (sum4 / n) / (var * var);
    CHECK(std::fabs(mean) < 3.0 * std::sqrt(dt / n));
    CHECK(std::fabs(var - dt) < 3.0 * dt * std::sqrt(2.0 / n));
    CHECK(std::fabs(kurt - 3.0) < 3.0 * std::sqrt(96.0 / n));
}

TEST_CASE("pair endpoints are uncorrelated") {
    const TimeGrid g = make_grid(1.0, 64);
    const int m = 100000;
    std::vector<double> prod(m);
    parallel_for(m, 0, [&](std::size_t i) {
        const auto [a, b] = sample_pair(g, RngStream(99, i));
        prod[i] = a.endpoint() * b.endpoint();
    });
    double corr = 0;
    for (const double p : prod) corr += p;
    corr /= m;  // Var of each endpoint is tau = 1
    CHECK(std::fabs(corr) < 3.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("pair substream layout contract") {
    const TimeGrid g = make_grid(1.0, 32);
    const RngStream base(5, 17);
    const auto [first, second] = sample_pair(g, base);

    RngStream sub0 = base.substream(0);
    const BrownianPath direct = sample_path(g, sub0);
    CHECK(first.values == direct.values);
    CHECK(first.values != second.values);

    const auto other = sample_pair(g, RngStream(5, 18));
    CHECK(first.values != other.first.values);
}

TEST_CASE("discrete scale invariance couples exactly") {
    // sqrt(c)-scaled increments on the grid (c tau, N) have the law of the
    // path on (tau, N) scaled by sqrt(c); with shared draws the two
    // constructions agree to rounding.
    const double c = 4.0;
    const TimeGrid g1 = make_grid(1.0, 64);
    const TimeGrid g2 = make_grid(c, 64);
    RngStream s1(404, 0), s2(404, 0);
    const BrownianPath p1 = sample_path(g1, s1);
    const BrownianPath p2 = sample_path(g2, s2);
    const double root_c = std::sqrt(c);
    for (std::size_t i = 0; i < p1.values.size(); ++i)
        CHECK(p2.values[i] ==
              doctest::Approx(root_c * p1.values[i]).epsilon(1e-12));
}

TEST_CASE("ensembles are independent of worker count") {
    const TimeGrid g = make_grid(1.0, 32);
    auto build = [&](int threads) {
        std::vector<double> endpoints(512);
        parallel_for(endpoints.size(), threads, [&](std::size_t i) {
            RngStream s(1234, i);
            endpoints[i] = sample_path(g, s).endpoint();
        });
        return endpoints;
    };
    CHECK(build(1) == build(3));
}

TEST_SUITE_END();
