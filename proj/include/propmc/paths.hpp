#pragma once

#include <utility>
#include <vector>

#include "propmc/rng.hpp"

namespace propmc {

// Uniform proper-time grid: points t_i = i*dt, i = 0..n_steps.
struct TimeGrid {
    double tau = 1.0;
    int n_steps = 1;
    double dt = 1.0;

    double point(int i) const { return dt * i; }
};

// Validates tau > 0, n_steps >= 1 and fixes dt = tau/n_steps.
TimeGrid make_grid(double tau, int n_steps);

// A sampled Brownian trajectory on a grid.  values[0] = 0 and
// values[i] - values[i-1] = increments[i-1] hold exactly (values are the
// running sums of the increments, computed once at construction).
struct BrownianPath {
    TimeGrid grid;
    std::vector<double> increments;  // n_steps entries, each ~ N(0, dt)
    std::vector<double> values;      // n_steps + 1 entries

    double endpoint() const { return values.back(); }
};

// Builds the cumulative values from given increments (size must equal
// grid.n_steps).  Shared by the sampler and by tests that pin increments.
BrownianPath path_from_increments(const TimeGrid& grid, std::vector<double> increments);

// Draws n_steps increments of N(0, dt) from the stream and accumulates them.
// The stream is advanced by exactly n_steps draws.
BrownianPath sample_path(const TimeGrid& grid, RngStream& stream);

// Two independent paths on the same grid, drawn from substreams 0 and 1 of
// the base stream.  sample_pair(g, s).first == sample_path(g, s.substream(0)).
std::pair<BrownianPath, BrownianPath> sample_pair(const TimeGrid& grid, const RngStream& base);

}  // namespace propmc
