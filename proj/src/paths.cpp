#include "propmc/paths.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace propmc {

TimeGrid make_grid(double tau, int n_steps) {
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("make_grid: tau must be positive and finite, got " +
                                    std::to_string(tau));
    if (n_steps < 1)
        throw std::invalid_argument("make_grid: n_steps must be >= 1, got " +
                                    std::to_string(n_steps));
    return TimeGrid{tau, n_steps, tau / n_steps};
}

BrownianPath path_from_increments(const TimeGrid& grid, std::vector<double> increments) {
    if (static_cast<int>(increments.size()) != grid.n_steps)
        throw std::invalid_argument("path_from_increments: expected " +
                                    std::to_string(grid.n_steps) + " increments, got " +
                                    std::to_string(increments.size()));
    BrownianPath path;
    path.grid = grid;
    path.values.resize(increments.size() + 1);
    path.values[0] = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i)
        path.values[i + 1] = path.values[i] + increments[i];
    path.increments = std::move(increments);
    return path;
}

BrownianPath sample_path(const TimeGrid& grid, RngStream& stream) {
    const double scale = std::sqrt(grid.dt);
    std::vector<double> increments(static_cast<std::size_t>(grid.n_steps));
    for (auto& dx : increments) dx = scale * stream.next_normal();
    return path_from_increments(grid, std::move(increments));
}

std::pair<BrownianPath, BrownianPath> sample_pair(const TimeGrid& grid, const RngStream& base) {
    RngStream first = base.substream(0);
    RngStream second = base.substream(1);
    return {sample_path(grid, first), sample_path(grid, second)};
}

}  // namespace propmc
