#include "propmc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "propmc/errors.hpp"

namespace propmc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// (2 pi i tau)^(-1/2) for tau > 0, principal branch.
std::complex<double> free_factor(double tau) {
    const double mag = 1.0 / std::sqrt(2.0 * kPi * tau);
    return {mag * kInvSqrt2, -mag * kInvSqrt2};
}

std::complex<double> complex_int_pow(std::complex<double> z, int k) {
    std::complex<double> out{1.0, 0.0};
    for (int i = 0; i < k; ++i) out *= z;
    return out;
}

}  // namespace

void SignatureSpec::validate() const {
    if (n_pairs < 1)
        throw std::invalid_argument("signature: n_pairs must be >= 1, got " +
                                    std::to_string(n_pairs));
    if (static_cast<int>(signs.size()) != n_pairs)
        throw std::invalid_argument("signature: signs must hold one entry per pair (" +
                                    std::to_string(signs.size()) + " given, " +
                                    std::to_string(n_pairs) + " pairs)");
    for (const int s : signs)
        if (s != 1 && s != -1)
            throw std::invalid_argument("signature: signs entries must be +1 or -1");
    if (n_det < 0) throw std::invalid_argument("signature: n_det must be >= 0");
}

std::complex<double> kernel_pair_factor(double gamma_value, double delta, int sign) {
    const double sg = sign * gamma_value;
    const double mag = 1.0 / std::sqrt(2.0 * kPi * std::fabs(sg));
    // e^(-i pi/4 sign(sg)) from the principal square root of 2 pi i sg.
    const std::complex<double> amp = sg > 0.0
                                         ? std::complex<double>(mag * kInvSqrt2, -mag * kInvSqrt2)
                                         : std::complex<double>(mag * kInvSqrt2, mag * kInvSqrt2);
    const double phase = sign * delta * delta / (2.0 * gamma_value);
    return amp * std::complex<double>(std::cos(phase), std::sin(phase));
}

KernelEstimate reduced_kernel(std::span<const double> deltas_odd, const SignatureSpec& sig,
                              double tau, std::span<const GammaEnsemble> ensembles,
                              double delta_floor) {
    sig.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("reduced_kernel: tau must be positive");
    if (!(delta_floor >= 0.0))
        throw std::invalid_argument("reduced_kernel: delta_floor must be >= 0");
    if (static_cast<int>(deltas_odd.size()) != sig.n_pairs)
        throw std::invalid_argument("reduced_kernel: one displacement per pair required");
    if (static_cast<int>(ensembles.size()) != sig.n_pairs)
        throw std::invalid_argument("reduced_kernel: one ensemble per pair required");
    const int m = ensembles.front().size();
    for (const auto& ens : ensembles) {
        if (ens.size() != m)
            throw std::invalid_argument("reduced_kernel: ensembles must share one sample count");
        const double ens_tau = ens.config.grid.tau;
        if (std::fabs(ens_tau - tau) > 1e-9 * tau)
            throw std::invalid_argument("reduced_kernel: ensemble tau " + std::to_string(ens_tau) +
                                        " does not match requested tau " + std::to_string(tau));
    }

    int n_free = sig.n_det;
    if (sig.even_sector == EvenSector::PointwiseZero) n_free += sig.n_pairs;
    const std::complex<double> det_factor = complex_int_pow(free_factor(tau), n_free);

    KernelEstimate est;
    est.delta_floor = delta_floor;
    est.tau = tau;

    double sum_re = 0.0, sum_im = 0.0;
    std::vector<std::complex<double>> kept;
    kept.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        bool drop = false;
        std::complex<double> prod{1.0, 0.0};
        for (int k = 0; k < sig.n_pairs; ++k) {
            const double g = ensembles[k].samples[static_cast<std::size_t>(i)].value;
            if (g == 0.0 && delta_floor == 0.0)
                throw NumericalError("propagator",
                                     "reduced_kernel: Gamma sample exactly 0 with zero floor "
                                     "(sample " + std::to_string(i) + ", pair " +
                                         std::to_string(k) + ")");
            if (std::fabs(g) < delta_floor) {
                drop = true;
                break;
            }
            prod *= kernel_pair_factor(g, deltas_odd[k], sig.signs[static_cast<std::size_t>(k)]);
        }
        if (drop) {
            ++est.n_truncated;
            continue;
        }
        prod *= det_factor;
        kept.push_back(prod);
        sum_re += prod.real();
        sum_im += prod.imag();
    }

    est.n_used = static_cast<long>(kept.size());
    if (est.n_used == 0)
        throw NumericalError("propagator", "reduced_kernel: every sample fell below the floor");
    const double n = static_cast<double>(est.n_used);
    est.value = {sum_re / n, sum_im / n};
    if (est.n_used > 1) {
        double var_re = 0.0, var_im = 0.0;
        for (const auto& v : kept) {
            var_re += (v.real() - est.value.real()) * (v.real() - est.value.real());
            var_im += (v.imag() - est.value.imag()) * (v.imag() - est.value.imag());
        }
        var_re /= (n - 1.0);
        var_im /= (n - 1.0);
        est.se_re = std::sqrt(var_re / n);
        est.se_im = std::sqrt(var_im / n);
        est.std_error = std::hypot(est.se_re, est.se_im);
    }
    return est;
}

GreenEstimate green_quadrature(const KernelFn& kernel, std::span<const double> deltas,
                               const TauGridSpec& grid, double regulator_eps) {
    if (!(grid.tau_min > 0.0) || !(grid.tau_max > grid.tau_min))
        throw std::invalid_argument("green: need 0 < tau_min < tau_max");
    if (grid.n_tau < 2) throw std::invalid_argument("green: n_tau must be >= 2");
    if (!(regulator_eps >= 0.0))
        throw std::invalid_argument("green: regulator_eps must be >= 0");

    const double h = std::log(grid.tau_max / grid.tau_min) / (grid.n_tau - 1);
    GreenEstimate out;
    out.tau_grid = grid;
    out.regulator_eps = regulator_eps;
    out.per_tau.resize(static_cast<std::size_t>(grid.n_tau));

    std::complex<double> acc{0.0, 0.0};
    double var_acc = 0.0;
    for (int q = 0; q < grid.n_tau; ++q) {
        const double tau = grid.tau_min * std::exp(h * q);
        const double trap = (q == 0 || q == grid.n_tau - 1) ? 0.5 : 1.0;
        const double w = h * tau * trap * std::exp(-regulator_eps * tau);
        KernelEstimate k = kernel(q, tau, deltas);
        out.per_tau[static_cast<std::size_t>(q)] = k;
        acc += w * k.value;
        var_acc += w * w * k.std_error * k.std_error;
        if (k.std_error > 0.3 * std::abs(k.value))
            out.warnings.push_back("green: node " + std::to_string(q) + " (tau=" +
                                   std::to_string(tau) + ") relative error above 30%");
    }
    // i * integral: rotation by i preserves the combined error scale.
    out.value = std::complex<double>(0.0, 1.0) * acc;
    out.std_error = std::sqrt(var_acc);
    return out;
}

namespace {

// Shared ensembles for one tau grid: ensemble (node q, pair k) is seeded by
// mixing (seed, q * n_pairs + k), so scans over displacements reuse the same
// draws (common random numbers).
struct NodeEnsembles {
    std::vector<double> taus;
    std::vector<std::vector<GammaEnsemble>> per_node;  // [node][pair]
};

NodeEnsembles build_node_ensembles(const GreenConfig& cfg) {
    NodeEnsembles nodes;
    const auto& grid = cfg.tau_grid;
    const double h = std::log(grid.tau_max / grid.tau_min) / (grid.n_tau - 1);
    CovarianceSpec cov;
    cov.gamma = cfg.cov_gamma;
    cov.epsilon = cfg.cov_epsilon;
    cov.amplitude = cfg.cov_amplitude;
    cov.form = CovForm::PowerLaw;
    cov.validate();
    cfg.sig.validate();

    nodes.taus.resize(static_cast<std::size_t>(grid.n_tau));
    nodes.per_node.resize(static_cast<std::size_t>(grid.n_tau));
    for (int q = 0; q < grid.n_tau; ++q) {
        const double tau = grid.tau_min * std::exp(h * q);
        nodes.taus[static_cast<std::size_t>(q)] = tau;
        const TimeGrid tg = make_grid(tau, cfg.n_steps);
        auto& pairs = nodes.per_node[static_cast<std::size_t>(q)];
        pairs.reserve(static_cast<std::size_t>(cfg.sig.n_pairs));
        for (int k = 0; k < cfg.sig.n_pairs; ++k) {
            const std::uint64_t node_seed =
                mix_seed(cfg.seed, static_cast<std::uint64_t>(q) *
                                           static_cast<std::uint64_t>(cfg.sig.n_pairs) +
                                       static_cast<std::uint64_t>(k));
            if (cfg.deterministic_gamma)
                pairs.push_back(constant_ensemble(tg, tau));
            else
                pairs.push_back(gamma_ensemble(tg, cov, cfg.n_samples, node_seed, cfg.threads));
        }
    }
    return nodes;
}

double node_floor(const GreenConfig& cfg, double tau) {
    return cfg.deterministic_gamma ? 0.5 * tau  // any value below |Gamma| = tau
                                   : cfg.delta_floor_coeff * std::pow(tau, 1.0 - cfg.cov_gamma);
}

KernelFn kernel_from_nodes(const GreenConfig& cfg, const NodeEnsembles& nodes,
                           double floor_scale) {
    return [&cfg, &nodes, floor_scale](int q, double tau, std::span<const double> deltas) {
        const auto& pairs = nodes.per_node[static_cast<std::size_t>(q)];
        return reduced_kernel(deltas, cfg.sig, tau, pairs, floor_scale * node_floor(cfg, tau));
    };
}

void validate_bracketing(const GreenConfig& cfg, double delta_sq_min) {
    const auto& grid = cfg.tau_grid;
    if (grid.tau_max * cfg.regulator_eps < 5.0 - 1e-12)
        throw std::invalid_argument(
            "green: bracketing violated: tau_max * regulator_eps = " +
            std::to_string(grid.tau_max * cfg.regulator_eps) + " < 5 (tail not damped)");
    if (delta_sq_min > 0.0) {
        const double stationary = std::pow(delta_sq_min, 1.0 / (1.0 - cfg.cov_gamma));
        if (grid.tau_min > stationary / 10.0 + 1e-15)
            throw std::invalid_argument(
                "green: bracketing violated: tau_min = " + std::to_string(grid.tau_min) +
                " > stationary scale / 10 = " + std::to_string(stationary / 10.0));
    }
}

double sum_sq(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return s;
}

}  // namespace

GreenEstimate green_reduced(std::span<const double> deltas_odd, const GreenConfig& cfg) {
    if (static_cast<int>(deltas_odd.size()) != cfg.sig.n_pairs)
        throw std::invalid_argument("green_reduced: one displacement per pair required");
    validate_bracketing(cfg, sum_sq(deltas_odd));

    const NodeEnsembles nodes = build_node_ensembles(cfg);
    GreenEstimate est = green_quadrature(kernel_from_nodes(cfg, nodes, 1.0), deltas_odd,
                                         cfg.tau_grid, cfg.regulator_eps);
    const GreenEstimate half = green_quadrature(kernel_from_nodes(cfg, nodes, 0.5), deltas_odd,
                                                cfg.tau_grid, cfg.regulator_eps);
    est.value_half_floor = half.value;
    return est;
}

namespace {

ScanResult scan_impl(const KernelFn& kernel, const TauGridSpec& grid, double regulator_eps,
                     std::span<const double> direction, std::span<const double> delta_list,
                     bool subtract_zero, const GreenConfig* cfg_for_half_floor,
                     const NodeEnsembles* nodes) {
    if (delta_list.size() < 4)
        throw std::invalid_argument("exponent_scan: need at least 4 displacement magnitudes");
    for (const double d : delta_list)
        if (!(d > 0.0)) throw std::invalid_argument("exponent_scan: displacements must be > 0");
    const auto [mn, mx] = std::minmax_element(delta_list.begin(), delta_list.end());
    if ((*mx / *mn) * (*mx / *mn) < 10.0)
        throw std::invalid_argument(
            "exponent_scan: displacement magnitudes must span at least a decade in Delta^2");

    const double dir_sq = sum_sq(direction);
    if (!(dir_sq > 0.0))
        throw std::invalid_argument("exponent_scan: direction must be nonzero");

    ScanResult result;
    std::vector<double> deltas(direction.size());

    GreenEstimate zero;
    if (subtract_zero) {
        std::fill(deltas.begin(), deltas.end(), 0.0);
        zero = green_quadrature(kernel, deltas, grid, regulator_eps);
    }

    std::vector<LogLogPoint> pts;
    for (const double mag : delta_list) {
        for (std::size_t k = 0; k < deltas.size(); ++k) deltas[k] = mag * direction[k];
        GreenEstimate g = green_quadrature(kernel, deltas, grid, regulator_eps);
        if (cfg_for_half_floor && nodes) {
            const GreenEstimate half =
                green_quadrature(kernel_from_nodes(*cfg_for_half_floor, *nodes, 0.5), deltas,
                                 grid, regulator_eps);
            g.value_half_floor = half.value;
        }
        const double d2 = mag * mag * dir_sq;
        std::complex<double> v = g.value;
        double sigma = g.std_error;
        if (subtract_zero) {
            v -= zero.value;
            sigma = std::hypot(sigma, zero.std_error);
        }
        const double ay = std::abs(v);
        pts.push_back({d2, ay, sigma, ay - 1.96 * sigma, ay + 1.96 * sigma,
                       "delta=" + std::to_string(mag)});
        result.deltas.push_back(mag);
        result.delta_sq.push_back(d2);
        result.greens.push_back(std::move(g));
    }
    result.fit = fit_loglog(pts);
    return result;
}

}  // namespace

ScanResult exponent_scan_with_kernel(const KernelFn& kernel, const TauGridSpec& grid,
                                     double regulator_eps, std::span<const double> direction,
                                     std::span<const double> delta_list, bool subtract_zero) {
    return scan_impl(kernel, grid, regulator_eps, direction, delta_list, subtract_zero, nullptr,
                     nullptr);
}

ScanResult exponent_scan(const GreenConfig& cfg, std::span<const double> direction,
                         std::span<const double> delta_list, bool subtract_zero) {
    if (static_cast<int>(direction.size()) != cfg.sig.n_pairs)
        throw std::invalid_argument("exponent_scan: direction must hold one entry per pair");
    double max_d2 = 0.0, min_d2 = HUGE_VAL;
    const double dir_sq = sum_sq(direction);
    for (const double mag : delta_list) {
        max_d2 = std::max(max_d2, mag * mag * dir_sq);
        min_d2 = std::min(min_d2, mag * mag * dir_sq);
    }
    validate_bracketing(cfg, min_d2);
    // Keep the regulator out of the fitted range.
    const double top_scale = std::pow(max_d2, 1.0 / (1.0 - cfg.cov_gamma));
    if (top_scale > cfg.tau_grid.tau_max / 5.0 + 1e-12)
        throw std::invalid_argument(
            "exponent_scan: largest displacement scale " + std::to_string(top_scale) +
            " exceeds tau_max / 5; the regulator would contaminate the exponent");

    const NodeEnsembles nodes = build_node_ensembles(cfg);
    return scan_impl(kernel_from_nodes(cfg, nodes, 1.0), cfg.tau_grid, cfg.regulator_eps,
                     direction, delta_list, subtract_zero, &cfg, &nodes);
}

}  // namespace propmc
