#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "propmc/gamma.hpp"
#include "propmc/scaling.hpp"

namespace propmc {

// Treatment of the even partner coordinates in the reduced kernel.
//
// Integrated: the even coordinates are integrated out, removing their factors
// entirely (the free kernel integrates to one).  PointwiseZero: the kernel is
// evaluated on the hyperplane of zero even displacement, where each pair's
// even partner decouples into the free zero-displacement factor
// (2 pi i tau)^(-1/2); the correlation between that coordinate and its Gamma
// is neglected, which is the working assumption behind the mixed d = 3
// configuration.
enum class EvenSector { Integrated, PointwiseZero };

struct SignatureSpec {
    int n_pairs = 1;
    std::vector<int> signs;  // one of {+1, -1} per pair
    int n_det = 0;           // extra deterministic coordinates at zero displacement
    EvenSector even_sector = EvenSector::Integrated;

    void validate() const;
};

struct KernelEstimate {
    std::complex<double> value{0.0, 0.0};
    double std_error = 0.0;  // sqrt(se_re^2 + se_im^2)
    double se_re = 0.0;
    double se_im = 0.0;
    long n_truncated = 0;  // samples dropped by the |Gamma| floor
    long n_used = 0;
    double delta_floor = 0.0;
    double tau = 0.0;
};

// One factor of the reduced kernel:
//   (2 pi i sigma Gamma)^(-1/2) exp(i sigma Delta^2 / (2 Gamma)),
// principal square root, so the amplitude carries the phase
// exp(-i pi/4 sign(sigma Gamma)).  With Gamma = tau, sigma = +1 this is the
// exact free kernel factor, which pins the branch convention.
std::complex<double> kernel_pair_factor(double gamma_value, double delta, int sign);

// Sample mean over joint ensemble draws of the product of pair factors, times
// (2 pi i tau)^(-1/2) per deterministic coordinate (and per pair in
// PointwiseZero mode).  Samples with any |Gamma_k| below delta_floor are
// dropped and counted; a Gamma of exactly 0 with a zero floor is an error.
KernelEstimate reduced_kernel(std::span<const double> deltas_odd, const SignatureSpec& sig,
                              double tau, std::span<const GammaEnsemble> ensembles,
                              double delta_floor);

struct TauGridSpec {
    double tau_min = 1e-4;
    double tau_max = 100.0;
    int n_tau = 48;
};

struct GreenConfig {
    SignatureSpec sig;
    double cov_gamma = 0.25;
    double cov_epsilon = 0.0;
    double cov_amplitude = 1.0;
    TauGridSpec tau_grid;
    int n_steps = 512;
    int n_samples = 100000;
    double regulator_eps = 0.05;      // multiplicative e^(-eps tau) damping
    double delta_floor_coeff = 1e-4;  // floor = coeff * tau^(1-gamma) per node
    std::uint64_t seed = 1;
    int threads = 0;
    bool deterministic_gamma = false;  // Gamma == tau at every node (free kernel)
};

struct GreenEstimate {
    std::complex<double> value{0.0, 0.0};
    std::complex<double> value_half_floor{0.0, 0.0};  // floor sensitivity diagnostic
    double std_error = 0.0;
    TauGridSpec tau_grid;
    double regulator_eps = 0.0;
    std::vector<KernelEstimate> per_tau;
    std::vector<std::string> warnings;
};

// Kernel provider used by the proper-time quadrature: returns the reduced
// kernel estimate at a grid node.  Production wires this to Monte Carlo
// ensembles; tests may inject closed forms to exercise the quadrature and fit
// plumbing in isolation.
using KernelFn =
    std::function<KernelEstimate(int node_index, double tau, std::span<const double> deltas)>;

// i * Sum_q w_q e^(-eps tau_q) K(tau_q) on a log-uniform tau grid with
// trapezoidal weights in log tau.  Nodes whose relative error exceeds 30%
// get a warning attached to the result.
GreenEstimate green_quadrature(const KernelFn& kernel, std::span<const double> deltas,
                               const TauGridSpec& grid, double regulator_eps);

// Full Monte Carlo Green's function with fresh ensembles per tau node, seeded
// deterministically from config.seed and the node index.
GreenEstimate green_reduced(std::span<const double> deltas_odd, const GreenConfig& config);

struct ScanResult {
    ScalingFit fit;  // log |G| against log Delta_o^2
    std::vector<double> deltas;
    std::vector<double> delta_sq;
    std::vector<GreenEstimate> greens;
};

// Green's function scan over displacement magnitudes delta * direction.  All
// deltas share the per-node ensembles (common random numbers), so the slope
// error is conservative.  subtract_zero removes the coincidence value G(0)
// before fitting; required when the predicted exponent is positive and the
// power law is sub-leading to the constant.
ScanResult exponent_scan(const GreenConfig& config, std::span<const double> direction,
                         std::span<const double> delta_list, bool subtract_zero = false);

// Plumbing variant with an injected kernel (no ensembles, no bracketing
// checks beyond the grid itself).
ScanResult exponent_scan_with_kernel(const KernelFn& kernel, const TauGridSpec& grid,
                                     double regulator_eps, std::span<const double> direction,
                                     std::span<const double> delta_list,
                                     bool subtract_zero = false);

}  // namespace propmc
