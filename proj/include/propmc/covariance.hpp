#pragma once

#include <cmath>

namespace propmc {

enum class CovForm { PowerLaw, Spectral };

// The random-field covariance G.  PowerLaw is the production form
//   G_eps(x) = amplitude * (x^2 + epsilon^2)^(-gamma),
// homogeneous of degree -2*gamma when epsilon = 0.  Spectral is a validation
// form, the cosine transform of the scale-invariant density
// rho(nu) = amplitude * |nu|^(gamma/2 - 1) against phase nu*x^4, truncated at
// nu_max; it reproduces the power law up to normalisation as nu_max -> inf.
struct CovarianceSpec {
    double gamma = 0.25;
    double epsilon = 0.0;
    CovForm form = CovForm::PowerLaw;
    double nu_max = 1e6;
    double amplitude = 1.0;

    // gamma < 1/2 keeps the double stochastic integral square-integrable;
    // values outside [0, 1/2) are rejected outright.
    void validate() const;
};

// Power-law form evaluation.  Throws on spec.form != PowerLaw and on the
// singular argument x = 0 with epsilon = 0, gamma > 0 (callers that can skip
// singular terms test for that case themselves).
double g_power(double x, const CovarianceSpec& spec);

// Spectral form: 2 * amplitude * Integral_0^nu_max nu^(gamma/2-1) cos(nu x^4) dnu.
// The integrable nu -> 0 endpoint is removed by the substitution nu = u^(2/gamma);
// the oscillatory remainder is summed per half-period, with the far tail taken
// from the asymptotic expansion of the incomplete cosine integral.  n_quad
// bounds the quadrature effort per panel; if the internal error estimate
// exceeds 1e-6 relative the call fails rather than returning a bad value.
double g_spectral(double x, const CovarianceSpec& spec, int n_quad = 64);

// Same integral with the phase entered as phase_sign * x^4.  cos is even, so
// phase_sign = -1 must reproduce g_spectral exactly; the parameter exists to
// make that identity (rotation x -> sqrt(i) x flips the sign of x^4) an
// executable contract.
double g_spectral_phase(double x, const CovarianceSpec& spec, int n_quad, int phase_sign);

// Precompiled power-law evaluator for hot loops.  Exact-value fast paths for
// gamma in {0, 1/4, 1/2} use sqrt chains instead of pow; the chosen chain is
// fixed per (gamma, epsilon, amplitude), making results reproducible per spec.
class PowerKernel {
public:
    enum class Mode { Const, InvSqrtSqrt, InvSqrt, General };

    PowerKernel(double gamma, double epsilon, double amplitude)
        : gamma_(gamma), eps2_(epsilon * epsilon), amp_(amplitude) {
        if (gamma == 0.0)
            mode_ = Mode::Const;
        else if (gamma == 0.25)
            mode_ = Mode::InvSqrtSqrt;
        else if (gamma == 0.5)
            mode_ = Mode::InvSqrt;
        else
            mode_ = Mode::General;
    }

    Mode mode() const noexcept { return mode_; }
    double amplitude() const noexcept { return amp_; }
    double eps2() const noexcept { return eps2_; }
    double gamma() const noexcept { return gamma_; }

    double operator()(double x) const {
        const double t = x * x + eps2_;
        switch (mode_) {
            case Mode::Const: return amp_;
            case Mode::InvSqrtSqrt: return amp_ / std::sqrt(std::sqrt(t));
            case Mode::InvSqrt: return amp_ / std::sqrt(t);
            case Mode::General: return amp_ * std::exp(-gamma_ * std::log(t));
        }
        return amp_;  // unreachable
    }

private:
    double gamma_;
    double eps2_;
    double amp_;
    Mode mode_;
};

}  // namespace propmc
