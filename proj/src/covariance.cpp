#include "propmc/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "propmc/errors.hpp"

namespace propmc {

void CovarianceSpec::validate() const {
    if (!(gamma >= 0.0) || !(gamma < 0.5))
        throw std::invalid_argument(
            "covariance: gamma must lie in [0, 0.5) (square-integrability bound), got " +
            std::to_string(gamma));
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("covariance: epsilon must be >= 0, got " +
                                    std::to_string(epsilon));
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw std::invalid_argument("covariance: amplitude must be positive, got " +
                                    std::to_string(amplitude));
    if (form == CovForm::Spectral) {
        if (!(nu_max > 0.0) || !std::isfinite(nu_max))
            throw std::invalid_argument("covariance: nu_max must be positive and finite, got " +
                                        std::to_string(nu_max));
    }
}

double g_power(double x, const CovarianceSpec& spec) {
    spec.validate();
    if (spec.form != CovForm::PowerLaw)
        throw std::invalid_argument("g_power: spec.form must be PowerLaw");
    if (x == 0.0 && spec.epsilon == 0.0 && spec.gamma > 0.0)
        throw NumericalError("covariance",
                             "g_power: singular argument x = 0 with epsilon = 0 and gamma > 0");
    return PowerKernel(spec.gamma, spec.epsilon, spec.amplitude)(x);
}

namespace {

struct Quad {
    double value = 0.0;
    double err = 0.0;
};

// Gauss-Legendre nodes (positive half) and weights on [-1, 1].
struct GlRule {
    const double* nodes;
    const double* weights;
    int half;   // entries stored
    bool odd;   // node 0 is the midpoint when true
};

constexpr double kGl1N[] = {0.0};
constexpr double kGl1W[] = {2.0};
constexpr double kGl2N[] = {0.5773502691896257645};
constexpr double kGl2W[] = {1.0};
constexpr double kGl4N[] = {0.3399810435848562648, 0.8611363115940525752};
constexpr double kGl4W[] = {0.6521451548625461426, 0.3478548451374538574};
constexpr double kGl8N[] = {0.1834346424956498049, 0.5255324099163289858, 0.7966664774136267396,
                            0.9602898564975362317};
constexpr double kGl8W[] = {0.3626837833783619830, 0.3137066458778872873, 0.2223810344533744705,
                            0.1012285362903762592};
constexpr double kGl16N[] = {0.0950125098376374402, 0.2816035507792589132, 0.4580167776572273863,
                             0.6178762444026437484, 0.7554044083550030339, 0.8656312023878317439,
                             0.9445750230732325761, 0.9894009349916499326};
constexpr double kGl16W[] = {0.1894506104550684963, 0.1826034150449235889, 0.1691565193950025382,
                             0.1495959888165767320, 0.1246289712555338720, 0.0951585116824927848,
                             0.0622535239386478929, 0.0271524594117540949};

GlRule gl_rule(int n) {
    if (n >= 16) return {kGl16N, kGl16W, 8, false};
    if (n >= 8) return {kGl8N, kGl8W, 4, false};
    if (n >= 4) return {kGl4N, kGl4W, 2, false};
    if (n >= 2) return {kGl2N, kGl2W, 1, false};
    return {kGl1N, kGl1W, 1, true};
}

template <class F>
double gl_composite(const F& f, double a, double b, int nodes, int panels) {
    const GlRule rule = gl_rule(nodes);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        double acc = 0.0;
        if (rule.odd) {
            acc = rule.weights[0] * f(mid);
        } else {
            for (int i = 0; i < rule.half; ++i) {
                const double dx = half * rule.nodes[i];
                acc += rule.weights[i] * (f(mid + dx) + f(mid - dx));
            }
        }
        total += acc * half;
    }
    return total;
}

// Composite rule with an embedded coarser evaluation for the error estimate.
template <class F>
Quad gl_with_error(const F& f, double a, double b, int nodes, int panels) {
    Quad q;
    q.value = gl_composite(f, a, b, nodes, panels);
    if (panels > 1)
        q.err = std::fabs(q.value - gl_composite(f, a, b, nodes, (panels + 1) / 2));
    else if (nodes > 1)
        q.err = std::fabs(q.value - gl_composite(f, a, b, nodes / 2, 1));
    else
        q.err = std::fabs(q.value);  // a single midpoint carries no estimate
    return q;
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kAsymSwitch = 40.0;

// Tail integral T(W) = Integral_W^inf w^(s-1) cos w dw by repeated integration
// by parts.  Terms shrink by ~k/W per order, so for W > kAsymSwitch a dozen
// terms reach full precision; the bound on the dropped remainder is returned
// as the error.
Quad cos_tail_asymptotic(double W, double s) {
    const double sinw = std::sin(W);
    const double cosw = std::cos(W);
    double multiplier = 1.0;
    double p = s - 1.0;
    double total = 0.0;
    double err = 0.0;
    double prev_bound = HUGE_VAL;
    for (int k = 0; k < 40; ++k) {
        const double wp = std::exp(p * std::log(W));
        const double bound = std::fabs(multiplier) * wp;
        if (bound >= prev_bound) break;  // asymptotic series turned
        prev_bound = bound;
        err = bound;
        if (k % 2 == 0) {
            total += -multiplier * wp * sinw;
            multiplier = -multiplier * p;
        } else {
            total += multiplier * wp * cosw;
            multiplier = multiplier * p;
        }
        p -= 1.0;
        if (bound < 1e-17) break;
    }
    return {total, err};
}

// F(W; s) = Integral_0^W w^(s-1) cos w dw for s in (0, 1/2), W > 0.
Quad cos_power_integral(double W, double s, int n_quad) {
    const double f_inf = std::tgamma(s) * std::cos(0.5 * kPi * s);
    if (W > kAsymSwitch) {
        const Quad tail = cos_tail_asymptotic(W, s);
        return {f_inf - tail.value, tail.err + 4e-16 * std::fabs(f_inf)};
    }

    Quad total;
    // [0, min(W, pi/2)]: substituted integrand is smooth through the origin.
    const double w0 = std::min(W, 0.5 * kPi);
    const double inv_s = 1.0 / s;
    const auto smooth = [inv_s](double u) { return std::cos(std::pow(u, inv_s)); };
    const int nodes = std::min(n_quad, 16);
    const int panels = std::max(1, n_quad / 16);
    Quad head = gl_with_error(smooth, 0.0, std::pow(w0, s), nodes, panels);
    total.value = inv_s * head.value;
    total.err = inv_s * head.err;

    // Remaining half-periods up to W, split at the zeros of cos.
    const auto direct = [s](double w) { return std::exp((s - 1.0) * std::log(w)) * std::cos(w); };
    double a = w0;
    while (a < W) {
        const double k = std::floor((a - 0.5 * kPi) / kPi) + 1.0;
        const double b = std::min(W, 0.5 * kPi + k * kPi);
        Quad chunk = gl_with_error(direct, a, b, nodes, 1);
        total.value += chunk.value;
        total.err += chunk.err;
        a = b;
    }
    return total;
}

double spectral_eval(double x, const CovarianceSpec& spec, int n_quad, int phase_sign) {
    spec.validate();
    if (spec.form != CovForm::Spectral)
        throw std::invalid_argument("g_spectral: spec.form must be Spectral");
    if (!(spec.gamma > 0.0))
        throw std::invalid_argument("g_spectral: requires 0 < gamma < 0.5");
    if (x == 0.0) throw std::invalid_argument("g_spectral: x must be nonzero");
    if (n_quad < 1) throw std::invalid_argument("g_spectral: n_quad must be >= 1");
    if (phase_sign != 1 && phase_sign != -1)
        throw std::invalid_argument("g_spectral: phase_sign must be +1 or -1");

    const double s = 0.5 * spec.gamma;
    const double x2 = x * x;
    // |phase_sign * x^4|: the integrand is cos, even in its phase.
    const double a = std::fabs(static_cast<double>(phase_sign)) * x2 * x2;
    const Quad f = cos_power_integral(a * spec.nu_max, s, n_quad);
    const double scale = 2.0 * spec.amplitude * std::exp(-s * std::log(a));
    const double value = scale * f.value;
    const double err = scale * f.err;
    const double rel = err / std::max(std::fabs(value), 1e-300);
    if (rel > 1e-6)
        throw QuadratureError("covariance",
                              "g_spectral: quadrature error estimate " + std::to_string(rel) +
                                  " exceeds the 1e-6 relative target (n_quad=" +
                                  std::to_string(n_quad) + ")",
                              rel);
    return value;
}

}  // namespace

double g_spectral(double x, const CovarianceSpec& spec, int n_quad) {
    return spectral_eval(x, spec, n_quad, 1);
}

double g_spectral_phase(double x, const CovarianceSpec& spec, int n_quad, int phase_sign) {
    return spectral_eval(x, spec, n_quad, phase_sign);
}

}  // namespace propmc
