#include "propmc/exponents.hpp"

#include <stdexcept>

namespace propmc {

double predicted_exponent(ExponentKind kind, int n, double gamma) {
    if (!(gamma >= 0.0 && gamma < 0.5))
        throw std::invalid_argument("predicted_exponent: gamma must lie in [0, 0.5), got " +
                                    std::to_string(gamma));
    if (n < 1) throw std::invalid_argument("predicted_exponent: n must be >= 1");
    const double b = 1.0 - gamma;
    const double half_n = 0.5 * n;
    switch (kind) {
        case ExponentKind::Integrated:
            return -half_n + 1.0 / b;
        case ExponentKind::OddHyperplane:
            return -half_n + (1.0 - half_n) / b;
        case ExponentKind::EvenHyperplane:
            return -half_n + 1.0 - half_n * b;
        case ExponentKind::PerturbativeH:
            return -n + 1.0 + 0.5 * (2.0 - n) * gamma / b;
        // The d = 3 values are fixed by the mixed one-pair-one-deterministic
        // configuration, not by the all-pairs formulas above.
        case ExponentKind::D3Longitudinal:
            return -0.5;
        case ExponentKind::D3Transverse:
            return 0.5 * (gamma - 1.0);
    }
    throw std::invalid_argument("predicted_exponent: unknown kind");
}

ExponentPrediction predict(ExponentKind kind, int n, double gamma) {
    ExponentPrediction p;
    p.kind = kind;
    p.n = n;
    p.gamma = gamma;
    p.exponent_on_square = predicted_exponent(kind, n, gamma);
    p.exponent_on_abs = 2.0 * p.exponent_on_square;
    return p;
}

const char* to_string(ExponentKind kind) {
    switch (kind) {
        case ExponentKind::Integrated: return "integrated";
        case ExponentKind::OddHyperplane: return "odd_hyperplane";
        case ExponentKind::EvenHyperplane: return "even_hyperplane";
        case ExponentKind::PerturbativeH: return "perturbative_h";
        case ExponentKind::D3Longitudinal: return "d3_longitudinal";
        case ExponentKind::D3Transverse: return "d3_transverse";
    }
    return "unknown";
}

ExponentKind exponent_kind_from_string(const std::string& name) {
    for (const ExponentKind kind : kAllExponentKinds)
        if (name == to_string(kind)) return kind;
    throw std::invalid_argument("unknown exponent kind '" + name + "'");
}

}  // namespace propmc
