#pragma once

#include <string>

namespace propmc {

// Short-distance exponent families for the averaged causal propagator of the
// random-coefficient wave operator with n (odd, even) coordinate pairs and
// covariance singularity gamma.  All exponents are expressed on the SQUARED
// distance; exponent_on_abs carries the |x| convention (factor 2).
enum class ExponentKind {
    Integrated,      // even coordinates integrated out, power of (x-y)_o^2
    OddHyperplane,   // approach on (x-y)_e = 0
    EvenHyperplane,  // approach on (x-y)_o = 0
    PerturbativeH,   // first order in the metric perturbation, full (x-y)^2
    D3Longitudinal,  // d = 3 mixed case along the random coordinate
    D3Transverse,    // d = 3 mixed case in the deterministic plane
};

struct ExponentPrediction {
    ExponentKind kind;
    int n = 1;
    double gamma = 0.0;
    double exponent_on_square = 0.0;
    double exponent_on_abs = 0.0;
};

// Pure closed forms; total on gamma in [0, 1/2), n >= 1.
double predicted_exponent(ExponentKind kind, int n, double gamma);

ExponentPrediction predict(ExponentKind kind, int n, double gamma);

const char* to_string(ExponentKind kind);
ExponentKind exponent_kind_from_string(const std::string& name);

inline constexpr ExponentKind kAllExponentKinds[] = {
    ExponentKind::Integrated,     ExponentKind::OddHyperplane, ExponentKind::EvenHyperplane,
    ExponentKind::PerturbativeH,  ExponentKind::D3Longitudinal, ExponentKind::D3Transverse,
};

}  // namespace propmc
