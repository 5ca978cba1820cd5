#include "propmc/gamma.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "propmc/errors.hpp"
#include "propmc/parallel.hpp"

namespace propmc {

std::vector<double> GammaEnsemble::values() const {
    std::vector<double> v(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) v[i] = samples[i].value;
    return v;
}

namespace {

// Inner double sum.  G couples both time indices, so no prefix caching is
// possible for gamma > 0: the cost is genuinely O(N^2) per sample.
// `Checked` handles the epsilon = 0 singular-argument skip; instantiations
// keep the branch out of the regularised path.
template <bool Checked, class G>
GammaSample accumulate_pairs(const double* da, const double* bv, int n, const G& g) {
    GammaSample out;
    double acc = 0.0;
    for (int i = 1; i < n; ++i) {
        const double bi = bv[i];
        double inner = 0.0;
        for (int j = 0; j < i; ++j) {
            const double dx = bi - bv[j];
            if constexpr (Checked) {
                if (dx == 0.0) {
                    ++out.n_singular_hits;
                    continue;
                }
            }
            inner += da[j] * g(dx);
        }
        acc += da[i] * inner;
    }
    out.value = 2.0 * acc;
    return out;
}

struct ConstG {
    double amp;
    double operator()(double) const { return amp; }
};
struct InvSqrtSqrtG {
    double eps2;
    double amp;
    double operator()(double x) const { return amp / std::sqrt(std::sqrt(x * x + eps2)); }
};
struct InvSqrtG {
    double eps2;
    double amp;
    double operator()(double x) const { return amp / std::sqrt(x * x + eps2); }
};
struct GeneralG {
    double eps2;
    double amp;
    double gamma;
    double operator()(double x) const { return amp * std::exp(-gamma * std::log(x * x + eps2)); }
};

}  // namespace

GammaSample gamma_estimate(const BrownianPath& path_a, const BrownianPath& path_b,
                           const CovarianceSpec& spec) {
    spec.validate();
    if (spec.form != CovForm::PowerLaw)
        throw std::invalid_argument(
            "gamma_estimate: spec.form must be PowerLaw (Spectral is a validation form)");
    const TimeGrid& ga = path_a.grid;
    const TimeGrid& gb = path_b.grid;
    if (ga.n_steps != gb.n_steps || ga.tau != gb.tau)
        throw std::invalid_argument("gamma_estimate: paths must share one grid");
    const int n = ga.n_steps;
    if (static_cast<int>(path_a.increments.size()) != n ||
        static_cast<int>(path_b.values.size()) != n + 1)
        throw std::invalid_argument("gamma_estimate: malformed path arrays");
    for (int i = 0; i < n; ++i) {
        if (std::isnan(path_a.increments[i]) || std::isnan(path_b.values[i]))
            throw std::invalid_argument("gamma_estimate: NaN in path data");
    }

    const double* da = path_a.increments.data();
    const double* bv = path_b.values.data();  // left endpoints t_0 .. t_{N-1}
    const PowerKernel kernel(spec.gamma, spec.epsilon, spec.amplitude);
    const double eps2 = kernel.eps2();
    const double amp = kernel.amplitude();
    const bool check = (spec.epsilon == 0.0 && spec.gamma > 0.0);

    GammaSample out;
    switch (kernel.mode()) {
        case PowerKernel::Mode::Const:
            out = accumulate_pairs<false>(da, bv, n, ConstG{amp});
            break;
        case PowerKernel::Mode::InvSqrtSqrt:
            out = check ? accumulate_pairs<true>(da, bv, n, InvSqrtSqrtG{eps2, amp})
                        : accumulate_pairs<false>(da, bv, n, InvSqrtSqrtG{eps2, amp});
            break;
        case PowerKernel::Mode::InvSqrt:
            out = check ? accumulate_pairs<true>(da, bv, n, InvSqrtG{eps2, amp})
                        : accumulate_pairs<false>(da, bv, n, InvSqrtG{eps2, amp});
            break;
        case PowerKernel::Mode::General:
            out = check ? accumulate_pairs<true>(da, bv, n, GeneralG{eps2, amp, spec.gamma})
                        : accumulate_pairs<false>(da, bv, n, GeneralG{eps2, amp, spec.gamma});
            break;
    }

    if (!std::isfinite(out.value))
        throw NumericalError("gamma", "gamma_estimate: non-finite estimate");
    return out;
}

GammaEnsemble gamma_ensemble(const TimeGrid& grid, const CovarianceSpec& spec, int n_samples,
                             std::uint64_t seed, int threads) {
    if (n_samples < 2)
        throw std::invalid_argument("gamma_ensemble: n_samples must be >= 2, got " +
                                    std::to_string(n_samples));
    spec.validate();

    GammaEnsemble ens;
    ens.config = GammaConfig{grid, spec, seed, false};
    ens.samples.resize(static_cast<std::size_t>(n_samples));
    parallel_for(static_cast<std::size_t>(n_samples), threads, [&](std::size_t i) {
        try {
            RngStream base(seed, i);
            const auto [path_a, path_b] = sample_pair(grid, base);
            ens.samples[i] = gamma_estimate(path_a, path_b, spec);
        } catch (const std::exception& e) {
            throw NumericalError("gamma", "gamma_ensemble: sample " + std::to_string(i) +
                                              " failed: " + e.what());
        }
    });
    return ens;
}

GammaEnsemble constant_ensemble(const TimeGrid& grid, double value, int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("constant_ensemble: n_samples must be >= 2");
    GammaEnsemble ens;
    ens.config.grid = grid;
    ens.config.constant = true;
    ens.samples.assign(static_cast<std::size_t>(n_samples), GammaSample{value, 0});
    return ens;
}

}  // namespace propmc
