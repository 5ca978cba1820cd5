#include "propmc/rng.hpp"

#include <cmath>

namespace propmc {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
    std::array<std::uint64_t, 4> c = counter;
    std::uint64_t k0 = key[0];
    std::uint64_t k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c[0], hi0, lo0);
        mulhilo(kPhiloxM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return c;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return philox4x64({salt, 0x70726f706d63ull /* "propmc" */, 0, 0}, {seed, 0})[0];
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t block = counter_ >> 2;
    if (block != cached_block_) {
        cache_ = philox4x64({block, substream_, 0, 0}, {seed_, stream_});
        cached_block_ = block;
    }
    const std::uint64_t word = cache_[counter_ & 3];
    ++counter_;
    return word;
}

double RngStream::next_uniform() {
    // 53 high bits, offset to the cell centre: strictly inside (0,1).
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double RngStream::next_normal() { return normal_quantile(next_uniform()); }

std::uint64_t RngStream::next_below(std::uint64_t n) {
    const unsigned __int128 p = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(p >> 64);
}

// AS241 PPND16 (Wichura 1988).  Three rational approximations: central region
// |u-1/2| <= 0.425, then two tail regimes on r = sqrt(-log(min(u,1-u))).
double normal_quantile(double u) {
    const double q = u - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                      6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                    1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }

    double r = (q < 0.0) ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return (q < 0.0) ? -value : value;
}

}  // namespace propmc
