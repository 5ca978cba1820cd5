#pragma once

#include <array>
#include <cstdint>

namespace propmc {

// Philox4x64 with 10 rounds (Salmon et al., Random123).  A keyed bijection of
// a 256-bit counter; the word layout matches numpy.random.Philox, against
// which the implementation is pinned by known-answer tests.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key);

// Standard normal quantile, Wichura's AS241 (PPND16).  Accurate to roughly
// double precision over (0,1); this exact algorithm is part of the
// reproducibility contract, do not swap it for std::normal_distribution.
double normal_quantile(double u);

// Derives an independent 64-bit seed from (seed, salt).  Used to key
// per-tau-node and per-purpose stream families.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// Counter-based random stream.  Output is a pure function of
// (seed, stream_id, substream, counter): replays are bit-identical and any
// draw can be produced without generating its predecessors.  Distinct
// (seed, stream_id, substream) triples give statistically independent
// sequences, so parallel workers can consume disjoint streams without
// coordination.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream = 0)
        : seed_(seed), stream_(stream_id), substream_(substream) {}

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1), 53-bit resolution.
    double next_uniform();

    // Standard normal via normal_quantile(next_uniform()); exactly one u64 is
    // consumed per draw.
    double next_normal();

    // Uniform integer in [0, n), n >= 1.  Fixed-cost multiply-shift map; the
    // O(n/2^64) bias is irrelevant at ensemble sizes.
    std::uint64_t next_below(std::uint64_t n);

    // Sibling stream with the same (seed, stream_id) and a fresh counter.
    RngStream substream(std::uint64_t k) const { return RngStream(seed_, stream_, k); }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }
    std::uint64_t substream_id() const noexcept { return substream_; }
    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t substream_;
    std::uint64_t counter_ = 0;

    std::uint64_t cached_block_ = ~std::uint64_t{0};
    std::array<std::uint64_t, 4> cache_{};
};

}  // namespace propmc
