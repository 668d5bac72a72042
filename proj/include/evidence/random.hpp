#pragma once

#include <array>
#include <cstdint>

namespace evidence {

// Counter-based stream: Philox4x64-10 keyed by (master_seed, stream_id).
// Distinct keys select unrelated permutations of the counter space, so
// streams never overlap regardless of how many values each one consumes.
// The block function below reproduces the reference Philox4x64-10 outputs
// (cross-checked against numpy.random.Philox, whose buffer starts one
// block later because it pre-increments its counter).
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_{master_seed, stream_id}, master_seed_(master_seed), stream_id_(stream_id) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            block_ = philox_block(counter_, key_);
            increment_counter();
            pos_ = 0;
        }
        return block_[pos_++];
    }

    /// Uniform draw strictly inside (0, 1), 53-bit resolution. The top
    /// mantissa value would round to 1.0, so it is clamped to the largest
    /// double below 1 to keep the interval open.
    double uniform01() {
        const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
        return u < 1.0 ? u : 0x1.fffffffffffffp-1;
    }

    static std::array<std::uint64_t, 4> philox_block(const std::array<std::uint64_t, 4>& counter,
                                                     const std::array<std::uint64_t, 2>& key) {
        constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

        std::array<std::uint64_t, 4> c = counter;
        std::array<std::uint64_t, 2> k = key;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * c[0];
            const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * c[2];
            const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const auto lo0 = static_cast<std::uint64_t>(p0);
            const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const auto lo1 = static_cast<std::uint64_t>(p1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        return c;
    }

private:
    void increment_counter() {
        for (auto& word : counter_) {
            if (++word != 0) break;
        }
    }

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
    std::array<std::uint64_t, 4> block_{};
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    int pos_ = 4;
};

} // namespace evidence
