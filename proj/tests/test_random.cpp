#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "evidence/random.hpp"

using evidence::RandomStream;

TEST_CASE("philox_block reference vectors, key (1, 0)") {
    const std::array<std::uint64_t, 2> key{1, 0};

    auto out = RandomStream::philox_block({0, 0, 0, 0}, key);
    CHECK(out[0] == 0xcb7ea744cf19bb4cULL);
    CHECK(out[1] == 0xa34eacbe1377d650ULL);
    CHECK(out[2] == 0xe8dbce5eb7b8301fULL);
    CHECK(out[3] == 0x344790248cacfe2fULL);

    out = RandomStream::philox_block({1, 0, 0, 0}, key);
    CHECK(out[0] == 0x4db6a27b756282dfULL);
    CHECK(out[1] == 0xd944fa03babe0e2fULL);
    CHECK(out[2] == 0x27f872e577060d32ULL);
    CHECK(out[3] == 0x07f697696a0482a2ULL);

    out = RandomStream::philox_block({2, 0, 0, 0}, key);
    CHECK(out[0] == 0xe677fe4bbd0452ecULL);
    CHECK(out[1] == 0x0d543dba56d1e799ULL);
    CHECK(out[2] == 0xbebe12cad0eb4d9eULL);
    CHECK(out[3] == 0x3f0b4abd55f61f3dULL);
}

TEST_CASE("philox_block cross checks against numpy.random.Philox") {
    // numpy's generator pre-increments, so its first emitted block is the
    // block function evaluated at counter 1.
    auto out = RandomStream::philox_block({1, 0, 0, 0}, {1, 1});
    CHECK(out[0] == 0x133d1b1836b49e25ULL);
    CHECK(out[1] == 0xfbd9ff744933275eULL);
    CHECK(out[2] == 0xf289b1b94ef9e741ULL);
    CHECK(out[3] == 0xb298f47f8b702464ULL);

    out = RandomStream::philox_block({1, 0, 0, 0}, {0xDEADBEEFULL, 42});
    CHECK(out[0] == 0xc034e4902491f0c5ULL);
    CHECK(out[1] == 0xdbc01b80a7a86cceULL);
    CHECK(out[2] == 0xf1c050f03ce74ac6ULL);
    CHECK(out[3] == 0xc5cfa6d22bfbbfa2ULL);
}

TEST_CASE("next_u64 walks blocks in counter order") {
    RandomStream stream(1, 0);
    const std::array<std::uint64_t, 2> key{1, 0};
    const auto block0 = RandomStream::philox_block({0, 0, 0, 0}, key);
    const auto block1 = RandomStream::philox_block({1, 0, 0, 0}, key);
    for (const auto want : block0) CHECK(stream.next_u64() == want);
    for (const auto want : block1) CHECK(stream.next_u64() == want);
}

TEST_CASE("streams are deterministic and keyed by (seed, stream)") {
    RandomStream a(7, 3);
    RandomStream b(7, 3);
    RandomStream other_stream(7, 4);
    RandomStream other_seed(8, 3);
    bool stream_differs = false;
    bool seed_differs = false;
    for (int i = 0; i < 64; ++i) {
        const auto v = a.next_u64();
        CHECK(v == b.next_u64());
        stream_differs |= v != other_stream.next_u64();
        seed_differs |= v != other_seed.next_u64();
    }
    CHECK(stream_differs);
    CHECK(seed_differs);
}

TEST_CASE("uniform01 lies strictly inside (0, 1)") {
    RandomStream stream(99, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = stream.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    // Extremes of the mapping itself stay inside the open interval. The raw
    // top value rounds to 1.0, which is why uniform01 clamps it.
    const double lo = (0.0 + 0.5) * 0x1p-53;
    const double hi = (static_cast<double>((~0ULL) >> 11) + 0.5) * 0x1p-53;
    CHECK(lo > 0.0);
    CHECK(hi == 1.0);
    CHECK(0x1.fffffffffffffp-1 < 1.0);
}

TEST_CASE("uniform01 passes a Kolmogorov-Smirnov test at the 1% level") {
    RandomStream stream(12345, 6);
    const int n = 100000;
    std::vector<double> u(n);
    for (auto& v : u) v = stream.uniform01();
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ecdf_hi = static_cast<double>(i + 1) / n;
        const double ecdf_lo = static_cast<double>(i) / n;
        ks = std::max(ks, std::max(ecdf_hi - u[i], u[i] - ecdf_lo));
    }
    CHECK(ks < 0.0051545125860744583); // 1.63 / sqrt(1e5)
    double sum = 0.0;
    for (const auto v : u) sum += v;
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}
