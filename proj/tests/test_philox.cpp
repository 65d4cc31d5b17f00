#include <doctest.h>

#include <cmath>
#include <vector>

#include "llsi/philox.hpp"

using namespace llsi;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 distribution's kat_vectors file.
    auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("counter_normal is a pure function of its key") {
    CHECK(counter_normal(42, 10, 20) == counter_normal(42, 10, 20));
    CHECK(counter_normal(42, 10, 20) != counter_normal(43, 10, 20));
    CHECK(counter_normal(42, 10, 20) != counter_normal(42, 11, 20));
}

TEST_CASE("counter_normal moments") {
    double sum = 0, sum2 = 0;
    int n = 200000;
    for (int i = 0; i < n; ++i) {
        double z = counter_normal(7, uint32_t(i % 1000), uint32_t(i / 1000));
        sum += z;
        sum2 += z * z;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}
