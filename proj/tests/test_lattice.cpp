#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hexscat/lattice.hpp"

using namespace hexscat;

TEST_CASE("distance case values") {
    CHECK(dist(DistKind::D, {1, 1}) == 2);
    CHECK(dist(DistKind::D, {0, 0}) == 0);
    CHECK(dist(DistKind::D, {3, -2}) == 3);
    CHECK(dist(DistKind::D, {-4, -1}) == 5);
    CHECK(dist(DistKind::D12, {1, 1}) == 1);
    CHECK(dist(DistKind::D12, {-1, 2}) == 1);
    CHECK(dist(DistKind::D12, {2, -3}) == 3);
    CHECK(dist(DistKind::D12, {-2, -1}) == 3);
    CHECK(dist(DistKind::D21, {1, 1}) == 2);  // = d12(-1,-1)
}

TEST_CASE("d12 reflection identity") {
    for (int n1 = -6; n1 <= 6; ++n1)
        for (int n2 = -6; n2 <= 6; ++n2)
            CHECK(dist(DistKind::D12, {n1, n2}) == dist(DistKind::D21, {-n1, -n2}));
}

TEST_CASE("hex coordinate charts") {
    CHECK(hex_coords({0, 0}) == HexCoords{Parity::even, 0, 0});
    CHECK(hex_coords({1, 1}) == HexCoords{Parity::even, 1, 0});
    CHECK(hex_coords({0, 1}) == HexCoords{Parity::odd, 0, 0});

    for (int n1 = -7; n1 <= 7; ++n1)
        for (int n2 = -7; n2 <= 7; ++n2) {
            const LatticeSite n{n1, n2};
            const HexCoords h = hex_coords(n);
            CHECK(site_from_hex(h) == n);
            const bool even = ((n1 + n2) % 2 + 2) % 2 == 0;
            CHECK((h.parity == Parity::even) == even);
        }
}

TEST_CASE("distance lemmas on small boxes") {
    const LatticeReport r1 = verify_distance_lemmas(1);
    CHECK(r1.all_pass);
    const LatticeReport r3 = verify_distance_lemmas(3);
    CHECK(r3.all_pass);
    for (const auto& c : r3.checks) {
        INFO(c.name << " " << c.counterexample);
        CHECK(c.pass);
    }
}

TEST_CASE("verify rejects bad radius") {
    CHECK_THROWS_AS(verify_distance_lemmas(0), std::invalid_argument);
}
