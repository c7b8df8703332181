#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pexmap/errors.hpp"
#include "pexmap/wandering.hpp"

using namespace pexmap;

namespace {

Params reference() {
    Params p = validate_params(1, 3, 0.025, 0.02);
    p.M = 3;
    return p;
}

}  // namespace

TEST_CASE("rectangle assembles the four sequences") {
    Params p = reference();
    SequenceTable tab(p, 10);
    Rect r = rectangle(tab, 40, 4);
    CHECK(r.k == 40);
    CHECK(r.m == 4);
    CHECK(r.L.logmag == tab.logL(40, 4));
    CHECK(r.B.logmag == tab.logB(40, 4));
    CHECK(r.W.logmag == tab.logW(40, 4));
    CHECK(r.H.logmag == tab.logH(40, 4));
    CHECK(r.L.sign == 1);
}

TEST_CASE("orbit position bookkeeping") {
    Params p = reference();
    CHECK(orbit_position(p, 4, 0).k == 0);
    CHECK(orbit_position(p, 4, 0).m == 4);
    CHECK(orbit_position(p, 4, 100).k == 19);
    CHECK(orbit_position(p, 4, 100).m == 5);
    OrbitPos e7 = orbit_position(p, 4, 1053);
    CHECK(e7.k == 0);
    CHECK(e7.m == 7);
    CHECK_THROWS_AS(orbit_position(p, 4, -1), IndexOutOfRange);
}

TEST_CASE("the rectangle orbit advances with every cover check green") {
    Params p = reference();
    SequenceTable tab(p, 10);
    ProfilePair prof(tab);
    OrbitPos pos{0, 4};
    for (int64_t t = 0; t < 324; ++t) {
        OrbitPos want = orbit_position(p, 4, t);
        REQUIRE(pos.k == want.k);
        REQUIRE(pos.m == want.m);
        pos = advance_rectangle(tab, prof, pos.k, pos.m);
    }
    CHECK(pos.k == 0);
    CHECK(pos.m == 6);
}

TEST_CASE("tampered tables are caught by the cover checks") {
    Params p = reference();
    SequenceTable tab(p, 10);
    ProfilePair prof(tab);
    CHECK_NOTHROW(advance_rectangle(tab, prof, 40, 4));
    SequenceTable bad = tab.perturbed('B', 40, 4, 1e-9);
    CHECK_THROWS_AS(advance_rectangle(bad, prof, 40, 4), CoverageFailure);
    SequenceTable wide = tab.perturbed('W', 0, 4, std::log(1e6));
    CHECK_THROWS_AS(advance_rectangle(wide, prof, 0, 4), CoverageFailure);
}

TEST_CASE("relative coordinates under halving, translation and the swap") {
    Params p = reference();
    SequenceTable tab(p, 10);
    REQUIRE(tab.kstar(4) == 54);

    RelState a = relative_step(tab, {10, 4, {1, 4}, {1, 4}});
    CHECK(a.k == 11);
    CHECK(a.m == 4);
    CHECK(a.u.num == 1);
    CHECK(a.u.den == 4);
    CHECK(a.v.num == 1);
    CHECK(a.v.den == 2);

    RelState b = relative_step(tab, {10, 4, {1, 2}, {3, 4}});
    CHECK(b.v.num == 1);
    CHECK(b.v.den == 2);

    CHECK_THROWS_AS(relative_step(tab, {10, 4, {1, 4}, {1, 2}}), BoundaryHit);

    // past k* the fold is gone and v rides along unchanged
    RelState c = relative_step(tab, {60, 4, {1, 4}, {1, 2}});
    CHECK(c.k == 61);
    CHECK(c.v.num == 1);
    CHECK(c.v.den == 2);

    RelState d = relative_step(tab, {80, 4, {1, 3}, {2, 5}});
    CHECK(d.k == 0);
    CHECK(d.m == 5);
    CHECK(d.u.num == 2);
    CHECK(d.u.den == 5);
    CHECK(d.v.num == 1);
    CHECK(d.v.den == 3);

    CHECK_THROWS_AS(relative_step(tab, {10, 4, {0, 4}, {1, 3}}), IndexOutOfRange);
    CHECK_THROWS_AS(relative_step(tab, {10, 4, {1, 4}, {3, 3}}), IndexOutOfRange);
}

TEST_CASE("odd-denominator points never meet a fold midpoint") {
    Params p = reference();
    SequenceTable tab(p, 10);
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<int64_t> half(1, 1000000);
    int64_t hits = 0, even_dens = 0;
    for (int s = 0; s < 100000; ++s) {
        int64_t du = 2 * half(rng) + 1, dv = 2 * half(rng) + 1;
        std::uniform_int_distribution<int64_t> nu(1, du - 1), nv(1, dv - 1);
        RelState st{0, 4, {nu(rng), du}, {nv(rng), dv}};
        try {
            for (int t = 0; t < 324; ++t) {
                st = relative_step(tab, st);
                if (st.u.den % 2 == 0 || st.v.den % 2 == 0) ++even_dens;
            }
        } catch (const BoundaryHit&) {
            ++hits;
        }
        if (hits + even_dens > 0) break;
    }
    CHECK(hits == 0);
    CHECK(even_dens == 0);
}

TEST_CASE("the first two epochs of rectangles are pairwise disjoint") {
    Params p = reference();
    SequenceTable tab(p, 10);
    DisjointReport rep = check_disjoint(tab, 4, 324);
    CHECK(rep.rect_count == 324);
    CHECK(rep.disjoint);
    CHECK(rep.bad_i == -1);
    // the separating axis keeps the best direction per pair, so the binding
    // gap is the x-gap between neighbouring deep collars, about 4*Delta(242)
    CHECK(std::isfinite(rep.min_gap_log));
    CHECK(rep.min_gap_log < -9.0);
    CHECK(rep.min_gap_log > -11.0);

    DisjointReport fat = check_disjoint(tab, 4, 324, std::log(1e6));
    CHECK_FALSE(fat.disjoint);
    CHECK(fat.bad_i >= 0);
    CHECK(fat.bad_j > fat.bad_i);
}

TEST_CASE("time near the origin accumulates along the orbit") {
    Params p = reference();
    SequenceTable tab(p, 10);
    std::vector<int64_t> horizons = {1053, 9801, 29484};
    std::vector<BirkhoffPoint> pts = birkhoff_stats(tab, 4, horizons, -0.025 * 243.0);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].inside == 486);
    CHECK(pts[1].inside == 8748);
    CHECK(pts[2].inside == 28188);
    CHECK(pts[0].fraction == doctest::Approx(486.0 / 1053.0).epsilon(1e-15));
    CHECK(pts[0].fraction < pts[1].fraction);
    CHECK(pts[1].fraction < pts[2].fraction);
    CHECK(pts[2].fraction > 0.9);

    // with a radius past the domain diameter every step counts
    std::vector<BirkhoffPoint> all = birkhoff_stats(tab, 4, {100}, std::log(2.0));
    REQUIRE(all.size() == 1);
    CHECK(all[0].fraction == 1.0);
}
