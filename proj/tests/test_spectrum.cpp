#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pexmap/errors.hpp"
#include "pexmap/spectrum.hpp"

using namespace pexmap;

namespace {

Params reference() {
    Params p = validate_params(1, 3, 0.025, 0.02);
    p.M = 3;
    return p;
}

std::vector<double> dense_row(const UlamOperator& P, int row) {
    std::vector<double> r(P.ncells(), 0.0);
    for (int64_t j = P.rowptr[row]; j < P.rowptr[row + 1]; ++j) r[P.col[j]] = P.val[j];
    return r;
}

double overlap_frac(double lo, double hi, double a, double b) {
    double o = std::min(hi, b) - std::max(lo, a);
    return o > 0.0 ? o / (hi - lo) : 0.0;
}

// exact transition row for a skeleton cell strictly inside a diagonal branch
double exact_vs_sampled_l1(const UlamOperator& P, const Params& p, int ix, int iy) {
    int n = P.n;
    double xlo = static_cast<double>(ix) / n, xhi = static_cast<double>(ix + 1) / n;
    double ylo = 2.0 * iy / n - 1.0, yhi = 2.0 * (iy + 1) / n - 1.0;
    double ixlo = p.lambda1 * xlo, ixhi = p.lambda1 * xhi;
    double iylo = p.lambda2 * ylo, iyhi = p.lambda2 * yhi;
    std::vector<double> row = dense_row(P, ix * n + iy);
    double l1 = 0.0;
    for (int jx = 0; jx < n; ++jx) {
        double px = overlap_frac(ixlo, ixhi, static_cast<double>(jx) / n,
                                 static_cast<double>(jx + 1) / n);
        for (int jy = 0; jy < n; ++jy) {
            double py = overlap_frac(iylo, iyhi, 2.0 * jy / n - 1.0, 2.0 * (jy + 1) / n - 1.0);
            l1 += std::fabs(row[jx * n + jy] - px * py);
        }
    }
    return l1;
}

}  // namespace

TEST_CASE("rows are exactly stochastic and builds are reproducible") {
    Params p = reference();
    MapModel skel(p, nullptr);
    UlamOperator P = build_ulam(skel, 32, 8, 977);
    CHECK(P.ncells() == 1024);
    for (int row = 0; row < P.ncells(); ++row) {
        double s = 0.0;
        for (int64_t j = P.rowptr[row]; j < P.rowptr[row + 1]; ++j) {
            s += P.val[j];
            CHECK(P.val[j] > 0.0);
        }
        CHECK(s == 1.0);
    }
    UlamOperator Q = build_ulam(skel, 32, 8, 977);
    CHECK(P.col == Q.col);
    CHECK(P.val == Q.val);
    UlamOperator R = build_ulam(skel, 32, 8, 978);
    CHECK((P.col != R.col || P.val != R.val));
    CHECK(P.cell_of(0.999, 0.999) == 1023);
    CHECK(P.cell_of(0.5, -0.999) == 512);
    CHECK_THROWS_AS(build_ulam(skel, 1, 8, 1), IndexOutOfRange);
}

TEST_CASE("sampled rows converge to the exact overlap kernel") {
    Params p = reference();
    MapModel skel(p, nullptr);
    UlamOperator P8 = build_ulam(skel, 32, 8, 977);
    UlamOperator P32 = build_ulam(skel, 32, 32, 977);
    double sum8 = 0.0, sum32 = 0.0;
    int cells = 0;
    for (int ix : {10, 14, 18, 22, 26}) {
        for (int iy : {2, 6, 10, 13}) {
            double d8 = exact_vs_sampled_l1(P8, p, ix, iy);
            double d32 = exact_vs_sampled_l1(P32, p, ix, iy);
            CHECK(d8 <= 0.35);
            CHECK(d32 <= 0.15);
            sum8 += d8;
            sum32 += d32;
            ++cells;
        }
    }
    CHECK(cells == 20);
    CHECK(sum32 < sum8);
}

TEST_CASE("skeleton stationary density") {
    Params p = reference();
    MapModel skel(p, nullptr);
    UlamOperator P = build_ulam(skel, 32, 8, 977);
    SpectralData sd = leading_spectrum(P, 1, 1e-8);
    REQUIRE(sd.eigenvalues.size() == 1);
    CHECK(std::fabs(sd.eigenvalues[0].real() - 1.0) < 1e-9);
    CHECK(std::fabs(sd.eigenvalues[0].imag()) == 0.0);
    CHECK(sd.residuals[0] <= 1e-8);
    double mass = 0.0;
    int negative = 0;
    for (double v : sd.density) {
        mass += v;
        if (v < 0.0) ++negative;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(negative == 0);
    CHECK(sd.iterations > 1);
}

TEST_CASE("support extraction") {
    SpectralData sd;
    sd.n = 8;
    sd.density.assign(64, 1.0 / 64.0);
    SupportInfo uni = acim_supports(sd, 0.1);
    CHECK(uni.q_hat == 1);
    CHECK(static_cast<int>(uni.components[0].size()) == 64);

    // two separated blobs
    std::fill(sd.density.begin(), sd.density.end(), 0.0);
    for (int ix = 0; ix < 2; ++ix)
        for (int iy = 0; iy < 2; ++iy) {
            sd.density[ix * 8 + iy] = 0.1;
            sd.density[(ix + 5) * 8 + iy + 5] = 0.1;
        }
    SupportInfo two = acim_supports(sd, 0.5);
    CHECK(two.q_hat == 2);
    CHECK(two.components[0].size() == two.components[1].size());

    sd.density[3 * 8 + 3] = 0.4;  // unique maximum
    SupportInfo top = acim_supports(sd, 1.0);
    CHECK(top.q_hat == 1);
    CHECK(static_cast<int>(top.components[0].size()) == 1);
    CHECK(top.components[0][0] == 3 * 8 + 3);

    CHECK_THROWS_AS(acim_supports(sd, 0.0), IndexOutOfRange);
    CHECK_THROWS_AS(acim_supports(sd, 1.5), IndexOutOfRange);
}

TEST_CASE("hit-time bookkeeping on fabricated supports") {
    Params p = reference();
    SequenceTable tab(p, 8);
    MapModel skel(p, nullptr);
    SupportInfo everywhere;
    everywhere.mask.assign(16 * 16, 1);
    HitStats all = hit_time_stats(skel, tab, InitialSet::UniformD, 4, everywhere, 16, {0}, 50, 7);
    CHECK(all.hit_fraction == 1.0);
    for (int64_t fh : all.first_hit) CHECK(fh == 0);

    SupportInfo nowhere;
    nowhere.mask.assign(16 * 16, 0);
    HitStats none = hit_time_stats(skel, tab, InitialSet::UniformD, 4, nowhere, 16, {2, 5}, 50, 7);
    CHECK(none.hit_fraction == 0.0);
    REQUIRE(none.fraction_by_horizon.size() == 2);
    CHECK(none.fraction_by_horizon[0].first == 2);
    for (int64_t fh : none.first_hit) CHECK(fh == -1);
    CHECK_THROWS_AS(hit_time_stats(skel, tab, InitialSet::UniformD, 4, nowhere, 16, {}, 50, 7),
                    IndexOutOfRange);
}

TEST_CASE("uniform starts reach the skeleton support quickly") {
    Params p = reference();
    SequenceTable tab(p, 8);
    MapModel skel(p, nullptr);
    UlamOperator P = build_ulam(skel, 64, 8, 20240817);
    SpectralData sd = leading_spectrum(P, 1, 1e-8);
    SupportInfo sup = acim_supports(sd, 0.1);
    CHECK(sup.q_hat >= 1);
    HitStats hs = hit_time_stats(skel, tab, InitialSet::UniformD, 4, sup, 64, {100, 300, 500}, 200,
                                 20240817);
    REQUIRE(hs.fraction_by_horizon.size() == 3);
    CHECK(hs.fraction_by_horizon[0].second <= hs.fraction_by_horizon[1].second);
    CHECK(hs.fraction_by_horizon[1].second <= hs.fraction_by_horizon[2].second);
    CHECK(hs.hit_fraction >= 0.98);
}

TEST_CASE("full-map operator: spectrum, mass location and wandering starts") {
    Params p = reference();
    SequenceTable tab(p, 8);
    ProfilePair prof(tab);
    MapModel full(p, &prof);
    UlamOperator P = build_ulam(full, 64, 16, 20240817);
    for (int row = 0; row < P.ncells(); ++row) {
        double s = 0.0;
        for (int64_t j = P.rowptr[row]; j < P.rowptr[row + 1]; ++j) s += P.val[j];
        CHECK(s == 1.0);
    }

    SpectralData sd = leading_spectrum(P, 3, 1e-4);
    REQUIRE(sd.eigenvalues.size() == 3);
    CHECK(std::fabs(sd.eigenvalues[0].real() - 1.0) < 1e-8);
    double m2 = std::abs(sd.eigenvalues[1]);
    CHECK(m2 > 0.5);
    CHECK(m2 < 0.9999);
    CHECK(sd.residuals[1] <= 1e-4);
    CHECK(sd.residuals[2] <= 1e-4);

    // stationary mass concentrates in the upper half, peaking by the origin
    double upper = 0.0;
    int argmax = 0;
    for (int c = 0; c < P.ncells(); ++c) {
        if (c % 64 >= 32) upper += sd.density[c];
        if (sd.density[c] > sd.density[argmax]) argmax = c;
    }
    CHECK(upper > 0.9);
    CHECK(argmax / 64 <= 1);
    CHECK(argmax % 64 >= 32);
    CHECK(argmax % 64 <= 33);

    // the estimated support count is threshold-stable
    CHECK(acim_supports(sd, 0.1).q_hat == 1);
    CHECK(acim_supports(sd, 0.2).q_hat == 1);

    // points seeded in the wandering rectangle sit on high-density cells at once
    SupportInfo sup = acim_supports(sd, 0.1);
    HitStats wh = hit_time_stats(full, tab, InitialSet::WanderingRectangle, 4, sup, 64, {50}, 200,
                                 20240817);
    CHECK(wh.hit_fraction > 0.9);
    CHECK(wh.first_hit[0] == 0);
}
