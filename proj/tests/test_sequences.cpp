#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "doctest.h"
#include "pexmap/errors.hpp"
#include "pexmap/sequences.hpp"

using namespace pexmap;
using big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<70>>;

namespace {

Params reference() {
    Params p = validate_params(1, 3, 0.025, 0.02);
    p.M = 3;
    return p;
}

// plain value-domain summation of the B0 series at ~233 bits
big oracle_B0(const Params& p, int m, int terms) {
    big g = p.gamma, e1 = p.eps1, e2 = p.eps2;
    big inner = e2 * pow(g, m) + e1 * pow(g, m + 1);
    big acc = exp(-inner);
    for (int i = 1; i < terms; ++i) {
        inner += e2 * pow(g, m + 2 * i) + e1 * pow(g, m + 2 * i + 1);
        acc += exp(-inner);
    }
    return acc;
}

}  // namespace

TEST_CASE("zeta alternates the exponents by index parity") {
    Params p = reference();
    CHECK(zeta(p, 0, 3) == doctest::Approx(0.02 * 27).epsilon(1e-15));
    CHECK(zeta(p, 1, 3) == doctest::Approx(0.025 * 27).epsilon(1e-15));
    CHECK(zeta(p, 4, 0) == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(pow_gamma_i(p, 4) == 81);
    CHECK_THROWS_AS(pow_gamma_i(p, 45), StepOverflow);
}

TEST_CASE("frozen series values at the reference point") {
    Params p = reference();
    // two-term sum: -2.565 + log1p(exp(-23.085))
    CHECK(log_B0(p, 3) == doctest::Approx(-2.5649999999057433750).epsilon(1e-14));
    CHECK(std::exp(log_B0(p, 3)) == doctest::Approx(0.076919181449084638).epsilon(1e-13));
    CHECK(log_L0(p, 4) == doctest::Approx(-2.0249999999057433750).epsilon(1e-14));
    // the excess of L(0
    // , m) over its collar base: E_4 - 1
    CHECK(std::expm1(log_L0(p, 4) + 0.025 * 81) == doctest::Approx(9.4256625027672891e-11).epsilon(1e-4));
    CHECK(C_H(p, 4) == doctest::Approx(-3.6709812037329687).epsilon(1e-14));
    CHECK(C_W(p, 4) == doctest::Approx(-13.012943611198906).epsilon(1e-14));
}

TEST_CASE("high-precision oracle for the truncation policy") {
    Params p = reference();
    big full = oracle_B0(p, 3, 8);        // far past any representable contribution
    big truncated = oracle_B0(p, 3, 2);   // what the 69-nat policy keeps
    big rel = abs(truncated - full) / full;
    CHECK(rel < big("1e-25"));

    double prod = std::exp(log_B0(p, 3));
    big prel = abs(big(prod) - full) / full;
    CHECK(prel < big("1e-13"));
}

TEST_CASE("collar intervals") {
    Params p = reference();
    CHECK(std::exp(log_delta(p, 0)) == doctest::Approx(0.0041150146619445552).epsilon(1e-14));
    CollarIntervals c = collar(p, 81);
    CHECK(c.J.lo.logmag == doctest::Approx(-0.025 * 81).epsilon(1e-15));
    // J is the closed lower third of I
    double lenJ = log_diff_exp(c.J.hi.logmag, c.J.lo.logmag);
    double lenI = log_diff_exp(c.I.hi.logmag, c.I.lo.logmag);
    CHECK(lenI - lenJ == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    // I_k ends exactly where the next collar up begins
    CollarIntervals c80 = collar(p, 80);
    CHECK(c.I.hi.logmag == doctest::Approx(c80.J.lo.logmag).epsilon(1e-13));
    // gap of 4 Delta(k-1) between neighboring J intervals
    LogReal gap = c80.J.lo - c.J.hi;
    CHECK(gap.sign == 1);
    CHECK(gap.logmag == doctest::Approx(std::log(4.0) + log_delta(p, 80)).epsilon(1e-10));
}

TEST_CASE("K neighborhoods are pairwise disjoint down the scale") {
    Params p = reference();
    CollarIntervals prev = collar(p, 1);
    for (int64_t k = 2; k <= 10000; ++k) {
        CollarIntervals cur = collar(p, k);
        CHECK(cur.K.hi < prev.K.lo);
        prev = cur;
    }
}

TEST_CASE("table accessors and index guards") {
    Params p = reference();
    SequenceTable tab(p, 8);
    CHECK(tab.kstar(4) == 54);
    CHECK(tab.logB(0, 4) == doctest::Approx(tab.logB0(4)).epsilon(1e-15));
    CHECK(tab.logW(0, 4) == doctest::Approx(tab.cw(4)).epsilon(1e-15));
    CHECK(tab.logH(0, 4) == doctest::Approx(tab.ch(4)).epsilon(1e-15));
    CHECK_THROWS_AS(tab.logB(81, 4), IndexOutOfRange);
    CHECK_THROWS_AS(tab.logB(-1, 4), IndexOutOfRange);
    CHECK_THROWS_AS(tab.logB(0, 9), IndexOutOfRange);
    CHECK_THROWS_AS(tab.logB(0, 3), IndexOutOfRange);  // at or below the base epoch
}

TEST_CASE("one-step recurrences hold to 1e-12 across three epochs") {
    Params p = reference();
    SequenceTable tab(p, 8);
    for (int m = 4; m <= 6; ++m) {
        RecurrenceReport r = check_recurrences(tab, m, 1e-12);
        INFO(r.worst);
        CHECK(r.ok);
        CHECK(r.checked == 4 * (tab.pow_gamma(m) - 1) + 4);
    }
}

TEST_CASE("a perturbed entry is caught by the recurrence check") {
    Params p = reference();
    SequenceTable tab(p, 8);
    SequenceTable bad = tab.perturbed('B', 40, 4, 1e-9);
    CHECK_FALSE(check_recurrences(bad, 4, 1e-12).ok);
    SequenceTable bad2 = tab.perturbed('H', 0, 5, -1e-9);
    CHECK_FALSE(check_recurrences(bad2, 5, 1e-12).ok);
    CHECK(check_recurrences(tab, 4, 1e-12).ok);  // original is untouched
}

TEST_CASE("suite checks cross-validated by direct enumeration") {
    Params p = reference();
    SequenceTable tab(p, 8);
    for (int m = 4; m <= 5; ++m) {
        int64_t gm = tab.pow_gamma(m), gm1 = tab.pow_gamma(m + 1);
        // one-epoch decay with the halving gain
        for (int64_t k = 1; k <= gm; ++k) {
            CHECK(tab.logB(gm1 - k, m + 1) < tab.logB(gm - k, m) - std::log(2.0));
        }
        // successive-epoch rectangles at the same collar stack strictly below
        for (int64_t k = 1; k <= gm; ++k) {
            double top = log_sum_exp(tab.logB(gm1 - k, m + 1), tab.logH(gm1 - k, m + 1));
            CHECK(top < tab.logB(gm - k, m));
        }
        // the whole stack stays inside the inner strip
        for (int64_t j = 0; j < gm; ++j) {
            CHECK(log_sum_exp(tab.logB(j, m), tab.logH(j, m)) < -p.eps2);
        }
        // H < B on the non-halving range
        for (int64_t j = tab.kstar(m); j < gm; ++j) {
            CHECK(tab.logH(j, m) < tab.logB(j, m));
        }
    }
}

TEST_CASE("strict one-sided decay forms hold at smaller exponents") {
    // at the reference exponents the two-epoch growth of W and the halving deficit
    // of H defeat these pointwise forms for every m; shrinking both exponents
    // restores them at all epochs
    Params small = validate_params(1, 3, 0.012, 0.0096);
    for (int m = 1; m <= 8; ++m) {
        double gm = std::pow(3.0, m), gm2 = std::pow(3.0, m + 2);
        CHECK(C_W(small, m) + small.eps1 * (gm - 1.0) <= -small.eps1 * gm2);
        CHECK(C_H(small, m) < log_B0(small, m));  // worst offset over j is at j = 0
    }
    Params ref = reference();
    CHECK_FALSE(C_H(ref, 4) < log_B0(ref, 4));
    CHECK_FALSE(C_W(ref, 4) + ref.eps1 * 80.0 <= -ref.eps1 * std::pow(3.0, 6));
}

TEST_CASE("epoch-boundary subtraction must use the tail series") {
    Params p = reference();
    SequenceTable tab(p, 8);
    // direct check at m = 4: lambda1 (L(80,4) - exp(-eps1)) against B(0,5)
    double naive = std::log(p.lambda1 *
                            (std::exp(tab.logL(80, 4)) - std::exp(-p.eps1)));
    double tail = p.eps1 * 81.0 + tab.logL0tail(4);
    CHECK(tail == doctest::Approx(tab.logB(0, 5)).epsilon(1e-13));
    // the naive form already loses several digits here and fails entirely for m >= 5
    CHECK(std::fabs(naive - tab.logB(0, 5)) < 1e-4);
    // at m = 5 the true excess is ~1e-31, far below double rounding noise
    double naive5 = std::exp(tab.logL(242, 5)) - std::exp(-p.eps1);
    CHECK(std::fabs(naive5) < 1e-14);
    CHECK(tab.logB(0, 6) - p.eps1 < std::log(1e-25));
    CHECK(std::isfinite(tab.logB(0, 6)));
}
