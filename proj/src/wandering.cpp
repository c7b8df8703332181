#include "pexmap/wandering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pexmap/errors.hpp"

namespace pexmap {

namespace {

const double kLog2 = std::log(2.0);
constexpr double kCoverTol = 1e-12;

void cover_check(bool ok, const char* what, int64_t k, int m) {
    if (ok) return;
    std::ostringstream os;
    os << "cover check failed: " << what << " at k=" << k << ", m=" << m;
    throw CoverageFailure(os.str());
}

}  // namespace

Rect rectangle(const SequenceTable& tab, int64_t k, int m) {
    return {k, m, tab.L(k, m), tab.B(k, m), tab.W(k, m), tab.H(k, m)};
}

OrbitPos orbit_position(const Params& p, int m_start, int64_t t) {
    if (t < 0) throw IndexOutOfRange("negative orbit time");
    int m = m_start;
    while (t >= pow_gamma_i(p, m)) {
        t -= pow_gamma_i(p, m);
        ++m;
    }
    return {t, m};
}

OrbitPos advance_rectangle(const SequenceTable& tab, const ProfilePair& profile, int64_t k, int m) {
    const Params& p = tab.params();
    int64_t gm = tab.pow_gamma(m), ks = tab.kstar(m);
    int64_t kappa = gm - k;

    // placement: the x-edge [L, L+W] must sit inside the collar strip J_kappa;
    // the true excess of L over the collar base underflows double log-magnitudes
    // for deep epochs, so ties within the tolerance pass
    Rect cur = rectangle(tab, k, m);
    CollarIntervals c = collar(p, kappa);
    cover_check(!(cur.L < c.J.lo.scaled(-kCoverTol)), "left edge at the collar base", k, m);
    cover_check(cur.L + cur.W < c.J.hi, "right edge inside J", k, m);

    if (k + 1 == gm) {
        // epoch boundary through the swap region: x' = lambda2 y, y' = lambda1 (x - exp(-eps1))
        double r1 = p.eps2 + tab.logB(k, m) - tab.logL(0, m + 1);
        double r2 = p.eps2 + tab.logH(k, m) - tab.logW(0, m + 1);
        double r3 = p.eps1 * static_cast<double>(gm) + tab.logL0tail(m) - tab.logB(0, m + 1);
        double r4 = p.eps1 + tab.logW(k, m) - tab.logH(0, m + 1);
        cover_check(std::fabs(r1) <= kCoverTol, "swap bottom -> left", k, m);
        cover_check(std::fabs(r2) <= kCoverTol, "swap height -> width", k, m);
        cover_check(std::fabs(r3) <= kCoverTol, "swap left -> bottom (tail series)", k, m);
        cover_check(std::fabs(r4) <= kCoverTol, "swap width -> height", k, m);
        return {0, m + 1};
    }

    double rx1 = p.eps1 + tab.logL(k, m) - tab.logL(k + 1, m);
    double rx2 = p.eps1 + tab.logW(k, m) - tab.logW(k + 1, m);
    cover_check(std::fabs(rx1) <= kCoverTol, "horizontal stretch L", k, m);
    cover_check(std::fabs(rx2) <= kCoverTol, "horizontal stretch W", k, m);

    if (k + 1 <= ks) {
        // halving step: the plateau over this collar is the current fold curve,
        // both halves land on [lambda2 B, lambda2 (B + H/2)]
        double lf = log_sum_exp(tab.logB(k, m), tab.logH(k, m) - kLog2);
        double le = tab.logH(k, m) - kLog2;
        cover_check(std::fabs(lf - profile.log_f_plateau(kappa)) <= kCoverTol,
                    "fold curve alignment (f)", k, m);
        cover_check(std::fabs(le - profile.log_eta_plateau(kappa)) <= kCoverTol,
                    "fold curve alignment (eta)", k, m);
        double r1 = p.eps2 + tab.logB(k, m) - tab.logB(k + 1, m);
        double r2 = p.eps2 + lf - log_sum_exp(tab.logB(k + 1, m), tab.logH(k + 1, m));
        cover_check(std::fabs(r1) <= kCoverTol, "halving bottom", k, m);
        cover_check(std::fabs(r2) <= kCoverTol, "halving top", k, m);
    } else {
        double r1 = p.eps2 + tab.logB(k, m) - tab.logB(k + 1, m);
        double r2 = p.eps2 + tab.logH(k, m) - tab.logH(k + 1, m);
        cover_check(std::fabs(r1) <= kCoverTol, "translated bottom", k, m);
        cover_check(std::fabs(r2) <= kCoverTol, "translated height", k, m);
        if (kappa > tab.pow_gamma(p.M)) {
            // an older rectangle's fold curve sits over this collar; the current
            // rectangle passes strictly below even its bottom edge
            int mo = profile.m_of(kappa);
            double old_bottom = tab.logB(tab.pow_gamma(mo) - kappa, mo);
            double top = log_sum_exp(tab.logB(k, m), tab.logH(k, m));
            cover_check(top < old_bottom, "pass under the older fold", k, m);
        }
    }
    return {k + 1, m};
}

namespace {

Rational reduced(int64_t num, int64_t den) {
    int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

}  // namespace

RelState relative_step(const SequenceTable& tab, const RelState& st) {
    if (st.u.num <= 0 || st.u.num >= st.u.den || st.v.num <= 0 || st.v.num >= st.v.den) {
        throw IndexOutOfRange("relative coordinates must lie strictly inside (0,1)");
    }
    int64_t gm = tab.pow_gamma(st.m), ks = tab.kstar(st.m);
    RelState out = st;
    if (st.k + 1 == gm) {
        out.k = 0;
        out.m = st.m + 1;
        out.u = st.v;
        out.v = st.u;
        return out;
    }
    out.k = st.k + 1;
    if (st.k + 1 <= ks) {
        int64_t twice = 2 * st.v.num;
        if (twice == st.v.den) throw BoundaryHit("fold midpoint v = 1/2");
        out.v = twice < st.v.den ? reduced(twice, st.v.den) : reduced(twice - st.v.den, st.v.den);
    }
    return out;
}

DisjointReport check_disjoint(const SequenceTable& tab, int m_start, int64_t steps,
                              double w_inflate_log) {
    DisjointReport rep;
    rep.m_start = m_start;
    rep.steps = steps;

    std::vector<Rect> rects;
    rects.reserve(steps);
    OrbitPos pos{0, m_start};
    for (int64_t t = 0; t < steps; ++t) {
        Rect r = rectangle(tab, pos.k, pos.m);
        r.W = r.W.scaled(w_inflate_log);
        rects.push_back(r);
        pos = pos.k + 1 < tab.pow_gamma(pos.m) ? OrbitPos{pos.k + 1, pos.m}
                                               : OrbitPos{0, pos.m + 1};
    }
    rep.rect_count = static_cast<int64_t>(rects.size());

    rep.disjoint = true;
    bool first = true;
    for (size_t i = 0; i < rects.size(); ++i) {
        for (size_t j = i + 1; j < rects.size(); ++j) {
            const Rect &a = rects[i], &b = rects[j];
            LogReal sx = std::max(b.L - (a.L + a.W), a.L - (b.L + b.W));
            LogReal sy = std::max(b.B - (a.B + a.H), a.B - (b.B + b.H));
            LogReal sep = std::max(sx, sy);
            if (sep.sign <= 0) {
                rep.disjoint = false;
                if (rep.bad_i < 0) {
                    rep.bad_i = static_cast<int64_t>(i);
                    rep.bad_j = static_cast<int64_t>(j);
                }
                continue;
            }
            if (first || sep.logmag < rep.min_gap_log) {
                rep.min_gap_log = sep.logmag;
                first = false;
            }
        }
    }
    return rep;
}

std::vector<BirkhoffPoint> birkhoff_stats(const SequenceTable& tab, int m_start,
                                          const std::vector<int64_t>& horizons,
                                          double log_radius) {
    std::vector<int64_t> hs = horizons;
    std::sort(hs.begin(), hs.end());
    std::vector<BirkhoffPoint> out;
    if (hs.empty()) return out;

    OrbitPos pos{0, m_start};
    int64_t inside = 0;
    size_t next = 0;
    for (int64_t t = 0; t < hs.back(); ++t) {
        double logd = 0.5 * log_sum_exp(2.0 * tab.logL(pos.k, pos.m), 2.0 * tab.logB(pos.k, pos.m));
        // distances within the tolerance of the radius count as outside, so
        // collars that touch the ball boundary do not flip with rounding
        if (logd < log_radius - kCoverTol) ++inside;
        while (next < hs.size() && t + 1 == hs[next]) {
            out.push_back({hs[next], inside,
                           static_cast<double>(inside) / static_cast<double>(hs[next])});
            ++next;
        }
        pos = pos.k + 1 < tab.pow_gamma(pos.m) ? OrbitPos{pos.k + 1, pos.m}
                                               : OrbitPos{0, pos.m + 1};
    }
    return out;
}

}  // namespace pexmap
