#include "pexmap/sequences.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pexmap/errors.hpp"

namespace pexmap {

namespace {

constexpr double kTruncNats = 69.0;  // ~1e-30 relative
const double kLog2 = std::log(2.0);
const double kNegInf = -std::numeric_limits<double>::infinity();

double pow_gamma_d(const Params& p, int s) {
    double v = 1.0;
    for (int i = 0; i < s; ++i) v *= static_cast<double>(p.gamma);
    return v;
}

// log((exp(eps1) - 1) / 6), the one-sided collar gap at k = 0
double log_d0(const Params& p) {
    return std::log(std::expm1(p.eps1)) - std::log(6.0);
}

}  // namespace

double zeta(const Params& p, int j, int s) {
    return ((j % 2 != 0) ? p.eps1 : p.eps2) * pow_gamma_d(p, s);
}

int64_t pow_gamma_i(const Params& p, int m) {
    if (m < 0) throw IndexOutOfRange("negative epoch");
    int64_t v = 1;
    for (int i = 0; i < m; ++i) {
        if (v > (int64_t{1} << 62) / p.gamma) {
            throw StepOverflow("gamma^" + std::to_string(m) + " exceeds int64 range");
        }
        v *= p.gamma;
    }
    return v;
}

double log_B0(const Params& p, int m) {
    // terms -sum_{j=0}^{2i+1} zeta_j^{(m+j)}, i = 0, 1, ...
    double inner = zeta(p, 0, m) + zeta(p, 1, m + 1);
    double acc = -inner;
    for (int i = 1; i < 64; ++i) {
        inner += zeta(p, 2 * i, m + 2 * i) + zeta(p, 2 * i + 1, m + 2 * i + 1);
        double term = -inner;
        if (term == kNegInf || term < acc - kTruncNats) break;
        acc = log_sum_exp(acc, term);
    }
    return acc;
}

double log_L0tail(const Params& p, int m) {
    // terms -sum_{j=0}^{2i+2} zeta_{j+1}^{(m+j)}, i = 0, 1, ...
    double inner = zeta(p, 1, m) + zeta(p, 2, m + 1) + zeta(p, 3, m + 2);
    double acc = -inner;
    for (int i = 1; i < 64; ++i) {
        inner += zeta(p, 2 * i + 2, m + 2 * i + 1) + zeta(p, 2 * i + 3, m + 2 * i + 2);
        double term = -inner;
        if (term == kNegInf || term < acc - kTruncNats) break;
        acc = log_sum_exp(acc, term);
    }
    return acc;
}

double log_L0(const Params& p, int m) {
    double lead = -zeta(p, 1, m);
    double tail = log_L0tail(p, m);
    if (tail < lead - kTruncNats) return lead;
    return log_sum_exp(lead, tail);
}

namespace {

double halving_total(const Params& p, int m) {
    // T(m) = sum_{i=1}^{floor(m/2)} gamma^(m-2i)
    double t = 0.0;
    for (int i = 1; 2 * i <= m; ++i) t += pow_gamma_d(p, m - 2 * i);
    return t;
}

}  // namespace

double C_H(const Params& p, int m) {
    double s = 0.0;
    for (int i = 0; i <= m - 1; ++i) s += zeta(p, m - i, i);
    double g = static_cast<double>(p.gamma);
    return s - (1.0 - 1.0 / g) * kLog2 * halving_total(p, m);
}

double C_W(const Params& p, int m) {
    double s = 0.0;
    for (int i = 0; i <= m - 1; ++i) s += zeta(p, m - 1 - i, i);
    double g = static_cast<double>(p.gamma);
    return s - (1.0 - 1.0 / g) * kLog2 * halving_total(p, m + 1);
}

double log_delta(const Params& p, int64_t j) {
    return -p.eps1 * static_cast<double>(j) + std::log1p(-std::exp(-p.eps1)) - std::log(6.0);
}

CollarIntervals collar(const Params& p, int64_t k) {
    if (k < 1) throw IndexOutOfRange("collar index must be >= 1");
    CollarIntervals c;
    c.k = k;
    LogReal lo = LogReal::from_log(-p.eps1 * static_cast<double>(k));
    LogReal d_prev = LogReal::from_log(log_delta(p, k - 1));
    LogReal d_self = LogReal::from_log(log_delta(p, k));
    c.I = {lo, lo + d_prev.scaled(std::log(6.0))};
    c.J = {lo, lo + d_prev.scaled(std::log(2.0))};
    c.K = {c.J.lo - d_self, c.J.hi + d_self};
    return c;
}

SequenceTable::SequenceTable(const Params& p, int mmax) : par_(p), mmax_(mmax) {
    if (mmax < 1) throw IndexOutOfRange("mmax must be >= 1");
    pow_gamma_i(p, mmax);  // overflow guard up front
    b0_.resize(mmax + 1, 0.0);
    l0_.resize(mmax + 1, 0.0);
    l0tail_.resize(mmax + 1, 0.0);
    ch_.resize(mmax + 1, 0.0);
    cw_.resize(mmax + 1, 0.0);
    for (int m = 1; m <= mmax; ++m) {
        b0_[m] = log_B0(p, m);
        l0_[m] = log_L0(p, m);
        l0tail_[m] = log_L0tail(p, m);
        ch_[m] = C_H(p, m);
        cw_[m] = C_W(p, m);
    }
}

int64_t SequenceTable::pow_gamma(int m) const { return pow_gamma_i(par_, m); }

int64_t SequenceTable::kstar(int m) const {
    return pow_gamma(m) - pow_gamma(m - 1);
}

void SequenceTable::require_index(int64_t k, int m) const {
    if (m < 1 || m > mmax_) {
        throw IndexOutOfRange("epoch " + std::to_string(m) + " outside table range [1," +
                              std::to_string(mmax_) + "]");
    }
    if (par_.M >= 0 && m <= par_.M) {
        throw IndexOutOfRange("epoch " + std::to_string(m) + " not past base epoch " +
                              std::to_string(par_.M));
    }
    if (k < 0 || k >= pow_gamma(m)) {
        throw IndexOutOfRange("step " + std::to_string(k) + " outside [0, gamma^" +
                              std::to_string(m) + ")");
    }
}

double SequenceTable::bump(char field, int64_t k, int m) const {
    if (bump_.empty()) return 0.0;
    auto it = bump_.find({field, k, m});
    return it == bump_.end() ? 0.0 : it->second;
}

double SequenceTable::logB0(int m) const {
    if (m < 1 || m > mmax_) throw IndexOutOfRange("epoch outside table range");
    return b0_[m];
}
double SequenceTable::logL0(int m) const {
    if (m < 1 || m > mmax_) throw IndexOutOfRange("epoch outside table range");
    return l0_[m];
}
double SequenceTable::logL0tail(int m) const {
    if (m < 1 || m > mmax_) throw IndexOutOfRange("epoch outside table range");
    return l0tail_[m];
}
double SequenceTable::ch(int m) const {
    if (m < 1 || m > mmax_) throw IndexOutOfRange("epoch outside table range");
    return ch_[m];
}
double SequenceTable::cw(int m) const {
    if (m < 1 || m > mmax_) throw IndexOutOfRange("epoch outside table range");
    return cw_[m];
}

double SequenceTable::logB(int64_t k, int m) const {
    require_index(k, m);
    return b0_[m] + par_.eps2 * static_cast<double>(k) + bump('B', k, m);
}

double SequenceTable::logL(int64_t k, int m) const {
    require_index(k, m);
    return l0_[m] + par_.eps1 * static_cast<double>(k) + bump('L', k, m);
}

double SequenceTable::logH(int64_t k, int m) const {
    require_index(k, m);
    int64_t ks = kstar(m);
    int64_t folds = k < ks ? k : ks;
    return ch_[m] + par_.eps2 * static_cast<double>(k) - kLog2 * static_cast<double>(folds) +
           bump('H', k, m);
}

double SequenceTable::logW(int64_t k, int m) const {
    require_index(k, m);
    return cw_[m] + par_.eps1 * static_cast<double>(k) + bump('W', k, m);
}

SequenceTable SequenceTable::perturbed(char field, int64_t k, int m, double dlog) const {
    SequenceTable t(*this);
    t.bump_[{field, k, m}] += dlog;
    return t;
}

SuiteReport inequality_suite(const Params& p, int m) {
    SuiteReport rep;
    rep.m = m;
    double e1 = p.eps1, e2 = p.eps2;
    double gm = pow_gamma_d(p, m), gm1 = pow_gamma_d(p, m + 1), gm2 = pow_gamma_d(p, m + 2);
    double ld0 = log_d0(p);
    double ksm = gm * (1.0 - 1.0 / p.gamma);
    double ksm1 = gm1 * (1.0 - 1.0 / p.gamma);
    double b0m = log_B0(p, m), b0m1 = log_B0(p, m + 1);

    auto push = [&rep](const char* name, bool ok) { rep.checks.emplace_back(name, ok); };

    push("one_epoch_decay", b0m + e2 * (gm - 1.0) < -e1 * gm1);
    push("halving_gain", b0m1 + e2 * gm1 + kLog2 < b0m + e2 * gm);
    push("collar_positivity", e1 * gm + log_L0tail(p, m) < ld0);
    push("w_within_gap", C_W(p, m) + e1 * gm < ld0);
    push("two_epoch_decay", -e1 * gm2 < -e1 * gm + ld0);
    push("stacking", log_sum_exp(b0m1, C_H(p, m + 1) - kLog2 * ksm1) + e2 * gm1 < b0m + e2 * gm);
    push("inner_strip", log_sum_exp(b0m + e2 * (gm - 1.0), C_H(p, m)) < -e2);
    push("nonhalving_HB", C_H(p, m) - kLog2 * ksm < b0m);

    rep.ok = true;
    for (auto& [name, ok] : rep.checks) rep.ok = rep.ok && ok;
    return rep;
}

RecurrenceReport check_recurrences(const SequenceTable& tab, int m, double tol) {
    const Params& p = tab.params();
    RecurrenceReport rep;
    rep.m = m;
    rep.ok = true;

    auto note = [&](double res, const char* what, int64_t k) {
        double a = std::fabs(res);
        ++rep.checked;
        if (a > rep.max_residual) {
            rep.max_residual = a;
            std::ostringstream os;
            os << what << " at k=" << k << ", m=" << m;
            rep.worst = os.str();
        }
        if (a > tol) rep.ok = false;
    };

    int64_t gm = tab.pow_gamma(m), ks = tab.kstar(m);
    for (int64_t k = 0; k + 1 < gm; ++k) {
        note(tab.logB(k + 1, m) - tab.logB(k, m) - p.eps2, "B step", k);
        note(tab.logL(k + 1, m) - tab.logL(k, m) - p.eps1, "L step", k);
        note(tab.logW(k + 1, m) - tab.logW(k, m) - p.eps1, "W step", k);
        double dh = tab.logH(k + 1, m) - tab.logH(k, m) - p.eps2;
        if (k + 1 <= ks) dh += kLog2;
        note(dh, "H step", k);
    }

    // epoch boundary: the new bottom is lambda2 B, the new left edge is
    // lambda1 (L - exp(-eps1)) which reduces term-by-term to the tail series
    note(tab.logL(0, m + 1) - p.eps2 - tab.logB(gm - 1, m), "L boundary", gm - 1);
    note(tab.logB(0, m + 1) - p.eps1 * static_cast<double>(gm) - tab.logL0tail(m), "B boundary",
         gm - 1);
    note(tab.logW(0, m + 1) - p.eps2 - tab.logH(gm - 1, m), "W boundary", gm - 1);
    note(tab.logH(0, m + 1) - p.eps1 - tab.logW(gm - 1, m), "H boundary", gm - 1);
    return rep;
}

int find_min_epoch(const Params& p, int m_probe, int ceiling) {
    if (m_probe < 1) throw IndexOutOfRange("m_probe must be >= 1");
    for (int M = 0; M <= ceiling; ++M) {
        bool ok = true;
        for (int m = M + 1; m <= M + m_probe && ok; ++m) {
            ok = inequality_suite(p, m).ok;
        }
        if (ok) return M;
    }
    throw EpochNotFound("no base epoch satisfies the inequality suite up to M = " +
                        std::to_string(ceiling));
}

}  // namespace pexmap
