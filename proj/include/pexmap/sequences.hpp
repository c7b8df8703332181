#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "pexmap/log_real.hpp"
#include "pexmap/params.hpp"

namespace pexmap {

// zeta_j^(s): eps1 * gamma^s for odd j, eps2 * gamma^s for even j.
double zeta(const Params& p, int j, int s);

// gamma^m as int64 with overflow guard (throws StepOverflow).
int64_t pow_gamma_i(const Params& p, int m);

// Per-epoch series constants. All series are truncated once a term's log falls
// 69 nats (1e-30 relative) below the running log-sum.
double log_B0(const Params& p, int m);
double log_L0(const Params& p, int m);
double log_L0tail(const Params& p, int m);  // log_L0 minus the standalone leading term
double C_H(const Params& p, int m);
double C_W(const Params& p, int m);

// log Delta(j) = -eps1*j + log((1 - exp(-eps1))/6)
double log_delta(const Params& p, int64_t j);

struct Interval {
    LogReal lo, hi;
};

struct CollarIntervals {
    int64_t k;
    Interval I, J, K;  // J = lower third of I, K = Delta(k)-neighborhood of J
};

CollarIntervals collar(const Params& p, int64_t k);

class SequenceTable {
public:
    SequenceTable(const Params& p, int mmax);

    const Params& params() const { return par_; }
    int mmax() const { return mmax_; }

    int64_t pow_gamma(int m) const;
    int64_t kstar(int m) const;  // gamma^m - gamma^(m-1), halving-phase length

    double logB0(int m) const;
    double logL0(int m) const;
    double logL0tail(int m) const;
    double ch(int m) const;
    double cw(int m) const;

    double logB(int64_t k, int m) const;
    double logL(int64_t k, int m) const;
    double logH(int64_t k, int m) const;
    double logW(int64_t k, int m) const;

    LogReal B(int64_t k, int m) const { return LogReal::from_log(logB(k, m)); }
    LogReal L(int64_t k, int m) const { return LogReal::from_log(logL(k, m)); }
    LogReal H(int64_t k, int m) const { return LogReal::from_log(logH(k, m)); }
    LogReal W(int64_t k, int m) const { return LogReal::from_log(logW(k, m)); }

    // Copy with an additive log-bump on one entry; test hook for negative controls.
    SequenceTable perturbed(char field, int64_t k, int m, double dlog) const;

private:
    Params par_;
    int mmax_;
    std::vector<double> b0_, l0_, l0tail_, ch_, cw_;
    std::map<std::tuple<char, int64_t, int>, double> bump_;

    void require_index(int64_t k, int m) const;
    double bump(char field, int64_t k, int m) const;
};

struct SuiteReport {
    int m = 0;
    bool ok = false;
    std::vector<std::pair<std::string, bool>> checks;
};

// The k-free geometric inequality suite at epoch m: one-epoch B decay with the
// halving gain, collar positivity of L - exp(-eps1 k), W inside the collar gap,
// two-epoch L decay, stacking of successive-epoch y-intervals, inner-strip
// clearance, and H < B on the non-halving range.
SuiteReport inequality_suite(const Params& p, int m);

struct RecurrenceReport {
    int m = 0;
    bool ok = false;
    int64_t checked = 0;
    double max_residual = 0.0;
    std::string worst;
};

// All eight one-step identities at epoch m (every admissible k, plus the four
// epoch-boundary identities into epoch m+1), each to |residual| <= tol in log scale.
RecurrenceReport check_recurrences(const SequenceTable& tab, int m, double tol);

}  // namespace pexmap
