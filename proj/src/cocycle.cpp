#include "pexmap/cocycle.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "pexmap/errors.hpp"
#include "pexmap/log_real.hpp"
#include "pexmap/sequences.hpp"

namespace pexmap {

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

double log_abs(double v) { return v == 0.0 ? kNegInf : std::log(std::fabs(v)); }

double pow_gamma_d(const Params& p, int s) {
    double v = 1.0;
    for (int i = 0; i < s; ++i) v *= static_cast<double>(p.gamma);
    return v;
}

}  // namespace

TangentState itinerary_state(const Params& p, int m_start, int64_t nsteps, double logc1,
                             double logc2) {
    if (nsteps < 0) throw IndexOutOfRange("negative step count");
    TangentState st{logc1, logc2, m_start, 0};
    int m = m_start;
    int64_t left = nsteps;
    while (left > 0) {
        int64_t block = pow_gamma_i(p, m);  // overflow guard
        if (left >= block) {
            st.c1 += p.eps1 * static_cast<double>(block);
            st.c2 += p.eps2 * static_cast<double>(block);
            std::swap(st.c1, st.c2);
            left -= block;
            ++m;
        } else {
            st.c1 += p.eps1 * static_cast<double>(left);
            st.c2 += p.eps2 * static_cast<double>(left);
            left = 0;
        }
    }
    st.epoch = m;
    st.n = nsteps;
    return st;
}

double cocycle_lognorm(const Params& p, int m0, int64_t nsteps, double alpha, double beta) {
    TangentState st = itinerary_state(p, m0, nsteps, log_abs(alpha), log_abs(beta));
    return 0.5 * log_sum_exp(2.0 * st.c1, 2.0 * st.c2);
}

double pair_sigma(const Params& p, int npairs) {
    double s = 0.0;
    for (int j = 0; j < npairs; ++j) s += pow_gamma_d(p, 2 * j);
    return s;
}

double u_switch(const Params& p, int m, int npairs) {
    return pow_gamma_d(p, m) * (p.gamma - 1.0) * pair_sigma(p, npairs);
}

double phi1(const Params& p, int m, int npairs, double t) {
    double sig = pair_sigma(p, npairs);
    double gm = pow_gamma_d(p, m);
    double num = gm * p.gamma * sig * p.eps1 + (gm * sig + t) * p.eps2;
    double den = gm * (p.gamma + 1.0) * sig + t;
    return num / den;
}

double phi2(const Params& p, int m, int npairs, double t) {
    double sig = pair_sigma(p, npairs);
    double gm = pow_gamma_d(p, m);
    double num = gm * p.gamma * sig * p.eps2 + (gm * sig + t) * p.eps1;
    double den = gm * (p.gamma + 1.0) * sig + t;
    return num / den;
}

double log_c_coeff(const Params& p, int m, int npairs, double k, double alpha, double beta) {
    double u = u_switch(p, m, npairs);
    double la2 = 2.0 * log_abs(alpha), lb2 = 2.0 * log_abs(beta);
    double drop = 2.0 * (p.eps1 - p.eps2);
    if (k <= u) return 0.5 * log_sum_exp(la2 - drop * (u - k), lb2);
    return 0.5 * log_sum_exp(la2, lb2 - drop * (k - u));
}

double closed_form_lognorm(const Params& p, int m, int npairs, int64_t k, double alpha,
                           double beta) {
    double block = pow_gamma_d(p, m + 2 * npairs);
    double kd = static_cast<double>(k);
    if (k < 0 || kd > block) throw IndexOutOfRange("k outside the next block");
    double sig = pair_sigma(p, npairs);
    double gm = pow_gamma_d(p, m);
    double u = u_switch(p, m, npairs);
    double lc = log_c_coeff(p, m, npairs, kd, alpha, beta);
    if (kd <= u) {
        return gm * p.gamma * sig * p.eps1 + (gm * sig + kd) * p.eps2 + lc;
    }
    return gm * p.gamma * sig * p.eps2 + (gm * sig + kd) * p.eps1 + lc;
}

ExponentTrace exponent_trace_from(const Params& p, int m_start, int64_t nmax, double logc1,
                                  double logc2) {
    if (nmax <= 0) throw IndexOutOfRange("trace length must be positive");
    ExponentTrace tr;
    tr.m0 = m_start;
    tr.a.reserve(nmax);
    tr.epoch.reserve(nmax);
    tr.phase.reserve(nmax);
    double c1 = logc1, c2 = logc2;
    int m = m_start;
    int64_t len = pow_gamma_i(p, m), pos = 0;
    for (int64_t i = 0; i < nmax; ++i) {
        c1 += p.eps1;
        c2 += p.eps2;
        ++pos;
        tr.epoch.push_back(m);
        tr.phase.push_back((m - m_start) % 2 == 0 ? 1 : 2);
        if (pos == len) {
            std::swap(c1, c2);
            pos = 0;
            ++m;
            if (i + 1 < nmax) len = pow_gamma_i(p, m);
        }
        tr.a.push_back(0.5 * log_sum_exp(2.0 * c1, 2.0 * c2) / static_cast<double>(i + 1));
    }
    return tr;
}

ExponentTrace exponent_trace(const Params& p, int m0, int64_t nmax, double alpha, double beta) {
    ExponentTrace tr = exponent_trace_from(p, m0, nmax, log_abs(alpha), log_abs(beta));
    tr.alpha = alpha;
    tr.beta = beta;
    return tr;
}

OmegaEstimate omega_interval_estimate(const ExponentTrace& tr, const Params& p,
                                      double tail_fraction) {
    int64_t n = static_cast<int64_t>(tr.a.size());
    int64_t need = 10 * pow_gamma_i(p, tr.m0);
    if (n < need) {
        throw WindowTooShort("trace length " + std::to_string(n) + " below 10*gamma^m0 = " +
                             std::to_string(need));
    }
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw WindowTooShort("tail fraction must lie in (0,1]");
    }
    OmegaEstimate est;
    est.n_last = n;
    est.window = std::max<int64_t>(1, static_cast<int64_t>(tail_fraction * n));
    int64_t begin = n - est.window;

    est.lo = est.hi = tr.a[begin];
    int cur_epoch = -1;
    for (int64_t i = begin; i < n; ++i) {
        double v = tr.a[i];
        if (v < est.lo) est.lo = v;
        if (v > est.hi) est.hi = v;
        if (tr.epoch[i] != cur_epoch) {
            cur_epoch = tr.epoch[i];
            est.block_min.push_back(v);
            est.block_max.push_back(v);
        } else {
            est.block_min.back() = std::min(est.block_min.back(), v);
            est.block_max.back() = std::max(est.block_max.back(), v);
        }
    }

    LimitExponents ex = limit_exponents(p);
    bool mixed = tr.alpha != 0.0 && tr.beta != 0.0;
    est.predicted_lo = mixed ? ex.mean : ex.xi1;
    est.predicted_hi = ex.xi0;
    return est;
}

}  // namespace pexmap
