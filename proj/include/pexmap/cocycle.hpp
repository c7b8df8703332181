#pragma once

#include <cstdint>
#include <vector>

#include "pexmap/params.hpp"

namespace pexmap {

// Log-magnitudes of the two tangent components along the block itinerary.
// Blocks have lengths gamma^m0, gamma^(m0+1), ...; within a block each step
// multiplies the slots by (lambda1, lambda2), and the block-final step swaps them.
struct TangentState {
    double c1, c2;  // log |component|, -inf for an exactly zero component
    int epoch;      // epoch the next step would fall into
    int64_t n;      // total steps taken
};

struct ExponentTrace {
    double alpha = 0.0, beta = 0.0;
    int m0 = 0;
    std::vector<double> a;    // a[i] = (1/(i+1)) log ||A^(i+1) v||
    std::vector<int> epoch;   // epoch containing step i+1
    std::vector<int> phase;   // 1 for even, 2 for odd block parity relative to m0
};

struct OmegaEstimate {
    double lo = 0.0, hi = 0.0;
    double predicted_lo = 0.0, predicted_hi = 0.0;
    int64_t n_last = 0;
    int64_t window = 0;
    std::vector<double> block_min, block_max;  // per epoch completed inside the window
};

TangentState itinerary_state(const Params& p, int m_start, int64_t nsteps, double logc1, double logc2);

double cocycle_lognorm(const Params& p, int m0, int64_t nsteps, double alpha, double beta);

// Sigma_n = sum_{j=0}^{n-1} gamma^(2j); u_{m,n} = gamma^m (gamma-1) Sigma_n.
double pair_sigma(const Params& p, int npairs);
double u_switch(const Params& p, int m, int npairs);

// Interpolating exponents after n block pairs starting at epoch m, t steps into
// the next block. phi2 exchanges the roles of eps1 and eps2.
double phi1(const Params& p, int m, int npairs, double t);
double phi2(const Params& p, int m, int npairs, double t);

// log of the mixing coefficient c_{n,k} for weights (alpha, beta).
double log_c_coeff(const Params& p, int m, int npairs, double k, double alpha, double beta);

// Exact log ||A^T v|| at T = gamma^m (gamma+1) Sigma_n + k, 0 <= k <= gamma^(m+2n).
double closed_form_lognorm(const Params& p, int m, int npairs, int64_t k, double alpha, double beta);

ExponentTrace exponent_trace(const Params& p, int m0, int64_t nmax, double alpha, double beta);

// Same walk started at epoch m_start from given component log-magnitudes.
ExponentTrace exponent_trace_from(const Params& p, int m_start, int64_t nmax, double logc1, double logc2);

// Tail-window interval estimator; requires trace length >= 10 * gamma^m0.
OmegaEstimate omega_interval_estimate(const ExponentTrace& tr, const Params& p, double tail_fraction);

}  // namespace pexmap
