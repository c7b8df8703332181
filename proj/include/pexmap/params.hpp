#pragma once

#include <cstdint>

namespace pexmap {

struct Params {
    int r = 1;
    int gamma = 3;
    double eps1 = 0.025;
    double eps2 = 0.02;
    double lambda1 = 0.0;  // exp(eps1)
    double lambda2 = 0.0;  // exp(eps2)
    double sigma = 0.0;    // 1 - eps2/eps1
    int M = -1;            // base epoch, -1 until find_min_epoch has run
};

struct LimitExponents {
    double xi0;   // (gamma*eps1 + eps2) / (gamma + 1)
    double xi1;   // (eps1 + gamma*eps2) / (gamma + 1)
    double mean;  // (eps1 + eps2) / 2
    double rho;   // eps1 / (gamma + 1)
};

// Upper admissibility bound for eps1: gamma^-3 * (2 - 1/r)^2 * log 2.
double eps1_upper_bound(int r, int gamma);

// Checks all parameter invariants, fills the derived fields, throws BoundViolation
// (message names the violated inequality and its slack) otherwise.
Params validate_params(int r, int gamma, double eps1, double eps2);

// Same base map with eps2 adjusted so that 1 - eps2/eps1 == sigma.
Params params_for_sigma(const Params& base, double sigma);

LimitExponents limit_exponents(const Params& p);

// Smallest M such that the geometric inequality suite holds for
// m = M+1 .. M+m_probe. Throws EpochNotFound past the ceiling.
int find_min_epoch(const Params& p, int m_probe, int ceiling = 40);

}  // namespace pexmap
