#pragma once

#include <cstdint>
#include <vector>

#include "pexmap/log_real.hpp"
#include "pexmap/map.hpp"
#include "pexmap/sequences.hpp"

namespace pexmap {

// Axis-aligned rectangle with corner (L, B) and extents (W, H), all positive.
struct Rect {
    int64_t k;
    int m;
    LogReal L, B, W, H;
};

Rect rectangle(const SequenceTable& tab, int64_t k, int m);

struct OrbitPos {
    int64_t k;
    int m;
};

// Position after t steps from (0, m_start): full epochs have gamma^m steps.
OrbitPos orbit_position(const Params& p, int m_start, int64_t t);

// One step of the rectangle orbit with geometric cover checks: the F-image of
// R(k, m) must coincide with R(k', m') (boundary identities via the tail series,
// fold alignment against the profile plateaus, pass-under clearance in the
// non-halving phase). Throws CoverageFailure with the failed check.
OrbitPos advance_rectangle(const SequenceTable& tab, const ProfilePair& profile, int64_t k, int m);

// Exact rational coordinates relative to the current rectangle:
// point = (L + u W, B + v H), 0 < u, v < 1.
struct Rational {
    int64_t num, den;
};

struct RelState {
    int64_t k;
    int m;
    Rational u, v;
};

// In-rectangle action of one step: halving steps fold v two-to-one (BoundaryHit
// at v = 1/2 exactly), non-halving steps fix v, the epoch-end swap exchanges u and v.
RelState relative_step(const SequenceTable& tab, const RelState& st);

struct DisjointReport {
    int m_start = 0;
    int64_t steps = 0;
    int64_t rect_count = 0;
    bool disjoint = false;
    double min_gap_log = 0.0;   // log of the smallest separating gap over all pairs
    int64_t bad_i = -1, bad_j = -1;
};

// Pairwise disjointness of the first `steps` rectangles from R(0, m_start).
// w_inflate_log > 0 widens every W by that log-factor (negative-control hook).
DisjointReport check_disjoint(const SequenceTable& tab, int m_start, int64_t steps,
                              double w_inflate_log = 0.0);

struct BirkhoffPoint {
    int64_t horizon = 0;
    int64_t inside = 0;
    double fraction = 0.0;
};

// Fraction of times t < horizon whose rectangle corner lies within distance
// exp(log_radius) of the origin, along the orbit from R(0, m_start).
std::vector<BirkhoffPoint> birkhoff_stats(const SequenceTable& tab, int m_start,
                                          const std::vector<int64_t>& horizons, double log_radius);

}  // namespace pexmap
