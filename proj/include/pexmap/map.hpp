#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pexmap/log_real.hpp"
#include "pexmap/sequences.hpp"

namespace pexmap {

struct PlanarPoint {
    LogReal x;  // in (0,1)
    LogReal y;  // in (-1,1), sign carries the half-plane
};

enum class Region { D0p, D0m, D1p, D1m, D2p, D2m, D3p, D3m, Boundary };

// Degree-(2r+1) ramp with r vanishing derivatives at both ends, S_r(0)=0, S_r(1)=1.
double smoothstep(int r, double t);
double smoothstep_deriv(int r, double t);

struct ProfileValue {
    LogReal f, eta;
    double df = 0.0, deta = 0.0;  // one-sided derivatives on ramps, 0 on plateaus
};

// The pair (f, eta): plateaus B + H/2 and H/2 over the collars J_k with
// gamma^M < k, C^r ramps on K_k \ J_k, zero elsewhere.
class ProfilePair {
public:
    explicit ProfilePair(const SequenceTable& tab);

    const SequenceTable& table() const { return *tab_; }
    const Params& params() const { return tab_->params(); }

    // Collar index of the epoch-m rectangle position k: kappa = gamma^m - k.
    // m_of(kappa) is the epoch with gamma^(m-1) < kappa <= gamma^m.
    int m_of(int64_t kappa) const;

    // Plateau logs for collar kappa; IndexOutOfRange outside the active range.
    double log_f_plateau(int64_t kappa) const;
    double log_eta_plateau(int64_t kappa) const;

    ProfileValue value(const LogReal& x) const;
    ProfileValue value_d(double x) const;

private:
    const SequenceTable* tab_;
    int64_t kappa_min_, kappa_max_;
    mutable std::map<int64_t, std::pair<double, double>> plateau_;  // kappa -> (log f, log eta)
};

Region classify(const PlanarPoint& pt, const ProfilePair& profile);
PlanarPoint apply_map(const PlanarPoint& pt, const ProfilePair& profile);

struct Mat2 {
    double a11, a12, a21, a22;
};

Mat2 jacobian(const PlanarPoint& pt, const ProfilePair& profile);

// Plain-double evaluator used by the operator probe and as a cross-check for the
// first steps of exact orbits. skeleton == true freezes f = eta = 0.
class MapModel {
public:
    MapModel(const Params& p, const ProfilePair* profile);  // profile may be null (skeleton)

    const Params& params() const { return par_; }
    bool skeleton() const { return profile_ == nullptr; }

    // One step in doubles; returns false if the image leaves the open domain
    // (or lands on a partition line, indistinguishable in doubles).
    bool step_d(double& x, double& y) const;

private:
    Params par_;
    const ProfilePair* profile_;
    double x_split_, y_split_;  // exp(-eps1), exp(-eps2)
};

}  // namespace pexmap
