#include "pexmap/map.hpp"

#include <cmath>

#include "pexmap/errors.hpp"

namespace pexmap {

namespace {

const double kLog2 = std::log(2.0);

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

}  // namespace

double smoothstep(int r, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double cr = 1.0;
    for (int i = 1; i <= 2 * r + 1; ++i) cr *= i;        // (2r+1)!
    for (int i = 1; i <= r; ++i) cr /= double(i) * i;    // / (r!)^2
    double s = 0.0;
    for (int j = 0; j <= r; ++j) {
        double c = binom(r, j) / (r + j + 1);
        s += (j % 2 == 0 ? c : -c) * std::pow(t, r + j + 1);
    }
    return cr * s;
}

double smoothstep_deriv(int r, double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double cr = 1.0;
    for (int i = 1; i <= 2 * r + 1; ++i) cr *= i;
    for (int i = 1; i <= r; ++i) cr /= double(i) * i;
    return cr * std::pow(t * (1.0 - t), r);
}

ProfilePair::ProfilePair(const SequenceTable& tab) : tab_(&tab) {
    const Params& p = tab.params();
    if (p.M < 0) throw BoundViolation("profile requires a resolved base epoch M");
    kappa_min_ = tab.pow_gamma(p.M) + 1;
    kappa_max_ = tab.pow_gamma(tab.mmax());
}

int ProfilePair::m_of(int64_t kappa) const {
    if (kappa < kappa_min_ || kappa > kappa_max_) {
        throw IndexOutOfRange("collar " + std::to_string(kappa) + " has no plateau");
    }
    int m = 1;
    while (tab_->pow_gamma(m) < kappa) ++m;
    return m;
}

double ProfilePair::log_f_plateau(int64_t kappa) const {
    auto it = plateau_.find(kappa);
    if (it == plateau_.end()) {
        int m = m_of(kappa);
        int64_t j = tab_->pow_gamma(m) - kappa;
        double le = tab_->logH(j, m) - kLog2;
        double lf = log_sum_exp(tab_->logB(j, m), le);
        it = plateau_.emplace(kappa, std::make_pair(lf, le)).first;
    }
    return it->second.first;
}

double ProfilePair::log_eta_plateau(int64_t kappa) const {
    log_f_plateau(kappa);
    return plateau_.find(kappa)->second.second;
}

ProfileValue ProfilePair::value(const LogReal& x) const {
    ProfileValue out;
    const Params& p = tab_->params();
    if (x.sign <= 0) return out;

    // the only collar whose K-interval can contain x
    int64_t k0 = static_cast<int64_t>(std::floor(-x.logmag / p.eps1));
    for (int64_t k = k0 - 1; k <= k0 + 1; ++k) {
        if (k < kappa_min_ || k > kappa_max_) continue;
        CollarIntervals c = collar(p, k);
        if (x < c.K.lo || x > c.K.hi) continue;

        double lf = log_f_plateau(k), le = log_eta_plateau(k);
        if (x >= c.J.lo && x <= c.J.hi) {
            out.f = LogReal::from_log(lf);
            out.eta = LogReal::from_log(le);
            return out;
        }
        double ld = log_delta(p, k);
        bool rising = x < c.J.lo;
        LogReal dist = rising ? x - c.K.lo : c.K.hi - x;
        double t = std::exp(dist.logmag - ld);
        double s = smoothstep(p.r, t);
        if (s > 0.0) {
            double ls = std::log(s);
            out.f = LogReal::from_log(lf + ls);
            out.eta = LogReal::from_log(le + ls);
        }
        double slope = smoothstep_deriv(p.r, t);
        double sgn = rising ? 1.0 : -1.0;
        out.df = sgn * std::exp(lf - ld) * slope;
        out.deta = sgn * std::exp(le - ld) * slope;
        return out;
    }
    return out;
}

ProfileValue ProfilePair::value_d(double x) const {
    if (!(x > 0.0)) return ProfileValue{};
    return value(LogReal::from_value(x));
}

Region classify(const PlanarPoint& pt, const ProfilePair& profile) {
    const Params& p = profile.params();
    LogReal xs = LogReal::from_log(-p.eps1);
    LogReal ys = LogReal::from_log(-p.eps2);
    if (pt.x.sign <= 0 || pt.x.logmag >= 0.0) throw OutsideDomain("x outside (0,1)");
    if (pt.y.sign != 0 && pt.y.logmag >= 0.0) throw OutsideDomain("|y| outside [0,1)");

    LogReal ay = pt.y.abs();
    if (pt.x == xs) return Region::Boundary;
    if (pt.y.sign != 0 && ay == ys) return Region::Boundary;

    if (pt.x < xs) {
        if (ay < ys || pt.y.sign == 0) {
            LogReal f = profile.value(pt.x).f;
            if (pt.y == f) return Region::Boundary;
            return pt.y > f ? Region::D0p : Region::D0m;
        }
        return pt.y.sign > 0 ? Region::D2p : Region::D2m;
    }
    if (pt.y.sign == 0) return Region::Boundary;
    if (ay < ys) return pt.y.sign > 0 ? Region::D1p : Region::D1m;
    return pt.y.sign > 0 ? Region::D3p : Region::D3m;
}

PlanarPoint apply_map(const PlanarPoint& pt, const ProfilePair& profile) {
    const Params& p = profile.params();
    LogReal xs = LogReal::from_log(-p.eps1);
    LogReal ys = LogReal::from_log(-p.eps2);
    Region reg = classify(pt, profile);
    switch (reg) {
        case Region::D0p: {
            LogReal eta = profile.value(pt.x).eta;
            return {pt.x.scaled(p.eps1), (pt.y - eta).scaled(p.eps2)};
        }
        case Region::D0m:
            return {pt.x.scaled(p.eps1), pt.y.scaled(p.eps2)};
        case Region::D1p:
        case Region::D1m:
            return {pt.y.abs().scaled(p.eps2), (pt.x - xs).scaled(p.eps1)};
        case Region::D2p:
            return {pt.x.scaled(p.eps1), (pt.y - ys).scaled(p.eps2)};
        case Region::D2m:
            return {pt.x.scaled(p.eps1), (pt.y + ys).scaled(p.eps2)};
        case Region::D3p:
            return {(pt.x - xs).scaled(p.eps1), (pt.y - ys).scaled(p.eps2)};
        case Region::D3m:
            return {(pt.x - xs).scaled(p.eps1), (pt.y + ys).scaled(p.eps2)};
        case Region::Boundary:
        default:
            throw BoundaryHit("point on a partition curve");
    }
}

Mat2 jacobian(const PlanarPoint& pt, const ProfilePair& profile) {
    const Params& p = profile.params();
    Region reg = classify(pt, profile);
    switch (reg) {
        case Region::D0p: {
            double deta = profile.value(pt.x).deta;
            return {p.lambda1, 0.0, -p.lambda2 * deta, p.lambda2};
        }
        case Region::D1p:
            return {0.0, p.lambda2, p.lambda1, 0.0};
        case Region::D1m:
            return {0.0, -p.lambda2, p.lambda1, 0.0};
        case Region::Boundary:
            throw BoundaryHit("no one-sided derivative on a partition curve");
        default:
            return {p.lambda1, 0.0, 0.0, p.lambda2};
    }
}

MapModel::MapModel(const Params& p, const ProfilePair* profile) : par_(p), profile_(profile) {
    x_split_ = std::exp(-p.eps1);
    y_split_ = std::exp(-p.eps2);
}

bool MapModel::step_d(double& x, double& y) const {
    if (!(x > 0.0 && x < 1.0 && y > -1.0 && y < 1.0)) return false;
    double ay = std::fabs(y);
    if (x < x_split_) {
        if (ay < y_split_) {
            double f = 0.0, eta = 0.0;
            if (profile_ != nullptr) {
                ProfileValue v = profile_->value_d(x);
                f = v.f.value();
                eta = v.eta.value();
            }
            if (y > f) {
                x *= par_.lambda1;
                y = par_.lambda2 * (y - eta);
            } else if (y < f) {
                x *= par_.lambda1;
                y *= par_.lambda2;
            } else {
                return false;
            }
        } else {
            double d = y > 0 ? 1.0 : -1.0;
            x *= par_.lambda1;
            y = par_.lambda2 * (y - d * y_split_);
        }
        return true;
    }
    if (x == x_split_ || y == 0.0) return false;
    if (ay < y_split_) {
        double nx = par_.lambda2 * ay;
        y = par_.lambda1 * (x - x_split_);
        x = nx;
    } else if (ay > y_split_) {
        double d = y > 0 ? 1.0 : -1.0;
        x = par_.lambda1 * (x - x_split_);
        y = par_.lambda2 * (y - d * y_split_);
    } else {
        return false;
    }
    return true;
}

}  // namespace pexmap
