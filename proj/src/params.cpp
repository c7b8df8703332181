#include "pexmap/params.hpp"

#include <cmath>
#include <sstream>

#include "pexmap/errors.hpp"

namespace pexmap {

double eps1_upper_bound(int r, int gamma) {
    double g = static_cast<double>(gamma);
    double a = 2.0 - 1.0 / static_cast<double>(r);
    return a * a * std::log(2.0) / (g * g * g);
}

namespace {

void require(bool ok, const std::string& name, double slack) {
    if (ok) return;
    std::ostringstream os;
    os << "parameter bound violated: " << name << " (slack " << slack << ")";
    throw BoundViolation(os.str());
}

}  // namespace

Params validate_params(int r, int gamma, double eps1, double eps2) {
    require(r >= 1, "r >= 1", static_cast<double>(r - 1));
    require(gamma >= 2, "gamma >= 2", static_cast<double>(gamma - 2));
    require(eps2 > 0.0, "eps2 > 0", eps2);
    require(eps1 > eps2, "eps1 > eps2", eps1 - eps2);
    double ub = eps1_upper_bound(r, gamma);
    require(eps1 < ub, "eps1 < gamma^-3 (2 - 1/r)^2 log 2", ub - eps1);

    Params p;
    p.r = r;
    p.gamma = gamma;
    p.eps1 = eps1;
    p.eps2 = eps2;
    p.lambda1 = std::exp(eps1);
    p.lambda2 = std::exp(eps2);
    p.sigma = 1.0 - eps2 / eps1;
    p.M = -1;
    return p;
}

Params params_for_sigma(const Params& base, double sigma) {
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw BoundViolation("sigma must lie in (0,1)");
    }
    return validate_params(base.r, base.gamma, base.eps1, base.eps1 * (1.0 - sigma));
}

LimitExponents limit_exponents(const Params& p) {
    double g = static_cast<double>(p.gamma);
    LimitExponents e;
    e.xi0 = (g * p.eps1 + p.eps2) / (g + 1.0);
    e.xi1 = (p.eps1 + g * p.eps2) / (g + 1.0);
    e.mean = 0.5 * (p.eps1 + p.eps2);
    e.rho = p.eps1 / (g + 1.0);
    return e;
}

}  // namespace pexmap
