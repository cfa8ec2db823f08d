#include "qvdp/params.hpp"

#include <cmath>
#include <limits>

#include "qvdp/error.hpp"
#include "qvdp/types.hpp"

namespace qvdp {

ModelParams ModelParams::from_ratios(double gamma1, double n_ex, double delta_ratio,
                                     double eta_ratio, double omega_s) {
    if (!(n_ex > 0.0)) throw Error(ErrorKind::InvalidArgument, "n_ex must be positive");
    ModelParams p;
    p.gamma1 = gamma1;
    p.gamma2 = gamma1 / (2.0 * n_ex);
    p.delta = delta_ratio * gamma1;
    p.eta = eta_ratio * std::abs(p.delta) / 2.0;
    p.omega_s = omega_s;
    p.validate();
    return p;
}

double ModelParams::eta_c() const { return std::abs(delta) / 2.0; }

double ModelParams::eta_ratio() const {
    const double c = eta_c();
    if (c == 0.0) return eta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return eta / c;
}

double ModelParams::period() const {
    if (!(omega_s > 0.0)) throw Error(ErrorKind::MissingDriveFrequency, "omega_s must be > 0");
    return kPi / omega_s;
}

ModelParams ModelParams::with_eta(double eta_new) const {
    ModelParams p = *this;
    p.eta = eta_new;
    return p;
}

ModelParams ModelParams::with_eta_ratio(double ratio) const {
    return with_eta(ratio * eta_c());
}

void ModelParams::validate() const {
    const bool finite = std::isfinite(gamma1) && std::isfinite(gamma2) && std::isfinite(delta) &&
                        std::isfinite(eta) && std::isfinite(omega_s);
    if (!finite) throw Error(ErrorKind::InvalidArgument, "non-finite model parameter");
    if (!(gamma1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma1 must be > 0");
    if (!(gamma2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma2 must be > 0");
    if (eta < 0.0) throw Error(ErrorKind::InvalidArgument, "eta must be >= 0");
    if (omega_s < 0.0) throw Error(ErrorKind::InvalidArgument, "omega_s must be >= 0");
}

}  // namespace qvdp
