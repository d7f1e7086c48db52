#include "zqr/ald.hpp"

#include <cmath>

namespace zqr {

double check_loss(double u, QuantileLevel tau) {
    return u * (tau.value() - (u < 0.0 ? 1.0 : 0.0));
}

double ald_logpdf(double y, const ALDParams& p) {
    const double t = p.tau.value();
    return std::log(t * (1.0 - t) / p.sigma) - check_loss((y - p.mu) / p.sigma, p.tau);
}

double ald_cdf_at_zero(double mu, double sigma, QuantileLevel tau) {
    const double t = tau.value();
    if (mu >= 0.0)
        return t * std::exp(-(1.0 - t) * mu / sigma);
    return 1.0 - (1.0 - t) * std::exp(t * mu / sigma);
}

double ald_cdf(double y, const ALDParams& p) {
    return ald_cdf_at_zero(p.mu - y, p.sigma, p.tau);
}

MixtureConstants mixture_constants(QuantileLevel tau) {
    const double t = tau.value();
    const double tt = t * (1.0 - t);
    return MixtureConstants{(1.0 - 2.0 * t) / tt, 2.0 / tt};
}

}  // namespace zqr
