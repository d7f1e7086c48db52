#pragma once

// Closed-form asymmetric Laplace mathematics: check loss, density, CDF and
// the constants of the normal-exponential mixture representation.

#include <stdexcept>

namespace zqr {

// Quantile level, restricted to the open interval (0,1).  The mixture
// constants below carry a factor 1/(tau*(1-tau)) and diverge at the
// boundary, so boundary values are rejected at construction.
class QuantileLevel {
public:
    explicit QuantileLevel(double tau) : tau_(tau) {
        if (!(tau > 0.0 && tau < 1.0))
            throw std::invalid_argument("QuantileLevel: tau must lie strictly in (0,1)");
    }
    double value() const { return tau_; }

private:
    double tau_;
};

// Location/scale/skewness triple of an asymmetric Laplace distribution.
// The location equals the tau-th quantile.
struct ALDParams {
    double mu;
    double sigma;
    QuantileLevel tau;

    ALDParams(double mu_, double sigma_, QuantileLevel tau_)
        : mu(mu_), sigma(sigma_), tau(tau_) {
        if (!(sigma > 0.0))
            throw std::invalid_argument("ALDParams: sigma must be positive");
    }
};

// Constants of the location-scale mixture: Y = mu + theta*v + sqrt(psi2*sigma*v)*Z
// with v exponential with mean sigma and Z standard normal.
struct MixtureConstants {
    double theta;  // (1-2tau)/(tau(1-tau)); zero iff tau = 1/2
    double psi2;   // 2/(tau(1-tau))
};

// Quantile check loss rho_tau(u) = u*(tau - 1{u<0}).  Non-negative, zero iff u = 0.
double check_loss(double u, QuantileLevel tau);

// Log density of the asymmetric Laplace distribution.
double ald_logpdf(double y, const ALDParams& p);

// CDF evaluated at zero; two-branch closed form, continuous at mu = 0 where
// both branches reduce to tau.
double ald_cdf_at_zero(double mu, double sigma, QuantileLevel tau);

// General CDF by location shift: F(y; mu, sigma, tau) = F(0; mu - y, sigma, tau).
double ald_cdf(double y, const ALDParams& p);

MixtureConstants mixture_constants(QuantileLevel tau);

}  // namespace zqr
