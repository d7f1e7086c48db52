#pragma once

// Seedable random-variate generation for the sampler.  The core generator is
// PCG64 (128-bit LCG state, XSL-RR output).  Streams are selected by a
// 64-bit stream id that enters the LCG increment, so the same seed with
// distinct stream ids gives statistically independent sequences; replaying
// the same (seed, stream_id) reproduces the draw sequence bit for bit.

#include <cstdint>
#include <Eigen/Dense>

namespace zqr {

class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1); never returns 0 or 1, safe under log().
    double uniform01();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    unsigned __int128 state_;
    unsigned __int128 inc_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
};

// Parameters of the GIG(1/2) full conditional, density proportional to
//   v^{-1/2} * exp(-(delta^2/v + xi^2 v)/2),  v > 0.
// delta = 0 degenerates to a gamma(1/2, rate xi^2/2) law and is allowed.
struct GigHalfParams {
    double delta;
    double xi;

    GigHalfParams(double delta_, double xi_) : delta(delta_), xi(xi_) {
        if (!(xi > 0.0))
            throw std::invalid_argument("GigHalfParams: xi must be positive");
        if (delta < 0.0)
            throw std::invalid_argument("GigHalfParams: delta must be non-negative");
    }
};

double draw_std_normal(RngStream& rng);

// Multivariate normal via Cholesky factorization of cov; throws if cov is
// not symmetric positive definite.
Eigen::VectorXd draw_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                         RngStream& rng);

// Exponential with the given MEAN (density mean^-1 exp(-v/mean)).
double draw_exponential_mean(double mean, RngStream& rng);

// Gamma with given shape and rate (Marsaglia-Tsang).
double draw_gamma(double shape, double rate, RngStream& rng);

// Inverse gamma with density proportional to x^{-shape-1} exp(-scale/x).
double draw_inverse_gamma(double shape, double scale, RngStream& rng);

// GIG(1/2, delta, xi) through the reciprocal inverse-Gaussian identity:
// 1/X with X inverse-Gaussian(mean xi/delta, shape xi^2) has the target law.
double draw_gig_half(const GigHalfParams& p, RngStream& rng);

// Normal(mean, var) conditioned on the value being <= upper.  Uses plain
// rejection when the bound is in the bulk and a one-sided exponential
// rejection envelope in the far tail, so the draw never stalls even when
// mean is far above the bound.
double draw_truncnorm_upper(double mean, double var, double upper, RngStream& rng);

// Returns 1 with the given probability, 0 otherwise.
int draw_bernoulli(double prob, RngStream& rng);

}  // namespace zqr
