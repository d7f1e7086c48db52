#include "zqr/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace zqr {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr unsigned __int128 pcg_mult() {
    return ((unsigned __int128)2549297995355413924ULL << 64) | 4865540595714422341ULL;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    // Expand the 64-bit seed to a 128-bit init state with splitmix64.
    std::uint64_t s = seed;
    const unsigned __int128 initstate =
        ((unsigned __int128)splitmix64(s) << 64) | splitmix64(s);
    inc_ = ((unsigned __int128)stream_id << 1) | 1;
    state_ = 0;
    state_ = state_ * pcg_mult() + inc_;
    state_ += initstate;
    state_ = state_ * pcg_mult() + inc_;
}

std::uint64_t RngStream::next_u64() {
    state_ = state_ * pcg_mult() + inc_;
    const std::uint64_t xored =
        static_cast<std::uint64_t>(state_ >> 64) ^ static_cast<std::uint64_t>(state_);
    const unsigned rot = static_cast<unsigned>(state_ >> 122);
    return (xored >> rot) | (xored << ((-rot) & 63));
}

double RngStream::uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double draw_std_normal(RngStream& rng) {
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Eigen::VectorXd draw_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                         RngStream& rng) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("draw_mvn: covariance is not symmetric positive definite");
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = draw_std_normal(rng);
    return mean + llt.matrixL() * z;
}

double draw_exponential_mean(double mean, RngStream& rng) {
    if (!(mean > 0.0))
        throw std::invalid_argument("draw_exponential_mean: mean must be positive");
    return -mean * std::log(rng.uniform01());
}

double draw_gamma(double shape, double rate, RngStream& rng) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("draw_gamma: shape and rate must be positive");
    // Marsaglia-Tsang squeeze; shape < 1 boosted via the power trick.
    if (shape < 1.0) {
        const double u = rng.uniform01();
        return draw_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = (1.0 / 3.0) / std::sqrt(d);
    for (;;) {
        double x, v;
        do {
            x = draw_std_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double draw_inverse_gamma(double shape, double scale, RngStream& rng) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("draw_inverse_gamma: shape and scale must be positive");
    return scale / draw_gamma(shape, 1.0, rng);
}

namespace {

// Inverse Gaussian(mean mu, shape lambda) by the Michael-Schucany-Haas
// transform.  The smaller root of the quadratic is computed in the
// cancellation-free form mu*(s-1)/(s+1), s = sqrt(1 + 4*lambda/(mu*y)).
double draw_inverse_gaussian(double mu, double lambda, RngStream& rng) {
    const double z = draw_std_normal(rng);
    const double y = z * z;
    if (y <= 0.0) return mu;
    const double s = std::sqrt(1.0 + 4.0 * lambda / (mu * y));
    const double x1 = mu * (s - 1.0) / (s + 1.0);
    const double u = rng.uniform01();
    return (u <= mu / (mu + x1)) ? x1 : mu * mu / x1;
}

}  // namespace

double draw_gig_half(const GigHalfParams& p, RngStream& rng) {
    if (p.delta == 0.0) {
        // Degenerate gamma(1/2, rate xi^2/2) case: Z^2 / xi^2.
        const double z = draw_std_normal(rng);
        return (z * z) / (p.xi * p.xi);
    }
    const double x = draw_inverse_gaussian(p.xi / p.delta, p.xi * p.xi, rng);
    return 1.0 / x;
}

namespace {

// Robert's one-sided envelope for a standard normal truncated to [a, inf).
double trunc_std_normal_lower(double a, RngStream& rng) {
    if (a <= 0.0) {
        // Bulk case: accept-reject from the untruncated normal, acceptance >= 1/2.
        for (;;) {
            const double z = draw_std_normal(rng);
            if (z >= a) return z;
        }
    }
    const double astar = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double z = a - std::log(rng.uniform01()) / astar;
        const double u = rng.uniform01();
        if (u <= std::exp(-0.5 * (z - astar) * (z - astar))) return z;
    }
}

}  // namespace

double draw_truncnorm_upper(double mean, double var, double upper, RngStream& rng) {
    if (!(var > 0.0))
        throw std::invalid_argument("draw_truncnorm_upper: var must be positive");
    const double sd = std::sqrt(var);
    // Z <= (upper-mean)/sd  <=>  -Z >= (mean-upper)/sd
    const double a = (mean - upper) / sd;
    return mean - sd * trunc_std_normal_lower(a, rng);
}

int draw_bernoulli(double prob, RngStream& rng) {
    return rng.uniform01() < prob ? 1 : 0;
}

}  // namespace zqr
