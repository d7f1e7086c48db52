#pragma once

// Data model, link functions, likelihood/posterior kernels and the
// censoring-probability formula shared by the sampler and the CLI.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "zqr/ald.hpp"

namespace zqr {

enum class Transform { identity, sqrt };

enum class LinkKind { logit, probit };

enum class Variant { twopart, censored_mix, tobit };

// Response vector with the two design matrices.  Both X (continuous part)
// and Z (zero part) must carry an explicit intercept column; the library
// never adds one silently.
struct Dataset {
    Eigen::VectorXd y;    // non-negative responses, length n
    Eigen::MatrixXd X;    // n x k design for the conditional quantiles
    Eigen::MatrixXd Z;    // n x m design for the zero probability
    Transform transform = Transform::identity;

    // Throws std::invalid_argument on negative/non-finite responses or row
    // count mismatches.
    void validate() const;

    Eigen::Index n() const { return y.size(); }
    Eigen::Index k() const { return X.cols(); }
    Eigen::Index m() const { return Z.cols(); }
};

struct Priors {
    Eigen::VectorXd b0;   // beta prior mean
    Eigen::MatrixXd B0;   // beta prior covariance, SPD
    Eigen::VectorXd g0;   // gamma prior mean
    Eigen::MatrixXd G0;   // gamma prior covariance, SPD
    double n0 = 1.5;      // sigma inverse-gamma shape
    double s0 = 0.05;     // sigma inverse-gamma scale

    // b0=g0=0, B0=G0=100*I, sigma ~ IG(3/2, 0.1/2).
    static Priors defaults(Eigen::Index k, Eigen::Index m);

    void validate(Eigen::Index k, Eigen::Index m) const;
};

struct ModelConfig {
    QuantileLevel tau{0.5};
    Variant variant = Variant::censored_mix;
    LinkKind link = LinkKind::logit;
    double mh_step = 1.0;              // sigma^2_gamma of the random-walk proposal
    Eigen::MatrixXd mh_scale_matrix;   // Omega_gamma; empty means identity
    int iters = 2000;
    int burnin = 500;
    int thin = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    bool adapt_mh = true;              // multiplicative step tuning during burn-in only
    int adapt_window = 50;
    // Number of leading burn-in sweeps that treat every zero as a true zero
    // before the censoring indicators are released (censored_mix only).
    // Cold starts otherwise risk locking into an everything-censored
    // configuration at high tau.  -1 = min(200, burnin/2), 0 = disabled.
    int warm_start_iters = -1;

    int resolved_warm_start() const;

    void validate() const;
};

// Current MCMC state.  c and ystar are meaningful only where y == 0; v only
// for members of the continuous part.  Inactive entries keep their last
// value and are ignored by the updates.
struct ParamState {
    Eigen::VectorXd beta;
    Eigen::VectorXd gamma;
    double sigma = 1.0;
    Eigen::VectorXd v;
    std::vector<std::uint8_t> c;
    Eigen::VectorXd ystar;
};

// Disjoint index sets covering 0..n-1:
//   censored  — y == 0 and c == 1 (imputed members of the continuous part)
//   true_zero — y == 0 and c == 0
//   positive  — y > 0
struct IndexPartition {
    std::vector<Eigen::Index> censored;
    std::vector<Eigen::Index> true_zero;
    std::vector<Eigen::Index> positive;
};

double link_inverse(LinkKind link, double t);

// log(inverse link) and log(1 - inverse link), stable in the tails.
double log_link_inverse(LinkKind link, double t);
double log_link_complement(LinkKind link, double t);

IndexPartition partition(const Eigen::VectorXd& y, const std::vector<std::uint8_t>& c);

// P(C=1 | Y=0) = (1-p) F(0) / (p + (1-p) F(0)); degenerate denominators give 0.
double censor_prob(double p, double f0);

// Log of the augmented two-part likelihood: zeros contribute log p_i and
// positive observations log(1-p_i) + normal-given-v + exponential terms.
double loglik_twopart(const ParamState& state, const Dataset& data, const ModelConfig& cfg);

// Unnormalized log full conditional of gamma: true zeros carry log p_i,
// censored and positive observations carry log(1-p_i), plus the Gaussian prior.
double log_post_gamma(const Eigen::VectorXd& gamma, const IndexPartition& part,
                      const Dataset& data, const Priors& priors, LinkKind link);

// sqrt maps y to sqrt(y) elementwise; zeros stay zeros.
Eigen::VectorXd apply_transform(const Eigen::VectorXd& y, Transform t);
double apply_transform(double y, Transform t);

// Inverse of apply_transform on fitted quantiles.  For sqrt the map is the
// signed square u|u|, monotone on the whole latent scale and equal to u^2
// for u >= 0.
Eigen::VectorXd invert_transform(const Eigen::VectorXd& q, Transform t);
double invert_transform(double q, Transform t);

}  // namespace zqr
