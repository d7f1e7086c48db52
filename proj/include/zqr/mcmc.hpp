#pragma once

// Gibbs-within-Metropolis sampler with data augmentation for the censoring
// indicators and the censored latents.  Sweep order is fixed as
//   c -> ystar -> v -> beta -> sigma -> gamma
// so a run is reproducible from (data, config, priors, seed).

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "zqr/model.hpp"
#include "zqr/rng.hpp"

namespace zqr {

// Retained posterior draws plus per-draw censoring indicators and the MH
// acceptance record.  mh_acceptance_rate is the post-burn-in rate; it is NaN
// for the tobit variant, which has no Metropolis step.
struct Chain {
    Eigen::MatrixXd beta_draws;
    Eigen::MatrixXd gamma_draws;   // zero columns for tobit
    Eigen::VectorXd sigma_draws;
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> c_draws;
    std::vector<Eigen::Index> zero_obs;  // c_draws column j belongs to observation zero_obs[j]
    long mh_accept_total = 0;
    long mh_accept_retained = 0;
    double mh_acceptance_rate = 0.0;
    double mh_step_final = 0.0;
    ModelConfig config;

    Eigen::Index draws() const { return sigma_draws.size(); }
};

// Gaussian full conditional of beta.
struct FullCondBeta {
    Eigen::VectorXd b1;
    Eigen::MatrixXd B1;
};

// Inverse-gamma full conditional of sigma.
struct FullCondSigma {
    double shape;
    double scale;
};

// Neutral start: beta = 0, gamma = 0, sigma = 1, v = 1; censoring indicators
// Bernoulli(1/2) for censored_mix, all censored for tobit, none for twopart;
// censored members get one truncated-normal ystar draw.
ParamState init_state(const Dataset& data, const ModelConfig& cfg, RngStream& rng);

// Inverse-CDF draw from the asymmetric Laplace law truncated to (-inf, 0];
// the activation move below pairs it with a GIG draw of v given the latent.
double draw_censored_ald_latent(double mu, double sigma, QuantileLevel tau, RngStream& rng);

// Bernoulli refresh of the censoring indicators for zero observations.
// Members entering the censored set get (ystar, v) drawn from their exact
// joint conditional given censoring -- ystar from the truncated asymmetric
// Laplace, v from its GIG conditional -- before they join any
// continuous-part sum.  Members staying censored keep their latents; the
// latents of members leaving the set go dormant until the next activation.
void update_c(ParamState& state, const Dataset& data, const ModelConfig& cfg, RngStream& rng);

// ystar_i ~ TN(-inf,0](x_i'beta + theta v_i, psi^2 sigma v_i) for censored members.
void impute_ystar(ParamState& state, const Dataset& data, const IndexPartition& part,
                  const ModelConfig& cfg, RngStream& rng);

// v_i ~ GIG(1/2, delta_i, xi_i) for continuous-part members with
// delta_i^2 = (w_i - x_i'beta)^2/(psi^2 sigma) and xi_i^2 = theta^2/(psi^2 sigma) + 2/sigma.
void update_v(ParamState& state, const Dataset& data, const IndexPartition& part,
              const ModelConfig& cfg, RngStream& rng);

FullCondBeta beta_full_conditional(const ParamState& state, const Dataset& data,
                                   const IndexPartition& part, const ModelConfig& cfg,
                                   const Priors& priors);

void update_beta(ParamState& state, const Dataset& data, const IndexPartition& part,
                 const ModelConfig& cfg, const Priors& priors, RngStream& rng);

FullCondSigma sigma_full_conditional(const ParamState& state, const Dataset& data,
                                     const IndexPartition& part, const ModelConfig& cfg,
                                     const Priors& priors);

void update_sigma(ParamState& state, const Dataset& data, const IndexPartition& part,
                  const ModelConfig& cfg, const Priors& priors, RngStream& rng);

// Random-walk Metropolis step on log_post_gamma; returns 1 on acceptance.
// mh_step overrides the config value so burn-in adaptation can feed the
// current step size through.
int update_gamma(ParamState& state, const Dataset& data, const IndexPartition& part,
                 const ModelConfig& cfg, const Priors& priors, double mh_step, RngStream& rng);

// One full sweep in the pinned order; returns the gamma acceptance flag
// (always 1 for tobit).  The twopart variant skips c/ystar and treats every
// zero as a true zero; tobit skips c/gamma and treats every zero as censored.
int sweep(ParamState& state, const Dataset& data, const ModelConfig& cfg,
          const Priors& priors, double mh_step, RngStream& rng);

// Multiplicative burn-in step adaptation toward an acceptance rate in
// [0.15, 0.50]; rates inside the window leave the step unchanged.
double tune_mh_step(double step, double rate);

// Full run: validates inputs, executes cfg.iters sweeps, adapts the MH step
// during burn-in only, discards the burn-in, thins and returns the chain.
// Throws std::runtime_error with the iteration and block on non-finite state.
Chain run_chain(const Dataset& data, const ModelConfig& cfg, const Priors& priors,
                RngStream& rng);

// Convenience overload seeding the stream from cfg.seed / cfg.stream_id.
Chain run_chain(const Dataset& data, const ModelConfig& cfg, const Priors& priors);

// As run_chain, but starts from a caller-supplied state (initialization
// sensitivity checks).  Set cfg.warm_start_iters = 0 to keep the supplied
// censoring indicators; the warm phase would reset them.
Chain run_chain_from(ParamState state, const Dataset& data, const ModelConfig& cfg,
                     const Priors& priors, RngStream& rng);

}  // namespace zqr
