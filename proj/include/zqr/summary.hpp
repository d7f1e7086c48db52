#pragma once

// Posterior point estimates, equal-tailed credible intervals,
// per-observation censoring probabilities and chain diagnostics.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zqr/mcmc.hpp"

namespace zqr {

// Empirical quantiles use linear interpolation between order statistics with
// plotting position (i - 0.5)/n (Hazen rule, R type 5).  The rule is part of
// the output metadata because different rules move interval bounds at
// desk-scale chain lengths.
inline constexpr const char* kQuantileRule = "hazen (R type 5)";

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double ess = 0.0;
};

struct Summary {
    std::vector<ParameterSummary> parameters;
    double level = 0.0;
    double mh_acceptance_rate = 0.0;
};

// Posterior censoring probability of one zero observation at one tau.
struct CensorProfile {
    Eigen::Index obs_id;
    double tau;
    double prob;
};

double posterior_mean(const Eigen::VectorXd& draws);

double empirical_quantile(const Eigen::VectorXd& draws, double p);

// Equal-tailed interval at the given level.
std::pair<double, double> credible_interval(const Eigen::VectorXd& draws, double level);

// Mean retained censoring indicator per zero observation.
std::vector<CensorProfile> censor_profiles(const Chain& chain);

// Mean profile over truly-censored and truly-uncensored zero observations.
// true_c holds ground-truth labels indexed by observation; throws if either
// group is empty.
std::pair<double, double> group_censor_means(const std::vector<CensorProfile>& profiles,
                                             const std::vector<std::uint8_t>& true_c);

// Autocorrelation-based effective sample size (Geyer initial positive
// sequence).  A constant series has no information and is reported as 0.
double effective_sample_size(const Eigen::VectorXd& draws);

// Per-parameter summaries (beta_*, gamma_*, sigma) of a chain.
Summary summarize_chain(const Chain& chain, double level);

}  // namespace zqr
