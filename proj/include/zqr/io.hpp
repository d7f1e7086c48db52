#pragma once

// CSV ingestion, run configuration, and serialization of chains, summaries
// and censoring-probability curves.  File formats:
//   draws            CSV   iter,beta_0..beta_{k-1}[,gamma_0..gamma_{m-1}],sigma
//   summary          JSON  per-parameter mean/interval/ESS + MH acceptance
//   censor profile   CSV   obs_id,tau,censor_prob[,pred_q_transformed,pred_q_original]
//   run manifest     JSON  resolved request + version + seed; replaying a
//                          manifest reproduces every output byte for byte
//   rep summaries    CSV   one row per replication x tau
// Numbers are serialized with full round-trip precision.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "zqr/mcmc.hpp"
#include "zqr/model.hpp"
#include "zqr/simulate.hpp"
#include "zqr/summary.hpp"

namespace zqr {

// Configuration or input-file problem; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitRequest {
    std::string data_path;
    std::string response;
    std::vector<std::string> x_columns;  // covariates; intercept prepended automatically
    std::vector<std::string> z_columns;
    Transform transform = Transform::identity;
    bool standardize = false;
    std::vector<double> taus{0.5};
    Variant variant = Variant::censored_mix;
    LinkKind link = LinkKind::logit;
    int iters = 2000;
    int burnin = 500;
    int thin = 1;
    std::uint64_t seed = 0;
    double mh_step = 1.0;
    int warm_start_iters = -1;       // see ModelConfig::warm_start_iters
    double prior_coef_var = 100.0;   // diagonal of B0 and G0
    double prior_sigma_shape = 1.5;
    double prior_sigma_scale = 0.05;
    double interval_level = 0.9;

    void validate() const;
    Priors priors(Eigen::Index k, Eigen::Index m) const;
};

struct Standardization {
    std::string column;
    double mean;
    double sd;
};

struct LoadedData {
    Dataset data;
    std::vector<Standardization> x_scaling;  // empty unless standardize
    std::vector<Standardization> z_scaling;
};

struct OutputBundle {
    std::vector<std::string> draws_files;
    std::vector<std::string> summary_files;
    std::vector<std::string> profile_files;
    std::string manifest_file;
};

// Strict numeric CSV reader for the referenced columns.  Diagnostics carry
// the offending row and column; the response must be non-negative.
LoadedData parse_csv(const std::string& path, const FitRequest& req);

// Runs one chain per tau and writes draws/summary/profile files plus the
// manifest into out_dir (created if missing).
OutputBundle cmd_fit(const FitRequest& req, const std::string& out_dir);

// Reads a fit manifest back into a request.
FitRequest fit_request_from_manifest(const std::string& manifest_path);

// Executes the replication study described by a JSON spec file and writes
// the per-replication CSV to out_path plus a manifest beside it.
std::string cmd_simulate(const std::string& spec_path, const std::string& out_path);
std::string cmd_simulate(const SimSpec& spec, const std::string& out_path);

SimSpec sim_spec_from_json_file(const std::string& path);

// Tabulates P(C=1 | Y=0) over a grid of zero-probabilities for each tau.
void cmd_censor_curve(double mu, double sigma, const std::vector<double>& taus,
                      const std::vector<double>& p_grid, const std::string& out_path);

// Recomputes per-parameter summaries from a draws CSV.
void cmd_summarize(const std::string& draws_path, double level, const std::string& out_path);

// Serialization helpers shared by the commands and tests.
void write_draws_csv(const Chain& chain, const std::string& path);
void write_summary_json(const Summary& summary, double tau, const std::string& path);
void write_profiles_csv(const Chain& chain, const Dataset& data, const std::string& path);
void write_rep_summaries_csv(const std::vector<RepSummary>& reps, const std::string& path);

std::string format_double(double x);  // shortest exact round-trip decimal

}  // namespace zqr
