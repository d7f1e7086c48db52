// Command-line front end: fit, simulate, censor-curve, summarize.
// Exit codes: 0 success, 2 configuration or parse error, 3 numerical failure.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zqr/io.hpp"
#include "zqr/version.hpp"

namespace {

std::vector<double> linear_grid(double from, double to, int steps) {
    std::vector<double> grid;
    if (steps < 2) {
        grid.push_back(from);
        return grid;
    }
    for (int i = 0; i < steps; ++i)
        grid.push_back(from + (to - from) * static_cast<double>(i) / (steps - 1));
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian quantile regression for non-negative responses with a point mass at zero"};
    app.set_version_flag("--version", std::string("zqr ") + zqr::kVersion);
    app.require_subcommand(1);

    // ---- fit ----
    zqr::FitRequest req;
    std::string fit_variant = "censored_mix", fit_link = "logit", fit_transform = "identity";
    std::string fit_out = "zqr_out";
    std::string fit_manifest;
    auto* fit = app.add_subcommand("fit", "Fit the model to a CSV dataset");
    fit->add_option("--data", req.data_path, "Input CSV path");
    fit->add_option("--response", req.response, "Response column name");
    fit->add_option("--x", req.x_columns, "Continuous-part covariate columns")->delimiter(',');
    fit->add_option("--z", req.z_columns, "Zero-part covariate columns")->delimiter(',');
    fit->add_option("--tau", req.taus, "Quantile levels, each in (0,1)")->delimiter(',');
    fit->add_option("--variant", fit_variant, "Model variant: twopart | censored_mix | tobit");
    fit->add_option("--link", fit_link, "Zero-part link: logit | probit");
    fit->add_option("--transform", fit_transform, "Response transform: identity | sqrt");
    fit->add_flag("--standardize", req.standardize, "Standardize covariates (mean 0, SD 1)");
    fit->add_option("--iters", req.iters, "Total MCMC iterations");
    fit->add_option("--burnin", req.burnin, "Burn-in iterations to discard");
    fit->add_option("--thin", req.thin, "Keep every thin-th retained draw");
    fit->add_option("--seed", req.seed, "RNG seed");
    fit->add_option("--mh-step", req.mh_step, "Initial variance of the gamma random-walk proposal");
    fit->add_option("--warm-start", req.warm_start_iters,
                    "Burn-in sweeps before censoring indicators are released (-1 = auto)");
    fit->add_option("--prior-coef-var", req.prior_coef_var,
                    "Diagonal prior variance of beta and gamma");
    fit->add_option("--prior-sigma-shape", req.prior_sigma_shape, "Inverse-gamma prior shape");
    fit->add_option("--prior-sigma-scale", req.prior_sigma_scale, "Inverse-gamma prior scale");
    fit->add_option("--level", req.interval_level, "Credible interval level");
    fit->add_option("--out", fit_out, "Output directory");
    fit->add_option("--manifest", fit_manifest,
                    "Re-run a previous fit from its manifest (other options ignored)");

    // ---- simulate ----
    std::string sim_spec_path, sim_out = "sim_results.csv";
    auto* sim = app.add_subcommand("simulate", "Run the replication study from a JSON spec");
    sim->add_option("--spec", sim_spec_path, "Simulation spec JSON (or a simulate manifest)")
        ->required();
    sim->add_option("--out", sim_out, "Output CSV path");

    // ---- censor-curve ----
    double cc_mu = 0.0, cc_sigma = 1.0, cc_from = 0.0, cc_to = 1.0;
    int cc_steps = 101;
    std::vector<double> cc_taus{0.1, 0.25, 0.5, 0.75, 0.9};
    std::string cc_out = "censor_curve.csv";
    auto* curve = app.add_subcommand(
        "censor-curve", "Tabulate P(censored | y = 0) over a grid of zero-probabilities");
    curve->add_option("--mu", cc_mu, "Linear predictor of the continuous part");
    curve->add_option("--sigma", cc_sigma, "ALD scale");
    curve->add_option("--tau", cc_taus, "Quantile levels")->delimiter(',');
    curve->add_option("--p-from", cc_from, "Grid start");
    curve->add_option("--p-to", cc_to, "Grid end");
    curve->add_option("--p-steps", cc_steps, "Grid size");
    curve->add_option("--out", cc_out, "Output CSV path");

    // ---- summarize ----
    std::string sum_draws, sum_out = "summary.json";
    double sum_level = 0.9;
    auto* summ = app.add_subcommand("summarize", "Recompute summaries from a draws CSV");
    summ->add_option("--draws", sum_draws, "Draws CSV path")->required();
    summ->add_option("--level", sum_level, "Credible interval level");
    summ->add_option("--out", sum_out, "Output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) {
            if (!fit_manifest.empty()) {
                req = zqr::fit_request_from_manifest(fit_manifest);
            } else {
                req.variant = fit_variant == "twopart" ? zqr::Variant::twopart
                              : fit_variant == "tobit" ? zqr::Variant::tobit
                              : fit_variant == "censored_mix"
                                  ? zqr::Variant::censored_mix
                                  : throw zqr::ConfigError("unknown variant '" + fit_variant + "'");
                req.link = fit_link == "logit"    ? zqr::LinkKind::logit
                           : fit_link == "probit" ? zqr::LinkKind::probit
                                                  : throw zqr::ConfigError("unknown link '" +
                                                                           fit_link + "'");
                req.transform = fit_transform == "identity" ? zqr::Transform::identity
                                : fit_transform == "sqrt"
                                    ? zqr::Transform::sqrt
                                    : throw zqr::ConfigError("unknown transform '" +
                                                             fit_transform + "'");
            }
            const zqr::OutputBundle bundle = zqr::cmd_fit(req, fit_out);
            std::printf("wrote %zu draws/summary/profile file sets and %s\n",
                        bundle.draws_files.size(), bundle.manifest_file.c_str());
        } else if (sim->parsed()) {
            const std::string out = zqr::cmd_simulate(sim_spec_path, sim_out);
            std::printf("wrote %s\n", out.c_str());
        } else if (curve->parsed()) {
            zqr::cmd_censor_curve(cc_mu, cc_sigma, cc_taus, linear_grid(cc_from, cc_to, cc_steps),
                                  cc_out);
            std::printf("wrote %s\n", cc_out.c_str());
        } else if (summ->parsed()) {
            zqr::cmd_summarize(sum_draws, sum_level, sum_out);
            std::printf("wrote %s\n", sum_out.c_str());
        }
    } catch (const zqr::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
