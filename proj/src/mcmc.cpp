#include "zqr/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace zqr {

namespace {

double working_response(const ParamState& state, const Dataset& data, Eigen::Index i) {
    return data.y[i] > 0.0 ? data.y[i] : state.ystar[i];
}

void require_finite(bool ok, int iter, const char* block) {
    if (!ok)
        throw std::runtime_error("run_chain: non-finite state at iteration " +
                                 std::to_string(iter) + " in block " + block);
}

std::vector<Eigen::Index> zero_indices(const Dataset& data) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        if (data.y[i] == 0.0) idx.push_back(i);
    return idx;
}

}  // namespace

ParamState init_state(const Dataset& data, const ModelConfig& cfg, RngStream& rng) {
    const MixtureConstants mc = mixture_constants(cfg.tau);
    ParamState st;
    st.beta = Eigen::VectorXd::Zero(data.k());
    st.gamma = Eigen::VectorXd::Zero(cfg.variant == Variant::tobit ? 0 : data.m());
    st.sigma = 1.0;
    st.v = Eigen::VectorXd::Ones(data.n());
    st.c.assign(static_cast<std::size_t>(data.n()), 0);
    st.ystar = Eigen::VectorXd::Zero(data.n());

    for (Eigen::Index i : zero_indices(data)) {
        switch (cfg.variant) {
            case Variant::twopart: st.c[i] = 0; break;
            case Variant::tobit: st.c[i] = 1; break;
            case Variant::censored_mix: st.c[i] = static_cast<std::uint8_t>(draw_bernoulli(0.5, rng)); break;
        }
    }
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.y[i] == 0.0 && st.c[i]) {
            const double mu = mc.theta * st.v[i];  // beta starts at zero
            st.ystar[i] = draw_truncnorm_upper(mu, mc.psi2 * st.sigma * st.v[i], 0.0, rng);
        }
    }
    return st;
}

double draw_censored_ald_latent(double mu, double sigma, QuantileLevel tau, RngStream& rng) {
    const double t = tau.value();
    const double f0 = ald_cdf_at_zero(mu, sigma, tau);
    double q = rng.uniform01() * f0;
    if (q < 1e-320) q = 1e-320;  // keep the log finite when f0 underflows
    if (q <= t) return mu + sigma * std::log(q / t) / (1.0 - t);
    return mu - sigma * std::log((1.0 - q) / (1.0 - t)) / t;
}

void update_c(ParamState& state, const Dataset& data, const ModelConfig& cfg, RngStream& rng) {
    const MixtureConstants mc = mixture_constants(cfg.tau);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.y[i] != 0.0) continue;
        const double p = link_inverse(cfg.link, data.Z.row(i).dot(state.gamma));
        const double mu = data.X.row(i).dot(state.beta);
        const double f0 = ald_cdf_at_zero(mu, state.sigma, cfg.tau);
        const auto newc = static_cast<std::uint8_t>(draw_bernoulli(censor_prob(p, f0), rng));
        if (newc && !state.c[i]) {
            const double latent = draw_censored_ald_latent(mu, state.sigma, cfg.tau, rng);
            state.ystar[i] = latent;
            const double delta = std::abs(latent - mu) / std::sqrt(mc.psi2 * state.sigma);
            const double xi = std::sqrt(mc.theta * mc.theta / (mc.psi2 * state.sigma) +
                                        2.0 / state.sigma);
            state.v[i] = draw_gig_half(GigHalfParams(delta, xi), rng);
        }
        state.c[i] = newc;
    }
}

void impute_ystar(ParamState& state, const Dataset& data, const IndexPartition& part,
                  const ModelConfig& cfg, RngStream& rng) {
    const MixtureConstants mc = mixture_constants(cfg.tau);
    for (Eigen::Index i : part.censored) {
        const double mu = data.X.row(i).dot(state.beta) + mc.theta * state.v[i];
        state.ystar[i] = draw_truncnorm_upper(mu, mc.psi2 * state.sigma * state.v[i], 0.0, rng);
    }
}

void update_v(ParamState& state, const Dataset& data, const IndexPartition& part,
              const ModelConfig& cfg, RngStream& rng) {
    const MixtureConstants mc = mixture_constants(cfg.tau);
    const double xi2 = mc.theta * mc.theta / (mc.psi2 * state.sigma) + 2.0 / state.sigma;
    const double xi = std::sqrt(xi2);
    auto draw_one = [&](Eigen::Index i) {
        const double resid = working_response(state, data, i) - data.X.row(i).dot(state.beta);
        const double delta = std::abs(resid) / std::sqrt(mc.psi2 * state.sigma);
        state.v[i] = draw_gig_half(GigHalfParams(delta, xi), rng);
    };
    for (Eigen::Index i : part.positive) draw_one(i);
    for (Eigen::Index i : part.censored) draw_one(i);
}

FullCondBeta beta_full_conditional(const ParamState& state, const Dataset& data,
                                   const IndexPartition& part, const ModelConfig& cfg,
                                   const Priors& priors) {
    const MixtureConstants mc = mixture_constants(cfg.tau);
    const Eigen::Index k = data.k();
    const Eigen::MatrixXd B0inv =
        priors.B0.llt().solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd prec = B0inv;
    Eigen::VectorXd rhs = B0inv * priors.b0;
    auto accumulate = [&](Eigen::Index i) {
        const double wgt = 1.0 / (mc.psi2 * state.sigma * state.v[i]);
        const Eigen::VectorXd xi = data.X.row(i).transpose();
        prec.noalias() += wgt * xi * xi.transpose();
        rhs.noalias() += wgt * (working_response(state, data, i) - mc.theta * state.v[i]) * xi;
    };
    for (Eigen::Index i : part.positive) accumulate(i);
    for (Eigen::Index i : part.censored) accumulate(i);

    Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("beta_full_conditional: precision not positive definite");
    FullCondBeta fc;
    fc.B1 = llt.solve(Eigen::MatrixXd::Identity(k, k));
    fc.b1 = llt.solve(rhs);
    return fc;
}

void update_beta(ParamState& state, const Dataset& data, const IndexPartition& part,
                 const ModelConfig& cfg, const Priors& priors, RngStream& rng) {
    const FullCondBeta fc = beta_full_conditional(state, data, part, cfg, priors);
    state.beta = draw_mvn(fc.b1, fc.B1, rng);
}

FullCondSigma sigma_full_conditional(const ParamState& state, const Dataset& data,
                                     const IndexPartition& part, const ModelConfig& cfg,
                                     const Priors& priors) {
    const MixtureConstants mc = mixture_constants(cfg.tau);
    double nc = 0.0;
    double sum_v = 0.0;
    double sum_quad = 0.0;
    auto accumulate = [&](Eigen::Index i) {
        const double resid = working_response(state, data, i) - data.X.row(i).dot(state.beta) -
                             mc.theta * state.v[i];
        nc += 1.0;
        sum_v += state.v[i];
        sum_quad += resid * resid / (2.0 * mc.psi2 * state.v[i]);
    };
    for (Eigen::Index i : part.positive) accumulate(i);
    for (Eigen::Index i : part.censored) accumulate(i);
    return FullCondSigma{priors.n0 + 1.5 * nc, priors.s0 + sum_v + sum_quad};
}

void update_sigma(ParamState& state, const Dataset& data, const IndexPartition& part,
                  const ModelConfig& cfg, const Priors& priors, RngStream& rng) {
    const FullCondSigma fc = sigma_full_conditional(state, data, part, cfg, priors);
    state.sigma = draw_inverse_gamma(fc.shape, fc.scale, rng);
}

int update_gamma(ParamState& state, const Dataset& data, const IndexPartition& part,
                 const ModelConfig& cfg, const Priors& priors, double mh_step, RngStream& rng) {
    const Eigen::Index m = state.gamma.size();
    if (m == 0) return 1;
    Eigen::MatrixXd scale = cfg.mh_scale_matrix.size() > 0
                                ? cfg.mh_scale_matrix
                                : Eigen::MatrixXd::Identity(m, m);
    const Eigen::VectorXd proposal = draw_mvn(state.gamma, mh_step * scale, rng);
    const double lp_cur = log_post_gamma(state.gamma, part, data, priors, cfg.link);
    const double lp_prop = log_post_gamma(proposal, part, data, priors, cfg.link);
    if (std::log(rng.uniform01()) < lp_prop - lp_cur) {
        state.gamma = proposal;
        return 1;
    }
    return 0;
}

int sweep(ParamState& state, const Dataset& data, const ModelConfig& cfg,
          const Priors& priors, double mh_step, RngStream& rng) {
    if (cfg.variant == Variant::censored_mix) update_c(state, data, cfg, rng);
    const IndexPartition part = partition(data.y, state.c);
    if (cfg.variant != Variant::twopart) impute_ystar(state, data, part, cfg, rng);
    update_v(state, data, part, cfg, rng);
    update_beta(state, data, part, cfg, priors, rng);
    update_sigma(state, data, part, cfg, priors, rng);
    if (cfg.variant == Variant::tobit) return 1;
    return update_gamma(state, data, part, cfg, priors, mh_step, rng);
}

double tune_mh_step(double step, double rate) {
    // Outside the window, retarget the center so the frozen step does not
    // sit on an edge; inside, leave the step alone.
    if (rate < 0.15) return step * std::max(0.3, rate / 0.30);
    if (rate > 0.50) return step * std::min(3.0, rate / 0.30);
    return step;
}

namespace {

void validate_run(const Dataset& data, const ModelConfig& cfg, const Priors& priors) {
    data.validate();
    cfg.validate();
    priors.validate(data.k(), cfg.variant == Variant::tobit ? priors.g0.size() : data.m());
    if (cfg.mh_scale_matrix.size() > 0) {
        if (cfg.mh_scale_matrix.rows() != data.m() ||
            cfg.mh_scale_matrix.cols() != data.m() ||
            Eigen::LLT<Eigen::MatrixXd>(cfg.mh_scale_matrix).info() != Eigen::Success)
            throw std::invalid_argument(
                "run_chain: mh_scale_matrix must be m x m symmetric positive definite");
    }
    const auto zeros = static_cast<Eigen::Index>(zero_indices(data).size());
    const Eigen::Index positives = data.n() - zeros;
    if (cfg.variant != Variant::tobit && zeros == 0)
        throw std::invalid_argument("run_chain: hurdle variants require at least one zero response");
    const Eigen::Index capacity = cfg.variant == Variant::twopart ? positives : data.n();
    if (capacity < data.k())
        throw std::invalid_argument(
            "run_chain: fewer potential continuous-part observations than coefficients");
}

}  // namespace

Chain run_chain_from(ParamState state, const Dataset& data, const ModelConfig& cfg,
                     const Priors& priors, RngStream& rng) {
    validate_run(data, cfg, priors);

    Dataset fit = data;
    fit.y = apply_transform(data.y, data.transform);

    const std::vector<Eigen::Index> zeros = zero_indices(fit);
    const Eigen::Index rows = (cfg.iters - cfg.burnin + cfg.thin - 1) / cfg.thin;
    const Eigen::Index m = cfg.variant == Variant::tobit ? 0 : fit.m();

    Chain chain;
    chain.config = cfg;
    chain.zero_obs = zeros;
    chain.beta_draws.resize(rows, fit.k());
    chain.gamma_draws.resize(rows, m);
    chain.sigma_draws.resize(rows);
    chain.c_draws.resize(rows, static_cast<Eigen::Index>(zeros.size()));

    double step = cfg.mh_step;
    long window_accepts = 0;
    int window_n = 0;
    long retained_accepts = 0;
    long total_accepts = 0;
    long post_burn_updates = 0;
    Eigen::Index row = 0;

    // Warm phase: the leading burn-in sweeps run with every zero held in the
    // true-zero set so beta, sigma and gamma settle near the data scale
    // before the censoring indicators are released.
    const int warm = cfg.resolved_warm_start();
    ModelConfig warm_cfg = cfg;
    warm_cfg.variant = Variant::twopart;
    if (warm > 0) std::fill(state.c.begin(), state.c.end(), 0);

    for (int t = 1; t <= cfg.iters; ++t) {
        int accepted = 0;
        try {
            accepted = t <= warm ? sweep(state, fit, warm_cfg, priors, step, rng)
                                 : sweep(state, fit, cfg, priors, step, rng);
        } catch (const std::invalid_argument& e) {
            // Inputs were validated up front, so a precondition tripping
            // mid-iteration is a numerical failure, not a config error.
            throw std::runtime_error("run_chain: numerical failure at iteration " +
                                     std::to_string(t) + ": " + e.what());
        }
        require_finite(state.beta.allFinite(), t, "beta");
        require_finite(std::isfinite(state.sigma) && state.sigma > 0.0, t, "sigma");
        require_finite(state.gamma.allFinite(), t, "gamma");
        require_finite(state.v.allFinite(), t, "v");
        require_finite(state.ystar.allFinite(), t, "ystar");

        if (cfg.variant != Variant::tobit) {
            total_accepts += accepted;
            if (t > cfg.burnin) {
                retained_accepts += accepted;
                ++post_burn_updates;
            } else if (cfg.adapt_mh) {
                window_accepts += accepted;
                ++window_n;
                if (t % cfg.adapt_window == 0) {
                    step = tune_mh_step(step, static_cast<double>(window_accepts) / window_n);
                    window_accepts = 0;
                    window_n = 0;
                }
            }
        }

        if (t > cfg.burnin && (t - cfg.burnin - 1) % cfg.thin == 0) {
            chain.beta_draws.row(row) = state.beta;
            if (m > 0) chain.gamma_draws.row(row) = state.gamma;
            chain.sigma_draws[row] = state.sigma;
            for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(zeros.size()); ++j)
                chain.c_draws(row, j) = state.c[zeros[static_cast<std::size_t>(j)]];
            ++row;
        }
    }

    chain.mh_accept_total = total_accepts;
    chain.mh_accept_retained = retained_accepts;
    chain.mh_acceptance_rate =
        cfg.variant == Variant::tobit
            ? std::numeric_limits<double>::quiet_NaN()
            : static_cast<double>(retained_accepts) / static_cast<double>(post_burn_updates);
    chain.mh_step_final = step;
    return chain;
}

Chain run_chain(const Dataset& data, const ModelConfig& cfg, const Priors& priors,
                RngStream& rng) {
    validate_run(data, cfg, priors);
    Dataset fit = data;
    fit.y = apply_transform(data.y, data.transform);
    ParamState state = init_state(fit, cfg, rng);
    return run_chain_from(std::move(state), data, cfg, priors, rng);
}

Chain run_chain(const Dataset& data, const ModelConfig& cfg, const Priors& priors) {
    RngStream rng(cfg.seed, cfg.stream_id);
    return run_chain(data, cfg, priors, rng);
}

}  // namespace zqr
