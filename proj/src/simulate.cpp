#include "zqr/simulate.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "zqr/summary.hpp"

namespace zqr {

void SimSpec::validate() const {
    if (n <= 0) throw std::invalid_argument("SimSpec: n must be positive");
    if (!(noise_sd > 0.0)) throw std::invalid_argument("SimSpec: noise_sd must be positive");
    if (!(covariate_low < covariate_high))
        throw std::invalid_argument("SimSpec: covariate_low must be below covariate_high");
    if (replications <= 0) throw std::invalid_argument("SimSpec: replications must be positive");
    if (taus.empty()) throw std::invalid_argument("SimSpec: tau list must be nonempty");
    for (double t : taus) QuantileLevel{t};  // range check
}

std::pair<Dataset, std::vector<std::uint8_t>> generate(const SimSpec& spec, RngStream& rng) {
    Dataset data;
    data.y.resize(spec.n);
    data.X.resize(spec.n, 3);
    data.Z.resize(spec.n, 3);
    std::vector<std::uint8_t> true_c(static_cast<std::size_t>(spec.n), 0);

    const double width = spec.covariate_high - spec.covariate_low;
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        const double x1 = spec.covariate_low + width * rng.uniform01();
        const double x2 = spec.covariate_low + width * rng.uniform01();
        data.X(i, 0) = 1.0;
        data.X(i, 1) = x1;
        data.X(i, 2) = x2;
        data.Z.row(i) = data.X.row(i);

        const double p = link_inverse(LinkKind::logit, data.Z.row(i).dot(spec.gamma_true));
        if (draw_bernoulli(p, rng)) {
            data.y[i] = 0.0;  // true zero
            continue;
        }
        const double latent =
            data.X.row(i).dot(spec.beta_true) + spec.noise_sd * draw_std_normal(rng);
        if (latent <= 0.0) {
            data.y[i] = 0.0;
            true_c[static_cast<std::size_t>(i)] = 1;
        } else {
            data.y[i] = latent;
        }
    }
    return {std::move(data), std::move(true_c)};
}

namespace {

RepSummary summarize_fit(const Chain& chain, const std::vector<std::uint8_t>& true_c,
                         const Dataset& data, int rep, double tau) {
    RepSummary rs;
    rs.replication = rep;
    rs.tau = tau;
    const auto [zc, zd] = group_censor_means(censor_profiles(chain), true_c);
    rs.zeta_c = zc;
    rs.zeta_d = zd;
    rs.beta2_mean = posterior_mean(chain.beta_draws.col(2));
    rs.gamma1_mean = posterior_mean(chain.gamma_draws.col(1));
    rs.gamma2_mean = posterior_mean(chain.gamma_draws.col(2));
    const auto n = static_cast<double>(data.n());
    rs.zero_fraction = static_cast<double>(chain.zero_obs.size()) / n;
    double censored = 0.0;
    for (auto flag : true_c) censored += flag;
    rs.censored_fraction = censored / n;
    rs.mh_acceptance_rate = chain.mh_acceptance_rate;
    return rs;
}

}  // namespace

std::vector<RepSummary> run_study(const SimSpec& spec) {
    spec.validate();
    const auto n_taus = spec.taus.size();
    std::vector<RepSummary> results(static_cast<std::size_t>(spec.replications) * n_taus);

    // Stream layout per replication: stream 0 generates the data, streams
    // 1..|taus| drive the fits, so replications are mutually disjoint.
    const auto streams_per_rep = static_cast<std::uint64_t>(n_taus) + 1;

    auto run_one = [&](int rep) {
        RngStream gen_rng(spec.seed, static_cast<std::uint64_t>(rep) * streams_per_rep);
        auto [data, true_c] = generate(spec, gen_rng);

        Priors priors = Priors::defaults(data.k(), data.m());
        priors.B0 = spec.prior_coef_var * Eigen::MatrixXd::Identity(data.k(), data.k());
        priors.G0 = spec.prior_coef_var * Eigen::MatrixXd::Identity(data.m(), data.m());
        priors.n0 = spec.prior_sigma_shape;
        priors.s0 = spec.prior_sigma_scale;

        for (std::size_t ti = 0; ti < n_taus; ++ti) {
            ModelConfig cfg = spec.fit;
            cfg.tau = QuantileLevel(spec.taus[ti]);
            cfg.variant = Variant::censored_mix;
            cfg.seed = spec.seed;
            cfg.stream_id = static_cast<std::uint64_t>(rep) * streams_per_rep + 1 + ti;
            const Chain chain = run_chain(data, cfg, priors);
            results[static_cast<std::size_t>(rep) * n_taus + ti] =
                summarize_fit(chain, true_c, data, rep, spec.taus[ti]);
        }
    };

    int thread_count = spec.threads > 0 ? spec.threads
                                        : static_cast<int>(std::thread::hardware_concurrency());
    if (thread_count < 1) thread_count = 1;
    thread_count = std::min(thread_count, spec.replications);

    if (thread_count == 1) {
        for (int rep = 0; rep < spec.replications; ++rep) run_one(rep);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int w = 0; w < thread_count; ++w) {
            pool.emplace_back([&] {
                try {
                    for (int rep = next.fetch_add(1); rep < spec.replications;
                         rep = next.fetch_add(1))
                        run_one(rep);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return results;
}

}  // namespace zqr
