#include "zqr/summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace zqr {

double posterior_mean(const Eigen::VectorXd& draws) {
    if (draws.size() == 0) throw std::invalid_argument("posterior_mean: empty draws");
    return draws.mean();
}

double empirical_quantile(const Eigen::VectorXd& draws, double p) {
    if (draws.size() == 0) throw std::invalid_argument("empirical_quantile: empty draws");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("empirical_quantile: p must be in [0,1]");
    std::vector<double> sorted(draws.data(), draws.data() + draws.size());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    // Hazen plotting position: h = n*p + 1/2, clamped to [1, n].
    const double h = std::clamp(n * p + 0.5, 1.0, n);
    const auto lo = static_cast<std::size_t>(std::floor(h)) - 1;
    const double frac = h - std::floor(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::pair<double, double> credible_interval(const Eigen::VectorXd& draws, double level) {
    if (!(level > 0.0 && level <= 1.0))
        throw std::invalid_argument("credible_interval: level must be in (0,1]");
    const double alpha = (1.0 - level) / 2.0;
    return {empirical_quantile(draws, alpha), empirical_quantile(draws, 1.0 - alpha)};
}

std::vector<CensorProfile> censor_profiles(const Chain& chain) {
    std::vector<CensorProfile> out;
    out.reserve(chain.zero_obs.size());
    const auto rows = static_cast<double>(chain.c_draws.rows());
    for (Eigen::Index j = 0; j < chain.c_draws.cols(); ++j) {
        double sum = 0.0;
        for (Eigen::Index r = 0; r < chain.c_draws.rows(); ++r) sum += chain.c_draws(r, j);
        out.push_back(CensorProfile{chain.zero_obs[static_cast<std::size_t>(j)],
                                    chain.config.tau.value(), sum / rows});
    }
    return out;
}

std::pair<double, double> group_censor_means(const std::vector<CensorProfile>& profiles,
                                             const std::vector<std::uint8_t>& true_c) {
    double sum_c = 0.0, sum_d = 0.0;
    long n_c = 0, n_d = 0;
    for (const CensorProfile& pr : profiles) {
        if (true_c.at(static_cast<std::size_t>(pr.obs_id))) {
            sum_c += pr.prob;
            ++n_c;
        } else {
            sum_d += pr.prob;
            ++n_d;
        }
    }
    if (n_c == 0) throw std::invalid_argument("group_censor_means: no truly censored zeros");
    if (n_d == 0) throw std::invalid_argument("group_censor_means: no truly uncensored zeros");
    return {sum_c / n_c, sum_d / n_d};
}

double effective_sample_size(const Eigen::VectorXd& draws) {
    const Eigen::Index n = draws.size();
    if (n < 2) return 0.0;
    const double mean = draws.mean();
    const Eigen::VectorXd centered = draws.array() - mean;
    const double c0 = centered.squaredNorm() / n;
    if (c0 <= 0.0) return 0.0;  // constant series carries no information

    auto acov = [&](Eigen::Index lag) {
        return centered.head(n - lag).dot(centered.tail(n - lag)) / n;
    };

    // Geyer initial monotone sequence: sum consecutive autocovariance pairs
    // while they stay positive, capping each at the running minimum.
    double sum_pairs = 0.0;
    double cap = std::numeric_limits<double>::infinity();
    for (Eigen::Index lag = 1; lag + 1 < n; lag += 2) {
        double pair = acov(lag) + acov(lag + 1);
        if (pair <= 0.0) break;
        pair = std::min(pair, cap);
        cap = pair;
        sum_pairs += pair;
    }
    const double ess = n / (1.0 + 2.0 * sum_pairs / c0);
    return std::clamp(ess, 0.0, static_cast<double>(n));
}

Summary summarize_chain(const Chain& chain, double level) {
    Summary s;
    s.level = level;
    s.mh_acceptance_rate = chain.mh_acceptance_rate;
    auto add = [&](const std::string& name, const Eigen::VectorXd& draws) {
        const auto [lo, hi] = credible_interval(draws, level);
        s.parameters.push_back(
            ParameterSummary{name, posterior_mean(draws), lo, hi, effective_sample_size(draws)});
    };
    for (Eigen::Index j = 0; j < chain.beta_draws.cols(); ++j)
        add("beta_" + std::to_string(j), chain.beta_draws.col(j));
    for (Eigen::Index j = 0; j < chain.gamma_draws.cols(); ++j)
        add("gamma_" + std::to_string(j), chain.gamma_draws.col(j));
    add("sigma", chain.sigma_draws);
    return s;
}

}  // namespace zqr
