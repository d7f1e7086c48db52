#include "zqr/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace zqr {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double norm_cdf(double t) { return 0.5 * std::erfc(-t * kSqrt1_2); }

// log Phi(t); asymptotic expansion once erfc is at risk of underflow.
double log_norm_cdf(double t) {
    if (t > -10.0) return std::log(norm_cdf(t));
    const double t2 = t * t;
    // Phi(t) ~ phi(t)/(-t) * (1 - 1/t^2 + 3/t^4) for t -> -inf
    return -0.5 * t2 - kLogSqrt2Pi - std::log(-t) + std::log1p(-1.0 / t2 + 3.0 / (t2 * t2));
}

}  // namespace

void Dataset::validate() const {
    const Eigen::Index nrows = y.size();
    if (X.rows() != nrows || Z.rows() != nrows)
        throw std::invalid_argument("Dataset: X and Z row counts must equal length(y)");
    for (Eigen::Index i = 0; i < nrows; ++i) {
        if (!std::isfinite(y[i]))
            throw std::invalid_argument("Dataset: non-finite response at row " + std::to_string(i));
        if (y[i] < 0.0)
            throw std::invalid_argument("Dataset: negative response at row " + std::to_string(i));
    }
    if (!X.allFinite() || !Z.allFinite())
        throw std::invalid_argument("Dataset: design matrices must be finite");
}

Priors Priors::defaults(Eigen::Index k, Eigen::Index m) {
    Priors p;
    p.b0 = Eigen::VectorXd::Zero(k);
    p.B0 = 100.0 * Eigen::MatrixXd::Identity(k, k);
    p.g0 = Eigen::VectorXd::Zero(m);
    p.G0 = 100.0 * Eigen::MatrixXd::Identity(m, m);
    p.n0 = 1.5;
    p.s0 = 0.05;
    return p;
}

void Priors::validate(Eigen::Index k, Eigen::Index m) const {
    if (b0.size() != k || B0.rows() != k || B0.cols() != k)
        throw std::invalid_argument("Priors: b0/B0 dimensions must match X");
    if (g0.size() != m || G0.rows() != m || G0.cols() != m)
        throw std::invalid_argument("Priors: g0/G0 dimensions must match Z");
    if (!(n0 > 0.0) || !(s0 > 0.0))
        throw std::invalid_argument("Priors: n0 and s0 must be positive");
    if (k > 0 && Eigen::LLT<Eigen::MatrixXd>(B0).info() != Eigen::Success)
        throw std::invalid_argument("Priors: B0 must be symmetric positive definite");
    if (m > 0 && Eigen::LLT<Eigen::MatrixXd>(G0).info() != Eigen::Success)
        throw std::invalid_argument("Priors: G0 must be symmetric positive definite");
}

int ModelConfig::resolved_warm_start() const {
    if (variant != Variant::censored_mix) return 0;
    const int cap = burnin / 2;
    if (warm_start_iters < 0) return std::min(200, cap);
    return std::min(warm_start_iters, cap);
}

void ModelConfig::validate() const {
    if (iters <= 0 || burnin < 0 || burnin >= iters)
        throw std::invalid_argument("ModelConfig: need 0 <= burnin < iters");
    if (thin <= 0) throw std::invalid_argument("ModelConfig: thin must be positive");
    if (!(mh_step > 0.0)) throw std::invalid_argument("ModelConfig: mh_step must be positive");
    if (adapt_window <= 0) throw std::invalid_argument("ModelConfig: adapt_window must be positive");
}

double link_inverse(LinkKind link, double t) {
    switch (link) {
        case LinkKind::logit: return 1.0 / (1.0 + std::exp(-t));
        case LinkKind::probit: return norm_cdf(t);
    }
    return 0.0;
}

double log_link_inverse(LinkKind link, double t) {
    switch (link) {
        case LinkKind::logit: {
            // -softplus(-t)
            return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
        }
        case LinkKind::probit: return log_norm_cdf(t);
    }
    return 0.0;
}

double log_link_complement(LinkKind link, double t) {
    return log_link_inverse(link, -t);
}

IndexPartition partition(const Eigen::VectorXd& y, const std::vector<std::uint8_t>& c) {
    IndexPartition part;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] > 0.0) {
            part.positive.push_back(i);
        } else if (c[static_cast<std::size_t>(i)]) {
            part.censored.push_back(i);
        } else {
            part.true_zero.push_back(i);
        }
    }
    return part;
}

double censor_prob(double p, double f0) {
    const double denom = p + (1.0 - p) * f0;
    if (denom <= 0.0) return 0.0;
    double out = (1.0 - p) * f0 / denom;
    if (out < 0.0) out = 0.0;
    if (out > 1.0) out = 1.0;
    return out;
}

double loglik_twopart(const ParamState& state, const Dataset& data, const ModelConfig& cfg) {
    const MixtureConstants mc = mixture_constants(cfg.tau);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double eta_z = data.Z.row(i).dot(state.gamma);
        if (data.y[i] == 0.0) {
            ll += log_link_inverse(cfg.link, eta_z);
        } else {
            ll += log_link_complement(cfg.link, eta_z);
            const double vi = state.v[i];
            const double var = mc.psi2 * state.sigma * vi;
            const double resid = data.y[i] - data.X.row(i).dot(state.beta) - mc.theta * vi;
            ll += -0.5 * std::log(var) - kLogSqrt2Pi - 0.5 * resid * resid / var;
            ll += -std::log(state.sigma) - vi / state.sigma;
        }
    }
    return ll;
}

double log_post_gamma(const Eigen::VectorXd& gamma, const IndexPartition& part,
                      const Dataset& data, const Priors& priors, LinkKind link) {
    double lp = 0.0;
    for (Eigen::Index i : part.true_zero)
        lp += log_link_inverse(link, data.Z.row(i).dot(gamma));
    for (Eigen::Index i : part.censored)
        lp += log_link_complement(link, data.Z.row(i).dot(gamma));
    for (Eigen::Index i : part.positive)
        lp += log_link_complement(link, data.Z.row(i).dot(gamma));
    const Eigen::VectorXd diff = gamma - priors.g0;
    lp += -0.5 * diff.dot(priors.G0.llt().solve(diff));
    return lp;
}

Eigen::VectorXd apply_transform(const Eigen::VectorXd& y, Transform t) {
    if (t == Transform::identity) return y;
    return y.array().sqrt().matrix();
}

double apply_transform(double y, Transform t) {
    return t == Transform::identity ? y : std::sqrt(y);
}

Eigen::VectorXd invert_transform(const Eigen::VectorXd& q, Transform t) {
    if (t == Transform::identity) return q;
    return (q.array() * q.array().abs()).matrix();
}

double invert_transform(double q, Transform t) {
    return t == Transform::identity ? q : q * std::abs(q);
}

}  // namespace zqr
