#include "lsmmn/sampler.hpp"

#include "lsmmn/procrustes.hpp"

#include <cmath>
#include <limits>

namespace lsmmn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

bool accept(double log_ratio, Rng& rng) {
    if (std::isnan(log_ratio) || log_ratio == kNegInf) return false;
    if (log_ratio >= 0.0) return true;
    return std::log(sample_uniform(rng)) < log_ratio;
}

// Bernoulli log-mass of one dyad given its linear predictor.
inline double dyad_log_mass(std::uint8_t y, double eta) { return (y ? eta : 0.0) - log1p_exp(eta); }

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite input");
}

}  // namespace

ShapeRate sigma2_conditional(std::span<const double> values, double mu, double tau, double nu,
                             double prior_mean) {
    check_finite(values, "sigma2 conditional");
    if (!std::isfinite(mu) || !(tau > 0.0) || !(nu > 0.0) || !std::isfinite(tau) || !std::isfinite(nu) ||
        !std::isfinite(prior_mean))
        throw DomainError("sigma2 conditional: invalid hyperparameters");
    if (values.empty()) throw DomainError("sigma2 conditional: no values");
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    const double centre = mu - prior_mean;
    ShapeRate out;
    out.shape = 0.5 * (nu + static_cast<double>(values.size()) + 1.0);
    out.rate = (tau + tau * ss + centre * centre) / (2.0 * tau);
    return out;
}

double gibbs_sigma2(std::span<const double> values, double mu, double tau, double nu, Rng& rng,
                    double prior_mean) {
    const auto sr = sigma2_conditional(values, mu, tau, nu, prior_mean);
    return sample_inverse_gamma(sr.shape, sr.rate, rng);
}

ProposalParams mu_conditional(std::span<const double> values, double sigma2, double tau, double m) {
    check_finite(values, "mu conditional");
    if (!(sigma2 > 0.0) || !(tau > 0.0)) throw DomainError("mu conditional: sigma2 and tau must be positive");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double denom = 1.0 + static_cast<double>(values.size()) * tau;
    return {(tau * sum + m) / denom, tau * sigma2 / denom};
}

double gibbs_mu(std::span<const double> values, double sigma2, double tau, double m, double lower, Rng& rng) {
    const auto c = mu_conditional(values, sigma2, tau, m);
    return sample_truncated_normal(c.mean, std::sqrt(c.variance), lower, kPosInf, rng);
}

void gibbs_lambda_nuisance(ModelState& state, int f, const HyperConfig& hyper, Rng& rng) {
    const double tau = hyper.tau_lambda.value_or(1.0);
    const double m = hyper.m_lambda.value_or(0.0);
    const double lambda = state.lambda[f];
    const std::span<const double> one(&lambda, 1);
    state.sigma2_lambda[f] = gibbs_sigma2(one, state.mu_lambda[f], tau, hyper.nu_lambda, rng, m);
    state.mu_lambda[f] = gibbs_mu(one, state.sigma2_lambda[f], tau, m, 0.0, rng);
}

ProposalParams alpha_proposal(const Multiplex& m, int k, double beta_k, double mu_alpha, double sigma2_alpha,
                              const DistanceMatrix& d, const Matrix& cov_term) {
    const int n = m.nodes();
    const auto& y = m.y[k];
    const auto& h = m.h[k];
    double edges = 0.0;
    double sum_p = 0.0;
    double sum_w = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i == j || h(i, j) == 0) continue;
            const double p = logistic(mu_alpha - beta_k * d(i, j) - cov_term(i, j));
            edges += y(i, j);
            sum_p += p;
            sum_w += p * (1.0 - p);
        }
    ProposalParams out;
    out.variance = 1.0 / (sum_w + 1.0 / sigma2_alpha);
    out.mean = out.variance * (edges - sum_p) + mu_alpha;
    return out;
}

ProposalParams beta_proposal(const Multiplex& m, int k, double alpha_k, double mu_beta, double sigma2_beta,
                             const DistanceMatrix& d, const Matrix& cov_term) {
    const int n = m.nodes();
    const auto& y = m.y[k];
    const auto& h = m.h[k];
    double grad = 0.0;
    double curv = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i == j || h(i, j) == 0) continue;
            const double dij = d(i, j);
            if (dij == 0.0) continue;
            const double p = logistic(alpha_k - mu_beta * dij - cov_term(i, j));
            grad += dij * (p - y(i, j));
            curv += dij * dij * p * (1.0 - p);
        }
    ProposalParams out;
    out.variance = 1.0 / (curv + 1.0 / sigma2_beta);
    out.mean = out.variance * grad + mu_beta;
    return out;
}

ScalarCandidate propose_alpha(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                              const Matrix& cov_term, int k, Rng& rng) {
    ScalarCandidate c;
    c.params = alpha_proposal(m, k, state.beta[k], state.mu_alpha, state.sigma2_alpha, d, cov_term);
    c.value = sample_normal(c.params.mean, std::sqrt(c.params.variance), rng);
    return c;
}

ScalarCandidate propose_beta(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                             const Matrix& cov_term, int k, Rng& rng) {
    ScalarCandidate c;
    c.params = beta_proposal(m, k, state.alpha[k], state.mu_beta, state.sigma2_beta, d, cov_term);
    c.value = sample_normal(c.params.mean, std::sqrt(c.params.variance), rng);
    return c;
}

double alpha_beta_log_ratio(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                            const Matrix& cov_term, int k, double alpha_candidate, double beta_candidate,
                            double lower_alpha) {
    if (!(alpha_candidate > lower_alpha) || !(beta_candidate >= 0.0)) return kNegInf;
    const double a0 = state.alpha[k];
    const double b0 = state.beta[k];

    double log_ratio = log_likelihood_network(m, k, alpha_candidate, beta_candidate, d, cov_term) -
                       log_likelihood_network(m, k, a0, b0, d, cov_term);
    log_ratio += -0.5 * ((alpha_candidate - state.mu_alpha) * (alpha_candidate - state.mu_alpha) -
                         (a0 - state.mu_alpha) * (a0 - state.mu_alpha)) /
                 state.sigma2_alpha;
    log_ratio += -0.5 * ((beta_candidate - state.mu_beta) * (beta_candidate - state.mu_beta) -
                         (b0 - state.mu_beta) * (b0 - state.mu_beta)) /
                 state.sigma2_beta;

    const auto fwd_a = alpha_proposal(m, k, b0, state.mu_alpha, state.sigma2_alpha, d, cov_term);
    const auto fwd_b = beta_proposal(m, k, a0, state.mu_beta, state.sigma2_beta, d, cov_term);
    const auto rev_a = alpha_proposal(m, k, beta_candidate, state.mu_alpha, state.sigma2_alpha, d, cov_term);
    const auto rev_b = beta_proposal(m, k, alpha_candidate, state.mu_beta, state.sigma2_beta, d, cov_term);
    log_ratio += normal_log_density(a0, rev_a.mean, rev_a.variance) +
                 normal_log_density(b0, rev_b.mean, rev_b.variance);
    log_ratio -= normal_log_density(alpha_candidate, fwd_a.mean, fwd_a.variance) +
                 normal_log_density(beta_candidate, fwd_b.mean, fwd_b.variance);
    return log_ratio;
}

bool mh_alpha_beta_joint(const Multiplex& m, ModelState& state, const DistanceMatrix& d, const Matrix& cov_term,
                         int k, double lower_alpha, Rng& rng) {
    const auto a = propose_alpha(m, state, d, cov_term, k, rng);
    const auto b = propose_beta(m, state, d, cov_term, k, rng);
    const double r = alpha_beta_log_ratio(m, state, d, cov_term, k, a.value, b.value, lower_alpha);
    if (!accept(r, rng)) return false;
    state.alpha[k] = a.value;
    state.beta[k] = b.value;
    return true;
}

bool mh_alpha_only(const Multiplex& m, ModelState& state, const DistanceMatrix& d, const Matrix& cov_term, int k,
                   double lower_alpha, Rng& rng) {
    const auto a = propose_alpha(m, state, d, cov_term, k, rng);
    if (!(a.value > lower_alpha)) return false;
    const double a0 = state.alpha[k];
    const double b0 = state.beta[k];
    double r = log_likelihood_network(m, k, a.value, b0, d, cov_term) -
               log_likelihood_network(m, k, a0, b0, d, cov_term);
    r += -0.5 * ((a.value - state.mu_alpha) * (a.value - state.mu_alpha) -
                 (a0 - state.mu_alpha) * (a0 - state.mu_alpha)) /
         state.sigma2_alpha;
    // The proposal does not depend on the current intercept, so the same density serves both ways.
    r += normal_log_density(a0, a.params.mean, a.params.variance) -
         normal_log_density(a.value, a.params.mean, a.params.variance);
    if (!accept(r, rng)) return false;
    state.alpha[k] = a.value;
    return true;
}

LatentProposal latent_proposal(const Multiplex& m, const ModelState& state, const Matrix& cov_term, int i,
                               std::span<const double> position) {
    const int n = m.nodes();
    const int K = m.networks();
    const int p = state.dims();
    if (static_cast<int>(position.size()) != p) throw DimensionError("latent position has the wrong length");

    double abs_sum = 0.0;
    Vector pull = Vector::Zero(p);
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double* zj = state.z.row(j).data();
        double dist = 0.0;
        for (int l = 0; l < p; ++l) dist += (position[l] - zj[l]) * (position[l] - zj[l]);
        double signed_sum = 0.0;
        for (int k = 0; k < K; ++k) {
            if (m.h[k](i, j) == 0) continue;
            const double eta = state.alpha[k] - state.beta[k] * dist - cov_term(i, j);
            const int w = eta > 0.0 ? 1 : 0;
            const int diff = static_cast<int>(m.y[k](i, j)) - w;
            if (diff == 0) continue;
            abs_sum += state.beta[k];
            signed_sum += state.beta[k] * diff;
        }
        if (signed_sum != 0.0)
            for (int l = 0; l < p; ++l) pull[l] += signed_sum * zj[l];
    }
    LatentProposal out;
    out.variance = 1.0 / (1.0 + 2.0 * abs_sum);
    out.mean = out.variance * 2.0 * pull;
    return out;
}

LatentProposal latent_proposal(const Multiplex& m, const ModelState& state, const Matrix& cov_term, int i) {
    return latent_proposal(m, state, cov_term, i, {state.z.row(i).data(), static_cast<std::size_t>(state.dims())});
}

LatentCandidate propose_latent(const Multiplex& m, const ModelState& state, const Matrix& cov_term, int i,
                               Rng& rng) {
    LatentCandidate c;
    c.params = latent_proposal(m, state, cov_term, i);
    const double sd = std::sqrt(c.params.variance);
    c.value.resize(state.dims());
    for (int l = 0; l < state.dims(); ++l) c.value[l] = sample_normal(c.params.mean[l], sd, rng);
    return c;
}

double latent_log_ratio(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                        const Matrix& cov_term, int i, std::span<const double> candidate) {
    const int n = m.nodes();
    const int K = m.networks();
    const int p = state.dims();
    if (static_cast<int>(candidate.size()) != p) throw DimensionError("latent candidate has the wrong length");
    const double* zi = state.z.row(i).data();

    double delta = 0.0;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double* zj = state.z.row(j).data();
        double dist_new = 0.0;
        for (int l = 0; l < p; ++l) dist_new += (candidate[l] - zj[l]) * (candidate[l] - zj[l]);
        const double dist_old = d(i, j);
        for (int k = 0; k < K; ++k) {
            const double a = state.alpha[k];
            const double b = state.beta[k];
            if (m.h[k](i, j)) {
                const double c = a - cov_term(i, j);
                delta += dyad_log_mass(m.y[k](i, j), c - b * dist_new) - dyad_log_mass(m.y[k](i, j), c - b * dist_old);
            }
            if (m.h[k](j, i)) {
                const double c = a - cov_term(j, i);
                delta += dyad_log_mass(m.y[k](j, i), c - b * dist_new) - dyad_log_mass(m.y[k](j, i), c - b * dist_old);
            }
        }
    }
    double norm_new = 0.0;
    double norm_old = 0.0;
    for (int l = 0; l < p; ++l) {
        norm_new += candidate[l] * candidate[l];
        norm_old += zi[l] * zi[l];
    }
    delta += -0.5 * (norm_new - norm_old);

    const auto forward = latent_proposal(m, state, cov_term, i);
    const auto reverse = latent_proposal(m, state, cov_term, i, candidate);
    for (int l = 0; l < p; ++l) {
        delta += normal_log_density(zi[l], reverse.mean[l], reverse.variance);
        delta -= normal_log_density(candidate[l], forward.mean[l], forward.variance);
    }
    return delta;
}

bool mh_latent_node(const Multiplex& m, ModelState& state, DistanceMatrix& d, const Matrix& cov_term, int i,
                    Rng& rng) {
    const auto c = propose_latent(m, state, cov_term, i, rng);
    const std::span<const double> cand(c.value.data(), static_cast<std::size_t>(c.value.size()));
    if (!accept(latent_log_ratio(m, state, d, cov_term, i, cand), rng)) return false;
    state.z.row(i) = c.value.transpose();
    d.update_node(state.z, i);
    return true;
}

SweepResult mh_latent_sweep(const Multiplex& m, ModelState& state, DistanceMatrix& d, const Matrix& cov_term,
                            double threshold, Rng& rng) {
    const Coordinates before = state.z;
    const DistanceMatrix d_before = d;
    SweepResult result;
    result.accepted.assign(static_cast<std::size_t>(m.nodes()), 0);
    bool moved = false;
    for (int i = 0; i < m.nodes(); ++i) {
        const bool ok = mh_latent_node(m, state, d, cov_term, i, rng);
        result.accepted[static_cast<std::size_t>(i)] = ok ? 1 : 0;
        moved = moved || ok;
    }
    result.procrustes = moved ? procrustes_correlation(before, state.z) : 1.0;
    if (result.procrustes > threshold) {
        state.z = before;
        d = d_before;
        result.reverted = true;
    }
    return result;
}

ProposalParams lambda_proposal(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                               const CovariateSet& covariates, const Matrix& cov_term, int f) {
    const int n = m.nodes();
    const Matrix& x = covariates.x[f];
    const double lam = state.lambda[f];
    const double centre = state.mu_lambda[f];
    double grad = 0.0;
    double curv = 0.0;
    for (int k = 0; k < m.networks(); ++k) {
        const auto& y = m.y[k];
        const auto& h = m.h[k];
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (i == j || h(i, j) == 0) continue;
                const double xij = x(i, j);
                if (xij == 0.0) continue;
                // Linear predictor with lambda_f replaced by the expansion point.
                const double eta =
                    state.alpha[k] - state.beta[k] * d(i, j) - (cov_term(i, j) - lam * xij) - centre * xij;
                const double p = logistic(eta);
                grad += xij * (p - y(i, j));
                curv += xij * xij * p * (1.0 - p);
            }
    }
    ProposalParams out;
    out.variance = 1.0 / (curv + 1.0 / state.sigma2_lambda[f]);
    out.mean = out.variance * grad + centre;
    return out;
}

double lambda_log_ratio(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                        const CovariateSet& covariates, const Matrix& cov_term, int f, double candidate) {
    if (!(candidate >= 0.0)) return kNegInf;
    const int n = m.nodes();
    const Matrix& x = covariates.x[f];
    const double lam = state.lambda[f];
    const double step = candidate - lam;

    double delta = 0.0;
    for (int k = 0; k < m.networks(); ++k) {
        const auto& y = m.y[k];
        const auto& h = m.h[k];
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (i == j || h(i, j) == 0 || x(i, j) == 0.0) continue;
                const double eta = state.alpha[k] - state.beta[k] * d(i, j) - cov_term(i, j);
                delta += dyad_log_mass(y(i, j), eta - step * x(i, j)) - dyad_log_mass(y(i, j), eta);
            }
    }
    const double mu = state.mu_lambda[f];
    delta += -0.5 * ((candidate - mu) * (candidate - mu) - (lam - mu) * (lam - mu)) / state.sigma2_lambda[f];

    const auto q = lambda_proposal(m, state, d, covariates, cov_term, f);
    const double sd = std::sqrt(q.variance);
    delta += truncated_normal_log_density(lam, q.mean, sd, 0.0, kPosInf) -
             truncated_normal_log_density(candidate, q.mean, sd, 0.0, kPosInf);
    return delta;
}

bool mh_lambda(const Multiplex& m, ModelState& state, const DistanceMatrix& d, const CovariateSet& covariates,
               Matrix& cov_term, int f, Rng& rng) {
    const auto q = lambda_proposal(m, state, d, covariates, cov_term, f);
    const double candidate = sample_truncated_normal(q.mean, std::sqrt(q.variance), 0.0, kPosInf, rng);
    if (!accept(lambda_log_ratio(m, state, d, covariates, cov_term, f, candidate), rng)) return false;
    cov_term.noalias() += (candidate - state.lambda[f]) * covariates.x[f];
    state.lambda[f] = candidate;
    return true;
}

HyperConfig resolve_hyper(const HyperConfig& hyper, int networks, const ModelState& init) {
    HyperConfig out = hyper;
    out.tau_alpha = hyper.resolved_tau_alpha(networks);
    out.tau_beta = hyper.resolved_tau_beta(networks);
    out.tau_lambda = hyper.resolved_tau_lambda(networks);
    out.m_alpha = hyper.m_alpha.value_or(init.mu_alpha);
    out.m_beta = hyper.m_beta.value_or(init.mu_beta);
    out.m_lambda = hyper.m_lambda.value_or(0.0);
    return out;
}

void validate_start(const Multiplex& m, const CovariateSet& covariates, const HyperConfig& hyper,
                    const ModelState& init, ModelKind model) {
    hyper.validate();
    const int n = m.nodes();
    const int K = m.networks();
    const int F = covariates.count();
    if (init.z.rows() != n || init.z.cols() != hyper.p) throw ConfigError("starting latent matrix has the wrong shape");
    if (init.alpha.size() != K || init.beta.size() != K) throw ConfigError("starting alpha/beta have the wrong length");
    if (init.lambda.size() != F || init.mu_lambda.size() != F || init.sigma2_lambda.size() != F)
        throw ConfigError("starting covariate effects have the wrong length");
    if (hyper.reference >= K) throw ConfigError("reference network index out of range");
    if (!init.z.allFinite() || !init.alpha.allFinite() || !init.beta.allFinite() || !init.lambda.allFinite())
        throw ConfigError("starting state has non-finite entries");
    const double lb = lb_alpha(n);
    if (model == ModelKind::latent_space) {
        if (!(hyper.alpha_ref > lb))
            throw ConfigError("reference intercept must exceed the intercept lower bound " + std::to_string(lb));
        if (init.alpha[hyper.reference] != hyper.alpha_ref || init.beta[hyper.reference] != 1.0)
            throw ConfigError("starting state does not satisfy the reference-network constraints");
        if (!in_support(init, hyper.reference, lb)) throw ConfigError("starting state lies outside the prior support");
    } else {
        if (!(init.beta.array() == 0.0).all()) throw ConfigError("random-graph start needs all coefficients at zero");
        if (!(init.alpha.array() > lb).all()) throw ConfigError("random-graph start has an intercept below the bound");
        if (!in_support(init, -1, lb)) throw ConfigError("starting state lies outside the prior support");
    }
}

ChainOutput run_chain(const Multiplex& m, const CovariateSet& covariates, const HyperConfig& hyper,
                      const ModelState& init, const RunOptions& options) {
    m.validate();
    covariates.validate(m.nodes());
    validate_start(m, covariates, hyper, init, options.model);

    const int n = m.nodes();
    const int K = m.networks();
    const int F = covariates.count();
    const HyperConfig h = resolve_hyper(hyper, K, init);
    const double lb = lb_alpha(n);
    const bool latent_model = options.model == ModelKind::latent_space;

    ChainOutput out;
    out.hyper = h;
    out.model = options.model;
    out.acceptance.network_accepted.assign(static_cast<std::size_t>(K), 0);
    out.acceptance.latent_accepted.assign(static_cast<std::size_t>(n), 0);
    out.acceptance.lambda_accepted.assign(static_cast<std::size_t>(F), 0);
    const long stored = (h.iters - h.burnin) / h.thin;
    out.draws.reserve(static_cast<std::size_t>(stored));

    Rng rng(h.seed);
    ModelState state = init;
    DistanceMatrix d = distance_matrix(state.z);
    Matrix cov_term = covariate_term(covariates, state.lambda, n);

    for (long iter = 1; iter <= h.iters; ++iter) {
        if (options.blocks.nuisance) {
            const std::span<const double> alphas(state.alpha.data(), static_cast<std::size_t>(K));
            const std::span<const double> betas(state.beta.data(), static_cast<std::size_t>(K));
            state.sigma2_alpha = gibbs_sigma2(alphas, state.mu_alpha, *h.tau_alpha, h.nu_alpha, rng, *h.m_alpha);
            if (latent_model)
                state.sigma2_beta = gibbs_sigma2(betas, state.mu_beta, *h.tau_beta, h.nu_beta, rng, *h.m_beta);
            state.mu_alpha = gibbs_mu(alphas, state.sigma2_alpha, *h.tau_alpha, *h.m_alpha, lb, rng);
            if (latent_model) state.mu_beta = gibbs_mu(betas, state.sigma2_beta, *h.tau_beta, *h.m_beta, 0.0, rng);
            for (int f = 0; f < F; ++f) gibbs_lambda_nuisance(state, f, h, rng);
        }

        if (options.blocks.network) {
            for (int k = 0; k < K; ++k) {
                bool ok = false;
                if (latent_model) {
                    if (k == h.reference) continue;
                    ok = mh_alpha_beta_joint(m, state, d, cov_term, k, lb, rng);
                } else {
                    ok = mh_alpha_only(m, state, d, cov_term, k, lb, rng);
                }
                if (ok) ++out.acceptance.network_accepted[static_cast<std::size_t>(k)];
            }
        }

        bool reverted = false;
        if (latent_model && options.blocks.latent) {
            const auto sweep = mh_latent_sweep(m, state, d, cov_term, h.procrustes_threshold, rng);
            ++out.acceptance.sweeps;
            reverted = sweep.reverted;
            if (reverted) ++out.acceptance.procrustes_reverts;
            for (int i = 0; i < n; ++i)
                out.acceptance.latent_accepted[static_cast<std::size_t>(i)] += sweep.accepted[static_cast<std::size_t>(i)];
        }

        if (options.blocks.lambda)
            for (int f = 0; f < F; ++f)
                if (mh_lambda(m, state, d, covariates, cov_term, f, rng))
                    ++out.acceptance.lambda_accepted[static_cast<std::size_t>(f)];

        ++out.acceptance.iterations;
        if (iter > h.burnin && (iter - h.burnin) % h.thin == 0) {
            out.draws.push_back(state);
            out.iterations.push_back(iter);
            out.deviance.push_back(-2.0 * log_likelihood(m, state, d, cov_term));
            out.reverted.push_back(reverted ? 1 : 0);
        }
        if (options.on_iteration) options.on_iteration(iter);
    }
    return out;
}

}  // namespace lsmmn
