#pragma once

#include "lsmmn/core.hpp"
#include "lsmmn/random.hpp"
#include "lsmmn/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace lsmmn {

/// Mean and variance of a Gaussian proposal or full conditional.
struct ProposalParams {
    double mean = 0.0;
    double variance = 1.0;
};

/// Isotropic Gaussian proposal for one latent position.
struct LatentProposal {
    Vector mean;
    double variance = 1.0;
};

struct ShapeRate {
    double shape = 1.0;
    double rate = 1.0;
};

// ---- Nuisance full conditionals -----------------------------------------------------------

/// Inverse-gamma full conditional of a variance given K values with mean mu:
/// shape (nu + K + 1) / 2, rate (tau + tau * sum (x - mu)^2 + (mu - prior_mean)^2) / (2 tau).
ShapeRate sigma2_conditional(std::span<const double> values, double mu, double tau, double nu,
                             double prior_mean = 0.0);
double gibbs_sigma2(std::span<const double> values, double mu, double tau, double nu, Rng& rng,
                    double prior_mean = 0.0);

/// Normal full conditional of a mean: ((tau sum x + m) / (1 + K tau), tau sigma2 / (1 + K tau)).
ProposalParams mu_conditional(std::span<const double> values, double sigma2, double tau, double m);
/// Draw from mu_conditional truncated below at `lower`.
double gibbs_mu(std::span<const double> values, double sigma2, double tau, double m, double lower, Rng& rng);

/// Draws sigma2_lambda[f] then mu_lambda[f] from their full conditionals. `hyper` must be resolved.
void gibbs_lambda_nuisance(ModelState& state, int f, const HyperConfig& hyper, Rng& rng);

// ---- Network intercept / coefficient --------------------------------------------------------

/// Second-order expansion of the intercept log conditional around mu_alpha.
ProposalParams alpha_proposal(const Multiplex& m, int k, double beta_k, double mu_alpha, double sigma2_alpha,
                              const DistanceMatrix& d, const Matrix& cov_term);
/// Second-order expansion of the coefficient log conditional around mu_beta.
ProposalParams beta_proposal(const Multiplex& m, int k, double alpha_k, double mu_beta, double sigma2_beta,
                             const DistanceMatrix& d, const Matrix& cov_term);

struct ScalarCandidate {
    double value = 0.0;
    ProposalParams params;
};

ScalarCandidate propose_alpha(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                              const Matrix& cov_term, int k, Rng& rng);
ScalarCandidate propose_beta(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                             const Matrix& cov_term, int k, Rng& rng);

/// Log Metropolis-Hastings ratio for moving (alpha[k], beta[k]) to the candidate pair.
/// Reverse-move proposal parameters are evaluated at the candidate. -infinity outside the support.
double alpha_beta_log_ratio(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                            const Matrix& cov_term, int k, double alpha_candidate, double beta_candidate,
                            double lower_alpha);

/// Joint update of (alpha[k], beta[k]). Returns true when the candidate was accepted.
bool mh_alpha_beta_joint(const Multiplex& m, ModelState& state, const DistanceMatrix& d, const Matrix& cov_term,
                         int k, double lower_alpha, Rng& rng);

/// Intercept-only update used when the coefficients are pinned at zero (random-graph model).
bool mh_alpha_only(const Multiplex& m, ModelState& state, const DistanceMatrix& d, const Matrix& cov_term, int k,
                   double lower_alpha, Rng& rng);

// ---- Latent positions -----------------------------------------------------------------------

/// Proposal built from the log-sum-exp lower bound: w_ij = 1 iff the linear predictor is > 0,
/// precision 1 + 2 sum_k beta_k sum_j h_ij |y_ij - w_ij|,
/// mean variance * 2 sum_k beta_k sum_j h_ij (y_ij - w_ij) z_j.
/// `position` stands in for z_i; the other rows of state.z are used as they are.
LatentProposal latent_proposal(const Multiplex& m, const ModelState& state, const Matrix& cov_term, int i,
                               std::span<const double> position);
LatentProposal latent_proposal(const Multiplex& m, const ModelState& state, const Matrix& cov_term, int i);

struct LatentCandidate {
    Vector value;
    LatentProposal params;
};

LatentCandidate propose_latent(const Multiplex& m, const ModelState& state, const Matrix& cov_term, int i,
                               Rng& rng);

/// Log Metropolis-Hastings ratio for moving z_i to `candidate`.
double latent_log_ratio(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                        const Matrix& cov_term, int i, std::span<const double> candidate);

bool mh_latent_node(const Multiplex& m, ModelState& state, DistanceMatrix& d, const Matrix& cov_term, int i,
                    Rng& rng);

struct SweepResult {
    std::vector<std::uint8_t> accepted;
    double procrustes = 1.0;
    bool reverted = false;
};

/// Sequential node updates followed by the Procrustes check: when the post-sweep configuration
/// correlates with the pre-sweep one strictly above `threshold`, the whole sweep is undone.
SweepResult mh_latent_sweep(const Multiplex& m, ModelState& state, DistanceMatrix& d, const Matrix& cov_term,
                            double threshold, Rng& rng);

// ---- Covariate effects ----------------------------------------------------------------------

/// Second-order expansion of the lambda_f log conditional around mu_lambda[f].
ProposalParams lambda_proposal(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                               const CovariateSet& covariates, const Matrix& cov_term, int f);

double lambda_log_ratio(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                        const CovariateSet& covariates, const Matrix& cov_term, int f, double candidate);

/// Updates lambda[f] (and `cov_term` with it on acceptance).
bool mh_lambda(const Multiplex& m, ModelState& state, const DistanceMatrix& d, const CovariateSet& covariates,
               Matrix& cov_term, int f, Rng& rng);

// ---- Chain driver ---------------------------------------------------------------------------

enum class ModelKind { latent_space, random_graph };

/// Which blocks run each iteration. Disabling blocks holds them at their starting values.
struct SamplerBlocks {
    bool nuisance = true;
    bool network = true;
    bool latent = true;
    bool lambda = true;
};

struct RunOptions {
    ModelKind model = ModelKind::latent_space;
    SamplerBlocks blocks;
    std::function<void(long)> on_iteration;
};

struct AcceptanceStats {
    std::vector<long> network_accepted;  // per network, joint (alpha, beta) moves
    std::vector<long> latent_accepted;   // per node
    std::vector<long> lambda_accepted;   // per covariate
    long iterations = 0;
    long sweeps = 0;
    long procrustes_reverts = 0;
};

struct ChainOutput {
    std::vector<ModelState> draws;
    std::vector<long> iterations;
    std::vector<double> deviance;
    std::vector<std::uint8_t> reverted;
    AcceptanceStats acceptance;
    HyperConfig hyper;
    ModelKind model = ModelKind::latent_space;

    bool empty() const { return draws.empty(); }
    std::size_t size() const { return draws.size(); }
};

/// Fills every unset hyperparameter: tau defaults to (K-1)/K, m_alpha and m_beta to the
/// starting nuisance means, m_lambda to 0.
HyperConfig resolve_hyper(const HyperConfig& hyper, int networks, const ModelState& init);

/// Throws ConfigError if `init` does not fit the data or violates the model constraints.
void validate_start(const Multiplex& m, const CovariateSet& covariates, const HyperConfig& hyper,
                    const ModelState& init, ModelKind model = ModelKind::latent_space);

ChainOutput run_chain(const Multiplex& m, const CovariateSet& covariates, const HyperConfig& hyper,
                      const ModelState& init, const RunOptions& options = {});

}  // namespace lsmmn
