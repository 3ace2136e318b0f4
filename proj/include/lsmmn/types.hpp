#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsmmn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Latent coordinates, one node per row. Row-major so a node's position is contiguous.
using Coordinates = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Input problems (bad shapes, out-of-domain arguments, malformed files) derive from
// ValidationError so the command line can map them to exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : ValidationError {
    using ValidationError::ValidationError;
};
struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};
struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};
struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};

/// K directed binary networks on a shared node set, with per-network presence masks.
/// y[k](i, j) = 1 when node i sends an edge to node j in network k; h[k](i, j) = 1 when
/// that dyad was eligible.
struct Multiplex {
    std::vector<std::string> labels;
    std::vector<std::string> network_names;
    std::vector<BinaryMatrix> y;
    std::vector<BinaryMatrix> h;

    int nodes() const { return static_cast<int>(labels.size()); }
    int networks() const { return static_cast<int>(y.size()); }

    /// Empty networks with every off-diagonal dyad eligible.
    static Multiplex full_presence(std::vector<std::string> labels, int networks);

    /// Throws ValidationError if any structural invariant is broken.
    void validate() const;

    /// Number of eligible ordered dyads with an edge in network k.
    long edge_count(int k) const;
    /// Number of eligible ordered dyads in network k.
    long dyad_count(int k) const;
    /// Observed edge density over eligible dyads of network k.
    double density(int k) const;
};

/// Edge-level covariates with negative-effect coding: larger values lower edge probability.
struct CovariateSet {
    std::vector<std::string> names;
    std::vector<Matrix> x;

    int count() const { return static_cast<int>(x.size()); }
    bool empty() const { return x.empty(); }
    void validate(int nodes) const;
    CovariateSet select(const std::vector<std::string>& wanted) const;
};

/// One point of the posterior.
struct ModelState {
    Coordinates z;
    Vector alpha;
    Vector beta;
    Vector lambda;
    double mu_alpha = 0.0;
    double sigma2_alpha = 1.0;
    double mu_beta = 0.0;
    double sigma2_beta = 1.0;
    Vector mu_lambda;
    Vector sigma2_lambda;

    int nodes() const { return static_cast<int>(z.rows()); }
    int dims() const { return static_cast<int>(z.cols()); }
    int networks() const { return static_cast<int>(alpha.size()); }
    int covariates() const { return static_cast<int>(lambda.size()); }
};

struct HyperConfig {
    int p = 2;
    int reference = 0;
    double alpha_ref = 0.0;

    double nu_alpha = 3.0;
    double nu_beta = 3.0;
    double nu_lambda = 3.0;
    // Unset scale hyperparameters resolve to (K - 1) / K (or 1 when K = 1).
    std::optional<double> tau_alpha;
    std::optional<double> tau_beta;
    std::optional<double> tau_lambda;
    // Unset prior locations resolve to the starting state's nuisance means (lambda: 0).
    std::optional<double> m_alpha;
    std::optional<double> m_beta;
    std::optional<double> m_lambda;

    double procrustes_threshold = 0.85;
    // Climb the log posterior from every network's geodesic start and keep the best one.
    // When false, the start is the plain scaling of one randomly chosen network.
    bool refine_start = true;
    std::uint64_t seed = 1;
    long iters = 1000;
    long burnin = 100;
    long thin = 1;

    double resolved_tau_alpha(int networks) const;
    double resolved_tau_beta(int networks) const;
    double resolved_tau_lambda(int networks) const;

    /// Throws ConfigError when chain controls or hyperparameters are out of range.
    void validate() const;
};

}  // namespace lsmmn
