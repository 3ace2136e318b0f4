#pragma once

#include "lsmmn/types.hpp"

#include <span>

namespace lsmmn {

/// Symmetric matrix of squared Euclidean distances between latent positions.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(Matrix values);

    double operator()(int i, int j) const { return values_(i, j); }
    int size() const { return static_cast<int>(values_.rows()); }
    const Matrix& values() const { return values_; }

    /// Refreshes row and column i after node i moved.
    void update_node(const Coordinates& z, int i);

private:
    Matrix values_;
};

double squared_distance(std::span<const double> zi, std::span<const double> zj);

DistanceMatrix distance_matrix(const Coordinates& z);

/// 1 / (1 + exp(-x)) without overflow for large |x|.
double logistic(double x);

/// log(1 + exp(x)) without overflow for large |x|.
double log1p_exp(double x);

/// Edge probability logistic(alpha - beta * d - cov_term).
double edge_probability(double alpha, double beta, double d, double cov_term);

/// Sum over f of lambda_f * X_f. Returns an n x n zero matrix when there are no covariates.
Matrix covariate_term(const CovariateSet& covariates, const Vector& lambda, int nodes);

/// Masked log-likelihood of a single network.
double log_likelihood_network(const Multiplex& m, int k, double alpha, double beta,
                              const DistanceMatrix& d, const Matrix& cov_term);

/// Masked log-likelihood summed over all ordered dyads of all networks.
double log_likelihood(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                      const CovariateSet& covariates);
double log_likelihood(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                      const Matrix& cov_term);

/// Independent standard normal prior on every latent coordinate, normalising constant included.
double log_prior_latent(const Coordinates& z);

/// Log posterior up to a constant fixed by the hyperparameters. Returns -infinity for states
/// outside the prior support.
double log_posterior(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                     const CovariateSet& covariates, const HyperConfig& hyper);

/// Prior-support check used by log_posterior and the samplers.
bool in_support(const ModelState& state, int reference, double lower_alpha);

/// Lower bound on network intercepts that keeps the implied random graph connected.
double lb_alpha(int nodes);

/// Intercept for the reference network matched to an observed density: logit(density) + 2.
double reference_intercept(double density);

}  // namespace lsmmn
