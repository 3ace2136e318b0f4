#pragma once

#include "lsmmn/procrustes.hpp"
#include "lsmmn/sampler.hpp"
#include "lsmmn/types.hpp"

#include <utility>
#include <vector>

namespace lsmmn {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

struct PosteriorSummary {
    std::size_t draws = 0;
    std::vector<MeanSd> alpha;
    std::vector<MeanSd> beta;
    std::vector<MeanSd> lambda;
    MeanSd mu_alpha;
    MeanSd sigma2_alpha;
    MeanSd mu_beta;
    MeanSd sigma2_beta;
    std::vector<MeanSd> mu_lambda;
    std::vector<MeanSd> sigma2_lambda;
    // Mean of the draws after rigidly aligning each one to the first draw.
    Coordinates z_mean;
    // Mean over draws of the squared latent distances.
    Matrix distance_mean;

    /// State assembled from the posterior means.
    ModelState mean_state() const;
};

/// Posterior means and standard deviations. Standard deviations use the n - 1 denominator and
/// are 0 for a single draw. Throws ConfigError for an empty chain.
PosteriorSummary summarize(const ChainOutput& chain);

struct DicParts {
    double dic = 0.0;
    double mean_deviance = 0.0;
    double deviance_at_mean = 0.0;
    double effective_parameters = 0.0;
};

/// DIC = D(theta_hat) + 2 (mean deviance - D(theta_hat)).
DicParts dic_from_parts(const std::vector<double>& deviance, double deviance_at_mean);

/// DIC with D(theta_hat) evaluated at the posterior means (aligned latent means).
DicParts dic_report(const ChainOutput& chain, const Multiplex& m, const CovariateSet& covariates);
double dic(const ChainOutput& chain, const Multiplex& m, const CovariateSet& covariates);

/// Share of off-diagonal ordered dyads on which the masked networks k and l agree.
double association(const Multiplex& m, int k, int l);

/// Indices of the r nearest other nodes of i, ties broken by ascending index.
std::vector<int> nearest_neighbors(const Coordinates& points, int i, int r);

struct NeighborOverlap {
    std::vector<int> per_node;
    // Sum of intersection sizes divided by r.
    double average_per_r = 0.0;
    // Sum of intersection sizes divided by n r.
    double average = 0.0;
    int maximum = 0;
};

NeighborOverlap neighbor_overlap(const Coordinates& latent, const Coordinates& external, int r);

struct BorderOverlap {
    // Ratio per node; NaN for nodes without borders.
    std::vector<double> per_node;
    std::vector<int> border_counts;
    // Mean of the ratios over nodes with at least one border.
    double average = 0.0;
    double mean_border_count = 0.0;
};

/// `borders` uses 1 for a shared border.
BorderOverlap border_overlap(const Coordinates& latent, const BinaryMatrix& borders);

/// Posterior mean edge probabilities of network k.
Matrix posterior_edge_probabilities(const ChainOutput& chain, const Multiplex& m, const CovariateSet& covariates,
                                    int k);

/// Equal-tailed interval holding `level` of the values, by linear interpolation of order statistics.
std::pair<double, double> credible_interval(std::vector<double> values, double level);

}  // namespace lsmmn
