#pragma once

#include "lsmmn/core.hpp"
#include "lsmmn/random.hpp"
#include "lsmmn/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lsmmn {

struct InitReport {
    int chosen_network = 0;
    double geodesic_diameter = 0.0;
    std::vector<int> clamped_alphas;
    std::vector<int> clamped_betas;
    // Networks whose logistic fit did not converge (separation) and fell back to the density rule.
    std::vector<int> separated;
    bool variance_defaulted = false;
    // Log posterior of the refined start per candidate source network (empty when not refined).
    std::vector<double> candidate_objectives;
    std::vector<std::string> warnings;
};

/// Hop counts on the symmetrised graph of network k. Pairs in different components get the
/// largest finite distance plus one. A network without edges yields all ones off the diagonal
/// and a warning (appended to `warnings` when given, otherwise printed to stderr).
DistanceMatrix geodesic_distances(const Multiplex& m, int k, std::vector<std::string>* warnings = nullptr);

/// Classical (Torgerson) scaling of a squared-distance matrix into p dimensions. Directions
/// with non-positive eigenvalues get zero coordinates.
Coordinates classical_mds(const DistanceMatrix& squared, int p);

struct StartValues {
    Vector alpha;
    Vector beta;
};

/// Per-network logistic regression of edges on starting distances. The reference network is
/// pinned to (hyper.alpha_ref, 1); other estimates are clamped into the prior support.
StartValues logistic_starts(const Multiplex& m, const DistanceMatrix& d0, const HyperConfig& hyper,
                            InitReport& report);

/// Projected gradient ascent of log likelihood plus latent prior over z and the free
/// intercepts and slopes; the reference network and covariate effects stay fixed. Returns the
/// final objective.
double refine_start(const Multiplex& m, const CovariateSet& covariates, const HyperConfig& hyper,
                    ModelState& state, int max_steps = 5000);

/// Full starting state. With hyper.refine_start every network (or only `source`) seeds a
/// refined candidate and the highest posterior wins. Otherwise the geodesic source network is
/// drawn from `rng` unless `source` is given.
std::pair<ModelState, InitReport> initialize(const Multiplex& m, const CovariateSet& covariates,
                                             const HyperConfig& hyper, Rng& rng,
                                             std::optional<int> source = std::nullopt);

/// Starting state for the random-graph model: beta = 0, intercepts from observed densities,
/// latent coordinates at the origin (they never enter the likelihood).
ModelState initialize_random_graph(const Multiplex& m, const CovariateSet& covariates, const HyperConfig& hyper);

}  // namespace lsmmn
