#pragma once

#include "lsmmn/random.hpp"
#include "lsmmn/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace lsmmn {

enum class LatentKind { gaussian, mixture, hotelling, large_K_gaussian };
enum class Presence { full, eurovision_like };

struct ScenarioSpec {
    LatentKind kind = LatentKind::gaussian;
    int n = 50;
    int K = 3;
    int p = 2;
    Presence presence = Presence::full;
    std::optional<Vector> alpha;
    std::optional<Vector> beta;
    std::optional<Coordinates> z;
    // Optional covariates entering the linear predictor with effects `lambda`.
    CovariateSet covariates;
    Vector lambda;
    std::uint64_t seed = 1;

    void validate() const;
};

struct GroundTruth {
    Coordinates z;
    Vector alpha;
    Vector beta;
    Vector lambda;
    Multiplex multiplex;
    // Per-node inclusion weights used for absences (empty under full presence).
    Vector inclusion_weights;
};

/// Number of mixture components for n nodes: round(n / 7), at least 1.
int mixture_components(int n);

/// Maps scenario numbers 1..4 to latent kinds.
LatentKind scenario_kind(int scenario);

/// Fixed (alpha, beta) used by the standard recovery designs, when (n, K) is one of them.
std::optional<std::pair<Vector, Vector>> standard_design(int n, int K);

/// Spec for scenario 1..4 with the standard design values filled in where they exist.
ScenarioSpec make_scenario(int scenario, int n, int K, Presence presence, std::uint64_t seed);

Coordinates draw_latents(const ScenarioSpec& spec, Rng& rng);

/// Reference entries are (0, 1). Other intercepts come from N(0, 1) truncated at the intercept
/// lower bound and other coefficients from N(0, 1) truncated at 0, unless overridden.
std::pair<Vector, Vector> draw_network_params(const ScenarioSpec& spec, Rng& rng);

/// Presence masks: all ones under full presence, otherwise whole nodes dropped per network.
std::pair<std::vector<BinaryMatrix>, Vector> draw_presence(const ScenarioSpec& spec, Rng& rng);

GroundTruth generate(const ScenarioSpec& spec, Rng& rng);
/// Seeds a fresh generator from spec.seed.
GroundTruth generate(const ScenarioSpec& spec);

std::string to_string(LatentKind kind);
std::string to_string(Presence presence);

}  // namespace lsmmn
