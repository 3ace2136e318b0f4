#include "lsmmn/simulate.hpp"

#include "lsmmn/core.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/fisher_f_distribution.hpp>

#include <cmath>
#include <limits>
#include <numeric>

namespace lsmmn {

namespace {

constexpr double kAbsentShare = 14.0 / 49.0;
constexpr int kHotellingDof = 4;

Vector make_vector(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

std::vector<std::string> node_labels(int n) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i + 1));
    return labels;
}

}  // namespace

void ScenarioSpec::validate() const {
    if (n < 2) throw ConfigError("simulation needs at least two nodes");
    if (K < 2) throw ConfigError("simulation needs at least two networks");
    if (p < 1) throw ConfigError("latent dimension must be positive");
    if (kind == LatentKind::hotelling && p >= kHotellingDof + 1)
        throw ConfigError("hotelling latents need fewer than 5 dimensions");
    if (alpha && alpha->size() != K) throw ConfigError("alpha override has the wrong length");
    if (beta && beta->size() != K) throw ConfigError("beta override has the wrong length");
    if (beta && ((beta->array() < 0.0).any())) throw ConfigError("beta override must be non-negative");
    if (z && (z->rows() != n || z->cols() != p)) throw ConfigError("latent override has the wrong shape");
    covariates.validate(n);
    if (lambda.size() != covariates.count()) throw ConfigError("covariate effects do not match the covariates");
    if ((lambda.array() < 0.0).any()) throw ConfigError("covariate effects must be non-negative");
}

int mixture_components(int n) { return std::max(1, static_cast<int>(std::lround(n / 7.0))); }

LatentKind scenario_kind(int scenario) {
    switch (scenario) {
        case 1: return LatentKind::gaussian;
        case 2: return LatentKind::mixture;
        case 3: return LatentKind::hotelling;
        case 4: return LatentKind::large_K_gaussian;
        default: throw ConfigError("scenario must be 1, 2, 3 or 4");
    }
}

std::optional<std::pair<Vector, Vector>> standard_design(int n, int K) {
    if (n == 25 && K == 3) return std::pair{make_vector({0, -0.22, 0.69}), make_vector({1, 0.91, 0.22})};
    if (n == 50 && K == 3) return std::pair{make_vector({0, 0.51, -0.83}), make_vector({1, 0.68, 0.12})};
    if (n == 100 && K == 3) return std::pair{make_vector({0, 0.21, -0.74}), make_vector({1, 0.70, 1.09})};
    if (n == 50 && K == 5)
        return std::pair{make_vector({0, 1.10, 0.23, 0.47, -0.52}), make_vector({1, 1.36, 0.45, 0.07, 0.95})};
    return std::nullopt;
}

ScenarioSpec make_scenario(int scenario, int n, int K, Presence presence, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.kind = scenario_kind(scenario);
    spec.n = n;
    spec.K = K;
    spec.presence = presence;
    spec.seed = seed;
    if (spec.kind != LatentKind::large_K_gaussian)
        if (auto design = standard_design(n, K)) {
            spec.alpha = design->first;
            spec.beta = design->second;
        }
    return spec;
}

Coordinates draw_latents(const ScenarioSpec& spec, Rng& rng) {
    if (spec.z) return *spec.z;
    const int n = spec.n;
    const int p = spec.p;
    Coordinates z(n, p);
    switch (spec.kind) {
        case LatentKind::gaussian:
        case LatentKind::large_K_gaussian:
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < p; ++l) z(i, l) = sample_normal(0.0, 1.0, rng);
            break;
        case LatentKind::mixture: {
            const int groups = mixture_components(n);
            Matrix means(groups, p);
            Matrix sds(groups, p);
            for (int g = 0; g < groups; ++g)
                for (int l = 0; l < p; ++l) means(g, l) = sample_normal(0.0, 1.0, rng);
            for (int g = 0; g < groups; ++g)
                for (int l = 0; l < p; ++l) sds(g, l) = std::sqrt(0.1 + 0.9 * sample_uniform(rng));
            std::uniform_int_distribution<int> pick(0, groups - 1);
            for (int i = 0; i < n; ++i) {
                const int g = pick(rng);
                for (int l = 0; l < p; ++l) z(i, l) = sample_normal(means(g, l), sds(g, l), rng);
            }
            break;
        }
        case LatentKind::hotelling: {
            const int m = kHotellingDof;
            const double scale = static_cast<double>(m * p) / static_cast<double>(m - p + 1);
            boost::random::fisher_f_distribution<double> fdist(p, m - p + 1);
            for (int i = 0; i < n; ++i) {
                Vector u(p);
                double norm = 0.0;
                do {
                    for (int l = 0; l < p; ++l) u[l] = sample_normal(0.0, 1.0, rng);
                    norm = u.norm();
                } while (!(norm > 0.0));
                const double radius = std::sqrt(scale * fdist(rng));
                z.row(i) = (u / norm * radius).transpose();
            }
            break;
        }
    }
    return z;
}

std::pair<Vector, Vector> draw_network_params(const ScenarioSpec& spec, Rng& rng) {
    const int K = spec.K;
    const double lb = lb_alpha(spec.n);
    const double inf = std::numeric_limits<double>::infinity();
    Vector alpha(K);
    Vector beta(K);
    for (int k = 0; k < K; ++k) {
        if (k == 0) {
            alpha[k] = 0.0;
            beta[k] = 1.0;
            continue;
        }
        alpha[k] = sample_truncated_normal(0.0, 1.0, lb, inf, rng);
        beta[k] = sample_truncated_normal(0.0, 1.0, 0.0, inf, rng);
    }
    if (spec.alpha) alpha = *spec.alpha;
    if (spec.beta) beta = *spec.beta;
    return {alpha, beta};
}

std::pair<std::vector<BinaryMatrix>, Vector> draw_presence(const ScenarioSpec& spec, Rng& rng) {
    const int n = spec.n;
    BinaryMatrix full = BinaryMatrix::Ones(n, n);
    full.diagonal().setZero();
    std::vector<BinaryMatrix> h(static_cast<std::size_t>(spec.K), full);
    if (spec.presence == Presence::full) return {std::move(h), Vector()};

    Vector weights(n);
    for (int i = 0; i < n; ++i) weights[i] = 0.5 + 0.5 * sample_uniform(rng);
    boost::random::binomial_distribution<int> count_dist(n, kAbsentShare);
    for (int k = 0; k < spec.K; ++k) {
        // Keep at least two nodes so every network still has eligible dyads.
        const int absent = std::min(count_dist(rng), n - 2);
        std::vector<double> pull(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pull[static_cast<std::size_t>(i)] = 1.0 - weights[i];
        for (int a = 0; a < absent; ++a) {
            const double total = std::accumulate(pull.begin(), pull.end(), 0.0);
            double target = sample_uniform(rng) * total;
            int chosen = -1;
            for (int i = 0; i < n; ++i) {
                const double w = pull[static_cast<std::size_t>(i)];
                if (w <= 0.0) continue;
                chosen = i;
                if (target < w) break;
                target -= w;
            }
            pull[static_cast<std::size_t>(chosen)] = 0.0;
            h[static_cast<std::size_t>(k)].row(chosen).setZero();
            h[static_cast<std::size_t>(k)].col(chosen).setZero();
        }
    }
    return {std::move(h), std::move(weights)};
}

GroundTruth generate(const ScenarioSpec& spec, Rng& rng) {
    spec.validate();
    GroundTruth truth;
    truth.z = draw_latents(spec, rng);
    std::tie(truth.alpha, truth.beta) = draw_network_params(spec, rng);
    truth.lambda = spec.lambda;

    auto [h, weights] = draw_presence(spec, rng);
    truth.inclusion_weights = std::move(weights);

    const int n = spec.n;
    Multiplex& m = truth.multiplex;
    m.labels = node_labels(n);
    for (int k = 0; k < spec.K; ++k) m.network_names.push_back("net" + std::to_string(k + 1));
    m.h = std::move(h);
    m.y.assign(static_cast<std::size_t>(spec.K), BinaryMatrix::Zero(n, n));

    const DistanceMatrix d = distance_matrix(truth.z);
    const Matrix cov = covariate_term(spec.covariates, spec.lambda, n);
    for (int k = 0; k < spec.K; ++k) {
        auto& y = m.y[static_cast<std::size_t>(k)];
        const auto& hk = m.h[static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j || hk(i, j) == 0) continue;
                const double prob = edge_probability(truth.alpha[k], truth.beta[k], d(i, j), cov(i, j));
                y(i, j) = sample_uniform(rng) < prob ? 1 : 0;
            }
    }
    m.validate();
    return truth;
}

GroundTruth generate(const ScenarioSpec& spec) {
    Rng rng(spec.seed);
    return generate(spec, rng);
}

std::string to_string(LatentKind kind) {
    switch (kind) {
        case LatentKind::gaussian: return "gaussian";
        case LatentKind::mixture: return "mixture";
        case LatentKind::hotelling: return "hotelling";
        case LatentKind::large_K_gaussian: return "large_K_gaussian";
    }
    return "unknown";
}

std::string to_string(Presence presence) { return presence == Presence::full ? "full" : "eurovision_like"; }

}  // namespace lsmmn
