#include "lsmmn/init.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <queue>

namespace lsmmn {

namespace {

constexpr double kClampGap = 1e-6;
constexpr double kVarianceFloor = 0.01;

struct LogitFit {
    double intercept = 0.0;
    double slope = 0.0;
    bool converged = false;
};

// Newton-Raphson (IRLS) for y ~ logistic(a + b d) over eligible dyads of network k.
LogitFit fit_logit(const Multiplex& m, int k, const DistanceMatrix& d) {
    const int n = m.nodes();
    const auto& y = m.y[k];
    const auto& h = m.h[k];
    LogitFit fit;
    const long edges = m.edge_count(k);
    const long dyads = m.dyad_count(k);
    if (edges == 0 || edges == dyads) return fit;

    double a = std::log(static_cast<double>(edges) / static_cast<double>(dyads - edges));
    double b = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (i == j || h(i, j) == 0) continue;
                const double x = d(i, j);
                const double p = logistic(a + b * x);
                const double w = p * (1.0 - p);
                const double r = y(i, j) - p;
                g0 += r;
                g1 += r * x;
                h00 += w;
                h01 += w * x;
                h11 += w * x * x;
            }
        const double det = h00 * h11 - h01 * h01;
        if (!(det > 1e-12 * std::max(1.0, h00 * h11))) return fit;
        const double da = (h11 * g0 - h01 * g1) / det;
        const double db = (h00 * g1 - h01 * g0) / det;
        a += da;
        b += db;
        if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a) > 1e3 || std::abs(b) > 1e3) return fit;
        if (std::abs(da) < 1e-10 * (1.0 + std::abs(a)) && std::abs(db) < 1e-10 * (1.0 + std::abs(b))) {
            fit.intercept = a;
            fit.slope = b;
            fit.converged = true;
            return fit;
        }
    }
    return fit;
}

double density_intercept(const Multiplex& m, int k) {
    const long dyads = m.dyad_count(k);
    if (dyads == 0) return reference_intercept(0.5);
    const double half = 0.5 / static_cast<double>(dyads);
    return reference_intercept(std::clamp(m.density(k), half, 1.0 - half));
}

double sample_mean(const Vector& v) { return v.mean(); }

double sample_variance(const Vector& v) {
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

DistanceMatrix geodesic_distances(const Multiplex& m, int k, std::vector<std::string>* warnings) {
    const int n = m.nodes();
    if (k < 0 || k >= m.networks()) throw DimensionError("network index out of range");
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    const auto& y = m.y[k];
    bool any_edge = false;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (y(i, j) || y(j, i)) {
                adj[static_cast<std::size_t>(i)].push_back(j);
                adj[static_cast<std::size_t>(j)].push_back(i);
                any_edge = true;
            }
    if (!any_edge) {
        const std::string msg = "network " + std::to_string(k) + " has no edges; geodesic distances are all 1";
        if (warnings)
            warnings->push_back(msg);
        else
            std::cerr << "warning: " << msg << '\n';
    }

    Matrix hops = Matrix::Constant(n, n, -1.0);
    double longest = 0.0;
    std::vector<int> dist(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<int> queue;
        dist[static_cast<std::size_t>(s)] = 0;
        queue.push(s);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop();
            for (int v : adj[static_cast<std::size_t>(u)])
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue.push(v);
                }
        }
        for (int t = 0; t < n; ++t) {
            hops(s, t) = dist[static_cast<std::size_t>(t)];
            longest = std::max(longest, hops(s, t));
        }
    }
    const double unreachable = longest + 1.0;
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            if (hops(s, t) < 0.0) hops(s, t) = unreachable;
    return DistanceMatrix(std::move(hops));
}

Coordinates classical_mds(const DistanceMatrix& squared, int p) {
    const int n = squared.size();
    if (p < 1 || p > n) throw DimensionError("embedding dimension must be between 1 and the node count");
    const Matrix& d = squared.values();
    Matrix b = -0.5 * d;
    const Vector row_means = b.rowwise().mean();
    const Vector col_means = b.colwise().mean().transpose();
    const double grand = b.mean();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) += grand - row_means[i] - col_means[j];
    b = 0.5 * (b + b.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
    if (eig.info() != Eigen::Success) throw DomainError("eigen decomposition failed in classical scaling");
    Coordinates z = Coordinates::Zero(n, p);
    // Eigenvalues come back ascending.
    for (int l = 0; l < p; ++l) {
        const int idx = n - 1 - l;
        const double lambda = eig.eigenvalues()[idx];
        if (!(lambda > 0.0)) continue;
        z.col(l) = eig.eigenvectors().col(idx) * std::sqrt(lambda);
    }
    return z;
}

StartValues logistic_starts(const Multiplex& m, const DistanceMatrix& d0, const HyperConfig& hyper,
                            InitReport& report) {
    const int K = m.networks();
    if (d0.size() != m.nodes()) throw DimensionError("starting distances do not match the node count");
    const double lb = lb_alpha(m.nodes());
    StartValues out{Vector(K), Vector(K)};
    for (int k = 0; k < K; ++k) {
        if (k == hyper.reference) {
            out.alpha[k] = hyper.alpha_ref;
            out.beta[k] = 1.0;
            continue;
        }
        const LogitFit fit = fit_logit(m, k, d0);
        if (fit.converged) {
            out.alpha[k] = fit.intercept;
            out.beta[k] = -fit.slope;
        } else {
            out.alpha[k] = density_intercept(m, k);
            out.beta[k] = 1.0;
            report.separated.push_back(k);
        }
        if (!(out.alpha[k] > lb)) {
            out.alpha[k] = lb + kClampGap;
            report.clamped_alphas.push_back(k);
        }
        if (out.beta[k] < 0.0) {
            out.beta[k] = 0.0;
            report.clamped_betas.push_back(k);
        }
    }
    return out;
}

double refine_start(const Multiplex& m, const CovariateSet& covariates, const HyperConfig& hyper,
                    ModelState& state, int max_steps) {
    const int n = m.nodes();
    const int K = m.networks();
    const int p = static_cast<int>(state.z.cols());
    const double lb = lb_alpha(n);
    const Matrix cov = covariate_term(covariates, state.lambda, n);
    auto objective = [&](const ModelState& s) {
        return log_likelihood(m, s, distance_matrix(s.z), cov) + log_prior_latent(s.z);
    };

    double f = objective(state);
    double step = 1e-3;
    Coordinates gz(n, p);
    Vector ga(K), gb(K);
    for (int iter = 0; iter < max_steps; ++iter) {
        gz = -state.z;
        ga.setZero();
        gb.setZero();
        const DistanceMatrix d = distance_matrix(state.z);
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (i == j || m.h[k](i, j) == 0) continue;
                    const double r = m.y[k](i, j) - edge_probability(state.alpha[k], state.beta[k], d(i, j), cov(i, j));
                    ga[k] += r;
                    gb[k] -= r * d(i, j);
                    const auto diff = (state.z.row(i) - state.z.row(j)).eval();
                    gz.row(i) -= 2.0 * state.beta[k] * r * diff;
                    gz.row(j) += 2.0 * state.beta[k] * r * diff;
                }
        ga[hyper.reference] = 0.0;
        gb[hyper.reference] = 0.0;

        // Backtracking on the projected step; grow the step after each success.
        bool moved = false;
        while (step > 1e-14) {
            ModelState trial = state;
            trial.z += step * gz;
            trial.alpha += step * ga;
            trial.beta += step * gb;
            for (int k = 0; k < K; ++k) {
                trial.alpha[k] = std::max(trial.alpha[k], lb + kClampGap);
                trial.beta[k] = std::max(trial.beta[k], 0.0);
            }
            const double ft = objective(trial);
            if (ft >= f) {
                const bool done = ft - f <= 1e-10 * std::abs(f);
                state = std::move(trial);
                f = ft;
                step *= 1.5;
                moved = !done;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return f;
}

namespace {

// Scaled geodesics of network k plus per-network logistic starts.
ModelState geodesic_start(const Multiplex& m, const HyperConfig& hyper, int k, InitReport& report) {
    const DistanceMatrix geo = geodesic_distances(m, k, &report.warnings);
    report.chosen_network = k;
    report.geodesic_diameter = geo.values().maxCoeff();
    const Matrix squared = geo.values().array().square().matrix();

    ModelState state;
    state.z = classical_mds(DistanceMatrix(squared), hyper.p);
    StartValues starts = logistic_starts(m, distance_matrix(state.z), hyper, report);
    state.alpha = std::move(starts.alpha);
    state.beta = std::move(starts.beta);
    return state;
}

}  // namespace

std::pair<ModelState, InitReport> initialize(const Multiplex& m, const CovariateSet& covariates,
                                             const HyperConfig& hyper, Rng& rng, std::optional<int> source) {
    m.validate();
    covariates.validate(m.nodes());
    hyper.validate();
    const int n = m.nodes();
    const int K = m.networks();
    if (hyper.reference < 0 || hyper.reference >= K) throw ConfigError("reference network index out of range");
    if (hyper.p > n) throw ConfigError("latent dimension exceeds the node count");
    if (!(hyper.alpha_ref > lb_alpha(n))) throw ConfigError("reference intercept must exceed the intercept lower bound");

    int picked = 0;
    if (source) {
        if (*source < 0 || *source >= K) throw ConfigError("geodesic source network out of range");
        picked = *source;
    } else {
        std::uniform_int_distribution<int> pick(0, K - 1);
        picked = pick(rng);
    }

    const int F = covariates.count();
    const Vector lambda0 = Vector::Constant(F, 0.01);

    ModelState state;
    InitReport report;
    if (!hyper.refine_start) {
        state = geodesic_start(m, hyper, picked, report);
        state.lambda = lambda0;
    } else {
        std::vector<int> candidates{picked};
        if (!source)
            for (int k = 0; k < K; ++k)
                if (k != picked) candidates.push_back(k);
        std::vector<double> objectives(static_cast<std::size_t>(K), -std::numeric_limits<double>::infinity());
        double best = -std::numeric_limits<double>::infinity();
        for (int k : candidates) {
            InitReport r;
            ModelState s = geodesic_start(m, hyper, k, r);
            s.lambda = lambda0;
            const double f = refine_start(m, covariates, hyper, s);
            objectives[static_cast<std::size_t>(k)] = f;
            if (f > best) {
                best = f;
                state = std::move(s);
                report = std::move(r);
            }
        }
        report.candidate_objectives = std::move(objectives);
    }

    state.mu_alpha = sample_mean(state.alpha);
    state.mu_beta = sample_mean(state.beta);
    if (K == 1) {
        state.sigma2_alpha = 1.0;
        state.sigma2_beta = 1.0;
        report.variance_defaulted = true;
    } else {
        state.sigma2_alpha = std::max(kVarianceFloor, sample_variance(state.alpha));
        state.sigma2_beta = std::max(kVarianceFloor, sample_variance(state.beta));
    }

    state.mu_lambda = state.lambda;
    state.sigma2_lambda = Vector::Ones(F);
    return {std::move(state), std::move(report)};
}

ModelState initialize_random_graph(const Multiplex& m, const CovariateSet& covariates, const HyperConfig& hyper) {
    m.validate();
    covariates.validate(m.nodes());
    const int K = m.networks();
    const double lb = lb_alpha(m.nodes());
    ModelState state;
    state.z = Coordinates::Zero(m.nodes(), hyper.p);
    state.alpha.resize(K);
    for (int k = 0; k < K; ++k) state.alpha[k] = std::max(density_intercept(m, k) - 2.0, lb + kClampGap);
    state.beta = Vector::Zero(K);
    state.mu_alpha = sample_mean(state.alpha);
    state.sigma2_alpha = K == 1 ? 1.0 : std::max(kVarianceFloor, sample_variance(state.alpha));
    state.mu_beta = 0.0;
    state.sigma2_beta = 1.0;
    const int F = covariates.count();
    state.lambda = Vector::Constant(F, 0.01);
    state.mu_lambda = state.lambda;
    state.sigma2_lambda = Vector::Ones(F);
    return state;
}

}  // namespace lsmmn
