#include "lsmmn/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace lsmmn {

Multiplex Multiplex::full_presence(std::vector<std::string> labels, int networks) {
    Multiplex m;
    const auto n = static_cast<Eigen::Index>(labels.size());
    m.labels = std::move(labels);
    for (int k = 0; k < networks; ++k) {
        m.network_names.push_back(std::to_string(k));
        m.y.push_back(BinaryMatrix::Zero(n, n));
        BinaryMatrix h = BinaryMatrix::Ones(n, n);
        h.diagonal().setZero();
        m.h.push_back(std::move(h));
    }
    return m;
}

void Multiplex::validate() const {
    const int n = nodes();
    const int K = networks();
    if (K < 1) throw ValidationError("multiplex needs at least one network");
    if (n < 2) throw ValidationError("multiplex needs at least two nodes");
    if (static_cast<int>(h.size()) != K) throw DimensionError("presence mask count differs from network count");
    if (!network_names.empty() && static_cast<int>(network_names.size()) != K)
        throw DimensionError("network name count differs from network count");

    std::ostringstream bad;
    int offending = 0;
    for (int k = 0; k < K; ++k) {
        if (y[k].rows() != n || y[k].cols() != n || h[k].rows() != n || h[k].cols() != n)
            throw DimensionError("network " + std::to_string(k) + " is not " + std::to_string(n) + "x" +
                                 std::to_string(n));
        for (int i = 0; i < n; ++i) {
            if (y[k](i, i) != 0 || h[k](i, i) != 0)
                throw ValidationError("non-zero diagonal in network " + std::to_string(k));
            for (int j = 0; j < n; ++j) {
                if (y[k](i, j) > 1 || h[k](i, j) > 1)
                    throw ValidationError("non-binary entry in network " + std::to_string(k));
                if (y[k](i, j) == 1 && h[k](i, j) == 0) {
                    if (offending < 20) bad << " (" << k << ", " << labels[i] << ", " << labels[j] << ")";
                    ++offending;
                }
            }
        }
    }
    if (offending > 0)
        throw ValidationError("edges on ineligible dyads (" + std::to_string(offending) + "):" + bad.str());
}

long Multiplex::edge_count(int k) const {
    long e = 0;
    for (Eigen::Index j = 0; j < y[k].cols(); ++j)
        for (Eigen::Index i = 0; i < y[k].rows(); ++i) e += y[k](i, j) & h[k](i, j);
    return e;
}

long Multiplex::dyad_count(int k) const {
    long c = 0;
    for (Eigen::Index j = 0; j < h[k].cols(); ++j)
        for (Eigen::Index i = 0; i < h[k].rows(); ++i) c += (i != j) ? h[k](i, j) : 0;
    return c;
}

double Multiplex::density(int k) const {
    const long c = dyad_count(k);
    return c == 0 ? 0.0 : static_cast<double>(edge_count(k)) / static_cast<double>(c);
}

void CovariateSet::validate(int nodes) const {
    if (names.size() != x.size()) throw DimensionError("covariate name count differs from matrix count");
    for (std::size_t f = 0; f < x.size(); ++f) {
        if (x[f].rows() != nodes || x[f].cols() != nodes)
            throw DimensionError("covariate '" + names[f] + "' is not " + std::to_string(nodes) + "x" +
                                 std::to_string(nodes));
        for (int i = 0; i < nodes; ++i)
            for (int j = 0; j < nodes; ++j) {
                if (i == j) continue;
                const double v = x[f](i, j);
                if (!std::isfinite(v) || v < 0.0)
                    throw ValidationError("covariate '" + names[f] + "' has a negative or non-finite entry");
            }
    }
}

CovariateSet CovariateSet::select(const std::vector<std::string>& wanted) const {
    CovariateSet out;
    for (const auto& w : wanted) {
        bool found = false;
        for (std::size_t f = 0; f < names.size(); ++f)
            if (names[f] == w) {
                out.names.push_back(names[f]);
                out.x.push_back(x[f]);
                found = true;
                break;
            }
        if (!found) throw ConfigError("unknown covariate '" + w + "'");
    }
    return out;
}

namespace {
double default_tau(int networks) {
    return networks > 1 ? static_cast<double>(networks - 1) / networks : 1.0;
}
}  // namespace

double HyperConfig::resolved_tau_alpha(int networks) const { return tau_alpha.value_or(default_tau(networks)); }
double HyperConfig::resolved_tau_beta(int networks) const { return tau_beta.value_or(default_tau(networks)); }
double HyperConfig::resolved_tau_lambda(int networks) const { return tau_lambda.value_or(default_tau(networks)); }

void HyperConfig::validate() const {
    if (p < 1) throw ConfigError("latent dimension must be at least 1");
    if (reference < 0) throw ConfigError("reference network index must be non-negative");
    if (!(procrustes_threshold >= 0.0 && procrustes_threshold <= 1.0))
        throw ConfigError("procrustes threshold must lie in [0, 1]");
    if (burnin < 0) throw ConfigError("burn-in must be non-negative");
    if (iters < burnin) throw ConfigError("iterations must not be fewer than burn-in");
    if (thin < 1) throw ConfigError("thinning interval must be at least 1");
    for (double v : {nu_alpha, nu_beta, nu_lambda})
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("degrees of freedom must be positive");
    for (const auto& t : {tau_alpha, tau_beta, tau_lambda})
        if (t && (!(*t > 0.0) || !std::isfinite(*t))) throw ConfigError("tau hyperparameters must be positive");
    if (!std::isfinite(alpha_ref)) throw ConfigError("reference intercept must be finite");
}

DistanceMatrix::DistanceMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) throw DimensionError("distance matrix must be square");
}

void DistanceMatrix::update_node(const Coordinates& z, int i) {
    const int n = size();
    const auto p = z.cols();
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index l = 0; l < p; ++l) {
            const double diff = z(i, l) - z(j, l);
            s += diff * diff;
        }
        values_(i, j) = s;
        values_(j, i) = s;
    }
    values_(i, i) = 0.0;
}

double squared_distance(std::span<const double> zi, std::span<const double> zj) {
    if (zi.size() != zj.size()) throw DimensionError("latent vectors differ in length");
    double s = 0.0;
    for (std::size_t l = 0; l < zi.size(); ++l) {
        const double diff = zi[l] - zj[l];
        s += diff * diff;
    }
    return s;
}

DistanceMatrix distance_matrix(const Coordinates& z) {
    const auto n = z.rows();
    const auto p = static_cast<std::size_t>(z.cols());
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = squared_distance({z.row(i).data(), p}, {z.row(j).data(), p});
            d(i, j) = v;
            d(j, i) = v;
        }
    return DistanceMatrix(std::move(d));
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double edge_probability(double alpha, double beta, double d, double cov_term) {
    return logistic(alpha - beta * d - cov_term);
}

Matrix covariate_term(const CovariateSet& covariates, const Vector& lambda, int nodes) {
    if (lambda.size() != covariates.count()) throw DimensionError("lambda length differs from covariate count");
    Matrix c = Matrix::Zero(nodes, nodes);
    for (int f = 0; f < covariates.count(); ++f) {
        if (covariates.x[f].rows() != nodes || covariates.x[f].cols() != nodes)
            throw DimensionError("covariate matrix has the wrong size");
        c.noalias() += lambda[f] * covariates.x[f];
    }
    return c;
}

double log_likelihood_network(const Multiplex& m, int k, double alpha, double beta, const DistanceMatrix& d,
                              const Matrix& cov_term) {
    const int n = m.nodes();
    const auto& y = m.y[k];
    const auto& h = m.h[k];
    double ll = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i == j || h(i, j) == 0) continue;
            const double eta = alpha - beta * d(i, j) - cov_term(i, j);
            ll += (y(i, j) ? eta : 0.0) - log1p_exp(eta);
        }
    return ll;
}

double log_likelihood(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                      const Matrix& cov_term) {
    const int n = m.nodes();
    if (d.size() != n || state.nodes() != n || cov_term.rows() != n || cov_term.cols() != n)
        throw DimensionError("node count mismatch between multiplex, state and distances");
    if (state.networks() != m.networks() || state.beta.size() != m.networks())
        throw DimensionError("network count mismatch between multiplex and state");
    double ll = 0.0;
    for (int k = 0; k < m.networks(); ++k)
        ll += log_likelihood_network(m, k, state.alpha[k], state.beta[k], d, cov_term);
    return ll;
}

double log_likelihood(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                      const CovariateSet& covariates) {
    if (state.covariates() != covariates.count())
        throw DimensionError("lambda length differs from covariate count");
    return log_likelihood(m, state, d, covariate_term(covariates, state.lambda, m.nodes()));
}

double log_prior_latent(const Coordinates& z) {
    const double count = static_cast<double>(z.size());
    return -0.5 * z.squaredNorm() - 0.5 * count * std::log(2.0 * std::numbers::pi);
}

bool in_support(const ModelState& state, int reference, double lower_alpha) {
    for (Eigen::Index k = 0; k < state.alpha.size(); ++k) {
        if (k == reference) continue;
        if (!(state.alpha[k] > lower_alpha) || !(state.beta[k] >= 0.0)) return false;
    }
    if (!(state.sigma2_alpha > 0.0) || !(state.sigma2_beta > 0.0)) return false;
    if (!(state.mu_alpha > lower_alpha) || !(state.mu_beta >= 0.0)) return false;
    for (Eigen::Index f = 0; f < state.lambda.size(); ++f) {
        if (!(state.lambda[f] >= 0.0) || !(state.mu_lambda[f] >= 0.0) || !(state.sigma2_lambda[f] > 0.0))
            return false;
    }
    return true;
}

double log_posterior(const Multiplex& m, const ModelState& state, const DistanceMatrix& d,
                     const CovariateSet& covariates, const HyperConfig& hyper) {
    const int K = m.networks();
    if (!in_support(state, hyper.reference, lb_alpha(m.nodes())))
        return -std::numeric_limits<double>::infinity();

    const double tau_a = hyper.resolved_tau_alpha(K);
    const double tau_b = hyper.resolved_tau_beta(K);
    const double tau_l = hyper.resolved_tau_lambda(K);
    const double m_a = hyper.m_alpha.value_or(0.0);
    const double m_b = hyper.m_beta.value_or(0.0);
    const double m_l = hyper.m_lambda.value_or(0.0);

    double lp = log_likelihood(m, state, d, covariates) + log_prior_latent(state.z);

    // Truncated-normal priors on network parameters (normalisers omitted), then the
    // hierarchical nuisance layer: mu | sigma2 ~ N(m, tau sigma2), sigma2 ~ Inv-chi2(nu).
    const double s2a = state.sigma2_alpha;
    const double s2b = state.sigma2_beta;
    double quad = (state.alpha.array() - state.mu_alpha).square().sum() / s2a +
                  (state.beta.array() - state.mu_beta).square().sum() / s2b;
    quad += K * std::log(s2a) + K * std::log(s2b);
    quad += std::log(s2a) + std::log(s2b);
    quad += (state.mu_alpha - m_a) * (state.mu_alpha - m_a) / (tau_a * s2a);
    quad += (state.mu_beta - m_b) * (state.mu_beta - m_b) / (tau_b * s2b);
    quad += 1.0 / s2a + 1.0 / s2b;
    lp += -0.5 * quad;
    lp += (-0.5 * hyper.nu_alpha - 1.0) * std::log(s2a) + (-0.5 * hyper.nu_beta - 1.0) * std::log(s2b);

    for (int f = 0; f < state.covariates(); ++f) {
        const double s2 = state.sigma2_lambda[f];
        const double dl = state.lambda[f] - state.mu_lambda[f];
        const double dm = state.mu_lambda[f] - m_l;
        lp += -0.5 * (dl * dl / s2 + 2.0 * std::log(s2) + dm * dm / (tau_l * s2) + 1.0 / s2);
        lp += (-0.5 * hyper.nu_lambda - 1.0) * std::log(s2);
    }
    return lp;
}

double lb_alpha(int nodes) {
    if (nodes < 2) throw DomainError("lb_alpha needs at least two nodes");
    const double ln = std::log(static_cast<double>(nodes));
    return std::log(ln / (nodes - ln));
}

double reference_intercept(double density) {
    if (!(density > 0.0 && density < 1.0)) throw DomainError("density must lie strictly between 0 and 1");
    return std::log(density / (1.0 - density)) + 2.0;
}

}  // namespace lsmmn
