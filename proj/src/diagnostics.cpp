#include "lsmmn/diagnostics.hpp"

#include "lsmmn/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lsmmn {

namespace {

// Welford accumulator for a mean and an n - 1 standard deviation.
class Moments {
public:
    void add(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
    }
    MeanSd result() const {
        MeanSd out;
        out.mean = mean_;
        out.sd = count_ > 1 ? std::sqrt(m2_ / static_cast<double>(count_ - 1)) : 0.0;
        return out;
    }

private:
    long count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

std::vector<MeanSd> vector_moments(const ChainOutput& chain, const Vector ModelState::*field) {
    const auto size = (chain.draws.front().*field).size();
    std::vector<Moments> acc(static_cast<std::size_t>(size));
    for (const auto& s : chain.draws)
        for (Eigen::Index i = 0; i < size; ++i) acc[static_cast<std::size_t>(i)].add((s.*field)[i]);
    std::vector<MeanSd> out;
    for (const auto& a : acc) out.push_back(a.result());
    return out;
}

MeanSd scalar_moments(const ChainOutput& chain, double ModelState::*field) {
    Moments acc;
    for (const auto& s : chain.draws) acc.add(s.*field);
    return acc.result();
}

Vector means_of(const std::vector<MeanSd>& values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i].mean;
    return v;
}

}  // namespace

ModelState PosteriorSummary::mean_state() const {
    ModelState s;
    s.z = z_mean;
    s.alpha = means_of(alpha);
    s.beta = means_of(beta);
    s.lambda = means_of(lambda);
    s.mu_alpha = mu_alpha.mean;
    s.sigma2_alpha = sigma2_alpha.mean;
    s.mu_beta = mu_beta.mean;
    s.sigma2_beta = sigma2_beta.mean;
    s.mu_lambda = means_of(mu_lambda);
    s.sigma2_lambda = means_of(sigma2_lambda);
    return s;
}

PosteriorSummary summarize(const ChainOutput& chain) {
    if (chain.empty()) throw ConfigError("cannot summarize an empty chain");
    PosteriorSummary out;
    out.draws = chain.size();
    out.alpha = vector_moments(chain, &ModelState::alpha);
    out.beta = vector_moments(chain, &ModelState::beta);
    out.lambda = vector_moments(chain, &ModelState::lambda);
    out.mu_lambda = vector_moments(chain, &ModelState::mu_lambda);
    out.sigma2_lambda = vector_moments(chain, &ModelState::sigma2_lambda);
    out.mu_alpha = scalar_moments(chain, &ModelState::mu_alpha);
    out.sigma2_alpha = scalar_moments(chain, &ModelState::sigma2_alpha);
    out.mu_beta = scalar_moments(chain, &ModelState::mu_beta);
    out.sigma2_beta = scalar_moments(chain, &ModelState::sigma2_beta);

    const Coordinates& first = chain.draws.front().z;
    const int n = static_cast<int>(first.rows());
    out.z_mean = Coordinates::Zero(first.rows(), first.cols());
    out.distance_mean = Matrix::Zero(n, n);
    // Alignment needs two distinct points; smaller or collapsed configurations are averaged as they are.
    const bool alignable = n >= 2 && (first.rowwise() - first.colwise().mean()).norm() > 0.0;
    for (const auto& s : chain.draws) {
        out.z_mean += alignable ? procrustes_align(first, s.z) : s.z;
        out.distance_mean += distance_matrix(s.z).values();
    }
    const double count = static_cast<double>(chain.size());
    out.z_mean /= count;
    out.distance_mean /= count;
    return out;
}

DicParts dic_from_parts(const std::vector<double>& deviance, double deviance_at_mean) {
    if (deviance.empty()) throw ConfigError("DIC needs at least one stored deviance");
    DicParts out;
    out.mean_deviance = std::accumulate(deviance.begin(), deviance.end(), 0.0) / static_cast<double>(deviance.size());
    out.deviance_at_mean = deviance_at_mean;
    out.effective_parameters = out.mean_deviance - deviance_at_mean;
    out.dic = deviance_at_mean + 2.0 * out.effective_parameters;
    return out;
}

DicParts dic_report(const ChainOutput& chain, const Multiplex& m, const CovariateSet& covariates) {
    if (chain.empty()) throw ConfigError("cannot compute DIC for an empty chain");
    const ModelState mean = summarize(chain).mean_state();
    const double at_mean = -2.0 * log_likelihood(m, mean, distance_matrix(mean.z), covariates);
    return dic_from_parts(chain.deviance, at_mean);
}

double dic(const ChainOutput& chain, const Multiplex& m, const CovariateSet& covariates) {
    return dic_report(chain, m, covariates).dic;
}

double association(const Multiplex& m, int k, int l) {
    if (k < 0 || l < 0 || k >= m.networks() || l >= m.networks()) throw DimensionError("network index out of range");
    const int n = m.nodes();
    if (n < 2) throw DimensionError("association needs at least two nodes");
    long agree = 0;
    long total = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int a = m.h[k](i, j) & m.y[k](i, j);
            const int b = m.h[l](i, j) & m.y[l](i, j);
            agree += a == b;
            ++total;
        }
    return static_cast<double>(agree) / static_cast<double>(total);
}

std::vector<int> nearest_neighbors(const Coordinates& points, int i, int r) {
    const int n = static_cast<int>(points.rows());
    if (r < 1 || r > n - 1) throw DomainError("neighbour count must lie between 1 and n - 1");
    std::vector<std::pair<double, int>> order;
    order.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j)
        if (j != i) order.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
    std::partial_sort(order.begin(), order.begin() + r, order.end());
    std::vector<int> out;
    for (int t = 0; t < r; ++t) out.push_back(order[static_cast<std::size_t>(t)].second);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

int intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return static_cast<int>(both.size());
}

}  // namespace

NeighborOverlap neighbor_overlap(const Coordinates& latent, const Coordinates& external, int r) {
    if (latent.rows() != external.rows()) throw DimensionError("latent and external coordinates differ in node count");
    const int n = static_cast<int>(latent.rows());
    NeighborOverlap out;
    long total = 0;
    for (int i = 0; i < n; ++i) {
        const int common = intersection_size(nearest_neighbors(latent, i, r), nearest_neighbors(external, i, r));
        out.per_node.push_back(common);
        total += common;
        out.maximum = std::max(out.maximum, common);
    }
    out.average_per_r = static_cast<double>(total) / r;
    out.average = out.average_per_r / n;
    return out;
}

BorderOverlap border_overlap(const Coordinates& latent, const BinaryMatrix& borders) {
    const int n = static_cast<int>(latent.rows());
    if (borders.rows() != n || borders.cols() != n) throw DimensionError("border matrix does not match the node count");
    for (int i = 0; i < n; ++i) {
        if (borders(i, i) != 0) throw DomainError("border matrix must have a zero diagonal");
        for (int j = 0; j < n; ++j)
            if (borders(i, j) != borders(j, i)) throw DomainError("border matrix must be symmetric");
    }
    BorderOverlap out;
    out.per_node.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
    out.border_counts.assign(static_cast<std::size_t>(n), 0);
    double ratio_sum = 0.0;
    long count_sum = 0;
    int included = 0;
    for (int i = 0; i < n; ++i) {
        std::vector<int> bordering;
        for (int j = 0; j < n; ++j)
            if (borders(i, j)) bordering.push_back(j);
        const int r = static_cast<int>(bordering.size());
        out.border_counts[static_cast<std::size_t>(i)] = r;
        if (r == 0) continue;
        const double ratio =
            static_cast<double>(intersection_size(nearest_neighbors(latent, i, r), bordering)) / r;
        out.per_node[static_cast<std::size_t>(i)] = ratio;
        ratio_sum += ratio;
        count_sum += r;
        ++included;
    }
    if (included == 0) throw DomainError("no node has a border");
    out.average = ratio_sum / included;
    out.mean_border_count = static_cast<double>(count_sum) / included;
    return out;
}

Matrix posterior_edge_probabilities(const ChainOutput& chain, const Multiplex& m, const CovariateSet& covariates,
                                    int k) {
    if (chain.empty()) throw ConfigError("empty chain");
    if (k < 0 || k >= m.networks()) throw DimensionError("network index out of range");
    const int n = m.nodes();
    Matrix sum = Matrix::Zero(n, n);
    for (const auto& s : chain.draws) {
        const DistanceMatrix d = distance_matrix(s.z);
        const Matrix cov = covariate_term(covariates, s.lambda, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (i != j) sum(i, j) += edge_probability(s.alpha[k], s.beta[k], d(i, j), cov(i, j));
    }
    return sum / static_cast<double>(chain.size());
}

std::pair<double, double> credible_interval(std::vector<double> values, double level) {
    if (values.empty()) throw ConfigError("credible interval of an empty sample");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("credible level must lie in (0, 1)");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    const double tail = 0.5 * (1.0 - level);
    return {quantile(tail), quantile(1.0 - tail)};
}

}  // namespace lsmmn
