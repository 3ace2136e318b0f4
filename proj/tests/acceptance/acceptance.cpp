// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

#include "lsmmn/diagnostics.hpp"
#include "lsmmn/init.hpp"
#include "lsmmn/io.hpp"
#include "lsmmn/procrustes.hpp"
#include "lsmmn/sampler.hpp"
#include "lsmmn/simulate.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace lsmmn;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void info(const std::string& id, const std::string& detail) {
    std::printf("[INFO] %s: %s\n", id.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << x;
    return os.str();
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

std::string fmt(const std::vector<double>& v, int digits = 3) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i], digits);
    return s + ")";
}

struct Fit {
    ChainOutput chain;
    PosteriorSummary summary;
    double seconds = 0.0;
};

struct FitSettings {
    long iters = 40000;
    long burnin = 5000;
    long thin = 20;
    double threshold = 1.0;
    double alpha_ref = 0.0;
    std::uint64_t seed = 1;
    ModelKind model = ModelKind::latent_space;
};

Fit fit(const Multiplex& m, const CovariateSet& x, const FitSettings& s) {
    HyperConfig h;
    h.iters = s.iters;
    h.burnin = s.burnin;
    h.thin = s.thin;
    h.procrustes_threshold = s.threshold;
    h.alpha_ref = s.alpha_ref;
    h.seed = s.seed;
    const auto start = std::chrono::steady_clock::now();
    std::seed_seq init_seed{s.seed, std::uint64_t{0x5eed}};
    Rng init_rng(init_seed);
    ModelState init = s.model == ModelKind::random_graph ? initialize_random_graph(m, x, h)
                                                         : initialize(m, x, h, init_rng).first;
    RunOptions options;
    options.model = s.model;
    Fit out;
    out.chain = run_chain(m, x, h, init, options);
    out.summary = summarize(out.chain);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "  fit n=" << m.nodes() << " K=" << m.networks() << " iters=" << s.iters << " took "
              << fmt(out.seconds, 1) << " s\n";
    return out;
}

double pc_against(const Fit& f, const GroundTruth& truth) { return procrustes_correlation(f.summary.z_mean, truth.z); }

std::vector<double> beta_means(const Fit& f) {
    std::vector<double> b;
    for (const auto& e : f.summary.beta) b.push_back(e.mean);
    return b;
}

double revert_rate(const Fit& f) {
    return f.chain.acceptance.sweeps ? static_cast<double>(f.chain.acceptance.procrustes_reverts) / f.chain.acceptance.sweeps : 0.0;
}

// ---------------------------------------------------------------------------------------------

void scenario_one(int id, Presence presence) {
    const auto truth = generate(make_scenario(1, 50, 5, presence, 11));
    const Fit f = fit(truth.multiplex, CovariateSet{}, FitSettings{});
    const double pc = pc_against(f, truth);
    const auto beta = beta_means(f);
    const double want[] = {1.36, 0.45, 0.07, 0.95};
    bool betas_ok = true;
    for (int k = 1; k < 5; ++k) betas_ok = betas_ok && std::abs(beta[static_cast<std::size_t>(k)] - want[k - 1]) <= 0.25;
    report("criterion " + std::to_string(id),
           pc >= 0.93 && betas_ok,
           std::string("scenario I, n=50, K=5, ") + (presence == Presence::full ? "full presence" : "absences") +
               ": PC " + fmt(pc) + " (need >= 0.93); beta " + fmt(beta) + " vs (1, 1.36, 0.45, 0.07, 0.95) within 0.25");
}

void scenarios_two_three() {
    double pcs[2];
    int idx = 0;
    for (int scenario : {2, 3}) {
        const auto truth = generate(make_scenario(scenario, 50, 3, Presence::full, 21));
        pcs[idx++] = pc_against(fit(truth.multiplex, CovariateSet{}, FitSettings{}), truth);
    }
    report("criterion 3", pcs[0] >= 0.85 && pcs[1] >= 0.85,
           "mixture PC " + fmt(pcs[0]) + ", hotelling PC " + fmt(pcs[1]) + " (need >= 0.85 each)");
}

void scenario_four() {
    std::vector<double> pcs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto truth = generate(make_scenario(4, 50, 10, Presence::full, 100 + seed));
        FitSettings s;
        s.seed = seed;
        pcs.push_back(pc_against(fit(truth.multiplex, CovariateSet{}, s), truth));
    }
    double mean = 0;
    for (double v : pcs) mean += v;
    mean /= 5;
    double var = 0;
    for (double v : pcs) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / 4);
    report("criterion 4", mean >= 0.93 && sd <= 0.03,
           "K=10, n=50, 5 seeds: PCs " + fmt(pcs) + ", mean " + fmt(mean) + " (need >= 0.93), sd " + fmt(sd) +
               " (need <= 0.03)");
}

void random_graph_reduction() {
    ScenarioSpec spec;
    spec.n = 50;
    spec.K = 3;
    spec.alpha = Vector::Zero(3);
    spec.beta = Vector::Zero(3);
    // The reference network keeps the identifying coefficient of one.
    (*spec.beta)[0] = 1.0;
    spec.seed = 31;
    const auto truth = generate(spec);
    const Fit f = fit(truth.multiplex, CovariateSet{}, FitSettings{});
    const auto& m = truth.multiplex;
    bool ok = true;
    std::string detail;
    for (int k = 1; k < 3; ++k) {
        std::vector<double> draws;
        for (const auto& s : f.chain.draws) draws.push_back(s.beta[k]);
        const auto ci = credible_interval(draws, 0.95);
        const Matrix p = posterior_edge_probabilities(f.chain, m, CovariateSet{}, k);
        double lo = kInf, hi = -kInf;
        for (int i = 0; i < m.nodes(); ++i)
            for (int j = 0; j < m.nodes(); ++j)
                if (i != j && m.h[k](i, j)) {
                    lo = std::min(lo, p(i, j));
                    hi = std::max(hi, p(i, j));
                }
        ok = ok && ci.first < 0.1 && hi - lo <= 0.05;
        detail += "network " + std::to_string(k + 1) + ": beta 95% interval [" + fmt(ci.first) + ", " + fmt(ci.second) +
                  "], edge-probability range " + fmt(hi - lo) + "; ";
    }
    report("criterion 5", ok, detail + "need lower end < 0.1 and range <= 0.05");
}

void oracle_equivalence() {
    std::mt19937_64 gen(2024);
    double worst = 0;
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 2 + rep % 3, K = 1 + rep % 3, F = rep % 3;
        oracle::Hyper oh;
        oh.tau_a = 0.3 + 0.1 * (rep % 5);
        oh.m_a = 0.1;
        oh.m_b = 0.4;
        oh.m_l = 0.2;
        HyperConfig h;
        h.tau_alpha = static_cast<double>(oh.tau_a);
        h.tau_beta = static_cast<double>(oh.tau_b);
        h.tau_lambda = static_cast<double>(oh.tau_l);
        h.m_alpha = static_cast<double>(oh.m_a);
        h.m_beta = static_cast<double>(oh.m_b);
        h.m_lambda = static_cast<double>(oh.m_l);
        const auto m = oracle::random_multiplex(n, K, gen);
        const auto x = oracle::random_covariates(n, F, gen);
        const auto s1 = oracle::random_state(n, 2, K, F, gen);
        const auto s2 = oracle::random_state(n, 2, K, F, gen);
        const auto d1 = distance_matrix(s1.z), d2 = distance_matrix(s2.z);
        worst = std::max(worst, std::abs(log_likelihood(m, s1, d1, x) - static_cast<double>(oracle::log_likelihood(m, s1, x))));
        const double got = log_posterior(m, s1, d1, x, h) - log_posterior(m, s2, d2, x, h);
        const double want = static_cast<double>(oracle::log_posterior(m, s1, x, oh) - oracle::log_posterior(m, s2, x, oh));
        worst = std::max(worst, std::abs(got - want));
    }
    report("criterion 6", worst <= 1e-8, "25 instances, largest discrepancy " + sci(worst) + " (need <= 1e-8)");
}

double ks_p(std::vector<double> draws, const std::function<double(double)>& cdf) {
    return oracle::ks_p_value(oracle::ks_statistic(std::move(draws), cdf), 10000);
}

void proposal_correctness() {
    std::mt19937_64 gen(77);
    double worst = 0;
    const oracle::real h = 1e-4L;
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 4 + rep % 3, K = 2 + rep % 2, F = 1 + rep % 2;
        const auto m = oracle::random_multiplex(n, K, gen);
        const auto x = oracle::random_covariates(n, F, gen);
        const auto s = oracle::random_state(n, 2, K, F, gen);
        const auto d = distance_matrix(s.z);
        const Matrix c = covariate_term(x, s.lambda, n);
        auto rel = [](double a, oracle::real b) { return std::abs(a - static_cast<double>(b)) / std::max(1.0, std::abs(a)); };
        for (int k = 1; k < K; ++k) {
            auto at = [&](auto set) {
                return [&, set](oracle::real v) {
                    ModelState t = s;
                    set(t, static_cast<double>(v));
                    return oracle::log_likelihood(m, t, x);
                };
            };
            auto ga = at([k](ModelState& t, double v) { t.alpha[k] = v; });
            auto gb = at([k](ModelState& t, double v) { t.beta[k] = v; });
            const auto qa = alpha_proposal(m, k, s.beta[k], s.mu_alpha, s.sigma2_alpha, d, c);
            const auto qb = beta_proposal(m, k, s.alpha[k], s.mu_beta, s.sigma2_beta, d, c);
            worst = std::max(worst, rel(qa.variance, 1 / (1 / static_cast<oracle::real>(s.sigma2_alpha) - oracle::second_difference(ga, s.mu_alpha, h))));
            worst = std::max(worst, rel(qb.variance, 1 / (1 / static_cast<oracle::real>(s.sigma2_beta) - oracle::second_difference(gb, s.mu_beta, h))));
        }
        for (int f = 0; f < F; ++f) {
            auto gl = [&](oracle::real v) {
                ModelState t = s;
                t.lambda[f] = static_cast<double>(v);
                return oracle::log_likelihood(m, t, x);
            };
            const auto ql = lambda_proposal(m, s, d, x, c, f);
            worst = std::max(worst, rel(ql.variance, 1 / (1 / static_cast<oracle::real>(s.sigma2_lambda[f]) - oracle::second_difference(gl, s.mu_lambda[f], h))));
        }
    }

    // Full-conditional and primitive samplers, 10^4 draws each.
    std::vector<std::pair<std::string, double>> ks;
    {
        const std::vector<double> vals{0.3, -1.0, 2.0, 0.7};
        const auto sr = sigma2_conditional({vals.data(), vals.size()}, 0.5, 0.75, 3.0, 0.1);
        Rng rng(1);
        std::vector<double> draws;
        for (int i = 0; i < 10000; ++i) draws.push_back(gibbs_sigma2({vals.data(), vals.size()}, 0.5, 0.75, 3.0, rng, 0.1));
        ks.emplace_back("variance", ks_p(draws, [&](double v) { return inverse_gamma_cdf(v, sr.shape, sr.rate); }));
    }
    {
        const std::vector<double> vals{-0.5, 0.1, 0.4};
        const auto c = mu_conditional({vals.data(), vals.size()}, 0.8, 2.0 / 3.0, 0.1);
        Rng rng(2);
        std::vector<double> draws;
        for (int i = 0; i < 10000; ++i) draws.push_back(gibbs_mu({vals.data(), vals.size()}, 0.8, 2.0 / 3.0, 0.1, -0.2, rng));
        ks.emplace_back("mean", ks_p(draws, [&](double v) { return truncated_normal_cdf(v, c.mean, std::sqrt(c.variance), -0.2, kInf); }));
    }
    {
        HyperConfig hy;
        hy.tau_lambda = 0.5;
        hy.m_lambda = 0.2;
        ModelState s;
        s.lambda = Vector::Constant(1, 0.4);
        Rng rng(3);
        std::vector<double> draws;
        for (int i = 0; i < 10000; ++i) {
            s.mu_lambda = Vector::Constant(1, 0.3);
            s.sigma2_lambda = Vector::Constant(1, 1.0);
            gibbs_lambda_nuisance(s, 0, hy, rng);
            draws.push_back(s.sigma2_lambda[0]);
        }
        ks.emplace_back("covariate variance", ks_p(draws, [](double v) { return inverse_gamma_cdf(v, 2.5, 0.515); }));
    }
    {
        Rng rng(4);
        std::vector<double> draws;
        for (int i = 0; i < 10000; ++i) draws.push_back(sample_truncated_normal(1.3, 0.4, 2.0, kInf, rng));
        ks.emplace_back("truncated normal", ks_p(draws, [](double v) { return truncated_normal_cdf(v, 1.3, 0.4, 2.0, kInf); }));
    }
    {
        Rng rng(5);
        std::vector<double> draws;
        for (int i = 0; i < 10000; ++i) draws.push_back(sample_inverse_gamma(11.0, 2.5, rng));
        ks.emplace_back("inverse gamma", ks_p(draws, [](double v) { return inverse_gamma_cdf(v, 11.0, 2.5); }));
    }
    bool ks_ok = true;
    std::string detail = "largest relative curvature error " + sci(worst) + " (need <= 1e-6); KS p-values";
    for (const auto& [name, p] : ks) {
        ks_ok = ks_ok && p > 0.01;
        detail += " " + name + " " + fmt(p, 3);
    }
    report("criterion 7", worst <= 1e-6 && ks_ok, detail + " (need > 0.01)");
}

void grid_agreement() {
    Multiplex m = Multiplex::full_presence({"a", "b", "c"}, 2);
    m.y[0](0, 1) = m.y[0](1, 2) = m.y[0](2, 0) = 1;
    m.y[1](0, 1) = m.y[1](1, 0) = m.y[1](1, 2) = 1;
    ModelState s;
    s.z = Coordinates(3, 2);
    s.z << 0.0, 0.0, 0.8, 0.1, -0.3, 1.2;
    s.alpha = Eigen::Vector2d(0.0, 0.3);
    s.beta = Eigen::Vector2d(1.0, 0.6);
    s.lambda = Vector();
    s.mu_lambda = Vector();
    s.sigma2_lambda = Vector();
    s.mu_alpha = 0.2;
    s.sigma2_alpha = 1.0;
    s.mu_beta = 0.5;
    s.sigma2_beta = 1.0;
    const double lb = lb_alpha(3);
    const auto d = distance_matrix(s.z);
    const Matrix zero = Matrix::Zero(3, 3);

    // Posterior of (alpha, beta) of the second network with everything else held fixed.
    const int steps = 1200;
    const double a_lo = lb, a_hi = 8.0, b_lo = 0.0, b_hi = 8.0;
    const double ha = (a_hi - a_lo) / steps, hb = (b_hi - b_lo) / steps;
    double mass = 0, mean_a = 0, mean_b = 0, peak = -kInf;
    std::vector<double> logs(static_cast<std::size_t>(steps) * steps);
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) {
            const double a = a_lo + (i + 0.5) * ha, b = b_lo + (j + 0.5) * hb;
            const double lp = log_likelihood_network(m, 1, a, b, d, zero) - 0.5 * (a - s.mu_alpha) * (a - s.mu_alpha) / s.sigma2_alpha -
                              0.5 * (b - s.mu_beta) * (b - s.mu_beta) / s.sigma2_beta;
            logs[static_cast<std::size_t>(i) * steps + j] = lp;
            peak = std::max(peak, lp);
        }
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) {
            const double w = std::exp(logs[static_cast<std::size_t>(i) * steps + j] - peak);
            mass += w;
            mean_a += w * (a_lo + (i + 0.5) * ha);
            mean_b += w * (b_lo + (j + 0.5) * hb);
        }
    mean_a /= mass;
    mean_b /= mass;

    HyperConfig h;
    h.iters = 200000;
    h.burnin = 5000;
    h.thin = 1;
    h.seed = 8;
    RunOptions o;
    o.blocks.nuisance = false;
    o.blocks.latent = false;
    o.blocks.lambda = false;
    const auto chain = run_chain(m, CovariateSet{}, h, s, o);
    double chain_a = 0, chain_b = 0;
    for (const auto& st : chain.draws) {
        chain_a += st.alpha[1];
        chain_b += st.beta[1];
    }
    chain_a /= static_cast<double>(chain.size());
    chain_b /= static_cast<double>(chain.size());
    report("criterion 8", std::abs(chain_a - mean_a) <= 0.05,
           "n=3, K=2, other blocks held fixed: chain mean of alpha(2) " + fmt(chain_a) + " vs grid " + fmt(mean_a) +
               " (need within 0.05); beta(2) " + fmt(chain_b) + " vs grid " + fmt(mean_b) + "; acceptance " +
               fmt(static_cast<double>(chain.acceptance.network_accepted[1]) / h.iters, 3) + "; lower bound " + fmt(lb));
}

void dic_arithmetic() {
    const auto flat = dic_from_parts({42.0, 42.0, 42.0}, 42.0);
    const auto two = dic_from_parts({10.0, 14.0}, 11.0);
    report("criterion 9", flat.dic == 42.0 && two.dic == 13.0,
           "constant trace gives " + fmt(flat.dic, 1) + " (need 42.0); trace {10, 14} with 11 gives " + fmt(two.dic, 1) +
               " (need 13.0)");
}

void eurovision() {
    const char* manifest = std::getenv("LSMMN_EUROVISION_MANIFEST");
    if (!manifest) {
        info("criterion 10", "skipped (optional, set LSMMN_EUROVISION_MANIFEST to a dataset manifest)");
        return;
    }
    const Dataset data = load_multiplex(fs::path(manifest));
    const auto& m = data.multiplex;
    FitSettings s;
    if (const char* it = std::getenv("LSMMN_EUROVISION_ITERS")) {
        s.iters = std::stol(it);
        s.burnin = s.iters / 8;
    }
    s.alpha_ref = reference_intercept(m.density(0));
    s.threshold = 0.85;
    const Fit latent = fit(m, data.covariates, s);
    FitSettings rg = s;
    rg.model = ModelKind::random_graph;
    const Fit random = fit(m, CovariateSet{}, rg);
    const double dic_latent = dic(latent.chain, m, data.covariates);
    const double dic_random = dic(random.chain, m, CovariateSet{});
    double amin = 1, amax = 0;
    for (int k = 0; k < m.networks(); ++k)
        for (int l = k + 1; l < m.networks(); ++l) {
            const double a = association(m, k, l);
            amin = std::min(amin, a);
            amax = std::max(amax, a);
        }
    bool ok = dic_latent < dic_random && amin >= 0.4 && amax <= 0.8;
    std::string detail = "DIC latent+covariates " + fmt(dic_latent, 2) + " vs random graph " + fmt(dic_random, 2) +
                         "; association range [" + fmt(amin, 3) + ", " + fmt(amax, 3) + "]";
    if (const char* borders = std::getenv("LSMMN_EUROVISION_BORDERS")) {
        const auto b = border_overlap(latent.summary.z_mean, read_borders_as_indicator(fs::path(borders), m.nodes()));
        ok = ok && std::abs(b.average - 0.11) <= 0.03;
        detail += "; border overlap " + fmt(b.average, 3) + " (need 0.11 +- 0.03)";
    }
    report("criterion 10", ok, detail);
}

void literal_threshold_info() {
    const auto truth = generate(make_scenario(1, 50, 5, Presence::full, 11));
    FitSettings s;
    s.threshold = 0.85;
    const Fit f = fit(truth.multiplex, CovariateSet{}, s);
    info("default threshold", "scenario I, n=50, K=5 with the Procrustes threshold at 0.85: PC " + fmt(pc_against(f, truth)) +
                                  ", share of sweeps reverted " + fmt(revert_rate(f), 3) +
                                  " (recovery criteria above use threshold 1.0, which disables the revert)");
}

void init_then_fit() {
    const auto truth = generate(make_scenario(1, 50, 3, Presence::full, 41));
    const Fit f = fit(truth.multiplex, CovariateSet{}, FitSettings{});
    report("initialization", pc_against(f, truth) >= 0.85,
           "scenario I, n=50, K=3, initialization then 40000 iterations: PC " + fmt(pc_against(f, truth)) + " (need >= 0.85)");
}

}  // namespace

int main(int argc, char** argv) {
    // Optional argument: run only the listed criteria, e.g. "6,7,8,9".
    std::string only = argc > 1 ? argv[1] : "";
    auto wanted = [&](const std::string& id) {
        if (only.empty()) return true;
        std::stringstream ss(only);
        std::string item;
        while (std::getline(ss, item, ','))
            if (item == id) return true;
        return false;
    };
    try {
        if (wanted("6")) oracle_equivalence();
        if (wanted("7")) proposal_correctness();
        if (wanted("8")) grid_agreement();
        if (wanted("9")) dic_arithmetic();
        if (wanted("1")) scenario_one(1, Presence::full);
        if (wanted("2")) scenario_one(2, Presence::eurovision_like);
        if (wanted("3")) scenarios_two_three();
        if (wanted("4")) scenario_four();
        if (wanted("5")) random_graph_reduction();
        if (wanted("init")) init_then_fit();
        if (wanted("info")) literal_threshold_info();
        if (wanted("10")) eurovision();
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance run aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
