#include "lsmmn/cli.hpp"

#include "lsmmn/core.hpp"
#include "lsmmn/diagnostics.hpp"
#include "lsmmn/init.hpp"
#include "lsmmn/io.hpp"
#include "lsmmn/sampler.hpp"
#include "lsmmn/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace lsmmn {

namespace {

using json = nlohmann::json;

std::string default_out() {
    const char* env = std::getenv("LSMMN_OUT_DIR");
    return env && *env ? env : "lsmmn_out";
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

CovariateSet choose_covariates(const CovariateSet& all, const std::string& wanted) {
    if (wanted.empty()) return all;
    if (wanted == "none") return {};
    return all.select(split_commas(wanted));
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct FitArgs {
    std::string data;
    long iters = 10000;
    long burnin = -1;
    long thin = 1;
    std::uint64_t seed = 1;
    int dims = 2;
    int ref_network = 1;
    std::optional<double> alpha_ref;
    double threshold = 0.85;
    std::string covariates;
    std::string out;
    int chains = 1;
    bool random_graph = false;
    int source_network = 0;
    bool plain_start = false;
};

json init_report_json(const InitReport& r) {
    return json{{"chosen_network", r.chosen_network + 1},
                {"geodesic_diameter", r.geodesic_diameter},
                {"clamped_alphas", r.clamped_alphas},
                {"clamped_betas", r.clamped_betas},
                {"separated", r.separated},
                {"variance_defaulted", r.variance_defaulted},
                {"candidate_objectives", r.candidate_objectives},
                {"warnings", r.warnings}};
}

int run_fit(const FitArgs& a) {
    const Dataset data = load_multiplex(fs::path(a.data));
    const Multiplex& m = data.multiplex;
    const CovariateSet covariates = choose_covariates(data.covariates, a.covariates);
    const int K = m.networks();

    if (a.iters <= a.burnin) throw ConfigError("--iters must exceed --burnin");
    if (a.chains < 1) throw ConfigError("--chains must be at least 1");
    if (a.ref_network < 1 || a.ref_network > K) throw ConfigError("--ref-network must lie between 1 and " + std::to_string(K));
    if (a.source_network < 0 || a.source_network > K) throw ConfigError("--source-network must lie between 1 and " + std::to_string(K));

    HyperConfig hyper;
    hyper.p = a.dims;
    hyper.reference = a.ref_network - 1;
    hyper.procrustes_threshold = a.threshold;
    hyper.refine_start = !a.plain_start;
    hyper.iters = a.iters;
    hyper.burnin = a.burnin >= 0 ? a.burnin : a.iters / 10;
    hyper.thin = a.thin;
    if (a.alpha_ref) {
        hyper.alpha_ref = *a.alpha_ref;
    } else {
        const double density = m.density(hyper.reference);
        if (!(density > 0.0 && density < 1.0))
            throw ConfigError("reference network density is 0 or 1; pass --alpha-ref explicitly");
        hyper.alpha_ref = reference_intercept(density);
    }
    hyper.validate();

    const fs::path out(a.out);
    std::vector<ChainFile> results(static_cast<std::size_t>(a.chains));
    std::vector<json> reports(static_cast<std::size_t>(a.chains));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(a.chains));

    auto run_one = [&](int c) {
        try {
            HyperConfig h = hyper;
            h.seed = a.seed + static_cast<std::uint64_t>(c);
            RunOptions options;
            ModelState start;
            if (a.random_graph) {
                options.model = ModelKind::random_graph;
                start = initialize_random_graph(m, covariates, h);
                reports[static_cast<std::size_t>(c)] = json{{"model", "random_graph"}};
            } else {
                std::seed_seq seq{h.seed, std::uint64_t{0x5eed}};
                Rng init_rng(seq);
                std::optional<int> source;
                if (a.source_network > 0) source = a.source_network - 1;
                auto [state, report] = initialize(m, covariates, h, init_rng, source);
                start = std::move(state);
                reports[static_cast<std::size_t>(c)] = init_report_json(report);
            }
            ChainFile& f = results[static_cast<std::size_t>(c)];
            f.chain = run_chain(m, covariates, h, start, options);
            f.labels = m.labels;
            f.network_names = m.network_names;
            f.covariate_names = covariates.names;
        } catch (...) {
            errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
    };

    if (a.chains == 1) {
        run_one(0);
    } else {
        std::vector<std::thread> threads;
        for (int c = 0; c < a.chains; ++c) threads.emplace_back(run_one, c);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (int c = 0; c < a.chains; ++c) {
        const fs::path dir = a.chains == 1 ? out : out / ("chain_" + std::to_string(c + 1));
        const ChainFile& f = results[static_cast<std::size_t>(c)];
        write_chain(dir, f);
        write_text(dir / "init.json", reports[static_cast<std::size_t>(c)].dump(2) + "\n");
        if (f.chain.empty()) {
            std::cout << dir.string() << ": no stored draws\n";
            continue;
        }
        const PosteriorSummary summary = summarize(f.chain);
        const DicParts parts = dic_report(f.chain, m, covariates);
        write_summary(dir / "summary.json", summary, f, parts);
        write_coordinates(dir / "latent.tsv", m.labels, summary.z_mean);
        std::cout << dir.string() << ": " << f.chain.size() << " draws, DIC " << format_double(parts.dic) << '\n';
    }
    return 0;
}

struct SimulateArgs {
    int scenario = 1;
    int n = 50;
    int k = 0;
    std::string presence = "full";
    std::uint64_t seed = 1;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    Presence presence;
    if (a.presence == "full")
        presence = Presence::full;
    else if (a.presence == "euro")
        presence = Presence::eurovision_like;
    else
        throw ConfigError("--presence must be full or euro");
    const int K = a.k > 0 ? a.k : (a.scenario == 4 ? 10 : 3);
    const ScenarioSpec spec = make_scenario(a.scenario, a.n, K, presence, a.seed);
    const GroundTruth truth = generate(spec);
    Dataset data;
    data.multiplex = truth.multiplex;
    const fs::path out(a.out);
    const fs::path manifest = save_dataset(out, data);
    write_truth(out / "truth.json", truth);
    std::cout << manifest.string() << '\n';
    return 0;
}

struct DiagnoseArgs {
    std::string chain;
    std::string data;
    std::string geo;
    std::string borders;
    std::string truth;
    std::string neighbors = "1,2,3,5,10,15";
    std::string out;
};

int run_diagnose(const DiagnoseArgs& a) {
    const ChainFile file = read_chain(fs::path(a.chain));
    if (file.chain.empty()) throw ConfigError("chain has no stored draws");
    const Dataset data = load_multiplex(fs::path(a.data));
    const Multiplex& m = data.multiplex;
    if (m.labels != file.labels) throw ConfigError("chain and data have different node labels");
    const CovariateSet covariates = data.covariates.select(file.covariate_names);

    const PosteriorSummary summary = summarize(file.chain);
    const DicParts parts = dic_report(file.chain, m, covariates);
    json j;
    j["dic"] = {{"dic", parts.dic},
                {"mean_deviance", parts.mean_deviance},
                {"deviance_at_mean", parts.deviance_at_mean},
                {"effective_parameters", parts.effective_parameters}};
    std::cout << "DIC " << format_double(parts.dic) << '\n';

    json assoc = json::array();
    for (int k = 0; k < m.networks(); ++k) {
        json row = json::array();
        for (int l = 0; l < m.networks(); ++l) row.push_back(k == l ? 1.0 : association(m, k, l));
        assoc.push_back(row);
    }
    j["association"] = assoc;

    const bool latent = file.chain.model == ModelKind::latent_space;
    if (!a.truth.empty()) {
        const GroundTruth truth = read_truth(fs::path(a.truth));
        if (truth.multiplex.labels != m.labels) throw ConfigError("truth and data have different node labels");
        json t;
        if (latent) {
            const double pc = procrustes_correlation(summary.z_mean, truth.z);
            t["procrustes_correlation"] = pc;
            std::cout << "procrustes correlation with truth " << format_double(pc) << '\n';
        }
        json err = json::array();
        for (int k = 0; k < m.networks() && k < truth.beta.size(); ++k)
            err.push_back({{"alpha", summary.alpha[static_cast<std::size_t>(k)].mean - truth.alpha[k]},
                           {"beta", summary.beta[static_cast<std::size_t>(k)].mean - truth.beta[k]}});
        t["estimate_minus_truth"] = err;
        j["truth"] = t;
    }

    std::optional<Coordinates> geo = data.coordinates;
    if (!a.geo.empty()) geo = read_coordinates(fs::path(a.geo), m.labels);
    if (geo && latent) {
        json rows = json::array();
        for (const auto& token : split_commas(a.neighbors)) {
            const int r = std::stoi(token);
            if (r < 1 || r > m.nodes() - 1) continue;
            const NeighborOverlap ov = neighbor_overlap(summary.z_mean, *geo, r);
            rows.push_back({{"r", r}, {"average", ov.average}, {"average_per_r", ov.average_per_r}, {"maximum", ov.maximum}});
            std::cout << "neighbour overlap r=" << r << ": average " << format_double(ov.average) << ", maximum "
                      << ov.maximum << '\n';
        }
        j["neighbor_overlap"] = rows;
    }
    if (!a.borders.empty() && latent) {
        const BorderOverlap bo = border_overlap(summary.z_mean, read_borders_as_indicator(fs::path(a.borders), m.nodes()));
        json per = json::array();
        for (std::size_t i = 0; i < bo.per_node.size(); ++i)
            per.push_back({{"label", m.labels[i]},
                           {"borders", bo.border_counts[i]},
                           {"ratio", std::isnan(bo.per_node[i]) ? json(nullptr) : json(bo.per_node[i])}});
        j["border_overlap"] = {{"average", bo.average}, {"mean_border_count", bo.mean_border_count}, {"per_node", per}};
        std::cout << "border overlap average " << format_double(bo.average) << '\n';
    }

    const fs::path out(a.out);
    write_text(out / "diagnostics.json", j.dump(2) + "\n");
    return 0;
}

int run_summarize(const std::string& chain_dir, const std::string& out_dir) {
    const ChainFile file = read_chain(fs::path(chain_dir));
    if (file.chain.empty()) throw ConfigError("chain has no stored draws");
    const PosteriorSummary summary = summarize(file.chain);
    const fs::path out(out_dir);
    write_summary(out / "summary.json", summary, file, std::nullopt);
    write_coordinates(out / "latent.tsv", file.labels, summary.z_mean);
    write_dense_matrix(out / "distances.tsv", summary.distance_mean);
    std::cout << (out / "summary.json").string() << '\n';
    return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Latent space models for multidimensional networks"};
    app.name("lsmmn");
    app.require_subcommand(1);

    FitArgs fit;
    fit.out = default_out();
    auto* fit_cmd = app.add_subcommand("fit", "Fit the model by MCMC");
    fit_cmd->add_option("--data", fit.data, "Dataset manifest (JSON)")->required();
    fit_cmd->add_option("--iters", fit.iters, "Total iterations")->capture_default_str();
    fit_cmd->add_option("--burnin", fit.burnin, "Burn-in iterations (default: 10% of --iters)");
    fit_cmd->add_option("--thin", fit.thin, "Keep every n-th draw after burn-in")->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
    fit_cmd->add_option("--dims", fit.dims, "Latent dimension")->capture_default_str();
    fit_cmd->add_option("--ref-network", fit.ref_network, "Reference network (1-based)")->capture_default_str();
    fit_cmd->add_option("--alpha-ref", fit.alpha_ref, "Fixed reference intercept (default: logit(density) + 2)");
    fit_cmd->add_option("--procrustes-threshold", fit.threshold, "Revert latent sweeps above this correlation (1 disables)")
        ->capture_default_str();
    fit_cmd->add_option("--covariates", fit.covariates, "Comma-separated covariate names, or 'none' (default: all)");
    fit_cmd->add_option("--out", fit.out, "Output directory (default: $LSMMN_OUT_DIR or lsmmn_out)");
    fit_cmd->add_option("--chains", fit.chains, "Independent chains run concurrently")->capture_default_str();
    fit_cmd->add_flag("--random-graph", fit.random_graph, "Fit the random-graph model (all coefficients zero)");
    fit_cmd->add_option("--source-network", fit.source_network, "Pin the network used for starting positions (1-based)");
    fit_cmd->add_flag("--plain-start", fit.plain_start,
                      "Start from the scaled geodesics of one random network without posterior refinement");

    SimulateArgs sim;
    sim.out = default_out();
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a ground-truth multiplex");
    sim_cmd->add_option("--scenario", sim.scenario, "1 gaussian, 2 mixture, 3 hotelling, 4 large K")->required();
    sim_cmd->add_option("--n", sim.n, "Nodes")->capture_default_str();
    sim_cmd->add_option("--k", sim.k, "Networks (default 3, or 10 for scenario 4)");
    sim_cmd->add_option("--presence", sim.presence, "full or euro")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Output directory");

    DiagnoseArgs diag;
    diag.out = default_out();
    auto* diag_cmd = app.add_subcommand("diagnose", "DIC, associations and latent-space comparisons");
    diag_cmd->add_option("--chain", diag.chain, "Chain directory")->required();
    diag_cmd->add_option("--data", diag.data, "Dataset manifest")->required();
    diag_cmd->add_option("--geo", diag.geo, "External coordinates (label, c1, ..., cq)");
    diag_cmd->add_option("--borders", diag.borders, "Dense border matrix, 0 = shared border");
    diag_cmd->add_option("--truth", diag.truth, "truth.json from simulate");
    diag_cmd->add_option("--neighbors", diag.neighbors, "Neighbour counts for the overlap table")->capture_default_str();
    diag_cmd->add_option("--out", diag.out, "Output directory");

    std::string sum_chain;
    std::string sum_out = default_out();
    auto* sum_cmd = app.add_subcommand("summarize", "Posterior means and standard deviations");
    sum_cmd->add_option("--chain", sum_chain, "Chain directory")->required();
    sum_cmd->add_option("--out", sum_out, "Output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (fit_cmd->parsed()) return run_fit(fit);
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (diag_cmd->parsed()) return run_diagnose(diag);
        if (sum_cmd->parsed()) return run_summarize(sum_chain, sum_out);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

int cli_main(int argc, char** argv) { return cli_main(std::vector<std::string>(argv, argv + argc)); }

}  // namespace lsmmn
