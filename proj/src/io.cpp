#include "lsmmn/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace lsmmn {

using json = nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool skippable(const std::string& line) {
    const auto first = line.find_first_not_of(" \t");
    return first == std::string::npos || line[first] == '#';
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return out;
}

std::string where(const fs::path& path, long line) { return path.string() + ":" + std::to_string(line); }

double parse_double(const std::string& text, const fs::path& path, long line) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '+')) ++begin;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError(where(path, line) + ": not a number: '" + text + "'");
    return value;
}

long parse_long(const std::string& text, const fs::path& path, long line) {
    long value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError(where(path, line) + ": not an integer: '" + text + "'");
    return value;
}

std::vector<std::string> read_labels(const fs::path& path) {
    auto in = open_in(path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (skippable(line)) continue;
        labels.push_back(line);
    }
    return labels;
}

class LabelIndex {
public:
    explicit LabelIndex(const std::vector<std::string>& labels, const char* what) : what_(what) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (!index_.emplace(labels[i], static_cast<int>(i)).second)
                throw ParseError(std::string("duplicate ") + what + " '" + labels[i] + "'");
    }
    int at(const std::string& label, const fs::path& path, long line) const {
        const auto it = index_.find(label);
        if (it == index_.end()) throw ParseError(where(path, line) + ": unknown " + what_ + " '" + label + "'");
        return it->second;
    }
    std::optional<int> find(const std::string& label) const {
        const auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::unordered_map<std::string, int> index_;
    std::string what_;
};

int network_index(const LabelIndex& names, int K, const std::string& token, const fs::path& path, long line) {
    if (auto k = names.find(token)) return *k;
    long k = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), k);
    if (res.ec == std::errc() && res.ptr == token.data() + token.size() && k >= 1 && k <= K)
        return static_cast<int>(k - 1);
    return names.at(token, path, line);
}

fs::path resolve(const fs::path& base, const std::string& file) {
    const fs::path p(file);
    return p.is_absolute() ? p : base / p;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vector vector_from(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

json coordinates_json(const Coordinates& z) {
    json out = json::array();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index l = 0; l < z.cols(); ++l) row.push_back(z(i, l));
        out.push_back(row);
    }
    return out;
}

Coordinates coordinates_from(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Coordinates z(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols)
            throw ParseError("ragged coordinate array");
        for (Eigen::Index l = 0; l < cols; ++l) z(i, l) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)].get<double>();
    }
    return z;
}

json mean_sd_json(const MeanSd& v) { return json{{"mean", v.mean}, {"sd", v.sd}}; }

json mean_sd_json(const std::vector<MeanSd>& values, const std::vector<std::string>& names) {
    json out = json::array();
    for (std::size_t i = 0; i < values.size(); ++i) {
        json entry = mean_sd_json(values[i]);
        if (i < names.size()) entry["name"] = names[i];
        out.push_back(entry);
    }
    return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
}

json hyper_json(const HyperConfig& h) {
    return json{{"p", h.p},
                {"reference", h.reference},
                {"alpha_ref", h.alpha_ref},
                {"nu_alpha", h.nu_alpha},
                {"nu_beta", h.nu_beta},
                {"nu_lambda", h.nu_lambda},
                {"tau_alpha", optional_json(h.tau_alpha)},
                {"tau_beta", optional_json(h.tau_beta)},
                {"tau_lambda", optional_json(h.tau_lambda)},
                {"m_alpha", optional_json(h.m_alpha)},
                {"m_beta", optional_json(h.m_beta)},
                {"m_lambda", optional_json(h.m_lambda)},
                {"procrustes_threshold", h.procrustes_threshold},
                {"refine_start", h.refine_start},
                {"seed", h.seed},
                {"iters", h.iters},
                {"burnin", h.burnin},
                {"thin", h.thin}};
}

HyperConfig hyper_from(const json& j) {
    HyperConfig h;
    h.p = j.at("p").get<int>();
    h.reference = j.at("reference").get<int>();
    h.alpha_ref = j.at("alpha_ref").get<double>();
    h.nu_alpha = j.at("nu_alpha").get<double>();
    h.nu_beta = j.at("nu_beta").get<double>();
    h.nu_lambda = j.at("nu_lambda").get<double>();
    h.tau_alpha = optional_from(j, "tau_alpha");
    h.tau_beta = optional_from(j, "tau_beta");
    h.tau_lambda = optional_from(j, "tau_lambda");
    h.m_alpha = optional_from(j, "m_alpha");
    h.m_beta = optional_from(j, "m_beta");
    h.m_lambda = optional_from(j, "m_lambda");
    h.procrustes_threshold = j.at("procrustes_threshold").get<double>();
    h.refine_start = j.value("refine_start", true);
    h.seed = j.at("seed").get<std::uint64_t>();
    h.iters = j.at("iters").get<long>();
    h.burnin = j.at("burnin").get<long>();
    h.thin = j.at("thin").get<long>();
    return h;
}

json read_json(const fs::path& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

DatasetManifest read_manifest(const fs::path& path) {
    const json j = read_json(path);
    DatasetManifest m;
    m.base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    try {
        m.labels = resolve(m.base, j.at("labels").get<std::string>());
        m.networks = j.at("networks").get<std::vector<std::string>>();
        m.edges = resolve(m.base, j.at("edges").get<std::string>());
        if (j.contains("presence") && !j["presence"].is_null())
            m.presence = resolve(m.base, j["presence"].get<std::string>());
        if (j.contains("coordinates") && !j["coordinates"].is_null())
            m.coordinates = resolve(m.base, j["coordinates"].get<std::string>());
        if (j.contains("covariates"))
            for (const auto& c : j["covariates"]) {
                CovariateSource src;
                src.name = c.at("name").get<std::string>();
                src.file = resolve(m.base, c.at("file").get<std::string>());
                const std::string format = c.value("format", "dense");
                if (format == "dense")
                    src.format = MatrixFormat::dense;
                else if (format == "long")
                    src.format = MatrixFormat::long_format;
                else
                    throw ParseError("covariate '" + src.name + "': unknown format '" + format + "'");
                src.binary = c.value("binary", false);
                m.covariates.push_back(std::move(src));
            }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (m.networks.empty()) throw ParseError(path.string() + ": no networks listed");
    return m;
}

Matrix read_dense_matrix(const fs::path& path, int rows, int cols) {
    auto in = open_in(path);
    Matrix x(rows, cols);
    std::string line;
    long lineno = 0;
    int r = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (skippable(line)) continue;
        if (r >= rows) throw ParseError(where(path, lineno) + ": more than " + std::to_string(rows) + " rows");
        std::istringstream fields(line);
        std::string token;
        int c = 0;
        while (fields >> token) {
            if (c >= cols) throw ParseError(where(path, lineno) + ": more than " + std::to_string(cols) + " columns");
            x(r, c++) = parse_double(token, path, lineno);
        }
        if (c != cols) throw ParseError(where(path, lineno) + ": expected " + std::to_string(cols) + " columns");
        ++r;
    }
    if (r != rows) throw ParseError(path.string() + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(r));
    return x;
}

void write_dense_matrix(const fs::path& path, const Matrix& x) {
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j) out << '\t';
            out << format_double(x(i, j));
        }
        out << '\n';
    }
}

Matrix read_long_matrix(const fs::path& path, const std::vector<std::string>& labels) {
    const LabelIndex index(labels, "node");
    const int n = static_cast<int>(labels.size());
    Matrix x = Matrix::Zero(n, n);
    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (skippable(line)) continue;
        const auto f = split_tabs(line);
        if (f.size() != 3) throw ParseError(where(path, lineno) + ": expected source, target, value");
        x(index.at(f[0], path, lineno), index.at(f[1], path, lineno)) = parse_double(f[2], path, lineno);
    }
    return x;
}

Coordinates read_coordinates(const fs::path& path, const std::vector<std::string>& labels) {
    const LabelIndex index(labels, "node");
    auto in = open_in(path);
    std::vector<std::vector<double>> rows(labels.size());
    std::string line;
    long lineno = 0;
    long width = -1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (skippable(line)) continue;
        const auto f = split_tabs(line);
        if (f.size() < 2) throw ParseError(where(path, lineno) + ": expected a label and coordinates");
        if (width < 0) width = static_cast<long>(f.size()) - 1;
        if (static_cast<long>(f.size()) - 1 != width) throw ParseError(where(path, lineno) + ": inconsistent dimension");
        auto& row = rows[static_cast<std::size_t>(index.at(f[0], path, lineno))];
        if (!row.empty()) throw ParseError(where(path, lineno) + ": duplicate label '" + f[0] + "'");
        for (std::size_t c = 1; c < f.size(); ++c) row.push_back(parse_double(f[c], path, lineno));
    }
    Coordinates z(static_cast<Eigen::Index>(labels.size()), std::max<long>(width, 0));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (rows[i].empty()) throw ParseError(path.string() + ": no coordinates for '" + labels[i] + "'");
        for (long l = 0; l < width; ++l) z(static_cast<Eigen::Index>(i), l) = rows[i][static_cast<std::size_t>(l)];
    }
    return z;
}

void write_coordinates(const fs::path& path, const std::vector<std::string>& labels, const Coordinates& z) {
    auto out = open_out(path);
    out << "# label";
    for (Eigen::Index l = 0; l < z.cols(); ++l) out << "\tdim" << (l + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        out << labels[static_cast<std::size_t>(i)];
        for (Eigen::Index l = 0; l < z.cols(); ++l) out << '\t' << format_double(z(i, l));
        out << '\n';
    }
}

BinaryMatrix read_borders_as_indicator(const fs::path& path, int nodes) {
    const Matrix coded = read_dense_matrix(path, nodes, nodes);
    BinaryMatrix out = BinaryMatrix::Zero(nodes, nodes);
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j) {
            if (i == j) continue;
            const double v = coded(i, j);
            if (v != 0.0 && v != 1.0) throw ParseError(path.string() + ": border entries must be 0 or 1");
            out(i, j) = v == 0.0 ? 1 : 0;
        }
    return out;
}

Dataset load_multiplex(const DatasetManifest& manifest) {
    Dataset data;
    Multiplex& m = data.multiplex;
    auto labels = read_labels(manifest.labels);
    if (labels.size() < 2) throw ParseError(manifest.labels.string() + ": need at least two node labels");
    const int K = static_cast<int>(manifest.networks.size());
    m = Multiplex::full_presence(std::move(labels), K);
    m.network_names = manifest.networks;
    const int n = m.nodes();
    const LabelIndex nodes(m.labels, "node");
    const LabelIndex nets(m.network_names, "network");

    {
        auto in = open_in(manifest.edges);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            strip_cr(line);
            if (skippable(line)) continue;
            const auto f = split_tabs(line);
            if (f.size() != 3) throw ParseError(where(manifest.edges, lineno) + ": expected network, source, target");
            const int k = network_index(nets, K, f[0], manifest.edges, lineno);
            const int i = nodes.at(f[1], manifest.edges, lineno);
            const int j = nodes.at(f[2], manifest.edges, lineno);
            if (i == j) throw ParseError(where(manifest.edges, lineno) + ": self loop on '" + f[1] + "'");
            m.y[static_cast<std::size_t>(k)](i, j) = 1;
        }
    }

    if (manifest.presence) {
        const fs::path& path = *manifest.presence;
        auto in = open_in(path);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            strip_cr(line);
            if (skippable(line)) continue;
            const auto f = split_tabs(line);
            if (f.size() < 3) throw ParseError(where(path, lineno) + ": expected network, kind, node");
            const int k = network_index(nets, K, f[0], path, lineno);
            const int i = nodes.at(f[2], path, lineno);
            auto& h = m.h[static_cast<std::size_t>(k)];
            if (f[1] == "absent" && f.size() == 3) {
                h.row(i).setZero();
                h.col(i).setZero();
            } else if (f[1] == "passive" && f.size() == 3) {
                h.col(i).setZero();
            } else if (f[1] == "blocked" && f.size() == 4) {
                h(i, nodes.at(f[3], path, lineno)) = 0;
            } else {
                throw ParseError(where(path, lineno) + ": unknown presence record '" + f[1] + "'");
            }
        }
    }
    m.validate();

    for (const auto& src : manifest.covariates) {
        Matrix x = src.format == MatrixFormat::dense ? read_dense_matrix(src.file, n, n) : read_long_matrix(src.file, m.labels);
        if (src.binary)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && x(i, j) != 0.0 && x(i, j) != 1.0)
                        throw ParseError("covariate '" + src.name + "' must be 0/1 valued");
        data.covariates.names.push_back(src.name);
        data.covariates.x.push_back(std::move(x));
    }
    data.covariates.validate(n);

    if (manifest.coordinates) data.coordinates = read_coordinates(*manifest.coordinates, m.labels);
    return data;
}

Dataset load_multiplex(const fs::path& manifest_path) { return load_multiplex(read_manifest(manifest_path)); }

fs::path save_dataset(const fs::path& dir, const Dataset& data) {
    const Multiplex& m = data.multiplex;
    m.validate();
    fs::create_directories(dir);
    const int n = m.nodes();
    const int K = m.networks();
    std::vector<std::string> names = m.network_names;
    if (names.size() != static_cast<std::size_t>(K)) {
        names.clear();
        for (int k = 0; k < K; ++k) names.push_back("net" + std::to_string(k + 1));
    }

    {
        auto out = open_out(dir / "labels.txt");
        for (const auto& l : m.labels) out << l << '\n';
    }
    {
        auto out = open_out(dir / "edges.tsv");
        out << "# network\tsource\ttarget\n";
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (m.y[static_cast<std::size_t>(k)](i, j))
                        out << names[static_cast<std::size_t>(k)] << '\t' << m.labels[static_cast<std::size_t>(i)] << '\t'
                            << m.labels[static_cast<std::size_t>(j)] << '\n';
    }
    {
        auto out = open_out(dir / "presence.tsv");
        out << "# network\tkind\tnode\ttarget\n";
        for (int k = 0; k < K; ++k) {
            const auto& h = m.h[static_cast<std::size_t>(k)];
            BinaryMatrix covered = BinaryMatrix::Ones(n, n);
            for (int i = 0; i < n; ++i) {
                bool row_empty = true;
                bool col_empty = true;
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    row_empty = row_empty && h(i, j) == 0;
                    col_empty = col_empty && h(j, i) == 0;
                }
                if (n < 2) continue;
                if (row_empty && col_empty) {
                    out << names[static_cast<std::size_t>(k)] << "\tabsent\t" << m.labels[static_cast<std::size_t>(i)] << '\n';
                    covered.row(i).setZero();
                    covered.col(i).setZero();
                } else if (col_empty) {
                    out << names[static_cast<std::size_t>(k)] << "\tpassive\t" << m.labels[static_cast<std::size_t>(i)] << '\n';
                    covered.col(i).setZero();
                }
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && h(i, j) == 0 && covered(i, j))
                        out << names[static_cast<std::size_t>(k)] << "\tblocked\t" << m.labels[static_cast<std::size_t>(i)]
                            << '\t' << m.labels[static_cast<std::size_t>(j)] << '\n';
        }
    }

    json manifest{{"labels", "labels.txt"}, {"networks", names}, {"edges", "edges.tsv"}, {"presence", "presence.tsv"}};
    json covs = json::array();
    for (int f = 0; f < data.covariates.count(); ++f) {
        const std::string file = "covariate_" + std::to_string(f + 1) + ".tsv";
        write_dense_matrix(dir / file, data.covariates.x[static_cast<std::size_t>(f)]);
        covs.push_back({{"name", data.covariates.names[static_cast<std::size_t>(f)]}, {"file", file}, {"format", "dense"}});
    }
    manifest["covariates"] = covs;
    if (data.coordinates) {
        write_coordinates(dir / "coordinates.tsv", m.labels, *data.coordinates);
        manifest["coordinates"] = "coordinates.tsv";
    }
    write_json(dir / "manifest.json", manifest);
    return dir / "manifest.json";
}

void write_chain(const fs::path& dir, const ChainFile& file) {
    const ChainOutput& c = file.chain;
    fs::create_directories(dir);
    const int n = static_cast<int>(file.labels.size());
    const int p = c.hyper.p;
    {
        auto out = open_out(dir / "draws.tsv");
        out << "iteration\tblock\tindex\tvalue\n";
        auto row = [&](long iter, const char* block, long index, const std::string& value) {
            out << iter << '\t' << block << '\t' << index << '\t' << value << '\n';
        };
        auto vec = [&](long iter, const char* block, const Vector& v) {
            for (Eigen::Index i = 0; i < v.size(); ++i) row(iter, block, i, format_double(v[i]));
        };
        for (std::size_t d = 0; d < c.draws.size(); ++d) {
            const ModelState& s = c.draws[d];
            const long it = c.iterations[d];
            vec(it, "alpha", s.alpha);
            vec(it, "beta", s.beta);
            vec(it, "lambda", s.lambda);
            row(it, "mu_alpha", 0, format_double(s.mu_alpha));
            row(it, "sigma2_alpha", 0, format_double(s.sigma2_alpha));
            row(it, "mu_beta", 0, format_double(s.mu_beta));
            row(it, "sigma2_beta", 0, format_double(s.sigma2_beta));
            vec(it, "mu_lambda", s.mu_lambda);
            vec(it, "sigma2_lambda", s.sigma2_lambda);
            for (int i = 0; i < s.nodes(); ++i)
                for (int l = 0; l < s.dims(); ++l) row(it, "z", static_cast<long>(i) * s.dims() + l, format_double(s.z(i, l)));
            row(it, "deviance", 0, format_double(c.deviance[d]));
            row(it, "reverted", 0, c.reverted[d] ? "1" : "0");
        }
    }
    json acc{{"network_accepted", c.acceptance.network_accepted},
             {"latent_accepted", c.acceptance.latent_accepted},
             {"lambda_accepted", c.acceptance.lambda_accepted},
             {"iterations", c.acceptance.iterations},
             {"sweeps", c.acceptance.sweeps},
             {"procrustes_reverts", c.acceptance.procrustes_reverts}};
    json meta{{"model", c.model == ModelKind::latent_space ? "latent_space" : "random_graph"},
              {"nodes", n},
              {"dims", p},
              {"networks", file.network_names.size()},
              {"covariates", file.covariate_names.size()},
              {"labels", file.labels},
              {"network_names", file.network_names},
              {"covariate_names", file.covariate_names},
              {"hyper", hyper_json(c.hyper)},
              {"acceptance", acc},
              {"draws", c.draws.size()}};
    write_json(dir / "chain.json", meta);
}

ChainFile read_chain(const fs::path& dir) {
    const json meta = read_json(dir / "chain.json");
    ChainFile file;
    ChainOutput& c = file.chain;
    int n = 0, p = 0, K = 0, F = 0;
    std::size_t expected = 0;
    try {
        file.labels = meta.at("labels").get<std::vector<std::string>>();
        file.network_names = meta.at("network_names").get<std::vector<std::string>>();
        file.covariate_names = meta.at("covariate_names").get<std::vector<std::string>>();
        c.hyper = hyper_from(meta.at("hyper"));
        c.model = meta.at("model").get<std::string>() == "random_graph" ? ModelKind::random_graph : ModelKind::latent_space;
        n = meta.at("nodes").get<int>();
        p = meta.at("dims").get<int>();
        K = meta.at("networks").get<int>();
        F = meta.at("covariates").get<int>();
        expected = meta.at("draws").get<std::size_t>();
        const json& acc = meta.at("acceptance");
        c.acceptance.network_accepted = acc.at("network_accepted").get<std::vector<long>>();
        c.acceptance.latent_accepted = acc.at("latent_accepted").get<std::vector<long>>();
        c.acceptance.lambda_accepted = acc.at("lambda_accepted").get<std::vector<long>>();
        c.acceptance.iterations = acc.at("iterations").get<long>();
        c.acceptance.sweeps = acc.at("sweeps").get<long>();
        c.acceptance.procrustes_reverts = acc.at("procrustes_reverts").get<long>();
    } catch (const json::exception& e) {
        throw ParseError((dir / "chain.json").string() + ": " + e.what());
    }

    auto blank = [&] {
        ModelState s;
        s.z = Coordinates::Zero(n, p);
        s.alpha = Vector::Zero(K);
        s.beta = Vector::Zero(K);
        s.lambda = Vector::Zero(F);
        s.mu_lambda = Vector::Zero(F);
        s.sigma2_lambda = Vector::Zero(F);
        return s;
    };
    const fs::path path = dir / "draws.tsv";
    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    long current = -1;
    c.draws.reserve(expected);
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (lineno == 1 || skippable(line)) continue;
        const auto f = split_tabs(line);
        if (f.size() != 4) throw ParseError(where(path, lineno) + ": expected iteration, block, index, value");
        const long iter = parse_long(f[0], path, lineno);
        if (iter != current) {
            c.draws.push_back(blank());
            c.iterations.push_back(iter);
            c.deviance.push_back(0.0);
            c.reverted.push_back(0);
            current = iter;
        }
        ModelState& s = c.draws.back();
        const long idx = parse_long(f[2], path, lineno);
        const std::string& block = f[1];
        const double v = parse_double(f[3], path, lineno);
        auto put = [&](Vector& target) {
            if (idx < 0 || idx >= target.size()) throw ParseError(where(path, lineno) + ": index out of range");
            target[idx] = v;
        };
        if (block == "alpha") put(s.alpha);
        else if (block == "beta") put(s.beta);
        else if (block == "lambda") put(s.lambda);
        else if (block == "mu_lambda") put(s.mu_lambda);
        else if (block == "sigma2_lambda") put(s.sigma2_lambda);
        else if (block == "mu_alpha") s.mu_alpha = v;
        else if (block == "sigma2_alpha") s.sigma2_alpha = v;
        else if (block == "mu_beta") s.mu_beta = v;
        else if (block == "sigma2_beta") s.sigma2_beta = v;
        else if (block == "deviance") c.deviance.back() = v;
        else if (block == "reverted") c.reverted.back() = v != 0.0 ? 1 : 0;
        else if (block == "z") {
            if (idx < 0 || idx >= static_cast<long>(n) * p) throw ParseError(where(path, lineno) + ": index out of range");
            s.z(idx / p, idx % p) = v;
        } else {
            throw ParseError(where(path, lineno) + ": unknown block '" + block + "'");
        }
    }
    if (c.draws.size() != expected)
        throw ParseError(path.string() + ": expected " + std::to_string(expected) + " draws, found " + std::to_string(c.draws.size()));
    return file;
}

void write_truth(const fs::path& path, const GroundTruth& truth) {
    json j{{"labels", truth.multiplex.labels},
           {"z", coordinates_json(truth.z)},
           {"alpha", vector_json(truth.alpha)},
           {"beta", vector_json(truth.beta)},
           {"lambda", vector_json(truth.lambda)},
           {"inclusion_weights", vector_json(truth.inclusion_weights)}};
    write_json(path, j);
}

GroundTruth read_truth(const fs::path& path) {
    const json j = read_json(path);
    GroundTruth t;
    try {
        t.multiplex.labels = j.at("labels").get<std::vector<std::string>>();
        t.z = coordinates_from(j.at("z"));
        t.alpha = vector_from(j.at("alpha"));
        t.beta = vector_from(j.at("beta"));
        t.lambda = vector_from(j.value("lambda", json::array()));
        t.inclusion_weights = vector_from(j.value("inclusion_weights", json::array()));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (t.z.rows() != static_cast<Eigen::Index>(t.multiplex.labels.size()))
        throw ParseError(path.string() + ": coordinate rows do not match the labels");
    return t;
}

void write_summary(const fs::path& path, const PosteriorSummary& s, const ChainFile& file,
                   const std::optional<DicParts>& dic) {
    json j{{"draws", s.draws},
           {"alpha", mean_sd_json(s.alpha, file.network_names)},
           {"beta", mean_sd_json(s.beta, file.network_names)},
           {"lambda", mean_sd_json(s.lambda, file.covariate_names)},
           {"mu_alpha", mean_sd_json(s.mu_alpha)},
           {"sigma2_alpha", mean_sd_json(s.sigma2_alpha)},
           {"mu_beta", mean_sd_json(s.mu_beta)},
           {"sigma2_beta", mean_sd_json(s.sigma2_beta)},
           {"mu_lambda", mean_sd_json(s.mu_lambda, file.covariate_names)},
           {"sigma2_lambda", mean_sd_json(s.sigma2_lambda, file.covariate_names)}};
    const auto& acc = file.chain.acceptance;
    if (acc.iterations > 0) {
        json rates = json::object();
        json net = json::array();
        for (long a : acc.network_accepted) net.push_back(static_cast<double>(a) / acc.iterations);
        rates["network"] = net;
        if (acc.sweeps > 0) {
            long total = 0;
            for (long a : acc.latent_accepted) total += a;
            rates["latent_mean"] = static_cast<double>(total) / (static_cast<double>(acc.sweeps) * std::max<std::size_t>(1, acc.latent_accepted.size()));
            rates["procrustes_reverts"] = static_cast<double>(acc.procrustes_reverts) / acc.sweeps;
        }
        json lam = json::array();
        for (long a : acc.lambda_accepted) lam.push_back(static_cast<double>(a) / acc.iterations);
        rates["lambda"] = lam;
        j["acceptance_rates"] = rates;
    }
    if (dic)
        j["dic"] = {{"dic", dic->dic},
                    {"mean_deviance", dic->mean_deviance},
                    {"deviance_at_mean", dic->deviance_at_mean},
                    {"effective_parameters", dic->effective_parameters}};
    write_json(path, j);
}

std::string hyper_to_json(const HyperConfig& hyper) { return hyper_json(hyper).dump(); }

HyperConfig hyper_from_json(const std::string& text) {
    try {
        return hyper_from(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string("hyperparameters: ") + e.what());
    }
}

}  // namespace lsmmn
