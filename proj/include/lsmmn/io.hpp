#pragma once

#include "lsmmn/diagnostics.hpp"
#include "lsmmn/sampler.hpp"
#include "lsmmn/simulate.hpp"
#include "lsmmn/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lsmmn {

namespace fs = std::filesystem;

enum class MatrixFormat { dense, long_format };

struct CovariateSource {
    std::string name;
    fs::path file;
    MatrixFormat format = MatrixFormat::dense;
    bool binary = false;
};

/// Dataset description. Relative paths are resolved against the manifest's directory.
///
/// labels:      one node label per line
/// edges:       network <TAB> source <TAB> target, one directed edge per line
/// presence:    network <TAB> kind <TAB> node [<TAB> target], kind one of
///              absent (node neither sends nor receives), passive (node cannot receive),
///              blocked (the single dyad node -> target is ineligible)
/// covariates:  dense (n rows of n numbers in label order) or long (source, target, value)
/// coordinates: label <TAB> c1 ... cq
/// Blank lines and lines starting with '#' are ignored everywhere.
struct DatasetManifest {
    fs::path base;
    fs::path labels;
    std::vector<std::string> networks;
    fs::path edges;
    std::optional<fs::path> presence;
    std::vector<CovariateSource> covariates;
    std::optional<fs::path> coordinates;
};

struct Dataset {
    Multiplex multiplex;
    CovariateSet covariates;
    std::optional<Coordinates> coordinates;
};

DatasetManifest read_manifest(const fs::path& path);
Dataset load_multiplex(const DatasetManifest& manifest);
Dataset load_multiplex(const fs::path& manifest_path);

/// Writes manifest.json and its data files into `dir` and returns the manifest path.
fs::path save_dataset(const fs::path& dir, const Dataset& data);

/// Shortest text that reads back to the same double (17 significant digits at most).
std::string format_double(double x);

Matrix read_dense_matrix(const fs::path& path, int rows, int cols);
void write_dense_matrix(const fs::path& path, const Matrix& x);
Matrix read_long_matrix(const fs::path& path, const std::vector<std::string>& labels);

Coordinates read_coordinates(const fs::path& path, const std::vector<std::string>& labels);
void write_coordinates(const fs::path& path, const std::vector<std::string>& labels, const Coordinates& z);

/// Reads a dense border file in the model coding (0 = shared border) and returns 1 = shared border
/// with a zero diagonal.
BinaryMatrix read_borders_as_indicator(const fs::path& path, int nodes);

struct ChainFile {
    ChainOutput chain;
    std::vector<std::string> labels;
    std::vector<std::string> network_names;
    std::vector<std::string> covariate_names;
};

/// draws.tsv (iteration, block, index, value) plus chain.json (settings and acceptance counts).
void write_chain(const fs::path& dir, const ChainFile& file);
ChainFile read_chain(const fs::path& dir);

void write_truth(const fs::path& path, const GroundTruth& truth);
GroundTruth read_truth(const fs::path& path);

/// Summary document with means, standard deviations and optional DIC.
void write_summary(const fs::path& path, const PosteriorSummary& summary, const ChainFile& file,
                   const std::optional<DicParts>& dic);

std::string hyper_to_json(const HyperConfig& hyper);
HyperConfig hyper_from_json(const std::string& text);

}  // namespace lsmmn
