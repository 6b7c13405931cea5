#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rfk/geometry.hpp"

namespace rfk::harness {

/// Everything a subcommand reads. Field names double as flag names and as
/// keys of the `key=value` config file.
struct ExperimentConfig {
    /// Subcommand path, e.g. {"verify", "theorem1"} or {"sweep", "nu1"}.
    std::vector<std::string> command;

    /// Polygon file; when empty the domain is spherical: Ball if R0 = 0,
    /// concentric if e = 0, eccentric otherwise.
    std::string polygon;
    double R0 = 0.5;
    double R1 = 2.0;
    double e = 0.0;
    int N = 2;
    double p = 2.0;

    /// outer | inner | both (both only for profile, maps, nagy, lemmas, theorem3).
    std::string side = "outer";
    std::string inner_bc = "neumann";
    std::string outer_bc = "dirichlet";
    double k = 1.0;
    /// first | second (radial).
    std::string mode = "first";

    /// exact | mc | polygon; empty picks polygon for polygons, exact otherwise.
    std::string profile_method;
    std::size_t profile_grid = 2048;
    std::size_t polygon_grid = 512;
    std::size_t field_resolution = 1024;
    std::size_t samples = 1'000'000;
    std::size_t radial_nodes = 4097;
    double radial_tol = 1e-10;
    std::optional<double> lower_anchor;

    double h = 0.04;
    /// outer | inner | both | none
    std::string dirichlet = "outer";
    /// first | second_neumann
    std::string eigen_mode = "first";
    /// cholesky | pcg
    std::string solver = "cholesky";

    std::string which = "mu2";
    double shift = 0.05;
    double nodal_tolerance = 1e-6;

    std::string axis = "e";
    double from = 0.0;
    double to = 1.0;
    std::size_t steps = 5;
    std::size_t jobs = 1;

    std::uint64_t seed = 1;
    /// Empty: $RFK_OUTPUT_DIR, else ./rfk_out.
    std::string output_dir;
};

/// Echo of the settings that determine every emitted number.
nlohmann::json to_json(const ExperimentConfig& config);

/// Domain described by the config (polygon file, ball or annulus).
geometry::DomainSpec make_domain(const ExperimentConfig& config);

std::string default_output_dir();

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

struct ArtifactFile {
    /// Relative to the output directory.
    std::string path;
    std::string sha256;
    std::size_t bytes = 0;
    bool stale = false;
};

struct RunResult {
    /// 0: every verdict holds; 2: some verdict Violated; 1: execution error.
    int exit_code = 0;
    std::vector<ArtifactFile> files;
    std::string manifest_path;
    std::string error;
    /// Verdict summaries, one line per report.
    std::vector<std::string> summary;
};

/// Runs one subcommand, writes its artifacts and `manifest.json` (schema 1).
/// On error every file already written is marked stale.
RunResult run(const ExperimentConfig& config);

/// Column header of `sweep <quantity>` for an axis.
std::string sweep_header(const std::string& quantity, const std::string& axis);

/// Parses flags (and an optional `--config` file), runs, prints summaries.
int main_entry(int argc, const char* const* argv);

} // namespace rfk::harness
