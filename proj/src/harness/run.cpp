#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "internal.hpp"
#include "rfk/io.hpp"
#include "rfk/polygon.hpp"

namespace rfk::harness {

namespace fs = std::filesystem;

namespace detail {

Sink::Sink(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void Sink::write(const std::string& relative, const std::string& content) {
    const fs::path path = root_ / relative;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    ArtifactFile f;
    f.path = relative;
    f.bytes = content.size();
    f.sha256 = sha256_hex(content);
    {
        // Recorded first so that a failed write still shows up as stale.
        const std::lock_guard<std::mutex> lock(mutex_);
        files_.push_back(f);
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw InvalidInput("cannot write " + path.string());
}

void Sink::write_json(const std::string& relative, const nlohmann::json& j) { write(relative, j.dump(2) + "\n"); }

std::string Sink::read(const std::string& relative) const {
    std::ifstream in(root_ / relative, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + (root_ / relative).string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void Sink::verdict(const std::string& label, const VerificationReport& report) {
    const std::lock_guard<std::mutex> lock(mutex_);
    if (report.verdict == Verdict::Violated) violated_ = true;
    summary_.push_back(label + ": " + to_string(report.verdict) + " (worst margin " + io::fmt(report.worst_margin) +
                       ", tolerance " + io::fmt(report.tolerance) + ")");
}

nlohmann::json with_settings(nlohmann::json j, const ExperimentConfig& config) {
    j["settings"] = to_json(config);
    return j;
}

geometry::Side parse_side(const std::string& name) { return geometry::side_from_string(name); }

std::vector<geometry::Side> sides(const ExperimentConfig& config) {
    if (config.side == "both") return {geometry::Side::FromOuter, geometry::Side::FromInner};
    return {parse_side(config.side)};
}

} // namespace detail

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["command"] = c.command;
    j["domain"] = {{"polygon", c.polygon}, {"R0", c.R0}, {"R1", c.R1}, {"e", c.e}};
    j["params"] = {{"N", c.N}, {"p", c.p}};
    j["side"] = c.side;
    j["boundary"] = {{"inner", c.inner_bc}, {"outer", c.outer_bc}, {"k", c.k}, {"mode", c.mode}};
    j["grids"] = {{"profile_method", c.profile_method}, {"profile_grid", c.profile_grid},
                  {"polygon_grid", c.polygon_grid},     {"field_resolution", c.field_resolution},
                  {"samples", c.samples},               {"radial_nodes", c.radial_nodes},
                  {"h", c.h}};
    j["tolerances"] = {{"radial_tol", c.radial_tol}, {"nodal_tolerance", c.nodal_tolerance}};
    j["lower_anchor"] = c.lower_anchor ? nlohmann::json(*c.lower_anchor) : nlohmann::json(nullptr);
    j["oracle"] = {{"dirichlet", c.dirichlet}, {"eigen_mode", c.eigen_mode}, {"solver", c.solver}};
    j["nodal"] = {{"which", c.which}, {"shift", c.shift}};
    j["sweep"] = {{"axis", c.axis}, {"from", c.from}, {"to", c.to}, {"steps", c.steps}};
    j["seed"] = c.seed;
    return j;
}

geometry::DomainSpec make_domain(const ExperimentConfig& c) {
    using namespace geometry;
    if (!c.polygon.empty()) {
        if (c.N != 2) throw InvalidInput("polygon domains need N = 2");
        return DomainSpec(polygon::read_file(c.polygon), 2);
    }
    if (c.R0 == 0.0) {
        if (c.e != 0.0) throw InvalidInput("a ball has no offset e");
        return DomainSpec(Ball{c.R1}, c.N);
    }
    if (c.e == 0.0) return DomainSpec(ConcentricAnnulus{c.R0, c.R1}, c.N);
    return DomainSpec(EccentricAnnulus{c.R0, c.R1, c.e}, c.N);
}

std::string default_output_dir() {
    const char* env = std::getenv("RFK_OUTPUT_DIR");
    return env && *env ? std::string(env) : std::string("rfk_out");
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalFailure("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

namespace {

void dispatch(const ExperimentConfig& c, detail::Sink& sink) {
    if (c.command.empty()) throw InvalidInput("no subcommand given");
    const std::string& head = c.command.front();
    if (head == "radial") return detail::run_radial(c, sink);
    if (head == "profile") return detail::run_profile(c, sink);
    if (head == "maps") return detail::run_maps(c, sink);
    if (head == "verify") return detail::run_verify(c, sink);
    if (head == "oracle2d") return detail::run_oracle2d(c, sink);
    if (head == "nodal") return detail::run_nodal(c, sink);
    if (head == "elasticity") return detail::run_elasticity(c, sink);
    if (head == "sweep") return detail::run_sweep(c, sink);
    throw InvalidInput("unknown subcommand '" + head + "'");
}

std::string joined(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& s : parts) out += (out.empty() ? "" : " ") + s;
    return out;
}

} // namespace

RunResult run(const ExperimentConfig& config) {
    RunResult result;
    const fs::path root = config.output_dir.empty() ? fs::path(default_output_dir()) : fs::path(config.output_dir);
    std::unique_ptr<detail::Sink> sink;
    try {
        sink = std::make_unique<detail::Sink>(root);
        dispatch(config, *sink);
        result.exit_code = sink->violated() ? 2 : 0;
    } catch (const std::exception& ex) {
        result.exit_code = 1;
        result.error = ex.what();
    }
    if (!sink) return result;
    auto& files = sink->files();
    std::sort(files.begin(), files.end(), [](const ArtifactFile& a, const ArtifactFile& b) { return a.path < b.path; });
    if (result.exit_code == 1)
        for (auto& f : files) f.stale = true;
    nlohmann::json manifest;
    manifest["schema"] = 1;
    manifest["command"] = joined(config.command);
    manifest["status"] = result.exit_code == 1 ? "failed" : "complete";
    manifest["exit_code"] = result.exit_code;
    if (result.exit_code == 1) manifest["error"] = result.error;
    manifest["settings"] = to_json(config);
    manifest["summary"] = sink->summary();
    nlohmann::json list = nlohmann::json::array();
    for (const auto& f : files)
        list.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}, {"stale", f.stale}});
    manifest["files"] = list;
    const fs::path mpath = root / "manifest.json";
    std::ofstream(mpath, std::ios::binary) << manifest.dump(2) << "\n";
    result.files = files;
    result.manifest_path = mpath.string();
    result.summary = sink->summary();
    return result;
}

int main_entry(int argc, const char* const* argv) {
    CLI::App app{"Transplant bounds for mixed p-Laplacian eigenvalues"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_config("--config", "", "key=value file; flags given on the command line win");
    app.require_subcommand(1);
    app.fallthrough();
    ExperimentConfig c;

    app.add_option("--polygon", c.polygon, "Polygon file (loop count, then per loop n and x y lines)");
    app.add_option("--R0", c.R0, "Inner radius (0 for a ball)");
    app.add_option("--R1", c.R1, "Outer radius");
    app.add_option("--e", c.e, "Offset of the hole centre along x_1");
    app.add_option("--N", c.N, "Dimension");
    app.add_option("--p", c.p, "Exponent p > 1");
    app.add_option("--side", c.side, "outer | inner | both");
    app.add_option("--inner-bc", c.inner_bc, "dirichlet | neumann | robin");
    app.add_option("--outer-bc", c.outer_bc, "dirichlet | neumann | robin");
    app.add_option("--k", c.k, "Robin elasticity constant");
    app.add_option("--mode", c.mode, "first | second");
    app.add_option("--profile-method", c.profile_method, "exact | mc | polygon");
    app.add_option("--profile-grid", c.profile_grid);
    app.add_option("--polygon-grid", c.polygon_grid);
    app.add_option("--field-resolution", c.field_resolution);
    app.add_option("--samples", c.samples, "Monte Carlo samples");
    app.add_option("--radial-nodes", c.radial_nodes, "Odd number of radial output nodes");
    app.add_option("--radial-tol", c.radial_tol);
    app.add_option("--lower-anchor", c.lower_anchor, "Independent lower bound checked against the quotient");
    app.add_option("--h", c.h, "Target mesh edge length");
    app.add_option("--dirichlet", c.dirichlet, "outer | inner | both | none");
    app.add_option("--eigen-mode", c.eigen_mode, "first | second_neumann");
    app.add_option("--solver", c.solver, "cholesky | pcg");
    app.add_option("--which", c.which, "mu2 | nu2 | tau2");
    app.add_option("--shift", c.shift, "Nodal split shift s");
    app.add_option("--nodal-tolerance", c.nodal_tolerance);
    app.add_option("--axis", c.axis, "e | p | R0 | R1 | k | shift | h");
    app.add_option("--from", c.from);
    app.add_option("--to", c.to);
    app.add_option("--steps", c.steps);
    app.add_option("--jobs", c.jobs, "Concurrent sweep points");
    app.add_option("--seed", c.seed);
    app.add_option("--out", c.output_dir, "Output directory (default $RFK_OUTPUT_DIR or ./rfk_out)");

    std::string target;
    app.add_subcommand("radial", "Solve one radial eigenproblem");
    app.add_subcommand("profile", "Emit a parallel-set profile");
    app.add_subcommand("maps", "Emit the parameter maps");
    auto* verify = app.add_subcommand("verify", "Run one check");
    verify->add_option("check", target, "theorem1 | theorem2 | theorem3 | nagy | iso | lemmas")
        ->required()
        ->check(CLI::IsMember({"theorem1", "theorem2", "theorem3", "nagy", "iso", "lemmas"}));
    app.add_subcommand("oracle2d", "Planar finite element eigensolve");
    auto* nodal = app.add_subcommand("nodal", "Nodal-sphere experiments");
    nodal->add_option("action", target, "candidate | counterexample")
        ->required()
        ->check(CLI::IsMember({"candidate", "counterexample"}));
    auto* sweep = app.add_subcommand("sweep", "Scalar output against one axis");
    sweep->add_option("quantity", target, "nu1 | tau1 | elasticity | radial | nodal | iso")
        ->required()
        ->check(CLI::IsMember({"nu1", "tau1", "elasticity", "radial", "nodal", "iso"}));
    app.add_subcommand("elasticity", "Robin outer condition transplant check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    for (const auto* sub : app.get_subcommands()) {
        c.command.push_back(sub->get_name());
        if (!target.empty()) c.command.push_back(target);
    }
    const RunResult r = run(c);
    for (const auto& line : r.summary) std::cout << line << "\n";
    if (r.exit_code == 1) std::cerr << "error: " << r.error << "\n";
    std::cout << "manifest: " << r.manifest_path << "\n";
    return r.exit_code;
}

} // namespace rfk::harness
