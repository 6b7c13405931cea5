#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rfk/harness.hpp"

using namespace rfk;
using namespace rfk::harness;
namespace fs = std::filesystem;

namespace {

std::string data(const char* name) { return std::string(RFK_TEST_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rfk_harness_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json manifest(const RunResult& r) { return nlohmann::json::parse(slurp(r.manifest_path)); }

ExperimentConfig config(std::vector<std::string> command, const fs::path& out) {
    ExperimentConfig c;
    c.command = std::move(command);
    c.output_dir = out.string();
    return c;
}

std::vector<std::vector<double>> read_csv(const std::string& text, std::string& header) {
    std::istringstream in(text);
    std::getline(in, header);
    std::vector<std::vector<double>> rows;
    for (std::string line; std::getline(in, line);) {
        std::vector<double> row;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST_CASE("sha256 test vectors") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("verify theorem1 writes a report and a manifest") {
    const fs::path out = scratch("theorem1");
    ExperimentConfig c = config({"verify", "theorem1"}, out);
    c.R0 = 0.5;
    c.R1 = 2.0;
    c.e = 1.0;
    c.N = 3;
    c.p = 2.0;
    const RunResult r = run(c);
    REQUIRE(r.exit_code == 0);
    const auto m = manifest(r);
    CHECK(m["schema"] == 1);
    CHECK(m["status"] == "complete");
    REQUIRE(m["files"].size() == 1);
    const auto& f = m["files"][0];
    CHECK(f["stale"] == false);
    const std::string body = slurp(out / f["path"].get<std::string>());
    CHECK(f["sha256"] == sha256_hex(body));
    const auto rep = nlohmann::json::parse(body);
    CHECK(rep["verdict"] == "Holds");
    CHECK(rep["check"] == "theorem1");
    CHECK(rep["settings"]["seed"] == 1);
    CHECK(rep["settings"]["grids"]["profile_grid"] == 2048);
}

TEST_CASE("outputs are byte-identical across runs") {
    ExperimentConfig c = config({"verify", "theorem2"}, scratch("det_a"));
    c.e = 0.75;
    const RunResult a = run(c);
    c.output_dir = scratch("det_b").string();
    const RunResult b = run(c);
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].sha256 == b.files[i].sha256);
    CHECK(slurp(a.manifest_path) == slurp(b.manifest_path));
}

TEST_CASE("nu1 sweep is strictly decreasing and independent of jobs") {
    ExperimentConfig c = config({"sweep", "nu1"}, scratch("sweep_1"));
    c.axis = "e";
    c.from = 0.0;
    c.to = 1.2;
    c.steps = 7;
    c.N = 2;
    c.p = 2.0;
    c.h = 0.08;
    const RunResult one = run(c);
    REQUIRE(one.exit_code == 0);
    c.jobs = 3;
    c.output_dir = scratch("sweep_3").string();
    const RunResult three = run(c);
    REQUIRE(three.exit_code == 0);
    const std::string a = slurp(fs::path(one.manifest_path).parent_path() / "sweep_nu1.csv");
    const std::string b = slurp(fs::path(three.manifest_path).parent_path() / "sweep_nu1.csv");
    CHECK(a == b);
    std::string header;
    const auto rows = read_csv(a, header);
    CHECK(header == "e,nu1_oracle,transplant_quotient,reference");
    REQUIRE(rows.size() == 7);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] < rows[i - 1][1]);
    for (const auto& row : rows) CHECK(row[2] <= row[3] * (1.0 + 1e-8));
}

TEST_CASE("a failing point marks partial outputs stale") {
    ExperimentConfig c = config({"sweep", "nu1"}, scratch("stale"));
    c.axis = "e";
    c.from = 0.5;
    c.to = 1.5;
    c.steps = 3;
    c.N = 3;
    const RunResult r = run(c);
    CHECK(r.exit_code == 1);
    const auto m = manifest(r);
    CHECK(m["status"] == "failed");
    CHECK(m.contains("error"));
    REQUIRE(m["files"].size() >= 1);
    for (const auto& f : m["files"]) CHECK(f["stale"] == true);
}

TEST_CASE("a violated verdict exits with 2") {
    ExperimentConfig c = config({"verify", "theorem1"}, scratch("violated"));
    c.e = 0.5;
    c.lower_anchor = 10.0;
    CHECK(run(c).exit_code == 2);
}

TEST_CASE("nagy on the square with a hole") {
    ExperimentConfig c = config({"verify", "nagy"}, scratch("nagy"));
    c.polygon = data("square_hole.txt");
    const RunResult r = run(c);
    CHECK(r.exit_code == 0);
    CHECK(r.summary.size() == 1);
}

TEST_CASE("command line, config file and environment") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    const fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg) << "# radial problem\nR0=1\nR1=2\nN=2\np=3\nouter-bc=neumann\ninner-bc=dirichlet\n";
    const std::string out = (dir / "out").string();
    const std::string cfg_s = cfg.string();
    const char* argv[] = {"rfk", "radial", "--config", cfg_s.c_str(), "--p", "2", "--out", out.c_str()};
    REQUIRE(main_entry(8, argv) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "out" / "radial.json"));
    CHECK(j["settings"]["params"]["p"] == 2.0);
    CHECK(j["settings"]["domain"]["R0"] == 1.0);
    CHECK(j["settings"]["boundary"]["inner"] == "dirichlet");

    const char* bad[] = {"rfk", "verify", "theorem9"};
    CHECK(main_entry(3, bad) == 1);

    const std::string env_dir = (dir / "env").string();
    ::setenv("RFK_OUTPUT_DIR", env_dir.c_str(), 1);
    CHECK(default_output_dir() == env_dir);
    ExperimentConfig c;
    c.command = {"nodal", "candidate"};
    c.R0 = 0.0;
    c.R1 = 1.0;
    const RunResult r = run(c);
    ::unsetenv("RFK_OUTPUT_DIR");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(fs::path(env_dir) / "nodal_candidate.json"));
    CHECK(default_output_dir() == "rfk_out");
}

TEST_CASE("every subcommand produces its artifacts") {
    struct Case {
        std::vector<std::string> command;
        std::vector<std::string> files;
    };
    const std::vector<Case> cases = {
        {{"profile"}, {"profile_outer.csv", "profile_outer.json"}},
        {{"maps"}, {"maps_outer.csv", "maps_outer.json"}},
        {{"verify", "iso"}, {"verify_iso_outer.json"}},
        {{"verify", "lemmas"}, {"verify_lemmas_outer.json"}},
        {{"oracle2d"}, {"mesh.txt", "oracle.json", "oracle_values.csv"}},
        {{"elasticity"}, {"elasticity.json"}},
        {{"radial"}, {"radial.csv", "radial.json"}},
    };
    for (const auto& k : cases) {
        ExperimentConfig c = config(k.command, scratch("cmd_" + k.command.back()));
        c.e = 0.5;
        c.h = 0.1;
        const RunResult r = run(c);
        CHECK_MESSAGE(r.exit_code == 0, k.command.back(), " ", r.error);
        std::vector<std::string> names;
        for (const auto& f : r.files) names.push_back(f.path);
        CHECK(names == k.files);
    }
}

TEST_CASE("nodal counterexample from the harness") {
    ExperimentConfig c = config({"nodal", "counterexample"}, scratch("nodal"));
    c.R0 = 0.0;
    c.R1 = 1.0;
    c.which = "mu2";
    c.shift = 0.1;
    const RunResult r = run(c);
    CHECK(r.exit_code == 0);
    const auto rep = nlohmann::json::parse(slurp(fs::path(r.manifest_path).parent_path() / r.files[0].path));
    CHECK(rep["verdict"] == "Holds");
}
