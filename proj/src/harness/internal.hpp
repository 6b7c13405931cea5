#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "rfk/harness.hpp"
#include "rfk/report.hpp"

namespace rfk::harness::detail {

/// Writes artifacts below one directory and remembers their digests.
class Sink {
public:
    explicit Sink(std::filesystem::path root);

    void write(const std::string& relative, const std::string& content);
    void write_json(const std::string& relative, const nlohmann::json& j);
    std::string read(const std::string& relative) const;
    const std::filesystem::path& root() const { return root_; }
    std::vector<ArtifactFile>& files() { return files_; }

    /// Records a verdict; Violated raises the exit code to 2.
    void verdict(const std::string& label, const VerificationReport& report);
    void note(const std::string& line) { summary_.push_back(line); }
    bool violated() const { return violated_; }
    const std::vector<std::string>& summary() const { return summary_; }

private:
    mutable std::mutex mutex_;
    std::filesystem::path root_;
    std::vector<ArtifactFile> files_;
    std::vector<std::string> summary_;
    bool violated_ = false;
};

/// Attaches the config echo to a JSON artifact.
nlohmann::json with_settings(nlohmann::json j, const ExperimentConfig& config);

geometry::Side parse_side(const std::string& name);
/// `both` expands to outer then inner.
std::vector<geometry::Side> sides(const ExperimentConfig& config);

void run_radial(const ExperimentConfig& config, Sink& sink);
void run_profile(const ExperimentConfig& config, Sink& sink);
void run_maps(const ExperimentConfig& config, Sink& sink);
void run_verify(const ExperimentConfig& config, Sink& sink);
void run_oracle2d(const ExperimentConfig& config, Sink& sink);
void run_nodal(const ExperimentConfig& config, Sink& sink);
void run_elasticity(const ExperimentConfig& config, Sink& sink);
void run_sweep(const ExperimentConfig& config, Sink& sink);

} // namespace rfk::harness::detail
