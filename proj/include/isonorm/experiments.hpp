#pragma once

#include "isonorm/json_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace isonorm {

/// One verdict line of an experiment report. `threshold` is the allowed
/// deviation (SE units unless the check says otherwise in `details`);
/// report-only checks carry threshold 0 and never fail.
struct CheckRecord {
    std::string name;
    std::string anchor;
    double value = 0.0;
    double se = 0.0;
    double threshold = 0.0;
    std::string verdict; // "pass" | "fail" | "report-only"
    std::int64_t count = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string details;
};

struct ExperimentReport {
    std::string experiment;
    std::string anchor;
    std::uint64_t seed = 0;
    Json config_echo;
    std::vector<CheckRecord> checks;
    std::vector<std::string> artifacts; // files written next to report.json
    Json extra;                         // experiment-specific payload (e.g. T*)
    std::string error;                  // set when the run aborted mid-way

    int failures() const;
};

struct RegistryEntry {
    std::string name;
    std::string anchor;
    std::string summary;
};

const std::vector<RegistryEntry>& registry_list();

Json report_to_json(const ExperimentReport& report);

/// Run a config file end to end, writing report.json, a timing sidecar and
/// any CSV artifacts into the config's output_dir. Exit codes: 0 all checks
/// pass, 1 fail verdicts, 2 config/schema error, 3 runtime error (partial
/// report persisted).
int run_experiment(const std::string& config_path);

/// In-process variant (used by tests and the file front-end): same semantics,
/// parsed config in, report out.
int run_experiment_config(const nlohmann::json& config, const std::filesystem::path& out_dir,
                          ExperimentReport& report);

} // namespace isonorm
