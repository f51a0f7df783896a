#pragma once

// Scenario runner: simulate, analyse and write artifacts for single runs and
// parameter sweeps.

#include "rkm/config.hpp"
#include "rkm/integrator.hpp"
#include "rkm/report_json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rkm::experiment {

/// Scenario names accepted in configs and plans.
const std::vector<std::string>& scenarios();

enum class TrajectoryFormat { csv, json };

TrajectoryFormat format_from_string(const std::string& s);

struct RunOptions {
    std::optional<std::uint64_t> seedOverride;
    std::optional<integrator::Scheme> schemeOverride;
    TrajectoryFormat format = TrajectoryFormat::csv;
    /// Worker threads for sweeps; 0 uses the hardware concurrency.
    int jobs = 0;
};

/// Runs one parameter point of any scenario and writes its artifacts into
/// `dir` (created if needed). Returns the report JSON, which carries a
/// boolean "success" for the scenario's main verdict.
report::Json run_point(const config::KeyValues& kv, const std::filesystem::path& dir, const RunOptions& opts);

struct RunRecord {
    int index = 0;
    config::KeyValues params;
    std::string status;  // "ok" or "failed"
    std::string error;
    std::string dir;     // relative to the output directory
    report::Json report;
};

struct SweepResult {
    std::vector<RunRecord> runs;
    report::Json index;
    report::Json summary;
    bool allOk = true;
};

/// Expands the plan, runs every point on a worker pool (errors are recorded
/// per run), then writes index.json and summary.json into outDir.
SweepResult run_plan(const config::ExperimentPlan& plan, const std::filesystem::path& outDir,
                     const RunOptions& opts);

/// Success fraction, median and interquartile range of fitted rates and
/// terminal deviations over the runs.
report::Json seed_sweep_summary(const std::vector<RunRecord>& runs);

/// Rate-bound report: hypotheses, E N estimate, assembled bound and the
/// truncated basin radius.
report::Json rate_bound_report(const config::RunSettings& s);

/// Keys: hurst, m, steps, samples, p, seed, identicalComponents.
report::Json fbm_test_report(const config::KeyValues& kv);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace rkm::experiment
