#ifndef MMHM_RUN_HPP
#define MMHM_RUN_HPP

#include "mmhm/analysis.hpp"
#include "mmhm/io.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mmhm {

struct MonitorOptions {
    bool verify = false;
    std::optional<ZScoreMode> zscore;
    std::optional<std::uint32_t> k;
    std::optional<double> p;
    unsigned threads = 1;
    std::optional<fs::path> out_dir; // default: the manifest's directory
};

struct MonitorSummary {
    fs::path out_dir;
    std::size_t epochs = 0;
    ZScoreMode zscore = ZScoreMode::Causal;
};

/// Runs the monitor over a manifest and writes metrics.csv (flushed per
/// epoch), metrics.json and the monitor.log sidecar into the output
/// directory. On failure the CSV keeps the completed epochs followed by a
/// "# status=failed" line, metrics.json records the error, and the error is
/// rethrown.
MonitorSummary run_monitor(const fs::path& manifest_path, const MonitorOptions& options);

struct AnalysisResult {
    LagReport lags;
    std::optional<ScalingFit> scaling;
    AblationReport ablation;
};

/// Lagged correlation of the smoothed CI against `metric`, footprint
/// scaling and component ablation for one metrics table.
AnalysisResult analyze_table(const MetricsTable& table, std::span<const double> metric, const MonitorConfig& config,
                             int max_lag);

nlohmann::ordered_json analysis_to_json(const AnalysisResult& result, const std::string& metric);

struct AnalyzeOptions {
    std::string metric;
    int max_lag = 8;
    bool sweep = false;
    std::vector<std::uint32_t> sweep_k{2, 4, 8, 16, 32};
    std::vector<double> sweep_p{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    unsigned threads = 1;
};

/// Writes analysis.json and lags.csv into the run directory. With `sweep`,
/// re-runs the monitor per (k, p) cell under sweep/k{k}_p{p} and writes
/// sweep.csv and sweep.json. Throws AnalysisError when the metric is missing.
nlohmann::ordered_json run_analyze(const fs::path& run_dir, const AnalyzeOptions& options);

/// metrics.csv of a run directory rendered as CSV or JSON text.
std::string render_report(const fs::path& run_dir, const std::string& format);

/// MMHM_THREADS when set to a positive integer, otherwise 1.
unsigned threads_from_env();

} // namespace mmhm

#endif // MMHM_RUN_HPP
