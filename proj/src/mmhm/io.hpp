#ifndef MMHM_IO_HPP
#define MMHM_IO_HPP

#include "mmhm/monitor.hpp"
#include "mmhm/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmhm {

namespace fs = std::filesystem;

// Snapshot file: "MMHMSNAP", u32 version, u32 epoch, u64 N, u32 d,
// u8 normalized, 3 reserved zero bytes, then N*d float32, all little-endian,
// row-major.
inline constexpr char kSnapshotMagic[8] = {'M', 'M', 'H', 'M', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderSize = 32;

/// Values are narrowed to float32.
std::vector<std::uint8_t> encode_snapshot(const EmbeddingSnapshot& snapshot);

/// Throws DataError on a bad magic, version, size or non-finite payload.
EmbeddingSnapshot decode_snapshot(std::span<const std::uint8_t> bytes);

/// Writes through a temporary file and rename.
void write_snapshot(const fs::path& path, const EmbeddingSnapshot& snapshot);
EmbeddingSnapshot read_snapshot(const fs::path& path);

inline constexpr int kManifestSchema = 1;

struct RunManifest {
    int schema_version = kManifestSchema;
    std::string run_id;
    std::vector<std::string> snapshots; // relative to the manifest directory, epoch order
    MonitorConfig config;
    std::map<std::string, std::vector<double>> metrics;
    std::vector<std::uint64_t> seeds;
    std::optional<TrajectorySpec> synth;
};

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);
/// Missing config fields take their defaults. Throws ConfigError.
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const fs::path& path, const RunManifest& manifest);
RunManifest read_manifest(const fs::path& path);

/// Writes every snapshot as epoch_NNNN.snap next to manifest.json, with the
/// task metric under "task_metric". Returns the manifest path.
fs::path write_trajectory(const fs::path& dir, const Trajectory& trajectory, const TrajectorySpec& spec,
                          const MonitorConfig& config = {});

inline constexpr int kMetricsSchema = 1;

/// Column names of metrics.csv in order.
const std::vector<std::string>& metrics_columns();

/// One CSV data line (no newline). Doubles use shortest round-trip form.
std::string metrics_csv_row(const EpochRecord& rec);

/// A parsed metrics.csv.
struct MetricsTable {
    ZScoreMode zscore = ZScoreMode::Causal;
    bool failed = false;
    std::string failure;
    std::vector<EpochRecord> rows;
};

MetricsTable read_metrics_csv(const fs::path& path);

nlohmann::ordered_json metrics_to_json(const std::vector<EpochRecord>& records, ZScoreMode mode,
                                       std::int64_t r_cap, const std::string& status, const std::string& error);

/// Temporary file plus rename.
void write_file_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

} // namespace mmhm

#endif // MMHM_IO_HPP
