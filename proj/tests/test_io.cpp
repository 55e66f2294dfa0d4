#include "oracles.hpp"

#include "mmhm/error.hpp"
#include "mmhm/io.hpp"
#include "mmhm/monitor.hpp"
#include "mmhm/synth.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

using namespace mmhm;

namespace {

const fs::path kFixtures = MMHM_FIXTURE_DIR;

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("mmhm_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::uint8_t> bytes_of(const fs::path& p)
{
    const std::string s = read_file(p);
    return {s.begin(), s.end()};
}

} // namespace

TEST_CASE("2x2 snapshot matches the golden bytes", "[io]")
{
    const EmbeddingSnapshot s(0, 2, 2, {1, 2, 3, 4});
    const auto enc = encode_snapshot(s);
    REQUIRE(enc.size() == 48);
    REQUIRE(enc == bytes_of(kFixtures / "snapshot_2x2.snap"));

    const auto dec = read_snapshot(kFixtures / "snapshot_2x2.snap");
    REQUIRE(dec.rows == 2);
    REQUIRE(dec.cols == 2);
    REQUIRE(dec.epoch == 0);
    REQUIRE_FALSE(dec.normalized);
    REQUIRE(dec.values == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("snapshot round trip preserves float32 bit patterns", "[io]")
{
    auto s = oracle::gaussian(7, 33, 5, 4);
    for (auto& x : s.values)
        x = static_cast<double>(static_cast<float>(x));
    s.values[3] = -0.0;
    s.values[4] = 1e-40; // float32 subnormal
    s.values[4] = static_cast<double>(static_cast<float>(s.values[4]));
    s.normalized = true;
    const auto dir = scratch("roundtrip");
    write_snapshot(dir / "a.snap", s);
    const auto back = read_snapshot(dir / "a.snap");
    REQUIRE(back.epoch == 7);
    REQUIRE(back.normalized);
    REQUIRE(back.values.size() == s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const float a = static_cast<float>(s.values[i]);
        const float b = static_cast<float>(back.values[i]);
        REQUIRE(std::memcmp(&a, &b, sizeof a) == 0);
    }
    REQUIRE(encode_snapshot(back) == encode_snapshot(s));
}

TEST_CASE("malformed snapshots are data errors", "[io]")
{
    auto good = bytes_of(kFixtures / "snapshot_2x2.snap");
    auto bad_magic = good;
    bad_magic[0] = 'X';
    REQUIRE_THROWS_AS(decode_snapshot(bad_magic), DataError);
    auto bad_version = good;
    bad_version[8] = 2;
    REQUIRE_THROWS_AS(decode_snapshot(bad_version), DataError);
    auto truncated = good;
    truncated.pop_back();
    REQUIRE_THROWS_AS(decode_snapshot(truncated), DataError);
    auto extra = good;
    extra.push_back(0);
    REQUIRE_THROWS_AS(decode_snapshot(extra), DataError);
    auto nan = good;
    const float q = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(nan.data() + 32, &q, 4);
    REQUIRE_THROWS_AS(decode_snapshot(nan), DataError);
    REQUIRE_THROWS_AS(decode_snapshot(std::vector<std::uint8_t>(10, 0)), DataError);
    REQUIRE_THROWS_AS(read_snapshot(kFixtures / "does_not_exist.snap"), DataError);
}

TEST_CASE("manifest serialization matches the golden document", "[io]")
{
    RunManifest m;
    m.run_id = "golden";
    m.snapshots = {"epoch_0000.snap", "epoch_0001.snap"};
    m.metrics["accuracy"] = {1.0, 0.5};
    m.seeds = {7};
    REQUIRE(manifest_to_json(m).dump(2) + "\n" == read_file(kFixtures / "manifest_defaults.json"));

    const auto dir = scratch("manifest");
    write_manifest(dir / "manifest.json", m);
    REQUIRE(read_file(dir / "manifest.json") == read_file(kFixtures / "manifest_defaults.json"));
}

TEST_CASE("missing manifest fields take their defaults", "[io]")
{
    const auto m = read_manifest(kFixtures / "manifest_minimal.json");
    REQUIRE(m.run_id == "golden");
    REQUIRE(m.config.k == 8);
    REQUIRE(m.config.p == 0.2);
    REQUIRE(m.config.zscore == ZScoreMode::Causal);
    REQUIRE_FALSE(m.config.r_cap.has_value());
    REQUIRE(m.metrics.at("accuracy") == std::vector<double>{1.0, 0.5});
    // Re-serializing echoes every default explicitly.
    REQUIRE(manifest_to_json(m).dump(2) + "\n" == read_file(kFixtures / "manifest_defaults.json"));
}

TEST_CASE("invalid manifests are config errors", "[io]")
{
    REQUIRE_THROWS_AS(manifest_from_json(nlohmann::json::array()), ConfigError);
    REQUIRE_THROWS_AS(manifest_from_json(nlohmann::json{{"snapshots", nlohmann::json::array()}}), ConfigError);
    REQUIRE_THROWS_AS(manifest_from_json(nlohmann::json{{"schema_version", 9}, {"snapshots", {"a"}}}), ConfigError);
    auto bad_weights = nlohmann::json::parse(read_file(kFixtures / "manifest_defaults.json"));
    bad_weights["config"]["weights"]["w0"] = 0.5;
    REQUIRE_THROWS_AS(manifest_from_json(bad_weights), ConfigError);
    auto bad_k = nlohmann::json::parse(read_file(kFixtures / "manifest_defaults.json"));
    bad_k["config"]["k"] = 0;
    REQUIRE_THROWS_AS(manifest_from_json(bad_k), ConfigError);
    const auto dir = scratch("badjson");
    write_file_atomic(dir / "m.json", "{ not json");
    REQUIRE_THROWS_AS(read_manifest(dir / "m.json"), ConfigError);
}

TEST_CASE("synthetic trajectories round trip through files", "[io]")
{
    TrajectorySpec spec;
    spec.kind = TrajectoryKind::DimensionalCollapse;
    spec.n = 30;
    spec.d = 6;
    spec.epochs = 6;
    spec.onset = 2;
    spec.seed = 5;
    const auto traj = gen_trajectory(spec);
    const auto dir = scratch("traj");
    const auto manifest_path = write_trajectory(dir, traj, spec);
    const auto m = read_manifest(manifest_path);
    REQUIRE(m.snapshots.size() == 6);
    REQUIRE(m.metrics.at("task_metric") == traj.task_metric);
    REQUIRE(m.synth.has_value());
    REQUIRE(m.synth->kind == TrajectoryKind::DimensionalCollapse);
    for (std::size_t t = 0; t < 6; ++t) {
        const auto s = read_snapshot(dir / m.snapshots[t]);
        REQUIRE(s.values == traj.snapshots[t].values);
        REQUIRE(s.epoch == t);
    }
    // A second write produces byte-identical files.
    const auto dir2 = scratch("traj2");
    write_trajectory(dir2, gen_trajectory(spec), spec);
    for (const auto& name : m.snapshots)
        REQUIRE(read_file(dir / name) == read_file(dir2 / name));
    REQUIRE(read_file(dir / "manifest.json") == read_file(dir2 / "manifest.json"));
}

TEST_CASE("metrics rows parse back to the same values", "[io]")
{
    TrajectorySpec spec;
    spec.n = 60;
    spec.d = 4;
    spec.epochs = 6;
    spec.severity = 1.0;
    const auto traj = gen_trajectory(spec);
    MonitorConfig cfg;
    cfg.k = 5;
    Monitor mon(cfg);
    std::string csv = "# mmhm metrics schema=1 zscore=causal\n";
    for (std::size_t i = 0; i < metrics_columns().size(); ++i)
        csv += (i ? "," : "") + metrics_columns()[i];
    csv += "\n";
    for (const auto& s : traj.snapshots)
        csv += metrics_csv_row(mon.push(s)) + "\n";
    const auto dir = scratch("csv");
    write_file_atomic(dir / "metrics.csv", csv);
    const auto table = read_metrics_csv(dir / "metrics.csv");
    REQUIRE_FALSE(table.failed);
    REQUIRE(table.rows.size() == 6);
    for (std::size_t t = 0; t < 6; ++t) {
        const auto& a = table.rows[t];
        const auto& b = mon.records()[t];
        REQUIRE(metrics_csv_row(a) == metrics_csv_row(b));
        REQUIRE(a.signals.footprint == b.signals.footprint);
        REQUIRE(a.ci.smoothed == b.ci.smoothed);
        REQUIRE(a.features == b.features);
    }
}
