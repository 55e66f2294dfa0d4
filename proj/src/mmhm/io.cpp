#include "mmhm/io.hpp"

#include "mmhm/error.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mmhm {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v)
{
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t at)
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
    return static_cast<T>(v);
}

} // namespace

std::vector<std::uint8_t> encode_snapshot(const EmbeddingSnapshot& snapshot)
{
    if (snapshot.values.size() != snapshot.rows * snapshot.cols)
        throw DataError("snapshot payload does not match its shape");
    if (snapshot.cols > UINT32_MAX)
        throw DataError("snapshot dimension exceeds the format limit");
    std::vector<std::uint8_t> out;
    out.reserve(kSnapshotHeaderSize + 4 * snapshot.values.size());
    for (char c : kSnapshotMagic)
        out.push_back(static_cast<std::uint8_t>(c));
    put_le<std::uint32_t>(out, kSnapshotVersion);
    put_le<std::uint32_t>(out, snapshot.epoch);
    put_le<std::uint64_t>(out, snapshot.rows);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(snapshot.cols));
    out.push_back(snapshot.normalized ? 1 : 0);
    out.insert(out.end(), 3, 0);
    for (double x : snapshot.values)
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    return out;
}

EmbeddingSnapshot decode_snapshot(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kSnapshotHeaderSize)
        throw DataError("snapshot shorter than its header");
    if (std::memcmp(bytes.data(), kSnapshotMagic, 8) != 0)
        throw DataError("snapshot has a bad magic");
    const auto version = get_le<std::uint32_t>(bytes, 8);
    if (version != kSnapshotVersion)
        throw DataError("unsupported snapshot version " + std::to_string(version));
    const auto epoch = get_le<std::uint32_t>(bytes, 12);
    const auto n = get_le<std::uint64_t>(bytes, 16);
    const auto d = get_le<std::uint32_t>(bytes, 24);
    const auto flag = bytes[28];
    if (flag > 1)
        throw DataError("snapshot normalization flag must be 0 or 1");
    if (d != 0 && n > (UINT64_MAX - kSnapshotHeaderSize) / 4 / d)
        throw DataError("snapshot shape overflows");
    if (bytes.size() != kSnapshotHeaderSize + 4 * n * d)
        throw DataError("snapshot payload is " + std::to_string(bytes.size() - kSnapshotHeaderSize) +
                        " bytes, expected " + std::to_string(4 * n * d));
    std::vector<double> values(n * d);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(bytes, kSnapshotHeaderSize + 4 * i)));
    EmbeddingSnapshot s(epoch, n, d, std::move(values), flag == 1);
    s.validate();
    return s;
}

void write_file_atomic(const fs::path& path, const std::string& content)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw DataError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_snapshot(const fs::path& path, const EmbeddingSnapshot& snapshot)
{
    const auto bytes = encode_snapshot(snapshot);
    write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

EmbeddingSnapshot read_snapshot(const fs::path& path)
{
    const std::string raw = read_file(path);
    try {
        return decode_snapshot({reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

// ---- manifest ----

namespace {

const char* const kWeightKeys[kComponentCount] = {"w0", "w1", "w2", "w_c", "w_r", "w_b"};

ojson config_to_json(const MonitorConfig& c)
{
    ojson w;
    for (std::size_t i = 0; i < kComponentCount; ++i)
        w[kWeightKeys[i]] = c.weights.w[i];
    ojson j;
    j["k"] = c.k;
    j["p"] = c.p;
    j["weights"] = w;
    j["alpha"] = c.alpha;
    j["r_cap"] = c.r_cap ? ojson(*c.r_cap) : ojson(nullptr);
    j["cycle_sample_cap"] = c.cycle_sample_cap;
    j["zscore_mode"] = std::string(zscore_mode_name(c.zscore));
    j["recompression_threshold"] = c.recompression_threshold;
    j["recompression_patience"] = c.recompression_patience;
    return j;
}

template <typename T>
T field(const json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j[key].is_null())
        return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest field '") + key + "': " + e.what());
    }
}

MonitorConfig config_from_json(const json& j)
{
    MonitorConfig c;
    if (!j.is_object())
        throw ConfigError("manifest config must be an object");
    c.k = field(j, "k", c.k);
    c.p = field(j, "p", c.p);
    if (j.contains("weights")) {
        const json& w = j["weights"];
        if (!w.is_object())
            throw ConfigError("manifest weights must be an object");
        for (std::size_t i = 0; i < kComponentCount; ++i)
            c.weights.w[i] = field(w, kWeightKeys[i], c.weights.w[i]);
    }
    c.alpha = field(j, "alpha", c.alpha);
    if (j.contains("r_cap") && !j["r_cap"].is_null())
        c.r_cap = field<std::int64_t>(j, "r_cap", 1);
    c.cycle_sample_cap = field(j, "cycle_sample_cap", c.cycle_sample_cap);
    c.zscore = parse_zscore_mode(field<std::string>(j, "zscore_mode", std::string(zscore_mode_name(c.zscore))));
    c.recompression_threshold = field(j, "recompression_threshold", c.recompression_threshold);
    c.recompression_patience = field(j, "recompression_patience", c.recompression_patience);
    c.validate();
    return c;
}

ojson synth_to_json(const TrajectorySpec& s)
{
    ojson j;
    j["kind"] = std::string(trajectory_kind_name(s.kind));
    j["n"] = s.n;
    j["d"] = s.d;
    j["epochs"] = s.epochs;
    j["seed"] = s.seed;
    j["onset"] = s.onset;
    j["severity"] = s.severity;
    j["metric_lag"] = s.metric_lag;
    j["noise"] = s.noise;
    return j;
}

TrajectorySpec synth_from_json(const json& j)
{
    TrajectorySpec s;
    s.kind = parse_trajectory_kind(field<std::string>(j, "kind", std::string(trajectory_kind_name(s.kind))));
    s.n = field(j, "n", s.n);
    s.d = field(j, "d", s.d);
    s.epochs = field(j, "epochs", s.epochs);
    s.seed = field(j, "seed", s.seed);
    s.onset = field(j, "onset", s.onset);
    s.severity = field(j, "severity", s.severity);
    s.metric_lag = field(j, "metric_lag", s.metric_lag);
    s.noise = field(j, "noise", s.noise);
    return s;
}

} // namespace

ojson manifest_to_json(const RunManifest& m)
{
    ojson j;
    j["schema_version"] = m.schema_version;
    j["run_id"] = m.run_id;
    j["snapshots"] = m.snapshots;
    j["config"] = config_to_json(m.config);
    ojson metrics = ojson::object();
    for (const auto& [name, series] : m.metrics)
        metrics[name] = series;
    j["metrics"] = metrics;
    j["seeds"] = m.seeds;
    if (m.synth)
        j["synth"] = synth_to_json(*m.synth);
    return j;
}

RunManifest manifest_from_json(const json& j)
{
    if (!j.is_object())
        throw ConfigError("manifest must be a JSON object");
    RunManifest m;
    m.schema_version = field(j, "schema_version", kManifestSchema);
    if (m.schema_version != kManifestSchema)
        throw ConfigError("unsupported manifest schema " + std::to_string(m.schema_version));
    m.run_id = field<std::string>(j, "run_id", "");
    m.snapshots = field<std::vector<std::string>>(j, "snapshots", {});
    if (m.snapshots.empty())
        throw ConfigError("manifest lists no snapshots");
    m.config = j.contains("config") ? config_from_json(j["config"]) : MonitorConfig{};
    m.metrics = field<std::map<std::string, std::vector<double>>>(j, "metrics", {});
    m.seeds = field<std::vector<std::uint64_t>>(j, "seeds", {});
    if (j.contains("synth") && !j["synth"].is_null())
        m.synth = synth_from_json(j["synth"]);
    return m;
}

void write_manifest(const fs::path& path, const RunManifest& manifest)
{
    write_file_atomic(path, manifest_to_json(manifest).dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& path)
{
    const std::string raw = read_file(path);
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

fs::path write_trajectory(const fs::path& dir, const Trajectory& trajectory, const TrajectorySpec& spec,
                          const MonitorConfig& config)
{
    fs::create_directories(dir);
    RunManifest m;
    m.run_id = fmt::format("{}-n{}-d{}-s{}", trajectory_kind_name(spec.kind), spec.n, spec.d, spec.seed);
    m.config = config;
    m.seeds = {spec.seed};
    m.synth = spec;
    m.metrics["task_metric"] = trajectory.task_metric;
    for (const auto& snap : trajectory.snapshots) {
        const std::string name = fmt::format("epoch_{:04d}.snap", snap.epoch);
        write_snapshot(dir / name, snap);
        m.snapshots.push_back(name);
    }
    const fs::path path = dir / "manifest.json";
    write_manifest(path, m);
    return path;
}

// ---- metrics ----

const std::vector<std::string>& metrics_columns()
{
    static const std::vector<std::string> cols = {
        "epoch",     "beta0",       "beta1",     "beta2",          "d_beta0",      "d_beta1",  "d_beta2",
        "churn",     "fragility",   "b1",        "b2",             "b3",           "footprint", "movers",
        "t1",        "t2",          "t3",        "n0",             "n1",           "n2",       "n3",
        "column_ops", "critical_cells", "cycles_sampled", "recompressed", "isoscore", "ci_raw", "z_betti0",
        "z_betti1",  "z_betti2",    "z_churn",   "z_fragility",    "z_footprint",  "ci_ema"};
    return cols;
}

std::string metrics_csv_row(const EpochRecord& r)
{
    const EpochSignals& s = r.signals;
    std::string out = fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                                  s.epoch, s.betti[0], s.betti[1], s.betti[2], s.delta_betti[0], s.delta_betti[1],
                                  s.delta_betti[2], s.churn, s.fragility, s.footprint_per_dim[1],
                                  s.footprint_per_dim[2], s.footprint_per_dim[3], s.footprint, s.mover_count,
                                  s.touched_counts[1], s.touched_counts[2], s.touched_counts[3], s.simplex_counts[0],
                                  s.simplex_counts[1], s.simplex_counts[2], s.simplex_counts[3], s.column_ops,
                                  s.critical_cells, s.cycles_sampled, r.recompressed ? 1 : 0, r.isoscore, r.ci.raw);
    for (double z : r.ci.z)
        out += fmt::format(",{}", z);
    out += fmt::format(",{}", r.ci.smoothed);
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw DataError("bad number '" + s + "' in metrics file");
    return v;
}

std::int64_t to_int(const std::string& s)
{
    const double v = to_double(s);
    if (v != std::floor(v))
        throw DataError("bad integer '" + s + "' in metrics file");
    return static_cast<std::int64_t>(v);
}

} // namespace

MetricsTable read_metrics_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    MetricsTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (auto pos = line.find("zscore="); pos != std::string::npos)
                t.zscore = parse_zscore_mode(split(line.substr(pos + 7), ' ')[0]);
            if (line.find("status=failed") != std::string::npos) {
                t.failed = true;
                if (auto pos = line.find("error="); pos != std::string::npos)
                    t.failure = line.substr(pos + 6);
            }
            continue;
        }
        const auto f = split(line, ',');
        if (!header) {
            if (f != metrics_columns())
                throw DataError(path.string() + ": unexpected metrics header");
            header = true;
            continue;
        }
        if (f.size() != metrics_columns().size())
            throw DataError(path.string() + ": metrics row has " + std::to_string(f.size()) + " fields");
        EpochRecord r;
        EpochSignals& s = r.signals;
        std::size_t i = 0;
        s.epoch = static_cast<std::uint32_t>(to_int(f[i++]));
        for (int d = 0; d < 3; ++d)
            s.betti.b[d] = to_int(f[i++]);
        for (int d = 0; d < 3; ++d)
            s.delta_betti[d] = to_int(f[i++]);
        s.churn = to_double(f[i++]);
        s.fragility = to_int(f[i++]);
        for (int d = 1; d <= 3; ++d)
            s.footprint_per_dim[d] = to_double(f[i++]);
        s.footprint = to_double(f[i++]);
        s.mover_count = static_cast<std::size_t>(to_int(f[i++]));
        for (int d = 1; d <= 3; ++d)
            s.touched_counts[d] = static_cast<std::size_t>(to_int(f[i++]));
        for (int d = 0; d <= 3; ++d)
            s.simplex_counts[d] = static_cast<std::size_t>(to_int(f[i++]));
        s.column_ops = static_cast<std::size_t>(to_int(f[i++]));
        s.critical_cells = static_cast<std::size_t>(to_int(f[i++]));
        s.cycles_sampled = static_cast<std::size_t>(to_int(f[i++]));
        r.recompressed = to_int(f[i++]) != 0;
        r.isoscore = to_double(f[i++]);
        r.ci.raw = to_double(f[i++]);
        for (auto& z : r.ci.z)
            z = to_double(f[i++]);
        r.ci.smoothed = to_double(f[i++]);
        r.features = raw_features(s);
        t.rows.push_back(r);
    }
    if (!header)
        throw DataError(path.string() + ": missing metrics header");
    return t;
}

ojson metrics_to_json(const std::vector<EpochRecord>& records, ZScoreMode mode, std::int64_t r_cap,
                      const std::string& status, const std::string& error)
{
    ojson j;
    j["schema_version"] = kMetricsSchema;
    j["zscore_mode"] = std::string(zscore_mode_name(mode));
    j["status"] = status;
    if (!error.empty())
        j["error"] = error;
    j["radius_cap"] = r_cap;
    ojson rows = ojson::array();
    for (const auto& r : records) {
        const EpochSignals& s = r.signals;
        ojson e;
        e["epoch"] = s.epoch;
        e["betti"] = {s.betti[0], s.betti[1], s.betti[2]};
        e["delta_betti"] = s.delta_betti;
        e["churn"] = s.churn;
        e["fragility"] = s.fragility;
        e["footprint_per_dim"] = {s.footprint_per_dim[1], s.footprint_per_dim[2], s.footprint_per_dim[3]};
        e["footprint"] = s.footprint;
        e["movers"] = s.mover_count;
        e["touched"] = {s.touched_counts[1], s.touched_counts[2], s.touched_counts[3]};
        e["simplices"] = s.simplex_counts;
        e["column_ops"] = s.column_ops;
        e["critical_cells"] = s.critical_cells;
        e["cycles_sampled"] = s.cycles_sampled;
        e["recompressed"] = r.recompressed;
        e["isoscore"] = r.isoscore;
        e["ci_raw"] = r.ci.raw;
        e["ci_z"] = r.ci.z;
        e["ci_ema"] = r.ci.smoothed;
        rows.push_back(e);
    }
    j["epochs"] = rows;
    return j;
}

} // namespace mmhm
