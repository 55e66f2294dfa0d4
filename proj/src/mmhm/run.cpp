#include "mmhm/run.hpp"

#include "mmhm/error.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace mmhm {

using ojson = nlohmann::ordered_json;

unsigned threads_from_env()
{
    const char* v = std::getenv("MMHM_THREADS");
    if (v == nullptr)
        return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1)
        return 1;
    return static_cast<unsigned>(std::min<long>(n, 256));
}

namespace {

class DirLock {
public:
    explicit DirLock(const fs::path& dir)
    {
        const fs::path p = dir / ".mmhm.lock";
        fd_ = ::open(p.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0)
            throw DataError("cannot open lock file " + p.string());
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            throw ConfigError("another monitor holds " + p.string());
        }
    }
    ~DirLock()
    {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    int fd_ = -1;
};

std::string timestamp()
{
    return fmt::format("{:%Y-%m-%dT%H:%M:%S}Z", fmt::gmtime(std::time(nullptr)));
}

std::string csv_preamble(ZScoreMode mode)
{
    std::string out = fmt::format("# mmhm metrics schema={} zscore={}\n", kMetricsSchema, zscore_mode_name(mode));
    const auto& cols = metrics_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out += (i ? "," : "") + cols[i];
    out += "\n";
    return out;
}

std::string one_line(std::string s)
{
    for (char& c : s)
        if (c == '\n' || c == '\r')
            c = ' ';
    return s;
}

} // namespace

MonitorSummary run_monitor(const fs::path& manifest_path, const MonitorOptions& options)
{
    RunManifest manifest = read_manifest(manifest_path);
    MonitorConfig config = manifest.config;
    if (options.zscore)
        config.zscore = *options.zscore;
    if (options.k)
        config.k = *options.k;
    if (options.p)
        config.p = *options.p;
    config.verify = options.verify;
    config.threads = options.threads;
    config.validate();

    const fs::path base = manifest_path.parent_path();
    MonitorSummary summary;
    summary.out_dir = options.out_dir ? *options.out_dir : base;
    summary.zscore = config.zscore;
    fs::create_directories(summary.out_dir);
    DirLock lock(summary.out_dir);

    const fs::path csv_path = summary.out_dir / "metrics.csv";
    const fs::path json_path = summary.out_dir / "metrics.json";
    std::ofstream csv(csv_path, std::ios::trunc);
    std::ofstream log(summary.out_dir / "monitor.log", std::ios::app);
    if (!csv || !log)
        throw DataError("cannot write outputs in " + summary.out_dir.string());
    csv << csv_preamble(config.zscore) << std::flush;
    log << timestamp() << " start manifest=" << manifest_path.string() << " epochs=" << manifest.snapshots.size()
        << " zscore=" << zscore_mode_name(config.zscore) << (config.verify ? " verify" : "") << std::endl;

    Monitor monitor(config);
    try {
        for (std::size_t i = 0; i < manifest.snapshots.size(); ++i) {
            const fs::path p = base / manifest.snapshots[i];
            if (!fs::exists(p))
                throw DataError("missing snapshot " + p.string());
            EmbeddingSnapshot snap = read_snapshot(p);
            if (snap.epoch != i)
                throw DataError(p.string() + " holds epoch " + std::to_string(snap.epoch) + ", manifest expects " +
                                std::to_string(i));
            EpochRecord rec = monitor.push(snap);
            if (config.zscore == ZScoreMode::Retrospective) {
                const double nan = std::numeric_limits<double>::quiet_NaN();
                rec.ci.raw = nan;
                rec.ci.z.fill(nan);
                rec.ci.smoothed = nan;
            }
            csv << metrics_csv_row(rec) << "\n" << std::flush;
            log << timestamp() << " epoch=" << rec.signals.epoch << " wall_time=" << rec.signals.wall_time
                << (rec.recompressed ? " recompressed" : "") << std::endl;
        }
    } catch (const Error& e) {
        csv << "# status=failed error=" << one_line(e.what()) << "\n" << std::flush;
        write_file_atomic(json_path,
                          metrics_to_json(monitor.records(), config.zscore, monitor.radius_cap(), "failed", e.what())
                                  .dump(2) +
                              "\n");
        log << timestamp() << " failed " << one_line(e.what()) << std::endl;
        throw;
    }
    csv.close();

    std::vector<EpochRecord> records = monitor.records();
    if (config.zscore == ZScoreMode::Retrospective) {
        const CiSeries series = monitor.ci_series();
        std::string content = csv_preamble(config.zscore);
        for (std::size_t t = 0; t < records.size(); ++t) {
            records[t].ci.z = series.z[t];
            records[t].ci.raw = series.raw[t];
            records[t].ci.smoothed = series.smoothed[t];
            content += metrics_csv_row(records[t]) + "\n";
        }
        write_file_atomic(csv_path, content);
    }
    write_file_atomic(json_path, metrics_to_json(records, config.zscore, monitor.radius_cap(), "ok", "").dump(2) + "\n");
    log << timestamp() << " done epochs=" << records.size() << std::endl;
    summary.epochs = records.size();
    return summary;
}

AnalysisResult analyze_table(const MetricsTable& table, std::span<const double> metric, const MonitorConfig& config,
                             int max_lag)
{
    if (metric.size() != table.rows.size())
        throw AnalysisError("metric has " + std::to_string(metric.size()) + " values for " +
                            std::to_string(table.rows.size()) + " epochs");
    AnalysisResult r;
    std::vector<double> ci;
    std::vector<FeatureVector> features;
    std::vector<EpochSignals> signals;
    for (const auto& row : table.rows) {
        ci.push_back(row.ci.smoothed);
        features.push_back(row.features);
        signals.push_back(row.signals);
    }
    r.lags = lagged_correlation(ci, metric, max_lag);
    if (signals.size() >= 4)
        r.scaling = scaling_fit(signals);
    const auto groups = default_ablation_groups();
    r.ablation = ablation_deltas(features, metric, config.weights, config.alpha, table.zscore, max_lag, groups);
    return r;
}

ojson analysis_to_json(const AnalysisResult& r, const std::string& metric)
{
    ojson j;
    j["metric"] = metric;
    ojson lags = ojson::array();
    for (const auto& e : r.lags.lags)
        lags.push_back({{"lag", e.lag}, {"n", e.n}, {"pearson", e.pearson}, {"spearman", e.spearman}});
    j["lags"] = lags;
    j["best_lag"] = r.lags.best_lag;
    j["best_negative_lag"] = r.lags.best_negative_lag;
    j["rho_negative"] = r.lags.rho_negative;
    j["rho_zero"] = r.lags.rho_zero;
    j["lead"] = r.lags.lead;
    j["negative_beats_zero"] = r.lags.negative_beats_zero;
    if (r.scaling) {
        const ScalingFit& f = *r.scaling;
        j["scaling"] = {{"slope", f.slope},
                        {"intercept", f.intercept},
                        {"r2", f.r2},
                        {"adjusted_r2", f.adjusted_r2},
                        {"n", f.n},
                        {"degenerate", f.degenerate}};
    } else {
        j["scaling"] = nullptr;
    }
    ojson abl = ojson::array();
    for (const auto& e : r.ablation.entries)
        abl.push_back({{"component", e.name},
                       {"rho_negative", e.rho_negative},
                       {"best_negative_lag", e.best_negative_lag},
                       {"delta", e.delta}});
    j["ablation"] = {{"full_rho_negative", r.ablation.full_rho_negative},
                     {"full_best_negative_lag", r.ablation.full_best_negative_lag},
                     {"entries", abl}};
    return j;
}

namespace {

std::string lags_csv(const LagReport& r)
{
    std::string out = "lag,n,pearson,spearman\n";
    for (const auto& e : r.lags)
        out += fmt::format("{},{},{},{}\n", e.lag, e.n, e.pearson, e.spearman);
    return out;
}

const std::vector<double>& find_metric(const RunManifest& m, const std::string& name)
{
    auto it = m.metrics.find(name);
    if (it == m.metrics.end())
        throw AnalysisError("manifest has no metric series '" + name + "'");
    return it->second;
}

} // namespace

ojson run_analyze(const fs::path& run_dir, const AnalyzeOptions& options)
{
    const fs::path manifest_path = run_dir / "manifest.json";
    const RunManifest manifest = read_manifest(manifest_path);
    const std::vector<double>& metric = find_metric(manifest, options.metric);

    if (!options.sweep) {
        const MetricsTable table = read_metrics_csv(run_dir / "metrics.csv");
        if (table.failed)
            throw AnalysisError("metrics come from a failed run: " + table.failure);
        const AnalysisResult r = analyze_table(table, metric, manifest.config, options.max_lag);
        ojson j = analysis_to_json(r, options.metric);
        write_file_atomic(run_dir / "analysis.json", j.dump(2) + "\n");
        write_file_atomic(run_dir / "lags.csv", lags_csv(r.lags));
        return j;
    }

    ojson cells = ojson::array();
    std::string csv = "k,p,epochs,best_lag,best_negative_lag,rho_negative,rho_zero,lead,negative_beats_zero,"
                      "mean_footprint,mean_column_ops\n";
    std::vector<double> pooled_x;
    std::vector<double> pooled_y;
    for (std::uint32_t k : options.sweep_k) {
        for (double p : options.sweep_p) {
            const fs::path cell = run_dir / "sweep" / fmt::format("k{}_p{}", k, p);
            MonitorOptions mo;
            mo.k = k;
            mo.p = p;
            mo.threads = options.threads;
            mo.out_dir = cell;
            run_monitor(manifest_path, mo);
            MonitorConfig cfg = manifest.config;
            cfg.k = k;
            cfg.p = p;
            const MetricsTable table = read_metrics_csv(cell / "metrics.csv");
            const AnalysisResult r = analyze_table(table, metric, cfg, options.max_lag);
            ojson cj = analysis_to_json(r, options.metric);
            write_file_atomic(cell / "analysis.json", cj.dump(2) + "\n");

            double sum_b = 0.0;
            double sum_ops = 0.0;
            std::size_t n = 0;
            for (const auto& row : table.rows) {
                if (row.signals.epoch == 0)
                    continue;
                sum_b += row.signals.footprint;
                sum_ops += static_cast<double>(row.signals.column_ops);
                pooled_x.push_back(static_cast<double>(row.signals.mover_count) /
                                   static_cast<double>(row.signals.simplex_counts[0]));
                pooled_y.push_back(row.signals.footprint);
                ++n;
            }
            const double mean_b = n ? sum_b / static_cast<double>(n) : 0.0;
            const double mean_ops = n ? sum_ops / static_cast<double>(n) : 0.0;
            csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", k, p, table.rows.size(), r.lags.best_lag,
                               r.lags.best_negative_lag, r.lags.rho_negative, r.lags.rho_zero, r.lags.lead,
                               r.lags.negative_beats_zero ? 1 : 0, mean_b, mean_ops);
            cj["k"] = k;
            cj["p"] = p;
            cj["mean_footprint"] = mean_b;
            cj["mean_column_ops"] = mean_ops;
            cells.push_back(cj);
        }
    }
    ojson j;
    j["metric"] = options.metric;
    j["cells"] = cells;
    if (pooled_x.size() >= 3) {
        const ScalingFit f = fit_line(pooled_x, pooled_y);
        j["pooled_scaling"] = {{"slope", f.slope},         {"intercept", f.intercept}, {"r2", f.r2},
                               {"adjusted_r2", f.adjusted_r2}, {"n", f.n},             {"degenerate", f.degenerate}};
    }
    write_file_atomic(run_dir / "sweep.json", j.dump(2) + "\n");
    write_file_atomic(run_dir / "sweep.csv", csv);
    return j;
}

std::string render_report(const fs::path& run_dir, const std::string& format)
{
    const fs::path csv_path = run_dir / "metrics.csv";
    if (format == "csv") {
        (void)read_metrics_csv(csv_path);
        return read_file(csv_path);
    }
    if (format == "json") {
        const MetricsTable t = read_metrics_csv(csv_path);
        std::int64_t r_cap = t.rows.empty() ? 0 : t.rows.front().signals.fragility;
        return metrics_to_json(t.rows, t.zscore, r_cap, t.failed ? "failed" : "ok", t.failure).dump(2) + "\n";
    }
    throw ConfigError("unknown report format '" + format + "'");
}

} // namespace mmhm
