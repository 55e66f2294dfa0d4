#include "mmhm/mmhm.h"

#include "mmhm/error.hpp"
#include "mmhm/io.hpp"
#include "mmhm/isoscore.hpp"
#include "mmhm/monitor.hpp"
#include "mmhm/run.hpp"
#include "mmhm/synth.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

struct mmhm_monitor {
    mmhm::Monitor monitor;
    std::uint32_t next_epoch = 0;
};

namespace {

thread_local std::string g_last_error;

template <class F>
mmhm_status guarded(F&& f)
{
    try {
        g_last_error.clear();
        f();
        return MMHM_OK;
    } catch (const mmhm::ConfigError& e) {
        g_last_error = e.what();
        return MMHM_ERR_CONFIG;
    } catch (const mmhm::DataError& e) {
        g_last_error = e.what();
        return MMHM_ERR_DATA;
    } catch (const mmhm::InvariantError& e) {
        g_last_error = e.what();
        return MMHM_ERR_INVARIANT;
    } catch (const mmhm::AnalysisError& e) {
        g_last_error = e.what();
        return MMHM_ERR_ANALYSIS;
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return MMHM_ERR_IO;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return MMHM_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MMHM_ERR_INTERNAL;
    }
}

mmhm_status null_argument(const char* name)
{
    g_last_error = std::string("null argument: ") + name;
    return MMHM_ERR_CONFIG;
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

mmhm::MonitorConfig to_config(const mmhm_config& c)
{
    mmhm::MonitorConfig out;
    out.k = c.k;
    out.p = c.p;
    for (std::size_t i = 0; i < mmhm::kComponentCount; ++i)
        out.weights.w[i] = c.weights[i];
    out.alpha = c.alpha;
    if (c.r_cap > 0)
        out.r_cap = c.r_cap;
    out.cycle_sample_cap = c.cycle_sample_cap;
    if (c.zscore == MMHM_ZSCORE_CAUSAL)
        out.zscore = mmhm::ZScoreMode::Causal;
    else if (c.zscore == MMHM_ZSCORE_RETRO)
        out.zscore = mmhm::ZScoreMode::Retrospective;
    else
        throw mmhm::ConfigError("unknown z-score mode " + std::to_string(c.zscore));
    out.recompression_threshold = c.recompression_threshold;
    out.recompression_patience = c.recompression_patience;
    out.verify = c.verify != 0;
    out.threads = c.threads == 0 ? 1 : c.threads;
    out.validate();
    return out;
}

void fill_epoch(const mmhm::EpochRecord& r, mmhm_epoch& out)
{
    const auto& s = r.signals;
    out.epoch = s.epoch;
    for (std::size_t i = 0; i < 3; ++i) {
        out.betti[i] = s.betti[i];
        out.delta_betti[i] = s.delta_betti[i];
        out.footprint_per_dim[i] = s.footprint_per_dim[i + 1];
        out.touched[i] = s.touched_counts[i + 1];
    }
    for (std::size_t i = 0; i < 4; ++i)
        out.simplices[i] = s.simplex_counts[i];
    out.churn = s.churn;
    out.fragility = s.fragility;
    out.footprint = s.footprint;
    out.mover_count = s.mover_count;
    out.column_ops = s.column_ops;
    out.recompressed = r.recompressed ? 1 : 0;
    out.isoscore = r.isoscore;
    out.ci_raw = r.ci.raw;
    out.ci_ema = r.ci.smoothed;
}

} // namespace

extern "C" {

const char* mmhm_last_error(void)
{
    return g_last_error.c_str();
}

const char* mmhm_version(void)
{
    return "0.1.0";
}

void mmhm_free_string(char* s)
{
    std::free(s);
}

void mmhm_config_default(mmhm_config* config)
{
    if (!config)
        return;
    const mmhm::MonitorConfig d;
    config->k = d.k;
    config->p = d.p;
    for (std::size_t i = 0; i < mmhm::kComponentCount; ++i)
        config->weights[i] = d.weights.w[i];
    config->alpha = d.alpha;
    config->r_cap = 0;
    config->cycle_sample_cap = d.cycle_sample_cap;
    config->zscore = MMHM_ZSCORE_CAUSAL;
    config->recompression_threshold = d.recompression_threshold;
    config->recompression_patience = d.recompression_patience;
    config->verify = 0;
    config->threads = 1;
}

mmhm_status mmhm_monitor_create(const mmhm_config* config, mmhm_monitor** out)
{
    if (!config)
        return null_argument("config");
    if (!out)
        return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new mmhm_monitor{mmhm::Monitor(to_config(*config))}; });
}

void mmhm_monitor_destroy(mmhm_monitor* monitor)
{
    delete monitor;
}

mmhm_status mmhm_monitor_push(mmhm_monitor* monitor, const double* values, size_t rows, size_t cols,
                              mmhm_epoch* out)
{
    if (!monitor)
        return null_argument("monitor");
    if (!values && rows * cols > 0)
        return null_argument("values");
    return guarded([&] {
        mmhm::EmbeddingSnapshot snap(monitor->next_epoch, rows, cols,
                                     std::vector<double>(values, values + rows * cols));
        const auto& rec = monitor->monitor.push(snap);
        ++monitor->next_epoch;
        if (out)
            fill_epoch(rec, *out);
    });
}

mmhm_status mmhm_isoscore(const double* values, size_t rows, size_t cols, double* out)
{
    if (!values)
        return null_argument("values");
    if (!out)
        return null_argument("out");
    return guarded([&] {
        mmhm::EmbeddingSnapshot snap(0, rows, cols, std::vector<double>(values, values + rows * cols));
        *out = mmhm::isoscore(snap);
    });
}

mmhm_status mmhm_run_monitor(const char* manifest_path, int verify, int zscore, const char* out_dir,
                             unsigned threads)
{
    if (!manifest_path)
        return null_argument("manifest_path");
    return guarded([&] {
        mmhm::MonitorOptions opt;
        opt.verify = verify != 0;
        if (zscore == MMHM_ZSCORE_CAUSAL)
            opt.zscore = mmhm::ZScoreMode::Causal;
        else if (zscore == MMHM_ZSCORE_RETRO)
            opt.zscore = mmhm::ZScoreMode::Retrospective;
        else if (zscore != MMHM_ZSCORE_DEFAULT)
            throw mmhm::ConfigError("unknown z-score mode " + std::to_string(zscore));
        opt.threads = threads == 0 ? 1 : threads;
        if (out_dir)
            opt.out_dir = out_dir;
        mmhm::run_monitor(manifest_path, opt);
    });
}

void mmhm_synth_default(mmhm_synth_spec* spec)
{
    if (!spec)
        return;
    const mmhm::TrajectorySpec d;
    spec->kind = "jitter";
    spec->n = d.n;
    spec->d = d.d;
    spec->epochs = d.epochs;
    spec->seed = d.seed;
    spec->onset = d.onset;
    spec->severity = d.severity;
    spec->metric_lag = d.metric_lag;
    spec->noise = d.noise;
}

mmhm_status mmhm_synth(const mmhm_synth_spec* spec, const char* out_dir)
{
    if (!spec)
        return null_argument("spec");
    if (!spec->kind)
        return null_argument("spec->kind");
    if (!out_dir)
        return null_argument("out_dir");
    return guarded([&] {
        mmhm::TrajectorySpec s;
        s.kind = mmhm::parse_trajectory_kind(spec->kind);
        s.n = spec->n;
        s.d = spec->d;
        s.epochs = spec->epochs;
        s.seed = spec->seed;
        s.onset = spec->onset;
        s.severity = spec->severity;
        s.metric_lag = spec->metric_lag;
        s.noise = spec->noise;
        s.validate();
        mmhm::write_trajectory(out_dir, mmhm::gen_trajectory(s), s);
    });
}

mmhm_status mmhm_analyze(const char* run_dir, const char* metric, int max_lag, int sweep, unsigned threads,
                         char** json_out)
{
    if (!run_dir)
        return null_argument("run_dir");
    if (!metric)
        return null_argument("metric");
    if (json_out)
        *json_out = nullptr;
    return guarded([&] {
        mmhm::AnalyzeOptions opt;
        opt.metric = metric;
        opt.max_lag = max_lag;
        opt.sweep = sweep != 0;
        opt.threads = threads == 0 ? 1 : threads;
        const auto j = mmhm::run_analyze(run_dir, opt);
        if (json_out)
            *json_out = dup_string(j.dump(2));
    });
}

mmhm_status mmhm_report(const char* run_dir, const char* format, char** out)
{
    if (!run_dir)
        return null_argument("run_dir");
    if (!format)
        return null_argument("format");
    if (!out)
        return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = dup_string(mmhm::render_report(run_dir, format)); });
}

} // extern "C"
