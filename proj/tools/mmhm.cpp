#include "mmhm/mmhm.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

namespace {

int exit_code(mmhm_status s)
{
    switch (s) {
    case MMHM_OK:
        return 0;
    case MMHM_ERR_INVARIANT:
        return 3;
    case MMHM_ERR_CONFIG:
    case MMHM_ERR_DATA:
    case MMHM_ERR_ANALYSIS:
    case MMHM_ERR_IO:
        return 2;
    default:
        return 1;
    }
}

int report(mmhm_status s)
{
    if (s != MMHM_OK)
        std::cerr << "mmhm: " << mmhm_last_error() << "\n";
    return exit_code(s);
}

unsigned env_threads()
{
    const char* v = std::getenv("MMHM_THREADS");
    if (!v)
        return 1;
    char* end = nullptr;
    const unsigned long n = std::strtoul(v, &end, 10);
    return (end != v && *end == '\0' && n > 0) ? static_cast<unsigned>(n) : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Incremental topological monitor for embedding trajectories"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mmhm_version()));

    std::string manifest;
    bool verify = false;
    std::string zscore;
    std::string out_dir;
    auto* monitor = app.add_subcommand("monitor", "Run the monitor over a manifest");
    monitor->add_option("manifest", manifest, "Path to manifest.json")->required();
    monitor->add_flag("--verify", verify, "Check every epoch against a full reduction");
    monitor->add_option("--zscore", zscore, "Standardization mode")->check(CLI::IsMember({"causal", "retro"}));
    monitor->add_option("--out", out_dir, "Output directory (default: the manifest's directory)");

    mmhm_synth_spec spec;
    mmhm_synth_default(&spec);
    std::string kind = "jitter";
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic trajectory");
    synth->add_option("--kind", kind)->check(
        CLI::IsMember({"jitter", "dimensional_collapse", "complete_collapse", "fragmentation"}));
    synth->add_option("--n", spec.n);
    synth->add_option("--d", spec.d);
    synth->add_option("--epochs", spec.epochs);
    synth->add_option("--seed", spec.seed);
    synth->add_option("--severity", spec.severity);
    synth->add_option("--onset", spec.onset);
    synth->add_option("--lag", spec.metric_lag);
    synth->add_option("--noise", spec.noise);
    synth->add_option("--out", synth_out)->required();

    std::string run_dir;
    std::string metric;
    int max_lag = 8;
    bool sweep = false;
    auto* analyze = app.add_subcommand("analyze", "Lag, scaling and ablation reports for a run");
    analyze->add_option("dir", run_dir)->required();
    analyze->add_option("--metric", metric)->required();
    analyze->add_option("--max-lag", max_lag)->check(CLI::NonNegativeNumber);
    analyze->add_flag("--sweep", sweep, "Re-run the monitor over the k x p grid");

    std::string report_dir;
    std::string format = "csv";
    auto* rep = app.add_subcommand("report", "Print the metrics of a run");
    rep->add_option("dir", report_dir)->required();
    rep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const unsigned threads = env_threads();
    if (*monitor) {
        int mode = MMHM_ZSCORE_DEFAULT;
        if (zscore == "causal")
            mode = MMHM_ZSCORE_CAUSAL;
        else if (zscore == "retro")
            mode = MMHM_ZSCORE_RETRO;
        return report(
            mmhm_run_monitor(manifest.c_str(), verify ? 1 : 0, mode, out_dir.empty() ? nullptr : out_dir.c_str(), threads));
    }
    if (*synth) {
        spec.kind = kind.c_str();
        return report(mmhm_synth(&spec, synth_out.c_str()));
    }
    if (*analyze) {
        char* json = nullptr;
        const mmhm_status s = mmhm_analyze(run_dir.c_str(), metric.c_str(), max_lag, sweep ? 1 : 0, threads, &json);
        if (s == MMHM_OK)
            std::cout << json << "\n";
        mmhm_free_string(json);
        return report(s);
    }
    char* text = nullptr;
    const mmhm_status s = mmhm_report(report_dir.c_str(), format.c_str(), &text);
    if (s == MMHM_OK)
        std::fputs(text, stdout);
    mmhm_free_string(text);
    return report(s);
}
