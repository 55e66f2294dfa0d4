// Exercises the shared library through its C interface only.
#include "mmhm/mmhm.h"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::vector<double> cloud(std::size_t n, std::size_t d, std::uint64_t seed, double jitter = 0.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> v(n * d);
    for (auto& x : v)
        x = g(rng);
    if (jitter > 0.0) {
        std::mt19937_64 r2(seed + 1000);
        std::normal_distribution<double> h(0.0, jitter);
        for (auto& x : v)
            x += h(r2);
    }
    return v;
}

} // namespace

TEST_CASE("monitor handle pushes epochs in order", "[capi]")
{
    mmhm_config cfg;
    mmhm_config_default(&cfg);
    REQUIRE(cfg.k == 8);
    REQUIRE(cfg.weights[4] == 0.4);
    cfg.k = 5;
    cfg.verify = 1;
    mmhm_monitor* mon = nullptr;
    REQUIRE(mmhm_monitor_create(&cfg, &mon) == MMHM_OK);
    REQUIRE(mon != nullptr);

    mmhm_epoch e{};
    const std::size_t n = 60, d = 4;
    for (std::uint64_t t = 0; t < 6; ++t) {
        const auto v = cloud(n, d, 7, 0.05 * static_cast<double>(t));
        REQUIRE(mmhm_monitor_push(mon, v.data(), n, d, &e) == MMHM_OK);
        REQUIRE(e.epoch == t);
        REQUIRE(e.footprint >= 0.0);
        REQUIRE(e.footprint <= 1.0);
        REQUIRE(e.simplices[0] == n);
    }
    const auto bad = cloud(n + 1, d, 1);
    REQUIRE(mmhm_monitor_push(mon, bad.data(), n + 1, d, &e) == MMHM_ERR_DATA);
    REQUIRE(std::string(mmhm_last_error()).find("shape") != std::string::npos);
    mmhm_monitor_destroy(mon);
}

TEST_CASE("configuration errors map to status codes", "[capi]")
{
    mmhm_config cfg;
    mmhm_config_default(&cfg);
    cfg.weights[0] = 0.9;
    mmhm_monitor* mon = nullptr;
    REQUIRE(mmhm_monitor_create(&cfg, &mon) == MMHM_ERR_CONFIG);
    REQUIRE(mon == nullptr);
    REQUIRE(std::strlen(mmhm_last_error()) > 0);
    REQUIRE(mmhm_monitor_create(nullptr, &mon) == MMHM_ERR_CONFIG);

    mmhm_config_default(&cfg);
    cfg.zscore = 7;
    REQUIRE(mmhm_monitor_create(&cfg, &mon) == MMHM_ERR_CONFIG);

    mmhm_config_default(&cfg);
    REQUIRE(mmhm_monitor_create(&cfg, &mon) == MMHM_OK);
    REQUIRE(std::strlen(mmhm_last_error()) == 0);
    const auto v = cloud(5, 2, 1);
    REQUIRE(mmhm_monitor_push(mon, v.data(), 5, 2, nullptr) == MMHM_ERR_CONFIG); // k = 8 >= N
    mmhm_monitor_destroy(mon);
}

TEST_CASE("isoscore through the C interface", "[capi]")
{
    const std::vector<double> square{1, 0, -1, 0, 0, 1, 0, -1};
    double iso = 0.0;
    REQUIRE(mmhm_isoscore(square.data(), 4, 2, &iso) == MMHM_OK);
    REQUIRE(iso == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(mmhm_isoscore(square.data(), 8, 1, &iso) == MMHM_ERR_CONFIG);
}

TEST_CASE("file-level entry points", "[capi]")
{
    const fs::path dir = fs::temp_directory_path() / "mmhm_capi_run";
    fs::remove_all(dir);
    mmhm_synth_spec spec;
    mmhm_synth_default(&spec);
    spec.kind = "complete_collapse";
    spec.n = 50;
    spec.d = 6;
    spec.epochs = 10;
    spec.onset = 4;
    spec.metric_lag = 2;
    REQUIRE(mmhm_synth(&spec, dir.c_str()) == MMHM_OK);
    REQUIRE(mmhm_run_monitor((dir / "manifest.json").c_str(), 1, MMHM_ZSCORE_DEFAULT, nullptr, 2) == MMHM_OK);

    char* text = nullptr;
    REQUIRE(mmhm_report(dir.c_str(), "csv", &text) == MMHM_OK);
    REQUIRE(std::string(text).rfind("# mmhm metrics schema=1", 0) == 0);
    mmhm_free_string(text);
    REQUIRE(mmhm_report(dir.c_str(), "yaml", &text) == MMHM_ERR_CONFIG);
    REQUIRE(text == nullptr);

    char* json = nullptr;
    REQUIRE(mmhm_analyze(dir.c_str(), "task_metric", 3, 0, 1, &json) == MMHM_OK);
    REQUIRE(std::string(json).find("\"lead\"") != std::string::npos);
    mmhm_free_string(json);
    REQUIRE(mmhm_analyze(dir.c_str(), "loss", 3, 0, 1, nullptr) == MMHM_ERR_ANALYSIS);

    spec.kind = "spiral";
    REQUIRE(mmhm_synth(&spec, dir.c_str()) == MMHM_ERR_CONFIG);
    REQUIRE(mmhm_run_monitor((dir / "absent.json").c_str(), 0, MMHM_ZSCORE_DEFAULT, nullptr, 1) != MMHM_OK);
}
