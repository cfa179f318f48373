#include "harborsim/engine.hpp"
#include "harborsim/errors.hpp"
#include "harborsim/report.hpp"
#include "harborsim/scenario.hpp"
#include "harborsim/trace.hpp"
#include "harborsim/version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <system_error>

namespace fs = std::filesystem;

namespace {

// HARBORSIM_LOG: quiet | error | warn | info | debug (default warn)
enum class LogLevel { quiet = 0, error, warn, info, debug };

LogLevel log_level() {
    const char* env = std::getenv("HARBORSIM_LOG");
    if (!env) return LogLevel::warn;
    std::string s(env);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "quiet" || s == "off" || s == "0") return LogLevel::quiet;
    if (s == "error") return LogLevel::error;
    if (s == "warn" || s == "warning") return LogLevel::warn;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
}

const LogLevel g_level = log_level();

void log_line(LogLevel level, const std::string& msg) {
    if (g_level >= level) std::fprintf(stderr, "harborsim: %s\n", msg.c_str());
}

std::string iso_utc_now() {
    const std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunArgs {
    std::string scenario;
    std::string out = ".";
    std::string trace; // empty = <out>/trace.jsonl
    std::optional<std::uint64_t> seed;
};

struct AnalyzeArgs {
    std::string trace;
    std::string report; // empty = <trace dir>/report.json
    harborsim::report::AnalyzeOptions opts;
};

int do_run(const RunArgs& args) {
    auto scenario = harborsim::scenario::load_scenario_file(args.scenario);
    if (args.seed) scenario.seed = *args.seed;
    scenario.validate();

    const fs::path out_dir(args.out);
    fs::create_directories(out_dir);
    const fs::path trace_path = args.trace.empty() ? out_dir / "trace.jsonl"
                                                   : fs::path(args.trace);

    const std::string started = iso_utc_now();
    harborsim::trace::FileSink sink(trace_path);
    harborsim::trace::TraceWriter writer(sink);

    const std::uint64_t seed = scenario.seed;
    harborsim::engine::Simulation sim(std::move(scenario));

    std::function<void(double)> progress;
    if (g_level >= LogLevel::info) {
        progress = [](double frac) {
            const int pct = static_cast<int>(frac * 100.0 + 0.5);
            if (pct % 10 == 0) log_line(LogLevel::info, "run " + std::to_string(pct) + "%");
        };
    }
    const auto stats = sim.run(writer, progress);
    const std::string finished = iso_utc_now();

    nlohmann::ordered_json manifest;
    manifest["scenario"] = args.scenario;
    manifest["seed"] = seed;
    manifest["tool"] = {{"name", "harborsim"}, {"version", harborsim::kVersion}};
    manifest["started"] = started;
    manifest["finished"] = finished;
    manifest["trace"] = trace_path.string();
    manifest["sim_duration"] = stats.sim_duration;
    manifest["ticks"] = stats.ticks;
    manifest["records"] = {{"position", stats.counts.position},
                           {"reachability", stats.counts.reachability},
                           {"choice", stats.counts.choice},
                           {"event", stats.counts.event},
                           {"transfer", stats.counts.transfer},
                           {"probe", stats.counts.probe},
                           {"control", stats.counts.control},
                           {"job", stats.counts.job},
                           {"total", stats.counts.total()}};

    const fs::path manifest_path = out_dir / "manifest.json";
    if (std::FILE* f = std::fopen(manifest_path.string().c_str(), "wb")) {
        const std::string doc = manifest.dump(2) + "\n";
        const std::size_t n = std::fwrite(doc.data(), 1, doc.size(), f);
        const int rc = std::fclose(f);
        if (n != doc.size() || rc != 0) {
            throw std::system_error(errno ? errno : EIO, std::generic_category(),
                                    "write failed for " + manifest_path.string());
        }
    } else {
        throw std::system_error(errno, std::generic_category(),
                                "cannot open " + manifest_path.string());
    }

    log_line(LogLevel::info, "wrote " + std::to_string(stats.counts.total()) + " records over " +
                                 std::to_string(stats.ticks) + " ticks to " + trace_path.string());
    std::printf("trace: %s\nmanifest: %s\n", trace_path.string().c_str(),
                manifest_path.string().c_str());
    return 0;
}

int do_analyze(const AnalyzeArgs& args) {
    const fs::path trace_path(args.trace);
    const fs::path report_path = args.report.empty()
                                     ? trace_path.parent_path() / "report.json"
                                     : fs::path(args.report);

    const auto analysis = harborsim::report::analyze_trace(trace_path, args.opts);
    const auto written = harborsim::report::write_report(analysis, args.opts, report_path);
    for (const auto& p : written) log_line(LogLevel::info, "wrote " + p.string());
    std::printf("report: %s\n", report_path.string().c_str());
    return 0;
}

int do_validate(const std::string& scenario_path) {
    auto scenario = harborsim::scenario::load_scenario_file(scenario_path);
    scenario.validate();
    std::printf("scenario OK: %zu vehicles, %zu RSUs, %g s at %lld ms ticks, seed %llu\n",
                scenario.vehicles.size(), scenario.rsus.size(), scenario.duration,
                static_cast<long long>(scenario.tick),
                static_cast<unsigned long long>(scenario.seed));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"HarborNet vehicular mesh simulator and trace analytics"};
    app.set_version_flag("--version", std::string("harborsim ") + harborsim::kVersion);
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute a scenario and write trace + manifest");
    run->add_option("--scenario", run_args.scenario, "Scenario config file")->required();
    run->add_option("--out", run_args.out, "Output directory (created if missing)");
    run->add_option("--trace", run_args.trace, "Trace file path (default <out>/trace.jsonl)");
    run->add_option("--seed", run_args.seed, "Override the scenario seed");

    AnalyzeArgs an_args;
    auto* analyze = app.add_subcommand("analyze", "Build a report from a trace");
    analyze->add_option("--trace", an_args.trace, "Trace file to analyze")->required();
    analyze->add_option("--report", an_args.report,
                        "Report path (default report.json next to the trace)");
    analyze->add_option("--cell-size", an_args.opts.cell_size, "Coverage cell edge, m");
    analyze->add_option("--bin-width", an_args.opts.bin_width, "Histogram bin width, s");
    analyze->add_option("--threshold", an_args.opts.threshold, "Short-disconnection cutoff, s");

    std::string validate_scenario;
    auto* validate = app.add_subcommand("validate", "Check a scenario config");
    validate->add_option("--scenario", validate_scenario, "Scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(run_args);
        if (analyze->parsed()) return do_analyze(an_args);
        if (validate->parsed()) return do_validate(validate_scenario);
    } catch (const harborsim::TraceFormatError& e) {
        log_line(LogLevel::error, std::string("trace: ") + e.what());
        return 2;
    } catch (const harborsim::ParseError& e) {
        log_line(LogLevel::error, e.what());
        return 2;
    } catch (const harborsim::ValidationError& e) {
        log_line(LogLevel::error, e.what());
        return 2;
    } catch (const std::system_error& e) {
        log_line(LogLevel::error, e.what());
        return 3;
    } catch (const std::exception& e) {
        log_line(LogLevel::error, std::string("internal: ") + e.what());
        return 1;
    }
    return 0;
}
