#ifndef HARBORSIM_REPORT_HPP
#define HARBORSIM_REPORT_HPP

#include "harborsim/analytics.hpp"
#include "harborsim/dtn.hpp"
#include "harborsim/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace harborsim::report {

struct AnalyzeOptions {
    double cell_size = 50.0;  // m
    double bin_width = 60.0;  // s
    double threshold = 300.0; // s

    void validate() const; // throws ValidationError
};

struct ProbeSummary {
    std::int64_t rounds = 0;
    double median_capacity = 0.0; // bits/s
    double median_avail_bw = 0.0; // bits/s
    double median_rtt = 0.0;      // ms
};

struct JobStateCounts {
    std::int64_t completed = 0;
    std::int64_t fallback_completed = 0;
    std::int64_t failed_deadline = 0;
    std::int64_t unfinished = 0;

    std::int64_t total() const {
        return completed + fallback_completed + failed_deadline + unfinished;
    }
};

/// Everything analyze derives from one trace, in memory.
struct Analysis {
    trace::RecordCounts counts;
    double run_end = 0.0; // latest record timestamp, s
    analytics::CoverageGrid coverage;
    analytics::DisconnectionHistogram histogram;
    double count_weighted = 1.0; // fraction of intervals <= threshold
    double time_weighted = 1.0;  // fraction of time outside long outages
    analytics::RateSummary rates;
    dtn::InterfaceTotals totals;
    JobStateCounts job_states;
    std::vector<trace::JobRecord> jobs;
    ProbeSummary probes;
};

/// Single streaming pass over the trace file. Throws TraceFormatError on
/// malformed lines and std::system_error when the file cannot be read.
Analysis analyze_trace(const std::filesystem::path& trace_path, const AnalyzeOptions& opts);

/// The report document. Pure function of the analysis, so re-running analyze
/// over the same trace reproduces it byte for byte.
std::string render_report(const Analysis& a, const AnalyzeOptions& opts);

/// Writes the report plus three plot-ready CSV tables next to it
/// (<stem>.coverage.csv, <stem>.disconnections.csv, <stem>.rates.csv).
/// Returns the paths written.
std::vector<std::filesystem::path> write_report(const Analysis& a, const AnalyzeOptions& opts,
                                                const std::filesystem::path& report_path);

} // namespace harborsim::report

#endif
