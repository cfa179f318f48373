#include "harborsim/report.hpp"

#include "harborsim/errors.hpp"
#include "harborsim/version.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <fstream>
#include <map>
#include <system_error>

namespace harborsim::report {

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    if (v.size() % 2 == 1) return v[mid];
    return (v[mid - 1] + v[mid]) / 2.0;
}

char class_code(analytics::CellClass c) {
    switch (c) {
    case analytics::CellClass::direct: return 'D';
    case analytics::CellClass::multi_hop: return 'M';
    case analytics::CellClass::uncovered: return 'U';
    case analytics::CellClass::no_data: return '.';
    }
    return '?';
}

void require(bool ok, const std::string& field, double value, const std::string& rule) {
    if (!ok) {
        throw ValidationError("analyze_options." + field + " = " + fmt(value) +
                              " violates: " + rule);
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::system_error(errno, std::generic_category(),
                                "cannot open " + path.string());
    }
    return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out.good()) {
        throw std::system_error(errno ? errno : EIO, std::generic_category(),
                                "write failed for " + path.string());
    }
}

} // namespace

void AnalyzeOptions::validate() const {
    require(cell_size > 0.0, "cell_size", cell_size, "> 0");
    require(bin_width > 0.0, "bin_width", bin_width, "> 0");
    require(threshold >= 0.0, "threshold", threshold, ">= 0");
}

Analysis analyze_trace(const std::filesystem::path& trace_path, const AnalyzeOptions& opts) {
    opts.validate();

    analytics::TraceCoverage coverage(opts.cell_size);
    std::map<std::string, std::vector<connman::ConnectivityEvent>> events;
    std::vector<trace::TransferRecord> transfers;
    std::vector<trace::JobRecord> jobs;
    std::vector<double> capacities;
    std::vector<double> avail_bws;
    std::vector<double> rtts;
    double run_end = 0.0;

    const auto track = [&run_end](double t) { run_end = std::max(run_end, t); };

    trace::Handler handler;
    handler.position = [&](const trace::PositionRecord& r) {
        track(r.t);
        coverage.on_position(r);
        events.try_emplace(r.node); // every observed node gets an event stream
    };
    handler.reachability = [&](const trace::ReachabilityRecord& r) {
        track(r.t);
        coverage.on_reachability(r);
    };
    handler.choice = [&](const trace::ChoiceRecord& r) { track(r.t); };
    handler.event = [&](const trace::EventRecord& r) {
        track(r.t);
        events[r.node].push_back(connman::ConnectivityEvent{r.t, r.connected});
    };
    handler.transfer = [&](const trace::TransferRecord& r) {
        track(r.t);
        transfers.push_back(r);
    };
    handler.probe = [&](const trace::ProbeRecord& r) {
        track(r.t);
        capacities.push_back(r.capacity);
        avail_bws.push_back(r.avail_bw);
        rtts.push_back(r.rtt);
    };
    handler.control = [&](const trace::ControlRecord& r) { track(r.t); };
    handler.job = [&](const trace::JobRecord& r) {
        track(r.t);
        jobs.push_back(r);
    };

    Analysis a;
    a.counts = trace::read_trace_file(trace_path, handler);
    a.run_end = run_end;
    a.coverage = coverage.build();

    std::vector<std::vector<connman::ConnectivityEvent>> per_node;
    per_node.reserve(events.size());
    for (auto& [node, stream] : events) per_node.push_back(std::move(stream));
    a.histogram = analytics::disconnection_histogram(per_node, run_end, opts.bin_width);
    a.count_weighted = a.histogram.count_weighted_fraction(opts.threshold);
    a.time_weighted = a.histogram.time_weighted_fraction(opts.threshold);

    a.rates = analytics::effective_rates(jobs);
    a.totals = dtn::interface_accounting(transfers);
    for (const auto& job : jobs) {
        if (job.state == "completed") ++a.job_states.completed;
        else if (job.state == "fallback_completed") ++a.job_states.fallback_completed;
        else if (job.state == "failed_deadline") ++a.job_states.failed_deadline;
        else ++a.job_states.unfinished;
    }
    a.jobs = std::move(jobs);

    a.probes.rounds = static_cast<std::int64_t>(capacities.size());
    a.probes.median_capacity = median(std::move(capacities));
    a.probes.median_avail_bw = median(std::move(avail_bws));
    a.probes.median_rtt = median(std::move(rtts));
    return a;
}

std::string render_report(const Analysis& a, const AnalyzeOptions& opts) {
    using json = nlohmann::ordered_json;
    json j;
    j["tool"] = {{"name", "harborsim"}, {"version", kVersion}};
    j["options"] = {{"cell_size", opts.cell_size},
                    {"bin_width", opts.bin_width},
                    {"threshold", opts.threshold}};
    j["records"] = {{"position", a.counts.position},
                    {"reachability", a.counts.reachability},
                    {"choice", a.counts.choice},
                    {"event", a.counts.event},
                    {"transfer", a.counts.transfer},
                    {"probe", a.counts.probe},
                    {"control", a.counts.control},
                    {"job", a.counts.job},
                    {"total", a.counts.total()}};
    j["run_end"] = a.run_end;

    const auto& grid = a.coverage;
    std::int64_t n_direct = 0, n_multi = 0, n_uncovered = 0, n_nodata = 0;
    json rows = json::array();
    for (int cy = grid.min_cy + grid.height - 1; cy >= grid.min_cy; --cy) {
        std::string row;
        row.reserve(static_cast<std::size_t>(grid.width));
        for (int cx = grid.min_cx; cx < grid.min_cx + grid.width; ++cx) {
            const auto cls = grid.at(cx, cy).classify();
            row.push_back(class_code(cls));
            switch (cls) {
            case analytics::CellClass::direct: ++n_direct; break;
            case analytics::CellClass::multi_hop: ++n_multi; break;
            case analytics::CellClass::uncovered: ++n_uncovered; break;
            case analytics::CellClass::no_data: ++n_nodata; break;
            }
        }
        rows.push_back(row);
    }
    j["coverage"] = {{"cell_size", grid.cell_size},
                     {"extent",
                      {{"min_cx", grid.min_cx},
                       {"min_cy", grid.min_cy},
                       {"width", grid.width},
                       {"height", grid.height}}},
                     {"observations", grid.total_observations()},
                     {"class_counts",
                      {{"direct", n_direct},
                       {"multi_hop", n_multi},
                       {"uncovered", n_uncovered},
                       {"no_data", n_nodata}}},
                     {"rows", rows}};

    const auto& h = a.histogram;
    json bins = json::array();
    for (std::size_t k = 0; k < h.bins.size(); ++k) {
        bins.push_back({{"lo", static_cast<double>(k) * h.bin_width},
                        {"hi", static_cast<double>(k + 1) * h.bin_width},
                        {"count", h.bins[k]}});
    }
    j["disconnections"] = {{"bin_width", h.bin_width},
                           {"interval_count", h.interval_count()},
                           {"total_time", h.total_time},
                           {"disconnected_time", h.disconnected_time},
                           {"threshold", opts.threshold},
                           {"count_weighted_fraction", a.count_weighted},
                           {"time_weighted_fraction", a.time_weighted},
                           {"bins", bins}};

    json rates = json::array();
    for (const auto& pj : a.rates.per_job) {
        rates.push_back({{"job", pj.id}, {"rate_bps", pj.rate}});
    }
    j["transfers"] = {{"jobs",
                       {{"completed", a.job_states.completed},
                        {"fallback_completed", a.job_states.fallback_completed},
                        {"failed_deadline", a.job_states.failed_deadline},
                        {"unfinished", a.job_states.unfinished}}},
                      {"by_interface", a.totals.by_interface},
                      {"by_gateway", a.totals.by_gateway},
                      {"total_bytes", a.rates.total_bytes},
                      {"span", a.rates.span},
                      {"aggregate_rate_bps", a.rates.aggregate},
                      {"rates", rates}};

    j["probes"] = {{"rounds", a.probes.rounds},
                   {"median_capacity_bps", a.probes.median_capacity},
                   {"median_avail_bw_bps", a.probes.median_avail_bw},
                   {"median_rtt_ms", a.probes.median_rtt}};

    return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_report(const Analysis& a, const AnalyzeOptions& opts,
                                                const std::filesystem::path& report_path) {
    std::vector<std::filesystem::path> written;

    {
        auto out = open_out(report_path);
        const std::string doc = render_report(a, opts);
        out.write(doc.data(), static_cast<std::streamsize>(doc.size()));
        finish_out(out, report_path);
        written.push_back(report_path);
    }

    auto sibling = [&report_path](const char* suffix) {
        std::filesystem::path p = report_path;
        p.replace_extension();
        p += suffix;
        return p;
    };

    {
        const auto path = sibling(".coverage.csv");
        auto out = open_out(path);
        out << "cx,cy,class,observations,direct,multi_hop\n";
        const auto& grid = a.coverage;
        for (int cy = grid.min_cy; cy < grid.min_cy + grid.height; ++cy) {
            for (int cx = grid.min_cx; cx < grid.min_cx + grid.width; ++cx) {
                const auto& cell = grid.at(cx, cy);
                out << cx << ',' << cy << ',' << analytics::to_string(cell.classify()) << ','
                    << cell.observations << ',' << cell.direct_count << ','
                    << cell.multihop_count << '\n';
            }
        }
        finish_out(out, path);
        written.push_back(path);
    }

    {
        const auto path = sibling(".disconnections.csv");
        auto out = open_out(path);
        out << "bin_lo_s,bin_hi_s,count\n";
        const auto& h = a.histogram;
        for (std::size_t k = 0; k < h.bins.size(); ++k) {
            out << fmt(static_cast<double>(k) * h.bin_width) << ','
                << fmt(static_cast<double>(k + 1) * h.bin_width) << ',' << h.bins[k] << '\n';
        }
        finish_out(out, path);
        written.push_back(path);
    }

    {
        const auto path = sibling(".rates.csv");
        auto out = open_out(path);
        out << "job,node,size_bytes,created_s,completed_s,rate_bps\n";
        for (const auto& job : a.jobs) {
            if (!job.completed) continue;
            out << job.job << ',' << job.node << ',' << job.size << ',' << fmt(job.created)
                << ',' << fmt(*job.completed) << ','
                << fmt(analytics::effective_rate(job.size, job.created, *job.completed)) << '\n';
        }
        finish_out(out, path);
        written.push_back(path);
    }

    return written;
}

} // namespace harborsim::report
