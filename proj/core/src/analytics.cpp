#include "harborsim/analytics.hpp"

#include "harborsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace harborsim::analytics {

const char* to_string(CellClass c) {
    switch (c) {
    case CellClass::direct: return "direct";
    case CellClass::multi_hop: return "multi_hop";
    case CellClass::uncovered: return "uncovered";
    case CellClass::no_data: return "no_data";
    }
    return "?";
}

CellClass CellStats::classify() const {
    if (observations == 0) return CellClass::no_data;
    if (connected() == 0) return CellClass::uncovered;
    if (2 * direct_count >= connected()) return CellClass::direct;
    return CellClass::multi_hop;
}

const CellStats& CoverageGrid::at(int cx, int cy) const {
    static const CellStats empty;
    if (!in_extent(cx, cy)) return empty;
    return cells[static_cast<std::size_t>(cy - min_cy) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(cx - min_cx)];
}

bool CoverageGrid::in_extent(int cx, int cy) const {
    return cx >= min_cx && cx < min_cx + width && cy >= min_cy && cy < min_cy + height;
}

std::int64_t CoverageGrid::total_observations() const {
    std::int64_t total = 0;
    for (const auto& c : cells) total += c.observations;
    return total;
}

CoverageAccumulator::CoverageAccumulator(double cell_size) : cell_size_(cell_size) {
    if (!(cell_size > 0.0)) throw std::domain_error("cell_size must be positive");
}

void CoverageAccumulator::add(Vec2 position, std::optional<int> hops) {
    const int cx = static_cast<int>(std::floor(position.x / cell_size_));
    const int cy = static_cast<int>(std::floor(position.y / cell_size_));
    CellStats& cell = cells_[{cx, cy}];
    ++cell.observations;
    if (hops) {
        if (*hops <= 1) ++cell.direct_count;
        else ++cell.multihop_count;
    }
}

CoverageGrid CoverageAccumulator::build() const {
    CoverageGrid grid;
    grid.cell_size = cell_size_;
    if (cells_.empty()) return grid;

    int min_cx = cells_.begin()->first.first;
    int max_cx = min_cx;
    int min_cy = cells_.begin()->first.second;
    int max_cy = min_cy;
    for (const auto& [key, stats] : cells_) {
        min_cx = std::min(min_cx, key.first);
        max_cx = std::max(max_cx, key.first);
        min_cy = std::min(min_cy, key.second);
        max_cy = std::max(max_cy, key.second);
    }
    grid.min_cx = min_cx;
    grid.min_cy = min_cy;
    grid.width = max_cx - min_cx + 1;
    grid.height = max_cy - min_cy + 1;
    grid.cells.assign(static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height),
                      CellStats{});
    for (const auto& [key, stats] : cells_) {
        grid.cells[static_cast<std::size_t>(key.second - min_cy) *
                       static_cast<std::size_t>(grid.width) +
                   static_cast<std::size_t>(key.first - min_cx)] = stats;
    }
    return grid;
}

void TraceCoverage::on_position(const trace::PositionRecord& r) {
    auto it = hops_.find(r.node);
    acc_.add(Vec2{r.x, r.y}, it == hops_.end() ? std::nullopt : it->second);
}

std::vector<double> disconnection_intervals(std::span<const connman::ConnectivityEvent> events,
                                            double run_end) {
    std::vector<double> intervals;
    std::optional<double> open; // start of the current disconnection
    for (const auto& e : events) {
        if (!e.connected) {
            if (open) {
                throw IntegrityError("event stream: two disconnects in a row at t = " +
                                     std::to_string(e.t));
            }
            open = e.t;
        } else {
            if (!open) {
                throw IntegrityError("event stream: connect without a preceding disconnect at t = " +
                                     std::to_string(e.t));
            }
            intervals.push_back(e.t - *open);
            open.reset();
        }
    }
    if (open) intervals.push_back(run_end - *open);
    return intervals;
}

double DisconnectionHistogram::count_weighted_fraction(double threshold) const {
    if (intervals.empty()) return 1.0;
    std::int64_t within = 0;
    for (double d : intervals) {
        if (d <= threshold) ++within;
    }
    return static_cast<double>(within) / static_cast<double>(intervals.size());
}

double DisconnectionHistogram::time_weighted_fraction(double threshold) const {
    if (total_time <= 0.0) return 1.0;
    double short_disconnected = 0.0;
    for (double d : intervals) {
        if (d <= threshold) short_disconnected += d;
    }
    const double connected = total_time - disconnected_time;
    return (connected + short_disconnected) / total_time;
}

DisconnectionHistogram
disconnection_histogram(std::span<const std::vector<connman::ConnectivityEvent>> per_node,
                        double run_end, double bin_width) {
    if (!(bin_width > 0.0)) throw std::domain_error("bin_width must be positive");
    DisconnectionHistogram h;
    h.bin_width = bin_width;
    for (const auto& events : per_node) {
        h.total_time += run_end;
        for (double d : disconnection_intervals(events, run_end)) {
            h.intervals.push_back(d);
            h.disconnected_time += d;
            const auto bin = static_cast<std::size_t>(std::floor(d / bin_width));
            if (h.bins.size() <= bin) h.bins.resize(bin + 1, 0);
            ++h.bins[bin];
        }
    }
    return h;
}

double effective_rate(std::int64_t size_bytes, double created, double completed) {
    if (!(completed > created)) {
        throw std::domain_error("effective rate needs completed > created");
    }
    return 8.0 * static_cast<double>(size_bytes) / (completed - created);
}

RateSummary effective_rates(std::span<const trace::JobRecord> jobs) {
    RateSummary summary;
    double earliest = 0.0;
    double latest = 0.0;
    bool any = false;
    for (const auto& job : jobs) {
        if (!job.completed) continue;
        summary.per_job.push_back({job.job, effective_rate(job.size, job.created, *job.completed)});
        summary.total_bytes += job.size;
        if (!any) {
            earliest = job.created;
            latest = *job.completed;
            any = true;
        } else {
            earliest = std::min(earliest, job.created);
            latest = std::max(latest, *job.completed);
        }
    }
    if (any) {
        summary.span = latest - earliest;
        summary.aggregate = 8.0 * static_cast<double>(summary.total_bytes) / summary.span;
    }
    return summary;
}

} // namespace harborsim::analytics
