#ifndef HARBORSIM_ANALYTICS_HPP
#define HARBORSIM_ANALYTICS_HPP

#include "harborsim/connman.hpp"
#include "harborsim/geom.hpp"
#include "harborsim/trace.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace harborsim::analytics {

enum class CellClass { direct, multi_hop, uncovered, no_data };

const char* to_string(CellClass c);

struct CellStats {
    std::int64_t observations = 0;
    std::int64_t direct_count = 0;   // 1-hop samples
    std::int64_t multihop_count = 0; // >= 2-hop samples

    std::int64_t connected() const { return direct_count + multihop_count; }

    /// direct when at least half of the connected samples are one hop;
    /// multi_hop when connected otherwise; uncovered when every sample was
    /// offline; no_data when the cell was never visited.
    CellClass classify() const;
};

/// Map-wide coverage raster. Cell (cx, cy) spans
/// [cx*cell_size, (cx+1)*cell_size) on each axis; the stored extent is the
/// bounding box of the observed cells.
struct CoverageGrid {
    double cell_size = 0.0;
    int min_cx = 0;
    int min_cy = 0;
    int width = 0;  // cells
    int height = 0; // cells
    std::vector<CellStats> cells; // row-major, y-major over [min_cy, min_cy+height)

    const CellStats& at(int cx, int cy) const;
    bool in_extent(int cx, int cy) const;
    std::int64_t total_observations() const;
};

class CoverageAccumulator {
public:
    explicit CoverageAccumulator(double cell_size); // throws on cell_size <= 0

    /// One per-tick sample: where the node was and how many hops its gateway
    /// path had (nullopt = unreachable).
    void add(Vec2 position, std::optional<int> hops);

    CoverageGrid build() const;

private:
    double cell_size_;
    std::map<std::pair<int, int>, CellStats> cells_;
};

/// Stream adapter that joins reachability and position records per node as
/// they arrive in time order (reachability precedes position within a tick).
class TraceCoverage {
public:
    explicit TraceCoverage(double cell_size) : acc_(cell_size) {}

    void on_reachability(const trace::ReachabilityRecord& r) { hops_[r.node] = r.hops; }
    void on_position(const trace::PositionRecord& r);
    CoverageGrid build() const { return acc_.build(); }

private:
    CoverageAccumulator acc_;
    std::map<std::string, std::optional<int>> hops_;
};

/// Closed disconnection intervals for one node. Events must alternate;
/// a trailing open disconnection closes at run_end. Throws IntegrityError
/// on a non-alternating stream.
std::vector<double> disconnection_intervals(std::span<const connman::ConnectivityEvent> events,
                                            double run_end);

struct DisconnectionHistogram {
    double bin_width = 0.0;
    std::vector<std::int64_t> bins;  // bin k counts durations in [k*w, (k+1)*w)
    std::vector<double> intervals;   // raw durations, s
    double total_time = 0.0;         // summed per-node observation windows, s
    double disconnected_time = 0.0;  // s

    std::int64_t interval_count() const { return static_cast<std::int64_t>(intervals.size()); }

    /// Fraction of intervals no longer than threshold; 1.0 when there are none.
    double count_weighted_fraction(double threshold) const;

    /// Fraction of total time spent connected or inside a short (<= threshold)
    /// disconnection; 1.0 when total_time is 0.
    double time_weighted_fraction(double threshold) const;
};

/// Pools every node's intervals into one histogram over [0, run_end].
DisconnectionHistogram
disconnection_histogram(std::span<const std::vector<connman::ConnectivityEvent>> per_node,
                        double run_end, double bin_width);

/// Overall rate of one finished job including its disconnected time.
/// Throws std::domain_error unless completed > created.
double effective_rate(std::int64_t size_bytes, double created, double completed);

struct RateSummary {
    struct PerJob {
        std::string id;
        double rate = 0.0; // bits/s
    };
    std::vector<PerJob> per_job;
    std::int64_t total_bytes = 0;
    double span = 0.0;      // earliest creation to latest completion, s
    double aggregate = 0.0; // bits/s over the span; 0 when no jobs finished
};

/// Rates over the finished jobs in a set of job summaries; unfinished jobs
/// are ignored.
RateSummary effective_rates(std::span<const trace::JobRecord> jobs);

} // namespace harborsim::analytics

#endif
