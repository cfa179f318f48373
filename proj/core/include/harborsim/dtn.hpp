#ifndef HARBORSIM_DTN_HPP
#define HARBORSIM_DTN_HPP

#include "harborsim/connman.hpp"
#include "harborsim/trace.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace harborsim::dtn {

enum class JobState {
    queued,
    active,
    suspended,
    completed,          // finished over mesh/wifi service
    fallback_completed, // remainder finished over cellular after the deadline
    failed_deadline,    // deadline passed with cellular disabled; terminal
};

const char* to_string(JobState s);

struct TransferJob {
    std::string id;
    std::string direction = "upload"; // upload | download, symmetric service
    std::int64_t size = 0;            // bytes
    int priority = 0;                 // higher serves first
    double created = 0.0;             // s
    double deadline = 0.0;            // s
    std::int64_t bytes_done = 0;
    std::array<std::int64_t, 3> ledger{}; // indexed by connman::Interface
    JobState state = JobState::queued;
    bool fallback = false; // past deadline, remainder rides cellular
    std::optional<double> completed_at;

    std::int64_t remaining() const { return size - bytes_done; }
    std::int64_t ledger_total() const { return ledger[0] + ledger[1] + ledger[2]; }
    bool terminal() const {
        return state == JobState::completed || state == JobState::fallback_completed ||
               state == JobState::failed_deadline;
    }
};

/// One (job, interface) slice of a tick's traffic. bytes > 0 always.
struct ServiceSlice {
    std::string job;
    connman::Interface iface = connman::Interface::dsrc;
    std::int64_t bytes = 0;
    double rate = 0.0; // bits/s offered during the tick
    bool completed = false;
};

/// Whole bytes a rate can move in one tick. Truncates; never overshoots.
std::int64_t tick_budget_bytes(double rate_bps, double dt_s);

/// Per-node job queue with strict (priority desc, created asc, id asc) order.
/// Service is head-of-queue: one job at a time, leftover budget cascading to
/// the next job when the head completes mid-tick.
class TransferQueue {
public:
    /// Throws ValidationError on duplicate id, size <= 0, or deadline <= created.
    void enqueue(TransferJob job);

    /// Mesh-lane service for one tick starting at `now`. When disconnected,
    /// every non-terminal job suspends with progress retained. Jobs in
    /// cellular fallback are never touched here.
    std::vector<ServiceSlice> tick_transfer(bool connected, connman::Interface iface,
                                            double available_rate, double dt_s, double now);

    /// Deadline sweep plus cellular-lane service for one tick. Jobs whose
    /// deadline has passed move to the fallback lane (or fail terminally when
    /// cellular is off) and drain at cellular_rate on this and later ticks.
    std::vector<ServiceSlice> deadline_fallback(double now, double dt_s, double cellular_rate,
                                                bool cellular_enabled);

    /// Next job the mesh lane would serve, or nullptr.
    const TransferJob* head() const;

    const std::vector<TransferJob>& jobs() const { return jobs_; }
    bool all_terminal() const;

private:
    TransferJob* mesh_head();
    std::vector<TransferJob> jobs_; // kept in queue order
};

struct InterfaceTotals {
    std::map<std::string, std::int64_t> by_interface;
    std::map<std::string, std::int64_t> by_gateway; // mesh records only
};

/// Exact sums over transfer records; gateway loads regroup mesh traffic by
/// the path's endpoint that tick.
InterfaceTotals interface_accounting(std::span<const trace::TransferRecord> records);

} // namespace harborsim::dtn

#endif
