#ifndef HARBORSIM_ENGINE_HPP
#define HARBORSIM_ENGINE_HPP

#include "harborsim/connman.hpp"
#include "harborsim/control.hpp"
#include "harborsim/dtn.hpp"
#include "harborsim/mesh.hpp"
#include "harborsim/radio.hpp"
#include "harborsim/scenario.hpp"
#include "harborsim/trace.hpp"
#include "harborsim/world.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace harborsim::engine {

struct RunStats {
    trace::RecordCounts counts;
    std::int64_t ticks = 0;
    double sim_duration = 0.0; // s
};

/// One deterministic simulation run. Every stochastic draw is derived from
/// the scenario seed through keyed substreams, so identical scenarios give
/// byte-identical traces.
class Simulation {
public:
    explicit Simulation(scenario::Scenario s);

    /// Executes the whole run, streaming records into `writer`. `progress`
    /// (when set) receives the completed fraction about once per percent.
    RunStats run(trace::TraceWriter& writer,
                 const std::function<void(double)>& progress = {});

    const world::World& world() const { return world_; }
    const scenario::Scenario& config() const { return scenario_; }

private:
    void tick(trace::TraceWriter& writer);
    void finish(trace::TraceWriter& writer);

    bool alive(int node) const;
    double tx_power_of(int node) const;
    void update_links();
    void update_wifi();
    void emit_beacons(double now);
    mesh::Topology build_topology() const;
    void emit_job_records(int node, double now, trace::TraceWriter& writer);

    scenario::Scenario scenario_;
    world::World world_;
    int n_ = 0;

    std::vector<double> sens_offset_;            // per node, dB
    std::vector<radio::LinkState> dsrc_state_;   // rx-major n*n directed gates
    std::vector<double> rssi_;                   // rx-major n*n, this tick
    std::vector<radio::LinkState> wifi_state_;   // vehicle-slot x rsu-slot gates
    std::vector<double> wifi_rssi_;              // same shape
    std::vector<mesh::NeighborTable> tables_;
    mesh::PathFinder path_finder_;
    std::vector<std::optional<mesh::Path>> paths_;

    std::vector<dtn::TransferQueue> queues_;     // per node; vehicles only used
    struct PendingJob {
        scenario::JobSpec spec;
        int node = -1;
    };
    std::vector<PendingJob> pending_jobs_;       // sorted by created
    std::size_t next_job_ = 0;
    std::set<std::string> job_record_done_;

    std::vector<int> prev_choice_;               // -1 none, else Interface index
    std::vector<char> prev_connected_;
    std::vector<control::WatchdogState> watchdogs_;
    std::vector<std::int64_t> reboot_until_ms_;  // -1 = not rebooting
    control::NodeRegistry registry_;
    std::vector<int> reg_seq_;
    std::optional<control::DeploymentRunner> deploy_;

    std::vector<std::int64_t> probe_round_;      // rounds completed per node
    std::vector<std::int64_t> probe_bytes_;      // intrusion this tick, bytes

    std::int64_t beacon_ms_ = 1000;
    std::int64_t probe_ms_ = 10000;
    std::int64_t heartbeat_ms_ = 10000;
    double effective_rate_bps_ = 0.0;            // duty-adjusted dsrc rate
    double wifi_rate_bps_ = 0.0;
};

} // namespace harborsim::engine

#endif
