#ifndef HARBORSIM_SCENARIO_HPP
#define HARBORSIM_SCENARIO_HPP

#include "harborsim/connman.hpp"
#include "harborsim/control.hpp"
#include "harborsim/geom.hpp"
#include "harborsim/mesh.hpp"
#include "harborsim/probe.hpp"
#include "harborsim/radio.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace harborsim::scenario {

enum class RoutePolicy { loop, stop };

struct RsuSpec {
    std::string id;
    Vec2 position;
};

struct VehicleSpec {
    std::string id;
    std::vector<Vec2> route; // polyline waypoints, >= 1 vertex
    double speed = 0.0;      // m/s cruise speed
    RoutePolicy route_policy = RoutePolicy::loop;
};

/// Seed data for one transfer job, resolved into the owning node's queue at
/// its creation time.
struct JobSpec {
    std::string id;
    std::string node;
    std::string direction = "upload";
    std::int64_t size = 0; // bytes
    int priority = 0;
    double created = 0.0;  // s
    double deadline = 0.0; // s; 0 in the config means created + default_deadline
};

struct MeshConfig {
    mesh::Strategy strategy = mesh::Strategy::min_hop;
    double beacon_period = 1.0;  // s
    double expiry_factor = 3.0;  // missed periods before a neighbor ages out
};

struct CellularConfig {
    bool enabled = true;
    double rate = 1e6; // bits/s backhaul budget per node
};

struct WifiConfig {
    bool enabled = false;
    radio::RadioParams params; // hotspot radio at the RSUs, single hop
};

struct DeployPlan {
    bool enabled = false;
    std::string node;
    double at = 0.0; // s
    control::DeployDurations durations;
};

struct ControlConfig {
    control::WatchdogConfig watchdog;
    DeployPlan deploy;
};

struct Scenario {
    std::uint64_t seed = 1;
    double duration = 0.0;   // s
    std::int64_t tick = 100; // ms
    Rect map_bounds{0.0, 0.0, 1000.0, 1000.0};
    std::vector<RsuSpec> rsus;
    std::vector<VehicleSpec> vehicles;
    radio::RadioParams radio_params;
    connman::WeightVector connman_weights;
    connman::NormalizationBounds connman_bounds; // d_max/rssi_floor derive from radio when unset
    std::vector<JobSpec> dtn_jobs;
    probe::ProbeConfig probe_config;
    MeshConfig mesh_config;
    CellularConfig cellular;
    WifiConfig wifi;
    ControlConfig control;
    double default_deadline = 1800.0; // s after creation

    std::int64_t duration_ms() const;
    std::int64_t tick_count() const;

    /// Throws ValidationError naming the offending field and value.
    void validate() const;
};

/// Parses and validates a JSON scenario document. Unknown fields are
/// rejected. Throws ParseError on malformed text, ValidationError on
/// constraint violations.
Scenario load_scenario(const std::string& config_text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Canonical ascending-id order over all nodes (RSUs and vehicles), the
/// index space shared by mesh topologies and traces.
std::vector<std::string> canonical_ids(const Scenario& s);

const char* to_string(RoutePolicy p);

} // namespace harborsim::scenario

#endif
