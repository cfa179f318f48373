#ifndef HARBORSIM_WORLD_HPP
#define HARBORSIM_WORLD_HPP

#include "harborsim/geom.hpp"
#include "harborsim/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace harborsim::world {

enum class NodeKind { vehicle, rsu };

struct NodeState {
    std::string id;
    NodeKind kind = NodeKind::vehicle;
    Vec2 position;
    double speed = 0.0;   // m/s, current (0 once a stop-policy route ends)
    double heading = 0.0; // radians, meaningful only while speed > 0
    int boot_partition = 1;
    bool frozen = false;

    bool moving() const { return speed > 0.0; }
};

/// Mutable simulation world: every node in canonical ascending-id order plus
/// the clock. Only the event loop mutates it; analytics read snapshots.
class World {
public:
    explicit World(const scenario::Scenario& s);

    /// Advances every vehicle one tick along its route and the clock by one
    /// tick. Loop routes wrap to the first vertex; stop routes park at the
    /// last vertex with speed 0.
    void step();

    double now() const { return static_cast<double>(now_ms_) / 1000.0; }
    std::int64_t now_ms() const { return now_ms_; }
    std::int64_t tick_ms() const { return tick_ms_; }

    const std::vector<NodeState>& nodes() const { return nodes_; }
    NodeState& node(std::size_t i) { return nodes_[i]; }
    const NodeState& node(std::size_t i) const { return nodes_[i]; }
    int index_of(const std::string& id) const; // -1 when unknown

    const std::vector<int>& vehicle_indices() const { return vehicles_; }
    const std::vector<int>& rsu_indices() const { return rsus_; }

private:
    struct Motion {
        int node = -1;
        std::vector<Vec2> route;
        scenario::RoutePolicy policy = scenario::RoutePolicy::loop;
        double cruise = 0.0;
        std::size_t segment = 0;  // index of the segment's start vertex
        double along = 0.0;       // m traveled into the current segment
        bool parked = false;
    };

    void place(Motion& m);

    std::vector<NodeState> nodes_;
    std::vector<int> vehicles_;
    std::vector<int> rsus_;
    std::vector<Motion> motions_;
    std::int64_t now_ms_ = 0;
    std::int64_t tick_ms_ = 100;
};

} // namespace harborsim::world

#endif
