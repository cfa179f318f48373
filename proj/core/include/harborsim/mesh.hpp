#ifndef HARBORSIM_MESH_HPP
#define HARBORSIM_MESH_HPP

#include "harborsim/geom.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace harborsim::mesh {

enum class Strategy { min_hop, greedy_geo };

/// One-hop beacon as received by a table owner. `sender` is an index into
/// the run's canonical node order (ascending node id).
struct Beacon {
    int sender = -1;
    Vec2 position;
    double rssi = 0.0; // dBm at the receiver
    double timestamp = 0.0;
};

struct NeighborEntry {
    int neighbor = -1;
    double last_beacon = 0.0;
    double rssi = 0.0;
    Vec2 position;
    double expiry = 0.0;
};

/// Per-node table of one-hop neighbors, fed by beacons and aged out after
/// `expiry_factor` missed beacon periods.
class NeighborTable {
public:
    NeighborTable() = default;
    NeighborTable(int owner, double beacon_period, double expiry_factor = 3.0)
        : owner_(owner), beacon_period_(beacon_period), expiry_factor_(expiry_factor) {}

    int owner() const { return owner_; }

    /// Upsert from a beacon that already passed link gating.
    void update(const Beacon& beacon, double now);

    /// Entries alive at `now`. Expired entries are dropped, not returned.
    std::vector<NeighborEntry> entries(double now) const;

    bool contains(int neighbor, double now) const;

    void purge(double now);

private:
    int owner_ = -1;
    double beacon_period_ = 1.0;
    double expiry_factor_ = 3.0;
    std::vector<NeighborEntry> entries_; // kept sorted by neighbor index
};

/// Free-function form of NeighborTable::update.
void update_neighbors(NeighborTable& table, const Beacon& beacon, double now);

/// Immutable per-tick adjacency snapshot over the canonical node order.
/// Edges are symmetric by construction. Adjacency lists are sorted
/// ascending, which makes every traversal tie-break on the lowest node id.
class Topology {
public:
    Topology() = default;

    /// `ids` must be in canonical (ascending) order; `edges` are undirected
    /// index pairs.
    Topology(std::vector<std::string> ids, std::vector<Vec2> positions,
             std::vector<bool> is_rsu, std::span<const std::pair<int, int>> edges);

    int size() const { return static_cast<int>(ids_.size()); }
    const std::string& id(int node) const { return ids_[node]; }
    Vec2 position(int node) const { return positions_[node]; }
    bool is_rsu(int node) const { return is_rsu_[node]; }
    std::span<const int> neighbors(int node) const;
    bool adjacent(int a, int b) const;
    std::span<const int> rsus() const { return rsus_; }

private:
    std::vector<std::string> ids_;
    std::vector<Vec2> positions_;
    std::vector<bool> is_rsu_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<int> rsus_;
};

/// Multi-hop route from a vehicle to a roadside gateway.
struct Path {
    std::vector<int> hops; // source first, gateway last
    int gateway = -1;
    int hop_count() const { return static_cast<int>(hops.size()) - 1; }
};

/// Route computation with reusable scratch buffers; one instance per event
/// loop, results identical to the free function.
class PathFinder {
public:
    std::optional<Path> compute(int source, const Topology& topology, Strategy strategy);

private:
    std::optional<Path> min_hop(int source, const Topology& topology);
    std::optional<Path> greedy_geo(int source, const Topology& topology);

    std::vector<int> parent_;
    std::vector<int> queue_;
};

/// Shortest-hop (breadth-first) or greedy-geographic path from `source` to
/// any RSU. Returns nullopt when no gateway is reachable (or, for
/// greedy_geo, when forwarding stalls in a local minimum).
std::optional<Path> compute_path(int source, const Topology& topology, Strategy strategy);

} // namespace harborsim::mesh

#endif
