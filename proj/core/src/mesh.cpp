#include "harborsim/mesh.hpp"

#include <algorithm>
#include <cassert>

namespace harborsim::mesh {

void NeighborTable::update(const Beacon& beacon, double now) {
    purge(now);
    double expiry = beacon.timestamp + expiry_factor_ * beacon_period_;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), beacon.sender,
                               [](const NeighborEntry& e, int id) { return e.neighbor < id; });
    if (it != entries_.end() && it->neighbor == beacon.sender) {
        it->last_beacon = beacon.timestamp;
        it->rssi = beacon.rssi;
        it->position = beacon.position;
        it->expiry = expiry;
        return;
    }
    entries_.insert(it, NeighborEntry{beacon.sender, beacon.timestamp, beacon.rssi,
                                      beacon.position, expiry});
}

std::vector<NeighborEntry> NeighborTable::entries(double now) const {
    std::vector<NeighborEntry> alive;
    alive.reserve(entries_.size());
    for (const NeighborEntry& e : entries_)
        if (e.expiry >= now) alive.push_back(e);
    return alive;
}

bool NeighborTable::contains(int neighbor, double now) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), neighbor,
                               [](const NeighborEntry& e, int id) { return e.neighbor < id; });
    return it != entries_.end() && it->neighbor == neighbor && it->expiry >= now;
}

void NeighborTable::purge(double now) {
    std::erase_if(entries_, [now](const NeighborEntry& e) { return e.expiry < now; });
}

void update_neighbors(NeighborTable& table, const Beacon& beacon, double now) {
    table.update(beacon, now);
}

Topology::Topology(std::vector<std::string> ids, std::vector<Vec2> positions,
                   std::vector<bool> is_rsu, std::span<const std::pair<int, int>> edges)
    : ids_(std::move(ids)), positions_(std::move(positions)), is_rsu_(std::move(is_rsu)) {
    assert(ids_.size() == positions_.size() && ids_.size() == is_rsu_.size());
    adjacency_.resize(ids_.size());
    for (auto [a, b] : edges) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
    for (auto& list : adjacency_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    for (int i = 0; i < size(); ++i)
        if (is_rsu_[i]) rsus_.push_back(i);
}

std::span<const int> Topology::neighbors(int node) const {
    return adjacency_[node];
}

bool Topology::adjacent(int a, int b) const {
    const auto& list = adjacency_[a];
    return std::binary_search(list.begin(), list.end(), b);
}

std::optional<Path> PathFinder::compute(int source, const Topology& topology,
                                        Strategy strategy) {
    return strategy == Strategy::min_hop ? min_hop(source, topology)
                                         : greedy_geo(source, topology);
}

std::optional<Path> PathFinder::min_hop(int source, const Topology& topology) {
    const int n = topology.size();
    parent_.assign(n, -2); // -2 unvisited, -1 root
    queue_.clear();
    parent_[source] = -1;
    queue_.push_back(source);
    // Breadth-first over sorted adjacency: among equal-hop routes the lowest
    // node id is reached first, so tie-breaking is deterministic.
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        int cur = queue_[head];
        if (topology.is_rsu(cur)) {
            Path path;
            for (int v = cur; v != -1; v = parent_[v]) path.hops.push_back(v);
            std::reverse(path.hops.begin(), path.hops.end());
            path.gateway = cur;
            return path;
        }
        for (int next : topology.neighbors(cur)) {
            if (parent_[next] != -2) continue;
            parent_[next] = cur;
            queue_.push_back(next);
        }
    }
    return std::nullopt;
}

std::optional<Path> PathFinder::greedy_geo(int source, const Topology& topology) {
    if (topology.rsus().empty()) return std::nullopt;

    // Fixed target: the RSU geographically nearest to the source.
    int target = -1;
    double target_dist = 0.0;
    for (int rsu : topology.rsus()) {
        double d = distance(topology.position(source), topology.position(rsu));
        if (target == -1 || d < target_dist) {
            target = rsu;
            target_dist = d;
        }
    }

    Path path;
    path.hops.push_back(source);
    int current = source;
    double current_dist = distance(topology.position(current), topology.position(target));
    while (!topology.is_rsu(current)) {
        int next = -1;
        double next_dist = current_dist;
        for (int cand : topology.neighbors(current)) {
            double d = distance(topology.position(cand), topology.position(target));
            // Strict progress requirement; sorted adjacency keeps ties on the
            // lowest id.
            if (d < next_dist) {
                next = cand;
                next_dist = d;
            }
        }
        if (next == -1) return std::nullopt; // local minimum
        path.hops.push_back(next);
        current = next;
        current_dist = next_dist;
    }
    path.gateway = current;
    return path;
}

std::optional<Path> compute_path(int source, const Topology& topology, Strategy strategy) {
    PathFinder finder;
    return finder.compute(source, topology, strategy);
}

} // namespace harborsim::mesh
