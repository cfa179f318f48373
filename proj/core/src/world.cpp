#include "harborsim/world.hpp"

#include <algorithm>
#include <cassert>

namespace harborsim::world {

namespace {

double route_length(const std::vector<Vec2>& route) {
    double total = 0.0;
    for (std::size_t i = 1; i < route.size(); ++i) {
        total += distance(route[i - 1], route[i]);
    }
    return total;
}

} // namespace

World::World(const scenario::Scenario& s) : tick_ms_(s.tick) {
    const std::vector<std::string> order = scenario::canonical_ids(s);
    nodes_.resize(order.size());

    auto slot = [&](const std::string& id) {
        return static_cast<int>(std::lower_bound(order.begin(), order.end(), id) - order.begin());
    };

    for (const auto& rsu : s.rsus) {
        const int i = slot(rsu.id);
        nodes_[i] = NodeState{rsu.id, NodeKind::rsu, rsu.position, 0.0, 0.0, 1, false};
        rsus_.push_back(i);
    }
    for (const auto& v : s.vehicles) {
        const int i = slot(v.id);
        nodes_[i] = NodeState{v.id, NodeKind::vehicle, v.route.front(), 0.0, 0.0, 1, false};
        vehicles_.push_back(i);

        const bool mobile = v.speed > 0.0 && v.route.size() >= 2 && route_length(v.route) > 1e-9;
        if (!mobile) continue;
        Motion m;
        m.node = i;
        m.route = v.route;
        m.policy = v.route_policy;
        m.cruise = v.speed;
        motions_.push_back(std::move(m));
    }
    for (auto& m : motions_) place(m);
    std::sort(vehicles_.begin(), vehicles_.end());
    std::sort(rsus_.begin(), rsus_.end());
}

void World::place(Motion& m) {
    NodeState& node = nodes_[m.node];
    if (m.parked) {
        node.position = m.route.back();
        node.speed = 0.0;
        return;
    }
    // Skip degenerate segments so the heading always has a direction. A
    // degenerate tail wraps (loop) or parks (stop); construction guarantees
    // some segment has length, so the wrap terminates.
    while (true) {
        while (m.segment + 1 < m.route.size() &&
               distance(m.route[m.segment], m.route[m.segment + 1]) <= 1e-12) {
            ++m.segment;
        }
        if (m.segment + 1 < m.route.size()) break;
        if (m.policy == scenario::RoutePolicy::loop) {
            m.segment = 0;
            m.along = 0.0;
        } else {
            m.parked = true;
            node.position = m.route.back();
            node.speed = 0.0;
            return;
        }
    }
    const Vec2 a = m.route[m.segment];
    const Vec2 b = m.route[m.segment + 1];
    const double len = distance(a, b);
    const double f = m.along / len;
    node.position = Vec2{a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f};
    node.speed = m.cruise;
    node.heading = bearing(b - a);
}

void World::step() {
    const double dt = static_cast<double>(tick_ms_) / 1000.0;
    for (auto& m : motions_) {
        if (m.parked) continue;
        double remaining = m.cruise * dt;
        while (remaining > 1e-12) {
            while (m.segment + 1 < m.route.size() &&
                   distance(m.route[m.segment], m.route[m.segment + 1]) <= 1e-12) {
                ++m.segment;
            }
            if (m.segment + 1 >= m.route.size()) {
                if (m.policy == scenario::RoutePolicy::loop) {
                    m.segment = 0;
                    m.along = 0.0;
                    continue;
                }
                m.parked = true;
                break;
            }
            const double len = distance(m.route[m.segment], m.route[m.segment + 1]);
            const double left = len - m.along;
            if (remaining < left) {
                m.along += remaining;
                remaining = 0.0;
            } else {
                remaining -= left;
                ++m.segment;
                m.along = 0.0;
            }
        }
        if (!m.parked && m.segment + 1 >= m.route.size()) {
            // Landed exactly on the final vertex with nothing left to spend.
            if (m.policy == scenario::RoutePolicy::loop) {
                m.segment = 0;
                m.along = 0.0;
            } else {
                m.parked = true;
            }
        }
        place(m);
    }
    now_ms_ += tick_ms_;
}

int World::index_of(const std::string& id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const NodeState& n, const std::string& key) {
                                   return n.id < key;
                               });
    if (it == nodes_.end() || it->id != id) return -1;
    return static_cast<int>(it - nodes_.begin());
}

} // namespace harborsim::world
