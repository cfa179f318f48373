#include "harborsim/connman.hpp"

#include "harborsim/errors.hpp"
#include "harborsim/geom.hpp"

#include <sstream>
#include <stdexcept>

namespace harborsim::connman {

const char* to_string(Interface iface) {
    switch (iface) {
    case Interface::dsrc: return "dsrc";
    case Interface::wifi: return "wifi";
    case Interface::cellular: return "cellular";
    }
    return "?";
}

void WeightVector::validate(const char* context) const {
    const double w[] = {w_speed, w_heading, w_hops, w_distance, w_rssi};
    const char* names[] = {"w_speed", "w_heading", "w_hops", "w_distance", "w_rssi"};
    bool any_positive = false;
    for (int i = 0; i < 5; ++i) {
        if (w[i] < 0.0) {
            std::ostringstream msg;
            msg << context << "." << names[i] << " = " << w[i] << " violates: weights >= 0";
            throw ValidationError(msg.str());
        }
        any_positive = any_positive || w[i] > 0.0;
    }
    if (!any_positive)
        throw ValidationError(std::string(context) + ": at least one weight must be > 0");
}

void NormalizationBounds::validate(const char* context) const {
    auto fail = [&](const char* field, double value, const char* rule) {
        std::ostringstream msg;
        msg << context << "." << field << " = " << value << " violates: " << rule;
        throw ValidationError(msg.str());
    };
    if (v_max <= 0.0) fail("v_max", v_max, "v_max > 0");
    if (d_max < 0.0) fail("d_max", d_max, "d_max >= 0");
    if (rssi_ref <= rssi_floor) fail("rssi_ref", rssi_ref, "rssi_ref > rssi_floor");
}

double score_interface(const Factors& f, const WeightVector& w,
                       const NormalizationBounds& b) {
    if (w.w_speed < 0 || w.w_heading < 0 || w.w_hops < 0 || w.w_distance < 0 ||
        w.w_rssi < 0)
        throw std::domain_error("score_interface: weights must be non-negative");

    double u_speed = clamp01(1.0 - f.speed / b.v_max);
    double u_heading = clamp01(f.heading_alignment);
    double u_hops = f.hop_count >= 1 ? 1.0 / static_cast<double>(f.hop_count) : 0.0;
    double u_distance = b.d_max > 0.0 ? clamp01(1.0 - f.next_hop_distance / b.d_max) : 0.0;
    double u_rssi = clamp01((f.rssi - b.rssi_floor) / (b.rssi_ref - b.rssi_floor));

    return w.w_speed * u_speed + w.w_heading * u_heading + w.w_hops * u_hops +
           w.w_distance * u_distance + w.w_rssi * u_rssi;
}

std::optional<InterfaceChoice> select_interface(std::span<const Candidate> mesh_candidates,
                                                bool cellular_enabled,
                                                const WeightVector& weights,
                                                const NormalizationBounds& bounds,
                                                bool job_realtime) {
    (void)job_realtime; // urgency flag; with no mesh path the pick is cellular either way

    if (mesh_candidates.empty()) {
        if (!cellular_enabled) return std::nullopt;
        InterfaceChoice c;
        c.choice = Interface::cellular;
        c.scored = false;
        c.hop_count = 0;
        return c;
    }

    const Candidate* best = nullptr;
    double best_score = 0.0;
    for (const Candidate& cand : mesh_candidates) {
        double s = score_interface(cand.factors, weights, bounds);
        // Ties break on the fixed order dsrc > wifi > cellular, which is the
        // enum order.
        if (!best || s > best_score ||
            (s == best_score && static_cast<int>(cand.iface) < static_cast<int>(best->iface))) {
            best = &cand;
            best_score = s;
        }
    }
    InterfaceChoice c;
    c.choice = best->iface;
    c.score = best_score;
    c.hop_count = best->factors.hop_count;
    c.scored = true;
    return c;
}

std::vector<ConnectivityEvent>
connectivity_events(std::span<const std::pair<double, bool>> reachability) {
    std::vector<ConnectivityEvent> events;
    bool prev = true; // a leading disconnected sample must open an interval
    bool first = true;
    for (const auto& [t, connected] : reachability) {
        if (first) {
            if (!connected) events.push_back({t, false});
            prev = connected;
            first = false;
            continue;
        }
        if (connected != prev) events.push_back({t, connected});
        prev = connected;
    }
    return events;
}

} // namespace harborsim::connman
