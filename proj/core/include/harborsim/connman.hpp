#ifndef HARBORSIM_CONNMAN_HPP
#define HARBORSIM_CONNMAN_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace harborsim::connman {

enum class Interface { dsrc, wifi, cellular };

const char* to_string(Interface iface);

/// Relative importance of the five connectivity factors. Scores are
/// positively homogeneous in the weights, so only ratios matter.
struct WeightVector {
    double w_speed = 0.2;
    double w_heading = 0.2;
    double w_hops = 0.2;
    double w_distance = 0.2;
    double w_rssi = 0.2;

    void validate(const char* context = "connman_weights") const;
};

/// Bounds that map raw factor values onto [0, 1] utilities.
struct NormalizationBounds {
    double v_max = 10.0;       // m/s; faster than this scores 0 on speed
    double d_max = 0.0;        // m; 0 means "derive from the radio range at sensitivity"
    double rssi_ref = -30.0;   // dBm; at or above this the signal utility is 1
    double rssi_floor = -95.0; // dBm; at or below this the signal utility is 0

    void validate(const char* context = "connman_bounds") const;
};

/// Raw factor values for one candidate interface at one instant.
struct Factors {
    double speed = 0.0;             // m/s
    double heading_alignment = 1.0; // [0,1], 1 = moving straight at the next hop
    int hop_count = 1;              // >= 1 when a path exists
    double next_hop_distance = 0.0; // m
    double rssi = 0.0;              // dBm, as received from the next hop
};

/// Weighted sum of clamped linear utilities. Throws std::domain_error if any
/// weight is negative.
double score_interface(const Factors& factors, const WeightVector& weights,
                       const NormalizationBounds& bounds);

struct Candidate {
    Interface iface = Interface::dsrc;
    Factors factors;
};

struct InterfaceChoice {
    Interface choice = Interface::dsrc;
    double score = 0.0; // meaningful only when scored
    int hop_count = 0;  // 0 when not on a mesh path
    bool scored = false;
};

/// Picks the default interface for the next packets. Mesh candidates are
/// ranked by score; cellular is taken only when no mesh path exists (and is
/// the immediate pick for a real-time job in that situation). Ties go
/// dsrc > wifi. Returns nullopt when the node is fully offline.
std::optional<InterfaceChoice> select_interface(std::span<const Candidate> mesh_candidates,
                                                bool cellular_enabled,
                                                const WeightVector& weights,
                                                const NormalizationBounds& bounds,
                                                bool job_realtime = false);

/// A connect or disconnect edge for one node.
struct ConnectivityEvent {
    double t = 0.0;
    bool connected = false; // false = disconnect edge
};

/// Edge-detects a time-ordered (timestamp, connected) sequence. A sequence
/// that starts disconnected opens with a disconnect at its first timestamp.
std::vector<ConnectivityEvent>
connectivity_events(std::span<const std::pair<double, bool>> reachability);

} // namespace harborsim::connman

#endif
