#ifndef HARBORSIM_PROBE_HPP
#define HARBORSIM_PROBE_HPP

#include "harborsim/rng.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace harborsim::probe {

struct ProbeConfig {
    int pair_count = 10;
    int train_length = 30;
    std::int64_t probe_size = 1500; // bytes
    double period = 10.0;           // s between probe rounds
    double cross_traffic = 0.0;     // competing load as a fraction of link capacity

    void validate(const std::string& context) const;
};

/// Packet-pair capacity estimate: Ce = 8 * probe_size / median dispersion.
/// Throws std::domain_error on an empty list or a non-positive dispersion.
double estimate_capacity(std::span<const double> pair_dispersions_s, std::int64_t probe_size);

/// Packet-train available bandwidth: A = clamp(Ce * (2 - Ce / R), 0, Ce)
/// where R is the dispersion rate the train achieved.
/// Throws std::domain_error unless Ce > 0 and R > 0.
double estimate_available_bw(double capacity, double train_rate);

struct LinkMetrics {
    double rtt = 0.0;    // ms, mean of samples
    double jitter = 0.0; // ms, mean absolute consecutive difference
    double avail_bw_lossy = 0.0;
};

/// Throws std::domain_error on an empty sample list.
LinkMetrics link_metrics(std::span<const double> rtt_samples_ms, double loss_rate,
                         double avail_bw);

struct ProbeRound {
    double capacity_estimate = 0.0; // bits/s
    double avail_bw_estimate = 0.0; // bits/s
    double rtt = 0.0;               // ms
    double jitter = 0.0;            // ms
    std::int64_t bytes_sent = 0;    // intrusion charged against the data budget
};

/// Runs one measurement round against a fluid-queue link: cross traffic holds
/// a `cross_traffic` share of `true_capacity`, inserting packets between pair
/// probes and stretching train dispersion. The estimators above then invert
/// those observations.
ProbeRound simulate_probe_round(double true_capacity, double cross_traffic,
                                const ProbeConfig& cfg, Rng& rng);

} // namespace harborsim::probe

#endif
