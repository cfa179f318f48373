#include "harborsim/probe.hpp"

#include "harborsim/errors.hpp"
#include "harborsim/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace harborsim::probe {

namespace {

void require(bool ok, const std::string& context, const std::string& what) {
    if (!ok) throw ValidationError(context + " violates: " + what);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

void ProbeConfig::validate(const std::string& context) const {
    require(pair_count >= 1, context + ".pair_count = " + std::to_string(pair_count),
            "pair_count >= 1");
    require(train_length >= 2, context + ".train_length = " + std::to_string(train_length),
            "train_length >= 2");
    require(probe_size > 0, context + ".probe_size = " + std::to_string(probe_size),
            "probe_size > 0");
    require(period > 0.0, context + ".period = " + std::to_string(period), "period > 0");
    require(cross_traffic >= 0.0 && cross_traffic < 1.0,
            context + ".cross_traffic = " + std::to_string(cross_traffic),
            "0 <= cross_traffic < 1");
}

double estimate_capacity(std::span<const double> pair_dispersions_s, std::int64_t probe_size) {
    if (pair_dispersions_s.empty()) {
        throw std::domain_error("capacity estimate needs at least one pair dispersion");
    }
    for (double d : pair_dispersions_s) {
        if (!(d > 0.0)) throw std::domain_error("pair dispersions must be positive");
    }
    std::vector<double> dispersions(pair_dispersions_s.begin(), pair_dispersions_s.end());
    return 8.0 * static_cast<double>(probe_size) / median(std::move(dispersions));
}

double estimate_available_bw(double capacity, double train_rate) {
    if (!(capacity > 0.0)) throw std::domain_error("capacity estimate must be positive");
    if (!(train_rate > 0.0)) throw std::domain_error("train dispersion rate must be positive");
    const double a = capacity * (2.0 - capacity / train_rate);
    return std::clamp(a, 0.0, capacity);
}

LinkMetrics link_metrics(std::span<const double> rtt_samples_ms, double loss_rate,
                         double avail_bw) {
    if (rtt_samples_ms.empty()) throw std::domain_error("rtt sample list is empty");
    LinkMetrics m;
    double sum = 0.0;
    for (double s : rtt_samples_ms) sum += s;
    m.rtt = sum / static_cast<double>(rtt_samples_ms.size());
    if (rtt_samples_ms.size() > 1) {
        double diff_sum = 0.0;
        for (std::size_t i = 1; i < rtt_samples_ms.size(); ++i) {
            diff_sum += std::abs(rtt_samples_ms[i] - rtt_samples_ms[i - 1]);
        }
        m.jitter = diff_sum / static_cast<double>(rtt_samples_ms.size() - 1);
    }
    m.avail_bw_lossy = avail_bw * (1.0 - loss_rate);
    return m;
}

ProbeRound simulate_probe_round(double true_capacity, double cross_traffic,
                                const ProbeConfig& cfg, Rng& rng) {
    if (!(true_capacity > 0.0)) throw std::domain_error("link capacity must be positive");
    const double bits = 8.0 * static_cast<double>(cfg.probe_size);
    const double service = bits / true_capacity; // seconds per probe packet

    // Packet pairs. Cross traffic slips a packet between the pair with
    // probability equal to its load share, doubling that pair's dispersion.
    std::vector<double> dispersions;
    dispersions.reserve(static_cast<std::size_t>(cfg.pair_count));
    for (int i = 0; i < cfg.pair_count; ++i) {
        double d = service;
        if (rng.uniform01() < cross_traffic) d += service;
        d *= 1.0 + 0.02 * (rng.uniform01() - 0.5); // receiver timestamp granularity
        dispersions.push_back(d);
    }
    const double ce = estimate_capacity(dispersions, cfg.probe_size);

    // Packet train sent at the estimated capacity. When the link saturates,
    // the shared queue drains the train at its proportional share.
    const double cross_rate = cross_traffic * true_capacity;
    double train_rate = ce;
    if (ce + cross_rate > true_capacity) {
        train_rate = true_capacity * ce / (ce + cross_rate);
    }
    const double a = estimate_available_bw(ce, train_rate);

    // Round trips lengthen with queue occupancy.
    std::vector<double> rtts;
    rtts.reserve(4);
    for (int i = 0; i < 4; ++i) {
        rtts.push_back(1000.0 * service * (2.0 + cross_traffic * rng.uniform(0.0, 2.0)));
    }
    const LinkMetrics m = link_metrics(rtts, 0.0, a);

    ProbeRound round;
    round.capacity_estimate = ce;
    round.avail_bw_estimate = a;
    round.rtt = m.rtt;
    round.jitter = m.jitter;
    round.bytes_sent = cfg.probe_size * (2 * cfg.pair_count + cfg.train_length);
    return round;
}

} // namespace harborsim::probe
