#include "harborsim/radio.hpp"

#include "harborsim/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace harborsim::radio {

namespace {

void require(bool ok, const char* context, const char* field, double value,
             const char* rule) {
    if (ok) return;
    std::ostringstream msg;
    msg << context << "." << field << " = " << value << " violates: " << rule;
    throw ValidationError(msg.str());
}

} // namespace

void RadioParams::validate(const char* context) const {
    require(tx_power <= 23.0, context, "tx_power", tx_power, "tx_power <= 23 dBm");
    require(tx_power_rsu <= 23.0, context, "tx_power_rsu", tx_power_rsu,
            "tx_power <= 23 dBm");
    require(sensitivity < tx_power, context, "sensitivity", sensitivity,
            "sensitivity < tx_power");
    require(pl_exponent >= 2.0, context, "pl_exponent", pl_exponent, "pl_exponent >= 2");
    require(guard < switch_interval, context, "guard", guard, "guard < switch_interval");
    require(guard >= 0.0, context, "guard", guard, "guard >= 0");
    require(switch_interval > 0.0, context, "switch_interval", switch_interval,
            "switch_interval > 0");
    require(link_rate > 0.0, context, "link_rate", link_rate, "link_rate > 0");
    require(sensitivity_spread >= 0.0, context, "sensitivity_spread", sensitivity_spread,
            "sensitivity_spread >= 0");
    require(shadowing_sigma >= 0.0, context, "shadowing_sigma", shadowing_sigma,
            "shadowing_sigma >= 0");
    require(hysteresis >= 0.0, context, "hysteresis", hysteresis, "hysteresis >= 0");
}

double RadioParams::range_at(double rssi_dbm, double tx_dbm) const {
    double budget = tx_dbm + antenna_gain_tx + antenna_gain_rx - pl_ref - rssi_dbm;
    return std::pow(10.0, budget / (10.0 * pl_exponent));
}

double rssi(const RadioParams& params, double distance_m, double noise_draw_db) {
    if (distance_m <= 0.0)
        throw std::domain_error("rssi: distance must be > 0 m");
    return params.tx_power + params.antenna_gain_tx + params.antenna_gain_rx -
           params.pl_ref - 10.0 * params.pl_exponent * std::log10(distance_m) +
           noise_draw_db;
}

LinkState link_up(double rssi_dbm, LinkState previous, const RadioParams& params) {
    if (previous == LinkState::down)
        return rssi_dbm >= params.sensitivity + params.hysteresis ? LinkState::up
                                                                  : LinkState::down;
    return rssi_dbm < params.sensitivity ? LinkState::down : LinkState::up;
}

double pdr(double rssi_dbm, const RadioParams& params) {
    const double midpoint = params.sensitivity + 3.0;
    const double scale = 2.0;
    return 1.0 / (1.0 + std::exp(-(rssi_dbm - midpoint) / scale));
}

double effective_throughput(double link_rate_bps, ChannelMode mode,
                            double switch_interval_ms, double guard_ms) {
    if (mode == ChannelMode::continuous) return link_rate_bps;
    return link_rate_bps * (switch_interval_ms - guard_ms) / (2.0 * switch_interval_ms);
}

} // namespace harborsim::radio
