#ifndef HARBORSIM_RADIO_HPP
#define HARBORSIM_RADIO_HPP

namespace harborsim::radio {

enum class ChannelMode { continuous, alternate };

enum class LinkState { down, up };

/// Link-budget parameters for one radio technology. Power figures follow the
/// measured values of the 802.11p units this model is calibrated against;
/// OBUs and RSUs share everything except transmit power.
struct RadioParams {
    double tx_power = 12.51;         // dBm, vehicle-side transmitter
    double tx_power_rsu = 14.58;     // dBm, roadside-unit transmitter
    double antenna_gain_tx = 2.0;    // dBi
    double antenna_gain_rx = 2.0;    // dBi
    double sensitivity = -95.0;      // dBm
    double sensitivity_spread = 2.0; // dB; per-node fixed offset in [-spread, +spread]
    double pl_exponent = 2.7;        // log-distance path-loss exponent
    double pl_ref = 47.8;            // dB path loss at 1 m (free space, 5.875 GHz)
    double shadowing_sigma = 0.0;    // dB; 0 disables the stochastic term
    double link_rate = 6e6;          // bits/s PHY payload rate
    ChannelMode channel_mode = ChannelMode::alternate;
    double switch_interval = 50.0;   // ms per CCH/SCH slot
    double guard = 4.0;              // ms lost per channel switch
    double hysteresis = 3.0;         // dB above sensitivity required to come up

    /// Throws ValidationError naming the bad field. `context` prefixes the
    /// field name in messages (e.g. "radio_params").
    void validate(const char* context = "radio_params") const;

    /// Distance at which a transmitter at `tx_dbm` is received at exactly
    /// `rssi_dbm` (zero noise). Inverts the log-distance law.
    double range_at(double rssi_dbm, double tx_dbm) const;
};

/// Received signal strength over the log-distance law:
///   tx + gains - pl_ref - 10 * n * log10(d) + noise.
/// Throws std::domain_error for distance <= 0.
double rssi(const RadioParams& params, double distance_m, double noise_draw_db);

/// Hysteresis gate: coming up requires sensitivity + hysteresis, dropping
/// requires falling below sensitivity. Inside the band the state is kept.
LinkState link_up(double rssi_dbm, LinkState previous, const RadioParams& params);

/// Packet delivery ratio, logistic in RSSI with midpoint sensitivity + 3 dB
/// and scale 2 dB.
double pdr(double rssi_dbm, const RadioParams& params);

/// Usable rate under the channel duty model. In alternate mode the service
/// channel owns one of the two switch slots per sync interval, minus the
/// guard time.
double effective_throughput(double link_rate_bps, ChannelMode mode,
                            double switch_interval_ms, double guard_ms);

inline double effective_throughput(const RadioParams& p) {
    return effective_throughput(p.link_rate, p.channel_mode, p.switch_interval, p.guard);
}

} // namespace harborsim::radio

#endif
