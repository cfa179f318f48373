#ifndef HARBORSIM_CONTROL_HPP
#define HARBORSIM_CONTROL_HPP

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace harborsim::control {

struct RegistryEntry {
    std::string address;
    double last_update = 0.0;
};

/// Node id to current address map. Nodes re-register whenever their uplink
/// changes, so lookups always return the latest address.
class NodeRegistry {
public:
    void register_node(const std::string& node, std::string address, double now);
    std::optional<RegistryEntry> lookup(const std::string& node) const;
    std::size_t size() const;
    std::vector<std::pair<std::string, RegistryEntry>> snapshot() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, RegistryEntry> entries_;
};

struct WatchdogConfig {
    double heartbeat_period = 10.0; // s between server replies while connected
    double loss_threshold = 120.0;  // s of silence that forces a reboot
    double reboot_duration = 60.0;  // s of downtime a reboot costs

    void validate(const std::string& context) const;
};

struct WatchdogState {
    double last_reply = 0.0;
    bool frozen = false;
};

enum class WatchdogAction { none, reboot };

/// Reboots when the node froze or the server has been silent too long.
/// A reboot clears the freeze and pushes last_reply past the downtime so the
/// decision is idempotent within the same instant.
WatchdogAction watchdog_step(WatchdogState& state, double now, const WatchdogConfig& cfg);

enum class DeployPhase { idle, uploading, unpacking, configuring, rebooting, active2, rolled_back };
enum class DeployEvent { start, upload_done, unpack_done, config_done, reboot_done, failure };

const char* to_string(DeployPhase p);
const char* to_string(DeployEvent e);

struct DeployDurations {
    double upload = 600.0;
    double unpack = 180.0;
    double configure = 60.0;
    double reboot = 60.0;

    double total() const { return upload + unpack + configure + reboot; }
    void validate(const std::string& context) const;
};

struct DeploymentState {
    std::string node;
    DeployPhase phase = DeployPhase::idle;
    double phase_started = 0.0;
    int active_partition = 1; // partition 1 is the untouched base system
};

/// Advances the dual-boot image deployment machine. Any failure after idle
/// rolls back to partition 1; inadmissible events throw ProtocolError naming
/// the phase and event.
DeploymentState deploy_step(const DeploymentState& state, DeployEvent event, double now);

/// Drives one happy-path deployment on a fixed schedule derived from the
/// phase durations.
class DeploymentRunner {
public:
    DeploymentRunner(std::string node, double start_t, const DeployDurations& durations);

    /// Applies every event due at or before `now`; returns the transitions
    /// that fired as (time, state after).
    std::vector<std::pair<double, DeploymentState>> advance(double now);

    const DeploymentState& state() const { return state_; }
    bool done() const { return next_ >= schedule_.size(); }

private:
    DeploymentState state_;
    std::vector<std::pair<double, DeployEvent>> schedule_;
    std::size_t next_ = 0;
};

} // namespace harborsim::control

#endif
