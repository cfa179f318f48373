#include "harborsim/control.hpp"

#include "harborsim/errors.hpp"

#include <string>

namespace harborsim::control {

void NodeRegistry::register_node(const std::string& node, std::string address, double now) {
    std::lock_guard lock(mutex_);
    auto& entry = entries_[node];
    entry.address = std::move(address);
    entry.last_update = now;
}

std::optional<RegistryEntry> NodeRegistry::lookup(const std::string& node) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(node);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::size_t NodeRegistry::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::vector<std::pair<std::string, RegistryEntry>> NodeRegistry::snapshot() const {
    std::lock_guard lock(mutex_);
    return {entries_.begin(), entries_.end()};
}

void WatchdogConfig::validate(const std::string& context) const {
    auto require = [&](bool ok, const char* field, double value, const char* rule) {
        if (!ok) {
            throw ValidationError(context + "." + field + " = " + std::to_string(value) +
                                  " violates: " + rule);
        }
    };
    require(heartbeat_period > 0.0, "heartbeat_period", heartbeat_period, "heartbeat_period > 0");
    require(loss_threshold > 0.0, "loss_threshold", loss_threshold, "loss_threshold > 0");
    require(reboot_duration > 0.0, "reboot_duration", reboot_duration, "reboot_duration > 0");
}

WatchdogAction watchdog_step(WatchdogState& state, double now, const WatchdogConfig& cfg) {
    if (state.frozen || now - state.last_reply > cfg.loss_threshold) {
        state.frozen = false;
        state.last_reply = now + cfg.reboot_duration;
        return WatchdogAction::reboot;
    }
    return WatchdogAction::none;
}

const char* to_string(DeployPhase p) {
    switch (p) {
    case DeployPhase::idle: return "idle";
    case DeployPhase::uploading: return "uploading";
    case DeployPhase::unpacking: return "unpacking";
    case DeployPhase::configuring: return "configuring";
    case DeployPhase::rebooting: return "rebooting";
    case DeployPhase::active2: return "active2";
    case DeployPhase::rolled_back: return "rolled_back";
    }
    return "?";
}

const char* to_string(DeployEvent e) {
    switch (e) {
    case DeployEvent::start: return "start";
    case DeployEvent::upload_done: return "upload_done";
    case DeployEvent::unpack_done: return "unpack_done";
    case DeployEvent::config_done: return "config_done";
    case DeployEvent::reboot_done: return "reboot_done";
    case DeployEvent::failure: return "failure";
    }
    return "?";
}

void DeployDurations::validate(const std::string& context) const {
    auto require = [&](bool ok, const char* field, double value) {
        if (!ok) {
            throw ValidationError(context + "." + field + " = " + std::to_string(value) +
                                  " violates: duration > 0");
        }
    };
    require(upload > 0.0, "upload", upload);
    require(unpack > 0.0, "unpack", unpack);
    require(configure > 0.0, "configure", configure);
    require(reboot > 0.0, "reboot", reboot);
}

DeploymentState deploy_step(const DeploymentState& state, DeployEvent event, double now) {
    DeploymentState next = state;
    next.phase_started = now;

    auto reject = [&]() -> DeploymentState {
        throw ProtocolError(std::string("deploy_step: event ") + to_string(event) +
                            " not admissible in phase " + to_string(state.phase));
    };

    if (event == DeployEvent::failure) {
        if (state.phase == DeployPhase::idle || state.phase == DeployPhase::rolled_back) {
            return reject();
        }
        next.phase = DeployPhase::rolled_back;
        next.active_partition = 1;
        return next;
    }

    switch (state.phase) {
    case DeployPhase::idle:
        if (event != DeployEvent::start) return reject();
        next.phase = DeployPhase::uploading;
        break;
    case DeployPhase::uploading:
        if (event != DeployEvent::upload_done) return reject();
        next.phase = DeployPhase::unpacking;
        break;
    case DeployPhase::unpacking:
        if (event != DeployEvent::unpack_done) return reject();
        next.phase = DeployPhase::configuring;
        break;
    case DeployPhase::configuring:
        if (event != DeployEvent::config_done) return reject();
        next.phase = DeployPhase::rebooting;
        break;
    case DeployPhase::rebooting:
        if (event != DeployEvent::reboot_done) return reject();
        next.phase = DeployPhase::active2;
        next.active_partition = 2;
        break;
    case DeployPhase::active2:
    case DeployPhase::rolled_back:
        return reject();
    }
    return next;
}

DeploymentRunner::DeploymentRunner(std::string node, double start_t,
                                   const DeployDurations& durations) {
    state_.node = std::move(node);
    state_.phase_started = start_t;
    double t = start_t;
    schedule_.emplace_back(t, DeployEvent::start);
    t += durations.upload;
    schedule_.emplace_back(t, DeployEvent::upload_done);
    t += durations.unpack;
    schedule_.emplace_back(t, DeployEvent::unpack_done);
    t += durations.configure;
    schedule_.emplace_back(t, DeployEvent::config_done);
    t += durations.reboot;
    schedule_.emplace_back(t, DeployEvent::reboot_done);
}

std::vector<std::pair<double, DeploymentState>> DeploymentRunner::advance(double now) {
    std::vector<std::pair<double, DeploymentState>> fired;
    while (next_ < schedule_.size() && schedule_[next_].first <= now) {
        const auto& [t, event] = schedule_[next_];
        state_ = deploy_step(state_, event, t);
        fired.emplace_back(t, state_);
        ++next_;
    }
    return fired;
}

} // namespace harborsim::control
