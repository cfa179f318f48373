#include "harborsim/scenario.hpp"

#include "harborsim/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>

namespace harborsim::scenario {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& msg) { throw ParseError("config: " + msg); }

[[noreturn]] void validate_fail(const std::string& msg) { throw ValidationError(msg); }

std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

std::string fmt(Vec2 v) { return "(" + fmt(v.x) + ", " + fmt(v.y) + ")"; }

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* k) { return it.key() == k; })) {
            parse_fail("unknown field \"" + it.key() + "\" in " + ctx);
        }
    }
}

const json& object_at(const json& obj, const std::string& ctx) {
    if (!obj.is_object()) parse_fail(ctx + " is not an object");
    return obj;
}

double get_num(const json& obj, const std::string& ctx, const char* key,
               std::optional<double> def = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (def) return *def;
        parse_fail("missing field \"" + std::string(key) + "\" in " + ctx);
    }
    if (!it->is_number()) parse_fail(ctx + "." + key + " is not a number");
    return it->get<double>();
}

std::int64_t get_int(const json& obj, const std::string& ctx, const char* key,
                     std::optional<std::int64_t> def = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (def) return *def;
        parse_fail("missing field \"" + std::string(key) + "\" in " + ctx);
    }
    if (!it->is_number_integer()) parse_fail(ctx + "." + key + " is not an integer");
    return it->get<std::int64_t>();
}

std::uint64_t get_u64(const json& obj, const std::string& ctx, const char* key,
                      std::uint64_t def) {
    auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (it->is_number_unsigned()) return it->get<std::uint64_t>();
    if (it->is_number_integer() && it->get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(it->get<std::int64_t>());
    }
    parse_fail(ctx + "." + key + " is not a non-negative integer");
}

std::string get_str(const json& obj, const std::string& ctx, const char* key,
                    std::optional<std::string> def = std::nullopt) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (def) return *def;
        parse_fail("missing field \"" + std::string(key) + "\" in " + ctx);
    }
    if (!it->is_string()) parse_fail(ctx + "." + key + " is not a string");
    return it->get<std::string>();
}

bool get_bool(const json& obj, const std::string& ctx, const char* key, bool def) {
    auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (!it->is_boolean()) parse_fail(ctx + "." + key + " is not a boolean");
    return it->get<bool>();
}

Vec2 get_vec2(const json& v, const std::string& ctx) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        parse_fail(ctx + " is not an [x, y] pair");
    }
    return Vec2{v[0].get<double>(), v[1].get<double>()};
}

radio::RadioParams parse_radio(const json& obj, const std::string& ctx, radio::RadioParams p) {
    object_at(obj, ctx);
    check_keys(obj, ctx,
               {"tx_power", "tx_power_rsu", "antenna_gain_tx", "antenna_gain_rx", "sensitivity",
                "sensitivity_spread", "pl_exponent", "pl_ref", "shadowing_sigma", "link_rate",
                "channel_mode", "switch_interval", "guard", "hysteresis"});
    p.tx_power = get_num(obj, ctx, "tx_power", p.tx_power);
    p.tx_power_rsu = get_num(obj, ctx, "tx_power_rsu", p.tx_power_rsu);
    p.antenna_gain_tx = get_num(obj, ctx, "antenna_gain_tx", p.antenna_gain_tx);
    p.antenna_gain_rx = get_num(obj, ctx, "antenna_gain_rx", p.antenna_gain_rx);
    p.sensitivity = get_num(obj, ctx, "sensitivity", p.sensitivity);
    p.sensitivity_spread = get_num(obj, ctx, "sensitivity_spread", p.sensitivity_spread);
    p.pl_exponent = get_num(obj, ctx, "pl_exponent", p.pl_exponent);
    p.pl_ref = get_num(obj, ctx, "pl_ref", p.pl_ref);
    p.shadowing_sigma = get_num(obj, ctx, "shadowing_sigma", p.shadowing_sigma);
    p.link_rate = get_num(obj, ctx, "link_rate", p.link_rate);
    if (auto it = obj.find("channel_mode"); it != obj.end()) {
        const std::string mode = get_str(obj, ctx, "channel_mode");
        if (mode == "continuous") p.channel_mode = radio::ChannelMode::continuous;
        else if (mode == "alternate") p.channel_mode = radio::ChannelMode::alternate;
        else parse_fail(ctx + ".channel_mode must be \"continuous\" or \"alternate\"");
    }
    p.switch_interval = get_num(obj, ctx, "switch_interval", p.switch_interval);
    p.guard = get_num(obj, ctx, "guard", p.guard);
    p.hysteresis = get_num(obj, ctx, "hysteresis", p.hysteresis);
    return p;
}

radio::RadioParams wifi_default_params() {
    radio::RadioParams p;
    p.tx_power = 15.0;
    p.tx_power_rsu = 18.0;
    p.sensitivity = -90.0;
    p.sensitivity_spread = 0.0;
    p.pl_exponent = 3.0;
    p.pl_ref = 40.05; // free space at 1 m, 2.4 GHz
    p.link_rate = 54e6;
    p.channel_mode = radio::ChannelMode::continuous;
    return p;
}

} // namespace

std::int64_t Scenario::duration_ms() const {
    return static_cast<std::int64_t>(std::llround(duration * 1000.0));
}

std::int64_t Scenario::tick_count() const { return duration_ms() / tick; }

void Scenario::validate() const {
    if (!(duration > 0.0)) validate_fail("duration = " + fmt(duration) + " violates: duration > 0");
    if (tick <= 0) validate_fail("tick = " + std::to_string(tick) + " violates: tick > 0");
    if (!(map_bounds.max_x > map_bounds.min_x && map_bounds.max_y > map_bounds.min_y)) {
        validate_fail("map_bounds violates: max > min on both axes");
    }

    std::set<std::string> ids;
    auto claim_id = [&](const std::string& id, const std::string& ctx) {
        if (id.empty()) validate_fail(ctx + " violates: non-empty id");
        if (!ids.insert(id).second) {
            validate_fail(ctx + " = \"" + id + "\" violates: unique node id");
        }
    };

    for (const auto& rsu : rsus) {
        claim_id(rsu.id, "rsus[" + rsu.id + "].id");
        if (!map_bounds.contains(rsu.position)) {
            validate_fail("rsus[" + rsu.id + "].position = " + fmt(rsu.position) +
                          " violates: inside map_bounds");
        }
    }
    for (const auto& v : vehicles) {
        const std::string ctx = "vehicles[" + v.id + "]";
        claim_id(v.id, ctx + ".id");
        if (v.route.empty()) validate_fail(ctx + ".route violates: at least one vertex");
        for (std::size_t i = 0; i < v.route.size(); ++i) {
            if (!map_bounds.contains(v.route[i])) {
                validate_fail(ctx + ".route[" + std::to_string(i) + "] = " + fmt(v.route[i]) +
                              " violates: inside map_bounds");
            }
        }
        if (v.speed < 0.0) {
            validate_fail(ctx + ".speed = " + fmt(v.speed) + " violates: speed >= 0");
        }
    }

    radio_params.validate("radio_params");
    connman_weights.validate("connman_weights");
    connman_bounds.validate("connman_bounds");
    probe_config.validate("probe_config");
    if (wifi.enabled) wifi.params.validate("wifi.params");
    if (cellular.rate < 0.0) {
        validate_fail("cellular.rate = " + fmt(cellular.rate) + " violates: rate >= 0");
    }
    if (!(mesh_config.beacon_period > 0.0)) {
        validate_fail("mesh.beacon_period = " + fmt(mesh_config.beacon_period) +
                      " violates: beacon_period > 0");
    }
    if (!(mesh_config.expiry_factor >= 1.0)) {
        validate_fail("mesh.expiry_factor = " + fmt(mesh_config.expiry_factor) +
                      " violates: expiry_factor >= 1");
    }
    control.watchdog.validate("control");
    if (control.deploy.enabled) {
        control.deploy.durations.validate("control.deploy.durations");
        if (!ids.contains(control.deploy.node)) {
            validate_fail("control.deploy.node = \"" + control.deploy.node +
                          "\" violates: node must exist");
        }
        if (control.deploy.at < 0.0) {
            validate_fail("control.deploy.at = " + fmt(control.deploy.at) + " violates: at >= 0");
        }
    }
    if (!(default_deadline > 0.0)) {
        validate_fail("dtn.default_deadline = " + fmt(default_deadline) +
                      " violates: default_deadline > 0");
    }

    std::set<std::string> vehicle_ids;
    for (const auto& v : vehicles) vehicle_ids.insert(v.id);
    std::set<std::string> job_ids;
    for (const auto& job : dtn_jobs) {
        const std::string ctx = "dtn_jobs[" + job.id + "]";
        if (job.id.empty()) validate_fail(ctx + " violates: non-empty job id");
        if (!job_ids.insert(job.id).second) {
            validate_fail(ctx + ".id = \"" + job.id + "\" violates: unique job id");
        }
        if (!vehicle_ids.contains(job.node)) {
            validate_fail(ctx + ".node = \"" + job.node + "\" violates: node must be a vehicle");
        }
        if (job.direction != "upload" && job.direction != "download") {
            validate_fail(ctx + ".direction = \"" + job.direction +
                          "\" violates: upload or download");
        }
        if (job.size <= 0) {
            validate_fail(ctx + ".size = " + std::to_string(job.size) + " violates: size > 0");
        }
        if (job.created < 0.0) {
            validate_fail(ctx + ".created = " + fmt(job.created) + " violates: created >= 0");
        }
        if (!(job.deadline > job.created)) {
            validate_fail(ctx + ".deadline = " + fmt(job.deadline) +
                          " violates: deadline > created");
        }
    }
}

Scenario load_scenario(const std::string& config_text) {
    json root;
    try {
        root = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!root.is_object()) parse_fail("top level is not an object");
    check_keys(root, "top level",
               {"seed", "duration", "tick", "map_bounds", "rsus", "vehicles", "radio_params",
                "connman_weights", "connman_bounds", "dtn_jobs", "probe_config", "mesh",
                "cellular", "wifi", "control", "dtn"});

    Scenario s;
    s.seed = get_u64(root, "top level", "seed", 1);
    s.duration = get_num(root, "top level", "duration");
    s.tick = get_int(root, "top level", "tick", 100);

    if (auto it = root.find("map_bounds"); it != root.end()) {
        const std::string ctx = "map_bounds";
        object_at(*it, ctx);
        check_keys(*it, ctx, {"min_x", "min_y", "max_x", "max_y"});
        s.map_bounds.min_x = get_num(*it, ctx, "min_x");
        s.map_bounds.min_y = get_num(*it, ctx, "min_y");
        s.map_bounds.max_x = get_num(*it, ctx, "max_x");
        s.map_bounds.max_y = get_num(*it, ctx, "max_y");
    }

    if (auto it = root.find("rsus"); it != root.end()) {
        if (!it->is_array()) parse_fail("rsus is not an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& entry = (*it)[i];
            const std::string ctx = "rsus[" + std::to_string(i) + "]";
            object_at(entry, ctx);
            check_keys(entry, ctx, {"id", "position"});
            RsuSpec rsu;
            rsu.id = get_str(entry, ctx, "id");
            if (!entry.contains("position")) parse_fail("missing field \"position\" in " + ctx);
            rsu.position = get_vec2(entry.at("position"), ctx + ".position");
            s.rsus.push_back(std::move(rsu));
        }
    }

    if (auto it = root.find("vehicles"); it != root.end()) {
        if (!it->is_array()) parse_fail("vehicles is not an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& entry = (*it)[i];
            const std::string ctx = "vehicles[" + std::to_string(i) + "]";
            object_at(entry, ctx);
            check_keys(entry, ctx, {"id", "route", "speed", "route_policy"});
            VehicleSpec v;
            v.id = get_str(entry, ctx, "id");
            auto route_it = entry.find("route");
            if (route_it == entry.end()) parse_fail("missing field \"route\" in " + ctx);
            if (!route_it->is_array()) parse_fail(ctx + ".route is not an array");
            for (std::size_t k = 0; k < route_it->size(); ++k) {
                v.route.push_back(
                    get_vec2((*route_it)[k], ctx + ".route[" + std::to_string(k) + "]"));
            }
            v.speed = get_num(entry, ctx, "speed", 0.0);
            const std::string policy = get_str(entry, ctx, "route_policy", "loop");
            if (policy == "loop") v.route_policy = RoutePolicy::loop;
            else if (policy == "stop") v.route_policy = RoutePolicy::stop;
            else parse_fail(ctx + ".route_policy must be \"loop\" or \"stop\"");
            s.vehicles.push_back(std::move(v));
        }
    }

    if (auto it = root.find("radio_params"); it != root.end()) {
        s.radio_params = parse_radio(*it, "radio_params", s.radio_params);
    }

    if (auto it = root.find("connman_weights"); it != root.end()) {
        const std::string ctx = "connman_weights";
        object_at(*it, ctx);
        check_keys(*it, ctx, {"speed", "heading", "hops", "distance", "rssi"});
        s.connman_weights.w_speed = get_num(*it, ctx, "speed", s.connman_weights.w_speed);
        s.connman_weights.w_heading = get_num(*it, ctx, "heading", s.connman_weights.w_heading);
        s.connman_weights.w_hops = get_num(*it, ctx, "hops", s.connman_weights.w_hops);
        s.connman_weights.w_distance = get_num(*it, ctx, "distance", s.connman_weights.w_distance);
        s.connman_weights.w_rssi = get_num(*it, ctx, "rssi", s.connman_weights.w_rssi);
    }

    bool d_max_given = false;
    bool rssi_floor_given = false;
    if (auto it = root.find("connman_bounds"); it != root.end()) {
        const std::string ctx = "connman_bounds";
        object_at(*it, ctx);
        check_keys(*it, ctx, {"v_max", "d_max", "rssi_ref", "rssi_floor"});
        s.connman_bounds.v_max = get_num(*it, ctx, "v_max", s.connman_bounds.v_max);
        d_max_given = it->contains("d_max");
        s.connman_bounds.d_max = get_num(*it, ctx, "d_max", s.connman_bounds.d_max);
        s.connman_bounds.rssi_ref = get_num(*it, ctx, "rssi_ref", s.connman_bounds.rssi_ref);
        rssi_floor_given = it->contains("rssi_floor");
        s.connman_bounds.rssi_floor =
            get_num(*it, ctx, "rssi_floor", s.connman_bounds.rssi_floor);
    }
    if (!rssi_floor_given) s.connman_bounds.rssi_floor = s.radio_params.sensitivity;
    if (!d_max_given || s.connman_bounds.d_max <= 0.0) {
        s.connman_bounds.d_max =
            s.radio_params.range_at(s.radio_params.sensitivity, s.radio_params.tx_power);
    }

    if (auto it = root.find("dtn"); it != root.end()) {
        const std::string ctx = "dtn";
        object_at(*it, ctx);
        check_keys(*it, ctx, {"default_deadline"});
        s.default_deadline = get_num(*it, ctx, "default_deadline", s.default_deadline);
    }

    if (auto it = root.find("dtn_jobs"); it != root.end()) {
        if (!it->is_array()) parse_fail("dtn_jobs is not an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& entry = (*it)[i];
            const std::string ctx = "dtn_jobs[" + std::to_string(i) + "]";
            object_at(entry, ctx);
            check_keys(entry, ctx,
                       {"id", "node", "direction", "size", "priority", "created", "deadline"});
            JobSpec job;
            job.id = get_str(entry, ctx, "id");
            job.node = get_str(entry, ctx, "node");
            job.direction = get_str(entry, ctx, "direction", "upload");
            job.size = get_int(entry, ctx, "size");
            job.priority = static_cast<int>(get_int(entry, ctx, "priority", 0));
            job.created = get_num(entry, ctx, "created", 0.0);
            job.deadline = get_num(entry, ctx, "deadline", 0.0);
            if (job.deadline == 0.0) job.deadline = job.created + s.default_deadline;
            s.dtn_jobs.push_back(std::move(job));
        }
    }

    if (auto it = root.find("probe_config"); it != root.end()) {
        const std::string ctx = "probe_config";
        object_at(*it, ctx);
        check_keys(*it, ctx,
                   {"pair_count", "train_length", "probe_size", "period", "cross_traffic"});
        s.probe_config.pair_count =
            static_cast<int>(get_int(*it, ctx, "pair_count", s.probe_config.pair_count));
        s.probe_config.train_length =
            static_cast<int>(get_int(*it, ctx, "train_length", s.probe_config.train_length));
        s.probe_config.probe_size = get_int(*it, ctx, "probe_size", s.probe_config.probe_size);
        s.probe_config.period = get_num(*it, ctx, "period", s.probe_config.period);
        s.probe_config.cross_traffic =
            get_num(*it, ctx, "cross_traffic", s.probe_config.cross_traffic);
    }

    if (auto it = root.find("mesh"); it != root.end()) {
        const std::string ctx = "mesh";
        object_at(*it, ctx);
        check_keys(*it, ctx, {"strategy", "beacon_period", "expiry_factor"});
        const std::string strategy = get_str(*it, ctx, "strategy", "min_hop");
        if (strategy == "min_hop") s.mesh_config.strategy = mesh::Strategy::min_hop;
        else if (strategy == "greedy_geo") s.mesh_config.strategy = mesh::Strategy::greedy_geo;
        else parse_fail(ctx + ".strategy must be \"min_hop\" or \"greedy_geo\"");
        s.mesh_config.beacon_period =
            get_num(*it, ctx, "beacon_period", s.mesh_config.beacon_period);
        s.mesh_config.expiry_factor =
            get_num(*it, ctx, "expiry_factor", s.mesh_config.expiry_factor);
    }

    if (auto it = root.find("cellular"); it != root.end()) {
        const std::string ctx = "cellular";
        object_at(*it, ctx);
        check_keys(*it, ctx, {"enabled", "rate"});
        s.cellular.enabled = get_bool(*it, ctx, "enabled", s.cellular.enabled);
        s.cellular.rate = get_num(*it, ctx, "rate", s.cellular.rate);
    }

    if (auto it = root.find("wifi"); it != root.end()) {
        const std::string ctx = "wifi";
        object_at(*it, ctx);
        check_keys(*it, ctx, {"enabled", "params"});
        s.wifi.enabled = get_bool(*it, ctx, "enabled", false);
        s.wifi.params = wifi_default_params();
        if (auto params_it = it->find("params"); params_it != it->end()) {
            s.wifi.params = parse_radio(*params_it, "wifi.params", s.wifi.params);
        }
    } else {
        s.wifi.params = wifi_default_params();
    }

    if (auto it = root.find("control"); it != root.end()) {
        const std::string ctx = "control";
        object_at(*it, ctx);
        check_keys(*it, ctx,
                   {"heartbeat_period", "loss_threshold", "reboot_duration", "deploy"});
        s.control.watchdog.heartbeat_period =
            get_num(*it, ctx, "heartbeat_period", s.control.watchdog.heartbeat_period);
        s.control.watchdog.loss_threshold =
            get_num(*it, ctx, "loss_threshold", s.control.watchdog.loss_threshold);
        s.control.watchdog.reboot_duration =
            get_num(*it, ctx, "reboot_duration", s.control.watchdog.reboot_duration);
        if (auto deploy_it = it->find("deploy"); deploy_it != it->end()) {
            const std::string dctx = "control.deploy";
            object_at(*deploy_it, dctx);
            check_keys(*deploy_it, dctx, {"node", "at", "durations"});
            s.control.deploy.enabled = true;
            s.control.deploy.node = get_str(*deploy_it, dctx, "node");
            s.control.deploy.at = get_num(*deploy_it, dctx, "at", 0.0);
            if (auto dur_it = deploy_it->find("durations"); dur_it != deploy_it->end()) {
                const std::string uctx = "control.deploy.durations";
                object_at(*dur_it, uctx);
                check_keys(*dur_it, uctx, {"upload", "unpack", "configure", "reboot"});
                auto& d = s.control.deploy.durations;
                d.upload = get_num(*dur_it, uctx, "upload", d.upload);
                d.unpack = get_num(*dur_it, uctx, "unpack", d.unpack);
                d.configure = get_num(*dur_it, uctx, "configure", d.configure);
                d.reboot = get_num(*dur_it, uctx, "reboot", d.reboot);
            }
        }
    }

    s.validate();
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::system_error(errno ? errno : ENOENT, std::generic_category(),
                                "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::vector<std::string> canonical_ids(const Scenario& s) {
    std::vector<std::string> ids;
    ids.reserve(s.rsus.size() + s.vehicles.size());
    for (const auto& rsu : s.rsus) ids.push_back(rsu.id);
    for (const auto& v : s.vehicles) ids.push_back(v.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

const char* to_string(RoutePolicy p) {
    return p == RoutePolicy::loop ? "loop" : "stop";
}

} // namespace harborsim::scenario
