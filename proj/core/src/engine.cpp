#include "harborsim/engine.hpp"

#include "harborsim/probe.hpp"
#include "harborsim/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace harborsim::engine {

namespace {

constexpr double kNoSignal = -300.0; // dBm placeholder for a dead pair

std::string pseudo_address(int iface_slot, int node, int seq) {
    return "10." + std::to_string(iface_slot) + "." + std::to_string(node) + "." +
           std::to_string(seq % 256);
}

} // namespace

Simulation::Simulation(scenario::Scenario s) : scenario_(std::move(s)), world_(scenario_) {
    scenario_.validate();
    n_ = static_cast<int>(world_.nodes().size());

    sens_offset_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        const double spread = scenario_.radio_params.sensitivity_spread;
        if (spread > 0.0) {
            Rng rng(stream_seed(scenario_.seed, "sens", static_cast<std::uint64_t>(i)));
            sens_offset_[i] = rng.uniform(-spread, spread);
        }
    }

    dsrc_state_.assign(static_cast<std::size_t>(n_) * n_, radio::LinkState::down);
    rssi_.assign(static_cast<std::size_t>(n_) * n_, kNoSignal);

    const std::size_t wifi_cells = world_.vehicle_indices().size() * world_.rsu_indices().size();
    wifi_state_.assign(wifi_cells, radio::LinkState::down);
    wifi_rssi_.assign(wifi_cells, kNoSignal);

    tables_.reserve(n_);
    for (int i = 0; i < n_; ++i) {
        tables_.emplace_back(i, scenario_.mesh_config.beacon_period,
                             scenario_.mesh_config.expiry_factor);
    }
    paths_.resize(n_);
    queues_.resize(n_);

    for (const auto& spec : scenario_.dtn_jobs) {
        PendingJob pj;
        pj.spec = spec;
        pj.node = world_.index_of(spec.node);
        pending_jobs_.push_back(std::move(pj));
    }
    std::sort(pending_jobs_.begin(), pending_jobs_.end(),
              [](const PendingJob& a, const PendingJob& b) {
                  if (a.spec.created != b.spec.created) return a.spec.created < b.spec.created;
                  return a.spec.id < b.spec.id;
              });

    prev_choice_.assign(n_, -1);
    prev_connected_.assign(n_, 1);
    watchdogs_.assign(n_, control::WatchdogState{});
    reboot_until_ms_.assign(n_, -1);
    reg_seq_.assign(n_, 0);
    probe_round_.assign(n_, 0);
    probe_bytes_.assign(n_, 0);

    if (scenario_.control.deploy.enabled) {
        deploy_.emplace(scenario_.control.deploy.node, scenario_.control.deploy.at,
                        scenario_.control.deploy.durations);
    }

    beacon_ms_ = std::llround(scenario_.mesh_config.beacon_period * 1000.0);
    probe_ms_ = std::llround(scenario_.probe_config.period * 1000.0);
    heartbeat_ms_ = std::llround(scenario_.control.watchdog.heartbeat_period * 1000.0);
    effective_rate_bps_ = radio::effective_throughput(scenario_.radio_params);
    wifi_rate_bps_ = radio::effective_throughput(scenario_.wifi.params);
}

bool Simulation::alive(int node) const { return reboot_until_ms_[node] < 0; }

double Simulation::tx_power_of(int node) const {
    return world_.node(node).kind == world::NodeKind::rsu ? scenario_.radio_params.tx_power_rsu
                                                          : scenario_.radio_params.tx_power;
}

void Simulation::update_links() {
    const auto& p = scenario_.radio_params;
    const double gains = p.antenna_gain_tx + p.antenna_gain_rx;
    const std::uint64_t tick_coord = static_cast<std::uint64_t>(world_.now_ms());

    for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) {
            const std::size_t ij = static_cast<std::size_t>(i) * n_ + j; // at i, from j
            const std::size_t ji = static_cast<std::size_t>(j) * n_ + i; // at j, from i
            if (!alive(i) || !alive(j)) {
                rssi_[ij] = rssi_[ji] = kNoSignal;
                dsrc_state_[ij] = dsrc_state_[ji] = radio::LinkState::down;
                continue;
            }
            double d = distance(world_.node(i).position, world_.node(j).position);
            if (d < 1.0) d = 1.0; // antennas are never closer than a meter
            const double pl = p.pl_ref + 10.0 * p.pl_exponent * std::log10(d);
            double at_i = tx_power_of(j) + gains - pl;
            double at_j = tx_power_of(i) + gains - pl;
            if (p.shadowing_sigma > 0.0) {
                Rng ri(stream_seed(scenario_.seed, "shadow", static_cast<std::uint64_t>(ij),
                                   tick_coord));
                Rng rj(stream_seed(scenario_.seed, "shadow", static_cast<std::uint64_t>(ji),
                                   tick_coord));
                at_i += p.shadowing_sigma * ri.normal();
                at_j += p.shadowing_sigma * rj.normal();
            }
            rssi_[ij] = at_i;
            rssi_[ji] = at_j;
            dsrc_state_[ij] = radio::link_up(at_i - sens_offset_[i], dsrc_state_[ij], p);
            dsrc_state_[ji] = radio::link_up(at_j - sens_offset_[j], dsrc_state_[ji], p);
        }
    }
}

void Simulation::update_wifi() {
    const auto& p = scenario_.wifi.params;
    const double gains = p.antenna_gain_tx + p.antenna_gain_rx;
    const auto& vehicles = world_.vehicle_indices();
    const auto& rsus = world_.rsu_indices();
    for (std::size_t vi = 0; vi < vehicles.size(); ++vi) {
        for (std::size_t ri = 0; ri < rsus.size(); ++ri) {
            const std::size_t cell = vi * rsus.size() + ri;
            const int v = vehicles[vi];
            const int r = rsus[ri];
            if (!alive(v) || !alive(r)) {
                wifi_rssi_[cell] = kNoSignal;
                wifi_state_[cell] = radio::LinkState::down;
                continue;
            }
            double d = distance(world_.node(v).position, world_.node(r).position);
            if (d < 1.0) d = 1.0;
            const double at_v =
                p.tx_power_rsu + gains - (p.pl_ref + 10.0 * p.pl_exponent * std::log10(d));
            wifi_rssi_[cell] = at_v;
            wifi_state_[cell] = radio::link_up(at_v, wifi_state_[cell], p);
        }
    }
}

void Simulation::emit_beacons(double now) {
    for (int rx = 0; rx < n_; ++rx) {
        if (!alive(rx)) continue;
        for (int tx = 0; tx < n_; ++tx) {
            if (tx == rx) continue;
            const std::size_t cell = static_cast<std::size_t>(rx) * n_ + tx;
            if (dsrc_state_[cell] != radio::LinkState::up) continue;
            mesh::Beacon b;
            b.sender = tx;
            b.position = world_.node(tx).position;
            b.rssi = rssi_[cell];
            b.timestamp = now;
            tables_[rx].update(b, now);
        }
    }
}

mesh::Topology Simulation::build_topology() const {
    const double now = world_.now();
    std::vector<std::string> ids;
    std::vector<Vec2> positions;
    std::vector<bool> is_rsu;
    ids.reserve(n_);
    positions.reserve(n_);
    is_rsu.reserve(n_);
    for (int i = 0; i < n_; ++i) {
        ids.push_back(world_.node(i).id);
        positions.push_back(world_.node(i).position);
        is_rsu.push_back(world_.node(i).kind == world::NodeKind::rsu);
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n_; ++i) {
        if (!alive(i)) continue;
        for (int j = i + 1; j < n_; ++j) {
            if (!alive(j)) continue;
            const std::size_t ij = static_cast<std::size_t>(i) * n_ + j;
            const std::size_t ji = static_cast<std::size_t>(j) * n_ + i;
            if (dsrc_state_[ij] == radio::LinkState::up &&
                dsrc_state_[ji] == radio::LinkState::up && tables_[i].contains(j, now) &&
                tables_[j].contains(i, now)) {
                edges.emplace_back(i, j);
            }
        }
    }
    return mesh::Topology(std::move(ids), std::move(positions), std::move(is_rsu), edges);
}

void Simulation::emit_job_records(int node, double now, trace::TraceWriter& writer) {
    for (const auto& job : queues_[node].jobs()) {
        if (!job.terminal() || job_record_done_.contains(job.id)) continue;
        trace::JobRecord rec;
        rec.t = now;
        rec.job = job.id;
        rec.node = world_.node(node).id;
        rec.direction = job.direction;
        rec.state = dtn::to_string(job.state);
        rec.size = job.size;
        rec.priority = job.priority;
        rec.created = job.created;
        rec.deadline = job.deadline;
        rec.completed = job.completed_at;
        rec.ledger = {{"dsrc", job.ledger[0]}, {"wifi", job.ledger[1]},
                      {"cellular", job.ledger[2]}};
        writer.write(rec);
        job_record_done_.insert(job.id);
    }
}

void Simulation::tick(trace::TraceWriter& writer) {
    const double now = world_.now();
    const std::int64_t now_ms = world_.now_ms();
    const double dt = static_cast<double>(world_.tick_ms()) / 1000.0;

    for (int i = 0; i < n_; ++i) {
        if (reboot_until_ms_[i] >= 0 && now_ms >= reboot_until_ms_[i]) reboot_until_ms_[i] = -1;
    }

    for (int v : world_.vehicle_indices()) {
        if (!alive(v)) continue;
        if (control::watchdog_step(watchdogs_[v], now, scenario_.control.watchdog) ==
            control::WatchdogAction::reboot) {
            reboot_until_ms_[v] =
                now_ms + std::llround(scenario_.control.watchdog.reboot_duration * 1000.0);
            tables_[v] = mesh::NeighborTable(v, scenario_.mesh_config.beacon_period,
                                             scenario_.mesh_config.expiry_factor);
            writer.write(trace::ControlRecord{now, world_.node(v).id, "reboot", "watchdog"});
        }
    }

    if (deploy_) {
        for (const auto& [t, state] : deploy_->advance(now)) {
            writer.write(trace::ControlRecord{t, state.node, "deploy_phase",
                                              control::to_string(state.phase)});
        }
    }

    while (next_job_ < pending_jobs_.size() && pending_jobs_[next_job_].spec.created <= now) {
        const PendingJob& pj = pending_jobs_[next_job_++];
        dtn::TransferJob job;
        job.id = pj.spec.id;
        job.direction = pj.spec.direction;
        job.size = pj.spec.size;
        job.priority = pj.spec.priority;
        job.created = pj.spec.created;
        job.deadline = pj.spec.deadline;
        queues_[pj.node].enqueue(std::move(job));
    }

    update_links();
    if (scenario_.wifi.enabled) update_wifi();
    if (beacon_ms_ > 0 && now_ms % beacon_ms_ == 0) emit_beacons(now);

    const mesh::Topology topo = build_topology();
    for (int v : world_.vehicle_indices()) {
        paths_[v] = alive(v)
                        ? path_finder_.compute(v, topo, scenario_.mesh_config.strategy)
                        : std::nullopt;
    }

    const bool probe_tick = probe_ms_ > 0 && now_ms > 0 && now_ms % probe_ms_ == 0;
    const auto& rsus = world_.rsu_indices();

    for (std::size_t vi = 0; vi < world_.vehicle_indices().size(); ++vi) {
        const int v = world_.vehicle_indices()[vi];
        const auto& node = world_.node(v);
        const auto& path = paths_[v];
        probe_bytes_[v] = 0;

        trace::ReachabilityRecord rr;
        rr.t = now;
        rr.node = node.id;
        if (path) {
            rr.hops = path->hop_count();
            rr.gateway = world_.node(path->gateway).id;
        }
        writer.write(rr);

        // Wi-Fi association: strongest in-range hotspot.
        int wifi_rsu = -1;
        double wifi_best = kNoSignal;
        if (scenario_.wifi.enabled && alive(v)) {
            for (std::size_t ri = 0; ri < rsus.size(); ++ri) {
                const std::size_t cell = vi * rsus.size() + ri;
                if (wifi_state_[cell] == radio::LinkState::up && wifi_rssi_[cell] > wifi_best) {
                    wifi_best = wifi_rssi_[cell];
                    wifi_rsu = rsus[ri];
                }
            }
        }

        const bool connected = path.has_value() || wifi_rsu >= 0;
        if (static_cast<char>(connected) != prev_connected_[v]) {
            writer.write(trace::EventRecord{now, node.id, connected});
            prev_connected_[v] = static_cast<char>(connected);
        }

        // Interface scoring over the mesh candidates.
        std::array<connman::Candidate, 2> cands;
        std::size_t cand_count = 0;
        if (path) {
            const int next = path->hops[1];
            connman::Factors f;
            f.speed = node.speed;
            const Vec2 to_next = world_.node(next).position - node.position;
            f.heading_alignment =
                node.moving() ? (1.0 + std::cos(node.heading - bearing(to_next))) / 2.0 : 1.0;
            f.hop_count = path->hop_count();
            f.next_hop_distance = norm(to_next);
            f.rssi = rssi_[static_cast<std::size_t>(v) * n_ + next];
            cands[cand_count++] = connman::Candidate{connman::Interface::dsrc, f};
        }
        if (wifi_rsu >= 0) {
            connman::Factors f;
            f.speed = node.speed;
            const Vec2 to_rsu = world_.node(wifi_rsu).position - node.position;
            f.heading_alignment =
                node.moving() ? (1.0 + std::cos(node.heading - bearing(to_rsu))) / 2.0 : 1.0;
            f.hop_count = 1;
            f.next_hop_distance = norm(to_rsu);
            f.rssi = wifi_rssi_[vi * rsus.size() +
                                (std::find(rsus.begin(), rsus.end(), wifi_rsu) - rsus.begin())];
            cands[cand_count++] = connman::Candidate{connman::Interface::wifi, f};
        }
        const auto choice = connman::select_interface(
            std::span<const connman::Candidate>(cands.data(), cand_count),
            scenario_.cellular.enabled && alive(v), scenario_.connman_weights,
            scenario_.connman_bounds);

        trace::ChoiceRecord cr;
        cr.t = now;
        cr.node = node.id;
        cr.choice = choice ? connman::to_string(choice->choice) : "none";
        if (choice && choice->scored) cr.score = choice->score;
        if (choice && choice->hop_count > 0) cr.hops = choice->hop_count;
        writer.write(cr);

        const int choice_slot = choice ? static_cast<int>(choice->choice) : -1;
        if (choice_slot != prev_choice_[v]) {
            if (choice_slot >= 0) {
                const std::string addr = pseudo_address(choice_slot + 1, v, reg_seq_[v]++);
                registry_.register_node(node.id, addr, now);
                writer.write(trace::ControlRecord{
                    now, node.id, "register",
                    std::string(connman::to_string(choice->choice)) + ":" + addr});
            }
            prev_choice_[v] = choice_slot;
        }

        if (alive(v) && (connected || scenario_.cellular.enabled) &&
            now_ms % heartbeat_ms_ == 0) {
            watchdogs_[v].last_reply = now;
        }

        // Probe round against the current next hop.
        if (probe_tick && path && alive(v)) {
            const int next = path->hops[1];
            Rng rng(stream_seed(scenario_.seed, "probe", static_cast<std::uint64_t>(v),
                                static_cast<std::uint64_t>(probe_round_[v])));
            const auto round = probe::simulate_probe_round(
                effective_rate_bps_, scenario_.probe_config.cross_traffic, scenario_.probe_config,
                rng);
            const double link_rssi = rssi_[static_cast<std::size_t>(v) * n_ + next];
            const double delivery =
                radio::pdr(link_rssi - sens_offset_[v], scenario_.radio_params);
            trace::ProbeRecord pr;
            pr.t = now;
            pr.src = node.id;
            pr.dst = world_.node(next).id;
            pr.capacity = round.capacity_estimate;
            pr.avail_bw = round.avail_bw_estimate;
            pr.avail_bw_lossy = round.avail_bw_estimate * delivery;
            pr.rtt = round.rtt;
            pr.jitter = round.jitter;
            pr.rssi = link_rssi;
            pr.pdr = delivery;
            writer.write(pr);
            probe_bytes_[v] = round.bytes_sent;
            ++probe_round_[v];
        }

        // Transfer service.
        auto& queue = queues_[v];
        if (!queue.jobs().empty()) {
            if (!alive(v)) {
                queue.tick_transfer(false, connman::Interface::dsrc, 0.0, dt, now);
            } else {
                const auto fb = queue.deadline_fallback(now, dt, scenario_.cellular.rate,
                                                        scenario_.cellular.enabled);
                for (const auto& slice : fb) {
                    writer.write(trace::TransferRecord{now, slice.job, node.id,
                                                       connman::to_string(slice.iface),
                                                       slice.bytes, slice.rate, std::nullopt});
                }

                const bool mesh_up =
                    choice && (choice->choice == connman::Interface::dsrc ||
                               choice->choice == connman::Interface::wifi);
                double offered = 0.0;
                std::optional<std::string> gateway;
                connman::Interface lane = connman::Interface::dsrc;
                if (mesh_up && choice->choice == connman::Interface::dsrc) {
                    const int next = path->hops[1];
                    const double uplink = rssi_[static_cast<std::size_t>(next) * n_ + v];
                    const double delivery =
                        radio::pdr(uplink - sens_offset_[next], scenario_.radio_params);
                    offered = effective_rate_bps_ * delivery / path->hop_count();
                    gateway = world_.node(path->gateway).id;
                } else if (mesh_up) {
                    const double delivery = radio::pdr(wifi_best, scenario_.wifi.params);
                    offered = wifi_rate_bps_ * delivery;
                    gateway = world_.node(wifi_rsu).id;
                    lane = connman::Interface::wifi;
                }
                offered = std::max(0.0, offered - static_cast<double>(probe_bytes_[v]) * 8.0 / dt);
                const auto slices = queue.tick_transfer(mesh_up, lane, offered, dt, now);
                for (const auto& slice : slices) {
                    writer.write(trace::TransferRecord{now, slice.job, node.id,
                                                       connman::to_string(slice.iface),
                                                       slice.bytes, slice.rate, gateway});
                }
            }
            emit_job_records(v, now, writer);
        }
    }

    for (int v : world_.vehicle_indices()) {
        const auto& node = world_.node(v);
        trace::PositionRecord pr;
        pr.t = now;
        pr.node = node.id;
        pr.x = node.position.x;
        pr.y = node.position.y;
        pr.speed = node.speed;
        if (node.moving()) pr.heading = node.heading;
        writer.write(pr);
    }
}

void Simulation::finish(trace::TraceWriter& writer) {
    const double end = world_.now();
    for (int v : world_.vehicle_indices()) {
        for (const auto& job : queues_[v].jobs()) {
            if (job_record_done_.contains(job.id)) continue;
            trace::JobRecord rec;
            rec.t = end;
            rec.job = job.id;
            rec.node = world_.node(v).id;
            rec.direction = job.direction;
            rec.state = dtn::to_string(job.state);
            rec.size = job.size;
            rec.priority = job.priority;
            rec.created = job.created;
            rec.deadline = job.deadline;
            rec.completed = job.completed_at;
            rec.ledger = {{"dsrc", job.ledger[0]}, {"wifi", job.ledger[1]},
                          {"cellular", job.ledger[2]}};
            writer.write(rec);
            job_record_done_.insert(rec.job);
        }
    }
}

RunStats Simulation::run(trace::TraceWriter& writer, const std::function<void(double)>& progress) {
    const std::int64_t total = scenario_.tick_count();

    for (int r : world_.rsu_indices()) {
        const std::string addr = pseudo_address(0, r, reg_seq_[r]++);
        registry_.register_node(world_.node(r).id, addr, 0.0);
        writer.write(trace::ControlRecord{0.0, world_.node(r).id, "register", "wired:" + addr});
    }

    const std::int64_t report_every = std::max<std::int64_t>(1, total / 100);
    for (std::int64_t k = 0; k < total; ++k) {
        tick(writer);
        world_.step();
        if (progress && (k + 1) % report_every == 0) {
            progress(static_cast<double>(k + 1) / static_cast<double>(total));
        }
    }
    finish(writer);
    writer.flush();

    RunStats stats;
    stats.counts = writer.counts();
    stats.ticks = total;
    stats.sim_duration = scenario_.duration;
    return stats;
}

} // namespace harborsim::engine
