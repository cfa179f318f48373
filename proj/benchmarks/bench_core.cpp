#include "harborsim/connman.hpp"
#include "harborsim/dtn.hpp"
#include "harborsim/mesh.hpp"
#include "harborsim/probe.hpp"
#include "harborsim/radio.hpp"
#include "harborsim/rng.hpp"
#include "harborsim/trace.hpp"

#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

namespace {

using namespace harborsim;

void bm_radio_rssi(benchmark::State& state) {
    const radio::RadioParams params;
    Rng rng(1);
    std::size_t i = 0;
    for (auto _ : state) {
        const double d = 1.0 + static_cast<double>(i++ & 1023) * 0.25;
        benchmark::DoNotOptimize(radio::rssi(params, d, 0.0));
    }
}
BENCHMARK(bm_radio_rssi);

void bm_radio_link_update(benchmark::State& state) {
    const radio::RadioParams params;
    radio::LinkState link = radio::LinkState::down;
    std::size_t i = 0;
    for (auto _ : state) {
        const double rssi = -80.0 - static_cast<double>(i++ & 31);
        link = radio::link_up(rssi, link, params);
        benchmark::DoNotOptimize(link);
    }
}
BENCHMARK(bm_radio_link_update);

mesh::Topology make_fleet_topology() {
    Rng rng(7);
    const int n = 38;
    std::vector<std::string> ids;
    std::vector<Vec2> pos;
    std::vector<bool> is_rsu(n, false);
    for (int i = 0; i < n; ++i) {
        ids.push_back((i < 35 ? "v" : "r") + std::to_string(i));
        pos.push_back({rng.uniform(0.0, 800.0), rng.uniform(0.0, 800.0)});
    }
    is_rsu[35] = is_rsu[36] = is_rsu[37] = true;
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
        edges.emplace_back(a, (a + 1) % n);
        edges.emplace_back(a, (a + 7) % n);
    }
    for (auto& [a, b] : edges) {
        if (a > b) std::swap(a, b);
    }
    return mesh::Topology(std::move(ids), std::move(pos), std::move(is_rsu), edges);
}

void bm_mesh_min_hop(benchmark::State& state) {
    const mesh::Topology topo = make_fleet_topology();
    mesh::PathFinder finder;
    int source = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(finder.compute(source, topo, mesh::Strategy::min_hop));
        source = (source + 1) % 35;
    }
}
BENCHMARK(bm_mesh_min_hop);

void bm_connman_score(benchmark::State& state) {
    const connman::WeightVector weights;
    const connman::NormalizationBounds bounds{10.0, 250.0, -30.0, -95.0};
    connman::Factors f;
    f.speed = 6.5;
    f.heading_alignment = 0.4;
    f.hop_count = 2;
    f.next_hop_distance = 120.0;
    f.rssi = -78.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(connman::score_interface(f, weights, bounds));
        f.rssi = f.rssi < -90.0 ? -78.0 : f.rssi - 0.125;
    }
}
BENCHMARK(bm_connman_score);

void bm_dtn_tick(benchmark::State& state) {
    dtn::TransferQueue queue;
    dtn::TransferJob job;
    job.id = "bulk";
    job.size = 1'000'000'000'000'000;
    job.deadline = 1e18;
    queue.enqueue(job);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            queue.tick_transfer(true, connman::Interface::dsrc, 1e6, 0.1, 0.0));
    }
}
BENCHMARK(bm_dtn_tick);

class NullSink : public trace::Sink {
public:
    void write(const char*, std::size_t n) override { bytes += n; }
    std::size_t bytes = 0;
};

void bm_trace_position_record(benchmark::State& state) {
    NullSink sink;
    trace::TraceWriter writer(sink);
    trace::PositionRecord r;
    r.node = "v17";
    r.speed = 8.25;
    r.heading = 1.5707963;
    std::size_t i = 0;
    for (auto _ : state) {
        r.t = static_cast<double>(i++) * 0.1;
        r.x = 350.0 + static_cast<double>(i & 255);
        r.y = 275.125;
        writer.write(r);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(sink.bytes));
}
BENCHMARK(bm_trace_position_record);

void bm_probe_round(benchmark::State& state) {
    const probe::ProbeConfig cfg;
    Rng rng(99);
    for (auto _ : state) {
        benchmark::DoNotOptimize(probe::simulate_probe_round(2.76e6, 0.2, cfg, rng));
    }
}
BENCHMARK(bm_probe_round);

} // namespace

BENCHMARK_MAIN();
