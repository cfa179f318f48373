#include <doctest.h>

#include "harborsim/errors.hpp"
#include "harborsim/scenario.hpp"
#include "harborsim/world.hpp"

#include <cmath>
#include <numbers>
#include <string>

using namespace harborsim;
using namespace harborsim::scenario;

namespace {

const char* kMinimal = R"({
  "seed": 7,
  "duration": 60,
  "rsus": [{"id": "r1", "position": [500, 500]}],
  "vehicles": [
    {"id": "v1", "route": [[0, 0], [100, 0]], "speed": 10},
    {"id": "v2", "route": [[200, 200]], "speed": 0}
  ]
})";

} // namespace

TEST_CASE("a minimal config parses with defaults filled in") {
    const Scenario s = load_scenario(kMinimal);
    CHECK(s.seed == 7);
    CHECK(s.duration == 60.0);
    CHECK(s.tick == 100);
    CHECK(s.map_bounds.max_x == 1000.0);
    CHECK(s.radio_params.link_rate == 6e6);
    CHECK(s.radio_params.channel_mode == radio::ChannelMode::alternate);
    CHECK(s.mesh_config.strategy == mesh::Strategy::min_hop);
    CHECK(s.mesh_config.beacon_period == 1.0);
    CHECK(s.cellular.enabled);
    CHECK(s.cellular.rate == 1e6);
    CHECK_FALSE(s.wifi.enabled);
    CHECK_FALSE(s.control.deploy.enabled);
    CHECK(s.default_deadline == 1800.0);
    CHECK(s.duration_ms() == 60'000);
    CHECK(s.tick_count() == 600);

    // Unset normalization bounds derive from the radio.
    CHECK(s.connman_bounds.rssi_floor == s.radio_params.sensitivity);
    CHECK(s.connman_bounds.d_max ==
          doctest::Approx(s.radio_params.range_at(-95.0, s.radio_params.tx_power)));

    const auto ids = canonical_ids(s);
    REQUIRE(ids.size() == 3);
    CHECK(ids[0] == "r1");
    CHECK(ids[1] == "v1");
    CHECK(ids[2] == "v2");
}

TEST_CASE("unknown fields are rejected by name") {
    try {
        load_scenario(R"({"seed": 1, "duration": 1, "vheicles": []})");
        FAIL_CHECK("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("vheicles") != std::string::npos);
    }

    CHECK_THROWS_AS(
        load_scenario(
            R"({"seed": 1, "duration": 1, "radio_params": {"tx_pwr": 12}})"),
        ParseError);
}

TEST_CASE("malformed json is a parse error") {
    CHECK_THROWS_AS(load_scenario("{"), ParseError);
    CHECK_THROWS_AS(load_scenario(""), ParseError);
    CHECK_THROWS_AS(load_scenario("[1, 2]"), ParseError);
}

TEST_CASE("field constraints surface with field and value") {
    CHECK_THROWS_AS(load_scenario(R"({"seed": 1, "duration": 0})"), ValidationError);
    CHECK_THROWS_AS(load_scenario(R"({"seed": 1, "duration": 10, "tick": 0})"),
                    ValidationError);
    CHECK_THROWS_AS(
        load_scenario(
            R"({"seed": 1, "duration": 10,
                "map_bounds": {"min_x": 0, "min_y": 0, "max_x": 0, "max_y": 100}})"),
        ValidationError);

    try {
        load_scenario(R"({
          "seed": 1, "duration": 10,
          "map_bounds": {"min_x": 0, "min_y": 0, "max_x": 100, "max_y": 100},
          "vehicles": [{"id": "v1", "route": [[50, 50], [150, 50]], "speed": 5}]
        })");
        FAIL_CHECK("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("route[1]") != std::string::npos);
        CHECK(msg.find("map_bounds") != std::string::npos);
    }
}

TEST_CASE("duplicate node ids and dangling job nodes are rejected") {
    CHECK_THROWS_AS(load_scenario(R"({
      "seed": 1, "duration": 10,
      "vehicles": [
        {"id": "v1", "route": [[0, 0]], "speed": 0},
        {"id": "v1", "route": [[5, 5]], "speed": 0}
      ]
    })"),
                    ValidationError);

    // A job must belong to a vehicle, not an RSU or an unknown id.
    CHECK_THROWS_AS(load_scenario(R"({
      "seed": 1, "duration": 10,
      "rsus": [{"id": "r1", "position": [1, 1]}],
      "dtn_jobs": [{"id": "j", "node": "r1", "size": 10}]
    })"),
                    ValidationError);
    CHECK_THROWS_AS(load_scenario(R"({
      "seed": 1, "duration": 10,
      "vehicles": [{"id": "v1", "route": [[0, 0]], "speed": 0}],
      "dtn_jobs": [{"id": "j", "node": "ghost", "size": 10}]
    })"),
                    ValidationError);
}

TEST_CASE("job deadlines default to created plus the configured window") {
    const Scenario s = load_scenario(R"({
      "seed": 1, "duration": 10,
      "vehicles": [{"id": "v1", "route": [[0, 0]], "speed": 0}],
      "dtn": {"default_deadline": 600},
      "dtn_jobs": [
        {"id": "a", "node": "v1", "size": 10, "created": 100},
        {"id": "b", "node": "v1", "size": 10, "created": 100, "deadline": 150}
      ]
    })");
    CHECK(s.dtn_jobs[0].deadline == doctest::Approx(700.0));
    CHECK(s.dtn_jobs[1].deadline == doctest::Approx(150.0));
    CHECK(s.dtn_jobs[0].direction == "upload");
}

TEST_CASE("the world advances vehicles along their polylines") {
    const Scenario s = load_scenario(kMinimal);
    world::World w(s);

    CHECK(w.now() == 0.0);
    CHECK(w.tick_ms() == 100);
    REQUIRE(w.nodes().size() == 3);
    CHECK(w.index_of("v1") == 1);
    CHECK(w.index_of("nope") == -1);
    CHECK(w.node(0).kind == world::NodeKind::rsu);
    CHECK(w.node(0).position == Vec2{500.0, 500.0});

    // 10 m/s on a 100 ms tick moves exactly one meter east.
    w.step();
    CHECK(w.now() == doctest::Approx(0.1));
    CHECK(w.node(1).position.x == doctest::Approx(1.0));
    CHECK(w.node(1).position.y == doctest::Approx(0.0));
    CHECK(w.node(1).heading == doctest::Approx(0.0));
    CHECK(w.node(1).moving());

    for (int i = 0; i < 9; ++i) w.step();
    CHECK(w.now() == doctest::Approx(1.0));
    CHECK(w.node(1).position.x == doctest::Approx(10.0));

    // The stationary vehicle never moves.
    CHECK(w.node(2).position == Vec2{200.0, 200.0});
    CHECK_FALSE(w.node(2).moving());
}

TEST_CASE("corners turn the heading to the next segment") {
    const Scenario s = load_scenario(R"({
      "seed": 1, "duration": 60,
      "vehicles": [{"id": "v1", "route": [[0, 0], [10, 0], [10, 10], [0, 10], [0, 0]],
                    "speed": 10}]
    })");
    world::World w(s);
    for (int i = 0; i < 10; ++i) w.step(); // 1 s: exactly at the (10, 0) corner
    CHECK(w.node(0).position.x == doctest::Approx(10.0));
    CHECK(w.node(0).position.y == doctest::Approx(0.0));
    w.step();
    CHECK(w.node(0).position.y == doctest::Approx(1.0));
    CHECK(w.node(0).heading == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("a closed loop route wraps with tick-bounded displacement") {
    const Scenario s = load_scenario(R"({
      "seed": 1, "duration": 600,
      "vehicles": [{"id": "v1", "route": [[0, 0], [10, 0], [10, 10], [0, 10], [0, 0]],
                    "speed": 7}]
    })");
    world::World w(s);
    Vec2 prev = w.node(0).position;
    for (int i = 0; i < 2000; ++i) {
        w.step();
        const Vec2 cur = w.node(0).position;
        CHECK(distance(prev, cur) <= 7.0 * 0.1 + 1e-9);
        CHECK(cur.x >= -1e-9);
        CHECK(cur.x <= 10.0 + 1e-9);
        prev = cur;
    }
}

TEST_CASE("an open loop route teleports back to its first vertex") {
    const Scenario s = load_scenario(R"({
      "seed": 1, "duration": 60,
      "vehicles": [{"id": "v1", "route": [[0, 0], [10, 0]], "speed": 10}]
    })");
    world::World w(s);
    for (int i = 0; i < 9; ++i) w.step();
    CHECK(w.node(0).position.x == doctest::Approx(9.0));
    w.step(); // lands exactly on the last vertex and wraps to the front
    CHECK(w.node(0).position.x == doctest::Approx(0.0));
    CHECK(w.node(0).moving());
    w.step();
    CHECK(w.node(0).position.x == doctest::Approx(1.0));
}

TEST_CASE("a stop route parks at its last vertex") {
    const Scenario s = load_scenario(R"({
      "seed": 1, "duration": 60,
      "vehicles": [{"id": "v1", "route": [[0, 0], [5, 0]], "speed": 10,
                    "route_policy": "stop"}]
    })");
    world::World w(s);
    for (int i = 0; i < 5; ++i) w.step();
    CHECK(w.node(0).position.x == doctest::Approx(5.0));
    CHECK_FALSE(w.node(0).moving());
    CHECK(w.node(0).speed == 0.0);
    for (int i = 0; i < 20; ++i) w.step();
    CHECK(w.node(0).position.x == doctest::Approx(5.0));
}

TEST_CASE("partial-tick corner handoff conserves traveled distance") {
    // 4 m/s on a 100 ms tick travels 0.4 m; the first corner sits at 1.0 m,
    // so the third step must split 0.2 m before and 0.2 m after the turn.
    const Scenario s = load_scenario(R"({
      "seed": 1, "duration": 60,
      "vehicles": [{"id": "v1", "route": [[0, 0], [1, 0], [1, 10], [0, 10], [0, 0]],
                    "speed": 4}]
    })");
    world::World w(s);
    w.step();
    w.step();
    CHECK(w.node(0).position.x == doctest::Approx(0.8));
    w.step();
    CHECK(w.node(0).position.x == doctest::Approx(1.0));
    CHECK(w.node(0).position.y == doctest::Approx(0.2));
}
