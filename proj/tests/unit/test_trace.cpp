#include <doctest.h>

#include "harborsim/errors.hpp"
#include "harborsim/trace.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace harborsim;
using namespace harborsim::trace;
using nlohmann::json;

namespace {

std::string one_line(const auto& record) {
    StringSink sink;
    TraceWriter writer(sink);
    writer.write(record);
    return sink.str();
}

} // namespace

TEST_CASE("position records serialize with shortest round-trip numbers") {
    PositionRecord r{1.5, "v01", 12.25, 3.5, 7.5, 0.5};
    CHECK(one_line(r) ==
          "{\"type\":\"position\",\"t\":1.5,\"node\":\"v01\",\"x\":12.25,\"y\":3.5,"
          "\"speed\":7.5,\"heading\":0.5}\n");

    PositionRecord parked{2.0, "v02", 100.0, 200.0, 0.0, std::nullopt};
    const std::string line = one_line(parked);
    CHECK(line.find("heading") == std::string::npos);
    CHECK(line.find("\"speed\":0,") == std::string::npos); // 0 terminates the object
    CHECK(line.find("\"speed\":0}") != std::string::npos);
}

TEST_CASE("optional fields serialize as null, not as absent keys") {
    ReachabilityRecord lost{3.0, "v05", std::nullopt, std::nullopt};
    CHECK(one_line(lost) ==
          "{\"type\":\"reachability\",\"t\":3,\"node\":\"v05\",\"hops\":null,"
          "\"gateway\":null}\n");

    ReachabilityRecord found{3.0, "v05", 2, std::string("r1")};
    CHECK(one_line(found) ==
          "{\"type\":\"reachability\",\"t\":3,\"node\":\"v05\",\"hops\":2,"
          "\"gateway\":\"r1\"}\n");
}

TEST_CASE("event records spell the edge direction") {
    CHECK(one_line(EventRecord{4.2, "v01", true}) ==
          "{\"type\":\"event\",\"t\":4.2,\"node\":\"v01\",\"kind\":\"connect\"}\n");
    CHECK(one_line(EventRecord{4.2, "v01", false}) ==
          "{\"type\":\"event\",\"t\":4.2,\"node\":\"v01\",\"kind\":\"disconnect\"}\n");
}

TEST_CASE("job records carry the per-interface ledger as an object") {
    JobRecord r;
    r.t = 46.9;
    r.job = "clip";
    r.node = "a3";
    r.direction = "upload";
    r.state = "fallback_completed";
    r.size = 12'000'000;
    r.priority = 1;
    r.created = 1.0;
    r.deadline = 30.0;
    r.completed = 46.9;
    r.ledger = {{"dsrc", 9'891'740}, {"wifi", 0}, {"cellular", 2'108'260}};
    CHECK(one_line(r) ==
          "{\"type\":\"job\",\"t\":46.9,\"job\":\"clip\",\"node\":\"a3\","
          "\"direction\":\"upload\",\"state\":\"fallback_completed\",\"size\":12000000,"
          "\"priority\":1,\"created\":1,\"deadline\":30,\"completed\":46.9,"
          "\"ledger\":{\"dsrc\":9891740,\"wifi\":0,\"cellular\":2108260}}\n");
}

TEST_CASE("strings escape control characters and quotes") {
    ControlRecord r{0.0, "v\"1", "register", "line1\nline2\ttab"};
    const std::string line = one_line(r);
    CHECK(line.find("v\\\"1") != std::string::npos);
    CHECK(line.find("\\n") != std::string::npos);
    CHECK(line.find("\\t") != std::string::npos);
    // The emitted line is still valid JSON.
    const json parsed = json::parse(line);
    CHECK(parsed.at("node").get<std::string>() == "v\"1");
    CHECK(parsed.at("detail").get<std::string>() == "line1\nline2\ttab");
}

TEST_CASE("non-finite values are refused at write time") {
    TransferRecord r{0.0, "j", "v", "dsrc", 100, std::nan(""), std::nullopt};
    StringSink sink;
    TraceWriter writer(sink);
    CHECK_THROWS_AS(writer.write(r), std::domain_error);
    TransferRecord inf{0.0, "j", "v", "dsrc", 100,
                       std::numeric_limits<double>::infinity(), std::nullopt};
    CHECK_THROWS_AS(writer.write(inf), std::domain_error);
}

TEST_CASE("every record type survives a write-read round trip") {
    StringSink sink;
    TraceWriter writer(sink);

    writer.write(PositionRecord{0.1, "v01", 1.0, 2.0, 3.0, 0.25});
    writer.write(ReachabilityRecord{0.1, "v01", 2, std::string("r1")});
    writer.write(ChoiceRecord{0.1, "v01", "dsrc", 0.75, 2});
    writer.write(ChoiceRecord{0.2, "v02", "none", std::nullopt, std::nullopt});
    writer.write(EventRecord{0.3, "v01", false});
    writer.write(TransferRecord{0.4, "job-a", "v01", "dsrc", 4500, 2.76e6, std::string("r1")});
    writer.write(ProbeRecord{0.5, "v01", "r1", 2.7e6, 2.2e6, 2.1e6, 4.4, 0.3, -88.5, 0.92});
    writer.write(ControlRecord{0.6, "v01", "register", "dsrc:10.0.1.0"});
    JobRecord job;
    job.t = 1.0;
    job.job = "job-a";
    job.node = "v01";
    job.direction = "upload";
    job.state = "completed";
    job.size = 4500;
    job.priority = 2;
    job.created = 0.0;
    job.deadline = 30.0;
    job.completed = 0.5;
    job.ledger = {{"dsrc", 4500}, {"wifi", 0}, {"cellular", 0}};
    writer.write(job);

    CHECK(writer.counts().total() == 9);
    CHECK(writer.counts().choice == 2);

    std::istringstream in(sink.str());
    std::vector<std::string> seen;
    Handler h;
    h.position = [&](const PositionRecord& r) {
        seen.push_back("position");
        CHECK(r.t == 0.1);
        CHECK(r.node == "v01");
        REQUIRE(r.heading.has_value());
        CHECK(*r.heading == 0.25);
    };
    h.reachability = [&](const ReachabilityRecord& r) {
        seen.push_back("reachability");
        REQUIRE(r.hops.has_value());
        CHECK(*r.hops == 2);
        REQUIRE(r.gateway.has_value());
        CHECK(*r.gateway == "r1");
    };
    h.choice = [&](const ChoiceRecord& r) {
        seen.push_back("choice");
        if (r.choice == "none") {
            CHECK_FALSE(r.score.has_value());
            CHECK_FALSE(r.hops.has_value());
        } else {
            CHECK(r.choice == "dsrc");
            CHECK(*r.score == 0.75);
        }
    };
    h.event = [&](const EventRecord& r) {
        seen.push_back("event");
        CHECK_FALSE(r.connected);
    };
    h.transfer = [&](const TransferRecord& r) {
        seen.push_back("transfer");
        CHECK(r.bytes == 4500);
        CHECK(r.rate == 2.76e6);
        REQUIRE(r.gateway.has_value());
        CHECK(*r.gateway == "r1");
    };
    h.probe = [&](const ProbeRecord& r) {
        seen.push_back("probe");
        CHECK(r.capacity == 2.7e6);
        CHECK(r.pdr == 0.92);
        CHECK(r.rssi == -88.5);
    };
    h.control = [&](const ControlRecord& r) {
        seen.push_back("control");
        CHECK(r.kind == "register");
        CHECK(r.detail == "dsrc:10.0.1.0");
    };
    h.job = [&](const JobRecord& r) {
        seen.push_back("job");
        CHECK(r.state == "completed");
        REQUIRE(r.completed.has_value());
        CHECK(*r.completed == 0.5);
        REQUIRE(r.ledger.size() == 3);
        // The reader returns ledger entries in key order, not file order.
        std::map<std::string, std::int64_t> ledger(r.ledger.begin(), r.ledger.end());
        CHECK(ledger["dsrc"] == 4500);
        CHECK(ledger["wifi"] == 0);
        CHECK(ledger["cellular"] == 0);
    };

    const RecordCounts counts = read_trace(in, h);
    CHECK(counts.total() == 9);
    CHECK(counts.position == 1);
    CHECK(counts.choice == 2);
    CHECK(counts.job == 1);
    REQUIRE(seen.size() == 9);
    CHECK(seen[0] == "position");
    CHECK(seen[8] == "job");
}

TEST_CASE("the reader reports the first bad line by number") {
    const std::string text =
        "{\"type\":\"event\",\"t\":1,\"node\":\"v\",\"kind\":\"connect\"}\n"
        "{\"type\":\"event\",\"t\":2,\"node\":\"v\",\"kind\":\"connect\"}\n"
        "this is not json\n";
    std::istringstream in(text);
    try {
        read_trace(in, {});
        FAIL_CHECK("expected TraceFormatError");
    } catch (const TraceFormatError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("unknown record types and missing fields are format errors") {
    std::istringstream unknown("{\"type\":\"mystery\",\"t\":1}\n");
    CHECK_THROWS_AS(read_trace(unknown, {}), TraceFormatError);

    std::istringstream missing("{\"type\":\"position\",\"t\":1,\"node\":\"v\",\"x\":1}\n");
    try {
        read_trace(missing, {});
        FAIL_CHECK("expected TraceFormatError");
    } catch (const TraceFormatError& e) {
        CHECK(e.line() == 1);
        CHECK(std::string(e.what()).find("\"y\"") != std::string::npos);
    }

    std::istringstream wrong_type(
        "{\"type\":\"event\",\"t\":1,\"node\":\"v\",\"kind\":\"sideways\"}\n");
    CHECK_THROWS_AS(read_trace(wrong_type, {}), TraceFormatError);
}

TEST_CASE("records without handlers are still validated and counted") {
    std::istringstream in(
        "{\"type\":\"event\",\"t\":1,\"node\":\"v\",\"kind\":\"connect\"}\n"
        "{\"type\":\"control\",\"t\":2,\"node\":\"v\",\"kind\":\"reboot\",\"detail\":\"w\"}\n");
    const RecordCounts counts = read_trace(in, {});
    CHECK(counts.event == 1);
    CHECK(counts.control == 1);
    CHECK(counts.total() == 2);
}

TEST_CASE("blank lines are skipped and a missing final newline is tolerated") {
    std::istringstream blank(
        "{\"type\":\"event\",\"t\":1,\"node\":\"v\",\"kind\":\"connect\"}\n\n"
        "{\"type\":\"event\",\"t\":2,\"node\":\"v\",\"kind\":\"disconnect\"}\n");
    CHECK(read_trace(blank, {}).event == 2);

    std::istringstream no_newline("{\"type\":\"event\",\"t\":1,\"node\":\"v\",\"kind\":\"connect\"}");
    CHECK(read_trace(no_newline, {}).event == 1);
}

TEST_CASE("reading a missing file is an I/O error") {
    CHECK_THROWS_AS(read_trace_file("/nonexistent/nowhere.jsonl", {}), std::system_error);
}
