#include "harborsim/trace.hpp"

#include "harborsim/errors.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <system_error>

namespace harborsim::trace {

FileSink::FileSink(const std::filesystem::path& path) {
    file_ = std::fopen(path.string().c_str(), "wb");
    if (!file_) {
        throw std::system_error(errno, std::generic_category(),
                                "cannot open trace file " + path.string());
    }
    // The writer emits many small lines; a big stdio buffer keeps syscalls rare.
    std::setvbuf(file_, nullptr, _IOFBF, 1 << 20);
}

FileSink::~FileSink() {
    if (file_) std::fclose(file_);
}

void FileSink::write(const char* data, std::size_t n) {
    if (std::fwrite(data, 1, n, file_) != n) {
        throw std::system_error(errno, std::generic_category(), "trace write failed");
    }
}

void FileSink::flush() {
    if (std::fflush(file_) != 0) {
        throw std::system_error(errno, std::generic_category(), "trace flush failed");
    }
}

void TraceWriter::begin(const char* type, double t) {
    line_.clear();
    line_ += "{\"type\":\"";
    line_ += type;
    line_ += "\",\"t\":";
    num(t);
}

void TraceWriter::key(const char* k) {
    line_ += ",\"";
    line_ += k;
    line_ += "\":";
}

void TraceWriter::str(const std::string& s) {
    line_ += '"';
    for (char c : s) {
        switch (c) {
        case '"': line_ += "\\\""; break;
        case '\\': line_ += "\\\\"; break;
        case '\n': line_ += "\\n"; break;
        case '\r': line_ += "\\r"; break;
        case '\t': line_ += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                line_ += buf;
            } else {
                line_ += c;
            }
        }
    }
    line_ += '"';
}

void TraceWriter::num(double v) {
    if (!std::isfinite(v)) {
        throw std::domain_error("non-finite value in trace record");
    }
    std::array<char, 32> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    line_.append(buf.data(), res.ptr);
}

void TraceWriter::num(std::int64_t v) {
    std::array<char, 24> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    line_.append(buf.data(), res.ptr);
}

void TraceWriter::raw(const char* s) { line_ += s; }

void TraceWriter::end() {
    line_ += "}\n";
    sink_.write(line_.data(), line_.size());
}

void TraceWriter::write(const PositionRecord& r) {
    begin("position", r.t);
    key("node"); str(r.node);
    key("x"); num(r.x);
    key("y"); num(r.y);
    key("speed"); num(r.speed);
    if (r.heading) {
        key("heading"); num(*r.heading);
    }
    end();
    ++counts_.position;
}

void TraceWriter::write(const ReachabilityRecord& r) {
    begin("reachability", r.t);
    key("node"); str(r.node);
    key("hops");
    if (r.hops) num(*r.hops); else raw("null");
    key("gateway");
    if (r.gateway) str(*r.gateway); else raw("null");
    end();
    ++counts_.reachability;
}

void TraceWriter::write(const ChoiceRecord& r) {
    begin("choice", r.t);
    key("node"); str(r.node);
    key("choice"); str(r.choice);
    key("score");
    if (r.score) num(*r.score); else raw("null");
    key("hops");
    if (r.hops) num(*r.hops); else raw("null");
    end();
    ++counts_.choice;
}

void TraceWriter::write(const EventRecord& r) {
    begin("event", r.t);
    key("node"); str(r.node);
    key("kind"); raw(r.connected ? "\"connect\"" : "\"disconnect\"");
    end();
    ++counts_.event;
}

void TraceWriter::write(const TransferRecord& r) {
    begin("transfer", r.t);
    key("job"); str(r.job);
    key("node"); str(r.node);
    key("iface"); str(r.iface);
    key("bytes"); num(r.bytes);
    key("rate"); num(r.rate);
    key("gateway");
    if (r.gateway) str(*r.gateway); else raw("null");
    end();
    ++counts_.transfer;
}

void TraceWriter::write(const ProbeRecord& r) {
    begin("probe", r.t);
    key("src"); str(r.src);
    key("dst"); str(r.dst);
    key("capacity"); num(r.capacity);
    key("avail_bw"); num(r.avail_bw);
    key("avail_bw_lossy"); num(r.avail_bw_lossy);
    key("rtt"); num(r.rtt);
    key("jitter"); num(r.jitter);
    key("rssi"); num(r.rssi);
    key("pdr"); num(r.pdr);
    end();
    ++counts_.probe;
}

void TraceWriter::write(const ControlRecord& r) {
    begin("control", r.t);
    key("node"); str(r.node);
    key("kind"); str(r.kind);
    key("detail"); str(r.detail);
    end();
    ++counts_.control;
}

void TraceWriter::write(const JobRecord& r) {
    begin("job", r.t);
    key("job"); str(r.job);
    key("node"); str(r.node);
    key("direction"); str(r.direction);
    key("state"); str(r.state);
    key("size"); num(r.size);
    key("priority"); num(r.priority);
    key("created"); num(r.created);
    key("deadline"); num(r.deadline);
    key("completed");
    if (r.completed) num(*r.completed); else raw("null");
    key("ledger"); raw("{");
    bool first = true;
    for (const auto& [iface, bytes] : r.ledger) {
        if (!first) line_ += ',';
        first = false;
        str(iface);
        line_ += ':';
        num(bytes);
    }
    raw("}");
    end();
    ++counts_.job;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::int64_t line, const std::string& msg) {
    throw TraceFormatError(line, msg);
}

const json& field(const json& obj, const char* name, std::int64_t line) {
    auto it = obj.find(name);
    if (it == obj.end()) fail(line, std::string("missing field \"") + name + "\"");
    return *it;
}

double num_field(const json& obj, const char* name, std::int64_t line) {
    const json& v = field(obj, name, line);
    if (!v.is_number()) fail(line, std::string("field \"") + name + "\" is not a number");
    return v.get<double>();
}

std::int64_t int_field(const json& obj, const char* name, std::int64_t line) {
    const json& v = field(obj, name, line);
    if (!v.is_number_integer()) fail(line, std::string("field \"") + name + "\" is not an integer");
    return v.get<std::int64_t>();
}

std::string str_field(const json& obj, const char* name, std::int64_t line) {
    const json& v = field(obj, name, line);
    if (!v.is_string()) fail(line, std::string("field \"") + name + "\" is not a string");
    return v.get<std::string>();
}

std::optional<double> opt_num_field(const json& obj, const char* name, std::int64_t line) {
    const json& v = field(obj, name, line);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) fail(line, std::string("field \"") + name + "\" is not a number or null");
    return v.get<double>();
}

std::optional<int> opt_int_field(const json& obj, const char* name, std::int64_t line) {
    const json& v = field(obj, name, line);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number_integer()) fail(line, std::string("field \"") + name + "\" is not an integer or null");
    return v.get<int>();
}

std::optional<std::string> opt_str_field(const json& obj, const char* name, std::int64_t line) {
    const json& v = field(obj, name, line);
    if (v.is_null()) return std::nullopt;
    if (!v.is_string()) fail(line, std::string("field \"") + name + "\" is not a string or null");
    return v.get<std::string>();
}

void dispatch(const json& obj, const Handler& h, RecordCounts& counts, std::int64_t line) {
    const std::string type = str_field(obj, "type", line);
    const double t = num_field(obj, "t", line);

    if (type == "position") {
        ++counts.position;
        PositionRecord r;
        r.t = t;
        r.node = str_field(obj, "node", line);
        r.x = num_field(obj, "x", line);
        r.y = num_field(obj, "y", line);
        r.speed = num_field(obj, "speed", line);
        if (obj.contains("heading")) r.heading = num_field(obj, "heading", line);
        if (h.position) h.position(r);
    } else if (type == "reachability") {
        ++counts.reachability;
        ReachabilityRecord r;
        r.t = t;
        r.node = str_field(obj, "node", line);
        r.hops = opt_int_field(obj, "hops", line);
        r.gateway = opt_str_field(obj, "gateway", line);
        if (h.reachability) h.reachability(r);
    } else if (type == "choice") {
        ++counts.choice;
        ChoiceRecord r;
        r.t = t;
        r.node = str_field(obj, "node", line);
        r.choice = str_field(obj, "choice", line);
        r.score = opt_num_field(obj, "score", line);
        r.hops = opt_int_field(obj, "hops", line);
        if (h.choice) h.choice(r);
    } else if (type == "event") {
        ++counts.event;
        EventRecord r;
        r.t = t;
        r.node = str_field(obj, "node", line);
        const std::string kind = str_field(obj, "kind", line);
        if (kind == "connect") r.connected = true;
        else if (kind == "disconnect") r.connected = false;
        else fail(line, "event kind must be connect or disconnect, got \"" + kind + "\"");
        if (h.event) h.event(r);
    } else if (type == "transfer") {
        ++counts.transfer;
        TransferRecord r;
        r.t = t;
        r.job = str_field(obj, "job", line);
        r.node = str_field(obj, "node", line);
        r.iface = str_field(obj, "iface", line);
        r.bytes = int_field(obj, "bytes", line);
        r.rate = num_field(obj, "rate", line);
        r.gateway = opt_str_field(obj, "gateway", line);
        if (h.transfer) h.transfer(r);
    } else if (type == "probe") {
        ++counts.probe;
        ProbeRecord r;
        r.t = t;
        r.src = str_field(obj, "src", line);
        r.dst = str_field(obj, "dst", line);
        r.capacity = num_field(obj, "capacity", line);
        r.avail_bw = num_field(obj, "avail_bw", line);
        r.avail_bw_lossy = num_field(obj, "avail_bw_lossy", line);
        r.rtt = num_field(obj, "rtt", line);
        r.jitter = num_field(obj, "jitter", line);
        r.rssi = num_field(obj, "rssi", line);
        r.pdr = num_field(obj, "pdr", line);
        if (h.probe) h.probe(r);
    } else if (type == "control") {
        ++counts.control;
        ControlRecord r;
        r.t = t;
        r.node = str_field(obj, "node", line);
        r.kind = str_field(obj, "kind", line);
        r.detail = str_field(obj, "detail", line);
        if (h.control) h.control(r);
    } else if (type == "job") {
        ++counts.job;
        JobRecord r;
        r.t = t;
        r.job = str_field(obj, "job", line);
        r.node = str_field(obj, "node", line);
        r.direction = str_field(obj, "direction", line);
        r.state = str_field(obj, "state", line);
        r.size = int_field(obj, "size", line);
        r.priority = static_cast<int>(int_field(obj, "priority", line));
        r.created = num_field(obj, "created", line);
        r.deadline = num_field(obj, "deadline", line);
        r.completed = opt_num_field(obj, "completed", line);
        const json& ledger = field(obj, "ledger", line);
        if (!ledger.is_object()) fail(line, "field \"ledger\" is not an object");
        for (auto it = ledger.begin(); it != ledger.end(); ++it) {
            if (!it.value().is_number_integer()) {
                fail(line, "ledger entry \"" + it.key() + "\" is not an integer");
            }
            r.ledger.emplace_back(it.key(), it.value().get<std::int64_t>());
        }
        if (h.job) h.job(r);
    } else {
        fail(line, "unknown record type \"" + type + "\"");
    }
}

} // namespace

RecordCounts read_trace(std::istream& in, const Handler& handler) {
    RecordCounts counts;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(lineno, e.what());
        }
        if (!obj.is_object()) fail(lineno, "record is not a JSON object");
        dispatch(obj, handler, counts, lineno);
    }
    return counts;
}

RecordCounts read_trace_file(const std::filesystem::path& path, const Handler& handler) {
    std::ifstream in(path);
    if (!in) {
        throw std::system_error(errno, std::generic_category(),
                                "cannot open trace file " + path.string());
    }
    return read_trace(in, handler);
}

} // namespace harborsim::trace
