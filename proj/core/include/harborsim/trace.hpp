#ifndef HARBORSIM_TRACE_HPP
#define HARBORSIM_TRACE_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace harborsim::trace {

// One JSON object per line, discriminated by "type". Every numeric field is
// serialized with shortest round-trip formatting, so identical runs produce
// byte-identical files.

struct PositionRecord {
    double t = 0.0;
    std::string node;
    double x = 0.0;
    double y = 0.0;
    double speed = 0.0;
    std::optional<double> heading; // radians; absent while not moving
};

struct ReachabilityRecord {
    double t = 0.0;
    std::string node;
    std::optional<int> hops;    // nullopt = unreachable
    std::optional<std::string> gateway;
};

struct ChoiceRecord {
    double t = 0.0;
    std::string node;
    std::string choice; // dsrc | wifi | cellular | none
    std::optional<double> score;
    std::optional<int> hops;
};

struct EventRecord {
    double t = 0.0;
    std::string node;
    bool connected = false; // kind: connect | disconnect
};

struct TransferRecord {
    double t = 0.0;
    std::string job;
    std::string node;
    std::string iface;
    std::int64_t bytes = 0;
    double rate = 0.0; // bits/s attained during the tick
    std::optional<std::string> gateway; // mesh transfers only
};

struct ProbeRecord {
    double t = 0.0; // GPS-referenced sample time
    std::string src;
    std::string dst;
    double capacity = 0.0;       // bits/s
    double avail_bw = 0.0;       // bits/s
    double avail_bw_lossy = 0.0; // bits/s
    double rtt = 0.0;            // ms
    double jitter = 0.0;         // ms
    double rssi = 0.0;           // dBm
    double pdr = 0.0;
};

struct ControlRecord {
    double t = 0.0;
    std::string node;
    std::string kind; // register | reboot | deploy_phase
    std::string detail;
};

/// Final (or end-of-run) summary of one transfer job. Exactly one per job.
struct JobRecord {
    double t = 0.0;
    std::string job;
    std::string node;
    std::string direction;
    std::string state;
    std::int64_t size = 0;
    int priority = 0;
    double created = 0.0;
    double deadline = 0.0;
    std::optional<double> completed;
    std::vector<std::pair<std::string, std::int64_t>> ledger; // interface -> bytes
};

struct RecordCounts {
    std::int64_t position = 0;
    std::int64_t reachability = 0;
    std::int64_t choice = 0;
    std::int64_t event = 0;
    std::int64_t transfer = 0;
    std::int64_t probe = 0;
    std::int64_t control = 0;
    std::int64_t job = 0;

    std::int64_t total() const {
        return position + reachability + choice + event + transfer + probe + control + job;
    }
};

/// Byte sink for the writer. Implementations outside the library (hashing,
/// comparison) just subclass.
class Sink {
public:
    virtual ~Sink() = default;
    virtual void write(const char* data, std::size_t n) = 0;
    virtual void flush() {}
};

class FileSink : public Sink {
public:
    explicit FileSink(const std::filesystem::path& path);
    ~FileSink() override;
    FileSink(const FileSink&) = delete;
    FileSink& operator=(const FileSink&) = delete;

    void write(const char* data, std::size_t n) override;
    void flush() override;

private:
    std::FILE* file_ = nullptr;
};

class StringSink : public Sink {
public:
    void write(const char* data, std::size_t n) override { data_.append(data, n); }
    const std::string& str() const { return data_; }

private:
    std::string data_;
};

class TraceWriter {
public:
    explicit TraceWriter(Sink& sink) : sink_(sink) {}

    void write(const PositionRecord& r);
    void write(const ReachabilityRecord& r);
    void write(const ChoiceRecord& r);
    void write(const EventRecord& r);
    void write(const TransferRecord& r);
    void write(const ProbeRecord& r);
    void write(const ControlRecord& r);
    void write(const JobRecord& r);

    const RecordCounts& counts() const { return counts_; }
    void flush() { sink_.flush(); }

private:
    void begin(const char* type, double t);
    void key(const char* k);
    void str(const std::string& s);
    void num(double v);
    void num(std::int64_t v);
    void num(int v) { num(static_cast<std::int64_t>(v)); }
    void raw(const char* s);
    void end();

    Sink& sink_;
    RecordCounts counts_;
    std::string line_;
};

/// Streaming reader callbacks. Unset handlers skip their record type (the
/// record is still validated and counted).
struct Handler {
    std::function<void(const PositionRecord&)> position;
    std::function<void(const ReachabilityRecord&)> reachability;
    std::function<void(const ChoiceRecord&)> choice;
    std::function<void(const EventRecord&)> event;
    std::function<void(const TransferRecord&)> transfer;
    std::function<void(const ProbeRecord&)> probe;
    std::function<void(const ControlRecord&)> control;
    std::function<void(const JobRecord&)> job;
};

/// Reads records line by line. Throws TraceFormatError with the first bad
/// line number on malformed input. Returns per-type counts.
RecordCounts read_trace(std::istream& in, const Handler& handler);
RecordCounts read_trace_file(const std::filesystem::path& path, const Handler& handler);

} // namespace harborsim::trace

#endif
