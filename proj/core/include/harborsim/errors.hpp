#ifndef HARBORSIM_ERRORS_HPP
#define HARBORSIM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace harborsim {

/// Malformed input text (not valid JSON, wrong value type, ...).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid input that violates a domain invariant. The message
/// names the offending field and value.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// State-machine event applied in a phase where it is not admissible.
class ProtocolError : public std::logic_error {
public:
    explicit ProtocolError(const std::string& what) : std::logic_error(what) {}
};

/// Internally inconsistent data stream (e.g. two disconnects in a row).
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

/// Corrupt or truncated trace file; carries the first bad line number.
class TraceFormatError : public std::runtime_error {
public:
    TraceFormatError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace harborsim

#endif
