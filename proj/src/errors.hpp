#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cogarch {

enum class ErrorCode {
    InvalidArgument,
    Validation,
    DegenerateSpectrum,
    IllConditioned,
    Singular,
    NotApplicable,
    NonConvergence,
    Overflow,
    Domain,
    Internal,
};

// Single exception type for the core; the code maps 1:1 onto the C status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

// Non-fatal diagnostics collected per thread; the C API and CLI drain them.
inline thread_local std::vector<std::string> warning_log;

inline void warn(std::string msg) { warning_log.push_back(std::move(msg)); }

inline std::vector<std::string> take_warnings() { return std::exchange(warning_log, {}); }

}  // namespace cogarch
