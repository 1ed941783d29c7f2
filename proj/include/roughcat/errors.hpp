#pragma once

#include <stdexcept>
#include <string>

namespace roughcat {

enum class ErrorKind {
    invalid_input,
    infeasible,
    inconsistency,
    no_path,
    resource_limit,
    invalid_gluing,
    domain,
    unknown_name,
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::inconsistency: return "inconsistency";
    case ErrorKind::no_path: return "no-path";
    case ErrorKind::resource_limit: return "resource";
    case ErrorKind::invalid_gluing: return "invalid-gluing";
    case ErrorKind::domain: return "domain";
    case ErrorKind::unknown_name: return "unknown-name";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace roughcat
