#pragma once

#include <stdexcept>
#include <string>

namespace orthodyn {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct StripError : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };
struct Singular : Error { using Error::Error; };
struct NoPseudoVacuum : Error { using Error::Error; };

// Raised by validate_alpha and classify; `where` names the violated row or condition.
struct ConstraintViolated : Error {
    std::string where;
    ConstraintViolated(std::string what, std::string w = {})
        : Error(std::move(what)), where(std::move(w)) {}
};

}  // namespace orthodyn
