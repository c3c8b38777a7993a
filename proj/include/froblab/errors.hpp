#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace froblab {

// Error category drives the CLI exit code: precondition -> 2, budget -> 3,
// internal -> 1.
enum class ErrorCategory { precondition, budget, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), cat_(cat), kind_(std::move(kind)) {}

    ErrorCategory category() const { return cat_; }
    const std::string& kind() const { return kind_; }

private:
    ErrorCategory cat_;
    std::string kind_;
};

[[noreturn]] inline void fail_pre(const std::string& kind, const std::string& msg) {
    throw Error(ErrorCategory::precondition, kind, msg);
}

[[noreturn]] inline void fail_budget(const std::string& msg) {
    throw Error(ErrorCategory::budget, "BudgetExceeded", msg);
}

[[noreturn]] inline void fail_internal(const std::string& kind, const std::string& msg) {
    throw Error(ErrorCategory::internal, kind, msg);
}

}  // namespace froblab
