#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lnlink {

// Toolkit-wide error type. `code` is a stable machine-readable identifier
// (e.g. "node-unknown", "parse-error"); `what()` carries the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace lnlink
