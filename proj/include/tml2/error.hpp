#pragma once

#include <stdexcept>
#include <string>

namespace tml2 {

/// Failure carrying a stable code such as `E-IO` or `E-LIVELOCK`.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace tml2
