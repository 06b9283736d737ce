#pragma once

#include <stdexcept>
#include <string>

namespace stroketree {

/// Thrown by every stroketree operation that rejects its input. The message
/// names the failing operation and the offending value or file.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace stroketree
