#pragma once

#include <stdexcept>
#include <string>

namespace spmk {

/// Error type thrown on contract violations (bad input, malformed files,
/// dimension mismatches). The message carries the offending detail.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spmk
