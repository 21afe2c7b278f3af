#pragma once

#include <stdexcept>
#include <string>

namespace bets {

/// Library-wide error; message names the violated rule or the failing input.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bets
