#include "navstyle/errors.hpp"

namespace navstyle {

RowError::RowError(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message),
      line_(line),
      detail_(message) {}

}  // namespace navstyle
