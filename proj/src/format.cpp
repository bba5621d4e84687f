#include "navstyle/format.hpp"

#include <charconv>
#include <cmath>

namespace navstyle {

std::string format_decimal(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::optional<double> proportion(std::size_t numerator, std::size_t denominator) {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::optional<double> percentage(std::size_t numerator, std::size_t denominator) {
  auto p = proportion(numerator, denominator);
  if (!p) return std::nullopt;
  return 100.0 * *p;
}

std::optional<double> rounded_percentage(std::size_t numerator, std::size_t denominator,
                                         int places) {
  auto p = percentage(numerator, denominator);
  if (!p) return std::nullopt;
  const double scale = std::pow(10.0, places);
  return std::round(*p * scale) / scale;
}

}  // namespace navstyle
