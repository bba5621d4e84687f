#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace navstyle {

// Shortest decimal rendering that round-trips the double exactly.
std::string format_decimal(double value);

// numerator / denominator; absent when the denominator is zero.
std::optional<double> proportion(std::size_t numerator, std::size_t denominator);

// 100 * numerator / denominator; absent when the denominator is zero.
std::optional<double> percentage(std::size_t numerator, std::size_t denominator);

// Percentage rounded half-away-from-zero to `places` decimals, as reported
// in tables ("29.82").
std::optional<double> rounded_percentage(std::size_t numerator, std::size_t denominator,
                                         int places = 2);

}  // namespace navstyle
