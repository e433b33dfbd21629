#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace cubesettle {

// All balances, fees and prices are integer wei; ether/USD values are
// derived display views computed at reporting time.
using Wei = std::uint64_t;
using Gas = std::uint64_t;
using Count = std::uint64_t;
using Timestamp = std::int64_t;  // seconds

inline constexpr Wei kWeiPerEther = 1'000'000'000'000'000'000ULL;
inline constexpr Wei kWeiPerGwei = 1'000'000'000ULL;

// Overflow-checked wei arithmetic. Throws Error(Errc::Overflow).
Wei checked_add(Wei a, Wei b);
Wei checked_sub(Wei a, Wei b);
Wei checked_mul(Wei a, Wei b);

// Parses a non-negative decimal gwei amount ("0.9", "20") into exact wei.
// At most 9 fractional digits; anything finer than 1 wei is rejected.
Wei parse_gwei_to_wei(const std::string& text);

// Canonical rendering of a wei-per-gas price back to a decimal gwei string
// ("0.9", "20"); inverse of parse_gwei_to_wei.
std::string format_wei_as_gwei(Wei wei);

double wei_to_ether(Wei w);
double wei_to_gwei(Wei w);

// Three significant digits, scientific; matches the report tables.
std::string format_sig3(double v);

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t mix64(std::uint64_t x);
std::string to_hex64(std::uint64_t v);

}  // namespace cubesettle
