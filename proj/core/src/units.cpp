#include "cubesettle/units.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "cubesettle/errors.hpp"

namespace cubesettle {

Wei checked_add(Wei a, Wei b) {
  Wei out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(Errc::Overflow, "wei addition overflow");
  }
  return out;
}

Wei checked_sub(Wei a, Wei b) {
  if (b > a) {
    throw Error(Errc::Overflow, "wei subtraction underflow");
  }
  return a - b;
}

Wei checked_mul(Wei a, Wei b) {
  Wei out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(Errc::Overflow, "wei multiplication overflow");
  }
  return out;
}

Wei parse_gwei_to_wei(const std::string& text) {
  if (text.empty()) {
    throw Error(Errc::ParseError, "empty gas price");
  }
  std::string intpart;
  std::string fracpart;
  bool seen_dot = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) {
        throw Error(Errc::ParseError, "malformed gas price '" + text + "'");
      }
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(Errc::ParseError, "malformed gas price '" + text + "'");
    }
    (seen_dot ? fracpart : intpart) += c;
  }
  if (intpart.empty() && fracpart.empty()) {
    throw Error(Errc::ParseError, "malformed gas price '" + text + "'");
  }
  if (fracpart.size() > 9) {
    throw Error(Errc::ParseError,
                "gas price '" + text + "' is finer than 1 wei (max 9 fractional digits)");
  }
  Wei value = 0;
  for (char c : intpart) {
    value = checked_add(checked_mul(value, 10), static_cast<Wei>(c - '0'));
  }
  value = checked_mul(value, kWeiPerGwei);
  Wei frac = 0;
  for (char c : fracpart) {
    frac = frac * 10 + static_cast<Wei>(c - '0');
  }
  for (std::size_t i = fracpart.size(); i < 9; ++i) {
    frac *= 10;
  }
  return checked_add(value, frac);
}

std::string format_wei_as_gwei(Wei wei) {
  Wei whole = wei / kWeiPerGwei;
  Wei frac = wei % kWeiPerGwei;
  std::string out = std::to_string(whole);
  if (frac != 0) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%09llu", static_cast<unsigned long long>(frac));
    std::string digits(buf);
    while (!digits.empty() && digits.back() == '0') {
      digits.pop_back();
    }
    out += "." + digits;
  }
  return out;
}

double wei_to_ether(Wei w) { return static_cast<double>(w) / 1e18; }

double wei_to_gwei(Wei w) { return static_cast<double>(w) / 1e9; }

std::string format_sig3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string to_hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace cubesettle
