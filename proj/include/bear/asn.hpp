#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "bear/core.hpp"

namespace bear {

/// Autonomous system number. 32-bit, always > 0.
class Asn {
 public:
  Asn() = delete;
  explicit constexpr Asn(std::uint32_t value) : value_(value) {
    if (value == 0) throw SpecError("ASN must be > 0");
  }

  constexpr std::uint32_t value() const { return value_; }

  auto operator<=>(const Asn&) const = default;

  std::string str() const { return std::to_string(value_); }
  std::string display() const { return "AS" + std::to_string(value_); }

  static Asn parse(const std::string& text) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(text, &used);
    } catch (const std::exception&) {
      raise<ParseError>("bad ASN '", text, "'");
    }
    if (used != text.size() || v == 0 || v > 0xffffffffull) {
      raise<ParseError>("bad ASN '", text, "'");
    }
    return Asn(static_cast<std::uint32_t>(v));
  }

 private:
  std::uint32_t value_;
};

}  // namespace bear
