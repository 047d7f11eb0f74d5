#pragma once

#include <arpa/inet.h>

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <string>

#include "bear/core.hpp"

namespace bear {

enum class PrefixRelation { Equal, AMoreSpecific, ALessSpecific, Disjoint };

/// CIDR block, IPv4 or IPv6, stored in canonical form (host bits zero).
class Prefix {
 public:
  static Prefix v4(std::array<std::uint8_t, 4> addr, unsigned mask_len) {
    std::array<std::uint8_t, 16> bytes{};
    std::memcpy(bytes.data(), addr.data(), 4);
    return Prefix(false, bytes, mask_len);
  }

  static Prefix v6(std::array<std::uint8_t, 16> addr, unsigned mask_len) {
    return Prefix(true, addr, mask_len);
  }

  /// Parses "10.0.0.0/8" or "2001:db8::/32". Host bits beyond the mask are
  /// zeroed.
  static Prefix parse(const std::string& cidr) {
    auto slash = cidr.find('/');
    if (slash == std::string::npos) raise<ParseError>("prefix '", cidr, "' missing mask length");
    std::string addr = cidr.substr(0, slash);
    std::string mask = cidr.substr(slash + 1);
    unsigned mask_len = 0;
    try {
      std::size_t used = 0;
      mask_len = static_cast<unsigned>(std::stoul(mask, &used));
      if (used != mask.size()) throw std::invalid_argument(mask);
    } catch (const std::exception&) {
      raise<ParseError>("bad mask length in '", cidr, "'");
    }
    std::array<std::uint8_t, 16> bytes{};
    if (addr.find(':') != std::string::npos) {
      if (inet_pton(AF_INET6, addr.c_str(), bytes.data()) != 1) {
        raise<ParseError>("bad IPv6 address '", addr, "'");
      }
      return Prefix(true, bytes, mask_len);
    }
    if (inet_pton(AF_INET, addr.c_str(), bytes.data()) != 1) {
      raise<ParseError>("bad IPv4 address '", addr, "'");
    }
    return Prefix(false, bytes, mask_len);
  }

  bool is_v6() const { return v6_; }
  unsigned mask_len() const { return mask_len_; }
  unsigned addr_bits() const { return v6_ ? 128 : 32; }
  const std::array<std::uint8_t, 16>& bytes() const { return bytes_; }

  /// Canonical CIDR string, e.g. "10.0.0.0/8".
  std::string str() const {
    char buf[INET6_ADDRSTRLEN] = {};
    if (!inet_ntop(v6_ ? AF_INET6 : AF_INET, bytes_.data(), buf, sizeof(buf))) {
      raise("prefix formatting failed");
    }
    return std::string(buf) + "/" + std::to_string(mask_len_);
  }

  auto operator<=>(const Prefix&) const = default;

  /// True when `len` leading bits of `other` equal this prefix's network bits.
  bool contains_network_of(const Prefix& other) const {
    if (v6_ != other.v6_ || other.mask_len_ < mask_len_) return false;
    return matches_under_mask(other.bytes_, mask_len_);
  }

 private:
  Prefix(bool v6, std::array<std::uint8_t, 16> bytes, unsigned mask_len)
      : v6_(v6), mask_len_(mask_len), bytes_(bytes) {
    if (mask_len_ > addr_bits()) {
      raise<ParseError>("mask length ", mask_len_, " exceeds address width");
    }
    zero_host_bits();
  }

  bool matches_under_mask(const std::array<std::uint8_t, 16>& other, unsigned len) const {
    unsigned full = len / 8, rem = len % 8;
    if (full && std::memcmp(bytes_.data(), other.data(), full) != 0) return false;
    if (rem == 0) return true;
    std::uint8_t m = static_cast<std::uint8_t>(0xff << (8 - rem));
    return (bytes_[full] & m) == (other[full] & m);
  }

  void zero_host_bits() {
    unsigned total = addr_bits() / 8;
    unsigned full = mask_len_ / 8, rem = mask_len_ % 8;
    if (rem != 0) {
      bytes_[full] &= static_cast<std::uint8_t>(0xff << (8 - rem));
      ++full;
    }
    for (unsigned i = full; i < total; ++i) bytes_[i] = 0;
    for (unsigned i = total; i < 16; ++i) bytes_[i] = 0;
  }

  bool v6_;
  unsigned mask_len_;
  std::array<std::uint8_t, 16> bytes_;
};

/// Containment relation between two canonical prefixes. Mixed address
/// families compare Disjoint.
inline PrefixRelation prefix_relation(const Prefix& a, const Prefix& b) {
  if (a.is_v6() != b.is_v6()) return PrefixRelation::Disjoint;
  if (a.mask_len() == b.mask_len() && a.bytes() == b.bytes()) return PrefixRelation::Equal;
  if (b.contains_network_of(a)) return PrefixRelation::AMoreSpecific;
  if (a.contains_network_of(b)) return PrefixRelation::ALessSpecific;
  return PrefixRelation::Disjoint;
}

inline bool is_sub_prefix_of(const Prefix& a, const Prefix& b) {
  return prefix_relation(a, b) == PrefixRelation::AMoreSpecific;
}

}  // namespace bear
