// Shared hand-built event fixtures: one snapshot triple per anomaly type,
// small enough to verify by eye.
#pragma once

#include <cstdint>
#include <vector>

#include "bear/builder.hpp"
#include "bear/diff.hpp"
#include "bear/snapshot.hpp"

namespace bear::testfx {

inline constexpr std::int64_t kEventStart = 57600 + 7200;  // history slot at 28800

struct Fixture {
  SnapshotTriple triple;
  EventType truth;
  Asn offender;

  Fixture(SnapshotTriple t, EventType type, Asn off)
      : triple(std::move(t)), truth(type), offender(off) {}
};

inline Prefix fx_target() { return Prefix::parse("198.51.100.0/24"); }
inline Prefix fx_sub() { return Prefix::parse("198.51.100.0/25"); }

/// Baseline table: three (collector, peer) pairs, all routing to AS15169.
inline RouteSnapshot fx_base(std::int64_t ts) {
  RouteSnapshot s(ts);
  s.set({fx_target(), "rrc00", Asn(3356)}, AsPath::of({3356, 2914, 15169}));
  s.set({fx_target(), "rrc00", Asn(174)}, AsPath::of({174, 2914, 15169}));
  s.set({fx_target(), "rrc01", Asn(6453)}, AsPath::of({6453, 2914, 15169}));
  return s;
}

inline SnapshotTriple fx_triple(RouteSnapshot after) {
  EventSpec spec{fx_target(), kEventStart, std::nullopt, std::string("fixture")};
  after.set_timestamp(kEventStart + 300);
  return SnapshotTriple{fx_base(history_timestamp(kEventStart)), fx_base(kEventStart - 300),
                        std::move(after), spec};
}

/// Two of three peers see the origin replaced by AS64666.
inline Fixture fx_hijack() {
  RouteSnapshot after = fx_base(0);
  after.set({fx_target(), "rrc00", Asn(3356)}, AsPath::of({3356, 64666}));
  after.set({fx_target(), "rrc01", Asn(6453)}, AsPath::of({6453, 8220, 64666}));
  return Fixture(fx_triple(std::move(after)), EventType::Hijack, Asn(64666));
}

/// The target stays quiet; a fresh more-specific appears with a foreign origin.
inline Fixture fx_sub_prefix_hijack() {
  RouteSnapshot after = fx_base(0);
  after.set({fx_sub(), "rrc00", Asn(3356)}, AsPath::of({3356, 64666}));
  return Fixture(fx_triple(std::move(after)), EventType::SubPrefixHijack, Asn(64666));
}

/// One peer's path gains AS64777 in transit; the origin is preserved.
inline Fixture fx_route_leak() {
  RouteSnapshot after = fx_base(0);
  after.set({fx_target(), "rrc00", Asn(3356)}, AsPath::of({3356, 64777, 2914, 15169}));
  return Fixture(fx_triple(std::move(after)), EventType::RouteLeak, Asn(64777));
}

/// Target paths duplicated onto a fresh sub-prefix, one duplicate spliced
/// through AS64777.
inline Fixture fx_sub_prefix_route_leak() {
  RouteSnapshot after = fx_base(0);
  after.set({fx_sub(), "rrc00", Asn(3356)}, AsPath::of({3356, 64777, 2914, 15169}));
  after.set({fx_sub(), "rrc00", Asn(174)}, AsPath::of({174, 2914, 15169}));
  after.set({fx_sub(), "rrc01", Asn(6453)}, AsPath::of({6453, 2914, 15169}));
  return Fixture(fx_triple(std::move(after)), EventType::SubPrefixRouteLeak, Asn(64777));
}

inline std::vector<Fixture> all_anomaly_fixtures() {
  return {fx_hijack(), fx_sub_prefix_hijack(), fx_route_leak(), fx_sub_prefix_route_leak()};
}

inline SnapshotTriple fx_quiet() { return fx_triple(fx_base(0)); }

inline SnapshotTriple fx_withdrawal_only() {
  RouteSnapshot after = fx_base(0);
  after.erase({fx_target(), "rrc00", Asn(3356)});
  return fx_triple(std::move(after));
}

}  // namespace bear::testfx
