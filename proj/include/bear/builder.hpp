#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "bear/core.hpp"
#include "bear/elem.hpp"
#include "bear/event.hpp"
#include "bear/prefix.hpp"
#include "bear/snapshot.hpp"

namespace bear {

inline constexpr std::int64_t kRibIntervalSeconds = 8 * 3600;      // 28800
inline constexpr std::int64_t kUpdateWindowSeconds = 5 * 60;       // 300

/// Raised when the RIB dump backing the historical snapshot is absent.
struct MissingDumpError : Error {
  using Error::Error;
};

/// Counters for replay events that are tolerated rather than fatal.
struct ReplayStats {
  std::uint64_t withdraw_missing = 0;     // withdrawal for an absent entry
  std::uint64_t duplicate_announce = 0;   // announcement identical to the stored path
};

/// Timestamp of the RIB dump backing the historical snapshot: the 8-hour
/// grid point at least eight hours before t.
inline std::int64_t history_timestamp(std::int64_t t) {
  if (t < kRibIntervalSeconds) {
    raise<SpecError>("history timestamp undefined for t=", t, " (< ", kRibIntervalSeconds, ")");
  }
  return (t - kRibIntervalSeconds) / kRibIntervalSeconds * kRibIntervalSeconds;
}

/// Applies one update in place. Announcements replace the stored path for
/// the key; withdrawals remove it (a missing entry is a counted no-op).
inline void apply_elem_inplace(RouteSnapshot& snapshot, const BgpElem& elem, ReplayStats& stats) {
  if (elem.record_type == RecordType::Rib) {
    raise<SpecError>("apply_elem expects an announcement or withdrawal, got a RIB record");
  }
  RouteKey key{elem.prefix, elem.collector, elem.peer};
  if (elem.record_type == RecordType::Withdraw) {
    if (!snapshot.erase(key)) ++stats.withdraw_missing;
    return;
  }
  const AsPath* existing = snapshot.find(key);
  if (existing && *existing == *elem.path) ++stats.duplicate_announce;
  snapshot.set(key, *elem.path);
}

inline RouteSnapshot apply_elem(RouteSnapshot snapshot, const BgpElem& elem,
                                ReplayStats* stats = nullptr) {
  ReplayStats local;
  apply_elem_inplace(snapshot, elem, stats ? *stats : local);
  return snapshot;
}

/// Historical table from the RIB dump at `ts`: the last-seen RIB path per
/// (prefix, collector, peer), restricted to `prefixes`.
inline RouteSnapshot build_history(const ElemSource& source, const std::set<Prefix>& prefixes,
                                   std::int64_t ts) {
  RouteSnapshot snapshot(ts);
  bool any = false;
  for (const BgpElem& elem : source.rib_at(ts)) {
    if (!prefixes.contains(elem.prefix)) continue;
    any = true;
    snapshot.set({elem.prefix, elem.collector, elem.peer}, *elem.path);
  }
  if (!any) {
    raise<MissingDumpError>("no RIB records at ", ts, " for the requested prefixes");
  }
  return snapshot;
}

/// The state just before the event: history with every update in
/// [history.timestamp, t - 5m) applied in timestamp order. Elems outside the
/// window are a caller error.
inline RouteSnapshot build_before(const RouteSnapshot& history, const ElemSource& source,
                                  std::int64_t t, ReplayStats* stats = nullptr) {
  const std::int64_t lo = history.timestamp();
  const std::int64_t hi = t - kUpdateWindowSeconds;  // exclusive
  RouteSnapshot before = history;
  before.set_timestamp(hi);
  ReplayStats local;
  ReplayStats& s = stats ? *stats : local;
  for (const BgpElem& elem : source.elems()) {
    if (elem.record_type == RecordType::Rib) continue;
    if (elem.timestamp < lo || elem.timestamp >= hi) {
      raise<SpecError>("update at ", elem.timestamp, " outside before-window [", lo, ", ", hi,
                       ")");
    }
    apply_elem_inplace(before, elem, s);
  }
  return before;
}

/// Exclusive upper bound of the after-window: five minutes past t, truncated
/// to one second before the event end when that comes first.
inline std::int64_t after_window_end(std::int64_t t, std::optional<std::int64_t> end) {
  if (end && *end <= t) raise<SpecError>("event end ", *end, " not after start ", t);
  std::int64_t hi = t + kUpdateWindowSeconds;
  if (end && *end < hi) hi = *end;
  return hi;
}

/// The state just after the event starts: before with every update in
/// [t - 5m, after_window_end) applied in order.
inline RouteSnapshot build_after(const RouteSnapshot& before, const ElemSource& source,
                                 std::int64_t t, std::optional<std::int64_t> end,
                                 ReplayStats* stats = nullptr) {
  const std::int64_t lo = t - kUpdateWindowSeconds;
  const std::int64_t hi = after_window_end(t, end);
  RouteSnapshot after = before;
  after.set_timestamp(hi);
  ReplayStats local;
  ReplayStats& s = stats ? *stats : local;
  for (const BgpElem& elem : source.elems()) {
    if (elem.record_type == RecordType::Rib) continue;
    if (elem.timestamp < lo || elem.timestamp >= hi) {
      raise<SpecError>("update at ", elem.timestamp, " outside after-window [", lo, ", ", hi, ")");
    }
    apply_elem_inplace(after, elem, s);
  }
  return after;
}

/// The target prefix plus every observed prefix more or less specific
/// than it.
inline std::set<Prefix> collect_related_prefixes(const std::set<Prefix>& index,
                                                 const Prefix& target) {
  std::set<Prefix> out{target};
  for (const Prefix& candidate : index) {
    auto rel = prefix_relation(candidate, target);
    if (rel == PrefixRelation::AMoreSpecific || rel == PrefixRelation::ALessSpecific) {
      out.insert(candidate);
    }
  }
  return out;
}

/// The three snapshots the analysis consumes.
struct SnapshotTriple {
  RouteSnapshot history;
  RouteSnapshot before;
  RouteSnapshot after;
  EventSpec spec;

  bool operator==(const SnapshotTriple&) const = default;
};

/// Full retrieval: related-prefix collection, RIB replay, then the two
/// update windows. `source` must cover the RIB dump and both windows.
inline SnapshotTriple build_triple(const EventSpec& spec, const ElemSource& source,
                                   IngestStats& ingest, ReplayStats* stats = nullptr) {
  spec.validate();
  std::set<Prefix> related = collect_related_prefixes(source.prefix_index(), spec.prefix);
  ElemSource scoped = source.filtered(related, ingest);
  const std::int64_t hist_ts = history_timestamp(spec.start);
  RouteSnapshot history = build_history(scoped, related, hist_ts);
  ElemSource before_updates(scoped.updates_in(hist_ts, spec.start - kUpdateWindowSeconds));
  RouteSnapshot before = build_before(history, before_updates, spec.start, stats);
  ElemSource after_updates(scoped.updates_in(spec.start - kUpdateWindowSeconds,
                                             after_window_end(spec.start, spec.end)));
  RouteSnapshot after = build_after(before, after_updates, spec.start, spec.end, stats);
  return SnapshotTriple{std::move(history), std::move(before), std::move(after), spec};
}

}  // namespace bear
