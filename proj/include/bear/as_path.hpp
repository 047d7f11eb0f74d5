#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bear/asn.hpp"
#include "bear/core.hpp"

namespace bear {

/// Ordered AS-number sequence: the announcing peer first, the origin
/// (destination) AS last. Consecutive repeats are legal (prepending).
class AsPath {
 public:
  explicit AsPath(std::vector<Asn> hops) : hops_(std::move(hops)) {
    if (hops_.empty()) throw SpecError("AS path must be non-empty");
  }

  static AsPath of(std::initializer_list<std::uint32_t> values) {
    std::vector<Asn> hops;
    hops.reserve(values.size());
    for (auto v : values) hops.emplace_back(v);
    return AsPath(std::move(hops));
  }

  const std::vector<Asn>& hops() const { return hops_; }
  std::size_t size() const { return hops_.size(); }
  Asn peer() const { return hops_.front(); }

  auto operator<=>(const AsPath&) const = default;

  /// Space-separated hop list, e.g. "3356 2914 15169".
  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < hops_.size(); ++i) {
      if (i) out += ' ';
      out += hops_[i].str();
    }
    return out;
  }

  std::string display() const { return "[" + str() + "]"; }

 private:
  std::vector<Asn> hops_;
};

/// Last hop of the path: the AS originating the prefix.
inline Asn origin_of(const AsPath& path) { return path.hops().back(); }

/// Difference between a key's path in the before table and the after table.
struct PathDelta {
  bool changed = false;
  bool origin_changed = false;  // only meaningful when both paths present
  std::set<Asn> introduced_asns;
  bool withdrawn = false;  // present before, absent after
  bool appeared = false;   // absent before, present after
};

/// Compares the before/after path of one (prefix, collector, peer) key.
/// At least one side must be present.
inline PathDelta path_delta(const std::optional<AsPath>& old_path,
                            const std::optional<AsPath>& new_path) {
  if (!old_path && !new_path) throw SpecError("path_delta: both paths absent");
  PathDelta d;
  if (old_path && !new_path) {
    d.changed = true;
    d.withdrawn = true;
    return d;
  }
  if (!old_path && new_path) {
    d.changed = true;
    d.appeared = true;
    d.introduced_asns.insert(new_path->hops().begin(), new_path->hops().end());
    return d;
  }
  d.changed = old_path->hops() != new_path->hops();
  d.origin_changed = origin_of(*old_path) != origin_of(*new_path);
  std::set<Asn> old_set(old_path->hops().begin(), old_path->hops().end());
  for (const Asn& hop : new_path->hops()) {
    if (!old_set.contains(hop)) d.introduced_asns.insert(hop);
  }
  return d;
}

}  // namespace bear
