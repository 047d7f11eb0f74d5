#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bear/as_path.hpp"
#include "bear/asn.hpp"
#include "bear/core.hpp"
#include "bear/prefix.hpp"

namespace bear {

/// Identifies one routing-table entry: a peer of a collector holding a path
/// to a prefix.
struct RouteKey {
  Prefix prefix;
  std::string collector;
  Asn peer;

  auto operator<=>(const RouteKey&) const = default;
};

/// Per-prefix routing table: prefix -> collector -> peer -> AS path.
/// Holds at most one path per (prefix, collector, peer); a stored path's
/// first hop always equals its peer key.
class RouteSnapshot {
 public:
  using PeerMap = std::map<Asn, AsPath>;
  using CollectorMap = std::map<std::string, PeerMap>;
  using RouteMap = std::map<Prefix, CollectorMap>;

  RouteSnapshot() = default;
  explicit RouteSnapshot(std::int64_t timestamp) : timestamp_(timestamp) {}

  std::int64_t timestamp() const { return timestamp_; }
  void set_timestamp(std::int64_t ts) { timestamp_ = ts; }

  const RouteMap& routes() const { return routes_; }
  bool empty() const { return routes_.empty(); }

  const AsPath* find(const RouteKey& key) const {
    auto p = routes_.find(key.prefix);
    if (p == routes_.end()) return nullptr;
    auto c = p->second.find(key.collector);
    if (c == p->second.end()) return nullptr;
    auto a = c->second.find(key.peer);
    return a == c->second.end() ? nullptr : &a->second;
  }

  std::optional<AsPath> path_of(const RouteKey& key) const {
    const AsPath* p = find(key);
    return p ? std::optional<AsPath>(*p) : std::nullopt;
  }

  void set(const RouteKey& key, const AsPath& path) {
    if (path.peer() != key.peer) {
      raise<SpecError>("path ", path.display(), " does not start at peer AS", key.peer.str());
    }
    auto [it, _] = routes_[key.prefix][key.collector].insert_or_assign(key.peer, path);
    (void)it;
  }

  /// Removes the entry; returns false when it was absent. Empty collector and
  /// prefix levels are pruned so equal tables compare equal.
  bool erase(const RouteKey& key) {
    auto p = routes_.find(key.prefix);
    if (p == routes_.end()) return false;
    auto c = p->second.find(key.collector);
    if (c == p->second.end()) return false;
    if (c->second.erase(key.peer) == 0) return false;
    if (c->second.empty()) p->second.erase(c);
    if (p->second.empty()) routes_.erase(p);
    return true;
  }

  std::set<Prefix> prefixes() const {
    std::set<Prefix> out;
    for (const auto& [prefix, _] : routes_) out.insert(prefix);
    return out;
  }

  std::set<std::string> collectors() const {
    std::set<std::string> out;
    for (const auto& [_, cmap] : routes_)
      for (const auto& [collector, __] : cmap) out.insert(collector);
    return out;
  }

  std::vector<RouteKey> keys() const {
    std::vector<RouteKey> out;
    for (const auto& [prefix, cmap] : routes_)
      for (const auto& [collector, pmap] : cmap)
        for (const auto& [peer, _] : pmap) out.push_back({prefix, collector, peer});
    return out;
  }

  std::vector<RouteKey> keys_of(const Prefix& prefix) const {
    std::vector<RouteKey> out;
    auto p = routes_.find(prefix);
    if (p == routes_.end()) return out;
    for (const auto& [collector, pmap] : p->second)
      for (const auto& [peer, _] : pmap) out.push_back({prefix, collector, peer});
    return out;
  }

  std::size_t path_count() const {
    std::size_t n = 0;
    for (const auto& [_, cmap] : routes_)
      for (const auto& [__, pmap] : cmap) n += pmap.size();
    return n;
  }

  /// Copy restricted to the given collectors.
  RouteSnapshot restricted_to(const std::set<std::string>& collectors) const {
    RouteSnapshot out(timestamp_);
    for (const auto& [prefix, cmap] : routes_) {
      for (const auto& [collector, pmap] : cmap) {
        if (!collectors.contains(collector)) continue;
        for (const auto& [peer, path] : pmap) out.set({prefix, collector, peer}, path);
      }
    }
    return out;
  }

  bool operator==(const RouteSnapshot&) const = default;

 private:
  std::int64_t timestamp_ = 0;
  RouteMap routes_;
};

/// Snapshot document: {"timestamp": <int>, "routes": {"<cidr>":
/// {"<collector>": {"<peer-asn>": [<asn>, ...]}}}}. Key order is
/// deterministic (prefixes in canonical order, collectors lexicographic,
/// peers numeric), so equal snapshots serialize to identical bytes.
inline std::string serialize_snapshot(const RouteSnapshot& snapshot) {
  nlohmann::ordered_json j;
  j["timestamp"] = snapshot.timestamp();
  nlohmann::ordered_json routes = nlohmann::ordered_json::object();
  for (const auto& [prefix, cmap] : snapshot.routes()) {
    nlohmann::ordered_json collectors = nlohmann::ordered_json::object();
    for (const auto& [collector, pmap] : cmap) {
      nlohmann::ordered_json peers = nlohmann::ordered_json::object();
      for (const auto& [peer, path] : pmap) {
        std::vector<std::uint32_t> hops;
        hops.reserve(path.size());
        for (const Asn& hop : path.hops()) hops.push_back(hop.value());
        peers[peer.str()] = hops;
      }
      collectors[collector] = std::move(peers);
    }
    routes[prefix.str()] = std::move(collectors);
  }
  j["routes"] = std::move(routes);
  return j.dump(2) + "\n";
}

inline RouteSnapshot parse_snapshot(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise<ParseError>("bad snapshot document: ", e.what());
  }
  RouteSnapshot snapshot(j.at("timestamp").get<std::int64_t>());
  for (const auto& [cidr, cmap] : j.at("routes").items()) {
    Prefix prefix = Prefix::parse(cidr);
    for (const auto& [collector, pmap] : cmap.items()) {
      for (const auto& [peer_text, hops] : pmap.items()) {
        Asn peer = Asn::parse(peer_text);
        std::vector<Asn> path_hops;
        for (const auto& hop : hops) path_hops.emplace_back(hop.get<std::uint32_t>());
        snapshot.set({prefix, collector, peer}, AsPath(std::move(path_hops)));
      }
    }
  }
  return snapshot;
}

}  // namespace bear
