#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bear/as_path.hpp"
#include "bear/builder.hpp"
#include "bear/core.hpp"
#include "bear/prefix.hpp"
#include "bear/snapshot.hpp"

namespace bear {

enum class EventType { Hijack, SubPrefixHijack, RouteLeak, SubPrefixRouteLeak, NoAnomalyObserved };

inline const char* event_type_name(EventType t) {
  switch (t) {
    case EventType::Hijack: return "hijack";
    case EventType::SubPrefixHijack: return "sub-prefix hijack";
    case EventType::RouteLeak: return "route leak";
    case EventType::SubPrefixRouteLeak: return "sub-prefix route leak";
    case EventType::NoAnomalyObserved: return "no anomaly observed";
  }
  return "?";
}

inline std::optional<EventType> parse_event_type(const std::string& name) {
  for (EventType t : {EventType::Hijack, EventType::SubPrefixHijack, EventType::RouteLeak,
                      EventType::SubPrefixRouteLeak, EventType::NoAnomalyObserved}) {
    if (name == event_type_name(t)) return t;
  }
  return std::nullopt;
}

inline bool is_hijack_family(EventType t) {
  return t == EventType::Hijack || t == EventType::SubPrefixHijack;
}
inline bool is_leak_family(EventType t) {
  return t == EventType::RouteLeak || t == EventType::SubPrefixRouteLeak;
}
inline bool is_sub_prefix_type(EventType t) {
  return t == EventType::SubPrefixHijack || t == EventType::SubPrefixRouteLeak;
}

/// What one fact contributes to the classification:
///   HijackOrigin — the after-path origin is outside the prefix's historical
///                  origin set;
///   NovelTransit — origin preserved but the path gained an ASN never seen in
///                  the prefix's historical paths;
///   BenignChange — changed with no anomaly signal (withdrawal, reroute among
///                  known ASNs, duplicated sub-prefix path);
///   None         — unchanged.
enum class FactEvidence { None, BenignChange, HijackOrigin, NovelTransit };

inline const char* fact_evidence_name(FactEvidence e) {
  switch (e) {
    case FactEvidence::None: return "none";
    case FactEvidence::BenignChange: return "benign-change";
    case FactEvidence::HijackOrigin: return "hijack-origin";
    case FactEvidence::NovelTransit: return "novel-transit";
  }
  return "?";
}

/// Per-key answer material for the five change questions.
struct ChangeFact {
  Prefix prefix;
  std::string collector;
  Asn peer;
  PathDelta delta;
  bool is_sub_prefix = false;  // strictly more specific than the target
  std::optional<AsPath> before_path;
  std::optional<AsPath> after_path;
  FactEvidence evidence = FactEvidence::None;
  std::optional<Asn> offender_candidate;

  bool in_target_scope(const Prefix& target) const {
    return is_sub_prefix || prefix == target;
  }
};

struct AnalysisFacts {
  Prefix target;
  std::vector<ChangeFact> facts;
  std::map<Prefix, std::set<Asn>> historical_origins;
  std::size_t affected_peer_count = 0;
  std::size_t total_peer_count = 0;

  explicit AnalysisFacts(Prefix target_prefix) : target(std::move(target_prefix)) {}
};

/// Compact, prompt-embeddable summary of the evidence-bearing facts. Mock
/// providers answer from this block alone.
struct DigestEntry {
  Prefix prefix;
  bool is_sub = false;
  std::string collector;
  Asn peer;
  FactEvidence kind = FactEvidence::None;
  std::optional<Asn> before_origin;
  Asn after_origin;
  Asn candidate;  // hijack: the new origin; leak: the inferred leaker

  DigestEntry(Prefix p, Asn peer_asn, Asn after_o, Asn cand)
      : prefix(std::move(p)), peer(peer_asn), after_origin(after_o), candidate(cand) {}
};

struct FactsDigest {
  Prefix target;
  bool target_prefix_changed = false;
  std::size_t affected_peer_count = 0;
  std::size_t total_peer_count = 0;
  std::size_t withdrawn_count = 0;
  std::size_t benign_change_count = 0;
  std::map<Prefix, std::set<Asn>> historical_origins;
  std::vector<DigestEntry> affected;
  std::vector<Prefix> sub_prefixes;  // sub-prefixes carrying evidence

  explicit FactsDigest(Prefix target_prefix) : target(std::move(target_prefix)) {}
};

namespace detail {

/// Historical reference material per prefix (history + before tables).
struct HistoricalIndex {
  std::map<Prefix, std::set<Asn>> origins;
  std::map<Prefix, std::set<Asn>> hops;
  std::map<Prefix, std::vector<AsPath>> paths;

  void add(const RouteSnapshot& snapshot) {
    for (const auto& [prefix, cmap] : snapshot.routes()) {
      for (const auto& [collector, pmap] : cmap) {
        (void)collector;
        for (const auto& [peer, path] : pmap) {
          (void)peer;
          origins[prefix].insert(origin_of(path));
          for (const Asn& hop : path.hops()) hops[prefix].insert(hop);
          paths[prefix].push_back(path);
        }
      }
    }
  }

  /// The prefix whose history stands in for `p`: itself when it has history,
  /// otherwise its closest less-specific ancestor that does.
  std::optional<Prefix> reference_prefix(const Prefix& p) const {
    auto it = origins.find(p);
    if (it != origins.end() && !it->second.empty()) return p;
    std::optional<Prefix> best;
    for (const auto& [candidate, origin_set] : origins) {
      if (origin_set.empty()) continue;
      if (prefix_relation(p, candidate) != PrefixRelation::AMoreSpecific) continue;
      if (!best || candidate.mask_len() > best->mask_len()) best = candidate;
    }
    return best;
  }

  const std::set<Asn>* origins_for(const std::optional<Prefix>& ref) const {
    if (!ref) return nullptr;
    auto it = origins.find(*ref);
    return it == origins.end() ? nullptr : &it->second;
  }

  const std::set<Asn>* hops_for(const std::optional<Prefix>& ref) const {
    if (!ref) return nullptr;
    auto it = hops.find(*ref);
    return it == hops.end() ? nullptr : &it->second;
  }

  const std::vector<AsPath>* paths_for(const std::optional<Prefix>& ref) const {
    if (!ref) return nullptr;
    auto it = paths.find(*ref);
    return it == paths.end() ? nullptr : &it->second;
  }
};

inline bool is_historical_suffix(const std::vector<Asn>& hops, std::size_t from,
                                 const std::vector<AsPath>& historical) {
  const std::size_t len = hops.size() - from;
  if (len == 0) return false;
  for (const AsPath& h : historical) {
    const auto& hh = h.hops();
    if (hh.size() < len) continue;
    if (std::equal(hops.begin() + static_cast<std::ptrdiff_t>(from), hops.end(),
                   hh.end() - static_cast<std::ptrdiff_t>(len))) {
      return true;
    }
  }
  return false;
}

/// Leaker inference for one changed path: among the novel ASNs, the one
/// closest to the origin end whose origin-side suffix already existed
/// historically; when none qualifies, the novel ASN closest to the origin.
inline Asn leak_candidate(const AsPath& after, const std::set<Asn>& novel,
                          const std::vector<AsPath>* historical) {
  const auto& hops = after.hops();
  std::optional<std::size_t> best_verified;
  std::optional<std::size_t> best_any;
  for (std::size_t i = 0; i < hops.size(); ++i) {
    if (!novel.contains(hops[i])) continue;
    best_any = i;
    if (historical && i + 1 < hops.size() && is_historical_suffix(hops, i + 1, *historical)) {
      best_verified = i;
    }
  }
  return hops[best_verified ? *best_verified : *best_any];
}

}  // namespace detail

/// One fact per (prefix, collector, peer) key present in the before or after
/// table, with evidence computed against the historical reference
/// (history + before).
inline AnalysisFacts analyze_changes(const SnapshotTriple& triple) {
  if (triple.before.empty() && triple.after.empty()) {
    raise("analyze_changes: before and after tables are both empty");
  }
  detail::HistoricalIndex index;
  index.add(triple.history);
  index.add(triple.before);

  AnalysisFacts out(triple.spec.prefix);
  out.historical_origins = index.origins;

  std::set<Prefix> all_prefixes = triple.before.prefixes();
  for (const Prefix& p : triple.after.prefixes()) all_prefixes.insert(p);

  std::set<std::pair<std::string, Asn>> scope_pairs;
  std::set<std::pair<std::string, Asn>> affected_pairs;

  for (const Prefix& prefix : all_prefixes) {
    const bool is_sub = is_sub_prefix_of(prefix, triple.spec.prefix);
    const bool in_scope = is_sub || prefix == triple.spec.prefix;
    auto ref = index.reference_prefix(prefix);
    const std::set<Asn>* ref_origins = index.origins_for(ref);
    const std::set<Asn>* ref_hops = index.hops_for(ref);
    const std::vector<AsPath>* ref_paths = index.paths_for(ref);

    std::set<RouteKey> keys;
    for (const RouteKey& k : triple.before.keys_of(prefix)) keys.insert(k);
    for (const RouteKey& k : triple.after.keys_of(prefix)) keys.insert(k);

    for (const RouteKey& key : keys) {
      ChangeFact fact{prefix,
                      key.collector,
                      key.peer,
                      PathDelta{},
                      is_sub,
                      triple.before.path_of(key),
                      triple.after.path_of(key)};
      fact.delta = path_delta(fact.before_path, fact.after_path);

      if (!fact.delta.changed) {
        fact.evidence = FactEvidence::None;
      } else if (!fact.after_path || !ref_origins) {
        fact.evidence = FactEvidence::BenignChange;
      } else {
        Asn after_origin = origin_of(*fact.after_path);
        if (!ref_origins->contains(after_origin)) {
          fact.evidence = FactEvidence::HijackOrigin;
          fact.offender_candidate = after_origin;
        } else {
          std::set<Asn> novel;
          for (const Asn& asn : fact.delta.introduced_asns) {
            if (!ref_hops || !ref_hops->contains(asn)) novel.insert(asn);
          }
          if (!novel.empty()) {
            fact.evidence = FactEvidence::NovelTransit;
            fact.offender_candidate = detail::leak_candidate(*fact.after_path, novel, ref_paths);
          } else {
            fact.evidence = FactEvidence::BenignChange;
          }
        }
      }

      if (in_scope) {
        scope_pairs.insert({key.collector, key.peer});
        if (fact.evidence == FactEvidence::HijackOrigin ||
            fact.evidence == FactEvidence::NovelTransit) {
          affected_pairs.insert({key.collector, key.peer});
        }
      }
      out.facts.push_back(std::move(fact));
    }
  }

  out.total_peer_count = scope_pairs.size();
  out.affected_peer_count = affected_pairs.size();
  return out;
}

inline FactsDigest digest_of(const AnalysisFacts& facts) {
  FactsDigest d(facts.target);
  d.affected_peer_count = facts.affected_peer_count;
  d.total_peer_count = facts.total_peer_count;
  std::set<Prefix> subs;
  for (const ChangeFact& fact : facts.facts) {
    if (fact.prefix == facts.target && fact.delta.changed) d.target_prefix_changed = true;
    if (fact.delta.withdrawn) ++d.withdrawn_count;
    if (fact.evidence == FactEvidence::BenignChange) ++d.benign_change_count;
    if (!fact.in_target_scope(facts.target)) continue;
    if (fact.evidence != FactEvidence::HijackOrigin && fact.evidence != FactEvidence::NovelTransit)
      continue;
    DigestEntry entry(fact.prefix, fact.peer, origin_of(*fact.after_path),
                      *fact.offender_candidate);
    entry.is_sub = fact.is_sub_prefix;
    entry.collector = fact.collector;
    entry.kind = fact.evidence;
    if (fact.before_path) entry.before_origin = origin_of(*fact.before_path);
    d.affected.push_back(std::move(entry));
    if (fact.is_sub_prefix) subs.insert(fact.prefix);
  }
  // keep the reference material small: the target and evidence sub-prefixes
  for (const auto& [prefix, origins] : facts.historical_origins) {
    if (prefix == facts.target || subs.contains(prefix)) d.historical_origins[prefix] = origins;
  }
  d.sub_prefixes.assign(subs.begin(), subs.end());
  return d;
}

/// The classification rule. Hijack evidence wins over leak evidence; the
/// sub-prefix variants require all evidence on sub-prefixes while the target
/// prefix itself is quiet.
inline EventType classify_digest(const FactsDigest& d) {
  bool any_hijack = false, all_hijack_sub = true;
  bool any_leak = false, all_leak_sub = true;
  for (const DigestEntry& e : d.affected) {
    if (e.kind == FactEvidence::HijackOrigin) {
      any_hijack = true;
      all_hijack_sub = all_hijack_sub && e.is_sub;
    } else if (e.kind == FactEvidence::NovelTransit) {
      any_leak = true;
      all_leak_sub = all_leak_sub && e.is_sub;
    }
  }
  if (any_hijack) {
    return (all_hijack_sub && !d.target_prefix_changed) ? EventType::SubPrefixHijack
                                                        : EventType::Hijack;
  }
  if (any_leak) {
    return (all_leak_sub && !d.target_prefix_changed) ? EventType::SubPrefixRouteLeak
                                                      : EventType::RouteLeak;
  }
  return EventType::NoAnomalyObserved;
}

inline EventType classify(const AnalysisFacts& facts) {
  if (facts.facts.empty()) raise("classify: no facts");
  return classify_digest(digest_of(facts));
}

/// Plurality offender over the evidence facts matching the event family;
/// remaining ties break toward the lowest ASN.
inline Asn identify_offender_digest(const FactsDigest& d, EventType type) {
  if (type == EventType::NoAnomalyObserved) {
    raise<SpecError>("identify_offender: no offender for a no-anomaly event");
  }
  const FactEvidence want =
      is_hijack_family(type) ? FactEvidence::HijackOrigin : FactEvidence::NovelTransit;
  std::map<Asn, std::size_t> votes;
  for (const DigestEntry& e : d.affected) {
    if (e.kind == want) ++votes[e.candidate];
  }
  if (votes.empty()) {
    raise("identify_offender: classification '", event_type_name(type),
          "' has no supporting facts");
  }
  Asn best = votes.begin()->first;
  std::size_t best_count = votes.begin()->second;
  for (const auto& [asn, count] : votes) {
    if (count > best_count) {
      best = asn;
      best_count = count;
    }
  }
  return best;
}

inline Asn identify_offender(const AnalysisFacts& facts, EventType type) {
  return identify_offender_digest(digest_of(facts), type);
}

/// Fraction of (collector, peer) pairs whose facts carry anomaly evidence.
inline double detection_rate(const AnalysisFacts& facts) {
  if (facts.total_peer_count == 0) raise<SpecError>("detection_rate: no peers observed");
  return static_cast<double>(facts.affected_peer_count) /
         static_cast<double>(facts.total_peer_count);
}

/// Deterministic human-readable answers to the five change questions,
/// grouped by prefix then collector, lexicographic within each group.
inline std::string render_facts_text(const AnalysisFacts& facts) {
  std::string out;
  out += "AS path changes toward " + facts.target.str() + ":\n";
  bool any_change = false;
  std::map<Prefix, std::vector<const ChangeFact*>> by_prefix;
  for (const ChangeFact& fact : facts.facts) by_prefix[fact.prefix].push_back(&fact);

  for (const auto& [prefix, fact_list] : by_prefix) {
    std::size_t unchanged = 0;
    std::string section;
    for (const ChangeFact* fact : fact_list) {
      if (!fact->delta.changed) {
        ++unchanged;
        continue;
      }
      any_change = true;
      section += "  collector " + fact->collector + ", peer " + fact->peer.display() + ": ";
      if (fact->delta.withdrawn) {
        section += "path " + fact->before_path->display() + " withdrawn.\n";
        continue;
      }
      if (fact->delta.appeared) {
        section += "new path " + fact->after_path->display() + " announced (origin " +
                   origin_of(*fact->after_path).display() + ")";
      } else {
        section += "path changed from " + fact->before_path->display() + " to " +
                   fact->after_path->display();
        if (fact->delta.origin_changed) {
          section += "; origin changed from " + origin_of(*fact->before_path).display() + " to " +
                     origin_of(*fact->after_path).display();
        } else {
          section += "; origin " + origin_of(*fact->after_path).display() + " unchanged";
        }
      }
      if (fact->evidence == FactEvidence::HijackOrigin) {
        section += "; origin " + origin_of(*fact->after_path).display() +
                   " is outside the historical origin set";
      } else if (fact->evidence == FactEvidence::NovelTransit) {
        section += "; transit " + fact->offender_candidate->display() +
                   " not seen in any historical path for this prefix";
      }
      section += ".\n";
    }
    bool is_sub = is_sub_prefix_of(prefix, facts.target);
    bool appeared_fresh =
        is_sub && std::all_of(fact_list.begin(), fact_list.end(),
                              [](const ChangeFact* f) { return f->delta.appeared; });
    out += "Prefix " + prefix.str();
    if (appeared_fresh) {
      out += " (new sub-prefix, absent before the event)";
    } else if (is_sub) {
      out += " (sub-prefix of the target)";
    }
    out += ":\n";
    out += section;
    if (unchanged > 0) {
      out += "  " + std::to_string(unchanged) + " peer path(s) unchanged.\n";
    }
  }
  if (!any_change) {
    out += "No AS path changes observed.\n";
  }
  out += "Summary: " + std::to_string(facts.affected_peer_count) + " of " +
         std::to_string(facts.total_peer_count) +
         " peers show a change attributable to the event.\n";
  return out;
}

// ---------------------------------------------------------------------------
// JSON forms

inline nlohmann::ordered_json digest_to_json(const FactsDigest& d) {
  nlohmann::ordered_json j;
  j["target_prefix"] = d.target.str();
  j["target_prefix_changed"] = d.target_prefix_changed;
  j["affected_peer_count"] = d.affected_peer_count;
  j["total_peer_count"] = d.total_peer_count;
  j["withdrawn_count"] = d.withdrawn_count;
  j["benign_change_count"] = d.benign_change_count;
  nlohmann::ordered_json origins = nlohmann::ordered_json::object();
  for (const auto& [prefix, asns] : d.historical_origins) {
    std::vector<std::uint32_t> values;
    for (const Asn& a : asns) values.push_back(a.value());
    origins[prefix.str()] = values;
  }
  j["historical_origins"] = std::move(origins);
  nlohmann::ordered_json affected = nlohmann::ordered_json::array();
  for (const DigestEntry& e : d.affected) {
    nlohmann::ordered_json entry;
    entry["prefix"] = e.prefix.str();
    entry["is_sub"] = e.is_sub;
    entry["collector"] = e.collector;
    entry["peer"] = e.peer.value();
    entry["kind"] = fact_evidence_name(e.kind);
    if (e.before_origin) {
      entry["before_origin"] = e.before_origin->value();
    } else {
      entry["before_origin"] = nullptr;
    }
    entry["after_origin"] = e.after_origin.value();
    entry["candidate"] = e.candidate.value();
    affected.push_back(std::move(entry));
  }
  j["affected"] = std::move(affected);
  std::vector<std::string> subs;
  for (const Prefix& p : d.sub_prefixes) subs.push_back(p.str());
  j["sub_prefixes"] = subs;
  return j;
}

inline FactsDigest digest_from_json(const nlohmann::json& j) {
  FactsDigest d(Prefix::parse(j.at("target_prefix").get<std::string>()));
  d.target_prefix_changed = j.at("target_prefix_changed").get<bool>();
  d.affected_peer_count = j.at("affected_peer_count").get<std::size_t>();
  d.total_peer_count = j.at("total_peer_count").get<std::size_t>();
  d.withdrawn_count = j.value("withdrawn_count", 0ull);
  d.benign_change_count = j.value("benign_change_count", 0ull);
  for (const auto& [cidr, asns] : j.at("historical_origins").items()) {
    std::set<Asn>& set = d.historical_origins[Prefix::parse(cidr)];
    for (const auto& a : asns) set.insert(Asn(a.get<std::uint32_t>()));
  }
  for (const auto& entry : j.at("affected")) {
    DigestEntry e(Prefix::parse(entry.at("prefix").get<std::string>()),
                  Asn(entry.at("peer").get<std::uint32_t>()),
                  Asn(entry.at("after_origin").get<std::uint32_t>()),
                  Asn(entry.at("candidate").get<std::uint32_t>()));
    e.is_sub = entry.at("is_sub").get<bool>();
    e.collector = entry.at("collector").get<std::string>();
    std::string kind = entry.at("kind").get<std::string>();
    if (kind == fact_evidence_name(FactEvidence::HijackOrigin)) {
      e.kind = FactEvidence::HijackOrigin;
    } else if (kind == fact_evidence_name(FactEvidence::NovelTransit)) {
      e.kind = FactEvidence::NovelTransit;
    } else {
      raise<ParseError>("bad digest entry kind '", kind, "'");
    }
    if (!entry.at("before_origin").is_null()) {
      e.before_origin = Asn(entry.at("before_origin").get<std::uint32_t>());
    }
    d.affected.push_back(std::move(e));
  }
  for (const auto& cidr : j.at("sub_prefixes")) {
    d.sub_prefixes.push_back(Prefix::parse(cidr.get<std::string>()));
  }
  return d;
}

inline nlohmann::ordered_json path_to_json(const std::optional<AsPath>& path) {
  if (!path) return nullptr;
  std::vector<std::uint32_t> hops;
  for (const Asn& hop : path->hops()) hops.push_back(hop.value());
  return hops;
}

inline nlohmann::ordered_json facts_to_json(const AnalysisFacts& facts) {
  nlohmann::ordered_json j;
  j["target_prefix"] = facts.target.str();
  j["affected_peer_count"] = facts.affected_peer_count;
  j["total_peer_count"] = facts.total_peer_count;
  nlohmann::ordered_json origins = nlohmann::ordered_json::object();
  for (const auto& [prefix, asns] : facts.historical_origins) {
    std::vector<std::uint32_t> values;
    for (const Asn& a : asns) values.push_back(a.value());
    origins[prefix.str()] = values;
  }
  j["historical_origins"] = std::move(origins);
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const ChangeFact& fact : facts.facts) {
    nlohmann::ordered_json f;
    f["prefix"] = fact.prefix.str();
    f["collector"] = fact.collector;
    f["peer"] = fact.peer.value();
    f["is_sub_prefix"] = fact.is_sub_prefix;
    f["before_path"] = path_to_json(fact.before_path);
    f["after_path"] = path_to_json(fact.after_path);
    f["changed"] = fact.delta.changed;
    f["origin_changed"] = fact.delta.origin_changed;
    f["withdrawn"] = fact.delta.withdrawn;
    f["appeared"] = fact.delta.appeared;
    std::vector<std::uint32_t> introduced;
    for (const Asn& a : fact.delta.introduced_asns) introduced.push_back(a.value());
    f["introduced_asns"] = introduced;
    f["evidence"] = fact_evidence_name(fact.evidence);
    if (fact.offender_candidate) {
      f["offender_candidate"] = fact.offender_candidate->value();
    } else {
      f["offender_candidate"] = nullptr;
    }
    list.push_back(std::move(f));
  }
  j["facts"] = std::move(list);
  return j;
}

}  // namespace bear
