#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bear/as_path.hpp"
#include "bear/asn.hpp"
#include "bear/core.hpp"
#include "bear/prefix.hpp"

namespace bear {

enum class RecordType { Announce, Withdraw, Rib };

inline char record_type_letter(RecordType t) {
  switch (t) {
    case RecordType::Announce: return 'A';
    case RecordType::Withdraw: return 'W';
    case RecordType::Rib: return 'R';
  }
  return '?';
}

/// One announcement, withdrawal, or RIB record from a collector feed.
/// path is present iff the record is not a withdrawal.
struct BgpElem {
  RecordType record_type;
  std::int64_t timestamp = 0;
  std::string collector;
  Asn peer;
  Prefix prefix;
  std::optional<AsPath> path;

  bool operator==(const BgpElem&) const = default;
};

/// Counters for records the ingest path drops or flags instead of erroring.
struct IngestStats {
  std::uint64_t as_set_rejected = 0;    // path contains AS_SET / confed segments
  std::uint64_t peer_mismatch = 0;      // path does not start at the peer ASN
  std::uint64_t filtered_out = 0;       // prefix outside the target set

  std::uint64_t total() const { return as_set_rejected + peer_mismatch + filtered_out; }
};

/// One record per line: `<A|W|R>|<timestamp>|<collector>|<peer-asn>|<prefix>|<path>`
/// with the path space-separated and empty for withdrawals.
inline std::string serialize_elem(const BgpElem& elem) {
  std::string line;
  line += record_type_letter(elem.record_type);
  line += '|';
  line += std::to_string(elem.timestamp);
  line += '|';
  line += elem.collector;
  line += '|';
  line += elem.peer.str();
  line += '|';
  line += elem.prefix.str();
  line += '|';
  if (elem.path) line += elem.path->str();
  return line;
}

namespace detail {

inline bool path_has_set_segment(std::string_view field) {
  return field.find_first_of("{}()[],") != std::string_view::npos;
}

}  // namespace detail

/// Parses one elem line. Returns nullopt (and counts) for records the model
/// rejects: AS_SET/confederation segments and paths not starting at the peer.
/// Structurally malformed lines throw.
inline std::optional<BgpElem> parse_elem_line(const std::string& line, IngestStats& stats,
                                              std::string_view where = "") {
  auto fields = split(line, '|');
  if (fields.size() != 6) {
    raise<ParseError>("elem line ", where, " has ", fields.size(), " fields, expected 6: '", line,
                      "'");
  }
  RecordType type;
  if (fields[0] == "A") {
    type = RecordType::Announce;
  } else if (fields[0] == "W") {
    type = RecordType::Withdraw;
  } else if (fields[0] == "R") {
    type = RecordType::Rib;
  } else {
    raise<ParseError>("elem line ", where, " has unknown record type '", fields[0], "'");
  }
  std::int64_t ts = 0;
  try {
    std::size_t used = 0;
    ts = std::stoll(fields[1], &used);
    if (used != fields[1].size()) throw std::invalid_argument(fields[1]);
  } catch (const std::exception&) {
    raise<ParseError>("elem line ", where, " has bad timestamp '", fields[1], "'");
  }
  if (ts < 0) raise<ParseError>("elem line ", where, " has negative timestamp");
  if (fields[2].empty()) raise<ParseError>("elem line ", where, " has empty collector");

  BgpElem elem{type, ts, fields[2], Asn::parse(fields[3]), Prefix::parse(fields[4]), std::nullopt};

  const std::string& path_field = fields[5];
  if (type == RecordType::Withdraw) {
    if (!path_field.empty()) {
      raise<ParseError>("elem line ", where, " is a withdrawal but carries a path");
    }
    return elem;
  }
  if (path_field.empty()) {
    raise<ParseError>("elem line ", where, " is missing its AS path");
  }
  if (detail::path_has_set_segment(path_field)) {
    ++stats.as_set_rejected;
    return std::nullopt;
  }
  std::vector<Asn> hops;
  for (const std::string& tok : split(path_field, ' ')) {
    if (tok.empty()) raise<ParseError>("elem line ", where, " has a malformed AS path");
    hops.push_back(Asn::parse(tok));
  }
  elem.path = AsPath(std::move(hops));
  if (elem.path->peer() != elem.peer) {
    ++stats.peer_mismatch;
    return std::nullopt;
  }
  return elem;
}

/// An ordered, timestamp-sorted stream of elems, optionally filtered to a
/// prefix set. Ties within one second keep input order.
class ElemSource {
 public:
  ElemSource() = default;

  explicit ElemSource(std::vector<BgpElem> elems) : elems_(std::move(elems)) {
    std::stable_sort(elems_.begin(), elems_.end(),
                     [](const BgpElem& a, const BgpElem& b) { return a.timestamp < b.timestamp; });
  }

  static ElemSource from_file(const std::string& path, IngestStats& stats) {
    return from_files({path}, stats);
  }

  static ElemSource from_files(const std::vector<std::string>& paths, IngestStats& stats) {
    std::vector<BgpElem> elems;
    for (const std::string& file : paths) {
      std::ifstream in(file);
      if (!in) raise("cannot open elem file '", file, "'");
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto where = file + ":" + std::to_string(lineno);
        if (auto elem = parse_elem_line(line, stats, where)) elems.push_back(std::move(*elem));
      }
    }
    return ElemSource(std::move(elems));
  }

  const std::vector<BgpElem>& elems() const { return elems_; }
  bool empty() const { return elems_.empty(); }
  std::size_t size() const { return elems_.size(); }

  /// All prefixes observed in the stream.
  std::set<Prefix> prefix_index() const {
    std::set<Prefix> out;
    for (const BgpElem& e : elems_) out.insert(e.prefix);
    return out;
  }

  std::set<std::int64_t> rib_timestamps() const {
    std::set<std::int64_t> out;
    for (const BgpElem& e : elems_) {
      if (e.record_type == RecordType::Rib) out.insert(e.timestamp);
    }
    return out;
  }

  /// Copy keeping only elems whose prefix is in `keep`. Dropped elems are
  /// counted, not errored.
  ElemSource filtered(const std::set<Prefix>& keep, IngestStats& stats) const {
    std::vector<BgpElem> out;
    out.reserve(elems_.size());
    for (const BgpElem& e : elems_) {
      if (keep.contains(e.prefix)) {
        out.push_back(e);
      } else {
        ++stats.filtered_out;
      }
    }
    return ElemSource(std::move(out));
  }

  /// RIB records stamped exactly `ts`, in input order.
  std::vector<BgpElem> rib_at(std::int64_t ts) const {
    std::vector<BgpElem> out;
    for (const BgpElem& e : elems_) {
      if (e.record_type == RecordType::Rib && e.timestamp == ts) out.push_back(e);
    }
    return out;
  }

  /// Announce/Withdraw records with from <= timestamp < to_exclusive.
  std::vector<BgpElem> updates_in(std::int64_t from, std::int64_t to_exclusive) const {
    std::vector<BgpElem> out;
    for (const BgpElem& e : elems_) {
      if (e.record_type == RecordType::Rib) continue;
      if (e.timestamp >= from && e.timestamp < to_exclusive) out.push_back(e);
    }
    return out;
  }

 private:
  std::vector<BgpElem> elems_;
};

}  // namespace bear
