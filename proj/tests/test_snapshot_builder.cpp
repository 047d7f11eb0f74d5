#include <gtest/gtest.h>

#include <map>
#include <random>

#include "bear/builder.hpp"
#include "bear/elem.hpp"

using namespace bear;

namespace {

BgpElem announce(std::int64_t ts, const std::string& collector, std::uint32_t peer,
                 const std::string& prefix, std::vector<std::uint32_t> hops) {
  std::vector<Asn> path;
  for (auto h : hops) path.emplace_back(h);
  return BgpElem{RecordType::Announce, ts, collector, Asn(peer), Prefix::parse(prefix),
                 AsPath(path)};
}

BgpElem rib(std::int64_t ts, const std::string& collector, std::uint32_t peer,
            const std::string& prefix, std::vector<std::uint32_t> hops) {
  BgpElem e = announce(ts, collector, peer, prefix, std::move(hops));
  e.record_type = RecordType::Rib;
  return e;
}

BgpElem withdraw(std::int64_t ts, const std::string& collector, std::uint32_t peer,
                 const std::string& prefix) {
  return BgpElem{RecordType::Withdraw, ts, collector, Asn(peer), Prefix::parse(prefix),
                 std::nullopt};
}

}  // namespace

TEST(HistoryTimestamp, Examples) {
  EXPECT_EQ(history_timestamp(28800), 0);
  EXPECT_EQ(history_timestamp(1685010000), 1684972800);  // 10:20Z -> 00:00Z same day
  EXPECT_EQ(history_timestamp(1684972800), 1684944000);  // exact boundary steps back a full slot
  EXPECT_THROW(history_timestamp(28799), SpecError);
}

TEST(HistoryTimestamp, MatchesBruteForceSearch) {
  // oracle: the largest multiple of 28800 that is <= t - 28800
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    std::int64_t t = 28800 + static_cast<std::int64_t>(rng() % 2000000000ull);
    std::int64_t expect = 0;
    while (expect + 28800 <= t - 28800) expect += 28800;
    std::int64_t got = history_timestamp(t);
    ASSERT_EQ(got, expect) << "t=" << t;
    ASSERT_EQ(got % 28800, 0);
    ASSERT_GE(got, t - 57600);
    ASSERT_LE(got, t - 28800);
  }
}

TEST(ApplyElem, AnnounceReplaces) {
  RouteSnapshot s(0);
  s.set({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)}, AsPath::of({64500, 2, 3}));
  RouteSnapshot next = apply_elem(s, announce(1, "rrc00", 64500, "10.0.0.0/8", {64500, 7, 3}));
  EXPECT_EQ(*next.find({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)}),
            AsPath::of({64500, 7, 3}));
  EXPECT_EQ(next.path_count(), 1u);
}

TEST(ApplyElem, WithdrawDeletes) {
  RouteSnapshot s(0);
  s.set({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)}, AsPath::of({64500, 2, 3}));
  RouteSnapshot next = apply_elem(s, withdraw(1, "rrc00", 64500, "10.0.0.0/8"));
  EXPECT_TRUE(next.empty());
}

TEST(ApplyElem, WithdrawMissingIsCountedNoop) {
  RouteSnapshot s(0);
  ReplayStats stats;
  RouteSnapshot next = apply_elem(s, withdraw(1, "rrc00", 64500, "10.0.0.0/8"), &stats);
  EXPECT_TRUE(next.empty());
  EXPECT_EQ(stats.withdraw_missing, 1u);
}

TEST(ApplyElem, DuplicateAnnounceCounted) {
  RouteSnapshot s(0);
  s.set({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)}, AsPath::of({64500, 2, 3}));
  ReplayStats stats;
  apply_elem(s, announce(1, "rrc00", 64500, "10.0.0.0/8", {64500, 2, 3}), &stats);
  EXPECT_EQ(stats.duplicate_announce, 1u);
}

TEST(ApplyElem, RejectsRibRecords) {
  RouteSnapshot s(0);
  EXPECT_THROW(apply_elem(s, rib(0, "rrc00", 64500, "10.0.0.0/8", {64500, 3})), SpecError);
}

TEST(ApplyElem, AnnounceWithdrawInversion) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    RouteSnapshot s(0);
    RouteKey key{Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)};
    bool present_before = rng() % 2 == 0;
    if (present_before) s.set(key, AsPath::of({64500, 4, 5}));
    RouteSnapshot original = s;

    RouteSnapshot announced =
        apply_elem(s, announce(1, "rrc00", 64500, "10.0.0.0/8", {64500, 9, 9}));
    RouteSnapshot withdrawn = apply_elem(announced, withdraw(2, "rrc00", 64500, "10.0.0.0/8"));
    EXPECT_EQ(withdrawn.find(key), nullptr);
    if (present_before) {
      RouteSnapshot restored =
          apply_elem(withdrawn, announce(3, "rrc00", 64500, "10.0.0.0/8", {64500, 4, 5}));
      EXPECT_EQ(restored, original);
    } else {
      EXPECT_EQ(withdrawn, original);
    }
  }
}

TEST(BuildHistory, LastRibRecordWins) {
  ElemSource source({rib(28800, "rrc00", 64500, "10.0.0.0/8", {64500, 1, 15169}),
                     rib(28800, "rrc00", 64500, "10.0.0.0/8", {64500, 2, 15169})});
  RouteSnapshot history = build_history(source, {Prefix::parse("10.0.0.0/8")}, 28800);
  EXPECT_EQ(*history.find({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)}),
            AsPath::of({64500, 2, 15169}));
}

TEST(BuildHistory, OnePathPerPeer) {
  ElemSource source({rib(28800, "rrc00", 64500, "10.0.0.0/8", {64500, 15169}),
                     rib(28800, "rrc00", 64501, "10.0.0.0/8", {64501, 15169}),
                     rib(28800, "rrc01", 64502, "10.0.0.0/8", {64502, 15169})});
  RouteSnapshot history = build_history(source, {Prefix::parse("10.0.0.0/8")}, 28800);
  EXPECT_EQ(history.path_count(), 3u);
  EXPECT_EQ(history.timestamp(), 28800);
}

TEST(BuildHistory, MissingDump) {
  ElemSource empty;
  EXPECT_THROW(build_history(empty, {Prefix::parse("10.0.0.0/8")}, 28800), MissingDumpError);
  // records at the wrong timestamp do not back the dump
  ElemSource wrong_ts({rib(28800, "rrc00", 64500, "10.0.0.0/8", {64500, 15169})});
  EXPECT_THROW(build_history(wrong_ts, {Prefix::parse("10.0.0.0/8")}, 57600), MissingDumpError);
}

namespace {

// Naive per-key last-write oracle: replay updates into a plain map.
using OracleKey = std::tuple<std::string, std::string, std::uint32_t>;  // prefix, collector, peer

std::map<OracleKey, std::vector<std::uint32_t>> oracle_replay(const RouteSnapshot& base,
                                                              const std::vector<BgpElem>& updates) {
  std::map<OracleKey, std::vector<std::uint32_t>> table;
  for (const auto& [prefix, cmap] : base.routes()) {
    for (const auto& [collector, pmap] : cmap) {
      for (const auto& [peer, path] : pmap) {
        std::vector<std::uint32_t> hops;
        for (const Asn& h : path.hops()) hops.push_back(h.value());
        table[{prefix.str(), collector, peer.value()}] = hops;
      }
    }
  }
  for (const BgpElem& e : updates) {
    OracleKey key{e.prefix.str(), e.collector, e.peer.value()};
    if (e.record_type == RecordType::Withdraw) {
      table.erase(key);
    } else {
      std::vector<std::uint32_t> hops;
      for (const Asn& h : e.path->hops()) hops.push_back(h.value());
      table[key] = hops;
    }
  }
  return table;
}

std::map<OracleKey, std::vector<std::uint32_t>> flatten(const RouteSnapshot& s) {
  std::map<OracleKey, std::vector<std::uint32_t>> table;
  for (const auto& [prefix, cmap] : s.routes()) {
    for (const auto& [collector, pmap] : cmap) {
      for (const auto& [peer, path] : pmap) {
        std::vector<std::uint32_t> hops;
        for (const Asn& h : path.hops()) hops.push_back(h.value());
        table[{prefix.str(), collector, peer.value()}] = hops;
      }
    }
  }
  return table;
}

}  // namespace

TEST(Replay, MatchesNaiveOracleOnRandomSequences) {
  std::mt19937_64 rng(31);
  const std::vector<std::string> prefixes{"10.0.0.0/8", "10.0.0.0/9", "192.0.2.0/24"};
  const std::vector<std::string> collectors{"rrc00", "rrc01"};
  for (int round = 0; round < 100; ++round) {
    RouteSnapshot base(0);
    std::vector<BgpElem> updates;
    std::int64_t ts = 1;
    std::size_t n = 5 + rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      std::string prefix = prefixes[rng() % prefixes.size()];
      std::string collector = collectors[rng() % collectors.size()];
      std::uint32_t peer = 64500 + static_cast<std::uint32_t>(rng() % 4);
      if (rng() % 4 == 0) {
        updates.push_back(withdraw(ts++, collector, peer, prefix));
      } else {
        std::vector<std::uint32_t> hops{peer, 1 + static_cast<std::uint32_t>(rng() % 100), 15169};
        updates.push_back(announce(ts++, collector, peer, prefix, hops));
      }
    }
    RouteSnapshot replayed = base;
    ReplayStats stats;
    for (const BgpElem& e : updates) apply_elem_inplace(replayed, e, stats);
    EXPECT_EQ(flatten(replayed), oracle_replay(base, updates));
  }
}

TEST(BuildBeforeAfter, WindowBoundaries) {
  const std::int64_t t = 57600 + 7200;  // history slot at 28800
  EventSpec spec{Prefix::parse("10.0.0.0/8"), t, std::nullopt, std::nullopt};
  ElemSource source({
      rib(28800, "rrc00", 64500, "10.0.0.0/8", {64500, 15169}),
      announce(t - 301, "rrc00", 64500, "10.0.0.0/8", {64500, 7, 15169}),  // in before-window
      announce(t - 299, "rrc00", 64500, "10.0.0.0/8", {64500, 8, 15169}),  // in after-window
      announce(t + 299, "rrc00", 64500, "10.0.0.0/8", {64500, 9, 15169}),  // in after-window
      announce(t + 300, "rrc00", 64500, "10.0.0.0/8", {64500, 10, 15169}),  // past both windows
      announce(t + 250, "rrc01", 64501, "10.0.0.0/8", {64501, 15169}),
  });
  IngestStats ingest;
  SnapshotTriple triple = build_triple(spec, source, ingest);
  RouteKey key{Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)};
  EXPECT_EQ(*triple.before.find(key), AsPath::of({64500, 7, 15169}));
  EXPECT_EQ(*triple.after.find(key), AsPath::of({64500, 9, 15169}));
  // a peer absent from the RIB dump joins on its first announce
  EXPECT_NE(triple.after.find({Prefix::parse("10.0.0.0/8"), "rrc01", Asn(64501)}), nullptr);

  // an elem outside the stated window is a caller error for the raw builders
  ElemSource bad({announce(t + 400, "rrc00", 64500, "10.0.0.0/8", {64500, 15169})});
  EXPECT_THROW(build_before(triple.history, bad, t), SpecError);
  EXPECT_THROW(build_after(triple.before, bad, t, std::nullopt), SpecError);
}

TEST(BuildAfter, EndTruncatesWindow) {
  const std::int64_t t = 57600;
  RouteSnapshot before(t - 300);
  before.set({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)}, AsPath::of({64500, 15169}));

  // end = t+100: the window closes one second before the event ends
  ElemSource in_window({announce(t + 99, "rrc00", 64500, "10.0.0.0/8", {64500, 1, 15169})});
  RouteSnapshot after = build_after(before, in_window, t, t + 100);
  EXPECT_EQ(*after.find({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)}),
            AsPath::of({64500, 1, 15169}));

  ElemSource at_end({announce(t + 100, "rrc00", 64500, "10.0.0.0/8", {64500, 1, 15169})});
  EXPECT_THROW(build_after(before, at_end, t, t + 100), SpecError);

  EXPECT_THROW(build_after(before, ElemSource{}, t, t), SpecError);  // end <= start
  EXPECT_THROW(build_after(before, ElemSource{}, t, t - 5), SpecError);

  // no updates: after = before apart from the timestamp
  RouteSnapshot idle = build_after(before, ElemSource{}, t, std::nullopt);
  EXPECT_EQ(idle.routes(), before.routes());
  EXPECT_EQ(idle.timestamp(), t + 300);
}

TEST(BuildBefore, AnnounceThenWithdrawLeavesKeyAbsent) {
  const std::int64_t t = 57600 + 3600;
  RouteSnapshot history(28800);
  history.set({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64500)}, AsPath::of({64500, 15169}));
  ElemSource updates({announce(30000, "rrc00", 64501, "10.0.0.0/8", {64501, 15169}),
                      withdraw(30001, "rrc00", 64501, "10.0.0.0/8")});
  RouteSnapshot before = build_before(history, updates, t);
  EXPECT_EQ(before.find({Prefix::parse("10.0.0.0/8"), "rrc00", Asn(64501)}), nullptr);
  EXPECT_EQ(before.path_count(), 1u);
}

TEST(CollectRelatedPrefixes, Examples) {
  Prefix target = Prefix::parse("10.0.0.0/8");
  std::set<Prefix> index{Prefix::parse("10.0.0.0/9"), Prefix::parse("11.0.0.0/8")};
  EXPECT_EQ(collect_related_prefixes(index, target),
            (std::set<Prefix>{target, Prefix::parse("10.0.0.0/9")}));

  EXPECT_EQ(collect_related_prefixes({target}, target), (std::set<Prefix>{target}));

  std::set<Prefix> with_default{Prefix::parse("0.0.0.0/0")};
  EXPECT_TRUE(collect_related_prefixes(with_default, target).contains(Prefix::parse("0.0.0.0/0")));
}

TEST(ElemFormat, RoundTrip) {
  IngestStats stats;
  std::string line = "A|1685010000|rrc00|64500|10.0.0.0/8|64500 3356 15169";
  auto elem = parse_elem_line(line, stats);
  ASSERT_TRUE(elem.has_value());
  EXPECT_EQ(serialize_elem(*elem), line);

  std::string wline = "W|1685010000|rrc00|64500|10.0.0.0/8|";
  auto welem = parse_elem_line(wline, stats);
  ASSERT_TRUE(welem.has_value());
  EXPECT_FALSE(welem->path.has_value());
  EXPECT_EQ(serialize_elem(*welem), wline);

  std::string rline = "R|28800|rrc01|64501|2001:db8::/32|64501 6939";
  auto relem = parse_elem_line(rline, stats);
  ASSERT_TRUE(relem.has_value());
  EXPECT_EQ(relem->record_type, RecordType::Rib);
  EXPECT_EQ(serialize_elem(*relem), rline);
  EXPECT_EQ(stats.total(), 0u);
}

TEST(ElemFormat, RejectsAndCounts) {
  IngestStats stats;
  // AS_SET segments are rejected with a counted warning
  EXPECT_EQ(parse_elem_line("A|1|rrc00|64500|10.0.0.0/8|64500 {3356,174} 15169", stats),
            std::nullopt);
  EXPECT_EQ(stats.as_set_rejected, 1u);
  // paths that do not start at the peer are rejected with a counted warning
  EXPECT_EQ(parse_elem_line("A|1|rrc00|64500|10.0.0.0/8|64501 15169", stats), std::nullopt);
  EXPECT_EQ(stats.peer_mismatch, 1u);
  // structural problems are hard errors
  EXPECT_THROW(parse_elem_line("A|1|rrc00|64500|10.0.0.0/8", stats), ParseError);
  EXPECT_THROW(parse_elem_line("X|1|rrc00|64500|10.0.0.0/8|64500", stats), ParseError);
  EXPECT_THROW(parse_elem_line("A|notatime|rrc00|64500|10.0.0.0/8|64500", stats), ParseError);
  EXPECT_THROW(parse_elem_line("A|1|rrc00|64500|10.0.0.0/8|", stats), ParseError);
  EXPECT_THROW(parse_elem_line("W|1|rrc00|64500|10.0.0.0/8|64500", stats), ParseError);
}

TEST(ElemSource, SortsStable) {
  // out-of-order timestamps are sorted; ties keep input order
  std::vector<BgpElem> elems{announce(5, "rrc00", 64500, "10.0.0.0/8", {64500, 1}),
                             announce(3, "rrc00", 64500, "10.0.0.0/8", {64500, 2}),
                             announce(3, "rrc00", 64500, "10.0.0.0/8", {64500, 3})};
  ElemSource source(elems);
  ASSERT_EQ(source.size(), 3u);
  EXPECT_EQ(source.elems()[0].path->hops()[1], Asn(2));
  EXPECT_EQ(source.elems()[1].path->hops()[1], Asn(3));
  EXPECT_EQ(source.elems()[2].path->hops()[1], Asn(1));
}

TEST(BuildTriple, DeterministicDocuments) {
  const std::int64_t t = 57600 + 7200;
  EventSpec spec{Prefix::parse("10.0.0.0/8"), t, std::nullopt, std::nullopt};
  ElemSource source({rib(28800, "rrc00", 64500, "10.0.0.0/8", {64500, 15169}),
                     rib(28800, "rrc00", 64501, "10.0.0.0/9", {64501, 15169}),
                     announce(40000, "rrc00", 64500, "10.0.0.0/8", {64500, 2, 15169}),
                     announce(t + 10, "rrc00", 64500, "10.0.0.0/8", {64500, 3, 15169})});
  IngestStats ingest1, ingest2;
  SnapshotTriple a = build_triple(spec, source, ingest1);
  SnapshotTriple b = build_triple(spec, source, ingest2);
  EXPECT_EQ(serialize_snapshot(a.history), serialize_snapshot(b.history));
  EXPECT_EQ(serialize_snapshot(a.before), serialize_snapshot(b.before));
  EXPECT_EQ(serialize_snapshot(a.after), serialize_snapshot(b.after));
  EXPECT_EQ(a.history.timestamp(), history_timestamp(t));
  // the sub-prefix rides along via related-prefix collection
  EXPECT_TRUE(a.history.prefixes().contains(Prefix::parse("10.0.0.0/9")));
}
