#include <doctest.h>

#include <algorithm>
#include <random>

#include "dfpred/features.hpp"
#include "dfpred/ingest.hpp"
#include "helpers.hpp"

using namespace dfpred;
namespace nc = dfpred::counters;

TEST_CASE("window_delta basics") {
  std::vector<TimedValue> series = {{700, 1000}, {1000, 1500}};
  auto r = window_delta(series, 1000);
  CHECK(r.delta == 500);
  CHECK(!r.reset);

  std::vector<TimedValue> constant = {{700, 42}, {1000, 42}};
  CHECK(window_delta(constant, 1000).delta == 0);
}

TEST_CASE("window_delta reset clamps to zero") {
  std::vector<TimedValue> series = {{700, 900}, {900, 950}, {1000, 100}};
  auto r = window_delta(series, 1000);
  CHECK(r.delta == 0);
  CHECK(r.reset);
}

TEST_CASE("window_delta missing data") {
  std::vector<TimedValue> empty;
  CHECK(!try_window_delta(empty, 1000));
  CHECK_THROWS_AS(window_delta(empty, 1000), DataError);

  // No baseline: stream starts at the job start.
  std::vector<TimedValue> late = {{1000, 5}, {1100, 6}};
  CHECK(!try_window_delta(late, 1000));

  // Baseline exactly at the grace edge is usable; one second older is not.
  std::vector<TimedValue> edge = {{640, 10}, {1000, 30}};
  auto r = try_window_delta(edge, 1000);
  REQUIRE(r);
  CHECK(r->delta == 20);
  std::vector<TimedValue> stale = {{639, 10}, {1000, 30}};
  CHECK(!try_window_delta(stale, 1000));
}

TEST_CASE("window_delta uses nearest-previous samples") {
  // Sparse samples: endpoint values come from the latest sample at or before
  // each endpoint.
  std::vector<TimedValue> series = {{680, 100}, {950, 400}};
  auto r = window_delta(series, 1000);
  CHECK(r.delta == 300);
}

TEST_CASE("window_delta additivity over adjacent windows") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> step(0, 50);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TimedValue> series;
    std::uint64_t v = rng() % 1000;
    for (std::int64_t t = 0; t <= 1300; t += 10) {
      series.push_back({t, v});
      v += step(rng);
    }
    const std::int64_t t0 = 1300;
    const double whole = window_delta(series, t0, 600).delta;
    const double first = window_delta(series, t0 - 300, 300).delta;
    const double second = window_delta(series, t0, 300).delta;
    CHECK(whole == first + second);
    CHECK(whole >= 0);
  }
}

TEST_CASE("reduce_tiles sums per tile class") {
  Machine m = test::make_machine({});
  RouterTileDeltas table;
  table.router = 0;
  table.tile_present.fill(true);

  SUBCASE("flit counter over 40 router tiles") {
    for (int tile = 0; tile < 40; ++tile) table.values(tile, nc::kFlitVcBase) = 1;
    auto raw = reduce_tiles(m, table);
    CHECK(raw.values[nc::kFlitVcBase] == 40);
    CHECK(raw.values.sum() == 40);
  }

  SUBCASE("all zeros") {
    auto raw = reduce_tiles(m, table);
    CHECK(raw.values.isZero(0));
  }

  SUBCASE("nic counter over 8 processor tiles") {
    for (int tile = 40; tile < 48; ++tile)
      table.values(tile, nc::kNicBase + nc::kReqNicToPtFlits) = 5;
    auto raw = reduce_tiles(m, table);
    CHECK(raw.values[nc::kNicBase + nc::kReqNicToPtFlits] == 40);
  }

  SUBCASE("missing tile errors unless tolerant") {
    table.tile_present[5] = false;
    CHECK_THROWS_AS(reduce_tiles(m, table), DataError);
    CHECK_NOTHROW(reduce_tiles(m, table, /*tolerant=*/true));
  }
}

TEST_CASE("reduce_tiles matches a brute-force sum on random tables") {
  Machine m = test::make_machine({});
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    auto table = test::random_tile_deltas(m, 0, rng);
    auto raw = reduce_tiles(m, table);
    for (int c = 0; c < nc::kRawCount; ++c) {
      double expected = 0;
      for (int tile = 0; tile < kTilesPerRouter; ++tile) {
        const bool router_tile = m.routers()[0].tiles[tile] != TileClass::Processor;
        if (router_tile == nc::is_router_tile_counter(c)) expected += table.values(tile, c);
      }
      CHECK(raw.values[c] == expected);
    }
  }
}

namespace {

// 1 Hz constant-rate fixture: every valid key gets per-second cumulative
// samples; VC0 flits grow at `rate`/s on router tiles, everything else stays
// flat.
std::vector<CounterStream::CompactSample> constant_rate_stream(const Machine& m, std::int64_t t0,
                                                               std::int64_t t1,
                                                               std::uint64_t rate) {
  std::vector<CounterStream::CompactSample> samples;
  for (std::int64_t t = t0; t <= t1; ++t) {
    for (Index r = 0; r < m.router_count(); ++r)
      for (int tile = 0; tile < kTilesPerRouter; ++tile) {
        auto [lo, hi] = CounterStream::counter_range(m.routers()[r].tiles[tile]);
        for (int c = lo; c < hi; ++c) {
          const bool grows = c == nc::kFlitVcBase &&
                             m.routers()[r].tiles[tile] != TileClass::Processor;
          samples.push_back({static_cast<std::int32_t>(r), static_cast<std::int16_t>(tile),
                             static_cast<std::int16_t>(c), t,
                             grows ? rate * static_cast<std::uint64_t>(t - t0) : 7});
        }
      }
  }
  return samples;
}

}  // namespace

TEST_CASE("extraction of a constant-rate 1 Hz stream") {
  Machine m = test::make_machine({.groups = 1, .compute_per_group = 2});
  // Per-tile VC0 rate 10/s. Stream covers [0, 400]; job starts at 350.
  auto samples = constant_rate_stream(m, 0, 400, 10);
  CounterStream stream = CounterStream::index_compact(samples, m);

  JobRecord job;
  job.job_id = "j1";
  job.app = "a";
  job.nodes = {"g0r0n0"};
  job.node_count = 1;
  job.start_time = 350;
  job.exec_time = 100;

  auto report = extract_job_windows(stream, std::vector<JobRecord>{job}, m);
  REQUIRE(report.jobs.size() == 1);
  REQUIRE(report.skipped.empty());

  // Brute-force oracle: sum the per-second increments inside the window for
  // one tile, then scale by the 40 router tiles.
  double per_tile = 0;
  for (std::int64_t t = 50 + 1; t <= 350; ++t) per_tile += 10;
  CHECK(per_tile == 3000);  // rate x 300 s
  for (Index r = 0; r < m.router_count(); ++r) {
    CHECK(report.jobs[0].raw(r, nc::kFlitVcBase) == 40 * per_tile);
    // Other counters were flat.
    CHECK(report.jobs[0].raw(r, nc::kFlitVcBase + 1) == 0);
    CHECK(report.jobs[0].raw(r, nc::kRowbusStall) == 0);
  }
}

TEST_CASE("job starting at stream start is skipped") {
  Machine m = test::make_machine({.groups = 1, .compute_per_group = 1});
  auto samples = constant_rate_stream(m, 1000, 1400, 1);
  CounterStream stream = CounterStream::index_compact(samples, m);

  JobRecord job;
  job.job_id = "early";
  job.app = "a";
  job.nodes = {"g0r0n0"};
  job.node_count = 1;
  job.start_time = 1000;  // empty pre-job window
  job.exec_time = 10;

  auto report = extract_job_windows(stream, std::vector<JobRecord>{job}, m);
  CHECK(report.jobs.empty());
  REQUIRE(report.skipped.size() == 1);
  CHECK(report.skipped[0].job_id == "early");
  CHECK(!report.skipped[0].reason.empty());
}

TEST_CASE("extraction is order-insensitive and job-independent") {
  Machine m = test::make_machine({.groups = 1, .compute_per_group = 2});
  auto samples = constant_rate_stream(m, 0, 1000, 3);

  JobRecord a;
  a.job_id = "a";
  a.app = "x";
  a.nodes = {"g0r0n0"};
  a.node_count = 1;
  a.start_time = 400;
  a.exec_time = 10;
  JobRecord b = a;
  b.job_id = "b";
  b.start_time = 900;

  CounterStream stream = CounterStream::index_compact(samples, m);
  auto fwd = extract_job_windows(stream, std::vector<JobRecord>{a, b}, m);

  auto shuffled = samples;
  std::mt19937_64 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CounterStream stream2 = CounterStream::index_compact(shuffled, m);
  auto rev = extract_job_windows(stream2, std::vector<JobRecord>{b, a}, m);

  REQUIRE(fwd.jobs.size() == 2);
  REQUIRE(rev.jobs.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(fwd.jobs[i].job_id == rev.jobs[i].job_id);
    CHECK(fwd.jobs[i].raw == rev.jobs[i].raw);
    CHECK(fwd.jobs[i].derived == rev.jobs[i].derived);
  }
}

TEST_CASE("stream validation rejects bad keys") {
  Machine m = test::make_machine({});
  SUBCASE("counter on wrong tile class") {
    // NIC counter on a router tile.
    std::vector<CounterStream::CompactSample> samples = {
        {0, 0, static_cast<std::int16_t>(nc::kNicBase), 0, 1}};
    CHECK_THROWS_AS(CounterStream::index_compact(samples, m), DataError);
  }
  SUBCASE("tile out of range") {
    std::vector<CounterStream::CompactSample> samples = {{0, 48, 0, 0, 1}};
    CHECK_THROWS_AS(CounterStream::index_compact(samples, m), DataError);
  }
  SUBCASE("unknown counter or router name") {
    CounterSample s{0, "g0r0", 0, "NOT_A_COUNTER", 1};
    CHECK_THROWS_AS(CounterStream::index(std::vector<CounterSample>{s}, m), DataError);
    CounterSample s2{0, "ghost", 0, std::string(nc::raw_names()[0]), 1};
    CHECK_THROWS_AS(CounterStream::index(std::vector<CounterSample>{s2}, m), DataError);
  }
}

TEST_CASE("job record validation") {
  JobRecord j;
  j.job_id = "j";
  j.app = "a";
  j.nodes = {"n0"};
  j.node_count = 2;  // mismatch
  j.exec_time = 5;
  CHECK_THROWS_AS(j.validate(), DataError);
  j.node_count = 1;
  j.exec_time = 0;
  CHECK_THROWS_AS(j.validate(), DataError);
  j.exec_time = 5;
  CHECK_NOTHROW(j.validate());
}
