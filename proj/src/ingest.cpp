#include "dfpred/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "dfpred/features.hpp"

namespace dfpred {

void JobRecord::validate() const {
  if (job_id.empty()) throw DataError("job record with empty job_id");
  if (exec_time <= 0) throw DataError("job " + job_id + ": execution time must be > 0");
  if (node_count != static_cast<int>(nodes.size()))
    throw DataError("job " + job_id + ": node_count does not match node list length");
  if (nodes.empty()) throw DataError("job " + job_id + ": empty node list");
}

std::optional<WindowDeltaResult> try_window_delta(std::span<const TimedValue> series,
                                                  std::int64_t t_start, std::int64_t window,
                                                  std::int64_t grace) {
  if (series.empty()) return std::nullopt;
  auto latest_at_or_before = [&](std::int64_t t) -> const TimedValue* {
    auto it = std::upper_bound(series.begin(), series.end(), t,
                               [](std::int64_t lhs, const TimedValue& s) { return lhs < s.t; });
    if (it == series.begin()) return nullptr;
    return &*std::prev(it);
  };
  const std::int64_t window_start = t_start - window;
  const TimedValue* base = latest_at_or_before(window_start);
  if (base == nullptr || base->t < window_start - grace) return std::nullopt;
  const TimedValue* end = latest_at_or_before(t_start);
  // base exists and base->t <= t_start, so end exists too.
  WindowDeltaResult r;
  if (end->v >= base->v) {
    r.delta = static_cast<double>(end->v - base->v);
  } else {
    r.delta = 0;
    r.reset = true;
  }
  return r;
}

WindowDeltaResult window_delta(std::span<const TimedValue> series, std::int64_t t_start,
                               std::int64_t window, std::int64_t grace) {
  auto r = try_window_delta(series, t_start, window, grace);
  if (!r)
    throw DataError("window_delta: no usable sample in [" +
                    std::to_string(t_start - window - grace) + ", " + std::to_string(t_start) +
                    "]");
  return *r;
}

std::pair<int, int> CounterStream::counter_range(TileClass c) {
  if (c == TileClass::Processor) return {counters::kNicBase, counters::kRawCount};
  return {0, counters::kNicBase};
}

CounterStream CounterStream::index(std::span<const CounterSample> samples, const Machine& m) {
  std::vector<CompactSample> compact;
  compact.reserve(samples.size());
  for (const CounterSample& s : samples) {
    Index router = m.router_index(s.router_id);
    int counter = counters::raw_index(s.counter_name);
    if (counter < 0) throw DataError("unknown counter name: " + s.counter_name);
    compact.push_back({static_cast<std::int32_t>(router), static_cast<std::int16_t>(s.tile_index),
                       static_cast<std::int16_t>(counter), s.timestamp, s.value});
  }
  return index_compact(std::move(compact), m);
}

CounterStream CounterStream::index_compact(std::vector<CompactSample> samples, const Machine& m) {
  CounterStream cs;
  cs.machine_ = &m;
  cs.series_.resize(static_cast<std::size_t>(m.router_count()) * kTilesPerRouter *
                    counters::kRawCount);
  // Validate and bucket.
  for (const CompactSample& s : samples) {
    if (s.tile < 0 || s.tile >= kTilesPerRouter)
      throw DataError("tile index out of range: " + std::to_string(s.tile));
    const Router& router = m.routers()[s.router];
    TileClass cls = router.tiles[s.tile];
    auto [lo, hi] = counter_range(cls);
    if (s.counter < lo || s.counter >= hi)
      throw DataError("counter " + counters::raw_names()[s.counter] + " not valid on a " +
                      std::string(to_string(cls)) + " tile (router " + router.id + ", tile " +
                      std::to_string(s.tile) + ")");
    cs.series_[cs.slot(s.router, s.tile, s.counter)].push_back({s.t, s.v});
  }
  for (auto& series : cs.series_)
    std::stable_sort(series.begin(), series.end(),
                     [](const TimedValue& a, const TimedValue& b) { return a.t < b.t; });
  return cs;
}

std::span<const TimedValue> CounterStream::series(Index router, int tile, int counter) const {
  return series_[slot(router, tile, counter)];
}

RawRouterFeatures reduce_tiles(const Machine& m, const RouterTileDeltas& deltas, bool tolerant) {
  const Router& router = m.routers()[deltas.router];
  RawRouterFeatures out;
  out.router = deltas.router;
  out.reset_seen = deltas.reset_seen;
  for (int tile = 0; tile < kTilesPerRouter; ++tile) {
    if (!deltas.tile_present[tile]) {
      if (tolerant) continue;
      throw DataError("router " + router.id + ": missing deltas for tile " + std::to_string(tile));
    }
    auto [lo, hi] = CounterStream::counter_range(router.tiles[tile]);
    for (int c = lo; c < hi; ++c) out.values[c] += deltas.values(tile, c);
  }
  return out;
}

namespace {

// Tile deltas for one router over one window; nullopt with a reason on any
// missing key.
std::optional<RouterTileDeltas> tile_deltas_for_window(const CounterStream& stream,
                                                       const Machine& m, Index router,
                                                       std::int64_t t_start,
                                                       const ExtractOptions& opts,
                                                       std::string* missing_reason) {
  RouterTileDeltas table;
  table.router = router;
  const Router& r = m.routers()[router];
  for (int tile = 0; tile < kTilesPerRouter; ++tile) {
    auto [lo, hi] = CounterStream::counter_range(r.tiles[tile]);
    for (int c = lo; c < hi; ++c) {
      auto delta = try_window_delta(stream.series(router, tile, c), t_start, opts.window,
                                    opts.grace);
      if (!delta) {
        if (missing_reason)
          *missing_reason = "missing counter data for router " + r.id + " tile " +
                            std::to_string(tile) + " counter " + counters::raw_names()[c];
        return std::nullopt;
      }
      table.values(tile, c) = delta->delta;
      table.reset_seen |= delta->reset;
    }
    table.tile_present[tile] = true;
  }
  return table;
}

}  // namespace

const JobWindowFeatures* ExtractionReport::find(std::string_view job_id) const {
  auto it = std::lower_bound(jobs.begin(), jobs.end(), job_id,
                             [](const JobWindowFeatures& j, std::string_view id) {
                               return j.job_id < id;
                             });
  if (it == jobs.end() || it->job_id != job_id) return nullptr;
  return &*it;
}

ExtractionReport extract_job_windows(const CounterStream& stream, std::span<const JobRecord> jobs,
                                     const Machine& m, const ExtractOptions& opts) {
  for (const JobRecord& job : jobs) job.validate();

  struct PerJob {
    JobWindowFeatures features;
    std::string skip_reason;
    bool skipped = false;
  };
  std::vector<PerJob> results(jobs.size());

  auto run_job = [&](std::size_t idx) {
    const JobRecord& job = jobs[idx];
    PerJob& out = results[idx];
    out.features.job_id = job.job_id;
    out.features.raw.setZero(m.router_count(), counters::kRawCount);
    out.features.derived.setZero(m.router_count(), counters::kDerivedCount);
    for (Index r = 0; r < m.router_count(); ++r) {
      std::string reason;
      auto table = tile_deltas_for_window(stream, m, r, job.start_time, opts, &reason);
      if (!table) {
        out.skipped = true;
        out.skip_reason = reason;
        return;
      }
      RawRouterFeatures raw = reduce_tiles(m, *table);
      out.features.raw.row(r) = raw.values.transpose();
      out.features.derived.row(r) = derive_router_features(m, *table).transpose();
      out.features.reset_seen |= table->reset_seen;
    }
  };

  const int threads = std::max(1, opts.threads);
  if (threads == 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(jobs.size()));
    pool.reserve(n);
    for (int t = 0; t < n; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) run_job(i);
      });
    for (auto& t : pool) t.join();
  }

  ExtractionReport report;
  for (PerJob& r : results) {
    if (r.skipped)
      report.skipped.push_back({r.features.job_id, r.skip_reason});
    else
      report.jobs.push_back(std::move(r.features));
  }
  auto by_id = [](const auto& a, const auto& b) { return a.job_id < b.job_id; };
  std::sort(report.jobs.begin(), report.jobs.end(), by_id);
  std::sort(report.skipped.begin(), report.skipped.end(), by_id);
  return report;
}

}  // namespace dfpred
