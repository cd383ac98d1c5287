#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfpred/counters.hpp"
#include "dfpred/topology.hpp"
#include "dfpred/types.hpp"

namespace dfpred {

inline constexpr std::int64_t kDefaultWindowSeconds = 300;
inline constexpr std::int64_t kDefaultGraceSeconds = 60;

/// One cumulative counter reading.
struct CounterSample {
  std::int64_t timestamp = 0;  // seconds since epoch
  std::string router_id;
  int tile_index = 0;
  std::string counter_name;
  std::uint64_t value = 0;
};

/// One control-job run: placement plus the measured main-loop time.
struct JobRecord {
  std::string job_id;
  std::string app;
  int node_count = 0;
  std::vector<std::string> nodes;
  std::int64_t start_time = 0;
  double exec_time = 0;  // seconds

  void validate() const;
};

struct TimedValue {
  std::int64_t t;
  std::uint64_t v;
};

struct WindowDeltaResult {
  double delta = 0;
  bool reset = false;  // counter decreased inside the window; delta clamped to 0
};

/// Change of a cumulative counter over [t_start - window, t_start): value at
/// the latest sample <= t_start minus the value at the latest sample
/// <= t_start - window. The baseline sample must lie within `grace` seconds
/// before the window start. A decrease (counter reset) clamps to 0 and sets
/// the reset flag.
std::optional<WindowDeltaResult> try_window_delta(std::span<const TimedValue> series,
                                                  std::int64_t t_start,
                                                  std::int64_t window = kDefaultWindowSeconds,
                                                  std::int64_t grace = kDefaultGraceSeconds);

/// Throwing variant; raises DataError when the window has no usable samples.
WindowDeltaResult window_delta(std::span<const TimedValue> series, std::int64_t t_start,
                               std::int64_t window = kDefaultWindowSeconds,
                               std::int64_t grace = kDefaultGraceSeconds);

/// Per-key (router, tile, counter) sorted series for fast window queries.
class CounterStream {
 public:
  /// Indexes samples against the machine. Validates router ids, tile indices,
  /// counter names, and counter/tile-class pairing; sorts each series by time.
  static CounterStream index(std::span<const CounterSample> samples, const Machine& m);

  /// Indexes pre-resolved samples (router index, tile, raw counter slot).
  struct CompactSample {
    std::int32_t router;
    std::int16_t tile;
    std::int16_t counter;
    std::int64_t t;
    std::uint64_t v;
  };
  static CounterStream index_compact(std::vector<CompactSample> samples, const Machine& m);

  std::span<const TimedValue> series(Index router, int tile, int counter) const;
  const Machine* machine() const { return machine_; }

  /// Expected counter slots for a tile of the given class.
  static std::pair<int, int> counter_range(TileClass c);

 private:
  std::size_t slot(Index router, int tile, int counter) const {
    return (static_cast<std::size_t>(router) * kTilesPerRouter + tile) * counters::kRawCount +
           counter;
  }
  const Machine* machine_ = nullptr;
  std::vector<std::vector<TimedValue>> series_;
};

/// Per-tile counter deltas for one router over one job window. Columns are
/// raw counter slots in storage order; rows are tiles. Router tiles use the
/// inq/rowbus columns, processor tiles the NIC columns.
struct RouterTileDeltas {
  Index router = 0;
  Eigen::Matrix<double, kTilesPerRouter, counters::kRawCount> values =
      Eigen::Matrix<double, kTilesPerRouter, counters::kRawCount>::Zero();
  std::array<bool, kTilesPerRouter> tile_present{};
  bool reset_seen = false;
};

/// The 25 raw features of one router after tile reduction.
struct RawRouterFeatures {
  Index router = 0;
  Eigen::Matrix<double, counters::kRawCount, 1> values =
      Eigen::Matrix<double, counters::kRawCount, 1>::Zero();
  bool reset_seen = false;
};

/// Sums the 17 router-tile counters over all router tiles and the 8 NIC
/// counters over all processor tiles. Missing tiles raise DataError unless
/// `tolerant` is set.
RawRouterFeatures reduce_tiles(const Machine& m, const RouterTileDeltas& deltas,
                               bool tolerant = false);

struct ExtractOptions {
  std::int64_t window = kDefaultWindowSeconds;
  std::int64_t grace = kDefaultGraceSeconds;
  int threads = 1;
};

/// Window features for one job: one row per machine router.
struct JobWindowFeatures {
  std::string job_id;
  Matrix raw;      // router_count x 25, raw storage order
  Matrix derived;  // router_count x 14, derived storage order
  bool reset_seen = false;
};

struct ExtractionReport {
  struct Skip {
    std::string job_id;
    std::string reason;
  };
  std::vector<JobWindowFeatures> jobs;  // ordered by job_id
  std::vector<Skip> skipped;            // ordered by job_id

  const JobWindowFeatures* find(std::string_view job_id) const;
};

/// Extracts the pre-job window of every job over every machine router.
/// Jobs with any unrecoverable missing counter data are reported in
/// `skipped` with a reason and excluded; nothing is imputed.
ExtractionReport extract_job_windows(const CounterStream& stream,
                                     std::span<const JobRecord> jobs, const Machine& m,
                                     const ExtractOptions& opts = {});

}  // namespace dfpred
