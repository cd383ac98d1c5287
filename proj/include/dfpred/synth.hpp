#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfpred/config.hpp"
#include "dfpred/features.hpp"
#include "dfpred/ingest.hpp"
#include "dfpred/topology.hpp"

namespace dfpred {

/// Runtime law and job-volume parameters of one application profile.
struct AppProfile {
  std::string name;
  int n_jobs = 150;
  int nodes_per_job = 32;
  double base_runtime = 300;  // seconds
  double alpha_gbl = 0.06;    // sensitivity to global-link congestion
  double alpha_grp = 0.036;   // sensitivity to in-group congestion
  double gamma = 0.03;        // placement sensitivity (NUM_GROUPS / groups)
  double noise_frac = 0.02;   // gaussian noise std as a fraction of base_runtime
};

/// Poisson traffic rates and group-burst behavior.
struct TrafficSpec {
  double flit_rate = 40;      // per VC per router tile per second
  double pkt_rate = 20;       // per-VC stall-cycle counter rate
  double stall_rate = 25;     // rowbus stall counter rate
  double nic_flit_rate = 50;  // per NIC flit counter per processor tile
  double nic_stall_rate = 10;
  double burst_multiplier = 6.0;  // rate multiplier at full severity
  double burst_duration = 300;    // seconds of each window the burst covers
  double burst_probability = 0.7; // per group per window, per link channel
  double severity_min = 0.2;      // window burst severity ~ U(min, 1)
};

struct SynthConfig {
  std::uint64_t seed = 42;
  int groups = 4;
  int routers_per_group = 16;
  int io_routers_per_group = 1;
  int service_routers_per_group = 1;
  int nodes_per_router = 4;
  int jobs_per_epoch = 6;           // jobs dispatched per window
  std::int64_t window = 300;        // seconds; one congestion epoch per window
  std::int64_t sample_period = 300; // cumulative-sample emission cadence; divides window
  std::vector<AppProfile> profiles;
  TrafficSpec traffic;

  void validate() const;
  static SynthConfig defaults();
  /// Reads a key=value config (with [profile.<name>] and [traffic] sections)
  /// on top of the defaults.
  static SynthConfig from_config(const KeyValueConfig& kv);
};

struct GroundTruthRow {
  std::string job_id;
  double c_gbl = 0;  // normalized global-link burst intensity over the job's routers
  double c_grp = 0;  // normalized in-group burst intensity
  Index num_groups = 0;
  double noiseless_runtime = 0;
  double runtime = 0;
};

struct SynthDataset {
  MachineSpec topology_spec;
  Machine machine;
  std::vector<CounterStream::CompactSample> stream;  // emission order: time-major
  std::vector<JobRecord> jobs;
  std::vector<GroundTruthRow> truth;
  /// Realized per-epoch per-router counter totals (routers x 25 per epoch),
  /// the generator's internal traffic tally.
  std::vector<Matrix> epoch_tally;
  int epochs = 0;
  std::int64_t window = 300;
};

/// Generates cumulative nondecreasing per-tile counters, job placements, and
/// runtimes from the profile law
///   runtime = base * (1 + a_gbl*c_gbl + a_grp*c_grp + gamma*NUM_GROUPS/groups) + noise.
/// Deterministic per seed. Throws NumericError if a realized runtime is
/// nonpositive.
SynthDataset generate(const SynthConfig& cfg);

/// Runtime law without noise; c values are normalized window-averaged burst
/// intensities over the job's routers.
double noiseless_runtime(const AppProfile& profile, double c_gbl, double c_grp, Index num_groups,
                         int total_groups);

struct PlantedConfig {
  std::uint64_t seed = 0;
  Index rows = 450;
  std::vector<std::string> signal_features;  // names among derived + placement columns
  double base = 300;
  double signal_weight = 30;  // target units per standardized feature unit
  double noise_std = 3;

  void validate() const;
};

/// Feature matrix with the derived + placement column layout where only the
/// named features carry signal; all other columns are seeded noise.
FeatureMatrix planted_importance_dataset(const PlantedConfig& cfg);

}  // namespace dfpred
