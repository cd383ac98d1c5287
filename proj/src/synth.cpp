#include "dfpred/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dfpred/errors.hpp"

namespace dfpred {

namespace nc = counters;

void SynthConfig::validate() const {
  if (groups < 1) throw UsageError("synth: groups must be >= 1");
  if (routers_per_group < 3 || routers_per_group > 96)
    throw UsageError("synth: routers_per_group must be in 3..96");
  if (io_routers_per_group < 0 || service_routers_per_group < 0 ||
      io_routers_per_group + service_routers_per_group >= routers_per_group)
    throw UsageError("synth: io/service router counts leave no compute routers");
  if (nodes_per_router < 1) throw UsageError("synth: nodes_per_router must be >= 1");
  if (jobs_per_epoch < 1) throw UsageError("synth: jobs_per_epoch must be >= 1");
  if (window < 2) throw UsageError("synth: window must be >= 2 seconds");
  if (sample_period < 1 || window % sample_period != 0)
    throw UsageError("synth: sample_period must divide window");
  if (profiles.empty()) throw UsageError("synth: at least one profile required");
  for (const AppProfile& p : profiles) {
    if (p.n_jobs < 1) throw UsageError("synth profile " + p.name + ": n_jobs must be >= 1");
    if (p.base_runtime <= 0)
      throw UsageError("synth profile " + p.name + ": base runtime must be > 0");
    if (p.noise_frac < 0) throw UsageError("synth profile " + p.name + ": noise must be >= 0");
    if (p.nodes_per_job < 1)
      throw UsageError("synth profile " + p.name + ": nodes_per_job must be >= 1");
    const int compute_routers =
        (routers_per_group - io_routers_per_group - service_routers_per_group) * groups;
    if (p.nodes_per_job > compute_routers * nodes_per_router)
      throw UsageError("synth profile " + p.name + ": nodes_per_job exceeds machine capacity");
  }
  if (traffic.flit_rate < 0 || traffic.pkt_rate < 0 || traffic.stall_rate < 0 ||
      traffic.nic_flit_rate < 0 || traffic.nic_stall_rate < 0)
    throw UsageError("synth: traffic rates must be >= 0");
  if (traffic.burst_multiplier < 1) throw UsageError("synth: burst_multiplier must be >= 1");
  if (traffic.burst_duration < 0 || traffic.burst_duration > static_cast<double>(window))
    throw UsageError("synth: burst_duration must be in [0, window]");
  if (traffic.burst_probability < 0 || traffic.burst_probability > 1)
    throw UsageError("synth: burst_probability must be in [0, 1]");
  if (traffic.severity_min < 0 || traffic.severity_min > 1)
    throw UsageError("synth: severity_min must be in [0, 1]");
}

SynthConfig SynthConfig::defaults() {
  SynthConfig cfg;
  cfg.profiles = {
      {"low_comm", 150, 32, 300.0, 0.06, 0.036, 0.030, 0.02},
      {"mid_comm", 150, 32, 330.0, 0.09, 0.054, 0.045, 0.02},
      {"high_comm", 150, 32, 310.0, 0.12, 0.072, 0.060, 0.02},
  };
  return cfg;
}

SynthConfig SynthConfig::from_config(const KeyValueConfig& kv) {
  SynthConfig cfg = defaults();
  cfg.seed = kv.get_uint("seed", cfg.seed);
  cfg.groups = static_cast<int>(kv.get_int("groups", cfg.groups));
  cfg.routers_per_group = static_cast<int>(kv.get_int("routers_per_group", cfg.routers_per_group));
  cfg.io_routers_per_group =
      static_cast<int>(kv.get_int("io_routers_per_group", cfg.io_routers_per_group));
  cfg.service_routers_per_group =
      static_cast<int>(kv.get_int("service_routers_per_group", cfg.service_routers_per_group));
  cfg.nodes_per_router = static_cast<int>(kv.get_int("nodes_per_router", cfg.nodes_per_router));
  cfg.jobs_per_epoch = static_cast<int>(kv.get_int("jobs_per_epoch", cfg.jobs_per_epoch));
  cfg.window = kv.get_int("window", cfg.window);
  cfg.sample_period = kv.get_int("sample_period", cfg.sample_period);

  TrafficSpec& t = cfg.traffic;
  t.flit_rate = kv.get_double("traffic.flit_rate", t.flit_rate);
  t.pkt_rate = kv.get_double("traffic.pkt_rate", t.pkt_rate);
  t.stall_rate = kv.get_double("traffic.stall_rate", t.stall_rate);
  t.nic_flit_rate = kv.get_double("traffic.nic_flit_rate", t.nic_flit_rate);
  t.nic_stall_rate = kv.get_double("traffic.nic_stall_rate", t.nic_stall_rate);
  t.burst_multiplier = kv.get_double("traffic.burst_multiplier", t.burst_multiplier);
  t.burst_duration = kv.get_double("traffic.burst_duration", t.burst_duration);
  t.burst_probability = kv.get_double("traffic.burst_probability", t.burst_probability);
  t.severity_min = kv.get_double("traffic.severity_min", t.severity_min);

  const std::vector<std::string> names = kv.subsections("profile");
  if (!names.empty()) {
    const AppProfile base;  // field defaults for unspecified keys
    cfg.profiles.clear();
    for (const std::string& name : names) {
      AppProfile p = base;
      p.name = name;
      const std::string prefix = "profile." + name + ".";
      p.n_jobs = static_cast<int>(kv.get_int(prefix + "n_jobs", p.n_jobs));
      p.nodes_per_job = static_cast<int>(kv.get_int(prefix + "nodes_per_job", p.nodes_per_job));
      p.base_runtime = kv.get_double(prefix + "base_runtime", p.base_runtime);
      p.alpha_gbl = kv.get_double(prefix + "alpha_gbl", p.alpha_gbl);
      p.alpha_grp = kv.get_double(prefix + "alpha_grp", p.alpha_grp);
      p.gamma = kv.get_double(prefix + "gamma", p.gamma);
      p.noise_frac = kv.get_double(prefix + "noise_frac", p.noise_frac);
      cfg.profiles.push_back(std::move(p));
    }
  }
  return cfg;
}

double noiseless_runtime(const AppProfile& profile, double c_gbl, double c_grp, Index num_groups,
                         int total_groups) {
  return profile.base_runtime *
         (1.0 + profile.alpha_gbl * c_gbl + profile.alpha_grp * c_grp +
          profile.gamma * static_cast<double>(num_groups) / static_cast<double>(total_groups));
}

namespace {

// Standard Aries-like tile layout: 15 row, 15 column, 10 global, 8 processor.
std::array<TileClass, kTilesPerRouter> default_tile_layout() {
  std::array<TileClass, kTilesPerRouter> tiles{};
  for (int i = 0; i < 15; ++i) tiles[i] = TileClass::Row;
  for (int i = 15; i < 30; ++i) tiles[i] = TileClass::Column;
  for (int i = 30; i < 40; ++i) tiles[i] = TileClass::Global;
  for (int i = 40; i < 48; ++i) tiles[i] = TileClass::Processor;
  return tiles;
}

std::string pad_number(int value, int width) {
  std::string s = std::to_string(value);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))),
                     '0') +
         s;
}

MachineSpec build_machine_spec(const SynthConfig& cfg) {
  MachineSpec spec;
  spec.routers_per_group = cfg.routers_per_group;
  spec.nodes_per_router = cfg.nodes_per_router;
  const auto tiles = default_tile_layout();
  const int compute_per_group =
      cfg.routers_per_group - cfg.io_routers_per_group - cfg.service_routers_per_group;
  for (int g = 0; g < cfg.groups; ++g) {
    const std::string group_id = "g" + pad_number(g, 2);
    spec.groups.push_back(group_id);
    for (int i = 0; i < cfg.routers_per_group; ++i) {
      Router r;
      r.id = group_id + "-r" + pad_number(i, 2);
      r.group = group_id;
      r.row = i % 16;
      r.col = (i / 16) % 6;
      r.kind = i < compute_per_group
                   ? RouterKind::Compute
                   : (i < compute_per_group + cfg.io_routers_per_group ? RouterKind::Io
                                                                       : RouterKind::Service);
      r.tiles = tiles;
      spec.routers.push_back(std::move(r));
      if (spec.routers.back().kind == RouterKind::Compute) {
        for (int n = 0; n < cfg.nodes_per_router; ++n)
          spec.nodes.emplace_back(spec.routers.back().id + "-n" + std::to_string(n),
                                  spec.routers.back().id);
      }
    }
  }
  return spec;
}

struct EpochState {
  double u_gbl = 0;  // shared severity per channel
  double u_grp = 0;
  std::vector<bool> active_gbl;  // per group
  std::vector<bool> active_grp;
};

}  // namespace

SynthDataset generate(const SynthConfig& cfg) {
  cfg.validate();

  SynthDataset ds;
  ds.window = cfg.window;
  ds.topology_spec = build_machine_spec(cfg);
  ds.machine = Machine::build(ds.topology_spec);
  const Machine& m = ds.machine;
  const Index n_routers = m.router_count();

  int total_jobs = 0;
  for (const AppProfile& p : cfg.profiles) total_jobs += p.n_jobs;
  ds.epochs = (total_jobs + cfg.jobs_per_epoch - 1) / cfg.jobs_per_epoch;

  // Independent deterministic streams per concern.
  std::mt19937_64 rng_traffic(cfg.seed ^ 0x7470636bULL);
  std::mt19937_64 rng_offsets(cfg.seed ^ 0x6f666673ULL);
  std::mt19937_64 rng_place(cfg.seed ^ 0x706c6163ULL);
  std::mt19937_64 rng_noise(cfg.seed ^ 0x6e6f6973ULL);

  // Burst states per epoch.
  const TrafficSpec& t = cfg.traffic;
  std::uniform_real_distribution<double> severity(t.severity_min, 1.0);
  std::bernoulli_distribution active(t.burst_probability);
  std::vector<EpochState> states(ds.epochs);
  for (EpochState& s : states) {
    s.u_gbl = severity(rng_traffic);
    s.u_grp = severity(rng_traffic);
    s.active_gbl.resize(cfg.groups);
    s.active_grp.resize(cfg.groups);
    for (int g = 0; g < cfg.groups; ++g) {
      s.active_gbl[g] = active(rng_traffic);
      s.active_grp[g] = active(rng_traffic);
    }
  }

  // Initial cumulative offsets, fixed iteration order.
  std::uniform_int_distribution<std::uint64_t> offset(0, 1'000'000'000ULL);
  std::vector<std::uint64_t> cumulative(
      static_cast<std::size_t>(n_routers) * kTilesPerRouter * nc::kRawCount, 0);
  auto key = [&](Index r, int tile, int c) {
    return (static_cast<std::size_t>(r) * kTilesPerRouter + tile) * nc::kRawCount + c;
  };
  for (Index r = 0; r < n_routers; ++r)
    for (int tile = 0; tile < kTilesPerRouter; ++tile) {
      auto [lo, hi] = CounterStream::counter_range(m.routers()[r].tiles[tile]);
      for (int c = lo; c < hi; ++c) cumulative[key(r, tile, c)] = offset(rng_offsets);
    }

  auto base_rate = [&](TileClass cls, int counter) -> double {
    if (cls == TileClass::Processor)
      return counter - nc::kNicBase < 4 ? t.nic_flit_rate : t.nic_stall_rate;
    if (counter == nc::kRowbusStall) return t.stall_rate;
    return counter < nc::kPktVcBase ? t.flit_rate : t.pkt_rate;
  };

  // Emit the t=0 baseline, then one cumulative sample per key per period.
  const auto emit_all = [&](std::int64_t when) {
    for (Index r = 0; r < n_routers; ++r)
      for (int tile = 0; tile < kTilesPerRouter; ++tile) {
        auto [lo, hi] = CounterStream::counter_range(m.routers()[r].tiles[tile]);
        for (int c = lo; c < hi; ++c)
          ds.stream.push_back({static_cast<std::int32_t>(r), static_cast<std::int16_t>(tile),
                               static_cast<std::int16_t>(c), when, cumulative[key(r, tile, c)]});
      }
  };
  emit_all(0);

  ds.epoch_tally.assign(ds.epochs, Matrix::Zero(n_routers, nc::kRawCount));
  const int slots_per_epoch = static_cast<int>(cfg.window / cfg.sample_period);
  const double period = static_cast<double>(cfg.sample_period);
  for (int e = 0; e < ds.epochs; ++e) {
    const EpochState& state = states[e];
    for (int slot = 0; slot < slots_per_epoch; ++slot) {
      // Burst occupies the first burst_duration seconds of the epoch.
      const double slot_start = static_cast<double>(slot) * period;
      const double overlap =
          std::clamp(t.burst_duration - slot_start, 0.0, period);
      for (Index r = 0; r < n_routers; ++r) {
        const Router& router = m.routers()[r];
        const int g = static_cast<int>(m.group_of_router(r));
        for (int tile = 0; tile < kTilesPerRouter; ++tile) {
          const TileClass cls = router.tiles[tile];
          double burst = 0;  // extra rate fraction from the active burst
          if (cls == TileClass::Global && state.active_gbl[g])
            burst = state.u_gbl;
          else if ((cls == TileClass::Row || cls == TileClass::Column) && state.active_grp[g])
            burst = state.u_grp;
          auto [lo, hi] = CounterStream::counter_range(cls);
          for (int c = lo; c < hi; ++c) {
            const double rate = base_rate(cls, c);
            const double expected =
                rate * (period + (t.burst_multiplier - 1.0) * burst * overlap);
            std::uint64_t count = 0;
            if (expected > 0) {
              std::poisson_distribution<std::uint64_t> pois(expected);
              count = pois(rng_traffic);
            }
            cumulative[key(r, tile, c)] += count;
            ds.epoch_tally[e](r, c) += static_cast<double>(count);
          }
        }
      }
      emit_all(static_cast<std::int64_t>(e) * cfg.window +
               static_cast<std::int64_t>(slot + 1) * cfg.sample_period);
    }
  }

  // Normalized per-group window intensities for the runtime law.
  auto group_intensity = [&](int e, int g, bool global) -> double {
    const EpochState& s = states[e];
    const bool on = global ? s.active_gbl[g] : s.active_grp[g];
    if (!on) return 0;
    const double u = global ? s.u_gbl : s.u_grp;
    return u * t.burst_duration / static_cast<double>(cfg.window);
  };

  // Jobs: profiles interleaved round-robin, jobs_per_epoch per window.
  std::vector<int> job_profile;
  {
    std::vector<int> remaining(cfg.profiles.size());
    for (std::size_t p = 0; p < cfg.profiles.size(); ++p) remaining[p] = cfg.profiles[p].n_jobs;
    while (static_cast<int>(job_profile.size()) < total_jobs) {
      for (std::size_t p = 0; p < cfg.profiles.size(); ++p) {
        if (remaining[p] > 0) {
          job_profile.push_back(static_cast<int>(p));
          --remaining[p];
        }
      }
    }
  }

  const int compute_per_group =
      cfg.routers_per_group - cfg.io_routers_per_group - cfg.service_routers_per_group;
  std::uniform_int_distribution<int> delta_dist(0, static_cast<int>(
                                                       std::min<std::int64_t>(60, cfg.window / 5)));
  const int id_width = std::max(4, static_cast<int>(std::to_string(total_jobs).size()));

  for (int j = 0; j < total_jobs; ++j) {
    const int e = j / cfg.jobs_per_epoch;
    const AppProfile& profile = cfg.profiles[job_profile[j]];

    // Placement: pick a group count, then routers within those groups.
    std::uniform_int_distribution<int> group_count(1, cfg.groups);
    const int kg = group_count(rng_place);
    std::vector<int> group_ids(cfg.groups);
    std::iota(group_ids.begin(), group_ids.end(), 0);
    std::shuffle(group_ids.begin(), group_ids.end(), rng_place);
    group_ids.resize(kg);
    std::sort(group_ids.begin(), group_ids.end());

    const int min_routers =
        std::max(kg, (profile.nodes_per_job + cfg.nodes_per_router - 1) / cfg.nodes_per_router);
    const int max_routers = std::min(compute_per_group * kg, profile.nodes_per_job);
    if (min_routers > max_routers)
      throw UsageError("synth profile " + profile.name + ": nodes_per_job incompatible with " +
                       std::to_string(kg) + " groups");
    std::uniform_int_distribution<int> router_count(min_routers, max_routers);
    const int n_job_routers = router_count(rng_place);

    // Compose the router count over groups, each group >= 1, <= capacity.
    std::vector<int> per_group(kg, 1);
    int left = n_job_routers - kg;
    while (left > 0) {
      std::uniform_int_distribution<int> pick(0, kg - 1);
      const int g = pick(rng_place);
      if (per_group[g] < compute_per_group) {
        ++per_group[g];
        --left;
      }
    }

    // Select routers per group and spread nodes round-robin.
    std::vector<Index> job_routers;
    for (int gi = 0; gi < kg; ++gi) {
      std::vector<int> local(compute_per_group);
      std::iota(local.begin(), local.end(), 0);
      std::shuffle(local.begin(), local.end(), rng_place);
      for (int i = 0; i < per_group[gi]; ++i) {
        const std::string rid =
            "g" + pad_number(group_ids[gi], 2) + "-r" + pad_number(local[i], 2);
        job_routers.push_back(m.router_index(rid));
      }
    }
    std::sort(job_routers.begin(), job_routers.end());

    JobRecord job;
    job.job_id = "job" + pad_number(j, id_width);
    job.app = profile.name;
    job.start_time = static_cast<std::int64_t>(e + 1) * cfg.window + delta_dist(rng_place);
    int next_node = 0;
    while (static_cast<int>(job.nodes.size()) < profile.nodes_per_job) {
      for (Index r : job_routers) {
        if (static_cast<int>(job.nodes.size()) >= profile.nodes_per_job) break;
        job.nodes.push_back(m.routers()[r].id + "-n" + std::to_string(next_node));
      }
      ++next_node;
    }
    job.node_count = static_cast<int>(job.nodes.size());

    GroundTruthRow truth;
    truth.job_id = job.job_id;
    for (Index r : job_routers) {
      const int g = static_cast<int>(m.group_of_router(r));
      truth.c_gbl += group_intensity(e, g, true);
      truth.c_grp += group_intensity(e, g, false);
    }
    truth.c_gbl /= static_cast<double>(job_routers.size());
    truth.c_grp /= static_cast<double>(job_routers.size());
    truth.num_groups = kg;
    truth.noiseless_runtime =
        noiseless_runtime(profile, truth.c_gbl, truth.c_grp, kg, cfg.groups);
    std::normal_distribution<double> noise(0.0, profile.noise_frac * profile.base_runtime);
    truth.runtime = truth.noiseless_runtime + (profile.noise_frac > 0 ? noise(rng_noise) : 0.0);
    if (truth.runtime <= 0)
      throw NumericError("synth: profile " + profile.name + " produced nonpositive runtime");
    job.exec_time = truth.runtime;

    ds.jobs.push_back(std::move(job));
    ds.truth.push_back(std::move(truth));
  }
  return ds;
}

void PlantedConfig::validate() const {
  if (rows < 10) throw UsageError("planted dataset: needs >= 10 rows");
  if (base <= 0) throw UsageError("planted dataset: base must be > 0");
  if (noise_std < 0) throw UsageError("planted dataset: noise_std must be >= 0");
}

FeatureMatrix planted_importance_dataset(const PlantedConfig& cfg) {
  cfg.validate();
  FeatureMatrix fm;
  fm.feature_names.assign(nc::derived_names().begin(), nc::derived_names().end());
  fm.feature_names.emplace_back(nc::kNumRouters);
  fm.feature_names.emplace_back(nc::kNumGroups);

  std::vector<Index> signal_cols;
  for (const std::string& name : cfg.signal_features) {
    auto it = std::find(fm.feature_names.begin(), fm.feature_names.end(), name);
    if (it == fm.feature_names.end())
      throw UsageError("planted dataset: unknown signal feature " + name);
    signal_cols.push_back(it - fm.feature_names.begin());
  }

  const Index dims = static_cast<Index>(fm.feature_names.size());
  std::mt19937_64 rng(cfg.seed ^ 0x706c6e74ULL);
  std::normal_distribution<double> normal(0.0, 1.0);

  fm.X.resize(cfg.rows, dims);
  fm.y.resize(cfg.rows);
  const int id_width = std::max(4, static_cast<int>(std::to_string(cfg.rows).size()));
  for (Index i = 0; i < cfg.rows; ++i) {
    for (Index j = 0; j < dims; ++j) fm.X(i, j) = normal(rng);
    double y = cfg.base;
    for (Index j : signal_cols) y += cfg.signal_weight * fm.X(i, j);
    y += cfg.noise_std * normal(rng);
    if (y <= 0)
      throw NumericError("planted dataset: nonpositive target; lower signal_weight or noise");
    fm.y[i] = y;
    fm.job_ids.push_back("p" + pad_number(static_cast<int>(i), id_width));
    fm.apps.push_back("planted");
  }
  fm.validate();
  return fm;
}

}  // namespace dfpred
