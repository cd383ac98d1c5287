#include <doctest.h>

#include <map>
#include <set>

#include "dfpred/io.hpp"
#include "dfpred/synth.hpp"

using namespace dfpred;
namespace nc = dfpred::counters;

namespace {

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.seed = 7;
  cfg.groups = 2;
  cfg.routers_per_group = 4;
  cfg.io_routers_per_group = 1;
  cfg.service_routers_per_group = 1;
  cfg.jobs_per_epoch = 4;
  cfg.profiles = {
      {"p0", 6, 4, 300.0, 0.06, 0.036, 0.03, 0.02},
      {"p1", 6, 4, 330.0, 0.09, 0.054, 0.045, 0.02},
  };
  cfg.traffic.flit_rate = 5;
  cfg.traffic.pkt_rate = 2;
  cfg.traffic.stall_rate = 3;
  return cfg;
}

}  // namespace

TEST_CASE("zero bursts and zero noise reduce the law to the placement term") {
  SynthConfig cfg = small_config();
  cfg.traffic.burst_probability = 0;
  for (auto& p : cfg.profiles) p.noise_frac = 0;
  SynthDataset ds = generate(cfg);
  REQUIRE(ds.jobs.size() == 12);
  for (std::size_t i = 0; i < ds.jobs.size(); ++i) {
    const GroundTruthRow& t = ds.truth[i];
    CHECK(t.c_gbl == 0);
    CHECK(t.c_grp == 0);
    const AppProfile& profile = ds.jobs[i].app == "p0" ? cfg.profiles[0] : cfg.profiles[1];
    const double expected =
        profile.base_runtime *
        (1.0 + profile.gamma * static_cast<double>(t.num_groups) / cfg.groups);
    CHECK(ds.jobs[i].exec_time == doctest::Approx(expected).epsilon(1e-12));
    CHECK(t.noiseless_runtime == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ds.jobs[i].exec_time == t.runtime);

    // num_groups in the truth table matches the placement features.
    auto placement = placement_features(ds.machine, ds.jobs[i].nodes);
    CHECK(placement.num_groups == t.num_groups);
  }
}

TEST_CASE("the runtime law is monotone in congestion") {
  AppProfile p{"x", 1, 4, 300.0, 0.1, 0.05, 0.02, 0.0};
  const double low = noiseless_runtime(p, 0.2, 0.1, 2, 4);
  const double high = noiseless_runtime(p, 0.4, 0.1, 2, 4);
  CHECK(high > low);
  CHECK(noiseless_runtime(p, 0, 0, 4, 4) > noiseless_runtime(p, 0, 0, 1, 4));
}

TEST_CASE("generated counters are cumulative and nondecreasing per key") {
  SynthDataset ds = generate(small_config());
  std::map<std::tuple<int, int, int>, std::pair<std::int64_t, std::uint64_t>> last;
  for (const auto& s : ds.stream) {
    auto key = std::make_tuple(static_cast<int>(s.router), static_cast<int>(s.tile),
                               static_cast<int>(s.counter));
    auto it = last.find(key);
    if (it != last.end()) {
      CHECK(s.t > it->second.first);
      CHECK(s.v >= it->second.second);
    }
    last[key] = {s.t, s.v};
  }
}

TEST_CASE("generation is deterministic per seed") {
  SynthConfig cfg = small_config();
  SynthDataset a = generate(cfg);
  SynthDataset b = generate(cfg);
  REQUIRE(a.stream.size() == b.stream.size());
  for (std::size_t i = 0; i < a.stream.size(); ++i) {
    CHECK(a.stream[i].v == b.stream[i].v);
    CHECK(a.stream[i].t == b.stream[i].t);
  }
  for (std::size_t i = 0; i < a.jobs.size(); ++i) {
    CHECK(a.jobs[i].exec_time == b.jobs[i].exec_time);
    CHECK(a.jobs[i].nodes == b.jobs[i].nodes);
    CHECK(a.jobs[i].start_time == b.jobs[i].start_time);
  }

  cfg.seed = 8;
  SynthDataset c = generate(cfg);
  bool any_difference = false;
  for (std::size_t i = 0; i < std::min(a.stream.size(), c.stream.size()); ++i)
    if (a.stream[i].v != c.stream[i].v) any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("pipeline round trip reproduces the generator tally exactly") {
  SynthConfig cfg = small_config();
  cfg.sample_period = 150;  // two emission slots per window
  SynthDataset ds = generate(cfg);
  CounterStream stream = CounterStream::index_compact(ds.stream, ds.machine);
  auto report = extract_job_windows(stream, ds.jobs, ds.machine);
  REQUIRE(report.skipped.empty());
  REQUIRE(report.jobs.size() == ds.jobs.size());

  for (const JobRecord& job : ds.jobs) {
    const int epoch = static_cast<int>(job.start_time / ds.window) - 1;
    REQUIRE(epoch >= 0);
    const JobWindowFeatures& w = *report.find(job.job_id);
    const Matrix& tally = ds.epoch_tally[epoch];
    for (Index r = 0; r < ds.machine.router_count(); ++r)
      for (int c = 0; c < nc::kRawCount; ++c) CHECK(w.raw(r, c) == tally(r, c));
  }
}

TEST_CASE("profile interleaving and epoch spacing") {
  SynthDataset ds = generate(small_config());
  // 12 jobs, 4 per epoch, 3 epochs; starts land within the grace offset.
  std::set<int> epochs;
  for (const JobRecord& job : ds.jobs) {
    const std::int64_t offset = job.start_time % 300;
    CHECK(offset >= 0);
    CHECK(offset <= 60);
    epochs.insert(static_cast<int>(job.start_time / 300) - 1);
  }
  CHECK(epochs.size() == 3);
  int p0 = 0;
  for (const JobRecord& job : ds.jobs) p0 += job.app == "p0";
  CHECK(p0 == 6);
}

TEST_CASE("synth config validation") {
  SynthConfig cfg = small_config();
  cfg.sample_period = 7;  // does not divide the window
  CHECK_THROWS_AS(cfg.validate(), UsageError);

  cfg = small_config();
  cfg.traffic.burst_probability = 1.5;
  CHECK_THROWS_AS(cfg.validate(), UsageError);

  cfg = small_config();
  cfg.profiles[0].nodes_per_job = 1000;  // beyond machine capacity
  CHECK_THROWS_AS(cfg.validate(), UsageError);

  cfg = small_config();
  cfg.io_routers_per_group = 4;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("synth config from key=value text") {
  KeyValueConfig kv = KeyValueConfig::parse_string(
      "seed = 99\n"
      "groups = 3\n"
      "routers_per_group = 8\n"
      "jobs_per_epoch = 5\n"
      "[traffic]\n"
      "flit_rate = 11.5\n"
      "burst_probability = 0.25\n"
      "[profile.solver]\n"
      "n_jobs = 20\n"
      "base_runtime = 450\n"
      "alpha_gbl = 0.2\n"
      "[profile.graph]\n"
      "n_jobs = 10\n");
  SynthConfig cfg = SynthConfig::from_config(kv);
  CHECK(cfg.seed == 99);
  CHECK(cfg.groups == 3);
  CHECK(cfg.routers_per_group == 8);
  CHECK(cfg.jobs_per_epoch == 5);
  CHECK(cfg.traffic.flit_rate == 11.5);
  CHECK(cfg.traffic.burst_probability == 0.25);
  REQUIRE(cfg.profiles.size() == 2);
  CHECK(cfg.profiles[0].name == "graph");  // sorted subsection order
  CHECK(cfg.profiles[1].name == "solver");
  CHECK(cfg.profiles[1].n_jobs == 20);
  CHECK(cfg.profiles[1].base_runtime == 450);
  CHECK(cfg.profiles[1].alpha_gbl == 0.2);
  CHECK(cfg.profiles[0].n_jobs == 10);
  CHECK(cfg.profiles[0].base_runtime == 300);  // profile field default
}

TEST_CASE("planted dataset carries signal only on the named features") {
  PlantedConfig cfg;
  cfg.seed = 5;
  cfg.rows = 400;
  cfg.signal_features = {"RT_STL_GBL", "NUM_GROUPS"};
  FeatureMatrix fm = planted_importance_dataset(cfg);
  CHECK(fm.rows() == 400);
  CHECK(fm.cols() == 16);
  fm.validate();
  for (Index i = 0; i < fm.rows(); ++i) CHECK(fm.y[i] > 0);

  // Correlation with the signal columns dominates the noise columns.
  auto corr = [&](Index col) {
    const Vector x = fm.X.col(col).array() - fm.X.col(col).mean();
    const Vector y = fm.y.array() - fm.y.mean();
    return std::abs(x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm()));
  };
  const double signal = corr(fm.feature_index("RT_STL_GBL"));
  const double noise = corr(fm.feature_index("RT_FLIT_ROW"));
  CHECK(signal > 0.5);
  CHECK(noise < 0.2);

  FeatureMatrix again = planted_importance_dataset(cfg);
  CHECK(fm.X == again.X);
  CHECK(fm.y == again.y);

  PlantedConfig bad = cfg;
  bad.signal_features = {"NOT_A_FEATURE"};
  CHECK_THROWS_AS(planted_importance_dataset(bad), UsageError);
}
