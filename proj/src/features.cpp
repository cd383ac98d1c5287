#include "dfpred/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace dfpred {

namespace nc = counters;

Eigen::Matrix<double, nc::kDerivedCount, 1> derive_vc_counters(const RawRouterFeatures& raw) {
  if (!raw.values.allFinite()) throw DataError("derive_vc_counters: non-finite raw entry");
  Eigen::Matrix<double, nc::kDerivedCount, 1> d = Eigen::Matrix<double, nc::kDerivedCount, 1>::Zero();
  for (int v = 0; v < 4; ++v) {
    d[nc::kRtFlitReq] += raw.values[nc::kFlitVcBase + v];
    d[nc::kRtFlitRsp] += raw.values[nc::kFlitVcBase + 4 + v];
    d[nc::kRtPktReq] += raw.values[nc::kPktVcBase + v];
    d[nc::kRtPktRsp] += raw.values[nc::kPktVcBase + 4 + v];
  }
  const auto nic = [&](int c) { return raw.values[nc::kNicBase + c]; };
  d[nc::kPtFlitReq] = nic(nc::kReqNicToPtFlits) + nic(nc::kReqPtToNicFlits);
  d[nc::kPtFlitRsp] = nic(nc::kRspNicToPtFlits) + nic(nc::kRspPtToNicFlits);
  d[nc::kPtStlReq] = nic(nc::kReqNicToPtStalled) + nic(nc::kReqPtToNicStalled);
  d[nc::kPtStlRsp] = nic(nc::kRspNicToPtStalled) + nic(nc::kRspPtToNicStalled);
  return d;
}

LinkTypeSums derive_linktype_counters(const Machine& m, const RouterTileDeltas& deltas) {
  const Router& router = m.routers()[deltas.router];
  LinkTypeSums sums;
  for (int tile = 0; tile < kTilesPerRouter; ++tile) {
    if (!deltas.tile_present[tile]) continue;
    TileClass cls = router.tiles[tile];
    if (cls == TileClass::Processor) continue;
    double flits = 0;
    for (int v = 0; v < nc::kNumVcs; ++v) flits += deltas.values(tile, nc::kFlitVcBase + v);
    double stalls = deltas.values(tile, nc::kRowbusStall);
    switch (cls) {
      case TileClass::Row: sums.flit_row += flits; sums.stl_row += stalls; break;
      case TileClass::Column: sums.flit_col += flits; sums.stl_col += stalls; break;
      case TileClass::Global: sums.flit_gbl += flits; sums.stl_gbl += stalls; break;
      case TileClass::Processor: break;
    }
  }
  return sums;
}

Eigen::Matrix<double, nc::kDerivedCount, 1> derive_router_features(const Machine& m,
                                                                   const RouterTileDeltas& deltas) {
  auto d = derive_vc_counters(reduce_tiles(m, deltas, /*tolerant=*/true));
  LinkTypeSums link = derive_linktype_counters(m, deltas);
  d[nc::kRtFlitRow] = link.flit_row;
  d[nc::kRtFlitCol] = link.flit_col;
  d[nc::kRtFlitGbl] = link.flit_gbl;
  d[nc::kRtStlRow] = link.stl_row;
  d[nc::kRtStlCol] = link.stl_col;
  d[nc::kRtStlGbl] = link.stl_gbl;
  return d;
}

AggFn agg_from_string(std::string_view s) {
  if (s == "mean") return AggFn::Mean;
  if (s == "std") return AggFn::Std;
  if (s == "median") return AggFn::Median;
  if (s == "p75") return AggFn::P75;
  if (s == "p95") return AggFn::P95;
  if (s == "iqr") return AggFn::Iqr;
  throw UsageError("unknown aggregation function: " + std::string(s));
}

std::string_view to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Mean: return "mean";
    case AggFn::Std: return "std";
    case AggFn::Median: return "median";
    case AggFn::P75: return "p75";
    case AggFn::P95: return "p95";
    case AggFn::Iqr: return "iqr";
  }
  return "?";
}

double percentile(ConstVectorRef values, double p) {
  if (values.size() == 0) throw DataError("percentile of empty vector");
  std::vector<double> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  const double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double aggregate(ConstVectorRef values, AggFn fn) {
  if (values.size() == 0) throw DataError("aggregate over empty router set");
  switch (fn) {
    case AggFn::Mean:
      return values.mean();
    case AggFn::Std: {
      const double mean = values.mean();
      return std::sqrt((values.array() - mean).square().mean());
    }
    case AggFn::Median: return percentile(values, 0.5);
    case AggFn::P75: return percentile(values, 0.75);
    case AggFn::P95: return percentile(values, 0.95);
    case AggFn::Iqr: return percentile(values, 0.75) - percentile(values, 0.25);
  }
  throw UsageError("invalid aggregation function");
}

FeatureKind feature_kind_from_string(std::string_view s) {
  if (s == "raw") return FeatureKind::Raw;
  if (s == "derived") return FeatureKind::Derived;
  throw UsageError("unknown feature kind: " + std::string(s));
}

std::string_view to_string(FeatureKind k) {
  return k == FeatureKind::Raw ? "raw" : "derived";
}

Index FeatureMatrix::feature_index(std::string_view name) const {
  for (Index i = 0; i < static_cast<Index>(feature_names.size()); ++i)
    if (feature_names[i] == name) return i;
  throw DataError("feature not present in matrix: " + std::string(name));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const Index> rows) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.X.resize(static_cast<Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Index>(rows.size()));
  out.job_ids.reserve(rows.size());
  out.apps.reserve(rows.size());
  Index i = 0;
  for (Index r : rows) {
    out.X.row(i) = X.row(r);
    out.y[i] = y[r];
    out.job_ids.push_back(job_ids[r]);
    out.apps.push_back(apps[r]);
    ++i;
  }
  return out;
}

FeatureMatrix FeatureMatrix::filter_app(std::string_view app) const {
  std::vector<Index> rows;
  for (Index i = 0; i < this->rows(); ++i)
    if (apps[i] == app) rows.push_back(i);
  return select_rows(rows);
}

FeatureMatrix FeatureMatrix::select_features(std::span<const std::string> names) const {
  FeatureMatrix out;
  out.job_ids = job_ids;
  out.apps = apps;
  out.y = y;
  out.feature_names.assign(names.begin(), names.end());
  out.X.resize(X.rows(), static_cast<Index>(names.size()));
  for (Index j = 0; j < static_cast<Index>(names.size()); ++j)
    out.X.col(j) = X.col(feature_index(names[j]));
  return out;
}

void FeatureMatrix::validate() const {
  if (X.rows() != y.size() || X.rows() != static_cast<Index>(job_ids.size()) ||
      X.rows() != static_cast<Index>(apps.size()))
    throw DataError("feature matrix row counts inconsistent");
  if (X.cols() != static_cast<Index>(feature_names.size()))
    throw DataError("feature matrix column count does not match names");
  if (!X.allFinite() || !y.allFinite())
    throw DataError("feature matrix contains missing or non-finite values");
}

FeatureMatrix build_feature_matrix(const Machine& m, std::span<const JobRecord> jobs,
                                   const ExtractionReport& extraction, RouterSelector selector,
                                   AggFn fn, FeatureKind kind) {
  const std::vector<std::string>& counter_cols =
      kind == FeatureKind::Raw
          ? nc::raw_feature_order()
          : std::vector<std::string>(nc::derived_names().begin(), nc::derived_names().end());
  const Index n_counters = static_cast<Index>(counter_cols.size());

  // Map from feature-matrix column to storage column in the window matrices.
  std::vector<int> storage_col(n_counters);
  for (Index j = 0; j < n_counters; ++j)
    storage_col[j] = kind == FeatureKind::Raw ? nc::raw_index(counter_cols[j])
                                              : nc::derived_index(counter_cols[j]);

  std::set<std::string> skipped_ids;
  for (const auto& skip : extraction.skipped) skipped_ids.insert(skip.job_id);

  std::vector<const JobRecord*> used;
  for (const JobRecord& job : jobs) {
    if (skipped_ids.contains(job.job_id)) continue;
    if (extraction.find(job.job_id) == nullptr)
      throw DataError("job " + job.job_id + " has no extracted window features");
    used.push_back(&job);
  }
  std::sort(used.begin(), used.end(),
            [](const JobRecord* a, const JobRecord* b) { return a->job_id < b->job_id; });

  std::vector<Index> fixed_set;
  if (selector != RouterSelector::MyRouters) fixed_set = select_router_group(m, selector);

  FeatureMatrix fm;
  fm.feature_names = counter_cols;
  fm.feature_names.emplace_back(nc::kNumRouters);
  fm.feature_names.emplace_back(nc::kNumGroups);
  fm.X.resize(static_cast<Index>(used.size()), n_counters + 2);
  fm.y.resize(static_cast<Index>(used.size()));

  Vector column(m.router_count());
  for (Index i = 0; i < static_cast<Index>(used.size()); ++i) {
    const JobRecord& job = *used[i];
    const JobWindowFeatures& w = *extraction.find(job.job_id);
    const Matrix& values = kind == FeatureKind::Raw ? w.raw : w.derived;
    const std::vector<Index> routers = selector == RouterSelector::MyRouters
                                           ? routers_for_job(m, job.nodes)
                                           : fixed_set;
    if (routers.empty()) throw DataError("empty router set for selector");
    column.resize(static_cast<Index>(routers.size()));
    for (Index j = 0; j < n_counters; ++j) {
      for (Index k = 0; k < static_cast<Index>(routers.size()); ++k)
        column[k] = values(routers[k], storage_col[j]);
      fm.X(i, j) = aggregate(column, fn);
    }
    PlacementFeatures placement = placement_features(m, job.nodes);
    fm.X(i, n_counters) = static_cast<double>(placement.num_routers);
    fm.X(i, n_counters + 1) = static_cast<double>(placement.num_groups);
    fm.y[i] = job.exec_time;
    fm.job_ids.push_back(job.job_id);
    fm.apps.push_back(job.app);
  }
  fm.validate();
  return fm;
}

Standardizer fit_standardizer(const Matrix& X, const Vector& y) {
  if (X.rows() < 2) throw DataError("fit_standardizer requires at least 2 rows");
  if (X.rows() != y.size()) throw DataError("fit_standardizer: X/y row mismatch");
  Standardizer s;
  s.mean = X.colwise().mean();
  s.std.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const double var = (X.col(j).array() - s.mean[j]).square().mean();
    const double sd = std::sqrt(var);
    s.std[j] = sd > 0 ? sd : 1.0;
  }
  s.target_mean = y.mean();
  const double tvar = (y.array() - s.target_mean).square().mean();
  const double tsd = std::sqrt(tvar);
  s.target_std = tsd > 0 ? tsd : 1.0;
  return s;
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& X) {
  if (X.cols() != s.mean.size()) throw DataError("apply_standardizer: column count mismatch");
  return (X.rowwise() - s.mean.transpose()).array().rowwise() / s.std.transpose().array();
}

Vector standardize_targets(const Standardizer& s, const Vector& y) {
  return (y.array() - s.target_mean) / s.target_std;
}

Vector destandardize_predictions(const Standardizer& s, const Vector& z) {
  if (s.target_std == 0) throw NumericError("destandardize_predictions: zero target std");
  return z.array() * s.target_std + s.target_mean;
}

}  // namespace dfpred
