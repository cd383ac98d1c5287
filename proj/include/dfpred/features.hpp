#pragma once

#include <span>
#include <string>
#include <vector>

#include "dfpred/ingest.hpp"
#include "dfpred/topology.hpp"
#include "dfpred/types.hpp"

namespace dfpred {

/// The 8 VC/NIC-derived counters (RT_FLIT_REQ/RSP, RT_PKT_REQ/RSP,
/// PT_FLIT_REQ/RSP, PT_STL_REQ/RSP), indexed by DerivedCounter; link-type
/// slots are left at 0.
Eigen::Matrix<double, counters::kDerivedCount, 1> derive_vc_counters(
    const RawRouterFeatures& raw);

struct LinkTypeSums {
  double flit_row = 0, flit_col = 0, flit_gbl = 0;
  double stl_row = 0, stl_col = 0, stl_gbl = 0;
};

/// Total incoming flits (all VCs) and rowbus stalls summed over the tiles of
/// each link class of one router. A class with zero tiles yields 0.
LinkTypeSums derive_linktype_counters(const Machine& m, const RouterTileDeltas& deltas);

/// All 14 derived counters for one router.
Eigen::Matrix<double, counters::kDerivedCount, 1> derive_router_features(
    const Machine& m, const RouterTileDeltas& deltas);

enum class AggFn { Mean, Std, Median, P75, P95, Iqr };

AggFn agg_from_string(std::string_view s);
std::string_view to_string(AggFn fn);

/// Type-7 percentile: linear interpolation between order statistics.
/// p in [0,1]; the input need not be sorted.
double percentile(ConstVectorRef values, double p);

/// Applies the aggregation function to a nonempty value vector.
/// Std is the population standard deviation; Iqr = p75 - p25.
double aggregate(ConstVectorRef values, AggFn fn);

enum class FeatureKind { Raw, Derived };

FeatureKind feature_kind_from_string(std::string_view s);
std::string_view to_string(FeatureKind k);

/// One row per job: aggregated counters plus NUM_ROUTERS and NUM_GROUPS,
/// with the measured execution time as target.
struct FeatureMatrix {
  std::vector<std::string> feature_names;
  std::vector<std::string> job_ids;
  std::vector<std::string> apps;
  Matrix X;  // n x d
  Vector y;  // n

  Index rows() const { return X.rows(); }
  Index cols() const { return X.cols(); }
  Index feature_index(std::string_view name) const;  // throws DataError if absent

  /// Row subset by position, preserving order.
  FeatureMatrix select_rows(std::span<const Index> rows) const;
  /// Rows whose app label matches.
  FeatureMatrix filter_app(std::string_view app) const;
  /// Column subset by feature name.
  FeatureMatrix select_features(std::span<const std::string> names) const;

  void validate() const;  // shapes consistent, all values finite
};

/// Builds the per-job feature matrix from extracted windows. The router set
/// follows the selector (per-job for MyRouters); `fn` aggregates each counter
/// column over that set. Jobs present in `jobs` but absent from the
/// extraction (and not listed as skipped) raise DataError. Rows are ordered
/// by job_id.
FeatureMatrix build_feature_matrix(const Machine& m, std::span<const JobRecord> jobs,
                                   const ExtractionReport& extraction, RouterSelector selector,
                                   AggFn fn, FeatureKind kind);

/// Per-feature and target centering/scaling vectors fitted on training rows.
struct Standardizer {
  Vector mean;
  Vector std;  // population std; constant columns recorded as 1
  double target_mean = 0;
  double target_std = 1;
};

/// Fits means and population standard deviations on the training rows
/// (features and targets). Requires >= 2 rows. Constant columns store std 1,
/// so their standardized value is exactly 0.
Standardizer fit_standardizer(const Matrix& X, const Vector& y);

Matrix apply_standardizer(const Standardizer& s, const Matrix& X);
Vector standardize_targets(const Standardizer& s, const Vector& y);

/// y = z * target_std + target_mean. Throws NumericError if target_std == 0.
Vector destandardize_predictions(const Standardizer& s, const Vector& z);

}  // namespace dfpred
