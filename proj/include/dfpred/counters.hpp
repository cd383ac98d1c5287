#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace dfpred::counters {

// Raw per-tile hardware counters. Router tiles carry the 17 inq/rowbus
// counters, processor tiles carry the 8 NIC counters. Storage order is
// fixed and shared by the whole pipeline:
//   [0..7]   INCOMING_FLIT_VC0..7
//   [8..15]  INCOMING_PKT_VC0..7   (per-VC stall cycles)
//   [16]     ROWBUS_STALL_CNT
//   [17..24] NIC request/response flit and stall counters
inline constexpr int kNumVcs = 8;
inline constexpr int kFlitVcBase = 0;
inline constexpr int kPktVcBase = 8;
inline constexpr int kRowbusStall = 16;
inline constexpr int kNicBase = 17;
inline constexpr int kRouterTileCounters = 17;
inline constexpr int kProcTileCounters = 8;
inline constexpr int kRawCount = 25;
inline constexpr int kDerivedCount = 14;

// NIC counter slots relative to kNicBase.
enum NicCounter : int {
  kReqNicToPtFlits = 0,
  kReqPtToNicFlits = 1,
  kRspNicToPtFlits = 2,
  kRspPtToNicFlits = 3,
  kReqNicToPtStalled = 4,
  kReqPtToNicStalled = 5,
  kRspNicToPtStalled = 6,
  kRspPtToNicStalled = 7,
};

// Derived counters, stored in alphabetical order of their abbreviations.
enum DerivedCounter : int {
  kPtFlitReq = 0,
  kPtFlitRsp = 1,
  kPtStlReq = 2,
  kPtStlRsp = 3,
  kRtFlitCol = 4,
  kRtFlitGbl = 5,
  kRtFlitReq = 6,
  kRtFlitRow = 7,
  kRtFlitRsp = 8,
  kRtPktReq = 9,
  kRtPktRsp = 10,
  kRtStlCol = 11,
  kRtStlGbl = 12,
  kRtStlRow = 13,
};

/// Canonical raw counter names in storage order.
const std::array<std::string, kRawCount>& raw_names();

/// Derived counter abbreviations in storage (alphabetical) order.
const std::array<std::string, kDerivedCount>& derived_names();

/// Index of a raw counter name in storage order, or -1 if unknown.
int raw_index(std::string_view name);

/// Index of a derived abbreviation in storage order, or -1 if unknown.
int derived_index(std::string_view name);

/// True if the raw slot lives on router tiles (as opposed to processor tiles).
inline bool is_router_tile_counter(int raw_idx) { return raw_idx < kNicBase; }

/// Raw counter names sorted alphabetically, the feature-matrix column order.
const std::vector<std::string>& raw_feature_order();

inline constexpr std::string_view kNumRouters = "NUM_ROUTERS";
inline constexpr std::string_view kNumGroups = "NUM_GROUPS";

}  // namespace dfpred::counters
