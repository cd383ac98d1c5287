#include "dfpred/counters.hpp"

#include <algorithm>
#include <unordered_map>

namespace dfpred::counters {

const std::array<std::string, kRawCount>& raw_names() {
  static const std::array<std::string, kRawCount> names = [] {
    std::array<std::string, kRawCount> n;
    for (int v = 0; v < kNumVcs; ++v) {
      n[kFlitVcBase + v] = "AR_RTR_INQ_PRF_INCOMING_FLIT_VC" + std::to_string(v);
      n[kPktVcBase + v] = "AR_RTR_INQ_PRF_INCOMING_PKT_VC" + std::to_string(v);
    }
    n[kRowbusStall] = "AR_RTR_INQ_PRF_ROWBUS_STALL_CNT";
    n[kNicBase + kReqNicToPtFlits] = "AR_NL_PRF_REQ_NIC_TO_PTILES_FLITS";
    n[kNicBase + kReqPtToNicFlits] = "AR_NL_PRF_REQ_PTILES_TO_NIC_FLITS";
    n[kNicBase + kRspNicToPtFlits] = "AR_NL_PRF_RSP_NIC_TO_PTILES_FLITS";
    n[kNicBase + kRspPtToNicFlits] = "AR_NL_PRF_RSP_PTILES_TO_NIC_FLITS";
    n[kNicBase + kReqNicToPtStalled] = "AR_NL_PRF_REQ_NIC_TO_PTILES_STALLED";
    n[kNicBase + kReqPtToNicStalled] = "AR_NL_PRF_REQ_PTILES_TO_NIC_STALLED";
    n[kNicBase + kRspNicToPtStalled] = "AR_NL_PRF_RSP_NIC_TO_PTILES_STALLED";
    n[kNicBase + kRspPtToNicStalled] = "AR_NL_PRF_RSP_PTILES_TO_NIC_STALLED";
    return n;
  }();
  return names;
}

const std::array<std::string, kDerivedCount>& derived_names() {
  static const std::array<std::string, kDerivedCount> names = {
      "PT_FLIT_REQ", "PT_FLIT_RSP", "PT_STL_REQ", "PT_STL_RSP",
      "RT_FLIT_COL", "RT_FLIT_GBL", "RT_FLIT_REQ", "RT_FLIT_ROW",
      "RT_FLIT_RSP", "RT_PKT_REQ",  "RT_PKT_RSP",  "RT_STL_COL",
      "RT_STL_GBL",  "RT_STL_ROW"};
  return names;
}

namespace {

std::unordered_map<std::string_view, int> make_index(const auto& names) {
  std::unordered_map<std::string_view, int> m;
  for (int i = 0; i < static_cast<int>(names.size()); ++i) m.emplace(names[i], i);
  return m;
}

}  // namespace

int raw_index(std::string_view name) {
  static const auto index = make_index(raw_names());
  auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

int derived_index(std::string_view name) {
  static const auto index = make_index(derived_names());
  auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

const std::vector<std::string>& raw_feature_order() {
  static const std::vector<std::string> order = [] {
    std::vector<std::string> v(raw_names().begin(), raw_names().end());
    std::sort(v.begin(), v.end());
    return v;
  }();
  return order;
}

}  // namespace dfpred::counters
