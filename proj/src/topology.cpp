#include "dfpred/topology.hpp"

#include <algorithm>
#include <set>

namespace dfpred {

TileClass tile_class_from_string(std::string_view s) {
  if (s == "row") return TileClass::Row;
  if (s == "column" || s == "col") return TileClass::Column;
  if (s == "global") return TileClass::Global;
  if (s == "processor") return TileClass::Processor;
  throw DataError("unknown tile class: " + std::string(s));
}

std::string_view to_string(TileClass c) {
  switch (c) {
    case TileClass::Row: return "row";
    case TileClass::Column: return "column";
    case TileClass::Global: return "global";
    case TileClass::Processor: return "processor";
  }
  return "?";
}

RouterKind router_kind_from_string(std::string_view s) {
  if (s == "compute") return RouterKind::Compute;
  if (s == "io") return RouterKind::Io;
  if (s == "service") return RouterKind::Service;
  throw DataError("unknown router kind: " + std::string(s));
}

std::string_view to_string(RouterKind k) {
  switch (k) {
    case RouterKind::Compute: return "compute";
    case RouterKind::Io: return "io";
    case RouterKind::Service: return "service";
  }
  return "?";
}

RouterSelector selector_from_string(std::string_view s) {
  if (s == "all" || s == "all_compute") return RouterSelector::AllCompute;
  if (s == "my" || s == "my_routers") return RouterSelector::MyRouters;
  if (s == "io") return RouterSelector::Io;
  throw UsageError("unknown router selector: " + std::string(s));
}

std::string_view to_string(RouterSelector s) {
  switch (s) {
    case RouterSelector::AllCompute: return "all";
    case RouterSelector::MyRouters: return "my";
    case RouterSelector::Io: return "io";
  }
  return "?";
}

Machine Machine::build(const MachineSpec& spec) {
  Machine m;
  m.routers_per_group_ = spec.routers_per_group;
  m.nodes_per_router_ = spec.nodes_per_router;
  if (spec.routers_per_group < 1 || spec.routers_per_group > 96)
    throw DataError("routers_per_group must be in 1..96");
  if (spec.nodes_per_router < 1) throw DataError("nodes_per_router must be >= 1");

  m.groups_ = spec.groups;
  for (Index g = 0; g < static_cast<Index>(m.groups_.size()); ++g) {
    if (!m.group_index_.emplace(m.groups_[g], g).second)
      throw DataError("duplicate group id: " + m.groups_[g]);
  }

  m.routers_ = spec.routers;
  m.router_group_.resize(m.routers_.size());
  std::vector<Index> group_population(m.groups_.size(), 0);
  for (Index r = 0; r < static_cast<Index>(m.routers_.size()); ++r) {
    const Router& router = m.routers_[r];
    if (!m.router_index_.emplace(router.id, r).second)
      throw DataError("duplicate router id: " + router.id);
    auto git = m.group_index_.find(router.group);
    if (git == m.group_index_.end())
      throw DataError("router " + router.id + " references unknown group " + router.group);
    m.router_group_[r] = git->second;
    if (++group_population[git->second] > spec.routers_per_group)
      throw DataError("group " + router.group + " exceeds routers_per_group");
    if (router.row < 0 || router.row > 15)
      throw DataError("router " + router.id + " row index out of range 0..15");
    if (router.col < 0 || router.col > 5)
      throw DataError("router " + router.id + " col index out of range 0..5");
    int processor_tiles = 0;
    for (TileClass c : router.tiles)
      if (c == TileClass::Processor) ++processor_tiles;
    if (processor_tiles != kProcessorTilesPerRouter)
      throw DataError("router " + router.id + " has " + std::to_string(processor_tiles) +
                      " processor tiles, expected 8");
  }

  std::vector<Index> node_population(m.routers_.size(), 0);
  for (const auto& [node_id, router_id] : spec.nodes) {
    auto rit = m.router_index_.find(router_id);
    if (rit == m.router_index_.end())
      throw DataError("node " + node_id + " references unknown router " + router_id);
    if (!m.node_to_router_.emplace(node_id, rit->second).second)
      throw DataError("duplicate node id: " + node_id);
    if (++node_population[rit->second] > spec.nodes_per_router)
      throw DataError("router " + router_id + " exceeds nodes_per_router");
  }
  return m;
}

Index Machine::router_index(std::string_view id) const {
  auto it = router_index_.find(id);
  if (it == router_index_.end()) throw DataError("unknown router id: " + std::string(id));
  return it->second;
}

bool Machine::has_router(std::string_view id) const {
  return router_index_.find(id) != router_index_.end();
}

Index Machine::router_of_node(std::string_view node_id) const {
  auto it = node_to_router_.find(node_id);
  if (it == node_to_router_.end()) throw DataError("unknown node id: " + std::string(node_id));
  return it->second;
}

bool Machine::has_node(std::string_view node_id) const {
  return node_to_router_.find(node_id) != node_to_router_.end();
}

Index Machine::group_index(std::string_view group_id) const {
  auto it = group_index_.find(group_id);
  if (it == group_index_.end()) throw DataError("unknown group id: " + std::string(group_id));
  return it->second;
}

std::vector<std::pair<std::string, std::string>> Machine::node_assignments() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(node_to_router_.size());
  for (const auto& [node, router] : node_to_router_) out.emplace_back(node, routers_[router].id);
  return out;
}

MachineSpec Machine::to_spec() const {
  MachineSpec spec;
  spec.groups = groups_;
  spec.routers = routers_;
  spec.nodes = node_assignments();
  spec.routers_per_group = routers_per_group_;
  spec.nodes_per_router = nodes_per_router_;
  return spec;
}

std::vector<Index> routers_for_job(const Machine& m, std::span<const std::string> nodes) {
  std::set<Index> routers;
  for (const auto& node : nodes) routers.insert(m.router_of_node(node));
  return {routers.begin(), routers.end()};
}

std::vector<Index> select_router_group(const Machine& m, RouterSelector sel,
                                       std::span<const std::string> job_nodes) {
  switch (sel) {
    case RouterSelector::MyRouters:
      return routers_for_job(m, job_nodes);
    case RouterSelector::AllCompute:
    case RouterSelector::Io: {
      const RouterKind want = sel == RouterSelector::Io ? RouterKind::Io : RouterKind::Compute;
      std::vector<Index> out;
      for (Index r = 0; r < m.router_count(); ++r)
        if (m.routers()[r].kind == want) out.push_back(r);
      return out;
    }
  }
  throw UsageError("invalid router selector");
}

PlacementFeatures placement_features(const Machine& m, std::span<const std::string> nodes) {
  if (nodes.empty()) throw DataError("placement_features: empty node list");
  std::set<Index> routers;
  std::set<Index> groups;
  for (const auto& node : nodes) {
    Index r = m.router_of_node(node);
    routers.insert(r);
    groups.insert(m.group_of_router(r));
  }
  return {static_cast<Index>(routers.size()), static_cast<Index>(groups.size())};
}

}  // namespace dfpred
