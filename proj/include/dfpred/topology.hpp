#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfpred/errors.hpp"
#include "dfpred/types.hpp"

namespace dfpred {

inline constexpr int kTilesPerRouter = 48;
inline constexpr int kProcessorTilesPerRouter = 8;

enum class TileClass : std::uint8_t { Row, Column, Global, Processor };
enum class RouterKind : std::uint8_t { Compute, Io, Service };

TileClass tile_class_from_string(std::string_view s);
std::string_view to_string(TileClass c);
RouterKind router_kind_from_string(std::string_view s);
std::string_view to_string(RouterKind k);

struct Router {
  std::string id;
  std::string group;
  int row = 0;  // 0..15 position in the group grid
  int col = 0;  // 0..5
  RouterKind kind = RouterKind::Compute;
  std::array<TileClass, kTilesPerRouter> tiles{};
};

/// Raw description of a machine, as read from a topology file.
struct MachineSpec {
  std::vector<std::string> groups;
  std::vector<Router> routers;
  std::vector<std::pair<std::string, std::string>> nodes;  // node id -> router id
  int routers_per_group = 96;
  int nodes_per_router = 4;
};

/// Immutable dragonfly machine: routers with classified tiles, groups, and
/// the node-to-router assignment. Safe for concurrent reads once built.
class Machine {
 public:
  /// Empty machine; populate via build().
  Machine() = default;

  /// Validates the spec and builds the machine. Throws DataError on duplicate
  /// ids, routers without exactly 8 processor tiles, out-of-range grid
  /// positions, unknown references, or over-populated groups/routers.
  static Machine build(const MachineSpec& spec);

  const std::vector<std::string>& groups() const { return groups_; }
  const std::vector<Router>& routers() const { return routers_; }
  Index router_count() const { return static_cast<Index>(routers_.size()); }
  Index node_count() const { return static_cast<Index>(node_to_router_.size()); }
  int routers_per_group() const { return routers_per_group_; }
  int nodes_per_router() const { return nodes_per_router_; }

  /// Index of a router id; throws DataError if unknown.
  Index router_index(std::string_view id) const;
  bool has_router(std::string_view id) const;

  /// Router hosting a node; throws DataError if the node id is unknown.
  Index router_of_node(std::string_view node_id) const;
  bool has_node(std::string_view node_id) const;

  Index group_index(std::string_view group_id) const;
  Index group_of_router(Index router) const { return router_group_[router]; }

  /// Node ids sorted, for serialization.
  std::vector<std::pair<std::string, std::string>> node_assignments() const;

  MachineSpec to_spec() const;

 private:
  std::vector<std::string> groups_;
  std::vector<Router> routers_;
  std::vector<Index> router_group_;
  std::map<std::string, Index, std::less<>> router_index_;
  std::map<std::string, Index, std::less<>> group_index_;
  std::map<std::string, Index, std::less<>> node_to_router_;
  int routers_per_group_ = 96;
  int nodes_per_router_ = 4;
};

enum class RouterSelector { AllCompute, MyRouters, Io };

RouterSelector selector_from_string(std::string_view s);
std::string_view to_string(RouterSelector s);

/// Routers hosting at least one of the given nodes ("my routers"), as sorted
/// router indices. Throws DataError on unknown node ids.
std::vector<Index> routers_for_job(const Machine& m, std::span<const std::string> nodes);

/// Router set for a selector. MyRouters requires the job's node list;
/// AllCompute excludes io and service routers.
std::vector<Index> select_router_group(const Machine& m, RouterSelector sel,
                                       std::span<const std::string> job_nodes = {});

struct PlacementFeatures {
  Index num_routers = 0;
  Index num_groups = 0;
};

/// Distinct routers and dragonfly groups hosting the job's nodes.
/// Throws DataError on an empty node list or unknown node ids.
PlacementFeatures placement_features(const Machine& m, std::span<const std::string> nodes);

}  // namespace dfpred
