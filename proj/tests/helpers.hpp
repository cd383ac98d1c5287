#pragma once

#include <random>
#include <string>
#include <vector>

#include "dfpred/ingest.hpp"
#include "dfpred/topology.hpp"

namespace dfpred::test {

/// Aries-like tile layout: 15 row, 15 column, 10 global, 8 processor.
inline std::array<TileClass, kTilesPerRouter> standard_tiles() {
  std::array<TileClass, kTilesPerRouter> tiles{};
  for (int i = 0; i < 15; ++i) tiles[i] = TileClass::Row;
  for (int i = 15; i < 30; ++i) tiles[i] = TileClass::Column;
  for (int i = 30; i < 40; ++i) tiles[i] = TileClass::Global;
  for (int i = 40; i < 48; ++i) tiles[i] = TileClass::Processor;
  return tiles;
}

struct MachineOptions {
  int groups = 1;
  int compute_per_group = 2;
  int io_per_group = 0;
  int service_per_group = 0;
  int nodes_per_compute_router = 4;
};

inline MachineSpec make_spec(const MachineOptions& opt) {
  MachineSpec spec;
  spec.routers_per_group = opt.compute_per_group + opt.io_per_group + opt.service_per_group;
  spec.nodes_per_router = std::max(1, opt.nodes_per_compute_router);
  const auto tiles = standard_tiles();
  for (int g = 0; g < opt.groups; ++g) {
    const std::string gid = "g" + std::to_string(g);
    spec.groups.push_back(gid);
    const int total = opt.compute_per_group + opt.io_per_group + opt.service_per_group;
    for (int i = 0; i < total; ++i) {
      Router r;
      r.id = gid + "r" + std::to_string(i);
      r.group = gid;
      r.row = i % 16;
      r.col = (i / 16) % 6;
      r.kind = i < opt.compute_per_group
                   ? RouterKind::Compute
                   : (i < opt.compute_per_group + opt.io_per_group ? RouterKind::Io
                                                                   : RouterKind::Service);
      r.tiles = tiles;
      spec.routers.push_back(r);
      if (r.kind == RouterKind::Compute)
        for (int n = 0; n < opt.nodes_per_compute_router; ++n)
          spec.nodes.emplace_back(r.id + "n" + std::to_string(n), r.id);
    }
  }
  return spec;
}

inline Machine make_machine(const MachineOptions& opt = {}) {
  return Machine::build(make_spec(opt));
}

/// Random tile-delta table for a router: nonnegative integer deltas on all
/// class-valid (tile, counter) slots.
inline RouterTileDeltas random_tile_deltas(const Machine& m, Index router, std::mt19937_64& rng,
                                           int max_value = 1000) {
  RouterTileDeltas table;
  table.router = router;
  std::uniform_int_distribution<int> value(0, max_value);
  for (int tile = 0; tile < kTilesPerRouter; ++tile) {
    auto [lo, hi] = CounterStream::counter_range(m.routers()[router].tiles[tile]);
    for (int c = lo; c < hi; ++c) table.values(tile, c) = value(rng);
    table.tile_present[tile] = true;
  }
  return table;
}

}  // namespace dfpred::test
