#include <doctest.h>

#include <algorithm>
#include <set>

#include "dfpred/topology.hpp"
#include "helpers.hpp"

using namespace dfpred;

TEST_CASE("minimal machine: 1 group, 1 router, 4 nodes") {
  Machine m = test::make_machine({.groups = 1, .compute_per_group = 1});
  CHECK(m.router_count() == 1);
  CHECK(m.node_count() == 4);
  const Router& r = m.routers()[0];
  CHECK(r.tiles.size() == 48);
  CHECK(std::count(r.tiles.begin(), r.tiles.end(), TileClass::Processor) == 8);
}

TEST_CASE("full-scale machine: 34 groups, 2890 routers") {
  Machine m = test::make_machine({.groups = 34,
                                  .compute_per_group = 85,
                                  .nodes_per_compute_router = 1});
  CHECK(m.router_count() == 2890);
  CHECK(m.groups().size() == 34);
}

TEST_CASE("router with wrong processor tile count is rejected") {
  MachineSpec spec = test::make_spec({});
  spec.routers[0].tiles[40] = TileClass::Row;  // 7 processor tiles left
  CHECK_THROWS_AS(Machine::build(spec), DataError);
}

TEST_CASE("duplicate ids are rejected") {
  MachineSpec spec = test::make_spec({});
  spec.nodes.push_back(spec.nodes.front());
  CHECK_THROWS_AS(Machine::build(spec), DataError);

  MachineSpec spec2 = test::make_spec({});
  Router dup = spec2.routers[0];
  spec2.routers.push_back(dup);
  CHECK_THROWS_AS(Machine::build(spec2), DataError);
}

TEST_CASE("structural validation") {
  CHECK_THROWS_AS(tile_class_from_string("diagonal"), DataError);
  CHECK_THROWS_AS(router_kind_from_string("login"), DataError);

  MachineSpec spec = test::make_spec({.compute_per_group = 2});
  spec.routers_per_group = 1;  // group g0 has 2 routers
  CHECK_THROWS_AS(Machine::build(spec), DataError);

  MachineSpec spec2 = test::make_spec({});
  spec2.routers_per_group = 97;
  CHECK_THROWS_AS(Machine::build(spec2), DataError);

  MachineSpec spec3 = test::make_spec({});
  spec3.routers[0].row = 16;
  CHECK_THROWS_AS(Machine::build(spec3), DataError);

  MachineSpec spec4 = test::make_spec({});
  spec4.routers[0].col = 6;
  CHECK_THROWS_AS(Machine::build(spec4), DataError);

  MachineSpec spec5 = test::make_spec({});
  spec5.nodes.emplace_back("ghost", "no-such-router");
  CHECK_THROWS_AS(Machine::build(spec5), DataError);
}

TEST_CASE("routers_for_job deduplicates") {
  Machine m = test::make_machine({.groups = 1, .compute_per_group = 3});
  std::vector<std::string> nodes = {"g0r0n0", "g0r0n1", "g0r1n0"};
  auto routers = routers_for_job(m, nodes);
  CHECK(routers == std::vector<Index>{m.router_index("g0r0"), m.router_index("g0r1")});

  std::vector<std::string> empty;
  CHECK(routers_for_job(m, empty).empty());

  std::vector<std::string> unknown = {"nope"};
  CHECK_THROWS_AS(routers_for_job(m, unknown), DataError);
}

TEST_CASE("512 nodes spread one per router") {
  Machine m = test::make_machine({.groups = 8,
                                  .compute_per_group = 64,
                                  .nodes_per_compute_router = 1});
  std::vector<std::string> nodes;
  for (const auto& [node, _] : m.node_assignments()) nodes.push_back(node);
  REQUIRE(nodes.size() == 512);
  CHECK(routers_for_job(m, nodes).size() == 512);
}

TEST_CASE("select_router_group by kind") {
  Machine m = test::make_machine({.groups = 2, .compute_per_group = 5, .io_per_group = 1});
  CHECK(select_router_group(m, RouterSelector::AllCompute).size() == 10);
  CHECK(select_router_group(m, RouterSelector::Io).size() == 2);

  std::vector<std::string> nodes = {"g1r3n0"};
  auto mine = select_router_group(m, RouterSelector::MyRouters, nodes);
  CHECK(mine == std::vector<Index>{m.router_index("g1r3")});
}

TEST_CASE("router kinds partition the machine") {
  Machine m = test::make_machine(
      {.groups = 3, .compute_per_group = 4, .io_per_group = 2, .service_per_group = 1});
  auto compute = select_router_group(m, RouterSelector::AllCompute);
  auto io = select_router_group(m, RouterSelector::Io);
  std::set<Index> seen(compute.begin(), compute.end());
  for (Index r : io) CHECK(!seen.contains(r));
  seen.insert(io.begin(), io.end());
  Index service = 0;
  for (Index r = 0; r < m.router_count(); ++r)
    if (m.routers()[r].kind == RouterKind::Service) {
      CHECK(!seen.contains(r));
      ++service;
    }
  CHECK(static_cast<Index>(compute.size() + io.size()) + service == m.router_count());
}

TEST_CASE("placement features count distinct routers and groups") {
  Machine m = test::make_machine({.groups = 2, .compute_per_group = 3});
  std::vector<std::string> nodes = {"g0r0n0", "g0r1n0", "g1r0n0", "g0r0n1"};
  auto p = placement_features(m, nodes);
  CHECK(p.num_routers == 3);
  CHECK(p.num_groups == 2);

  std::vector<std::string> one_router = {"g0r0n0", "g0r0n1", "g0r0n2"};
  auto p1 = placement_features(m, one_router);
  CHECK(p1.num_routers == 1);
  CHECK(p1.num_groups == 1);

  std::vector<std::string> none;
  CHECK_THROWS_AS(placement_features(m, none), DataError);
}

TEST_CASE("placement at scale: 128 nodes, one per router, 4 groups of 32") {
  Machine m = test::make_machine({.groups = 4,
                                  .compute_per_group = 32,
                                  .nodes_per_compute_router = 1});
  std::vector<std::string> nodes;
  for (const auto& [node, _] : m.node_assignments()) nodes.push_back(node);
  REQUIRE(nodes.size() == 128);
  auto p = placement_features(m, nodes);
  CHECK(p.num_routers == 128);
  CHECK(p.num_groups == 4);
}

TEST_CASE("placement invariants on random jobs") {
  Machine m = test::make_machine({.groups = 3, .compute_per_group = 6, .io_per_group = 1});
  auto assignments = m.node_assignments();
  std::mt19937_64 rng(7);
  auto compute = select_router_group(m, RouterSelector::AllCompute);
  std::set<Index> compute_set(compute.begin(), compute.end());
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(assignments.begin(), assignments.end(), rng);
    const std::size_t n = 1 + rng() % assignments.size();
    std::vector<std::string> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back(assignments[i].first);
    auto p = placement_features(m, nodes);
    CHECK(p.num_groups <= p.num_routers);
    CHECK(p.num_routers <= static_cast<Index>(nodes.size()));
    for (Index r : routers_for_job(m, nodes)) CHECK(compute_set.contains(r));
  }
}
