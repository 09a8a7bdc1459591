#include <cmath>

#include "doctest.h"
#include "levelgen/encodings.hpp"
#include "levelgen/errors.hpp"
#include "levelgen/mario.hpp"
#include "levelgen/zelda.hpp"
#include "oracles.hpp"

using namespace levelgen;

namespace {

// CPPN whose outputs are all gaussian(x) of the single input: an even function of x.
CppnGenome gaussian_mario_genome(int latent) {
  CppnGenome g;
  g.input_count = 2;
  g.output_count = latent;
  g.nodes = {{0, NodeRole::Input, Activation::Identity}, {1, NodeRole::Input, Activation::Identity}};
  for (int k = 0; k < latent; ++k) g.nodes.push_back({2 + k, NodeRole::Output, Activation::Identity});
  const int hidden = 2 + latent;
  g.nodes.push_back({hidden, NodeRole::Hidden, Activation::Gaussian});
  std::int64_t innovation = 0;
  g.links.push_back({innovation++, 0, hidden, 1.3, true});
  for (int k = 0; k < latent; ++k) g.links.push_back({innovation++, hidden, 2 + k, 0.1 * (k + 1) - 1.0, true});
  return g;
}

DirectGenome blocks_from_cells(const std::vector<RoomDecode>& cells) {
  DirectGenome g;
  for (const auto& c : cells) {
    g.values.insert(g.values.end(), c.z.begin(), c.z.end());
    g.values.insert(g.values.end(), {c.present, c.right_door, c.down_door, c.right_type, c.down_type, c.start_end_pref});
  }
  return g;
}

void check_layout_invariants(const DungeonLayout& layout) {
  validate_layout(layout);
  CHECK(static_cast<int>(layout.keys.size()) == layout.locked_door_count());
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const RoomCoord rc{r, c};
      if (layout.right_door(rc) != DoorKind::None) CHECK((layout.present(rc) && layout.present({r, c + 1})));
      if (layout.down_door(rc) != DoorKind::None) CHECK((layout.present(rc) && layout.present({r + 1, c})));
    }
  }
}

}  // namespace

TEST_SUITE("encodings") {
  TEST_CASE("segment inputs") {
    CHECK(mario_segment_input(0, 3) == -1.0);
    CHECK(mario_segment_input(1, 3) == 0.0);
    CHECK(mario_segment_input(2, 3) == 1.0);
    CHECK(mario_segment_input(0, 1) == 0.0);
    CHECK(mario_segment_input(4, 10) == doctest::Approx(-1.0 + 8.0 / 9.0));
    CHECK_THROWS_AS(mario_segment_input(3, 3), InputError);
  }

  TEST_CASE("door kind thresholds") {
    CHECK(door_kind_from_type(-1.0) == DoorKind::Plain);
    CHECK(door_kind_from_type(-0.2) == DoorKind::Plain);
    CHECK(door_kind_from_type(0.0) == DoorKind::Plain);
    CHECK(door_kind_from_type(std::nextafter(0.0, 1.0)) == DoorKind::SoftLocked);
    CHECK(door_kind_from_type(0.33) == DoorKind::SoftLocked);
    CHECK(door_kind_from_type(std::nextafter(0.33, 1.0)) == DoorKind::Bombable);
    CHECK(door_kind_from_type(0.5) == DoorKind::Bombable);
    CHECK(door_kind_from_type(0.66) == DoorKind::Bombable);
    CHECK(door_kind_from_type(std::nextafter(0.66, 1.0)) == DoorKind::Locked);
    CHECK(door_kind_from_type(1.0) == DoorKind::Locked);
  }

  TEST_CASE("single-segment Mario level queries the CPPN at zero") {
    Rng rng(1);
    const CppnGenome g = minimal_genome(1, 30, rng);
    const StubDecoder stub(30, mario::kTileCount);
    const auto level = cppn_to_mario_level(g, stub, {1, 30});
    REQUIRE(level.size() == 1);
    const double zero = 0.0;
    CHECK(level[0] == stub.decode(activate(g, std::span<const double>(&zero, 1)), 28, 14));
  }

  TEST_CASE("constant CPPN yields identical segments") {
    Rng rng(2);
    CppnGenome g = minimal_genome(1, 30, rng);
    for (auto& l : g.links) l.weight = 0.0;
    for (auto& n : g.nodes) {
      if (n.role == NodeRole::Output) n.activation = Activation::Cosine;
    }
    const StubDecoder stub(30, mario::kTileCount);
    const auto level = cppn_to_mario_level(g, stub, {10, 30});
    for (const auto& s : level) CHECK(s == level[0]);
  }

  TEST_CASE("gaussian CPPN gives a mirror-symmetric segment sequence") {
    const CppnGenome g = gaussian_mario_genome(30);
    validate_genome(g);
    const StubDecoder stub(30, mario::kTileCount);
    for (int s : {2, 5, 10}) {
      const auto level = cppn_to_mario_level(g, stub, {s, 30});
      for (int i = 0; i < s; ++i) CHECK(level[static_cast<std::size_t>(i)] == level[static_cast<std::size_t>(s - 1 - i)]);
    }
  }

  TEST_CASE("CPPN signature must match the domain") {
    Rng rng(3);
    const StubDecoder stub(30, mario::kTileCount);
    CHECK_THROWS_AS(cppn_to_mario_level(minimal_genome(2, 30, rng), stub, {10, 30}), InputError);
    CHECK_THROWS_AS(cppn_to_mario_level(minimal_genome(1, 29, rng), stub, {10, 30}), InputError);
    const StubDecoder zstub(10, zelda::kTileCount);
    CHECK_THROWS_AS(cppn_to_zelda_dungeon(minimal_genome(3, 10, rng), zstub, {5, 5, 10}), InputError);
  }

  TEST_CASE("room inputs use scaled coordinates and their radius") {
    // Output k copies input k through identity links; everything else is zero.
    CppnGenome g;
    g.input_count = 4;
    g.output_count = 16;
    for (int i = 0; i < 4; ++i) g.nodes.push_back({i, NodeRole::Input, Activation::Identity});
    for (int k = 0; k < 16; ++k) g.nodes.push_back({4 + k, NodeRole::Output, Activation::Identity});
    g.links = {{0, 0, 4, 1.0, true}, {1, 1, 5, 1.0, true}, {2, 2, 6, 0.5, true}};
    const auto cells = cppn_room_decodes(g, {3, 5, 10});
    REQUIRE(cells.size() == 15);
    const auto& c = cells[1 * 5 + 4];  // row 1, col 4
    CHECK(c.z[0] == 1.0);
    CHECK(c.z[1] == 0.0);
    CHECK(c.z[2] == doctest::Approx(0.5));
    const auto& corner = cells[0];
    CHECK(corner.z[2] == doctest::Approx(0.5 * std::sqrt(2.0)));
  }

  TEST_CASE("presence, doors and door kinds from auxiliary values") {
    const DungeonGenomeSpec spec{2, 2, 2};
    const StubDecoder stub(2, zelda::kTileCount);
    std::vector<RoomDecode> cells(4);
    for (auto& c : cells) c = {{0.1, 0.2}, 1.0, 1.0, 1.0, -0.2, 0.5, 0.0};
    cells[3].present = 0.0;  // exactly zero: absent
    cells[0].start_end_pref = -0.5;
    cells[2].start_end_pref = 0.9;
    const DungeonLayout layout = decode_dungeon(cells, stub, spec);
    CHECK(layout.present({0, 0}));
    CHECK_FALSE(layout.present({1, 1}));
    CHECK(layout.right_door({0, 0}) == DoorKind::Plain);
    CHECK(layout.down_door({0, 0}) == DoorKind::Bombable);
    CHECK(layout.right_door({1, 0}) == DoorKind::None);  // neighbour absent
    CHECK(layout.down_door({0, 1}) == DoorKind::None);
    CHECK(layout.start == RoomCoord{0, 0});
    CHECK(layout.goal == RoomCoord{1, 0});
    check_layout_invariants(layout);
  }

  TEST_CASE("start and goal ties go to the first room in row-major order") {
    const StubDecoder stub(1, zelda::kTileCount);
    std::vector<RoomDecode> cells(4, RoomDecode{{0.3}, 1.0, -1.0, -1.0, 0.0, 0.0, 0.25});
    const DungeonLayout layout = decode_dungeon(cells, stub, {2, 2, 1});
    CHECK(layout.start == RoomCoord{0, 0});
    CHECK(layout.goal == RoomCoord{0, 1});
    std::vector<RoomDecode> one(1, RoomDecode{{0.3}, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0});
    const DungeonLayout single = decode_dungeon(one, stub, {1, 1, 1});
    CHECK(single.start == single.goal);
  }

  TEST_CASE("keys: none without locked doors, equal seeds share a spot, decoding is repeatable") {
    const StubDecoder stub(3, zelda::kTileCount);
    std::vector<RoomDecode> cells(9, RoomDecode{{0.4, -0.7, 0.2}, 1.0, 1.0, -1.0, 0.1, 0.0, 0.0});
    DungeonLayout open = decode_dungeon(cells, stub, {3, 3, 3});
    CHECK(open.keys.empty());

    cells[0].right_type = 0.8;
    cells[4].right_type = 0.8;
    const DungeonLayout locked = decode_dungeon(cells, stub, {3, 3, 3});
    REQUIRE(locked.locked_door_count() == 2);
    REQUIRE(locked.keys.size() == 2);
    CHECK(locked.keys[0] == locked.keys[1]);
    CHECK(decode_dungeon(cells, stub, {3, 3, 3}) == locked);
    check_layout_invariants(locked);
  }

  TEST_CASE("direct Mario genome is chopped left to right") {
    const StubDecoder stub(3, mario::kTileCount);
    const DirectGenome g{{0.1, 0.2, 0.3, -0.4, -0.5, -0.6}};
    const auto level = direct_to_mario(g, stub, {2, 3});
    REQUIRE(level.size() == 2);
    CHECK(level[0] == stub.decode(std::vector<double>{0.1, 0.2, 0.3}, 28, 14));
    CHECK(level[1] == stub.decode(std::vector<double>{-0.4, -0.5, -0.6}, 28, 14));
    const DirectGenome twin{{0.1, 0.2, 0.3, 0.1, 0.2, 0.3}};
    const auto same = direct_to_mario(twin, stub, {2, 3});
    CHECK(same[0] == same[1]);
    CHECK_THROWS_AS(direct_to_mario(DirectGenome{}, stub, {0, 3}), InputError);
    CHECK_THROWS_AS(direct_to_mario(DirectGenome{{0.1}}, stub, {2, 3}), InputError);
  }

  TEST_CASE("direct Zelda genome layout") {
    CHECK(direct_zelda_length({1, 1, 2}) == 8);
    const StubDecoder stub(2, zelda::kTileCount);
    CHECK_THROWS_AS(direct_to_zelda(DirectGenome{std::vector<double>(7, 0.5)}, stub, {1, 1, 2}), InputError);

    // Presence signs per block: +, -, -, +
    std::vector<double> v;
    const double presence[4] = {0.5, -1.0, -0.3, 0.9};
    for (double p : presence) v.insert(v.end(), {0.2, -0.1, p, 1.0, 1.0, 0.0, 0.0, 0.0});
    const DungeonLayout layout = direct_to_zelda(DirectGenome{v}, stub, {2, 2, 2});
    CHECK(layout.present({0, 0}));
    CHECK_FALSE(layout.present({0, 1}));
    CHECK_FALSE(layout.present({1, 0}));
    CHECK(layout.present({1, 1}));
    CHECK(layout.right_door({0, 0}) == DoorKind::None);
    CHECK(layout.down_door({0, 0}) == DoorKind::None);
    check_layout_invariants(layout);
  }

  TEST_CASE("direct blocks equal to CPPN outputs decode to the same dungeon") {
    const StubDecoder stub(10, zelda::kTileCount);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      InnovationCounter counter(3, 16);
      CppnGenome g = minimal_genome(3, 16, rng);
      for (int i = 0; i < 15; ++i) g = mutate(g, rng, counter);
      const DungeonGenomeSpec spec{4, 5, 10};
      const auto cells = cppn_room_decodes(g, spec);
      const DungeonLayout a = cppn_to_zelda_dungeon(g, stub, spec);
      const DungeonLayout b = direct_to_zelda(blocks_from_cells(cells), stub, spec);
      CHECK(a == b);
      check_layout_invariants(a);
    }
  }

  TEST_CASE("random direct dungeons satisfy layout invariants") {
    const StubDecoder stub(10, zelda::kTileCount);
    Rng rng(31);
    for (int t = 0; t < 50; ++t) {
      const DungeonGenomeSpec spec{5, 5, 10};
      const DungeonLayout layout = direct_to_zelda(random_direct_genome(direct_zelda_length(spec), rng), stub, spec);
      check_layout_invariants(layout);
    }
  }

  TEST_CASE("direct variation") {
    Rng rng(4);
    const DirectGenome p = random_direct_genome(40, rng);
    DirectVariationReport report;
    const DirectGenome clone = direct_variation(p, p, rng, {0.5, 0.0, 20.0}, &report);
    CHECK(clone == p);
    CHECK_THROWS_AS(direct_variation(p, random_direct_genome(39, rng), rng), InputError);

    for (int t = 0; t < 1000; ++t) {
      CHECK(std::abs(polynomial_mutation(-1.0, -1.0, 1.0, 20.0, rng)) <= 1.0);
      CHECK(std::abs(polynomial_mutation(1.0, -1.0, 1.0, 20.0, rng)) <= 1.0);
    }
    DirectGenome edge{std::vector<double>(40, -1.0)};
    for (int t = 0; t < 200; ++t) {
      const DirectGenome child = direct_variation(edge, edge, rng, {0.5, 1.0, 20.0});
      for (double v : child.values) CHECK((v >= -1.0 && v <= 1.0));
    }
  }

  TEST_CASE("single-point crossover takes a prefix of one parent and the suffix of the other") {
    Rng rng(6);
    const DirectGenome a{std::vector<double>(10, 0.25)};
    const DirectGenome b{std::vector<double>(10, -0.75)};
    for (int t = 0; t < 200; ++t) {
      DirectVariationReport r;
      const DirectGenome c = direct_variation(a, b, rng, {1.0, 0.0, 20.0}, &r);
      REQUIRE(r.crossed);
      REQUIRE(r.cut >= 1);
      REQUIRE(r.cut < 10);
      for (std::size_t i = 0; i < 10; ++i) CHECK(c.values[i] == (i < r.cut ? 0.25 : -0.75));
    }
  }

  TEST_CASE("direct variation rates") {
    Rng rng(2025);
    const DirectGenome a = random_direct_genome(20, rng);
    const DirectGenome b = random_direct_genome(20, rng);
    const std::size_t trials = 100000;
    std::size_t crossed = 0;
    std::size_t mutated = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      DirectVariationReport r;
      direct_variation(a, b, rng, {}, &r);
      crossed += r.crossed;
      mutated += r.mutated;
    }
    CHECK(oracle::within_three_sigma(crossed, trials, 0.5));
    CHECK(oracle::within_three_sigma(mutated, trials * 20, 0.3));
  }
}
