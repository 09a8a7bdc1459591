#include <set>

#include "doctest.h"
#include "levelgen/errors.hpp"
#include "levelgen/zelda.hpp"
#include "oracles.hpp"

using namespace levelgen;
using namespace levelgen::zelda;

namespace {

DungeonLayout corridor(int length, DoorKind kind = DoorKind::Plain) {
  DungeonLayout layout(1, length);
  for (int c = 0; c < length; ++c) layout.rooms[static_cast<std::size_t>(c)] = oracle::open_room();
  for (int c = 0; c + 1 < length; ++c) layout.doors_right[static_cast<std::size_t>(c)] = kind;
  layout.start = RoomCoord{0, 0};
  layout.goal = RoomCoord{0, length - 1};
  return layout;
}

}  // namespace

TEST_SUITE("domain-zelda") {
  TEST_CASE("reachability examples") {
    DungeonLayout one(3, 3);
    one.rooms[4] = oracle::open_room();
    one.start = one.goal = RoomCoord{1, 1};
    CHECK(reachable_rooms(one) == std::vector<RoomCoord>{{1, 1}});

    DungeonLayout two = corridor(2);
    two.doors_right[0] = DoorKind::None;
    CHECK(reachable_rooms(two) == std::vector<RoomCoord>{{0, 0}});

    const DungeonLayout three = corridor(3, DoorKind::Locked);
    CHECK(reachable_rooms(three).size() == 3);
    CHECK(reachable_rooms(DungeonLayout(2, 2)).empty());
  }

  TEST_CASE("reachability agrees with union-find") {
    Rng rng(404);
    for (int t = 0; t < 300; ++t) {
      const DungeonLayout layout = oracle::random_layout(rng, 1 + static_cast<int>(rng.index(8)), 1 + static_cast<int>(rng.index(8)));
      CHECK(reachable_rooms(layout) == oracle::union_find_reachable(layout));
    }
  }

  TEST_CASE("water and wall percentages") {
    DungeonLayout layout = corridor(1);
    auto pct = water_wall_percentages(layout);
    CHECK(pct.water == 0.0);
    CHECK(pct.wall == 0.0);

    TileGrid& room = *layout.rooms[0];
    for (int y = 0; y < 7; ++y) {
      for (int x = 0; x < 6; ++x) room.set(2 + x, 2 + y, Wall);
    }
    pct = water_wall_percentages(layout);
    CHECK(pct.wall == 50.0);

    // Unreachable rooms do not count; border walls never count.
    DungeonLayout two = corridor(2);
    two.doors_right[0] = DoorKind::None;
    for (int y = 0; y < 7; ++y) {
      for (int x = 0; x < 12; ++x) two.rooms[1]->set(2 + x, 2 + y, Water);
    }
    CHECK(water_wall_percentages(two).water == 0.0);
    two.doors_right[0] = DoorKind::Bombable;
    CHECK(water_wall_percentages(two).water == 50.0);

    CHECK_THROWS_AS(water_wall_percentages(DungeonLayout(2, 2)), EvaluationError);

    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
      const DungeonLayout r = oracle::random_layout(rng, 4, 4);
      if (reachable_rooms(r).empty()) continue;
      const auto p = water_wall_percentages(r);
      CHECK(p.water + p.wall <= 100.0 + 1e-9);
    }
  }

  TEST_CASE("bins") {
    CHECK(zelda_bin(0, 0, 1) == ZeldaBinKey{0, 0, 1});
    CHECK(zelda_bin(100, 0, 5) == ZeldaBinKey{9, 0, 5});
    CHECK(zelda_bin(37.5, 12.5, 42) == ZeldaBinKey{3, 1, 42});
    CHECK(zelda_bin(9.999, 10.0, 100) == ZeldaBinKey{0, 1, 100});
    CHECK_THROWS_AS(zelda_bin(0, 0, 0), InputError);
  }

  TEST_CASE("start equal to goal") {
    DungeonLayout one = corridor(1);
    const auto path = solve_dungeon(one);
    REQUIRE(path.has_value());
    CHECK(path->steps == 0);
    CHECK(path->distinct_rooms() == 1);
    CHECK(zelda_fitness(one) == 1.0);
  }

  TEST_CASE("locked door with the key in the start room") {
    DungeonLayout layout = corridor(2, DoorKind::Locked);
    layout.keys.push_back({{0, 0}, {1, 5}});
    const auto path = solve_dungeon(layout);
    REQUIRE(path.has_value());
    CHECK(path->steps == oracle::zelda_bfs_steps(layout));
    std::size_t key_at = path->trace.size();
    std::size_t door_at = path->trace.size();
    for (std::size_t i = 0; i < path->trace.size(); ++i) {
      if (path->trace[i].room == RoomCoord{0, 0} && path->trace[i].cell == CellCoord{1, 5}) key_at = std::min(key_at, i);
      if (path->trace[i].room == RoomCoord{0, 1}) door_at = std::min(door_at, i);
    }
    CHECK(key_at < door_at);
    CHECK(door_at < path->trace.size());
  }

  TEST_CASE("locked door without keys is unsolvable") {
    const DungeonLayout layout = corridor(2, DoorKind::Locked);
    CHECK_FALSE(solve_dungeon(layout).has_value());
    CHECK(zelda_fitness(layout) == 0.0);
  }

  TEST_CASE("soft-locked door policy") {
    const DungeonLayout layout = corridor(3, DoorKind::SoftLocked);
    CHECK(solve_dungeon(layout, {kDefaultSearchBudget, true}).has_value());
    CHECK_FALSE(solve_dungeon(layout, {kDefaultSearchBudget, false}).has_value());
  }

  TEST_CASE("doors make their threshold cells walkable") {
    DungeonLayout layout = corridor(2);
    for (auto& room : layout.rooms) {
      for (int y = 0; y < 7; ++y) {
        for (int x = 0; x < 12; ++x) room->set(2 + x, 2 + y, Wall);
      }
      for (int x = 0; x < 12; ++x) room->set(2 + x, 5, Floor);
    }
    layout.rooms[0]->set(2 + 5, 5, Wall);  // start cell is forced walkable
    CHECK(solve_dungeon(layout).has_value());
    layout.rooms[0]->set(2 + 8, 5, Water);
    CHECK_FALSE(solve_dungeon(layout).has_value());
  }

  TEST_CASE("corridor fitness is one") {
    for (int k = 2; k <= 6; ++k) CHECK(zelda_fitness(corridor(k)) == 1.0);
  }

  TEST_CASE("fixture with 50 reachable rooms and a 19-room solution") {
    const DungeonLayout layout = oracle::fitness_fixture();
    validate_layout(layout);
    CHECK(reachable_rooms(layout).size() == 50);
    const auto path = solve_dungeon(layout);
    REQUIRE(path.has_value());
    CHECK(path->distinct_rooms() == 19);
    CHECK(zelda_fitness(layout) == doctest::Approx(0.38).epsilon(1e-12));
  }

  TEST_CASE("A* matches the exhaustive oracle and respects keys") {
    Rng rng(808);
    int solved = 0;
    int with_keys = 0;
    for (int t = 0; t < 300; ++t) {
      const DungeonLayout layout = oracle::random_layout(rng, 1 + static_cast<int>(rng.index(3)), 1 + static_cast<int>(rng.index(3)));
      if (layout.keys.size() > 8) continue;
      const auto path = solve_dungeon(layout);
      const auto expect = oracle::zelda_bfs_steps(layout);
      REQUIRE(path.has_value() == expect.has_value());
      if (!path) continue;
      ++solved;
      if (!layout.keys.empty()) ++with_keys;
      CHECK(path->steps == *expect);
      const auto reachable = reachable_rooms(layout);
      for (const auto& room : path->rooms) CHECK(std::binary_search(reachable.begin(), reachable.end(), room));
      std::set<std::size_t> collected;
      std::set<std::pair<RoomCoord, RoomCoord>> crossed;
      for (std::size_t i = 0; i < path->trace.size(); ++i) {
        const auto& s = path->trace[i];
        for (std::size_t k = 0; k < layout.keys.size(); ++k) {
          if (layout.keys[k].room == s.room && layout.keys[k].cell == s.cell) collected.insert(k);
        }
        if (i > 0 && path->trace[i - 1].room != s.room &&
            layout.door_between(path->trace[i - 1].room, s.room) == DoorKind::Locked) {
          crossed.insert(std::minmax(path->trace[i - 1].room, s.room));
          CHECK(crossed.size() <= collected.size());
        }
      }
    }
    CHECK(solved > 50);
    CHECK(with_keys > 5);
  }

  TEST_CASE("budget") {
    const DungeonLayout layout = corridor(6);
    const auto full = solve_dungeon_detailed(layout);
    REQUIRE(full.path.has_value());
    const auto tight = solve_dungeon_detailed(layout, {3, true});
    CHECK(tight.budget_exhausted);
    CHECK_FALSE(tight.path.has_value());
    CHECK(zelda_fitness(layout, {3, true}) == 0.0);
    const auto exact = solve_dungeon_detailed(layout, {full.expanded, true});
    REQUIRE(exact.path.has_value());
    const auto more = solve_dungeon_detailed(layout, {full.expanded * 2, true});
    REQUIRE(more.path.has_value());
    CHECK(more.path->steps == exact.path->steps);
  }

  TEST_CASE("fitness range and solvability") {
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
      const DungeonLayout layout = oracle::random_layout(rng, 3, 3);
      const double f = zelda_fitness(layout);
      CHECK((f >= 0.0 && f <= 1.0));
      CHECK((f > 0.0) == solve_dungeon(layout).has_value());
    }
  }
}
