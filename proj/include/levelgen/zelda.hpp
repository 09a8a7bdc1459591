#pragma once

// Dungeon evaluation: reachable rooms, water/wall measures, binning and a
// key-aware A* over (room, cell, inventory) states with an expansion budget.

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include "levelgen/encodings.hpp"

namespace levelgen::zelda {

enum Tile : int { Floor = 0, Wall = 1, Water = 2 };
inline constexpr int kTileCount = 3;

inline constexpr std::size_t kDefaultSearchBudget = 100000;

/// Closure from the start room over doors of any kind, sorted row-major.
/// Empty if the layout has no start room.
std::vector<RoomCoord> reachable_rooms(const DungeonLayout& layout);

struct TilePercentages {
  double water = 0.0;
  double wall = 0.0;
};

/// Water and wall share of the 12x7 interiors of reachable rooms, in percent.
/// Throws EvaluationError if no room is reachable.
TilePercentages water_wall_percentages(const DungeonLayout& layout);

struct ZeldaBinKey {
  int water = 0;
  int wall = 0;
  int rooms = 1;
  auto operator<=>(const ZeldaBinKey&) const = default;
};

ZeldaBinKey zelda_bin(double water_pct, double wall_pct, int reachable_count);

/// Interior cells next to each door, and the spawn cell of the start room.
inline constexpr CellCoord kRightDoorCell{11, 3};
inline constexpr CellCoord kLeftDoorCell{0, 3};
inline constexpr CellCoord kDownDoorCell{5, 6};
inline constexpr CellCoord kUpDoorCell{5, 0};
inline constexpr CellCoord kStartCell{5, 3};

struct SolveOptions {
  std::size_t budget = kDefaultSearchBudget;
  /// Soft-locked doors need enemies cleared; generated rooms have none.
  bool soft_locked_open = true;
};

struct TraceStep {
  RoomCoord room;
  CellCoord cell;
  bool operator==(const TraceStep&) const = default;
};

struct DungeonPath {
  /// Rooms in visiting order, consecutive repeats collapsed.
  std::vector<RoomCoord> rooms;
  /// Every cell visited, starting at the spawn cell.
  std::vector<TraceStep> trace;
  std::size_t steps = 0;
  std::size_t distinct_rooms() const;
};

struct SolveOutcome {
  std::optional<DungeonPath> path;
  std::size_t expanded = 0;
  bool budget_exhausted = false;
};

SolveOutcome solve_dungeon_detailed(const DungeonLayout& layout, const SolveOptions& options = {});
std::optional<DungeonPath> solve_dungeon(const DungeonLayout& layout, const SolveOptions& options = {});

/// Distinct rooms on the shortest solution over reachable rooms; 0 if unsolvable.
double zelda_fitness(const DungeonLayout& layout, const SolveOptions& options = {});

}  // namespace levelgen::zelda
