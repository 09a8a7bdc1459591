#pragma once

// Mario level evaluation: behavior measures, archive binning and a
// simplified-physics A* whose shortest path length is the fitness.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "levelgen/tile_grid.hpp"

namespace levelgen::mario {

enum Tile : int {
  Stone = 0,
  Breakable = 1,
  Empty = 2,
  QuestionCoin = 3,
  QuestionPowerUp = 4,
  Coin = 5,
  Pipe = 6,
  PiranhaPipe = 7,
  BulletBill = 8,
  Goomba = 9,
  GreenKoopa = 10,
  RedKoopa = 11,
  Spiny = 12,
};
inline constexpr int kTileCount = 13;

bool is_standable(int tile);
bool is_decoration(int tile);
double leniency_value(int tile);
/// Mario may occupy the cell (empty space and coins).
bool is_passable(int tile);

/// Extends every pipe tile downward through passable cells until it meets a
/// non-passable tile or the bottom row.
TileGrid extend_pipes(const TileGrid& grid);

struct MarioScores {
  double decoration = 0.0;
  double space = 0.0;
  double leniency = 0.0;
};

/// Per-segment measures over the pipe-extended segment. A ground gap (empty
/// bottom-row cell) adds one -0.5 leniency term per column.
MarioScores segment_scores(const TileGrid& segment);
/// Sum of segment_scores over the segments.
MarioScores level_scores(std::span<const TileGrid> segments);

struct MarioBinKey {
  int decoration = 0;
  int space = 0;
  int leniency = 0;
  auto operator<=>(const MarioBinKey&) const = default;
};

inline constexpr int kMarioBinsPerDim = 10;

/// Decoration and space scaled by 3, leniency by 5 and shifted by 0.5, then
/// split into ten half-open bins; out-of-range values clamp to the edge bins.
MarioBinKey mario_bin(const MarioScores& scores);

/// Stitches segments left to right and extends pipes.
TileGrid stitch_level(std::span<const TileGrid> segments);

/// jump is the number of ascending actions left (0 when grounded or falling).
struct MarioState {
  int x = 0;
  int y = 0;
  int jump = 0;
  auto operator<=>(const MarioState&) const = default;
};

enum class Move { Left, Right, Stay };

struct MarioAction {
  Move move = Move::Right;
  bool jump = false;
  bool operator==(const MarioAction&) const = default;
};

inline constexpr int kJumpHeight = 4;

/// Lowest empty cell above a standable tile in the leftmost column that has one.
std::optional<MarioState> start_state(const TileGrid& level);
bool is_goal(const TileGrid& level, const MarioState& state);
bool is_grounded(const TileGrid& level, const MarioState& state);

/// Result of applying an action; nullopt if the action is illegal or kills Mario.
std::optional<MarioState> step(const TileGrid& level, const MarioState& state, MarioAction action);

/// Legal, survivable actions from a state, in a fixed order.
std::vector<std::pair<MarioAction, MarioState>> successors(const TileGrid& level, const MarioState& state);

struct MarioPath {
  std::vector<MarioAction> actions;
  std::vector<MarioState> states;  // includes the start state
  std::size_t length() const { return actions.size(); }
};

/// A* on a stitched level; heuristic is the remaining horizontal distance.
std::optional<MarioPath> solve_level(const TileGrid& level);
std::optional<MarioPath> solve_mario(std::span<const TileGrid> segments);

/// Shortest path length, or 0 if unsolvable.
double mario_fitness(std::span<const TileGrid> segments);

}  // namespace levelgen::mario
