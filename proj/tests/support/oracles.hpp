#pragma once

// Independent reference implementations and random instance generators shared
// by the unit and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levelgen/encodings.hpp"
#include "levelgen/rng.hpp"
#include "levelgen/tile_grid.hpp"

namespace oracle {

/// Shortest action count by breadth-first search over the solver's successor relation.
std::optional<std::size_t> mario_bfs_length(const levelgen::TileGrid& level);

/// 28x14 segment with ground, gaps, platforms, pillars, pipes and enemies.
levelgen::TileGrid random_mario_segment(levelgen::Rng& rng);

/// Stone bottom row, everything else empty.
levelgen::TileGrid flat_mario_segment(int width = 28);

/// Rooms connected to the start through door edges, by union-find. Sorted row-major.
std::vector<levelgen::RoomCoord> union_find_reachable(const levelgen::DungeonLayout& layout);

/// Minimal cell steps from the start cell to any cell of the goal room, by
/// breadth-first search over (room, cell, keys collected, locked doors opened).
/// Written from the movement rules alone; handles at most 16 keys and 16 locked doors.
std::optional<std::size_t> zelda_bfs_steps(const levelgen::DungeonLayout& layout, bool soft_locked_open = true);

/// 16x11 room: wall border two tiles thick around an all-floor interior.
levelgen::TileGrid open_room();

/// Random presence, doors of every kind, random tiles, one key per locked door.
levelgen::DungeonLayout random_layout(levelgen::Rng& rng, int rows, int cols);

/// 10x10 grid, 50 reachable open rooms, shortest solution through 19 of them.
levelgen::DungeonLayout fitness_fixture();

/// Two-sided Mann-Whitney rank-sum p-value; exact when there are no ties,
/// normal approximation with tie and continuity correction otherwise.
double mann_whitney_p(const std::vector<double>& a, const std::vector<double>& b);

double median(std::vector<double> v);

/// |successes - n p| <= 3 sqrt(n p (1 - p))
bool within_three_sigma(std::size_t successes, std::size_t trials, double p);

std::string read_file(const std::string& path);

}  // namespace oracle
