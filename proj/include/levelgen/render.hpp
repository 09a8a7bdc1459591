#pragma once

// Plain-text renderings of levels and dungeons for terminals and diffs.

#include <optional>
#include <span>
#include <string>

#include "levelgen/encodings.hpp"
#include "levelgen/mario.hpp"
#include "levelgen/zelda.hpp"

namespace levelgen {

/// Mario symbols row by row; path cells are drawn as '*' when given.
std::string render_mario_text(const TileGrid& level, const mario::MarioPath* path = nullptr);

/// Whole-dungeon canvas. Floor '.', wall '#', water '~', absent rooms blank.
/// Doors: '+' plain, 's' soft-locked, 'b' bombable, 'L' locked. Keys 'k',
/// start 'S', goal 'G', path '*'. Rooms unreachable from the start are crossed with 'x'.
std::string render_dungeon_text(const DungeonLayout& layout, const zelda::DungeonPath* path = nullptr);

}  // namespace levelgen
