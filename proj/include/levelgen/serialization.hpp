#pragma once

// Structured text documents (JSON) for genomes, Mario levels and dungeons.
// Every document carries "format" and "version" fields.

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "levelgen/cppn.hpp"
#include "levelgen/encodings.hpp"
#include "levelgen/tile_grid.hpp"

namespace levelgen {

using Json = nlohmann::json;

Json cppn_to_json(const CppnGenome& genome);
/// Throws InputError on malformed or invalid genomes.
CppnGenome cppn_from_json(const Json& doc);

Json direct_to_json(const DirectGenome& genome);
DirectGenome direct_from_json(const Json& doc);

Json tile_grid_to_json(const TileGrid& grid);
TileGrid tile_grid_from_json(const Json& doc, int tileset_size);

Json mario_level_to_json(std::span<const TileGrid> segments);
std::vector<TileGrid> mario_level_from_json(const Json& doc);

Json dungeon_to_json(const DungeonLayout& layout);
DungeonLayout dungeon_from_json(const Json& doc);

/// Reads a JSON document from a file; throws InputError if unreadable.
Json read_json_file(const std::string& path);

}  // namespace levelgen
