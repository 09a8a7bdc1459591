#pragma once

// Genotype to phenotype mappings. The pattern-network encoding queries a CPPN
// per segment (Mario) or per room cell (Zelda); the direct encoding chops one
// flat vector into the same per-segment/per-room inputs. Both Zelda paths share
// decode_dungeon, so equal per-room values give identical layouts.

#include <compare>
#include <optional>
#include <span>
#include <vector>

#include "levelgen/cppn.hpp"
#include "levelgen/rng.hpp"
#include "levelgen/tensor_gen.hpp"
#include "levelgen/tile_grid.hpp"

namespace levelgen {

inline constexpr int kMarioSegmentWidth = 28;
inline constexpr int kMarioSegmentHeight = 14;

inline constexpr int kZeldaRoomWidth = 16;
inline constexpr int kZeldaRoomHeight = 11;
/// Floor region inside the room's two-tile border.
inline constexpr int kZeldaInteriorX = 2;
inline constexpr int kZeldaInteriorY = 2;
inline constexpr int kZeldaInteriorWidth = 12;
inline constexpr int kZeldaInteriorHeight = 7;
inline constexpr int kZeldaAuxOutputs = 6;

struct MarioGenomeSpec {
  int segments = 10;
  int latent_size = 30;
};

struct DungeonGenomeSpec {
  int rows = 10;
  int cols = 10;
  int latent_size = 10;
};

struct RoomDecode {
  LatentVector z;
  double present = -1.0;
  double right_door = -1.0;
  double down_door = -1.0;
  double right_type = -1.0;
  double down_type = -1.0;
  double start_end_pref = 0.0;
};

enum class DoorKind { None, Plain, SoftLocked, Bombable, Locked };

/// [-1, 0] plain, (0, 0.33] soft-locked, (0.33, 0.66] bombable, above 0.66 locked.
DoorKind door_kind_from_type(double type_output);
const char* door_kind_name(DoorKind kind);

struct RoomCoord {
  int row = 0;
  int col = 0;
  auto operator<=>(const RoomCoord&) const = default;
};

/// Coordinates inside a room's 12x7 interior.
struct CellCoord {
  int x = 0;
  int y = 0;
  auto operator<=>(const CellCoord&) const = default;
};

struct KeyPlacement {
  RoomCoord room;
  CellCoord cell;
  bool operator==(const KeyPlacement&) const = default;
};

struct DungeonLayout {
  DungeonLayout() = default;
  DungeonLayout(int rows, int cols);

  int rows = 0;
  int cols = 0;
  std::vector<std::optional<TileGrid>> rooms;  // row-major
  std::vector<DoorKind> doors_right;           // door from (r, c) to (r, c+1)
  std::vector<DoorKind> doors_down;            // door from (r, c) to (r+1, c)
  std::vector<KeyPlacement> keys;
  std::optional<RoomCoord> start;
  std::optional<RoomCoord> goal;

  std::size_t index(RoomCoord rc) const { return static_cast<std::size_t>(rc.row) * cols + rc.col; }
  bool in_bounds(RoomCoord rc) const { return rc.row >= 0 && rc.col >= 0 && rc.row < rows && rc.col < cols; }
  bool present(RoomCoord rc) const { return in_bounds(rc) && rooms[index(rc)].has_value(); }
  const TileGrid& room(RoomCoord rc) const { return *rooms[index(rc)]; }
  DoorKind right_door(RoomCoord rc) const { return doors_right[index(rc)]; }
  DoorKind down_door(RoomCoord rc) const { return doors_down[index(rc)]; }
  /// Door joining two 4-adjacent rooms (None if not adjacent or no door).
  DoorKind door_between(RoomCoord a, RoomCoord b) const;
  std::vector<RoomCoord> present_rooms() const;
  int locked_door_count() const;

  bool operator==(const DungeonLayout&) const = default;
};

/// Throws InputError if doors touch absent rooms or leave the grid, keys do not
/// match locked doors, or start/goal are inconsistent.
void validate_layout(const DungeonLayout& layout);

/// Raw right/down door-type outputs per cell, used to seed key placement.
struct DoorTypeOutputs {
  std::vector<double> right;
  std::vector<double> down;
};

/// One key per locked door. Each key's stream is seeded with the IEEE-754 bit
/// pattern of that door's type output.
std::vector<KeyPlacement> place_keys(const DungeonLayout& layout, const DoorTypeOutputs& types);

/// Shared downstream decoder for both encodings. cells is row-major, rows x cols.
DungeonLayout decode_dungeon(std::span<const RoomDecode> cells, const Decoder& decoder, const DungeonGenomeSpec& spec);

/// Scaled coordinate of a segment for the Mario CPPN: -1 + 2 i/(S-1), or 0 when S = 1.
double mario_segment_input(int index, int segments);

std::vector<TileGrid> cppn_to_mario_level(const CppnGenome& genome, const Decoder& decoder,
                                          const MarioGenomeSpec& spec);
std::vector<RoomDecode> cppn_room_decodes(const CppnGenome& genome, const DungeonGenomeSpec& spec);
DungeonLayout cppn_to_zelda_dungeon(const CppnGenome& genome, const Decoder& decoder, const DungeonGenomeSpec& spec);

struct DirectGenome {
  std::vector<double> values;
  bool operator==(const DirectGenome&) const = default;
};

DirectGenome random_direct_genome(std::size_t length, Rng& rng);
std::size_t direct_mario_length(const MarioGenomeSpec& spec);
std::size_t direct_zelda_length(const DungeonGenomeSpec& spec);

std::vector<TileGrid> direct_to_mario(const DirectGenome& genome, const Decoder& decoder, const MarioGenomeSpec& spec);
std::vector<RoomDecode> direct_room_decodes(const DirectGenome& genome, const DungeonGenomeSpec& spec);
DungeonLayout direct_to_zelda(const DirectGenome& genome, const Decoder& decoder, const DungeonGenomeSpec& spec);

struct DirectVariationRates {
  double crossover = 0.5;
  double mutation = 0.3;
  double eta = 20.0;
};

struct DirectVariationReport {
  bool crossed = false;
  std::size_t cut = 0;
  std::size_t mutated = 0;
};

/// Bounded polynomial mutation of one value.
double polynomial_mutation(double value, double lo, double hi, double eta, Rng& rng);

DirectGenome direct_variation(const DirectGenome& a, const DirectGenome& b, Rng& rng,
                              const DirectVariationRates& rates = {}, DirectVariationReport* report = nullptr);

}  // namespace levelgen
