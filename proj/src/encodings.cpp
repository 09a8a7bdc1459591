#include "levelgen/encodings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "levelgen/errors.hpp"

namespace levelgen {

namespace {

double scaled_coordinate(int index, int count) {
  if (count == 1) return 0.0;
  return -1.0 + 2.0 * static_cast<double>(index) / static_cast<double>(count - 1);
}

void check_dungeon_spec(const DungeonGenomeSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.latent_size < 1) throw InputError("dungeon spec dimensions must be positive");
}

void check_mario_spec(const MarioGenomeSpec& spec) {
  if (spec.segments < 1 || spec.latent_size < 1) throw InputError("Mario spec needs at least one segment and latent value");
}

void check_decoder(const Decoder& decoder, int latent_size) {
  if (decoder.latent_size() != latent_size) {
    throw InputError("decoder latent size " + std::to_string(decoder.latent_size()) + " does not match genome latent size " +
                     std::to_string(latent_size));
  }
}

}  // namespace

DoorKind door_kind_from_type(double t) {
  if (!(t > 0.0)) return DoorKind::Plain;  // also catches NaN
  if (t <= 0.33) return DoorKind::SoftLocked;
  if (t <= 0.66) return DoorKind::Bombable;
  return DoorKind::Locked;
}

const char* door_kind_name(DoorKind kind) {
  switch (kind) {
    case DoorKind::None:
      return "none";
    case DoorKind::Plain:
      return "plain";
    case DoorKind::SoftLocked:
      return "soft-locked";
    case DoorKind::Bombable:
      return "bombable";
    case DoorKind::Locked:
      return "locked";
  }
  return "none";
}

DungeonLayout::DungeonLayout(int r, int c)
    : rows(r),
      cols(c),
      rooms(static_cast<std::size_t>(r) * c),
      doors_right(static_cast<std::size_t>(r) * c, DoorKind::None),
      doors_down(static_cast<std::size_t>(r) * c, DoorKind::None) {
  if (r < 1 || c < 1) throw InputError("dungeon grid dimensions must be positive");
}

DoorKind DungeonLayout::door_between(RoomCoord a, RoomCoord b) const {
  if (!in_bounds(a) || !in_bounds(b)) return DoorKind::None;
  if (b < a) std::swap(a, b);
  if (a.row == b.row && b.col == a.col + 1) return right_door(a);
  if (a.col == b.col && b.row == a.row + 1) return down_door(a);
  return DoorKind::None;
}

std::vector<RoomCoord> DungeonLayout::present_rooms() const {
  std::vector<RoomCoord> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (present({r, c})) out.push_back({r, c});
    }
  }
  return out;
}

int DungeonLayout::locked_door_count() const {
  return static_cast<int>(std::count(doors_right.begin(), doors_right.end(), DoorKind::Locked) +
                          std::count(doors_down.begin(), doors_down.end(), DoorKind::Locked));
}

void validate_layout(const DungeonLayout& layout) {
  const std::size_t n = static_cast<std::size_t>(layout.rows) * layout.cols;
  if (layout.rooms.size() != n || layout.doors_right.size() != n || layout.doors_down.size() != n) {
    throw InputError("layout arrays do not match grid size");
  }
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const RoomCoord rc{r, c};
      if (layout.right_door(rc) != DoorKind::None && !(layout.present(rc) && layout.present({r, c + 1}))) {
        throw InputError("right door of room (" + std::to_string(r) + "," + std::to_string(c) + ") touches no room");
      }
      if (layout.down_door(rc) != DoorKind::None && !(layout.present(rc) && layout.present({r + 1, c}))) {
        throw InputError("down door of room (" + std::to_string(r) + "," + std::to_string(c) + ") touches no room");
      }
      if (layout.present(rc)) {
        const auto& g = layout.room(rc);
        if (g.width() != kZeldaRoomWidth || g.height() != kZeldaRoomHeight) throw InputError("room has wrong dimensions");
      }
    }
  }
  if (static_cast<int>(layout.keys.size()) != layout.locked_door_count()) {
    throw InputError("key count does not equal locked door count");
  }
  for (const auto& k : layout.keys) {
    if (!layout.present(k.room) || k.cell.x < 0 || k.cell.y < 0 || k.cell.x >= kZeldaInteriorWidth ||
        k.cell.y >= kZeldaInteriorHeight) {
      throw InputError("key placed outside a room interior");
    }
  }
  const auto present = layout.present_rooms();
  if (present.empty()) {
    if (layout.start || layout.goal) throw InputError("empty dungeon cannot have start or goal");
    return;
  }
  if (!layout.start || !layout.goal || !layout.present(*layout.start) || !layout.present(*layout.goal)) {
    throw InputError("start and goal must be present rooms");
  }
  if (present.size() > 1 && *layout.start == *layout.goal) throw InputError("start equals goal");
}

std::vector<KeyPlacement> place_keys(const DungeonLayout& layout, const DoorTypeOutputs& types) {
  std::vector<KeyPlacement> keys;
  const auto present = layout.present_rooms();
  const auto place = [&](double type_output) {
    Rng rng(std::bit_cast<std::uint64_t>(type_output));
    const RoomCoord room = present[rng.index(present.size())];
    const TileGrid& g = layout.room(room);
    std::vector<CellCoord> floor;
    for (int y = 0; y < kZeldaInteriorHeight; ++y) {
      for (int x = 0; x < kZeldaInteriorWidth; ++x) {
        if (g.at(kZeldaInteriorX + x, kZeldaInteriorY + y) == 0) floor.push_back({x, y});
      }
    }
    CellCoord cell;
    if (floor.empty()) {
      const std::size_t i = rng.index(static_cast<std::size_t>(kZeldaInteriorWidth) * kZeldaInteriorHeight);
      cell = {static_cast<int>(i % kZeldaInteriorWidth), static_cast<int>(i / kZeldaInteriorWidth)};
    } else {
      cell = floor[rng.index(floor.size())];
    }
    keys.push_back({room, cell});
  };
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const std::size_t i = layout.index({r, c});
      if (layout.doors_right[i] == DoorKind::Locked) place(types.right.at(i));
      if (layout.doors_down[i] == DoorKind::Locked) place(types.down.at(i));
    }
  }
  return keys;
}

DungeonLayout decode_dungeon(std::span<const RoomDecode> cells, const Decoder& decoder,
                             const DungeonGenomeSpec& spec) {
  check_dungeon_spec(spec);
  check_decoder(decoder, spec.latent_size);
  const std::size_t n = static_cast<std::size_t>(spec.rows) * spec.cols;
  if (cells.size() != n) throw InputError("expected one room decode per grid cell");

  DungeonLayout layout(spec.rows, spec.cols);
  for (std::size_t i = 0; i < n; ++i) {
    if (cells[i].present > 0.0) {
      layout.rooms[i] = decoder.decode(clamp_latent(cells[i].z), kZeldaRoomWidth, kZeldaRoomHeight);
    }
  }

  DoorTypeOutputs types{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const RoomCoord rc{r, c};
      const std::size_t i = layout.index(rc);
      const RoomDecode& cell = cells[i];
      types.right[i] = cell.right_type;
      types.down[i] = cell.down_type;
      if (!layout.present(rc)) continue;
      if (cell.right_door > 0.0 && layout.present({r, c + 1})) layout.doors_right[i] = door_kind_from_type(cell.right_type);
      if (cell.down_door > 0.0 && layout.present({r + 1, c})) layout.doors_down[i] = door_kind_from_type(cell.down_type);
    }
  }
  layout.keys = place_keys(layout, types);

  const auto present = layout.present_rooms();
  if (!present.empty()) {
    // Strict comparisons keep the first row-major room on ties.
    RoomCoord start = present.front();
    for (const auto& rc : present) {
      if (cells[layout.index(rc)].start_end_pref < cells[layout.index(start)].start_end_pref) start = rc;
    }
    std::optional<RoomCoord> goal;
    for (const auto& rc : present) {
      if (present.size() > 1 && rc == start) continue;
      if (!goal || cells[layout.index(rc)].start_end_pref > cells[layout.index(*goal)].start_end_pref) goal = rc;
    }
    layout.start = start;
    layout.goal = goal;
  }
  return layout;
}

double mario_segment_input(int index, int segments) {
  if (segments < 1 || index < 0 || index >= segments) {
    throw InputError("segment index " + std::to_string(index) + " outside 0.." + std::to_string(segments - 1));
  }
  return scaled_coordinate(index, segments);
}

std::vector<TileGrid> cppn_to_mario_level(const CppnGenome& genome, const Decoder& decoder,
                                          const MarioGenomeSpec& spec) {
  check_mario_spec(spec);
  check_decoder(decoder, spec.latent_size);
  if (genome.declared_inputs() != 1 || genome.output_count != spec.latent_size) {
    throw InputError("Mario CPPN needs 1 input and " + std::to_string(spec.latent_size) + " outputs");
  }
  const CompiledCppn net(genome);
  std::vector<TileGrid> segments;
  segments.reserve(static_cast<std::size_t>(spec.segments));
  for (int i = 0; i < spec.segments; ++i) {
    const double x = mario_segment_input(i, spec.segments);
    const auto z = net.activate(std::span<const double>(&x, 1));
    segments.push_back(decoder.decode(clamp_latent(z), kMarioSegmentWidth, kMarioSegmentHeight));
  }
  return segments;
}

std::vector<RoomDecode> cppn_room_decodes(const CppnGenome& genome, const DungeonGenomeSpec& spec) {
  check_dungeon_spec(spec);
  if (genome.declared_inputs() != 3 || genome.output_count != spec.latent_size + kZeldaAuxOutputs) {
    throw InputError("Zelda CPPN needs 3 inputs and " + std::to_string(spec.latent_size + kZeldaAuxOutputs) +
                     " outputs");
  }
  const CompiledCppn net(genome);
  const auto z = static_cast<std::ptrdiff_t>(spec.latent_size);
  std::vector<RoomDecode> cells;
  cells.reserve(static_cast<std::size_t>(spec.rows) * spec.cols);
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const double x = scaled_coordinate(c, spec.cols);
      const double y = scaled_coordinate(r, spec.rows);
      const double in[3] = {x, y, std::sqrt(x * x + y * y)};
      const auto out = net.activate(in);
      cells.push_back({LatentVector(out.begin(), out.begin() + z), out[z], out[z + 1], out[z + 2], out[z + 3],
                       out[z + 4], out[z + 5]});
    }
  }
  return cells;
}

DungeonLayout cppn_to_zelda_dungeon(const CppnGenome& genome, const Decoder& decoder, const DungeonGenomeSpec& spec) {
  const auto cells = cppn_room_decodes(genome, spec);
  return decode_dungeon(cells, decoder, spec);
}

DirectGenome random_direct_genome(std::size_t length, Rng& rng) {
  DirectGenome g;
  g.values.reserve(length);
  for (std::size_t i = 0; i < length; ++i) g.values.push_back(rng.uniform(-1.0, 1.0));
  return g;
}

std::size_t direct_mario_length(const MarioGenomeSpec& spec) {
  return static_cast<std::size_t>(spec.segments) * spec.latent_size;
}

std::size_t direct_zelda_length(const DungeonGenomeSpec& spec) {
  return static_cast<std::size_t>(spec.rows) * spec.cols * (spec.latent_size + kZeldaAuxOutputs);
}

std::vector<TileGrid> direct_to_mario(const DirectGenome& genome, const Decoder& decoder, const MarioGenomeSpec& spec) {
  check_mario_spec(spec);
  check_decoder(decoder, spec.latent_size);
  if (genome.values.size() != direct_mario_length(spec)) {
    throw InputError("direct Mario genome has length " + std::to_string(genome.values.size()) + ", expected " +
                     std::to_string(direct_mario_length(spec)));
  }
  std::vector<TileGrid> segments;
  const std::span<const double> all(genome.values);
  const auto z = static_cast<std::size_t>(spec.latent_size);
  for (std::size_t i = 0; i < static_cast<std::size_t>(spec.segments); ++i) {
    segments.push_back(decoder.decode(clamp_latent(all.subspan(i * z, z)), kMarioSegmentWidth, kMarioSegmentHeight));
  }
  return segments;
}

std::vector<RoomDecode> direct_room_decodes(const DirectGenome& genome, const DungeonGenomeSpec& spec) {
  check_dungeon_spec(spec);
  if (genome.values.size() != direct_zelda_length(spec)) {
    throw InputError("direct Zelda genome has length " + std::to_string(genome.values.size()) + ", expected " +
                     std::to_string(direct_zelda_length(spec)));
  }
  const auto z = static_cast<std::size_t>(spec.latent_size);
  const std::size_t block = z + kZeldaAuxOutputs;
  std::vector<RoomDecode> cells;
  for (std::size_t b = 0; b < static_cast<std::size_t>(spec.rows) * spec.cols; ++b) {
    const double* v = genome.values.data() + b * block;
    cells.push_back({LatentVector(v, v + z), v[z], v[z + 1], v[z + 2], v[z + 3], v[z + 4], v[z + 5]});
  }
  return cells;
}

DungeonLayout direct_to_zelda(const DirectGenome& genome, const Decoder& decoder, const DungeonGenomeSpec& spec) {
  const auto cells = direct_room_decodes(genome, spec);
  return decode_dungeon(cells, decoder, spec);
}

double polynomial_mutation(double value, double lo, double hi, double eta, Rng& rng) {
  if (!(hi > lo)) return value;
  const double y = std::clamp(value, lo, hi);
  const double span = hi - lo;
  const double d1 = (y - lo) / span;
  const double d2 = (hi - y) / span;
  const double r = rng.uniform01();
  const double power = 1.0 / (eta + 1.0);
  double dq;
  if (r < 0.5) {
    const double v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
    dq = std::pow(v, power) - 1.0;
  } else {
    const double v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
    dq = 1.0 - std::pow(v, power);
  }
  return std::clamp(y + dq * span, lo, hi);
}

DirectGenome direct_variation(const DirectGenome& a, const DirectGenome& b, Rng& rng,
                              const DirectVariationRates& rates, DirectVariationReport* report) {
  if (a.values.size() != b.values.size()) throw InputError("direct variation parents differ in length");
  DirectVariationReport local;
  DirectGenome child = a;
  const std::size_t n = a.values.size();
  if (rng.bernoulli(rates.crossover)) {
    local.crossed = true;
    if (n >= 2) {
      local.cut = 1 + rng.index(n - 1);
      std::copy(b.values.begin() + static_cast<std::ptrdiff_t>(local.cut), b.values.end(),
                child.values.begin() + static_cast<std::ptrdiff_t>(local.cut));
    }
  }
  for (double& v : child.values) {
    if (rng.bernoulli(rates.mutation)) {
      v = polynomial_mutation(v, -1.0, 1.0, rates.eta, rng);
      ++local.mutated;
    }
  }
  if (report) *report = local;
  return child;
}

}  // namespace levelgen
