#include "levelgen/serialization.hpp"

#include <fstream>

#include "levelgen/errors.hpp"
#include "levelgen/mario.hpp"
#include "levelgen/zelda.hpp"

namespace levelgen {

namespace {

void expect_format(const Json& doc, const char* format) {
  if (!doc.is_object() || doc.value("format", "") != format) {
    throw InputError(std::string("expected a '") + format + "' document");
  }
  if (doc.value("version", 0) != 1) throw InputError(std::string("unsupported '") + format + "' version");
}

const char* role_name(NodeRole r) {
  switch (r) {
    case NodeRole::Input:
      return "input";
    case NodeRole::Hidden:
      return "hidden";
    case NodeRole::Output:
      return "output";
  }
  return "hidden";
}

NodeRole role_from_name(const std::string& s) {
  if (s == "input") return NodeRole::Input;
  if (s == "hidden") return NodeRole::Hidden;
  if (s == "output") return NodeRole::Output;
  throw InputError("unknown node role '" + s + "'");
}

DoorKind door_from_name(const std::string& s) {
  for (DoorKind k : {DoorKind::None, DoorKind::Plain, DoorKind::SoftLocked, DoorKind::Bombable, DoorKind::Locked}) {
    if (s == door_kind_name(k)) return k;
  }
  throw InputError("unknown door kind '" + s + "'");
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

Json cppn_to_json(const CppnGenome& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id}, {"role", role_name(n.role)}, {"activation", std::string(activation_name(n.activation))}});
  }
  Json links = Json::array();
  for (const auto& l : g.links) {
    links.push_back({{"innovation", l.innovation}, {"src", l.src}, {"dst", l.dst}, {"weight", l.weight}, {"enabled", l.enabled}});
  }
  return {{"format", "levelgen-cppn"}, {"version", 1}, {"inputs", g.input_count}, {"outputs", g.output_count},
          {"nodes", nodes}, {"links", links}};
}

CppnGenome cppn_from_json(const Json& doc) {
  expect_format(doc, "levelgen-cppn");
  return guarded([&] {
    CppnGenome g;
    g.input_count = doc.at("inputs").get<int>();
    g.output_count = doc.at("outputs").get<int>();
    for (const auto& n : doc.at("nodes")) {
      const auto act = activation_from_name(n.at("activation").get<std::string>());
      if (!act) throw InputError("unknown activation '" + n.at("activation").get<std::string>() + "'");
      g.nodes.push_back({n.at("id").get<int>(), role_from_name(n.at("role").get<std::string>()), *act});
    }
    for (const auto& l : doc.at("links")) {
      g.links.push_back({l.at("innovation").get<std::int64_t>(), l.at("src").get<int>(), l.at("dst").get<int>(),
                         l.at("weight").get<double>(), l.at("enabled").get<bool>()});
    }
    validate_genome(g);
    return g;
  });
}

Json direct_to_json(const DirectGenome& g) {
  return {{"format", "levelgen-direct"}, {"version", 1}, {"values", g.values}};
}

DirectGenome direct_from_json(const Json& doc) {
  expect_format(doc, "levelgen-direct");
  return guarded([&] { return DirectGenome{doc.at("values").get<std::vector<double>>()}; });
}

Json tile_grid_to_json(const TileGrid& grid) {
  Json rows = Json::array();
  for (int y = 0; y < grid.height(); ++y) {
    std::vector<int> row;
    for (int x = 0; x < grid.width(); ++x) row.push_back(grid.at(x, y));
    rows.push_back(row);
  }
  return rows;
}

TileGrid tile_grid_from_json(const Json& doc, int tileset_size) {
  return guarded([&] {
    const auto rows = doc.get<std::vector<std::vector<int>>>();
    if (rows.empty() || rows.front().empty()) throw InputError("empty tile array");
    std::vector<int> tiles;
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) throw InputError("ragged tile array");
      tiles.insert(tiles.end(), r.begin(), r.end());
    }
    return TileGrid(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), tileset_size, std::move(tiles));
  });
}

Json mario_level_to_json(std::span<const TileGrid> segments) {
  Json segs = Json::array();
  for (const auto& s : segments) segs.push_back(tile_grid_to_json(s));
  return {{"format", "levelgen-mario-level"}, {"version", 1}, {"segments", segs}};
}

std::vector<TileGrid> mario_level_from_json(const Json& doc) {
  expect_format(doc, "levelgen-mario-level");
  return guarded([&] {
    std::vector<TileGrid> out;
    for (const auto& s : doc.at("segments")) out.push_back(tile_grid_from_json(s, mario::kTileCount));
    if (out.empty()) throw InputError("Mario level has no segments");
    return out;
  });
}

Json dungeon_to_json(const DungeonLayout& layout) {
  Json rooms = Json::array();
  Json doors = Json::array();
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      const RoomCoord rc{r, c};
      if (layout.present(rc)) rooms.push_back({{"row", r}, {"col", c}, {"tiles", tile_grid_to_json(layout.room(rc))}});
      if (layout.right_door(rc) != DoorKind::None) {
        doors.push_back({{"row", r}, {"col", c}, {"dir", "right"}, {"kind", door_kind_name(layout.right_door(rc))}});
      }
      if (layout.down_door(rc) != DoorKind::None) {
        doors.push_back({{"row", r}, {"col", c}, {"dir", "down"}, {"kind", door_kind_name(layout.down_door(rc))}});
      }
    }
  }
  Json keys = Json::array();
  for (const auto& k : layout.keys) keys.push_back({{"row", k.room.row}, {"col", k.room.col}, {"x", k.cell.x}, {"y", k.cell.y}});
  Json doc = {{"format", "levelgen-dungeon"}, {"version", 1}, {"rows", layout.rows}, {"cols", layout.cols},
              {"rooms", rooms}, {"doors", doors}, {"keys", keys}};
  doc["start"] = layout.start ? Json{layout.start->row, layout.start->col} : Json();
  doc["goal"] = layout.goal ? Json{layout.goal->row, layout.goal->col} : Json();
  return doc;
}

DungeonLayout dungeon_from_json(const Json& doc) {
  expect_format(doc, "levelgen-dungeon");
  return guarded([&] {
    DungeonLayout layout(doc.at("rows").get<int>(), doc.at("cols").get<int>());
    const auto coord = [&](const Json& j) {
      const RoomCoord rc{j.at("row").get<int>(), j.at("col").get<int>()};
      if (!layout.in_bounds(rc)) throw InputError("room coordinate outside grid");
      return rc;
    };
    for (const auto& room : doc.at("rooms")) {
      layout.rooms[layout.index(coord(room))] = tile_grid_from_json(room.at("tiles"), zelda::kTileCount);
    }
    for (const auto& d : doc.at("doors")) {
      const auto dir = d.at("dir").get<std::string>();
      const DoorKind kind = door_from_name(d.at("kind").get<std::string>());
      const std::size_t i = layout.index(coord(d));
      if (dir == "right") {
        layout.doors_right[i] = kind;
      } else if (dir == "down") {
        layout.doors_down[i] = kind;
      } else {
        throw InputError("door direction must be right or down");
      }
    }
    for (const auto& k : doc.at("keys")) layout.keys.push_back({coord(k), {k.at("x").get<int>(), k.at("y").get<int>()}});
    for (const char* field : {"start", "goal"}) {
      const Json& j = doc.at(field);
      if (j.is_null()) continue;
      const RoomCoord rc{j.at(0).get<int>(), j.at(1).get<int>()};
      (std::string(field) == "start" ? layout.start : layout.goal) = rc;
    }
    validate_layout(layout);
    return layout;
  });
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace levelgen
