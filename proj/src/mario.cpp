#include "levelgen/mario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "levelgen/errors.hpp"

namespace levelgen::mario {

namespace {

void check_tiles(const TileGrid& grid) {
  for (int t : grid.tiles()) {
    if (t < 0 || t >= kTileCount) throw InputError("invalid Mario tile identity " + std::to_string(t));
  }
}

int bin_unit(double scaled) {
  // NaN lands in the first bin.
  if (!(scaled >= 0.0)) return 0;
  const double top = std::nextafter(1.0, 0.0);
  return static_cast<int>(std::floor(10.0 * std::min(scaled, top)));
}

bool solid(const TileGrid& level, int x, int y) { return level.contains(x, y) && !is_passable(level.at(x, y)); }

bool open(const TileGrid& level, int x, int y) { return level.contains(x, y) && is_passable(level.at(x, y)); }

}  // namespace

bool is_standable(int t) {
  switch (t) {
    case Stone:
    case Breakable:
    case QuestionCoin:
    case QuestionPowerUp:
    case Pipe:
    case PiranhaPipe:
    case BulletBill:
      return true;
    default:
      return false;
  }
}

bool is_decoration(int t) { return t == Breakable || t == QuestionCoin || t == QuestionPowerUp || (t >= Pipe && t <= Spiny); }

double leniency_value(int t) {
  if (t == QuestionCoin || t == QuestionPowerUp) return 1.0;
  if (t == Pipe || t == PiranhaPipe || t == BulletBill) return -0.5;
  if (t >= Goomba && t <= Spiny) return -1.0;
  return 0.0;
}

bool is_passable(int t) { return t == Empty || t == Coin; }

TileGrid extend_pipes(const TileGrid& grid) {
  TileGrid out = grid;
  for (int x = 0; x < out.width(); ++x) {
    for (int y = 0; y < out.height(); ++y) {
      const int t = out.at(x, y);
      if (t != Pipe && t != PiranhaPipe) continue;
      int below = y + 1;
      while (below < out.height() && is_passable(out.at(x, below))) out.set(x, below++, t);
      y = below - 1;
    }
  }
  return out;
}

MarioScores segment_scores(const TileGrid& segment) {
  check_tiles(segment);
  const TileGrid g = extend_pipes(segment);
  const double area = static_cast<double>(g.width()) * g.height();
  double decoration = 0.0;
  double space = 0.0;
  double leniency = 0.0;
  for (int t : g.tiles()) {
    if (is_decoration(t)) decoration += 1.0;
    if (is_standable(t)) space += 1.0;
    leniency += leniency_value(t);
  }
  for (int x = 0; x < g.width(); ++x) {
    if (g.at(x, g.height() - 1) == Empty) leniency -= 0.5;
  }
  return {decoration / area, space / area, leniency / area};
}

MarioScores level_scores(std::span<const TileGrid> segments) {
  MarioScores total;
  for (const auto& s : segments) {
    const auto one = segment_scores(s);
    total.decoration += one.decoration;
    total.space += one.space;
    total.leniency += one.leniency;
  }
  return total;
}

MarioBinKey mario_bin(const MarioScores& scores) {
  return {bin_unit(3.0 * scores.decoration), bin_unit(3.0 * scores.space), bin_unit(5.0 * scores.leniency + 0.5)};
}

TileGrid stitch_level(std::span<const TileGrid> segments) {
  for (const auto& s : segments) check_tiles(s);
  return extend_pipes(hconcat(segments));
}

std::optional<MarioState> start_state(const TileGrid& level) {
  for (int x = 0; x < level.width(); ++x) {
    for (int y = level.height() - 2; y >= 0; --y) {
      if (is_passable(level.at(x, y)) && is_standable(level.at(x, y + 1))) return MarioState{x, y, 0};
    }
  }
  return std::nullopt;
}

bool is_goal(const TileGrid& level, const MarioState& s) { return s.x == level.width() - 1; }

bool is_grounded(const TileGrid& level, const MarioState& s) { return s.jump == 0 && solid(level, s.x, s.y + 1); }

std::optional<MarioState> step(const TileGrid& level, const MarioState& s, MarioAction action) {
  const bool grounded = is_grounded(level, s);
  if (action.jump && !grounded) return std::nullopt;

  MarioState n = s;
  const int dx = action.move == Move::Left ? -1 : action.move == Move::Right ? 1 : 0;
  if (dx != 0 && open(level, n.x + dx, n.y)) n.x += dx;

  if (action.jump) n.jump = kJumpHeight;
  if (n.jump > 0) {
    if (open(level, n.x, n.y - 1)) {
      --n.y;
      --n.jump;
    } else {
      n.jump = 0;  // bumped a ceiling
    }
  } else if (!solid(level, n.x, n.y + 1)) {
    ++n.y;
    if (n.y >= level.height()) return std::nullopt;  // fell into a pit
  }
  return n;
}

std::vector<std::pair<MarioAction, MarioState>> successors(const TileGrid& level, const MarioState& s) {
  std::vector<std::pair<MarioAction, MarioState>> out;
  const bool grounded = is_grounded(level, s);
  for (Move m : {Move::Right, Move::Left, Move::Stay}) {
    for (bool jump : {false, true}) {
      if (jump && !grounded) continue;
      if (!jump && grounded && m == Move::Stay) continue;  // no-op
      const MarioAction a{m, jump};
      if (auto n = step(level, s, a)) out.emplace_back(a, *n);
    }
  }
  return out;
}

std::optional<MarioPath> solve_level(const TileGrid& level) {
  check_tiles(level);
  const auto start = start_state(level);
  if (!start) return std::nullopt;

  const int w = level.width();
  const int h = level.height();
  const auto index = [&](const MarioState& s) {
    return (static_cast<std::size_t>(s.x) * h + s.y) * (kJumpHeight + 1) + s.jump;
  };
  const std::size_t n = static_cast<std::size_t>(w) * h * (kJumpHeight + 1);
  constexpr int kUnseen = std::numeric_limits<int>::max();
  std::vector<int> g(n, kUnseen);
  std::vector<bool> closed(n, false);
  std::vector<std::size_t> parent(n, n);
  std::vector<MarioAction> via(n);
  std::vector<MarioState> state_of(n);

  // (f, h, index): lower f first, then closer to the goal, then lower index.
  using Entry = std::tuple<int, int, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open_set;
  const auto heuristic = [&](const MarioState& s) { return w - 1 - s.x; };

  const std::size_t s0 = index(*start);
  g[s0] = 0;
  state_of[s0] = *start;
  open_set.emplace(heuristic(*start), heuristic(*start), s0);

  while (!open_set.empty()) {
    const auto [f, hh, cur] = open_set.top();
    open_set.pop();
    if (closed[cur]) continue;
    closed[cur] = true;
    const MarioState s = state_of[cur];
    if (is_goal(level, s)) {
      MarioPath path;
      for (std::size_t i = cur; i != n; i = parent[i]) {
        path.states.push_back(state_of[i]);
        if (parent[i] != n) path.actions.push_back(via[i]);
      }
      std::reverse(path.states.begin(), path.states.end());
      std::reverse(path.actions.begin(), path.actions.end());
      return path;
    }
    for (const auto& [action, next] : successors(level, s)) {
      const std::size_t ni = index(next);
      const int ng = g[cur] + 1;
      if (closed[ni] || ng >= g[ni]) continue;
      g[ni] = ng;
      parent[ni] = cur;
      via[ni] = action;
      state_of[ni] = next;
      open_set.emplace(ng + heuristic(next), heuristic(next), ni);
    }
  }
  return std::nullopt;
}

std::optional<MarioPath> solve_mario(std::span<const TileGrid> segments) { return solve_level(stitch_level(segments)); }

double mario_fitness(std::span<const TileGrid> segments) {
  const auto path = solve_mario(segments);
  return path ? static_cast<double>(path->length()) : 0.0;
}

}  // namespace levelgen::mario
