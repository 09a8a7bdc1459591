#include "levelgen/cppn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <unordered_map>

#include "levelgen/errors.hpp"
#include "levelgen/numeric.hpp"

namespace levelgen {

namespace {

constexpr std::array<std::string_view, 10> kActivationNames = {
    "sawtooth", "linear-piecewise", "identity", "square-wave",   "cosine",
    "sine",     "sigmoid",          "gaussian", "triangle-wave", "absolute-value",
};

std::map<int, std::vector<int>> enabled_successors(const CppnGenome& g) {
  std::map<int, std::vector<int>> succ;
  for (const auto& l : g.links) {
    if (l.enabled) succ[l.src].push_back(l.dst);
  }
  return succ;
}

bool reaches(const std::map<int, std::vector<int>>& succ, int from, int to) {
  std::vector<int> stack{from};
  std::set<int> seen{from};
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    if (n == to) return true;
    auto it = succ.find(n);
    if (it == succ.end()) continue;
    for (int m : it->second) {
      if (seen.insert(m).second) stack.push_back(m);
    }
  }
  return false;
}

// Kahn's algorithm over enabled links, always releasing the smallest ready id.
std::optional<std::vector<int>> topological_order(const CppnGenome& g) {
  std::map<int, int> indegree;
  for (const auto& n : g.nodes) indegree[n.id] = 0;
  for (const auto& l : g.links) {
    if (l.enabled) ++indegree[l.dst];
  }
  const auto succ = enabled_successors(g);
  std::set<int> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.insert(id);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    const int n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    auto it = succ.find(n);
    if (it == succ.end()) continue;
    for (int m : it->second) {
      if (--indegree[m] == 0) ready.insert(m);
    }
  }
  if (order.size() != indegree.size()) return std::nullopt;
  return order;
}

void sort_links(CppnGenome& g) {
  std::sort(g.links.begin(), g.links.end(),
            [](const LinkGene& x, const LinkGene& y) { return x.innovation < y.innovation; });
}

}  // namespace

double apply_activation(Activation kind, double x) {
  switch (kind) {
    case Activation::Sawtooth:
      return 2.0 * (x - std::floor(x)) - 1.0;
    case Activation::LinearPiecewise:
      return std::clamp(x, -1.0, 1.0);
    case Activation::Identity:
      return x;
    case Activation::SquareWave:
      return std::sin(std::numbers::pi * x) >= 0.0 ? 1.0 : -1.0;
    case Activation::Cosine:
      return std::cos(x);
    case Activation::Sine:
      return std::sin(x);
    case Activation::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::Gaussian:
      return std::exp(-x * x);
    case Activation::TriangleWave:
      return 2.0 * std::fabs(2.0 * (x / 2.0 - std::floor(x / 2.0 + 0.5))) - 1.0;
    case Activation::AbsoluteValue:
      return std::fabs(x);
  }
  return x;
}

std::string_view activation_name(Activation kind) { return kActivationNames[static_cast<std::size_t>(kind)]; }

std::optional<Activation> activation_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kActivationNames.size(); ++i) {
    if (kActivationNames[i] == name) return kAllActivations[i];
  }
  return std::nullopt;
}

const NodeGene* CppnGenome::find_node(int id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

InnovationCounter::InnovationCounter(int declared_inputs, int outputs)
    : next_innovation_(static_cast<std::int64_t>(declared_inputs + 1) * outputs),
      next_node_(declared_inputs + 1 + outputs) {}

CppnGenome minimal_genome(int declared_inputs, int outputs, Rng& rng) {
  if (declared_inputs < 1 || outputs < 1) throw InputError("CPPN needs at least one input and one output");
  CppnGenome g;
  g.input_count = declared_inputs + 1;
  g.output_count = outputs;
  for (int i = 0; i < g.input_count; ++i) g.nodes.push_back({i, NodeRole::Input, Activation::Identity});
  for (int k = 0; k < outputs; ++k) g.nodes.push_back({g.output_id(k), NodeRole::Output, Activation::Identity});
  std::int64_t innovation = 0;
  for (int i = 0; i < g.input_count; ++i) {
    for (int k = 0; k < outputs; ++k) {
      g.links.push_back({innovation++, i, g.output_id(k), rng.uniform(-1.0, 1.0), true});
    }
  }
  return g;
}

bool is_acyclic(const CppnGenome& genome) { return topological_order(genome).has_value(); }

void validate_genome(const CppnGenome& g) {
  if (g.input_count < 2 || g.output_count < 1) throw InputError("genome needs a declared input, a bias and an output");
  std::map<int, NodeRole> roles;
  for (const auto& n : g.nodes) {
    if (!roles.emplace(n.id, n.role).second) throw InputError("duplicate node id " + std::to_string(n.id));
  }
  for (int i = 0; i < g.input_count; ++i) {
    auto it = roles.find(i);
    if (it == roles.end() || it->second != NodeRole::Input) throw InputError("missing input node " + std::to_string(i));
  }
  for (int k = 0; k < g.output_count; ++k) {
    auto it = roles.find(g.output_id(k));
    if (it == roles.end() || it->second != NodeRole::Output) {
      throw InputError("missing output node " + std::to_string(g.output_id(k)));
    }
  }
  const auto inputs = std::count_if(g.nodes.begin(), g.nodes.end(), [](const NodeGene& n) { return n.role == NodeRole::Input; });
  const auto outs = std::count_if(g.nodes.begin(), g.nodes.end(), [](const NodeGene& n) { return n.role == NodeRole::Output; });
  if (inputs != g.input_count || outs != g.output_count) throw InputError("input/output node count mismatch");

  std::set<std::int64_t> innovations;
  std::set<std::pair<int, int>> enabled_pairs;
  for (std::size_t i = 0; i < g.links.size(); ++i) {
    const auto& l = g.links[i];
    if (i > 0 && g.links[i - 1].innovation >= l.innovation) throw InputError("links not sorted by innovation");
    if (!innovations.insert(l.innovation).second) throw InputError("duplicate innovation number");
    if (!roles.count(l.src) || !roles.count(l.dst)) throw InputError("link endpoint does not exist");
    if (l.src == l.dst) throw InputError("self link");
    if (roles[l.dst] == NodeRole::Input) throw InputError("link into an input node");
    if (l.enabled && !enabled_pairs.emplace(l.src, l.dst).second) throw InputError("duplicate enabled link");
  }
  if (!is_acyclic(g)) throw InputError("enabled links form a cycle");
}

CompiledCppn::CompiledCppn(const CppnGenome& genome) : declared_inputs_(genome.declared_inputs()) {
  validate_genome(genome);
  const auto order = topological_order(genome);
  std::unordered_map<int, int> slot_of;
  for (const auto& n : genome.nodes) slot_of.emplace(n.id, static_cast<int>(slot_of.size()));
  slot_count_ = static_cast<int>(slot_of.size());
  bias_slot_ = slot_of.at(genome.bias_id());
  for (int i = 0; i < declared_inputs_; ++i) input_slots_.push_back(slot_of.at(i));

  std::unordered_map<int, std::vector<std::pair<int, double>>> incoming;
  for (const auto& l : genome.links) {
    if (l.enabled) incoming[l.dst].emplace_back(slot_of.at(l.src), l.weight);
  }
  for (int id : *order) {
    const NodeGene* n = genome.find_node(id);
    if (n->role == NodeRole::Input) continue;
    steps_.push_back({slot_of.at(id), n->activation, std::move(incoming[id])});
  }
  for (int k = 0; k < genome.output_count; ++k) output_slots_.push_back(slot_of.at(genome.output_id(k)));
}

std::vector<double> CompiledCppn::activate(std::span<const double> inputs) const {
  if (static_cast<int>(inputs.size()) != declared_inputs_) {
    throw InputError("CPPN expects " + std::to_string(declared_inputs_) + " inputs, got " +
                     std::to_string(inputs.size()));
  }
  std::vector<double> value(static_cast<std::size_t>(slot_count_), 0.0);
  for (int i = 0; i < declared_inputs_; ++i) {
    value[static_cast<std::size_t>(input_slots_[static_cast<std::size_t>(i)])] = inputs[static_cast<std::size_t>(i)];
  }
  value[static_cast<std::size_t>(bias_slot_)] = 1.0;

  std::vector<double> terms;
  for (const auto& step : steps_) {
    terms.clear();
    for (const auto& [src, w] : step.incoming) terms.push_back(w * value[static_cast<std::size_t>(src)]);
    value[static_cast<std::size_t>(step.slot)] = apply_activation(step.activation, exact_sum(terms));
  }
  std::vector<double> out;
  out.reserve(output_slots_.size());
  for (int slot : output_slots_) {
    const double v = value[static_cast<std::size_t>(slot)];
    out.push_back(std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0));
  }
  return out;
}

std::vector<double> activate(const CppnGenome& genome, std::span<const double> inputs) {
  return CompiledCppn(genome).activate(inputs);
}

CppnGenome mutate(const CppnGenome& genome, Rng& rng, InnovationCounter& counter, const MutationRates& rates,
                  MutationReport* report) {
  CppnGenome g = genome;
  MutationReport local;

  if (rng.bernoulli(rates.splice)) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < g.links.size(); ++i) {
      if (g.links[i].enabled) candidates.push_back(i);
    }
    if (!candidates.empty()) {
      LinkGene& old = g.links[candidates[rng.index(candidates.size())]];
      old.enabled = false;
      const int src = old.src;
      const int dst = old.dst;
      const double w = old.weight;
      const int node = counter.next_node_id();
      g.nodes.push_back({node, NodeRole::Hidden, kAllActivations[rng.index(kAllActivations.size())]});
      g.links.push_back({counter.next_innovation(), src, node, 1.0, true});
      g.links.push_back({counter.next_innovation(), node, dst, w, true});
      local.spliced = true;
    }
  }

  if (rng.bernoulli(rates.add_link)) {
    std::set<std::pair<int, int>> existing;
    for (const auto& l : g.links) existing.emplace(l.src, l.dst);
    const auto succ = enabled_successors(g);
    std::vector<std::pair<int, int>> candidates;
    for (const auto& s : g.nodes) {
      if (s.role == NodeRole::Output) continue;
      for (const auto& d : g.nodes) {
        if (d.role == NodeRole::Input || s.id == d.id || existing.count({s.id, d.id})) continue;
        if (reaches(succ, d.id, s.id)) continue;
        candidates.emplace_back(s.id, d.id);
      }
    }
    if (!candidates.empty()) {
      const auto [src, dst] = candidates[rng.index(candidates.size())];
      g.links.push_back({counter.next_innovation(), src, dst, rng.uniform(-1.0, 1.0), true});
      local.linked = true;
    }
  }

  if (rng.bernoulli(rates.swap_activation)) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (g.nodes[i].role != NodeRole::Input) candidates.push_back(i);
    }
    if (!candidates.empty()) {
      NodeGene& n = g.nodes[candidates[rng.index(candidates.size())]];
      std::vector<Activation> others;
      for (auto a : kAllActivations) {
        if (a != n.activation) others.push_back(a);
      }
      n.activation = others[rng.index(others.size())];
      local.swapped = true;
    }
  }

  for (auto& l : g.links) {
    if (rng.bernoulli(rates.perturb)) {
      l.weight += rng.normal();
      ++local.perturbed;
    }
  }

  sort_links(g);
  if (report) *report = local;
  return g;
}

CppnGenome crossover(const CppnGenome& a, const CppnGenome& b, Parent fitter, Rng& rng) {
  if (a.input_count != b.input_count || a.output_count != b.output_count) {
    throw InputError("crossover parents have different input/output signatures");
  }
  const CppnGenome& fit = fitter == Parent::A ? a : b;
  const CppnGenome& other = fitter == Parent::A ? b : a;

  std::unordered_map<std::int64_t, const LinkGene*> other_links;
  for (const auto& l : other.links) other_links.emplace(l.innovation, &l);

  CppnGenome child;
  child.input_count = fit.input_count;
  child.output_count = fit.output_count;
  std::set<int> used;
  for (const auto& l : fit.links) {
    LinkGene gene = l;
    auto it = other_links.find(l.innovation);
    if (it != other_links.end() && rng.bernoulli(0.5)) gene.weight = it->second->weight;
    child.links.push_back(gene);
    used.insert(l.src);
    used.insert(l.dst);
  }
  for (const auto& n : fit.nodes) {
    if (n.role != NodeRole::Hidden || used.count(n.id)) child.nodes.push_back(n);
  }
  return child;
}

}  // namespace levelgen
