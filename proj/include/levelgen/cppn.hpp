#pragma once

// Compositional pattern producing networks: genome, feedforward activation and
// NEAT-style variation (node splice, link add, activation swap, weight perturbation,
// innovation-aligned crossover).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "levelgen/rng.hpp"

namespace levelgen {

enum class Activation {
  Sawtooth,
  LinearPiecewise,
  Identity,
  SquareWave,
  Cosine,
  Sine,
  Sigmoid,
  Gaussian,
  TriangleWave,
  AbsoluteValue,
};

inline constexpr std::array<Activation, 10> kAllActivations = {
    Activation::Sawtooth, Activation::LinearPiecewise, Activation::Identity, Activation::SquareWave,
    Activation::Cosine,   Activation::Sine,            Activation::Sigmoid,  Activation::Gaussian,
    Activation::TriangleWave, Activation::AbsoluteValue,
};

double apply_activation(Activation kind, double x);
std::string_view activation_name(Activation kind);
std::optional<Activation> activation_from_name(std::string_view name);

enum class NodeRole { Input, Hidden, Output };

struct NodeGene {
  int id = 0;
  NodeRole role = NodeRole::Hidden;
  Activation activation = Activation::Identity;

  bool operator==(const NodeGene&) const = default;
};

struct LinkGene {
  std::int64_t innovation = 0;
  int src = 0;
  int dst = 0;
  double weight = 0.0;
  bool enabled = true;

  bool operator==(const LinkGene&) const = default;
};

/// Node ids: inputs 0..input_count-1 (the last one is the constant bias),
/// outputs input_count..input_count+output_count-1, hidden nodes above that.
/// Links are kept sorted by innovation.
struct CppnGenome {
  std::vector<NodeGene> nodes;
  std::vector<LinkGene> links;
  int input_count = 0;   // includes the bias input
  int output_count = 0;

  int declared_inputs() const noexcept { return input_count - 1; }
  int bias_id() const noexcept { return input_count - 1; }
  int output_id(int k) const noexcept { return input_count + k; }
  const NodeGene* find_node(int id) const;

  bool operator==(const CppnGenome&) const = default;
};

/// Hands out innovation numbers and hidden-node ids. Owned by a single evolution thread.
class InnovationCounter {
 public:
  /// Starts just past the ids and innovations used by minimal genomes of this signature.
  InnovationCounter(int declared_inputs, int outputs);
  InnovationCounter(std::int64_t next_innovation, int next_node_id)
      : next_innovation_(next_innovation), next_node_(next_node_id) {}

  std::int64_t next_innovation() { return next_innovation_++; }
  int next_node_id() { return next_node_++; }
  std::int64_t peek_innovation() const noexcept { return next_innovation_; }
  int peek_node_id() const noexcept { return next_node_; }

 private:
  std::int64_t next_innovation_;
  int next_node_;
};

/// Fully connected inputs (+bias) to outputs, weights uniform in [-1, 1],
/// identity outputs. Link innovations are 0..(I+1)*O-1 for every genome of a signature.
CppnGenome minimal_genome(int declared_inputs, int outputs, Rng& rng);

/// Throws InputError describing the first broken invariant.
void validate_genome(const CppnGenome& genome);
bool is_acyclic(const CppnGenome& genome);

/// Evaluation plan for repeated queries of one genome.
class CompiledCppn {
 public:
  explicit CompiledCppn(const CppnGenome& genome);

  int declared_inputs() const noexcept { return declared_inputs_; }
  int outputs() const noexcept { return static_cast<int>(output_slots_.size()); }

  /// Outputs in output-id order, each clamped to [-1, 1].
  std::vector<double> activate(std::span<const double> inputs) const;

 private:
  struct Step {
    int slot;
    Activation activation;
    std::vector<std::pair<int, double>> incoming;  // (source slot, weight), innovation order
  };

  int declared_inputs_;
  int slot_count_;
  int bias_slot_;
  std::vector<int> input_slots_;
  std::vector<Step> steps_;
  std::vector<int> output_slots_;
};

std::vector<double> activate(const CppnGenome& genome, std::span<const double> inputs);

struct MutationRates {
  double splice = 0.20;
  double add_link = 0.40;
  double swap_activation = 0.30;
  double perturb = 0.05;
};

struct MutationReport {
  bool spliced = false;
  bool linked = false;
  bool swapped = false;
  int perturbed = 0;
};

CppnGenome mutate(const CppnGenome& genome, Rng& rng, InnovationCounter& counter, const MutationRates& rates = {},
                  MutationReport* report = nullptr);

enum class Parent { A, B };

/// Topology and disjoint/excess genes come from the fitter parent; matching
/// genes draw their weight from either parent with equal probability.
CppnGenome crossover(const CppnGenome& a, const CppnGenome& b, Parent fitter, Rng& rng);

}  // namespace levelgen
