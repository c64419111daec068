#pragma once

// Seeded synthetic instances for property tests and benchmarks.

#include <cstdint>
#include <string>
#include <vector>

#include "rio/logic.hpp"

namespace rio {

struct RandomKbOptions {
  int min_axioms = 4;
  int max_axioms = 10;  // including background axioms
  int min_atoms = 3;
  int max_atoms = 8;
  /// Chance of declaring one coherency atom.
  double coherency_chance = 0.15;
};

/// A small random KB that is faulty under its requirements, with explicit
/// random priors on every diagnosable axiom. Deterministic in `seed`.
KnowledgeBase random_small_kb(std::uint64_t seed, const RandomKbOptions& opts = {});

struct ChainClashOptions {
  int axioms = 100;
  int target_size = 3;
  int chains = 6;
};

struct PlantedInstance {
  KnowledgeBase kb;
  std::vector<std::string> target;  // axiom ids of the planted diagnosis
};

/// Implication chains fanning out from a background assertion; a few of them
/// end in clashing literals. Exactly `target_size` mapping-style axioms are
/// wrong, and removing them repairs the KB. The remaining axioms carry low
/// priors, the planted ones moderate priors mixed with decoys.
PlantedInstance chain_clash_kb(std::uint64_t seed, const ChainClashOptions& opts = {});

}  // namespace rio
