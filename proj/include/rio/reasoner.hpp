#pragma once

// Consistency and entailment checks over subsets of a knowledge base.
//
// Every axiom is clausified once into a shared incremental solver and guarded
// by a selector variable; a Theory (axiom subset plus unit literals) is decided
// by solving under selector and literal assumptions. Results are memoized per
// Theory. All public members are safe to call concurrently.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rio/logic.hpp"
#include "rio/sat.hpp"

namespace rio {

/// A set of axioms of one KB together with asserted literals (e.g. the union
/// of positive test cases).
struct Theory {
  AxiomSet axioms;
  LiteralSet units;

  friend bool operator==(const Theory&, const Theory&) = default;
};

struct TheoryHash {
  std::size_t operator()(const Theory& t) const { return t.axioms.hash() * 31U ^ t.units.hash(); }
};

enum class Signs { PositiveOnly, Both };

struct Requirements {
  bool consistency = true;
  bool coherency = false;
};

struct ReasonerLimits {
  std::uint64_t conflict_budget = 5'000'000;
  /// Memo tables are cleared when they grow past this many entries.
  std::size_t cache_capacity = 200'000;
};

struct ReasonerStats {
  std::uint64_t sat_calls = 0;
  std::uint64_t cache_hits = 0;
};

class Reasoner {
 public:
  explicit Reasoner(std::shared_ptr<const KnowledgeBase> kb, ReasonerLimits limits = {});

  const KnowledgeBase& kb() const { return *kb_; }
  std::shared_ptr<const KnowledgeBase> kb_ptr() const { return kb_; }

  bool is_consistent(const Theory& theory) const;
  /// Consistency of theory plus the conjunction `extra`.
  bool is_consistent(const Theory& theory, const LiteralSet& extra) const;

  /// True iff every model of `theory` satisfies all of `conj`. An inconsistent
  /// theory entails everything.
  bool entails(const Theory& theory, const LiteralSet& conj) const;

  /// Exactly the literals over `vocab` entailed by a consistent theory.
  /// Throws std::logic_error when the theory is inconsistent.
  LiteralSet entailed_literals(const Theory& theory, std::span<const AtomId> vocab, Signs signs) const;

  /// Consistency, plus satisfiability of each coherency atom when required.
  bool meets_requirements(const Theory& theory, Requirements rq) const;
  bool meets_requirements(const Theory& theory, Requirements rq, std::span<const AtomId> coherency_atoms) const;

  ReasonerStats stats() const;

 private:
  bool solve_locked(const Theory& theory, const LiteralSet& extra) const;
  bool solve_uncached(const Theory& theory, const LiteralSet& extra) const;
  const std::optional<LiteralSet>& backbone_locked(const Theory& theory) const;
  void encode_axiom(AxiomIndex index);

  std::shared_ptr<const KnowledgeBase> kb_;
  ReasonerLimits limits_;
  std::vector<sat::Var> selectors_;

  mutable std::mutex mutex_;
  mutable sat::Solver solver_;
  mutable std::unordered_map<Theory, bool, TheoryHash> sat_cache_;
  mutable std::unordered_map<Theory, std::optional<LiteralSet>, TheoryHash> backbone_cache_;
  mutable ReasonerStats stats_;
};

}  // namespace rio
