#pragma once

// Diagnosis problem instances, minimal conflicts (QuickXPlain), diagnosis
// priors and best-first hitting-set search for the leading diagnoses.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rio/logic.hpp"
#include "rio/reasoner.hpp"

namespace rio {

// Axiom fault probabilities are clamped into this range so that priors of
// exactly 0 or 1 cannot wipe out all probability mass.
inline constexpr double kMinAxiomProbability = 1e-6;
inline constexpr double kMaxAxiomProbability = 1.0 - 1e-6;

/// <O, B, Tp, Tn> with requirements. O and B come from the reasoner's KB.
class Dpi {
 public:
  /// Validates that B plus the positive cases entail no negative case.
  Dpi(std::shared_ptr<const Reasoner> reasoner, Requirements requirements, std::vector<LiteralSet> positive = {},
      std::vector<LiteralSet> negative = {});

  /// Requirements default to consistency, plus coherency when the KB declares coherency atoms.
  static Dpi from_kb(std::shared_ptr<const KnowledgeBase> kb, ReasonerLimits limits = {});

  const Reasoner& reasoner() const { return *reasoner_; }
  std::shared_ptr<const Reasoner> reasoner_ptr() const { return reasoner_; }
  const KnowledgeBase& kb() const { return reasoner_->kb(); }
  const Requirements& requirements() const { return requirements_; }
  const std::vector<LiteralSet>& positive_cases() const { return positive_; }
  const std::vector<LiteralSet>& negative_cases() const { return negative_; }

  /// O \ B.
  const AxiomSet& candidates() const { return kb().diagnosable(); }
  const AxiomSet& background() const { return kb().background(); }
  /// Union of all positive test cases.
  const LiteralSet& positive_units() const { return positive_units_; }

  /// candidate + B + union(Tp).
  Theory theory_of(const AxiomSet& candidate) const;
  /// O*_i = (O \ D) + B + union(Tp).
  Theory theory_without(const AxiomSet& diagnosis) const;
  /// B + union(Tp) alone.
  Theory background_theory() const { return theory_of({}); }

  Dpi with_positive(LiteralSet test_case) const;
  Dpi with_negative(LiteralSet test_case) const;

 private:
  std::shared_ptr<const Reasoner> reasoner_;
  Requirements requirements_;
  std::vector<LiteralSet> positive_;
  std::vector<LiteralSet> negative_;
  LiteralSet positive_units_;
};

struct Diagnosis {
  AxiomSet axioms;
  /// Unnormalized prior in odds form: prod over axioms of p/(1-p).
  double weight = 0.0;

  friend bool operator==(const Diagnosis& a, const Diagnosis& b) { return a.axioms == b.axioms; }
};

struct SearchLimits {
  std::uint64_t max_expansions = 200'000;
};

/// True iff candidate + B + union(Tp) violates a requirement or entails a negative case.
bool is_faulty(const Dpi& dpi, const AxiomSet& candidate);

/// True iff removing `diagnosis` from O \ B leaves a non-faulty set.
inline bool is_diagnosis(const Dpi& dpi, const AxiomSet& diagnosis) {
  return !is_faulty(dpi, dpi.candidates() - diagnosis);
}
bool is_minimal_diagnosis(const Dpi& dpi, const AxiomSet& diagnosis);

/// A subset-minimal faulty subset of `candidate`, or nullopt when the
/// candidate is not faulty. Prefers axioms early in the global order.
std::optional<AxiomSet> quickxplain(const Dpi& dpi, const AxiomSet& candidate);

/// Per-axiom fault probabilities (explicit priors or construct-derived), clamped.
std::vector<double> axiom_probabilities(const KnowledgeBase& kb, const FaultModel& fm);

/// prod_{D} p * prod_{(O\B)\D} (1-p).
double diagnosis_probability(const AxiomSet& diagnosis, const AxiomSet& candidates, std::span<const double> axiom_p);
/// prod_{D} p/(1-p); proportional to diagnosis_probability for a fixed O \ B.
double diagnosis_weight(const AxiomSet& diagnosis, std::span<const double> axiom_p);

/// Diagnosis priors normalized over the given diagnoses.
std::vector<double> diagnosis_priors(std::span<const Diagnosis> diagnoses);
std::vector<double> diagnosis_priors(std::span<const AxiomSet> diagnoses, std::span<const double> axiom_p);

/// Up to n most probable minimal diagnoses, ordered by weight descending (ties
/// by axiom-index tuple). Throws NoDiagnosisError when O \ B is not faulty or
/// when no diagnosis exists, ResourceLimitError when the search budget is hit.
std::vector<Diagnosis> leading_diagnoses(const Dpi& dpi, std::span<const double> axiom_p, std::size_t n,
                                         SearchLimits limits = {});

/// Sorts diagnoses by their axiom-index tuple, the index order used for
/// partitions, subset enumeration and tie-breaking.
void sort_canonical(std::vector<Diagnosis>& diagnoses);

}  // namespace rio
