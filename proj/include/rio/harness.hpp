#pragma once

// Alignment scenarios (two KBs joined by weighted correspondences), target
// diagnosis fixing, and batch benchmarking over simulated sessions.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rio/diagnosis.hpp"
#include "rio/session.hpp"

namespace rio {

enum class Relation { Subsumed, Subsumes, Equivalent };  // < > =

struct Correspondence {
  std::string id;  // axiom id of the translated correspondence
  std::string left;
  std::string right;
  Relation relation = Relation::Equivalent;
  double confidence = 1.0;
};

struct Alignment {
  std::vector<Correspondence> correspondences;
};

/// Columns `left,right,relation,confidence`, optionally preceded by an `id`
/// column. A header row is recognized and skipped; `#` lines and blank lines
/// are ignored. Rows without an id get m1, m2, ... in file order.
Alignment parse_alignment_csv(std::string_view text);
Alignment load_alignment(const std::string& path);

struct AlignOptions {
  /// Prior for KB axioms that carry no explicit prior of their own.
  double kb_prior = 0.001;
  /// Put every axiom of both KBs into the background.
  bool kbs_in_background = false;
};

struct AlignedKb {
  std::shared_ptr<const KnowledgeBase> kb;
  /// Axioms translated from the correspondences.
  AxiomSet alignment;
};

/// kb1 axioms, then kb2 axioms, then one axiom per correspondence: `<` gives
/// left -> right, `>` gives right -> left, `=` gives left <-> right, each with
/// prior 1 - confidence. Atoms are shared by name. Throws InputError on
/// dangling endpoints, confidences outside [0, 1] or clashing axiom ids.
AlignedKb build_aligned_kb(const KnowledgeBase& kb1, const KnowledgeBase& kb2, const Alignment& alignment,
                           const AlignOptions& opts = {});

/// Axioms of `aligned` translated from the given correspondences (matched by
/// left, right and relation). Throws InputError when one is not in the alignment.
AxiomSet alignment_axioms(const AlignedKb& aligned, const Alignment& alignment, const Alignment& subset);

/// A minimum-cardinality minimal diagnosis contained in `pool`; ties go to the
/// lexicographically smallest sorted id list. Throws NoDiagnosisError when no
/// diagnosis lies within the pool.
AxiomSet fix_target_diagnosis(const Dpi& dpi, const AxiomSet& pool, std::size_t search_width = 256);

/// Among the n leading diagnoses, the one with the most axioms outside
/// `alignment`; ties as above.
AxiomSet max_nonalignment_target(const Dpi& dpi, std::span<const double> axiom_p, const AxiomSet& alignment,
                                 std::size_t n);

// ---------------------------------------------------------------- benchmarks

struct BenchmarkRow {
  std::string instance;
  std::string strategy;
  std::size_t queries = 0;
  double debug_ms = 0.0;
  double react_ms = 0.0;
  bool target_found = false;
  std::vector<std::string> target;
  std::vector<std::string> result;
  std::string error;  // empty on success
};

struct StrategySummary {
  std::string strategy;
  std::size_t runs = 0;  // successful rows
  double mean_queries = 0.0;
  double mean_debug_ms = 0.0;
  double mean_react_ms = 0.0;
};

/// q of RIO next to the best and worst of the other strategies on one instance.
struct Comparison {
  std::string instance;
  std::size_t q_rio = 0;
  std::size_t q_min_other = 0;
  std::size_t q_max_other = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;  // instance-major, strategies in config order
  std::vector<StrategySummary> summary;
  std::vector<Comparison> comparisons;
};

struct BenchmarkOptions {
  std::size_t workers = 1;
  /// Timing columns are written empty when false, making the CSV reproducible.
  bool timing = true;
};

/// Config document:
///   {"strategies": [...], "session": {...}, "workers": 4, "timing": true,
///    "instances": [...]}
/// Instance kinds (relative paths resolve against `base_dir`):
///   {"label", "kb", "target": [ids]}
///   {"label", "kb1", "kb2", "mapping", "reference"?, "kbs_in_background"?,
///    "target_policy": "reference" | "max-nonalignment" | [ids]}
///   {"label", "generator": "chain_clash", "seed", "count"?, "axioms"?, "target_size"?, "chains"?}
///   {"label", "generator": "random_small", "seed", "count"?}
/// Generated instances use the planted target (chain_clash) or a seeded
/// random minimal diagnosis (random_small). Any instance may carry a
/// "session" object overriding keys of the shared session config.
BenchmarkReport run_benchmark(const nlohmann::json& config, const std::filesystem::path& base_dir,
                              std::optional<BenchmarkOptions> overrides = std::nullopt);

std::string report_csv(const BenchmarkReport& report, bool timing = true);
std::string summary_csv(const BenchmarkReport& report, bool timing = true);
std::string comparison_csv(const BenchmarkReport& report);

}  // namespace rio
