#pragma once

// Query generation: conjunctions of entailed literals that split the leading
// diagnoses into those predicting yes (d_x), those predicting no (d_nx) and
// those predicting neither (d_z). Partition members are positions in the
// leading-diagnosis list the caller passes in.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rio/diagnosis.hpp"

namespace rio {

enum class Answer { Yes, No };

struct Partition {
  std::vector<std::size_t> dx;
  std::vector<std::size_t> dnx;
  std::vector<std::size_t> dz;

  std::size_t total() const { return dx.size() + dnx.size() + dz.size(); }
  friend bool operator==(const Partition&, const Partition&) = default;
};

struct Query {
  LiteralSet literals;
  Partition partition;
};

struct QueryOptions {
  Signs signs = Signs::PositiveOnly;
  /// Atoms queries may mention; the whole signature when unset.
  std::optional<std::vector<AtomId>> vocabulary;
};

/// Literals entailed by every O*_i for i in `seed`, minus those already
/// entailed by B + union(Tp).
LiteralSet common_entailments(const Dpi& dpi, std::span<const Diagnosis> leading, std::span<const std::size_t> seed,
                              const QueryOptions& opts = {});

Partition classify(const Dpi& dpi, const LiteralSet& literals, std::span<const Diagnosis> leading);

/// Drops literals greedily in literal order while the partition is unchanged.
Query minimize_query(const Dpi& dpi, const Query& q, std::span<const Diagnosis> leading);

/// All discriminating queries, one per distinct partition, in subset order.
std::vector<Query> generate_queries(const Dpi& dpi, std::span<const Diagnosis> leading, const QueryOptions& opts = {});

/// min(|d_x|, |d_nx|) / |D|.
double query_cautiousness(const Partition& p);
double elimination_rate(const Partition& p, Answer a);
double worst_case_elimination_rate(const Partition& p);
/// qc < c.
bool is_high_risk(const Partition& p, double c);

}  // namespace rio
