#pragma once

// Query scores, Bayesian belief updates, cautiousness adaptation and query
// selection. Beliefs are probability vectors aligned with the leading list.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rio/query.hpp"

namespace rio {

enum class Strategy { Split, Entropy, Rio };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

/// ||d_x| - |d_nx|| + |d_z|.
int score_split(const Partition& p);

/// p(yes) = sum over d_x + half the d_z mass.
double answer_probability(const Partition& p, std::span<const double> beliefs);
/// p(no) = sum over d_nx + half the d_z mass, summed directly.
double answer_probability_no(const Partition& p, std::span<const double> beliefs);

/// Expected posterior entropy up to a constant; 0 log 0 = 0.
double score_entropy(const Partition& p, std::span<const double> beliefs);

/// Bayesian update after `a`: rejected diagnoses get 0, d_z members keep half
/// weight, survivors are renormalized. Throws Error when the answer had
/// probability 0 under the current beliefs.
std::vector<double> posterior_update(std::span<const double> beliefs, const Partition& p, Answer a);

/// weights[i] * (1/2)^z[i], normalized.
std::vector<double> adjust_for_history(std::span<const double> weights, std::span<const int> z);

struct CautiousnessParams {
  double c = 0.25;
  double c_min = 0.0;
  double c_max = 4.0 / 9.0;
  double epsilon = 0.25;

  /// Throws InputError unless 0 <= c_min <= c <= c_max <= 1/2 and 0 < epsilon < 1/2.
  void validate() const;
};

/// c += 2 (c_max - c_min) (floor(|D|/2 - epsilon)/|D| - e), clamped to
/// [c_min, c_max]. `leading_size` is |D| before elimination.
CautiousnessParams update_cautiousness(const CautiousnessParams& cp, const Partition& p, Answer a,
                                       std::size_t leading_size);

/// p_max >= (1 + sigma/100) p_second; true for a single diagnosis.
bool above_threshold(std::span<const double> beliefs, double sigma);

/// Index of the selected query. Ties: smallest d_x tuple, then smallest
/// literal set. `queries` must be nonempty.
std::size_t select_query(Strategy s, std::span<const Query> queries, std::span<const double> beliefs, double c);

}  // namespace rio
