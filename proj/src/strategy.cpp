#include "rio/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "rio/error.hpp"

namespace rio {

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Split: return "split";
    case Strategy::Entropy: return "entropy";
    case Strategy::Rio: return "rio";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  if (text == "split") return Strategy::Split;
  if (text == "entropy") return Strategy::Entropy;
  if (text == "rio") return Strategy::Rio;
  return std::nullopt;
}

int score_split(const Partition& p) {
  return std::abs(static_cast<int>(p.dx.size()) - static_cast<int>(p.dnx.size())) + static_cast<int>(p.dz.size());
}

namespace {

double mass(const std::vector<std::size_t>& members, std::span<const double> beliefs) {
  double s = 0.0;
  for (std::size_t i : members) s += beliefs[i];
  return s;
}

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

double answer_probability(const Partition& p, std::span<const double> beliefs) {
  return mass(p.dx, beliefs) + 0.5 * mass(p.dz, beliefs);
}

double answer_probability_no(const Partition& p, std::span<const double> beliefs) {
  return mass(p.dnx, beliefs) + 0.5 * mass(p.dz, beliefs);
}

double score_entropy(const Partition& p, std::span<const double> beliefs) {
  return plogp(answer_probability(p, beliefs)) + plogp(answer_probability_no(p, beliefs)) + mass(p.dz, beliefs) + 1.0;
}

std::vector<double> posterior_update(std::span<const double> beliefs, const Partition& p, Answer a) {
  std::vector<double> out(beliefs.size(), 0.0);
  const auto& keep = a == Answer::Yes ? p.dx : p.dnx;
  for (std::size_t i : keep) out[i] = beliefs[i];
  for (std::size_t i : p.dz) out[i] = 0.5 * beliefs[i];
  double total = 0.0;
  for (double v : out) total += v;
  if (!(total > 0.0)) throw Error("answer has zero probability under the current beliefs");
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> adjust_for_history(std::span<const double> weights, std::span<const int> z) {
  std::vector<double> out(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = std::ldexp(weights[i], -z[i]);
    total += out[i];
  }
  if (!(total > 0.0)) throw Error("no probability mass left on the leading diagnoses");
  for (double& v : out) v /= total;
  return out;
}

void CautiousnessParams::validate() const {
  if (!(c_min >= 0.0 && c_min <= c && c <= c_max && c_max <= 0.5)) {
    throw InputError("cautiousness must satisfy 0 <= c_min <= c <= c_max <= 0.5");
  }
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw InputError("epsilon must lie in (0, 0.5)");
}

CautiousnessParams update_cautiousness(const CautiousnessParams& cp, const Partition& p, Answer a,
                                       std::size_t leading_size) {
  const double n = static_cast<double>(leading_size);
  const double adj = std::floor(n / 2.0 - cp.epsilon) / n - elimination_rate(p, a);
  CautiousnessParams out = cp;
  out.c = std::clamp(cp.c + 2.0 * (cp.c_max - cp.c_min) * adj, cp.c_min, cp.c_max);
  return out;
}

bool above_threshold(std::span<const double> beliefs, double sigma) {
  if (beliefs.size() <= 1) return true;
  double first = -1.0, second = -1.0;
  for (double b : beliefs) {
    if (b > first) {
      second = first;
      first = b;
    } else if (b > second) {
      second = b;
    }
  }
  return first >= (1.0 + sigma / 100.0) * second;
}

namespace {

bool structurally_before(const Query& a, const Query& b) {
  if (a.partition.dx != b.partition.dx) return a.partition.dx < b.partition.dx;
  return a.literals < b.literals;
}

template <class Score>
std::optional<std::size_t> argmin(std::span<const Query> qs, const std::vector<std::size_t>& among, Score score) {
  std::optional<std::size_t> best;
  decltype(score(qs[0])) best_score{};
  for (std::size_t i : among) {
    const auto s = score(qs[i]);
    if (!best || s < best_score || (s == best_score && structurally_before(qs[i], qs[*best]))) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

std::size_t select_query(Strategy s, std::span<const Query> queries, std::span<const double> beliefs, double c) {
  if (queries.empty()) throw std::invalid_argument("select_query needs at least one query");
  std::vector<std::size_t> all(queries.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto ent = [&](const Query& q) { return score_entropy(q.partition, beliefs); };

  if (s == Strategy::Split) return *argmin(queries, all, [](const Query& q) { return score_split(q.partition); });
  const std::size_t best = *argmin(queries, all, ent);
  if (s == Strategy::Entropy || !is_high_risk(queries[best].partition, c)) return best;

  // Least cautious among the non-high-risk queries.
  double least = 2.0;
  for (const Query& q : queries) {
    const double qc = query_cautiousness(q.partition);
    if (qc >= c) least = std::min(least, qc);
  }
  std::vector<std::size_t> lc;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (query_cautiousness(queries[i].partition) == least) lc.push_back(i);
  }
  if (lc.empty()) return best;
  return *argmin(queries, lc, ent);
}

}  // namespace rio
