#pragma once

// The six-axiom university example and helpers to name its pieces.

#include <memory>
#include <string>
#include <vector>

#include "rio/diagnosis.hpp"
#include "rio/logic.hpp"
#include "rio/query.hpp"

namespace fixture {

extern const char* const kExampleKb;

std::shared_ptr<const rio::KnowledgeBase> example_kb();
rio::Dpi example_dpi();
std::vector<double> example_axiom_p();

/// {ax1}, ..., {ax6} as axiom-index sets.
rio::AxiomSet single(const rio::KnowledgeBase& kb, const std::string& id);
rio::AxiomSet ids(const rio::KnowledgeBase& kb, std::initializer_list<const char*> names);
rio::LiteralSet lits(const rio::KnowledgeBase& kb, std::initializer_list<const char*> atoms);

/// Leading diagnoses {ax1}..{ax6} in canonical order with odds weights.
std::vector<rio::Diagnosis> example_leading();

struct QueryRow {
  const char* name;
  std::vector<const char*> literals;
  std::vector<std::size_t> dx, dnx, dz;  // 1-based diagnosis numbers
};
/// The nine example queries; X8 carries the partition the three tests produce.
const std::vector<QueryRow>& example_queries();
rio::Partition to_partition(const QueryRow& row);

}  // namespace fixture
