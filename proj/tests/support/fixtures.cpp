#include "fixtures.hpp"

namespace fixture {

const char* const kExampleKb = R"(# university example
@background s1
axiom ax1 [p=0.001] : PhD -> Researcher
axiom ax2 [p=0.001] : Researcher -> DeptEmployee
axiom ax3 [p=0.001] : PhDStudent -> Student
axiom ax4 [p=0.001] : Student -> !DeptMember
axiom ax5 [p=0.1]   : PhDStudent -> PhD
axiom ax6 [p=0.15]  : DeptEmployee -> DeptMember
axiom s1 : PhDStudent
)";

std::shared_ptr<const rio::KnowledgeBase> example_kb() {
  static const auto kb = std::make_shared<const rio::KnowledgeBase>(rio::parse_kb(kExampleKb));
  return kb;
}

rio::Dpi example_dpi() { return rio::Dpi::from_kb(example_kb()); }

std::vector<double> example_axiom_p() { return rio::axiom_probabilities(*example_kb(), rio::FaultModel::uniform(0.01)); }

rio::AxiomSet single(const rio::KnowledgeBase& kb, const std::string& id) { return rio::AxiomSet{*kb.index_of(id)}; }

rio::AxiomSet ids(const rio::KnowledgeBase& kb, std::initializer_list<const char*> names) {
  rio::AxiomSet out;
  for (const char* n : names) out.insert(*kb.index_of(n));
  return out;
}

rio::LiteralSet lits(const rio::KnowledgeBase& kb, std::initializer_list<const char*> atoms) {
  rio::LiteralSet out;
  for (const char* a : atoms) {
    std::string name(a);
    const bool positive = name.empty() || name[0] != '!';
    if (!positive) name.erase(0, 1);
    out.insert(rio::Literal{*kb.atom_id(name), positive});
  }
  return out;
}

std::vector<rio::Diagnosis> example_leading() {
  const auto kb = example_kb();
  const auto p = example_axiom_p();
  std::vector<rio::Diagnosis> out;
  for (const char* id : {"ax1", "ax2", "ax3", "ax4", "ax5", "ax6"}) {
    const auto d = single(*kb, id);
    out.push_back({d, rio::diagnosis_weight(d, p)});
  }
  return out;
}

const std::vector<QueryRow>& example_queries() {
  static const std::vector<QueryRow> rows{
      {"X1", {"DeptEmployee", "Student"}, {4, 6}, {1, 2, 3, 5}, {}},
      {"X2", {"PhD"}, {1, 2, 3, 4, 6}, {5}, {}},
      {"X3", {"Researcher"}, {2, 3, 4, 6}, {1, 5}, {}},
      {"X4", {"Student"}, {1, 2, 4, 5, 6}, {3}, {}},
      {"X5", {"Researcher", "Student"}, {2, 4, 6}, {1, 3, 5}, {}},
      {"X6", {"DeptMember"}, {3, 4}, {1, 2, 5, 6}, {}},
      {"X7", {"PhD", "Student"}, {1, 2, 4, 6}, {3, 5}, {}},
      {"X8", {"DeptMember", "Student"}, {4}, {1, 2, 3, 5, 6}, {}},
      {"X9", {"DeptEmployee"}, {3, 4, 6}, {1, 2, 5}, {}},
  };
  return rows;
}

rio::Partition to_partition(const QueryRow& row) {
  auto zero = [](const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out;
    for (auto i : v) out.push_back(i - 1);
    return out;
  };
  return rio::Partition{zero(row.dx), zero(row.dnx), zero(row.dz)};
}

}  // namespace fixture
