#include "rio/logic.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rio/error.hpp"

namespace rio {

std::string_view construct_name(Construct c) {
  switch (c) {
    case Construct::Negation: return "negation";
    case Construct::Conjunction: return "conjunction";
    case Construct::Disjunction: return "disjunction";
    case Construct::Implication: return "implication";
    case Construct::Biconditional: return "biconditional";
  }
  return "?";
}

// ---------------------------------------------------------------- Formula

Formula Formula::atom(std::string name) {
  return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(name), nullptr, nullptr}));
}

Formula Formula::negation(Formula operand) {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, std::move(operand.node_), nullptr}));
}

Formula Formula::binary(Kind kind, Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{kind, {}, std::move(lhs.node_), std::move(rhs.node_)}));
}

std::size_t Formula::connective_count() const {
  switch (kind()) {
    case Kind::Atom: return 0;
    case Kind::Not: return 1 + lhs().connective_count();
    default: return 1 + lhs().connective_count() + rhs().connective_count();
  }
}

void Formula::collect_atoms(std::vector<std::string>& out) const {
  switch (kind()) {
    case Kind::Atom: out.push_back(name()); break;
    case Kind::Not: lhs().collect_atoms(out); break;
    default:
      lhs().collect_atoms(out);
      rhs().collect_atoms(out);
  }
}

namespace {

// Binding strength: higher binds tighter.
int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Atom: return 6;
    case Formula::Kind::Not: return 5;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Iff: return 1;
  }
  return 0;
}

std::string_view operator_text(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::And: return " & ";
    case Formula::Kind::Or: return " | ";
    case Formula::Kind::Implies: return " -> ";
    case Formula::Kind::Iff: return " <-> ";
    default: return "";
  }
}

void render(const Formula& f, std::string& out) {
  auto wrapped = [&out](const Formula& child, bool parens) {
    if (parens) out += '(';
    render(child, out);
    if (parens) out += ')';
  };
  const int prec = precedence(f.kind());
  switch (f.kind()) {
    case Formula::Kind::Atom: out += f.name(); return;
    case Formula::Kind::Not:
      out += '!';
      wrapped(f.lhs(), precedence(f.lhs().kind()) < prec);
      return;
    case Formula::Kind::Implies:
      // right-associative
      wrapped(f.lhs(), precedence(f.lhs().kind()) <= prec);
      out += operator_text(f.kind());
      wrapped(f.rhs(), precedence(f.rhs().kind()) < prec);
      return;
    default:
      // & | <-> parse left-associative
      wrapped(f.lhs(), precedence(f.lhs().kind()) < prec);
      out += operator_text(f.kind());
      wrapped(f.rhs(), precedence(f.rhs().kind()) <= prec);
      return;
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::string out;
  render(*this, out);
  return out;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::Atom: return a.name() == b.name();
    case Formula::Kind::Not: return a.lhs() == b.lhs();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

ConstructCounts count_constructs(const Formula& formula) {
  ConstructCounts counts{};
  auto visit = [&counts](auto&& self, const Formula& f) -> void {
    switch (f.kind()) {
      case Formula::Kind::Atom: return;
      case Formula::Kind::Not:
        ++counts[static_cast<std::size_t>(Construct::Negation)];
        self(self, f.lhs());
        return;
      case Formula::Kind::And: ++counts[static_cast<std::size_t>(Construct::Conjunction)]; break;
      case Formula::Kind::Or: ++counts[static_cast<std::size_t>(Construct::Disjunction)]; break;
      case Formula::Kind::Implies: ++counts[static_cast<std::size_t>(Construct::Implication)]; break;
      case Formula::Kind::Iff: ++counts[static_cast<std::size_t>(Construct::Biconditional)]; break;
    }
    self(self, f.lhs());
    self(self, f.rhs());
  };
  visit(visit, formula);
  return counts;
}

// ---------------------------------------------------------------- FaultModel

FaultModel FaultModel::uniform(double p) {
  FaultModel fm;
  fm.construct_priors.fill(p);
  return fm;
}

void FaultModel::validate() const {
  for (Construct c : kAllConstructs) {
    const double p = (*this)[c];
    if (!(p > 0.0 && p < 1.0)) {
      throw InputError("fault probability for " + std::string(construct_name(c)) + " must lie in (0, 1)");
    }
  }
}

double axiom_fault_probability(const Axiom& axiom, const FaultModel& fm) {
  if (axiom.prior) return *axiom.prior;
  const ConstructCounts counts = count_constructs(axiom.formula);
  double keep = 1.0;
  for (Construct c : kAllConstructs) {
    keep *= std::pow(1.0 - fm[c], counts[static_cast<std::size_t>(c)]);
  }
  return 1.0 - keep;
}

// ---------------------------------------------------------------- KnowledgeBase

KnowledgeBase::KnowledgeBase(std::vector<Axiom> axioms, std::vector<std::string> background_ids,
                             std::vector<std::string> coherency_atoms)
    : axioms_(std::move(axioms)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < axioms_.size(); ++i) {
    const Axiom& ax = axioms_[i];
    if (!by_id_.emplace(ax.id, static_cast<AxiomIndex>(i)).second) {
      throw InputError("duplicate axiom id '" + ax.id + "'");
    }
    if (ax.prior && !(*ax.prior >= 0.0 && *ax.prior <= 1.0)) {
      throw InputError("prior of axiom '" + ax.id + "' outside [0, 1]");
    }
    std::vector<std::string> atoms;
    ax.formula.collect_atoms(atoms);
    names.insert(atoms.begin(), atoms.end());
  }
  signature_.assign(names.begin(), names.end());
  for (std::size_t i = 0; i < signature_.size(); ++i) atom_index_.emplace(signature_[i], static_cast<AtomId>(i));

  std::vector<AxiomIndex> bg;
  for (const std::string& id : background_ids) {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw InputError("background declaration names unknown axiom '" + id + "'");
    bg.push_back(it->second);
  }
  background_ = AxiomSet(std::move(bg));
  std::vector<AxiomIndex> diag;
  for (std::size_t i = 0; i < axioms_.size(); ++i) {
    if (!background_.contains(static_cast<AxiomIndex>(i))) diag.push_back(static_cast<AxiomIndex>(i));
  }
  diagnosable_ = AxiomSet(std::move(diag));

  for (const std::string& name : coherency_atoms) {
    auto id = atom_id(name);
    if (!id) throw InputError("coherency atom '" + name + "' does not occur in any axiom");
    if (std::find(coherency_.begin(), coherency_.end(), *id) == coherency_.end()) coherency_.push_back(*id);
  }
  std::sort(coherency_.begin(), coherency_.end());
}

std::optional<AxiomIndex> KnowledgeBase::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

AxiomSet KnowledgeBase::indices_of(std::span<const std::string> ids) const {
  std::vector<AxiomIndex> out;
  for (const std::string& id : ids) {
    auto i = index_of(id);
    if (!i) throw InputError("unknown axiom id '" + id + "'");
    out.push_back(*i);
  }
  return AxiomSet(std::move(out));
}

std::vector<std::string> KnowledgeBase::ids_of(const AxiomSet& set) const {
  std::vector<std::string> out;
  out.reserve(set.size());
  for (AxiomIndex i : set) out.push_back(axioms_.at(i).id);
  return out;
}

std::optional<AtomId> KnowledgeBase::atom_id(std::string_view name) const {
  auto it = atom_index_.find(std::string(name));
  if (it == atom_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<AtomId> KnowledgeBase::atoms_of(const Formula& f) const {
  std::vector<std::string> names;
  f.collect_atoms(names);
  std::vector<AtomId> out;
  for (const auto& n : names) {
    if (auto id = atom_id(n)) out.push_back(*id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string KnowledgeBase::render(const LiteralSet& literals) const {
  std::string out = "{";
  bool first = true;
  for (const Literal& l : literals) {
    if (!first) out += ", ";
    first = false;
    if (!l.positive) out += '!';
    out += atom_name(l.atom);
  }
  out += '}';
  return out;
}

// ---------------------------------------------------------------- parser

namespace {

bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

enum class Tok { Ident, Number, LBracket, RBracket, Eq, Colon, Not, And, Or, Implies, Iff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t column;  // 1-based
};

class LineLexer {
 public:
  LineLexer(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line_.size()) {
      const char c = line_[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      const std::size_t col = i + 1;
      if (is_ident_start(c)) {
        std::size_t j = i + 1;
        // Axiom ids may contain dots (prefixed ids such as o1.ax3).
        while (j < line_.size() && (is_ident_char(line_[j]) || line_[j] == '.')) ++j;
        out.push_back({Tok::Ident, line_.substr(i, j - i), col});
        i = j;
        continue;
      }
      if ((c >= '0' && c <= '9') || c == '.') {
        std::size_t j = i + 1;
        while (j < line_.size() && (std::isdigit(static_cast<unsigned char>(line_[j])) || line_[j] == '.' ||
                                    line_[j] == 'e' || line_[j] == 'E' ||
                                    ((line_[j] == '-' || line_[j] == '+') && (line_[j - 1] == 'e' || line_[j - 1] == 'E')))) {
          ++j;
        }
        out.push_back({Tok::Number, line_.substr(i, j - i), col});
        i = j;
        continue;
      }
      if (line_.substr(i, 3) == "<->") {
        out.push_back({Tok::Iff, line_.substr(i, 3), col});
        i += 3;
        continue;
      }
      if (line_.substr(i, 2) == "->") {
        out.push_back({Tok::Implies, line_.substr(i, 2), col});
        i += 2;
        continue;
      }
      Tok kind;
      switch (c) {
        case '[': kind = Tok::LBracket; break;
        case ']': kind = Tok::RBracket; break;
        case '=': kind = Tok::Eq; break;
        case ':': kind = Tok::Colon; break;
        case '!': kind = Tok::Not; break;
        case '&': kind = Tok::And; break;
        case '|': kind = Tok::Or; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        default: throw InputError(std::string("unexpected character '") + c + "'", line_no_, col);
      }
      out.push_back({kind, line_.substr(i, 1), col});
      ++i;
    }
    out.push_back({Tok::End, {}, line_.size() + 1});
    return out;
  }

 private:
  std::string_view line_;
  std::size_t line_no_;
};

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line_no) : toks_(std::move(tokens)), line_no_(line_no) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_end() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw InputError(message, line_no_, at.column);
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what, peek());
    return next();
  }

  Formula formula() {
    Formula f = parse_iff();
    if (!at_end()) fail("unexpected token '" + std::string(peek().text) + "'", peek());
    return f;
  }

 private:
  Formula parse_iff() {
    Formula lhs = parse_implies();
    while (peek().kind == Tok::Iff) {
      next();
      lhs = Formula::biconditional(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (peek().kind == Tok::Implies) {
      next();
      return Formula::implication(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (peek().kind == Tok::Or) {
      next();
      lhs = Formula::disjunction(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (peek().kind == Tok::And) {
      next();
      lhs = Formula::conjunction(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Formula parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Not:
        next();
        return Formula::negation(parse_unary());
      case Tok::LParen: {
        next();
        Formula inner = parse_iff();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
        if (t.text.find('.') != std::string_view::npos) fail("invalid atom name '" + std::string(t.text) + "'", t);
        next();
        return Formula::atom(std::string(t.text));
      case Tok::End: fail("missing operand", t);
      default: fail("expected operand, found '" + std::string(t.text) + "'", t);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t line_no_;
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text) {
  std::vector<Axiom> axioms;
  std::vector<std::string> background;
  std::vector<std::string> coherent;
  std::set<std::string> seen_ids;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::string_view trimmed = line;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t')) trimmed.remove_prefix(1);
    if (trimmed.empty() || trimmed.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }

    if (trimmed.front() == '@') {
      const std::size_t offset = static_cast<std::size_t>(trimmed.data() - line.data());
      std::size_t word_end = 1;
      while (word_end < trimmed.size() && is_ident_char(trimmed[word_end])) ++word_end;
      const std::string_view directive = trimmed.substr(1, word_end - 1);
      std::vector<std::string>* target = nullptr;
      if (directive == "background") {
        target = &background;
      } else if (directive == "coherent") {
        target = &coherent;
      } else {
        throw InputError("unknown directive '@" + std::string(directive) + "'", line_no, offset + 1);
      }
      std::string rest(line.substr(offset + word_end));
      for (char& c : rest) {
        if (c == ',') c = ' ';
      }
      std::istringstream words(rest);
      std::string word;
      while (words >> word) target->push_back(word);
      if (end == text.size()) break;
      continue;
    }

    LineParser p(LineLexer(line, line_no).run(), line_no);
    const Token& kw = p.next();
    if (kw.kind != Tok::Ident || kw.text != "axiom") p.fail("expected 'axiom' or a directive", kw);
    const Token& id = p.expect(Tok::Ident, "axiom id");
    Axiom ax{std::string(id.text), Formula::atom("_"), std::nullopt};
    if (!seen_ids.insert(ax.id).second) p.fail("duplicate axiom id '" + ax.id + "'", id);
    if (p.peek().kind == Tok::LBracket) {
      p.next();
      const Token& key = p.expect(Tok::Ident, "'p'");
      if (key.text != "p") p.fail("expected 'p'", key);
      p.expect(Tok::Eq, "'='");
      const Token& num = p.expect(Tok::Number, "probability");
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), value);
      if (ec != std::errc() || ptr != num.text.data() + num.text.size()) p.fail("malformed number", num);
      if (!(value > 0.0 && value < 1.0)) p.fail("prior must lie in (0, 1)", num);
      ax.prior = value;
      p.expect(Tok::RBracket, "']'");
    }
    p.expect(Tok::Colon, "':'");
    ax.formula = p.formula();
    axioms.push_back(std::move(ax));
    if (end == text.size()) break;
  }
  return KnowledgeBase(std::move(axioms), std::move(background), std::move(coherent));
}

KnowledgeBase load_kb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open KB file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kb(buf.str());
}

std::string serialize_kb(const KnowledgeBase& kb) {
  std::ostringstream out;
  if (!kb.coherency_atoms().empty()) {
    out << "@coherent";
    for (AtomId a : kb.coherency_atoms()) out << ' ' << kb.atom_name(a);
    out << '\n';
  }
  if (!kb.background().empty()) {
    out << "@background";
    for (AxiomIndex i : kb.background()) out << ' ' << kb.axiom(i).id;
    out << '\n';
  }
  for (const Axiom& ax : kb.axioms()) {
    out << "axiom " << ax.id;
    if (ax.prior) {
      char buf[64];
      // The file format only admits open-interval priors.
      const double p = (*ax.prior > 0.0 && *ax.prior < 1.0) ? *ax.prior : std::clamp(*ax.prior, 1e-6, 1.0 - 1e-6);
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p);
      out << " [p=" << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << ']';
    }
    out << " : " << ax.formula.to_string() << '\n';
  }
  return out.str();
}

}  // namespace rio
