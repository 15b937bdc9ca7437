#include "tnc/odesys.hpp"

#include <algorithm>
#include <cctype>

#include "tnc/parse.hpp"

namespace tnc {

// ---------------------------------------------------------------------------
// ODESystem

void ODESystem::add_variable(const std::string& name, LaurentPolynomial rhs, Rational initial,
                             Representation rep) {
  if (!is_identifier(name)) throw SystemError("invalid variable name '" + name + "'");
  if (has_variable(name) || is_placeholder(name)) throw SystemError("duplicate symbol '" + name + "'");
  if (initial.sign() < 0)
    throw SystemError("initial value of '" + name + "' is negative (" + initial.to_string() + ")");
  variables_.push_back(name);
  rhs_.push_back(std::move(rhs));
  initial_.push_back(std::move(initial));
  representation_.push_back(rep);
}

void ODESystem::add_placeholder(const std::string& name) {
  if (!is_identifier(name)) throw SystemError("invalid placeholder name '" + name + "'");
  if (has_variable(name)) throw SystemError("placeholder '" + name + "' is already a variable");
  placeholders_.insert(name);
}

bool ODESystem::has_variable(std::string_view name) const {
  return std::find(variables_.begin(), variables_.end(), name) != variables_.end();
}

std::size_t ODESystem::index_of(std::string_view v) const {
  auto it = std::find(variables_.begin(), variables_.end(), v);
  if (it == variables_.end()) throw SystemError("unknown variable '" + std::string(v) + "'");
  return static_cast<std::size_t>(it - variables_.begin());
}

const LaurentPolynomial& ODESystem::rhs(std::string_view v) const { return rhs_[index_of(v)]; }
const Rational& ODESystem::initial(std::string_view v) const { return initial_[index_of(v)]; }
Representation ODESystem::representation(std::string_view v) const { return representation_[index_of(v)]; }

void ODESystem::set_rhs(std::string_view v, LaurentPolynomial rhs) { rhs_[index_of(v)] = std::move(rhs); }

void ODESystem::set_initial(std::string_view v, Rational value) {
  if (value.sign() < 0)
    throw SystemError("initial value of '" + std::string(v) + "' is negative (" + value.to_string() + ")");
  initial_[index_of(v)] = std::move(value);
}

void ODESystem::set_representation(std::string_view v, Representation rep) {
  representation_[index_of(v)] = rep;
}

void ODESystem::check_closed() const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    for (const auto& s : rhs_[i].symbols())
      if (!has_variable(s) && !is_placeholder(s))
        throw SystemError("ODE for '" + variables_[i] + "' uses undeclared symbol '" + s + "'");
}

// ---------------------------------------------------------------------------
// Reactions

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::map<std::string, int> parse_complex(std::string_view side, std::string_view line) {
  std::map<std::string, int> out;
  const std::string text = trim(side);
  if (text == "0" || text == "empty" || text == "\xE2\x88\x85") return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t plus = text.find('+', start);
    const std::string item = trim(std::string_view(text).substr(start, plus - start));
    std::size_t i = 0;
    while (i < item.size() && std::isdigit(static_cast<unsigned char>(item[i]))) ++i;
    const int count = i == 0 ? 1 : std::stoi(item.substr(0, i));
    const std::string name = trim(std::string_view(item).substr(i));
    if (!is_identifier(name) || count <= 0)
      throw SystemError("bad species term '" + item + "' in reaction '" + std::string(line) + "'");
    out[name] += count;
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return out;
}

Rational parse_rate(std::string_view text, std::size_t& pos, std::string_view line) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos >= text.size() || text[pos] != '{')
    throw SystemError("expected '{rate}' in reaction '" + std::string(line) + "'");
  const std::size_t close = text.find('}', pos);
  if (close == std::string_view::npos)
    throw SystemError("unterminated rate in reaction '" + std::string(line) + "'");
  Rational k;
  try {
    k = Rational::parse(trim(text.substr(pos + 1, close - pos - 1)));
  } catch (const std::exception&) {
    throw SystemError("bad rate constant in reaction '" + std::string(line) + "'");
  }
  if (k.sign() <= 0) throw SystemError("rate constant must be positive in '" + std::string(line) + "'");
  pos = close + 1;
  return k;
}

}  // namespace

std::vector<Reaction> parse_reactions(std::string_view line) {
  const bool reversible = line.find("<->") != std::string_view::npos;
  const std::size_t arrow = reversible ? line.find("<->") : line.find("->");
  if (arrow == std::string_view::npos) throw SystemError("no '->' in reaction '" + std::string(line) + "'");
  std::size_t pos = arrow + (reversible ? 3 : 2);
  const Rational forward = parse_rate(line, pos, line);
  std::optional<Rational> backward;
  if (reversible) backward = parse_rate(line, pos, line);

  auto lhs = parse_complex(line.substr(0, arrow), line);
  auto rhs = parse_complex(line.substr(pos), line);
  std::vector<Reaction> out{{lhs, rhs, forward}};
  if (backward) out.push_back({rhs, lhs, *backward});
  return out;
}

std::optional<LaurentPolynomial> hungarian_quotient(const ODESystem& sys, std::string_view v) {
  const auto [plus, minus] = sys.rhs(v).split_signs();
  for (const auto& [m, c] : minus.terms())
    if (m.exponent(v) < 1) return std::nullopt;
  return minus * LaurentPolynomial::symbol(std::string(v), -1);
}

ODESystem reactions_to_odes(const std::vector<Reaction>& crn, const std::map<std::string, Rational>& initial) {
  std::vector<std::string> species;
  auto note = [&](const std::string& s) {
    if (std::find(species.begin(), species.end(), s) == species.end()) species.push_back(s);
  };
  for (const auto& r : crn) {
    if (r.rate_constant.sign() <= 0) throw SystemError("reaction rate constant must be positive");
    for (const auto& [s, n] : r.reactants) note(s);
    for (const auto& [s, n] : r.products) note(s);
  }
  for (const auto& [s, v] : initial)
    if (std::find(species.begin(), species.end(), s) == species.end())
      throw SystemError("initial value given for unknown species '" + s + "'");

  std::map<std::string, LaurentPolynomial> rhs;
  for (const auto& r : crn) {
    std::vector<Monomial::Factor> factors(r.reactants.begin(), r.reactants.end());
    const LaurentPolynomial rate(Monomial(factors), r.rate_constant);
    for (const auto& s : species) {
      auto count = [&](const std::map<std::string, int>& side) {
        auto it = side.find(s);
        return it == side.end() ? 0 : it->second;
      };
      const int net = count(r.products) - count(r.reactants);
      if (net != 0) rhs[s] += LaurentPolynomial(Rational(net)) * rate;
    }
  }

  ODESystem sys;
  for (const auto& s : species) {
    auto it = initial.find(s);
    sys.add_variable(s, rhs[s], it == initial.end() ? Rational(0) : it->second);
  }
  return sys;
}

ODESystem shift_variable(const ODESystem& sys, std::string_view v, const Rational& c) {
  if (!sys.has_variable(v)) throw SystemError("cannot shift unknown variable '" + std::string(v) + "'");
  ODESystem out = sys;
  if (c.is_zero()) return out;
  const Bindings shift{{std::string(v), LaurentPolynomial::symbol(std::string(v)) - LaurentPolynomial(c)}};
  for (const auto& w : sys.variables()) {
    try {
      out.set_rhs(w, sys.rhs(w).substitute(shift));
    } catch (const AlgebraError&) {
      throw SystemError("cannot shift '" + std::string(v) + "': the ODE for '" + w +
                        "' uses it with a negative exponent");
    }
  }
  const Rational shifted = sys.initial(v) + c;
  if (shifted.sign() < 0)
    throw SystemError("shifting '" + std::string(v) + "' by " + c.to_string() + " makes its initial value negative");
  out.set_initial(v, shifted);
  return out;
}

std::vector<Diagnostic> check_positivity_preconditions(const ODESystem& sys) {
  std::vector<Diagnostic> out;
  for (const auto& v : sys.variables()) {
    if (sys.representation(v) != Representation::Ratio) continue;
    if (hungarian_quotient(sys, v)) continue;
    if (sys.initial(v).is_zero()) {
      out.push_back({Diagnostic::Severity::Error, v,
                     "'" + v + "' is not in Hungarian form and starts at 0; its compiled bottom factor "
                               "would divide by zero"});
    } else {
      out.push_back({Diagnostic::Severity::Warning, v,
                     "'" + v + "' is not in Hungarian form; its trajectory must remain bounded-positive"});
    }
  }
  return out;
}

}  // namespace tnc
