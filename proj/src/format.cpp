#include "tnc/format.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "tnc/parse.hpp"

namespace tnc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

/// Splits "lhs = rhs" at the first '=' that is not part of "==".
std::pair<std::string_view, std::string_view> split_assign(std::string_view s, int line) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '=') continue;
    if (i + 1 < s.size() && s[i + 1] == '=') throw FormatError(line, "expected '=' before '=='");
    return {trim(s.substr(0, i)), trim(s.substr(i + 1))};
  }
  throw FormatError(line, "expected '='");
}

class LineParser {
 public:
  LineParser(SystemFile& file, int line) : f_(file), line_(line) {}

  void parse(std::string_view text) {
    const auto space = text.find_first_of(" \t");
    const std::string_view keyword = text.substr(0, space);
    const std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(text.substr(space));
    // Embedded source lines may themselves be reactions.
    if (keyword != "source" && text.find("->") != std::string_view::npos) return reaction(text);
    if (keyword == "var") return var(rest);
    if (keyword == "ode") return ode(rest);
    if (keyword == "direct") return direct(rest);
    if (keyword == "placeholder") return placeholder(rest);
    if (keyword == "track") return track(rest);
    if (keyword == "shift") return shift(rest);
    if (keyword == "scale") return scale(rest);
    if (keyword == "gamma") return gamma(rest);
    if (keyword == "beta") return beta(rest);
    if (keyword == "mode") return mode(rest);
    if (keyword == "event") return event(rest);
    if (keyword == "sim") return sim(rest);
    if (keyword == "verify") return verify(rest);
    if (keyword == "conserve") return conserve(rest);
    if (keyword == "pair") return pair(rest);
    if (keyword == "source") {
      if (rest.empty()) fail("empty source line");
      f_.source_lines.emplace_back(rest);
      return;
    }
    fail("unknown declaration '" + std::string(keyword) + "'");
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw FormatError(line_, msg); }

  Rational positive(std::string_view s, const char* what) const {
    Rational r = number(s);
    if (r.sign() <= 0) fail(std::string(what) + " must be positive, got " + r.to_string());
    return r;
  }

  Rational number(std::string_view s) const {
    try {
      return Rational::parse(trim(s));
    } catch (const std::exception&) {
      fail("expected a number, got '" + std::string(s) + "'");
    }
  }

  LaurentPolynomial expression(std::string_view s) const {
    try {
      return parse_expr(s);
    } catch (const ParseError& e) {
      fail(std::string("in expression '") + std::string(s) + "' " + e.what());
    }
  }

  std::string name(std::string_view s) const {
    s = trim(s);
    if (!is_identifier(s)) fail("'" + std::string(s) + "' is not a valid name");
    return std::string(s);
  }

  void var(std::string_view rest) {
    auto [lhs, rhs] = split_assign(rest, line_);
    f_.vars.push_back({name(lhs), number(rhs)});
  }

  void ode(std::string_view rest) {
    auto [lhs, rhs] = split_assign(rest, line_);
    if (lhs.empty() || lhs.back() != '\'') fail("expected `ode x' = ...`");
    lhs.remove_suffix(1);
    f_.odes.push_back({name(lhs), expression(rhs)});
  }

  void reaction(std::string_view text) {
    std::vector<Reaction> rs;
    try {
      rs = parse_reactions(text);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    ReactionLine r{rs[0].reactants, rs[0].products, rs[0].rate_constant, std::nullopt};
    if (rs.size() == 2) r.backward = rs[1].rate_constant;
    f_.reactions.push_back(std::move(r));
  }

  void direct(std::string_view rest) {
    for (const auto& w : words(rest)) f_.direct.push_back(name(w));
    if (words(rest).empty()) fail("direct needs a variable name");
  }

  void placeholder(std::string_view rest) {
    PlaceholderDecl d;
    const auto eq = rest.find('=');
    d.name = name(rest.substr(0, eq));
    if (eq != std::string_view::npos) {
      std::string_view call = trim(rest.substr(eq + 1));
      const auto open = call.find('(');
      if (open == std::string_view::npos || call.back() != ')') fail("expected `placeholder f = impl(args)`");
      d.impl = name(call.substr(0, open));
      std::string_view args = call.substr(open + 1, call.size() - open - 2);
      while (!trim(args).empty()) {
        const auto comma = args.find(',');
        d.arguments.push_back(name(args.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        args.remove_prefix(comma + 1);
      }
    }
    f_.placeholders.push_back(std::move(d));
  }

  void track(std::string_view rest) {
    auto [lhs, rhs] = split_assign(rest, line_);
    const auto w = words(lhs);
    TrackDecl d;
    if (w.size() == 1) {
      d.name = name(w[0]);
    } else if (w.size() == 3 && w[1] == "rate") {
      d.name = name(w[0]);
      d.rate = number(w[2]);
    } else {
      fail("expected `track x = expr` or `track x rate r = expr`");
    }
    d.target = expression(rhs);
    f_.tracks.push_back(std::move(d));
  }

  void shift(std::string_view rest) {
    const auto w = words(rest);
    if (w.size() != 2) fail("expected `shift x amount`");
    f_.shifts.push_back({name(w[0]), number(w[1])});
  }

  void scale(std::string_view rest) {
    const auto w = words(rest);
    if (w.size() != 2) fail("expected `scale x factor`");
    f_.scales.emplace_back(name(w[0]), positive(w[1], "scale"));
  }

  void gamma(std::string_view rest) {
    if (rest == "auto")
      f_.gamma.reset();
    else
      f_.gamma = positive(rest, "gamma");
  }

  void beta(std::string_view rest) { f_.beta = positive(rest, "beta"); }

  void mode(std::string_view rest) {
    if (rest == "stable")
      f_.mode = Mode::Stable;
    else if (rest == "warmup")
      f_.mode = Mode::Warmup;
    else
      fail("mode must be stable or warmup");
  }

  void event(std::string_view rest) {
    const auto w = words(rest);
    if (w.size() < 4) fail("expected `event t set x value [bottom]` or `event t bias x c`");
    EventDecl e;
    e.time = number(w[0]);
    e.variable = name(w[2]);
    e.a = number(w[3]);
    if (w[1] == "set" && w.size() == 4) {
      e.kind = EventDecl::Kind::Set;
    } else if (w[1] == "set" && w.size() == 5) {
      e.kind = EventDecl::Kind::SetRatio;
      e.b = number(w[4]);
    } else if (w[1] == "bias" && w.size() == 4) {
      e.kind = EventDecl::Kind::Bias;
    } else {
      fail("expected `event t set x value [bottom]` or `event t bias x c`");
    }
    f_.events.push_back(std::move(e));
  }

  void sim(std::string_view rest) {
    const auto w = words(rest);
    if (w.empty() || w.size() % 2 != 0) fail("expected `sim key value ...`");
    for (std::size_t i = 0; i < w.size(); i += 2) {
      const Rational v = number(w[i + 1]);
      if (w[i] == "t_end") {
        f_.sim.t_end = v;
      } else if (w[i] == "points") {
        if (!v.is_integer() || v.sign() <= 0) fail("points must be a positive integer");
        f_.sim.points = static_cast<int>(v.raw().get_num().get_si());
      } else if (w[i] == "rtol") {
        f_.sim.rtol = v;
      } else if (w[i] == "atol") {
        f_.sim.atol = v;
      } else if (w[i] == "max_step") {
        f_.sim.max_step = v;
      } else {
        fail("unknown sim setting '" + w[i] + "'");
      }
    }
  }

  void verify(std::string_view rest) {
    const auto w = words(rest);
    if (w.empty() || w.size() % 2 != 0) fail("expected `verify key value ...`");
    for (std::size_t i = 0; i < w.size(); i += 2) {
      if (w[i] == "ratio_tol")
        f_.verify.ratio_tol = number(w[i + 1]);
      else if (w[i] == "horizon")
        f_.verify.horizon = number(w[i + 1]);
      else
        fail("unknown verify setting '" + w[i] + "'");
    }
  }

  void conserve(std::string_view rest) {
    auto [lhs, rhs] = split_assign(rest, line_);
    const auto eq = rhs.find("==");
    if (eq == std::string_view::npos) fail("expected `conserve name = expr == value`");
    ConserveDecl d{name(lhs), expression(rhs.substr(0, eq)), number(rhs.substr(eq + 2))};
    for (const auto& [m, c] : d.expr.terms())
      if (m.factors().size() != 1 || m.factors()[0].second != 1) fail("conserved quantity must be linear");
    f_.conserve.push_back(std::move(d));
  }

  void pair(std::string_view rest) {
    const auto w = words(rest);
    if (w.size() != 3) fail("expected `pair x top bottom`");
    f_.pairs.emplace_back(name(w[0]), RatioPair{name(w[1]), name(w[2])});
  }

  SystemFile& f_;
  int line_;
};

std::string complex_text(const std::map<std::string, int>& side) {
  if (side.empty()) return "0";
  std::string out;
  for (const auto& [species, count] : side) {
    if (!out.empty()) out += " + ";
    if (count != 1) out += std::to_string(count);
    out += species;
  }
  return out;
}

void append_unique(std::vector<std::string>& order, const std::string& name) {
  if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
}

}  // namespace

SystemFile parse_system_file(std::string_view text) {
  SystemFile file;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    LineParser(file, line_no).parse(line);
  }
  return file;
}

SystemFile load_system_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_system_file(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(0, path.string() + ": " + e.what());
  }
}

std::string print_system_file(const SystemFile& f) {
  std::ostringstream os;
  if (f.gamma) os << "gamma " << f.gamma->to_string() << '\n';
  if (f.beta) os << "beta " << f.beta->to_string() << '\n';
  if (f.mode) os << "mode " << (*f.mode == Mode::Stable ? "stable" : "warmup") << '\n';
  for (const auto& [v, s] : f.scales) os << "scale " << v << ' ' << s.to_string() << '\n';
  for (const auto& [v, p] : f.pairs) os << "pair " << v << ' ' << p.top << ' ' << p.bottom << '\n';
  for (const auto& p : f.placeholders) {
    os << "placeholder " << p.name;
    if (!p.impl.empty()) {
      os << " = " << p.impl << '(';
      for (std::size_t i = 0; i < p.arguments.size(); ++i) os << (i ? ", " : "") << p.arguments[i];
      os << ')';
    }
    os << '\n';
  }
  for (const auto& v : f.vars) os << "var " << v.name << " = " << v.initial.to_string() << '\n';
  for (const auto& v : f.direct) os << "direct " << v << '\n';
  for (const auto& o : f.odes) os << "ode " << o.name << "' = " << o.rhs.to_string() << '\n';
  for (const auto& r : f.reactions) {
    os << complex_text(r.reactants);
    if (r.backward)
      os << " <->{" << r.forward.to_string() << "}{" << r.backward->to_string() << "} ";
    else
      os << " ->{" << r.forward.to_string() << "} ";
    os << complex_text(r.products) << '\n';
  }
  for (const auto& t : f.tracks) {
    os << "track " << t.name;
    if (t.rate) os << " rate " << t.rate->to_string();
    os << " = " << t.target.to_string() << '\n';
  }
  for (const auto& s : f.shifts) os << "shift " << s.name << ' ' << s.amount.to_string() << '\n';
  for (const auto& e : f.events) {
    os << "event " << e.time.to_string() << ' ' << (e.kind == EventDecl::Kind::Bias ? "bias " : "set ") << e.variable
       << ' ' << e.a.to_string();
    if (e.kind == EventDecl::Kind::SetRatio) os << ' ' << e.b.to_string();
    os << '\n';
  }
  if (f.sim.t_end || f.sim.points || f.sim.rtol || f.sim.atol || f.sim.max_step) {
    os << "sim";
    if (f.sim.t_end) os << " t_end " << f.sim.t_end->to_string();
    if (f.sim.points) os << " points " << *f.sim.points;
    if (f.sim.rtol) os << " rtol " << f.sim.rtol->to_string();
    if (f.sim.atol) os << " atol " << f.sim.atol->to_string();
    if (f.sim.max_step) os << " max_step " << f.sim.max_step->to_string();
    os << '\n';
  }
  if (f.verify.ratio_tol || f.verify.horizon) {
    os << "verify";
    if (f.verify.ratio_tol) os << " ratio_tol " << f.verify.ratio_tol->to_string();
    if (f.verify.horizon) os << " horizon " << f.verify.horizon->to_string();
    os << '\n';
  }
  for (const auto& c : f.conserve)
    os << "conserve " << c.name << " = " << c.expr.to_string() << " == " << c.expected.to_string() << '\n';
  for (const auto& s : f.source_lines) os << "source " << s << '\n';
  return os.str();
}

ODESystem SystemFile::system(const std::optional<Rational>& gamma_override) const {
  if (is_network()) throw FormatError(0, "a compiled network file has no source system of its own; use source()");

  std::vector<std::string> order;
  for (const auto& v : vars) {
    if (std::find(order.begin(), order.end(), v.name) != order.end())
      throw FormatError(0, "variable '" + v.name + "' declared twice");
    order.push_back(v.name);
  }

  std::map<std::string, LaurentPolynomial, std::less<>> rhs;
  if (!reactions.empty()) {
    std::vector<Reaction> crn;
    for (const auto& r : reactions) {
      crn.push_back({r.reactants, r.products, r.forward});
      if (r.backward) crn.push_back({r.products, r.reactants, *r.backward});
    }
    const ODESystem mass_action = reactions_to_odes(crn, {});
    for (const auto& v : mass_action.variables()) {
      append_unique(order, v);
      rhs[v] = mass_action.rhs(v);
    }
  }
  for (const auto& o : odes) {
    if (rhs.contains(o.name)) throw FormatError(0, "'" + o.name + "' has both an ODE line and reactions");
    append_unique(order, o.name);
    rhs[o.name] = o.rhs;
  }
  const std::optional<Rational> default_rate = gamma_override ? gamma_override : gamma;
  for (const auto& t : tracks) {
    if (rhs.contains(t.name)) throw FormatError(0, "tracker '" + t.name + "' also has an ODE");
    const std::optional<Rational> rate = t.rate ? t.rate : default_rate;
    if (!rate) throw FormatError(0, "tracker '" + t.name + "' needs a rate or an explicit gamma");
    append_unique(order, t.name);
    rhs[t.name] = LaurentPolynomial(*rate) * (t.target - LaurentPolynomial::symbol(t.name));
  }
  for (const auto& v : order)
    if (!rhs.contains(v)) throw FormatError(0, "no ODE for '" + v + "'");

  std::map<std::string, Rational, std::less<>> initial;
  for (const auto& v : vars) initial[v.name] = v.initial;

  for (const auto& s : shifts) {
    if (!rhs.contains(s.name)) throw FormatError(0, "shift of unknown variable '" + s.name + "'");
    const Bindings b{{s.name, LaurentPolynomial::symbol(s.name) - LaurentPolynomial(s.amount)}};
    try {
      for (auto& [v, p] : rhs) p = p.substitute(b);
    } catch (const AlgebraError& e) {
      throw FormatError(0, "cannot shift '" + s.name + "': " + e.what());
    }
    initial[s.name] += s.amount;
  }

  ODESystem sys;
  for (const auto& p : placeholders) sys.add_placeholder(p.name);
  for (const auto& v : order) {
    const Rational x0 = initial.contains(v) ? initial[v] : Rational(0);
    if (x0.sign() < 0)
      throw FormatError(0, "initial value of '" + v + "' is " + x0.to_string() + "; shift it to be nonnegative");
    const bool is_direct = std::find(direct.begin(), direct.end(), v) != direct.end() ||
                           std::any_of(tracks.begin(), tracks.end(), [&](const auto& t) { return t.name == v; });
    sys.add_variable(v, rhs[v], x0, is_direct ? Representation::Direct : Representation::Ratio);
  }
  for (const auto& v : direct)
    if (!sys.has_variable(v)) throw FormatError(0, "direct names unknown variable '" + v + "'");
  sys.check_closed();
  return sys;
}

SystemFile SystemFile::source() const {
  std::string text;
  for (const auto& l : source_lines) text += l + '\n';
  return parse_system_file(text);
}

TNSystem SystemFile::network() const {
  if (!is_network()) throw FormatError(0, "not a compiled network file (no pair lines)");
  if (!reactions.empty() || !tracks.empty() || !shifts.empty())
    throw FormatError(0, "compiled network files take var and ode lines only");
  TNSystem tn;
  tn.source = source().system(gamma);
  tn.pairing = pairs;
  if (!gamma) throw FormatError(0, "compiled network file needs a gamma line");
  tn.gamma = *gamma;
  tn.beta = beta.value_or(Rational(1));
  tn.mode = mode.value_or(Mode::Stable);

  std::vector<std::string> order;
  for (const auto& v : vars) append_unique(order, v.name);
  for (const auto& o : odes) append_unique(order, o.name);
  for (const auto& p : placeholders) tn.base.add_placeholder(p.name);
  for (const auto& v : order) {
    auto o = std::find_if(odes.begin(), odes.end(), [&](const auto& d) { return d.name == v; });
    if (o == odes.end()) throw FormatError(0, "no ODE for '" + v + "'");
    auto d = std::find_if(vars.begin(), vars.end(), [&](const auto& x) { return x.name == v; });
    tn.base.add_variable(v, o->rhs, d == vars.end() ? Rational(0) : d->initial, Representation::Direct);
  }
  tn.base.check_closed();
  for (const auto& [v, pair] : pairs) {
    if (!tn.source.has_variable(v)) throw FormatError(0, "pair names '" + v + "', which the source does not define");
    tn.hungarian[v] = hungarian_quotient(tn.source, v).has_value();
  }
  return tn;
}

EventSchedule SystemFile::event_schedule() const {
  EventSchedule out;
  for (const auto& e : events) {
    Event ev;
    ev.time = e.time.to_double();
    switch (e.kind) {
      case EventDecl::Kind::Set:
        ev.action = SetDirect{e.variable, e.a.to_double()};
        break;
      case EventDecl::Kind::SetRatio:
        ev.action = SetRatio{e.variable, e.a.to_double(), e.b.to_double()};
        break;
      case EventDecl::Kind::Bias:
        ev.action = SetBias{e.variable, e.a};
        break;
    }
    out.push_back(std::move(ev));
  }
  return out;
}

PlaceholderImpls SystemFile::placeholder_impls() const {
  PlaceholderImpls out;
  for (const auto& p : placeholders) {
    if (p.impl.empty()) continue;
    auto fn = builtin_placeholder(p.impl);
    if (!fn) throw FormatError(0, "unknown placeholder function '" + p.impl + "'");
    out[p.name] = PlaceholderImpl{p.arguments, std::move(*fn)};
  }
  return out;
}

SimParams SystemFile::sim_params() const {
  SimParams p;
  if (sim.t_end) p.t_end = sim.t_end->to_double();
  if (sim.points) p.sample_points = *sim.points;
  if (sim.rtol) p.rel_tol = sim.rtol->to_double();
  if (sim.atol) p.abs_tol = sim.atol->to_double();
  if (sim.max_step) p.max_step = sim.max_step->to_double();
  return p;
}

VerifyThresholds SystemFile::verify_thresholds() const {
  VerifyThresholds t;
  if (verify.ratio_tol) t.max_ratio_error = verify.ratio_tol->to_double();
  if (verify.horizon) t.ratio_horizon = verify.horizon->to_double();
  return t;
}

std::vector<ConservationLaw> SystemFile::conservation_laws() const {
  std::vector<ConservationLaw> out;
  for (const auto& c : conserve) {
    ConservationLaw law;
    law.name = c.name;
    law.expected = c.expected;
    for (const auto& [m, coef] : c.expr.terms()) law.weights[m.factors()[0].first] = coef;
    out.push_back(std::move(law));
  }
  return out;
}

std::map<std::string, Rational> SystemFile::denominator_scales() const {
  return {scales.begin(), scales.end()};
}

SystemFile network_file(const TNSystem& tn, const SystemFile& src) {
  SystemFile out;
  out.gamma = tn.gamma;
  if (tn.mode == Mode::Stable) out.beta = tn.beta;
  out.mode = tn.mode;
  out.pairs = tn.pairing;
  out.placeholders = src.placeholders;
  for (const auto& v : tn.base.variables()) {
    out.vars.push_back({v, tn.base.initial(v)});
    out.odes.push_back({v, tn.base.rhs(v)});
  }
  out.events = src.events;
  out.sim = src.sim;
  out.verify = src.verify;
  out.conserve = src.conserve;

  // The embedded source pins gamma so trackers defaulting to it reproduce the same system.
  SystemFile embedded = src;
  embedded.gamma = tn.gamma;
  embedded.beta.reset();
  embedded.mode.reset();
  embedded.scales.clear();
  std::istringstream lines(print_system_file(embedded));
  for (std::string l; std::getline(lines, l);) out.source_lines.push_back(l);
  return out;
}

}  // namespace tnc
