#include "dieroll/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace dieroll {

ScenarioError::ScenarioError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

// ---------------------------------------------------------------------------
// Distribution terms

namespace {

__extension__ typedef __int128 i128;

struct Fraction {
  i128 num = 0;
  i128 den = 1;
};

std::optional<Fraction> reduce(i128 num, i128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 limit = static_cast<i128>(1) << 62;
  if (num > limit || num < -limit || den > limit) return std::nullopt;
  return Fraction{num, den};
}

struct Value {
  double v = 0.0;
  std::optional<Fraction> exact;
};

// expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)* ;
// unary := '-' unary | primary ; primary := number | 'pi' | '(' expr ')'
class TermParser {
 public:
  explicit TermParser(const std::string& text) : s_(text) {}

  Value parse() {
    Value v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ScenarioError(fmt::format("cannot parse probability '{}': {}", s_, why));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Value expr() {
    Value v = term();
    for (;;) {
      if (eat('+')) {
        v = combine(v, term(), '+');
      } else if (eat('-')) {
        v = combine(v, term(), '-');
      } else {
        return v;
      }
    }
  }

  Value term() {
    Value v = unary();
    for (;;) {
      if (eat('*')) {
        v = combine(v, unary(), '*');
      } else if (eat('/')) {
        v = combine(v, unary(), '/');
      } else {
        return v;
      }
    }
  }

  Value unary() {
    if (eat('-')) {
      Value v = unary();
      v.v = -v.v;
      if (v.exact) v.exact->num = -v.exact->num;
      return v;
    }
    return primary();
  }

  Value primary() {
    skip();
    if (eat('(')) {
      Value v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return Value{std::numbers::pi, std::nullopt};
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::size_t int_end = pos_;
    std::size_t frac_digits = 0;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        ++frac_digits;
      }
    }
    if (pos_ == start || (int_end == start && frac_digits == 0)) fail("expected a number");
    bool exponent = false;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      exponent = true;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    const std::string lexeme = s_.substr(start, pos_ - start);
    Value v{std::stod(lexeme), std::nullopt};
    if (!exponent && lexeme.size() <= 18) {
      std::string digits = lexeme;
      digits.erase(std::remove(digits.begin(), digits.end(), '.'), digits.end());
      i128 den = 1;
      for (std::size_t i = 0; i < frac_digits; ++i) den *= 10;
      v.exact = reduce(static_cast<i128>(std::stoull(digits)), den);
    }
    return v;
  }

  static Value combine(const Value& a, const Value& b, char op) {
    Value r;
    switch (op) {
      case '+': r.v = a.v + b.v; break;
      case '-': r.v = a.v - b.v; break;
      case '*': r.v = a.v * b.v; break;
      default: r.v = a.v / b.v; break;
    }
    if (a.exact && b.exact) {
      const auto& x = *a.exact;
      const auto& y = *b.exact;
      switch (op) {
        case '+': r.exact = reduce(x.num * y.den + y.num * x.den, x.den * y.den); break;
        case '-': r.exact = reduce(x.num * y.den - y.num * x.den, x.den * y.den); break;
        case '*': r.exact = reduce(x.num * y.num, x.den * y.den); break;
        default: r.exact = reduce(x.num * y.den, x.den * y.num); break;
      }
      if (r.exact) r.v = static_cast<double>(r.exact->num) / static_cast<double>(r.exact->den);
    }
    return r;
  }

  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<DistEntry> parse_distribution(const std::vector<std::string>& terms) {
  std::vector<DistEntry> out(terms.size());
  std::optional<std::size_t> rest;
  std::optional<Fraction> exact_sum = Fraction{0, 1};
  double sum = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out[i].text = terms[i];
    if (terms[i] == "rest") {
      if (rest) throw ScenarioError("only one distribution entry may be 'rest'");
      rest = i;
      continue;
    }
    const Value v = TermParser(terms[i]).parse();
    out[i].value = v.v;
    sum += v.v;
    if (v.exact && v.exact->num >= 0) {
      out[i].fraction = std::pair<std::uint64_t, std::uint64_t>(
          static_cast<std::uint64_t>(v.exact->num), static_cast<std::uint64_t>(v.exact->den));
    }
    if (exact_sum && v.exact) {
      exact_sum = reduce(exact_sum->num * v.exact->den + v.exact->num * exact_sum->den,
                         exact_sum->den * v.exact->den);
    } else {
      exact_sum.reset();
    }
  }
  if (rest) {
    out[*rest].value = 1.0 - sum;
    if (exact_sum) {
      const auto r = reduce(exact_sum->den - exact_sum->num, exact_sum->den);
      if (r && r->num >= 0) {
        out[*rest].fraction = std::pair<std::uint64_t, std::uint64_t>(
            static_cast<std::uint64_t>(r->num), static_cast<std::uint64_t>(r->den));
        out[*rest].value = static_cast<double>(r->num) / static_cast<double>(r->den);
      }
    }
  }
  return out;
}

SuggestedModulus suggest_n(const std::vector<DistEntry>& dist, double alpha, std::size_t max_n) {
  std::vector<double> probs;
  for (const auto& e : dist) probs.push_back(e.value);
  const IdealDistribution ideal(probs);
  const std::size_t outcomes = ideal.outcomes();
  if (!(alpha >= 0.0)) throw std::invalid_argument("target alpha must be >= 0");

  if (alpha == 0.0) {
    std::uint64_t l = 1;
    for (const auto& e : dist) {
      if (!e.fraction) {
        throw std::invalid_argument(fmt::format(
            "alpha = 0 needs every P_o rational so that n P_o is an integer; '{}' is not a "
            "ratio of integers. Choose alpha > 0 and a large enough n instead.",
            e.text));
      }
      l = std::lcm(l, e.fraction->second);
      if (l > max_n) throw std::invalid_argument("common denominator exceeds the scan limit");
    }
    std::size_t n = static_cast<std::size_t>(l);
    while (n < outcomes) n += static_cast<std::size_t>(l);
    const auto p = build_partition(ideal, n);
    return {n, p.alpha()};
  }

  for (std::size_t n = outcomes; n <= max_n; ++n) {
    try {
      const auto p = build_partition(ideal, n);
      if (p.alpha() <= alpha) return {n, p.alpha()};
    } catch (const std::invalid_argument&) {
      // Some positive P_o would get an empty class at this n.
    }
  }
  throw std::invalid_argument(fmt::format("no n <= {} reaches alpha <= {}", max_n, alpha));
}

// ---------------------------------------------------------------------------
// YAML

namespace {

std::size_t line_of(const YAML::Node& node) {
  return node.Mark().is_null() ? 0 : static_cast<std::size_t>(node.Mark().line) + 1;
}

template <typename T>
T as(const YAML::Node& node, const char* what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ScenarioError(fmt::format("'{}' has the wrong type", what), line_of(node));
  }
}

double as_number(const YAML::Node& node, const char* what) {
  if (!node.IsScalar()) throw ScenarioError(fmt::format("'{}' must be a number", what), line_of(node));
  const Value v = TermParser(node.Scalar()).parse();
  return v.v;
}

Vec3 as_vec3(const YAML::Node& node, double scale) {
  if (!node.IsSequence() || node.size() < 1 || node.size() > 3) {
    throw ScenarioError("center must be a list of 1 to 3 coordinates", line_of(node));
  }
  Vec3 v{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < node.size(); ++i) v[i] = as_number(node[i], "center") * scale;
  return v;
}

SourceSpec parse_source(const YAML::Node& node) {
  SourceSpec s;
  if (!node || (node.IsScalar() && node.Scalar() == "uniform")) return s;
  if (!node.IsMap()) throw ScenarioError("source must be 'uniform' or a map", line_of(node));
  if (node["probs"]) {
    s.kind = SourceSpec::Kind::Probs;
    for (const auto& p : node["probs"]) s.probs.push_back(as_number(p, "probs"));
  } else if (const auto bits = node["bits"]) {
    s.kind = SourceSpec::Kind::Bits;
    s.rounds = bits["rounds"] ? as<std::size_t>(bits["rounds"], "rounds") : 1;
    if (bits["biases"]) {
      for (const auto& b : bits["biases"]) s.biases.push_back(as_number(b, "biases"));
    } else if (bits["bias"]) {
      const double b = as_number(bits["bias"], "bias");
      const std::size_t count = bits["count"] ? as<std::size_t>(bits["count"], "count") : 64;
      s.biases.assign(count, b);
    } else {
      throw ScenarioError("bits source needs 'bias' or 'biases'", line_of(bits));
    }
  } else {
    throw ScenarioError("source map needs 'probs' or 'bits'", line_of(node));
  }
  return s;
}

std::vector<PartySpec> parse_parties(const YAML::Node& node) {
  if (!node.IsSequence()) throw ScenarioError("'parties' must be a list", line_of(node));
  std::vector<PartySpec> out;
  for (const auto& p : node) {
    PartySpec spec;
    spec.line = line_of(p);
    if (p.IsScalar()) {
      const std::string kind = p.Scalar();
      if (kind == "dishonest") {
        spec.honest = false;
      } else if (kind != "honest") {
        throw ScenarioError(fmt::format("unknown party kind '{}'", kind), spec.line);
      }
    } else if (p.IsMap()) {
      const std::string kind = p["strategy"] ? as<std::string>(p["strategy"], "strategy") : "honest";
      if (kind == "dishonest") {
        spec.honest = false;
      } else if (kind != "honest") {
        throw ScenarioError(
            fmt::format("unknown party strategy '{}' (use honest or dishonest; the coalition's "
                        "behavior is set under 'adversary')",
                        kind),
            spec.line);
      }
      spec.source = parse_source(p["source"]);
      if (p["epsilon"]) spec.epsilon = as_number(p["epsilon"], "epsilon");
    } else {
      throw ScenarioError("party entries must be 'honest', 'dishonest' or a map", spec.line);
    }
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(e.msg, static_cast<std::size_t>(e.mark.line) + 1);
  }
  if (!root.IsMap()) throw ScenarioError("scenario must be a map");

  ScenarioSpec s;
  s.name = root["name"] ? as<std::string>(root["name"], "name") : "unnamed";
  const std::string units = root["units"] ? as<std::string>(root["units"], "units") : "natural";
  double time_scale = 1.0;
  if (units == "meters") {
    time_scale = kSpeedOfLight;
  } else if (units != "natural") {
    throw ScenarioError("units must be 'natural' or 'meters'", line_of(root["units"]));
  }

  const auto layout = root["layout"];
  if (!layout || !layout["balls"] || !layout["deadlines"]) {
    throw ScenarioError("'layout' needs 'balls' and 'deadlines'", line_of(root));
  }
  for (const auto& b : layout["balls"]) {
    if (!b["center"] || !b["radius"]) throw ScenarioError("ball needs center and radius", line_of(b));
    s.balls.push_back(Ball{as_vec3(b["center"], 1.0), as_number(b["radius"], "radius")});
  }
  for (const auto& t : layout["deadlines"]) {
    s.deadlines.push_back(as_number(t, "deadlines") * time_scale);
  }

  const auto dist = root["distribution"];
  if (!dist || !dist.IsSequence()) throw ScenarioError("'distribution' must be a list", line_of(root));
  std::vector<std::string> terms;
  for (const auto& d : dist) terms.push_back(as<std::string>(d, "distribution"));
  try {
    s.distribution = parse_distribution(terms);
  } catch (const ScenarioError& e) {
    throw ScenarioError(e.what(), line_of(dist));
  }

  const auto part = root["partition"];
  if (!part || !part["n"]) throw ScenarioError("'partition' needs 'n'", line_of(root));
  s.n = as<std::size_t>(part["n"], "n");
  if (part["sizes"]) s.class_sizes = as<std::vector<std::size_t>>(part["sizes"], "sizes");
  if (part["alpha"]) s.alpha = as_number(part["alpha"], "alpha");

  if (const auto timing = root["timing"]) {
    if (timing["slow_speed"]) s.timing.slow_speed = as_number(timing["slow_speed"], "slow_speed");
    if (timing["predistribution_time"]) {
      s.timing.predistribution_time =
          as_number(timing["predistribution_time"], "predistribution_time") * time_scale;
    }
    if (timing["confirm_receipt"]) {
      s.timing.confirm_receipt = as<bool>(timing["confirm_receipt"], "confirm_receipt");
    }
    if (timing["clock_skew"]) {
      for (const auto& v : timing["clock_skew"]) {
        s.timing.clock_skew.push_back(as_number(v, "clock_skew") * time_scale);
      }
    }
  }

  if (!root["parties"]) throw ScenarioError("'parties' is required", line_of(root));
  s.parties = parse_parties(root["parties"]);
  if (const auto par = root["parallel"]) {
    if (!par["parties"]) throw ScenarioError("'parallel' needs 'parties'", line_of(par));
    s.parallel = parse_parties(par["parties"]);
  }

  if (const auto adv = root["adversary"]) {
    if (adv.IsScalar()) {
      s.adversary = adv.Scalar();
    } else {
      if (!adv["strategy"]) throw ScenarioError("'adversary' needs 'strategy'", line_of(adv));
      s.adversary = as<std::string>(adv["strategy"], "strategy");
      if (adv["target"]) s.adversary_target = as<std::int64_t>(adv["target"], "target");
      if (adv["seed"]) s.adversary_seed = as<std::uint64_t>(adv["seed"], "seed");
      if (adv["value"]) s.adversary_value = as<std::int64_t>(adv["value"], "value");
      if (adv["delay"]) s.adversary_delay = as_number(adv["delay"], "delay") * time_scale;
    }
  }
  if (root["trials"]) s.trials = as<std::uint64_t>(root["trials"], "trials");
  if (root["seed"]) s.seed = as<std::uint64_t>(root["seed"], "seed");
  return s;
}

ScenarioSpec load_scenario_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(fmt::format("cannot open scenario '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// Validation and construction

SourceModel build_source(const SourceSpec& spec, std::size_t n) {
  switch (spec.kind) {
    case SourceSpec::Kind::Uniform: return SourceModel::uniform(n);
    case SourceSpec::Kind::Probs:
      if (spec.probs.size() != n) {
        throw std::invalid_argument(
            fmt::format("source lists {} probabilities for n = {}", spec.probs.size(), n));
      }
      return SourceModel::tight(spec.probs);
    case SourceSpec::Kind::Bits:
      return build_source_from_bits(BitSourceModel(spec.biases), n, spec.rounds);
  }
  throw std::logic_error("unknown source kind");
}

namespace {

const std::vector<std::string>& adversary_names() {
  static const std::vector<std::string> names{
      "none",          "optimal_shift",  "minimizing_shift", "mitm_relay",
      "random_admissible", "inconsistent_broadcast", "silent", "scripted",
      "spacelike_peek", "late_adaptive"};
  return names;
}

std::optional<OutcomePartition> make_partition(const ScenarioSpec& s,
                                               std::vector<std::string>& problems) {
  std::vector<double> probs;
  for (const auto& e : s.distribution) probs.push_back(e.value);
  try {
    const IdealDistribution ideal(probs);
    if (s.class_sizes) return partition_from_sizes(ideal, *s.class_sizes, s.alpha);
    auto p = build_partition(ideal, s.n);
    if (s.alpha) return OutcomePartition(ideal, p.sizes(), *s.alpha);
    return p;
  } catch (const std::invalid_argument& e) {
    problems.push_back(fmt::format("partition: {}", e.what()));
  }
  return std::nullopt;
}

// Epsilons and source models for one list of parties; problems are appended.
std::vector<double> party_epsilons(const std::vector<PartySpec>& parties, std::size_t n,
                                   const char* label, std::vector<std::string>& problems,
                                   std::vector<std::optional<SourceModel>>* sources = nullptr) {
  std::vector<double> eps;
  for (std::size_t k = 0; k < parties.size(); ++k) {
    const auto& p = parties[k];
    double e = p.epsilon.value_or(0.0);
    std::optional<SourceModel> model;
    if (p.honest) {
      try {
        model = build_source(p.source, n);
        e = p.epsilon.value_or(model->epsilon());
        if (model->epsilon() > e + 1e-15) {
          problems.push_back(fmt::format(
              "{}party {} (line {}): source deviates by {:.6g}, above declared epsilon {:.6g}",
              label, k + 1, p.line, model->epsilon(), e));
        }
      } catch (const std::exception& ex) {
        problems.push_back(fmt::format("{}party {} (line {}): source: {}", label, k + 1, p.line,
                                       ex.what()));
      }
    }
    if (!(e >= 0.0)) problems.push_back(fmt::format("{}party {}: epsilon must be >= 0", label, k + 1));
    eps.push_back(e);
    if (sources) sources->push_back(std::move(model));
  }
  return eps;
}

}  // namespace

std::vector<std::string> validate_scenario(const ScenarioSpec& s) {
  std::vector<std::string> problems;
  const std::size_t m = s.balls.size();
  if (m < 2) problems.push_back(fmt::format("layout: need at least 2 balls, got {}", m));
  if (s.deadlines.size() != m) {
    problems.push_back(fmt::format("layout: {} deadlines for {} balls", s.deadlines.size(), m));
  }
  if (m >= 2 && s.deadlines.size() == m) {
    for (const auto& v : validate_layout(Layout(s.balls, s.deadlines))) {
      problems.push_back("layout: " + v.describe());
    }
  }

  auto partition = make_partition(s, problems);
  const std::size_t n = partition ? partition->modulus() : s.n;

  if (s.parties.size() != m) {
    problems.push_back(fmt::format("parties: {} entries for {} balls", s.parties.size(), m));
  }
  const auto eps = party_epsilons(s.parties, n, "", problems);
  if (partition) {
    if (auto bad = check_feasibility(*partition, eps)) {
      problems.push_back("feasibility: " + bad->describe());
    }
  }

  std::vector<const std::vector<PartySpec>*> instances{&s.parties};
  if (s.parallel) {
    if (s.parallel->size() != m) {
      problems.push_back(
          fmt::format("parallel: {} parties for {} balls", s.parallel->size(), m));
    }
    const auto eps2 = party_epsilons(*s.parallel, n, "parallel ", problems);
    if (partition) {
      if (auto bad = check_feasibility(*partition, eps2)) {
        problems.push_back("parallel feasibility: " + bad->describe());
      }
    }
    instances.push_back(&*s.parallel);
  }

  bool any_dishonest = false;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    std::size_t honest = 0;
    for (const auto& p : *instances[i]) honest += p.honest ? 1 : 0;
    if (honest == 0) problems.push_back(fmt::format("instance {}: needs an honest party", i + 1));
    if (honest < instances[i]->size()) any_dishonest = true;
  }

  const auto& names = adversary_names();
  if (std::find(names.begin(), names.end(), s.adversary) == names.end()) {
    problems.push_back(fmt::format("adversary: unknown strategy '{}'", s.adversary));
  } else if (any_dishonest && s.adversary == "none") {
    problems.push_back("adversary: dishonest parties need an adversary strategy");
  } else if (!any_dishonest && s.adversary != "none") {
    problems.push_back(fmt::format("adversary: '{}' given but every party is honest", s.adversary));
  }
  if (s.adversary == "optimal_shift" || s.adversary == "minimizing_shift" ||
      s.adversary == "late_adaptive") {
    if (!s.adversary_target) {
      problems.push_back(fmt::format("adversary: '{}' needs a target outcome", s.adversary));
    } else if (*s.adversary_target < 0 ||
               static_cast<std::size_t>(*s.adversary_target) >= s.distribution.size()) {
      problems.push_back(fmt::format("adversary: target {} is not an outcome", *s.adversary_target));
    }
  }
  if (s.adversary == "optimal_shift" || s.adversary == "minimizing_shift") {
    std::size_t honest = 0;
    for (const auto& p : s.parties) honest += p.honest ? 1 : 0;
    if (honest != 1 || s.parallel) {
      problems.push_back("adversary: shift attacks need exactly one honest party and one instance");
    }
  }
  if (s.adversary == "mitm_relay" && !s.parallel) {
    problems.push_back("adversary: mitm_relay needs a 'parallel' instance");
  }
  if (s.adversary == "scripted" && !s.adversary_value) {
    problems.push_back("adversary: 'scripted' needs a value");
  }

  if (!(s.timing.slow_speed > 0.0 && s.timing.slow_speed <= 1.0)) {
    problems.push_back("timing: slow_speed must lie in (0, 1]");
  }
  if (!s.timing.clock_skew.empty() && s.timing.clock_skew.size() != m) {
    problems.push_back("timing: clock_skew needs one entry per party");
  }
  if (problems.empty() && partition && s.timing.predistribution_time) {
    const ProtocolParams params(*partition, eps, Layout(s.balls, s.deadlines), s.timing);
    for (std::size_t k = 0; k < m; ++k) {
      try {
        honest_stage1(params, 0, k, 0);
      } catch (const TimingInfeasible& e) {
        problems.push_back(fmt::format("timing: {}", e.what()));
      }
    }
  }
  return problems;
}

Scenario build_scenario(const ScenarioSpec& s) {
  if (auto problems = validate_scenario(s); !problems.empty()) {
    std::string all;
    for (const auto& p : problems) all += "\n  " + p;
    throw ScenarioError("invalid scenario:" + all);
  }
  std::vector<std::string> unused;
  const auto partition = *make_partition(s, unused);
  const std::size_t n = partition.modulus();
  const Layout layout(s.balls, s.deadlines);

  Scenario out;
  out.name = s.name;
  out.trials = s.trials;
  out.seed = s.seed;

  StrategyPtr coalition;
  const auto target = static_cast<std::size_t>(s.adversary_target.value_or(0));
  if (s.adversary == "mitm_relay") {
    coalition = mitm_relay(n, s.adversary_delay);
  } else if (s.adversary == "random_admissible") {
    coalition = random_admissible(s.adversary_seed.value_or(s.seed));
  } else if (s.adversary == "inconsistent_broadcast") {
    coalition = inconsistent_broadcast();
  } else if (s.adversary == "silent") {
    coalition = silent_strategy();
  } else if (s.adversary == "scripted") {
    coalition = scripted_delivery(*s.adversary_value, s.adversary_delay);
  } else if (s.adversary == "spacelike_peek") {
    coalition = spacelike_peek();
  } else if (s.adversary == "late_adaptive") {
    coalition = late_adaptive(target);
  }

  std::vector<const std::vector<PartySpec>*> lists{&s.parties};
  if (s.parallel) lists.push_back(&*s.parallel);
  for (const auto* parties : lists) {
    std::vector<std::optional<SourceModel>> sources;
    auto eps = party_epsilons(*parties, n, "", unused, &sources);
    auto params = std::make_shared<const ProtocolParams>(partition, eps, layout, s.timing);

    if (s.adversary == "optimal_shift" || s.adversary == "minimizing_shift") {
      std::size_t k = 0;
      while (!(*parties)[k].honest) ++k;
      auto attack = s.adversary == "optimal_shift"
                        ? optimal_shift_attack(*params, k, *sources[k], target)
                        : minimizing_shift_attack(*params, k, *sources[k], target);
      coalition = attack.strategy;
      out.attacks.push_back(attack.report);
    }

    InstanceSpec spec{params, {}};
    std::vector<std::string> names;
    for (std::size_t k = 0; k < parties->size(); ++k) {
      if ((*parties)[k].honest) {
        spec.roles.push_back(honest_strategy(*sources[k]));
      } else {
        spec.roles.push_back(coalition);
      }
      names.push_back(spec.roles.back()->name());
    }
    out.instances.push_back(std::move(spec));
    out.role_names.push_back(std::move(names));
  }
  return out;
}

}  // namespace dieroll
