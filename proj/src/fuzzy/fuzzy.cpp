#include "fuzznav/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace fuzznav::fuzzy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t points_for(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Triangle:
      return 3;
    case ShapeKind::Trapezoid:
      return 4;
    case ShapeKind::LeftShoulder:
    case ShapeKind::RightShoulder:
      return 2;
  }
  return 0;
}

}  // namespace

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Triangle:
      return "triangle";
    case ShapeKind::Trapezoid:
      return "trapezoid";
    case ShapeKind::LeftShoulder:
      return "left_shoulder";
    case ShapeKind::RightShoulder:
      return "right_shoulder";
  }
  return "?";
}

ShapeKind shape_kind_from_string(std::string_view name) {
  if (name == "triangle") return ShapeKind::Triangle;
  if (name == "trapezoid") return ShapeKind::Trapezoid;
  if (name == "left_shoulder") return ShapeKind::LeftShoulder;
  if (name == "right_shoulder") return ShapeKind::RightShoulder;
  throw ConfigError("unknown membership function kind '" + std::string(name) + "'");
}

ClippedShape clip_trapezoid(const Trapezoid& t, double h) {
  // Clipped outline: (a,0) (p,h) (q,h) (d,0); split into two triangles and a rectangle.
  const double p = t.a + h * (t.b - t.a);
  const double q = t.d - h * (t.d - t.c);
  const double left = 0.5 * h * (p - t.a);
  const double mid = h * (q - p);
  const double right = 0.5 * h * (t.d - q);
  const double area = left + mid + right;
  if (area <= 0.0) return {0.0, 0.5 * (t.a + t.d)};
  const double moment = left * (t.a + 2.0 * (p - t.a) / 3.0) + mid * (0.5 * (p + q)) + right * (q + (t.d - q) / 3.0);
  return {area, moment / area};
}

// --- MembershipFunction -----------------------------------------------------

MembershipFunction::MembershipFunction(ShapeKind kind, std::array<double, 4> pts, std::size_t count)
    : kind_(kind), points_(pts), count_(count) {
  for (std::size_t i = 0; i < count_; ++i) {
    if (!std::isfinite(points_[i])) throw ConfigError("membership breakpoints must be finite");
    if (i > 0 && points_[i] < points_[i - 1]) {
      throw ConfigError("membership breakpoints must be non-decreasing");
    }
  }
  if (points_[count_ - 1] <= points_[0] && kind_ != ShapeKind::LeftShoulder && kind_ != ShapeKind::RightShoulder) {
    throw ConfigError("membership function has an empty support");
  }
}

MembershipFunction MembershipFunction::triangle(double a, double b, double c) {
  return {ShapeKind::Triangle, {a, b, c, 0.0}, 3};
}

MembershipFunction MembershipFunction::trapezoid(double a, double b, double c, double d) {
  return {ShapeKind::Trapezoid, {a, b, c, d}, 4};
}

MembershipFunction MembershipFunction::left_shoulder(double a, double b) {
  return {ShapeKind::LeftShoulder, {a, b, 0.0, 0.0}, 2};
}

MembershipFunction MembershipFunction::right_shoulder(double a, double b) {
  return {ShapeKind::RightShoulder, {a, b, 0.0, 0.0}, 2};
}

MembershipFunction MembershipFunction::make(ShapeKind kind, std::span<const double> pts) {
  if (pts.size() != points_for(kind)) {
    throw ConfigError(std::string(to_string(kind)) + " needs " + std::to_string(points_for(kind)) +
                      " points, got " + std::to_string(pts.size()));
  }
  std::array<double, 4> arr{};
  std::copy(pts.begin(), pts.end(), arr.begin());
  return {kind, arr, pts.size()};
}

double MembershipFunction::operator()(double x) const {
  const auto& p = points_;
  switch (kind_) {
    case ShapeKind::LeftShoulder:
      if (x <= p[0]) return 1.0;
      if (x >= p[1]) return 0.0;
      return (p[1] - x) / (p[1] - p[0]);
    case ShapeKind::RightShoulder:
      if (x >= p[1]) return 1.0;
      if (x <= p[0]) return 0.0;
      return (x - p[0]) / (p[1] - p[0]);
    case ShapeKind::Triangle:
    case ShapeKind::Trapezoid: {
      const Trapezoid t = as_trapezoid(-kInf, kInf);
      if (x < t.a || x > t.d) return 0.0;
      if (x >= t.b && x <= t.c) return 1.0;
      if (x < t.b) return (x - t.a) / (t.b - t.a);
      return (t.d - x) / (t.d - t.c);
    }
  }
  return 0.0;
}

double MembershipFunction::support_lo() const {
  return kind_ == ShapeKind::LeftShoulder ? -kInf : points_[0];
}

double MembershipFunction::support_hi() const {
  switch (kind_) {
    case ShapeKind::RightShoulder:
      return kInf;
    case ShapeKind::LeftShoulder:
      return points_[1];
    default:
      return points_[count_ - 1];
  }
}

Trapezoid MembershipFunction::as_trapezoid(double lo, double hi) const {
  const auto& p = points_;
  switch (kind_) {
    case ShapeKind::Triangle:
      return {p[0], p[1], p[1], p[2]};
    case ShapeKind::Trapezoid:
      return {p[0], p[1], p[2], p[3]};
    case ShapeKind::LeftShoulder:
      return {std::min(lo, p[0]), std::min(lo, p[0]), p[0], p[1]};
    case ShapeKind::RightShoulder:
      return {p[0], p[1], std::max(hi, p[1]), std::max(hi, p[1])};
  }
  return {};
}

MembershipFunction MembershipFunction::scaled(double k) const {
  if (!(k > 0.0)) throw ConfigError("scale factor must be positive");
  std::array<double, 4> pts = points_;
  for (std::size_t i = 0; i < count_; ++i) pts[i] *= k;
  return {kind_, pts, count_};
}

// --- LinguisticVariable -----------------------------------------------------

LinguisticVariable::LinguisticVariable(std::string name, double lo, double hi, std::string unit,
                                       std::vector<Term> terms)
    : name_(std::move(name)), lo_(lo), hi_(hi), unit_(std::move(unit)), terms_(std::move(terms)) {
  if (name_.empty()) throw ConfigError("variable name must not be empty");
  if (!(std::isfinite(lo_) && std::isfinite(hi_) && lo_ < hi_)) {
    throw ConfigError("variable '" + name_ + "': universe must be a finite interval lo < hi");
  }
  if (terms_.empty()) throw ConfigError("variable '" + name_ + "' has no terms");

  std::set<std::string, std::less<>> labels;
  std::vector<double> probes{lo_, hi_};
  for (const auto& t : terms_) {
    if (!labels.insert(t.label).second) {
      throw ConfigError("variable '" + name_ + "': duplicate term '" + t.label + "'");
    }
    for (double p : t.mf.points()) {
      if (p < lo_ || p > hi_) {
        throw ConfigError("variable '" + name_ + "': term '" + t.label + "' leaves the universe");
      }
      probes.push_back(p);
    }
  }

  // Each term is linear between consecutive breakpoints, so positivity at every
  // breakpoint and every gap midpoint covers the whole universe.
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  const std::size_t n = probes.size();
  for (std::size_t i = 0; i + 1 < n; ++i) probes.push_back(0.5 * (probes[i] + probes[i + 1]));
  for (double x : probes) {
    const bool covered = std::any_of(terms_.begin(), terms_.end(), [x](const Term& t) { return t.mf(x) > 0.0; });
    if (!covered) {
      throw ConfigError("variable '" + name_ + "': no term covers x = " + std::to_string(x));
    }
  }
}

std::size_t LinguisticVariable::find_term(std::string_view label) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].label == label) return i;
  }
  return terms_.size();
}

void LinguisticVariable::fuzzify_into(double x, std::span<double> out) const {
  if (!std::isfinite(x)) throw InputError("variable '" + name_ + "': input is not finite");
  x = std::clamp(x, lo_, hi_);
  for (std::size_t i = 0; i < terms_.size(); ++i) out[i] = terms_[i].mf(x);
}

std::vector<double> LinguisticVariable::fuzzify(double x) const {
  std::vector<double> out(terms_.size());
  fuzzify_into(x, out);
  return out;
}

LinguisticVariable LinguisticVariable::with_scaled_universe(double k) const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({t.label, t.mf.scaled(k)});
  return {name_, lo_ * k, hi_ * k, unit_, std::move(terms)};
}

// --- free operations --------------------------------------------------------

FuzzyEntry fuzzify(const LinguisticVariable& var, double x) {
  const auto degrees = var.fuzzify(x);
  FuzzyEntry entry;
  entry.reserve(degrees.size());
  for (std::size_t i = 0; i < degrees.size(); ++i) entry.push_back({var.terms()[i].label, degrees[i]});
  return entry;
}

double fire_rule(const Rule& rule, const FuzzifiedInput& inputs) {
  if (rule.antecedent.empty()) throw ConfigError("rule has an empty antecedent");
  double activation = 1.0;
  for (const auto& clause : rule.antecedent) {
    const auto it = inputs.find(clause.variable);
    if (it == inputs.end()) throw ConfigError("rule references unknown variable '" + clause.variable + "'");
    const auto term = std::find_if(it->second.begin(), it->second.end(),
                                   [&](const TermDegree& td) { return td.label == clause.term; });
    if (term == it->second.end()) {
      throw ConfigError("rule references unknown term '" + clause.variable + "." + clause.term + "'");
    }
    activation = std::min(activation, term->degree);
  }
  return activation;
}

double defuzzify_centroid(const LinguisticVariable& output, std::span<const double> activations) {
  if (activations.size() != output.term_count()) {
    throw InputError("activation count does not match the terms of '" + output.name() + "'");
  }
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < activations.size(); ++i) {
    const double h = std::min(activations[i], 1.0);
    if (!(h > 0.0)) continue;
    const ClippedShape s = clip_trapezoid(output.terms()[i].mf.as_trapezoid(output.lo(), output.hi()), h);
    weighted += s.area * s.centroid;
    total += s.area;
  }
  if (!(total > 0.0)) throw NoRuleFired(output.name());
  return weighted / total;
}

double defuzzify_centroid(const LinguisticVariable& output,
                          std::span<const std::pair<std::string, double>> clipped) {
  std::vector<double> activations(output.term_count(), 0.0);
  for (const auto& [label, act] : clipped) {
    const std::size_t idx = output.find_term(label);
    if (idx == output.term_count()) {
      throw ConfigError("unknown term '" + label + "' for output '" + output.name() + "'");
    }
    activations[idx] = std::max(activations[idx], act);
  }
  return defuzzify_centroid(output, activations);
}

// --- Engine -----------------------------------------------------------------

Engine::Engine(RuleBase rb) : rb_(std::move(rb)) {
  std::set<std::string, std::less<>> names;
  for (const auto& v : rb_.inputs) {
    if (!names.insert(v.name()).second) throw ConfigError("duplicate variable '" + v.name() + "'");
  }
  for (const auto& v : rb_.outputs) {
    if (!names.insert(v.name()).second) throw ConfigError("duplicate variable '" + v.name() + "'");
  }

  offsets_.reserve(rb_.inputs.size());
  for (const auto& v : rb_.inputs) {
    offsets_.push_back(total_terms_);
    total_terms_ += v.term_count();
  }

  auto resolve = [](const std::vector<LinguisticVariable>& vars, const Clause& c, const char* role) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].name() != c.variable) continue;
      const std::size_t t = vars[i].find_term(c.term);
      if (t == vars[i].term_count()) {
        throw ConfigError("unknown term '" + c.variable + "." + c.term + "'");
      }
      return CompiledClause{i, t};
    }
    throw ConfigError(std::string("unknown ") + role + " variable '" + c.variable + "'");
  };

  compiled_.reserve(rb_.rules.size());
  for (std::size_t r = 0; r < rb_.rules.size(); ++r) {
    const Rule& rule = rb_.rules[r];
    if (rule.antecedent.empty() || rule.consequents.empty()) {
      throw ConfigError("rule " + std::to_string(r) + " needs at least one antecedent and one consequent");
    }
    CompiledRule cr;
    for (const auto& c : rule.antecedent) cr.antecedent.push_back(resolve(rb_.inputs, c, "input"));
    for (const auto& c : rule.consequents) cr.consequents.push_back(resolve(rb_.outputs, c, "output"));
    compiled_.push_back(std::move(cr));
  }
}

std::size_t Engine::input_index(std::string_view name) const {
  for (std::size_t i = 0; i < rb_.inputs.size(); ++i) {
    if (rb_.inputs[i].name() == name) return i;
  }
  throw ConfigError("unknown input variable '" + std::string(name) + "'");
}

std::size_t Engine::output_index(std::string_view name) const {
  for (std::size_t i = 0; i < rb_.outputs.size(); ++i) {
    if (rb_.outputs[i].name() == name) return i;
  }
  throw ConfigError("unknown output variable '" + std::string(name) + "'");
}

void Engine::check_arity(std::span<const double> crisp) const {
  if (crisp.size() != rb_.inputs.size()) {
    throw InputError("expected " + std::to_string(rb_.inputs.size()) + " inputs, got " +
                     std::to_string(crisp.size()));
  }
}

Engine::Fuzzified Engine::fuzzify(std::span<const double> crisp) const {
  check_arity(crisp);
  Fuzzified f{std::vector<double>(total_terms_), offsets_};
  for (std::size_t i = 0; i < rb_.inputs.size(); ++i) {
    rb_.inputs[i].fuzzify_into(crisp[i], std::span<double>(f.degrees).subspan(offsets_[i], rb_.inputs[i].term_count()));
  }
  return f;
}

double Engine::fire(std::size_t rule, const Fuzzified& f) const {
  double activation = 1.0;
  for (const auto& c : compiled_.at(rule).antecedent) {
    activation = std::min(activation, f.degrees[f.offsets[c.var] + c.term]);
  }
  return activation;
}

std::vector<std::vector<double>> Engine::activations(std::span<const double> crisp) const {
  const Fuzzified f = fuzzify(crisp);
  std::vector<std::vector<double>> act;
  act.reserve(rb_.outputs.size());
  for (const auto& out : rb_.outputs) act.emplace_back(out.term_count(), 0.0);
  for (std::size_t r = 0; r < compiled_.size(); ++r) {
    const double a = fire(r, f);
    if (!(a > 0.0)) continue;
    for (const auto& c : compiled_[r].consequents) {
      double& slot = act[c.var][c.term];
      slot = std::max(slot, a);
    }
  }
  return act;
}

std::vector<double> Engine::infer(std::span<const double> crisp) const {
  const auto act = activations(crisp);
  std::vector<double> out(rb_.outputs.size());
  for (std::size_t o = 0; o < out.size(); ++o) out[o] = defuzzify_centroid(rb_.outputs[o], act[o]);
  return out;
}

std::map<std::string, double, std::less<>> Engine::infer(const std::map<std::string, double, std::less<>>& crisp) const {
  std::vector<double> in(rb_.inputs.size());
  for (std::size_t i = 0; i < rb_.inputs.size(); ++i) {
    const auto it = crisp.find(rb_.inputs[i].name());
    if (it == crisp.end()) throw InputError("missing input '" + rb_.inputs[i].name() + "'");
    in[i] = it->second;
  }
  const auto out = infer(std::span<const double>(in));
  std::map<std::string, double, std::less<>> result;
  for (std::size_t o = 0; o < out.size(); ++o) result.emplace(rb_.outputs[o].name(), out[o]);
  return result;
}

bool Engine::any_rule_fires(std::span<const double> crisp) const {
  const Fuzzified f = fuzzify(crisp);
  for (std::size_t r = 0; r < compiled_.size(); ++r) {
    if (fire(r, f) > 0.0) return true;
  }
  return false;
}

// --- validation -------------------------------------------------------------

ValidationReport validate_rulebase(const RuleBase& rb, int grid_resolution) {
  if (grid_resolution < 2) throw InputError("grid resolution must be at least 2");
  const Engine engine(rb);
  ValidationReport report;

  // Conflicts: same antecedent (as a clause set), different consequent set.
  std::vector<std::vector<Clause>> antecedents;
  std::vector<std::vector<Clause>> consequents;
  for (const auto& rule : rb.rules) {
    auto a = rule.antecedent;
    auto c = rule.consequents;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    antecedents.push_back(std::move(a));
    consequents.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < rb.rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rb.rules.size(); ++j) {
      if (antecedents[i] == antecedents[j] && consequents[i] != consequents[j]) {
        report.conflicts.emplace_back(i, j);
      }
    }
  }

  // Completeness sweep over the full input grid.
  const std::size_t dims = rb.inputs.size();
  const auto n = static_cast<std::size_t>(grid_resolution);
  std::vector<std::vector<double>> axes(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& v = rb.inputs[d];
    for (std::size_t k = 0; k < n; ++k) {
      axes[d].push_back(k + 1 == n ? v.hi() : v.lo() + (v.hi() - v.lo()) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
  }
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> point(dims);
  while (true) {
    for (std::size_t d = 0; d < dims; ++d) point[d] = axes[d][idx[d]];
    ++report.grid_points;
    if (!engine.any_rule_fires(point)) report.gaps.push_back(point);

    std::size_t d = 0;
    while (d < dims && ++idx[d] == n) idx[d++] = 0;
    if (d == dims) break;
  }
  report.complete = report.gaps.empty();
  return report;
}

}  // namespace fuzznav::fuzzy
