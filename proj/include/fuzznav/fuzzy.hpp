#pragma once

// Mamdani inference over piecewise-linear fuzzy sets.
//
// Semantics: AND is min, rule implication clips the consequent set at the
// rule activation, activations for the same (output, term) pair combine with
// max, and the crisp value is the area-weighted mean of the clipped term
// centroids (each term contributes its own area, overlaps are not merged).

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fuzznav::fuzzy {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by defuzzification when every activation of an output is zero.
class NoRuleFired : public std::runtime_error {
 public:
  explicit NoRuleFired(std::string output)
      : std::runtime_error("no rule fired for output '" + output + "'"), output_(std::move(output)) {}
  const std::string& output() const { return output_; }

 private:
  std::string output_;
};

enum class ShapeKind { Triangle, Trapezoid, LeftShoulder, RightShoulder };

std::string_view to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(std::string_view name);

/// Breakpoints of a (possibly degenerate) trapezoid a <= b <= c <= d.
struct Trapezoid {
  double a, b, c, d;
};

/// Area and centroid abscissa of a trapezoid clipped at height h in (0, 1].
struct ClippedShape {
  double area;
  double centroid;
};
ClippedShape clip_trapezoid(const Trapezoid& t, double h);

class MembershipFunction {
 public:
  static MembershipFunction triangle(double a, double b, double c);
  static MembershipFunction trapezoid(double a, double b, double c, double d);
  static MembershipFunction left_shoulder(double a, double b);
  static MembershipFunction right_shoulder(double a, double b);
  /// Builds from a kind tag and its breakpoint list (3, 4, 2, 2 points).
  static MembershipFunction make(ShapeKind kind, std::span<const double> points);

  double operator()(double x) const;

  ShapeKind kind() const { return kind_; }
  std::span<const double> points() const { return {points_.data(), count_}; }

  /// Interval on which the degree can be non-zero; shoulders extend to +-inf.
  double support_lo() const;
  double support_hi() const;

  /// The shape as a trapezoid with open shoulders truncated to [lo, hi].
  Trapezoid as_trapezoid(double lo, double hi) const;

  MembershipFunction scaled(double k) const;

 private:
  MembershipFunction(ShapeKind kind, std::array<double, 4> pts, std::size_t count);

  ShapeKind kind_;
  std::array<double, 4> points_{};
  std::size_t count_ = 0;
};

inline double membership_eval(const MembershipFunction& mf, double x) { return mf(x); }

struct Term {
  std::string label;
  MembershipFunction mf;
};

class LinguisticVariable {
 public:
  /// Throws ConfigError on an empty or inverted universe, duplicate labels, a
  /// support that leaves the universe, or a point of the universe no term covers.
  LinguisticVariable(std::string name, double lo, double hi, std::string unit, std::vector<Term> terms);

  const std::string& name() const { return name_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::string& unit() const { return unit_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  /// Index of a term label, or terms().size() when absent.
  std::size_t find_term(std::string_view label) const;

  /// Degrees of every term at x, in term order. x is clamped to the universe;
  /// a non-finite x raises InputError.
  std::vector<double> fuzzify(double x) const;
  void fuzzify_into(double x, std::span<double> out) const;

  LinguisticVariable with_scaled_universe(double k) const;

 private:
  std::string name_;
  double lo_;
  double hi_;
  std::string unit_;
  std::vector<Term> terms_;
};

struct Clause {
  std::string variable;
  std::string term;
  bool operator==(const Clause&) const = default;
  auto operator<=>(const Clause&) const = default;
};

struct Rule {
  std::vector<Clause> antecedent;   // joined by AND
  std::vector<Clause> consequents;  // one per output at most
};

struct RuleBase {
  std::vector<LinguisticVariable> inputs;
  std::vector<LinguisticVariable> outputs;
  std::vector<Rule> rules;
};

struct TermDegree {
  std::string label;
  double degree;
};
using FuzzyEntry = std::vector<TermDegree>;
/// Fuzzified crisp inputs keyed by variable name.
using FuzzifiedInput = std::map<std::string, FuzzyEntry, std::less<>>;

FuzzyEntry fuzzify(const LinguisticVariable& var, double x);

/// min over the rule's antecedent clause degrees. Unknown variables or terms
/// raise ConfigError.
double fire_rule(const Rule& rule, const FuzzifiedInput& inputs);

/// Centroid of the clipped consequent terms. Entries naming the same term are
/// combined with max. Raises NoRuleFired when no activation is positive.
double defuzzify_centroid(const LinguisticVariable& output,
                          std::span<const std::pair<std::string, double>> clipped);
/// Same, with activations given in the variable's term order.
double defuzzify_centroid(const LinguisticVariable& output, std::span<const double> activations);

struct ValidationReport {
  bool complete = true;
  std::vector<std::vector<double>> gaps;                 // grid points where no rule fires
  std::vector<std::pair<std::size_t, std::size_t>> conflicts;  // rule index pairs
  std::size_t grid_points = 0;
  bool ok() const { return complete && conflicts.empty(); }
};

class Engine {
 public:
  /// Resolves every rule clause against the variable registry; throws
  /// ConfigError on unknown names, duplicate variable names or empty rules.
  explicit Engine(RuleBase rb);

  const RuleBase& rule_base() const { return rb_; }
  std::size_t input_count() const { return rb_.inputs.size(); }
  std::size_t output_count() const { return rb_.outputs.size(); }
  std::size_t input_index(std::string_view name) const;
  std::size_t output_index(std::string_view name) const;

  /// Per-input term degrees, flattened in input/term order.
  struct Fuzzified {
    std::vector<double> degrees;
    std::vector<std::size_t> offsets;  // start of each input's block
  };
  Fuzzified fuzzify(std::span<const double> crisp) const;

  double fire(std::size_t rule, const Fuzzified& f) const;

  /// Per output, per term: max activation over the rules concluding it.
  std::vector<std::vector<double>> activations(std::span<const double> crisp) const;

  /// Crisp inputs in rb.inputs order; outputs in rb.outputs order.
  std::vector<double> infer(std::span<const double> crisp) const;
  std::map<std::string, double, std::less<>> infer(const std::map<std::string, double, std::less<>>& crisp) const;

  /// Whether any rule fires with positive degree at the given inputs.
  bool any_rule_fires(std::span<const double> crisp) const;

 private:
  struct CompiledClause {
    std::size_t var;
    std::size_t term;
  };
  struct CompiledRule {
    std::vector<CompiledClause> antecedent;
    std::vector<CompiledClause> consequents;
  };

  void check_arity(std::span<const double> crisp) const;

  RuleBase rb_;
  std::vector<CompiledRule> compiled_;
  std::vector<std::size_t> offsets_;
  std::size_t total_terms_ = 0;
};

inline std::vector<double> infer(const Engine& engine, std::span<const double> crisp) {
  return engine.infer(crisp);
}

/// Sweeps a grid of grid_resolution points per input (universe endpoints
/// included) and lists uncovered points, plus rules sharing an antecedent
/// with different consequents. grid_resolution < 2 raises InputError.
ValidationReport validate_rulebase(const RuleBase& rb, int grid_resolution);

}  // namespace fuzznav::fuzzy
