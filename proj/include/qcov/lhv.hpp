// Local hidden-variable models with a shared classical source, the
// two-dice experiment (exact moments plus Monte Carlo estimation), and its
// embedding as a diagonal two-qubit state.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qcov/core.hpp"
#include "qcov/correlation.hpp"
#include "qcov/rng.hpp"
#include "qcov/types.hpp"

namespace qcov {

// ---------------------------------------------------------------------------
// Exact rational arithmetic
// ---------------------------------------------------------------------------

/// Reduced fraction over int64 with __int128 intermediates. Overflow of a
/// result's numerator or denominator throws NumericError; callers that can
/// fall back to doubles catch it.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }
  explicit Rational(std::int64_t num) : num_(num), den_(1) {}

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw NumericError("Rational: division by zero");
    return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// Parse "n", "n/d", or a decimal literal (reconstructed like from_double).
  static Rational parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
      if (slash != std::string::npos) {
        const std::int64_t n = std::stoll(text.substr(0, slash));
        const std::int64_t d = std::stoll(text.substr(slash + 1));
        return Rational(n, d);
      }
      if (text.find('.') == std::string::npos && text.find('e') == std::string::npos &&
          text.find('E') == std::string::npos)
        return Rational(std::stoll(text));
      const auto r = from_double(std::stod(text));
      if (!r) throw InvalidInputError("Rational: '" + text + "' is not a small fraction");
      return *r;
    } catch (const std::invalid_argument&) {
      throw InvalidInputError("Rational: cannot parse '" + text + "'");
    } catch (const std::out_of_range&) {
      throw InvalidInputError("Rational: '" + text + "' is out of range");
    }
  }

  /// Continued-fraction reconstruction with denominators up to 10^6.
  /// Returns nullopt when no small fraction reproduces x to ~1e-15 relative.
  static std::optional<Rational> from_double(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    constexpr std::int64_t kMaxDen = 1000000;
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    for (int step = 0; step < 64; ++step) {
      const double floor_frac = std::floor(frac);
      if (std::abs(floor_frac) > 9.0e18) return std::nullopt;
      const auto a = static_cast<std::int64_t>(floor_frac);
      const i128 p2 = i128(a) * p1 + p0;
      const i128 q2 = i128(a) * q1 + q0;
      if (q2 > kMaxDen || p2 > INT64_MAX || p2 < INT64_MIN) break;
      p0 = p1;
      q0 = q1;
      p1 = static_cast<std::int64_t>(p2);
      q1 = static_cast<std::int64_t>(q2);
      const double approx = static_cast<double>(p1) / static_cast<double>(q1);
      if (std::abs(x - approx) <= 4e-16 * std::max(1.0, std::abs(x)))
        return Rational(p1, q1);
      const double rem = frac - floor_frac;
      if (rem < 1e-18) break;
      frac = 1.0 / rem;
    }
    return std::nullopt;
  }

 private:
  using i128 = __int128;

  static Rational from128(i128 num, i128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const i128 g = gcd128(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
      throw NumericError("Rational: 64-bit overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void assign(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InvalidInputError("Rational: zero denominator");
    *this = from128(i128(num), i128(den));
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Probability with an optional exact form carried alongside the double.
struct Prob {
  double value = 0.0;
  std::optional<Rational> exact;

  Prob() = default;
  Prob(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  Prob(const Rational& r) : value(r.value()), exact(r) {}  // NOLINT
};

// ---------------------------------------------------------------------------
// Local hidden-variable models
// ---------------------------------------------------------------------------

/// One value of the shared hidden variable: its weight and, per side, the
/// response expectation for each named setting, each in [-1, 1].
struct LhvBranch {
  double weight = 0.0;
  std::map<std::string, double> left;
  std::map<std::string, double> right;
};

/// Finite local hidden-variable model: λ ranges over branches, each side's
/// outcome expectation depends only on its own setting and λ.
class LhvModel {
 public:
  explicit LhvModel(std::vector<LhvBranch> branches) : branches_(std::move(branches)) {
    if (branches_.empty()) throw InvalidInputError("LhvModel: no branches");
    double total = 0.0;
    for (const auto& b : branches_) {
      if (b.weight < 0.0) throw InvalidInputError("LhvModel: negative branch weight");
      total += b.weight;
      for (const auto* side : {&b.left, &b.right})
        for (const auto& [name, r] : *side)
          if (std::abs(r) > 1.0 + 1e-12)
            throw InvalidInputError("LhvModel: response for '" + name + "' outside [-1, 1]");
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvalidInputError("LhvModel: branch weights must sum to 1");
  }

  const std::vector<LhvBranch>& branches() const { return branches_; }

  double response(std::size_t branch, Side side, const std::string& setting) const {
    const auto& map = side == Side::Left ? branches_.at(branch).left : branches_.at(branch).right;
    const auto it = map.find(setting);
    if (it == map.end())
      throw InvalidInputError("LhvModel: unknown setting '" + setting + "'");
    return it->second;
  }

 private:
  std::vector<LhvBranch> branches_;
};

/// E(AB) = Σ_λ p(λ) A(λ) B(λ): the factorized-within-branch expectation.
inline double lhv_expectation(const LhvModel& model, const std::string& setting_a,
                              const std::string& setting_b) {
  double total = 0.0;
  for (std::size_t i = 0; i < model.branches().size(); ++i)
    total += model.branches()[i].weight * model.response(i, Side::Left, setting_a) *
             model.response(i, Side::Right, setting_b);
  return total;
}

// ---------------------------------------------------------------------------
// The two-dice experiment
// ---------------------------------------------------------------------------

/// A shared source picks branch i with probability w_i, then each party
/// observes an independent success with probability p1_i (left) and p2_i
/// (right). Outcomes are 0/1 indicators.
struct DicePair {
  Prob weight;
  Prob p1;
  Prob p2;
};

struct DiceSpec {
  std::vector<DicePair> pairs;

  /// Two thirds-and-halves branches: weight 1/4 with both parties at 1/2,
  /// weight 3/4 with both at 2/3. Realizable with two ordinary dice read
  /// through threshold questions.
  static DiceSpec default_experiment() {
    DiceSpec s;
    s.pairs.push_back({Prob(Rational(1, 4)), Prob(Rational(1, 2)), Prob(Rational(1, 2))});
    s.pairs.push_back({Prob(Rational(3, 4)), Prob(Rational(2, 3)), Prob(Rational(2, 3))});
    return s;
  }

  void validate() const {
    if (pairs.empty()) throw InvalidInputError("DiceSpec: no pairs");
    double total = 0.0;
    for (const auto& p : pairs) {
      if (p.weight.value < 0.0) throw InvalidInputError("DiceSpec: negative weight");
      if (p.p1.value < 0.0 || p.p1.value > 1.0 || p.p2.value < 0.0 || p.p2.value > 1.0)
        throw InvalidInputError("DiceSpec: probabilities must lie in [0, 1]");
      total += p.weight.value;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvalidInputError("DiceSpec: weights must sum to 1");
  }
};

/// Exact dice moments as rationals: E(A), E(B), E(AB), cov, and the
/// Bernoulli variances. Present only when every input carries an exact form
/// and no intermediate overflows.
struct RationalMoments {
  Rational e_a, e_b, e_ab, cov, var_a, var_b;
};

inline std::optional<RationalMoments> dice_exact_rational(const DiceSpec& spec) {
  spec.validate();
  for (const auto& p : spec.pairs)
    if (!p.weight.exact || !p.p1.exact || !p.p2.exact) return std::nullopt;
  try {
    Rational e_a(0), e_b(0), e_ab(0);
    for (const auto& p : spec.pairs) {
      const Rational w = *p.weight.exact, a = *p.p1.exact, b = *p.p2.exact;
      e_a = e_a + w * a;
      e_b = e_b + w * b;
      e_ab = e_ab + w * a * b;
    }
    RationalMoments m;
    m.e_a = e_a;
    m.e_b = e_b;
    m.e_ab = e_ab;
    m.cov = e_ab - e_a * e_b;
    m.var_a = e_a - e_a * e_a;
    m.var_b = e_b - e_b * e_b;
    return m;
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

/// Dice moments in doubles. Outcomes are indicators, so E(A²) = E(A) and
/// the variances are Bernoulli.
inline CorrelationReport dice_exact(const DiceSpec& spec) {
  if (const auto exact = dice_exact_rational(spec)) {
    return CorrelationReport{exact->e_a.value(),   exact->e_b.value(), exact->e_ab.value(),
                             exact->cov.value(),   exact->var_a.value(),
                             exact->var_b.value()};
  }
  spec.validate();
  double e_a = 0.0, e_b = 0.0, e_ab = 0.0;
  for (const auto& p : spec.pairs) {
    e_a += p.weight.value * p.p1.value;
    e_b += p.weight.value * p.p2.value;
    e_ab += p.weight.value * p.p1.value * p.p2.value;
  }
  return CorrelationReport{e_a,         e_b,
                           e_ab,        e_ab - e_a * e_b,
                           e_a - e_a * e_a, e_b - e_b * e_b};
}

/// The dice experiment as an LHV model with a single setting "roll" per
/// side. Responses are the branch success probabilities mapped to 0/1
/// indicator expectations (already in [0, 1] ⊂ [-1, 1]).
inline LhvModel dice_to_lhv(const DiceSpec& spec) {
  spec.validate();
  std::vector<LhvBranch> branches;
  branches.reserve(spec.pairs.size());
  for (const auto& p : spec.pairs) {
    LhvBranch b;
    b.weight = p.weight.value;
    b.left["roll"] = p.p1.value;
    b.right["roll"] = p.p2.value;
    branches.push_back(std::move(b));
  }
  return LhvModel(std::move(branches));
}

/// The same statistics as a two-qubit state: each branch contributes the
/// product of diagonal single-qubit states diag(p, 1−p), with outcome 1 read
/// by the projector onto |0⟩. A single pair yields a product state, several
/// a genuine convex mixture, never an entangled state.
inline StateSpec quantum_like_embedding(const DiceSpec& spec) {
  spec.validate();
  auto diag_state = [](double p) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = p;
    m(1, 1) = 1.0 - p;
    return m;
  };
  if (spec.pairs.size() == 1)
    return StateSpec::product(DensityOperator(diag_state(spec.pairs[0].p1.value)),
                              DensityOperator(diag_state(spec.pairs[0].p2.value)));
  std::vector<MixtureTerm> terms;
  terms.reserve(spec.pairs.size());
  for (const auto& p : spec.pairs)
    terms.push_back({p.weight.value, DensityOperator(diag_state(p.p1.value)),
                     DensityOperator(diag_state(p.p2.value))});
  return StateSpec::mixture(std::move(terms));
}

/// Projector reading indicator outcome 1 on one side of a 2x2 split.
inline LocalObservable dice_readout(Side side) {
  CMatrix proj = CMatrix::Zero(2, 2);
  proj(0, 0) = 1.0;
  return LocalObservable(proj, side);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimation
// ---------------------------------------------------------------------------

/// Joint 0/1 outcome counts. Sufficient for every reported statistic, so
/// shard results merge exactly by addition.
struct CoincidenceCounts {
  std::uint64_t n = 0;
  std::uint64_t n11 = 0;
  std::uint64_t n10 = 0;
  std::uint64_t n01 = 0;

  std::uint64_t n00() const { return n - n11 - n10 - n01; }

  CoincidenceCounts& operator+=(const CoincidenceCounts& o) {
    n += o.n;
    n11 += o.n11;
    n10 += o.n10;
    n01 += o.n01;
    return *this;
  }
};

/// Trials [first, first+count) of the stream identified by seed. Trial t
/// consumes counters 3t, 3t+1, 3t+2 (branch pick, then one Bernoulli per
/// side), so any sharding of the index range reproduces the same outcomes.
inline CoincidenceCounts sample_range(const DiceSpec& spec, std::uint64_t seed,
                                      std::uint64_t first, std::uint64_t count) {
  spec.validate();
  std::vector<double> cumulative;
  cumulative.reserve(spec.pairs.size());
  double acc = 0.0;
  for (const auto& p : spec.pairs) {
    acc += p.weight.value;
    cumulative.push_back(acc);
  }
  cumulative.back() = 1.0;

  CoincidenceCounts counts;
  counts.n = count;
  for (std::uint64_t t = first; t < first + count; ++t) {
    const double u = uniform_at(seed, 3 * t);
    std::size_t branch = 0;
    while (branch + 1 < cumulative.size() && u >= cumulative[branch]) ++branch;
    const bool a = uniform_at(seed, 3 * t + 1) < spec.pairs[branch].p1.value;
    const bool b = uniform_at(seed, 3 * t + 2) < spec.pairs[branch].p2.value;
    counts.n11 += a && b;
    counts.n10 += a && !b;
    counts.n01 += !a && b;
  }
  return counts;
}

/// Sample estimate of the dice covariance with a plug-in standard error.
struct SampleEstimate {
  CorrelationReport report;
  double cov_stderr = 0.0;
  CoincidenceCounts counts;
};

inline SampleEstimate estimate_from_counts(const CoincidenceCounts& c) {
  if (c.n == 0) throw InvalidInputError("estimate_from_counts: no samples");
  const double n = static_cast<double>(c.n);
  const double p11 = c.n11 / n, p10 = c.n10 / n, p01 = c.n01 / n, p00 = c.n00() / n;
  const double e_a = p11 + p10;
  const double e_b = p11 + p01;
  const double e_ab = p11;
  const double cov = e_ab - e_a * e_b;

  // Delta-method variance of the sample covariance: the second central
  // cross moment of ((A−ā)(B−b̄)) minus cov².
  auto centered = [&](double x, double y) { return (x - e_a) * (y - e_b); };
  const double m22 = p11 * centered(1, 1) * centered(1, 1) + p10 * centered(1, 0) * centered(1, 0) +
                     p01 * centered(0, 1) * centered(0, 1) + p00 * centered(0, 0) * centered(0, 0);
  SampleEstimate est;
  est.report = CorrelationReport{e_a,         e_b,
                                 e_ab,        cov,
                                 e_a - e_a * e_a, e_b - e_b * e_b};
  est.cov_stderr = std::sqrt(std::max(0.0, m22 - cov * cov) / n);
  est.counts = c;
  return est;
}

inline SampleEstimate sample_coincidences(const DiceSpec& spec, std::uint64_t seed,
                                          std::uint64_t n) {
  return estimate_from_counts(sample_range(spec, seed, 0, n));
}

}  // namespace qcov
