// The invariant suite behind the `selftest` subcommand: fast deterministic
// checks of every module's contract. Output is a pure function of the seed,
// so a fixed seed is byte-reproducible.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qcov/bellwitness.hpp"
#include "qcov/core.hpp"
#include "qcov/correlation.hpp"
#include "qcov/counterexamples.hpp"
#include "qcov/json_io.hpp"
#include "qcov/lhv.hpp"
#include "qcov/random_states.hpp"
#include "qcov/rng.hpp"
#include "qcov/types.hpp"

namespace qcov {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Checker {
 public:
  explicit Checker(std::vector<CheckResult>& out) : out_(out) {}

  void check(const std::string& name, bool pass, const std::string& detail) {
    out_.push_back({name, pass, detail});
  }

  void check_le(const std::string& name, double value, double bound) {
    check(name, value <= bound, "max deviation " + fmt_g(value) + ", bound " + fmt_g(bound));
  }

 private:
  std::vector<CheckResult>& out_;
};

/// Bisect a boolean predicate over [lo, hi]; f(lo) and f(hi) must differ.
template <typename F>
double bisect_flip(F&& f, double lo, double hi) {
  bool f_lo = f(lo);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) == f_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::vector<CheckResult> results;
  detail::Checker out(results);
  CounterRng rng(seed);
  const Split qq{2, 2};

  // core: kron bilinearity and associativity
  {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const CMatrix a = random_hermitian(rng, 2), b = random_hermitian(rng, 3);
      const CMatrix c = random_hermitian(rng, 2);
      worst = std::max(worst, max_abs((kron(kron(a, b), c) - kron(a, kron(b, c))).eval()));
      worst = std::max(worst, max_abs((kron((a + c).eval(), b) - kron(a, b) - kron(c, b)).eval()));
    }
    out.check_le("kron_bilinear_associative", worst, 1e-12);
  }

  // core: realized mixtures are unit-trace and PSD
  {
    double worst_trace = 0.0, worst_eig = 0.0;
    for (int i = 0; i < 10; ++i) {
      const DensityOperator rho = realize(random_mixture(rng, qq));
      worst_trace = std::max(worst_trace, std::abs(rho.matrix().trace().real() - 1.0));
      Eigen::SelfAdjointEigenSolver<CMatrix> s(rho.matrix(), Eigen::EigenvaluesOnly);
      worst_eig = std::min(worst_eig, s.eigenvalues().minCoeff());
      worst_eig = std::max(worst_eig, 0.0);
    }
    out.check("mixture_realize_valid", worst_trace <= 1e-12 && worst_eig >= -1e-10,
              "trace defect " + detail::fmt_g(worst_trace));
  }

  // core: partial transpose is an exact involution
  {
    double worst = 0.0;
    const Split s23{2, 3};
    for (int i = 0; i < 10; ++i) {
      const CMatrix rho = random_mixed_density(rng, 6);
      const CMatrix twice =
          partial_transpose(partial_transpose(rho, s23, Side::Right), s23, Side::Right);
      worst = std::max(worst, max_abs((twice - rho).eval()));
    }
    out.check("pt_involution", worst == 0.0, "max entry defect " + detail::fmt_g(worst));
  }

  // core: embedded left/right observables commute
  {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const CMatrix a = embed(LocalObservable(random_hermitian(rng, 2), Side::Left), qq);
      const CMatrix b = embed(LocalObservable(random_hermitian(rng, 2), Side::Right), qq);
      worst = std::max(worst, commutator_norm(a, b));
    }
    out.check_le("embed_commute", worst, 1e-12);
  }

  // correlation: product states have zero covariance for local pairs
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const DensityOperator rho = realize(random_product_state(rng, qq));
      const CMatrix a = embed(LocalObservable(random_bounded_hermitian(rng, 2), Side::Left), qq);
      const CMatrix b = embed(LocalObservable(random_bounded_hermitian(rng, 2), Side::Right), qq);
      worst = std::max(worst, std::abs(covariance(rho, a, b).cov));
    }
    out.check_le("product_zero_cov", worst, 1e-10);
  }

  // correlation: bilinearity identity on product states
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const DensityOperator rho = realize(random_product_state(rng, qq));
      const CMatrix a = embed(LocalObservable(random_bounded_hermitian(rng, 2), Side::Left), qq);
      const CMatrix b = embed(LocalObservable(random_bounded_hermitian(rng, 2), Side::Right), qq);
      const double k = rng.uniform(-3.0, 3.0), n = rng.uniform(-3.0, 3.0);
      const double m = rng.uniform(-3.0, 3.0), l = rng.uniform(-3.0, 3.0);
      const double lhs = covariance(rho, (k * a + n * b).eval(), (m * a + l * b).eval()).cov;
      const double rhs = k * m * variance(rho, a) + n * l * variance(rho, b);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    out.check_le("bilinearity_identity", worst, 1e-9);
  }

  // correlation: mixture expectation agrees with the direct trace
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const StateSpec spec = random_mixture(rng, qq);
      const LocalObservable a(random_bounded_hermitian(rng, 2), Side::Left);
      const LocalObservable b(random_bounded_hermitian(rng, 2), Side::Right);
      const double via_mix = mixture_expectation(spec, a, b);
      const double via_trace =
          expectation(realize(spec), (embed(a, qq) * embed(b, qq)).eval());
      worst = std::max(worst, std::abs(via_mix - via_trace));
    }
    out.check_le("mixture_expectation_trace", worst, 1e-10);
  }

  // correlation: cov(a, a) equals var(a)
  {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const DensityOperator rho = DensityOperator(random_mixed_density(rng, 4), qq);
      const CMatrix a = random_bounded_hermitian(rng, 4);
      worst = std::max(worst, std::abs(covariance(rho, a, a).cov - variance(rho, a)));
    }
    out.check_le("cov_equals_var", worst, 1e-10);
  }

  // bellwitness: convex mixtures satisfy the CHSH ceiling
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const DensityOperator rho = realize(random_mixture(rng, qq));
      worst = std::max(worst, chsh_value(rho, random_settings(rng)).value);
    }
    out.check_le("mixture_chsh_ceiling", worst, 2.0 + 1e-9);
  }

  // bellwitness: fixed-point values
  {
    const DensityOperator phi_plus = bell_state(BellKind::PhiPlus);
    const Vector3 z = Vector3::UnitZ(), x = Vector3::UnitX();
    const double r = 1.0 / std::sqrt(2.0);
    const ChshResult tsirelson =
        chsh_value(phi_plus, ChshSettings(z, x, Vector3(r * (z + x)), Vector3(r * (x - z))));
    CMatrix zero_zero = CMatrix::Zero(4, 4);
    zero_zero(0, 0) = 1.0;
    const ChshResult ground =
        chsh_value(DensityOperator(zero_zero, qq), ChshSettings(z, x, z, x));
    const bool ok = std::abs(tsirelson.value - 2.0 * std::sqrt(2.0)) <= 1e-12 &&
                    std::abs(ground.value - 1.0) <= 1e-12 &&
                    std::abs(ground.correlators.ab - 1.0) <= 1e-12 &&
                    std::abs(ground.correlators.ab_prime) <= 1e-12 &&
                    std::abs(ground.correlators.a_prime_b) <= 1e-12 &&
                    std::abs(ground.correlators.a_prime_b_prime) <= 1e-12;
    out.check("chsh_fixed_points", ok,
              "phi+ value " + detail::fmt_g(tsirelson.value) + ", |00> value " +
                  detail::fmt_g(ground.value));
  }

  // bellwitness: maximizer agrees with the closed-form bound
  {
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      const DensityOperator rho = DensityOperator(random_mixed_density(rng, 4), qq);
      worst = std::max(worst, std::abs(chsh_maximize(rho).value - horodecki_bound(rho)));
    }
    const double phi_gap =
        std::abs(chsh_maximize(bell_state(BellKind::PhiPlus)).value - 2.0 * std::sqrt(2.0));
    out.check("maximize_matches_bound", worst <= 1e-6 && phi_gap <= 1e-6,
              "worst oracle gap " + detail::fmt_g(worst) + ", phi+ gap " +
                  detail::fmt_g(phi_gap));
  }

  // bellwitness: Werner thresholds by bisection
  {
    const double ppt_flip = detail::bisect_flip(
        [](double p) { return ppt_test(realize(werner(p))).is_ppt; }, 0.0, 1.0);
    const double chsh_flip = detail::bisect_flip(
        [](double p) { return horodecki_bound(realize(werner(p))) <= 2.0; }, 0.0, 1.0);
    const bool ok = std::abs(ppt_flip - 1.0 / 3.0) <= 1e-6 &&
                    std::abs(chsh_flip - 1.0 / std::sqrt(2.0)) <= 1e-6;
    out.check("werner_thresholds", ok,
              "ppt flip " + detail::fmt_g(ppt_flip) + ", chsh flip " + detail::fmt_g(chsh_flip));
  }

  // bellwitness: werner(0.5) is entangled yet below the CHSH ceiling
  {
    const Classification c = classify(werner(0.5));
    const double bound = horodecki_bound(realize(werner(0.5)));
    const bool ok = c.verdict == Verdict::Entangled && c.min_pt_eigenvalue &&
                    std::abs(*c.min_pt_eigenvalue + 0.125) <= 1e-10 && bound < 2.0;
    out.check("werner_middle_witness", ok,
              "verdict " + std::string(to_string(c.verdict)) + ", bound " + detail::fmt_g(bound));
  }

  // lhv: exact dice moments
  {
    const auto m = dice_exact_rational(DiceSpec::default_experiment());
    const bool ok = m && m->e_a == Rational(5, 8) && m->e_b == Rational(5, 8) &&
                    m->e_ab == Rational(19, 48) && m->cov == Rational(1, 192);
    DiceSpec single;
    single.pairs.push_back({Prob(Rational(1, 1)), Prob(Rational(2, 3)), Prob(Rational(2, 3))});
    const auto s = dice_exact_rational(single);
    out.check("dice_exact_values", ok && s && s->cov == Rational(0),
              m ? "cov = " + m->cov.str() : "no exact form");
  }

  // lhv: the dice LHV model reproduces the exact correlator
  {
    const DiceSpec spec = DiceSpec::default_experiment();
    const double gap =
        std::abs(lhv_expectation(dice_to_lhv(spec), "roll", "roll") - dice_exact(spec).e_ab);
    out.check_le("dice_lhv_roundtrip", gap, 1e-15);
  }

  // lhv: every LHV model satisfies CHSH
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const int k = 2 + static_cast<int>(rng.uniform() * 4);
      std::vector<LhvBranch> branches(static_cast<std::size_t>(k));
      double total = 0.0;
      for (auto& br : branches) {
        br.weight = 0.1 + rng.uniform();
        total += br.weight;
        for (const char* s : {"s0", "s1"}) {
          br.left[s] = rng.uniform(-1.0, 1.0);
          br.right[s] = rng.uniform(-1.0, 1.0);
        }
      }
      for (auto& br : branches) br.weight /= total;
      const LhvModel model(std::move(branches));
      const double value = std::abs(lhv_expectation(model, "s0", "s0") -
                                    lhv_expectation(model, "s0", "s1")) +
                           std::abs(lhv_expectation(model, "s1", "s0") +
                                    lhv_expectation(model, "s1", "s1"));
      worst = std::max(worst, value);
    }
    out.check_le("lhv_chsh_bound", worst, 2.0 + 1e-12);
  }

  // lhv: sampler determinism and exact shard merging
  {
    const DiceSpec spec = DiceSpec::default_experiment();
    const CoincidenceCounts full = sample_range(spec, seed, 0, 20000);
    const CoincidenceCounts again = sample_range(spec, seed, 0, 20000);
    CoincidenceCounts merged = sample_range(spec, seed, 0, 7000);
    merged += sample_range(spec, seed, 7000, 13000);
    const bool identical = full.n11 == again.n11 && full.n10 == again.n10 &&
                           full.n01 == again.n01 && full.n == again.n;
    const bool merges = full.n11 == merged.n11 && full.n10 == merged.n10 &&
                        full.n01 == merged.n01 && full.n == merged.n;
    out.check("sampler_determinism", identical && merges,
              identical ? "shard merge exact" : "repeat run differed");
  }

  // lhv: sampled covariance approaches the exact value
  {
    const DiceSpec spec = DiceSpec::default_experiment();
    const SampleEstimate est = sample_coincidences(spec, draw_at(seed, 0xABCDEF), 100000);
    const double exact = dice_exact(spec).cov;
    const double gap = std::abs(est.report.cov - exact);
    out.check("sampler_convergence", gap <= 4.0 * est.cov_stderr,
              "gap " + detail::fmt_g(gap) + ", stderr " + detail::fmt_g(est.cov_stderr));
  }

  // lhv: quantum-like embedding reproduces the dice moments
  {
    const DiceSpec spec = DiceSpec::default_experiment();
    const StateSpec embedded = quantum_like_embedding(spec);
    const DensityOperator rho = realize(embedded);
    const CMatrix a = embed(dice_readout(Side::Left), qq);
    const CMatrix b = embed(dice_readout(Side::Right), qq);
    const CorrelationReport direct = covariance(rho, a, b);
    const CorrelationReport exact = dice_exact(spec);
    const double gap = std::max({std::abs(direct.e_a - exact.e_a),
                                 std::abs(direct.e_b - exact.e_b),
                                 std::abs(direct.e_ab - exact.e_ab)});
    const Classification c = classify(embedded);
    out.check("embedding_faithful", gap <= 1e-12 && c.verdict == Verdict::NonSeparable,
              "moment gap " + detail::fmt_g(gap) + ", verdict " + to_string(c.verdict));
  }

  // counterexamples: position identity on the default demo
  {
    const GaussianProductState demo(0.0, 1.0, 0.0, 0.25);
    const PositionCovReport r = position_cov_demo(demo, 512);
    const GaussianProductState sym(0.3, 0.7, -0.2, 0.7);
    const PositionCovReport rs = position_cov_demo(sym, 512);
    const bool ok = r.identity_residual <= 1e-6 && std::abs(r.report.cov - 0.75) <= 1e-6 &&
                    std::abs(rs.report.cov) <= 1e-8 &&
                    r.classification.verdict == Verdict::Separable;
    out.check("position_identity", ok,
              "residual " + detail::fmt_g(r.identity_residual) + ", symmetric cov " +
                  detail::fmt_g(rs.report.cov));
  }

  // counterexamples: spin closed form
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const SpinCovReport r = spin_cov_demo(random_unit_vector(rng), random_unit_vector(rng));
      worst = std::max(worst, std::abs(r.report.cov - r.closed_form));
    }
    const double r = 1.0 / std::sqrt(2.0);
    const Vector3 diag(r, 0.0, r);
    const SpinCovReport named = spin_cov_demo(diag, diag);
    const bool ok = worst <= 1e-12 && std::abs(named.report.cov + 1.0 / 16.0) <= 1e-12 &&
                    named.classification.verdict == Verdict::Separable;
    out.check("spin_closed_form", ok,
              "worst gap " + detail::fmt_g(worst) + ", diagonal cov " +
                  detail::fmt_g(named.report.cov));
  }

  // json: state round-trip preserves matrices
  {
    double worst = 0.0;
    const StateSpec product = random_product_state(rng, qq);
    const StateSpec mixture = random_mixture(rng, qq);
    const StateSpec general =
        StateSpec::general(DensityOperator(random_mixed_density(rng, 4), qq));
    for (const StateSpec* spec : {&product, &mixture, &general}) {
      const StateSpec back = state_from_json(state_to_json(*spec));
      worst = std::max(worst,
                       max_abs((realize(back).matrix() - realize(*spec).matrix()).eval()));
    }
    out.check_le("json_state_roundtrip", worst, 1e-12);
  }

  // json: serialization is stable under a parse/serialize cycle
  {
    const CorrelationReport rep = dice_exact(DiceSpec::default_experiment());
    const std::string once = report_to_json(rep).dump();
    const std::string twice = parse_json_text(once, "selftest").dump();
    out.check("json_stable", once == twice, once == twice ? "stable" : "re-dump differed");
  }

  return results;
}

}  // namespace qcov
