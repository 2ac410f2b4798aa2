// Acceptance gate: one line per criterion, exit code = number of failures.
// argv[1] must point at the qcov CLI binary (used by the reproducibility
// criterion); everything else runs in-process against the library.

#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "qcov/bellwitness.hpp"
#include "qcov/core.hpp"
#include "qcov/correlation.hpp"
#include "qcov/counterexamples.hpp"
#include "qcov/lhv.hpp"
#include "qcov/random_states.hpp"
#include "qcov/rng.hpp"

using namespace qcov;

namespace {

struct Gate {
  int failures = 0;

  void line(int index, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s %2d. %s [%s]\n", pass ? "PASS" : "FAIL", index, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
  }
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// 1. Local observables on product states never covary.
void criterion_product_zero_cov(Gate& gate) {
  CounterRng rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Split s{2, 2};
    const DensityOperator rho = realize(random_product_state(rng, s));
    const CMatrix a = embed(LocalObservable(random_bounded_hermitian(rng, 2), Side::Left), s);
    const CMatrix b = embed(LocalObservable(random_bounded_hermitian(rng, 2), Side::Right), s);
    worst = std::max(worst, std::abs(covariance(rho, a, b).cov));
  }
  gate.line(1, worst <= 1e-10, "product states: cov(A,B) = 0 across 500 random cases",
            "max |cov| = " + fmt(worst));
}

// 2. cov(kA+nB, mA+lB) = km var(A) + nl var(B) on product states.
void criterion_bilinearity(Gate& gate) {
  CounterRng rng(1002);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Split s{2, 2};
    const DensityOperator rho = realize(random_product_state(rng, s));
    const CMatrix a = embed(LocalObservable(random_bounded_hermitian(rng, 2), Side::Left), s);
    const CMatrix b = embed(LocalObservable(random_bounded_hermitian(rng, 2), Side::Right), s);
    const double k = rng.uniform(-3.0, 3.0), n = rng.uniform(-3.0, 3.0);
    const double m = rng.uniform(-3.0, 3.0), l = rng.uniform(-3.0, 3.0);
    const double lhs = covariance(rho, (k * a + n * b).eval(), (m * a + l * b).eval()).cov;
    const double rhs = k * m * variance(rho, a) + n * l * variance(rho, b);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  gate.line(2, worst <= 1e-9,
            "bilinearity: cov(kA+nB, mA+lB) = km var(A) + nl var(B) across 500 tuples",
            "max defect = " + fmt(worst));
}

// 3. The weighted-product shortcut equals the trace on realized mixtures.
void criterion_mixture_expectation(Gate& gate) {
  CounterRng rng(1003);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const StateSpec spec = random_mixture(rng, Split{2, 2});
    const LocalObservable a(random_bounded_hermitian(rng, 2), Side::Left);
    const LocalObservable b(random_bounded_hermitian(rng, 2), Side::Right);
    const double shortcut = mixture_expectation(spec, a, b);
    const DensityOperator rho = realize(spec);
    const double direct =
        expectation(rho, (embed(a, Split{2, 2}) * embed(b, Split{2, 2})).eval());
    worst = std::max(worst, std::abs(shortcut - direct));
  }
  gate.line(3, worst <= 1e-10,
            "mixture expectation matches the direct trace across 200 mixtures",
            "max gap = " + fmt(worst));
}

// 4. Convex mixtures of products satisfy CHSH <= 2 at any settings.
void criterion_mixture_chsh(Gate& gate) {
  CounterRng rng(1004);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const DensityOperator rho = realize(random_mixture(rng, Split{2, 2}));
    worst = std::max(worst, chsh_value(rho, random_settings(rng)).value);
  }
  gate.line(4, worst <= 2.0 + 1e-9,
            "mixtures stay under the CHSH classical bound across 500 draws",
            "max value = " + fmt(worst));
}

// 5. Numeric maximization agrees with the closed-form two-qubit bound.
void criterion_maximize_vs_bound(Gate& gate) {
  bool pass = true;
  std::string detail;

  const double bell = chsh_maximize(bell_state(BellKind::PhiPlus)).value;
  const double tsirelson = 2.0 * std::sqrt(2.0);
  if (std::abs(bell - tsirelson) > 1e-6) {
    pass = false;
    detail = "phi+ gave " + fmt(bell);
  }

  CounterRng rng(1005);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const DensityOperator rho{random_mixed_density(rng, 4), Split{2, 2}};
    worst = std::max(worst, std::abs(chsh_maximize(rho).value - horodecki_bound(rho)));
  }
  if (worst > 1e-6) pass = false;
  if (detail.empty()) detail = "phi+ ok, max |maximize - bound| = " + fmt(worst);
  gate.line(5, pass, "chsh_maximize reaches 2*sqrt(2) on phi+ and the bound on 100 states",
            detail);
}

// 6. The werner family flips PPT at 1/3 and crosses CHSH = 2 at 1/sqrt(2).
void criterion_werner_thresholds(Gate& gate) {
  auto bisect = [](auto above, double lo, double hi) {
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (above(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double ppt_flip =
      bisect([](double p) { return !ppt_test(realize(werner(p))).is_ppt; }, 0.0, 1.0);
  const double chsh_flip =
      bisect([](double p) { return horodecki_bound(realize(werner(p))) > 2.0; }, 0.0, 1.0);

  const Classification mid = classify(werner(0.5));
  const bool mid_ok = mid.verdict == Verdict::Entangled && mid.chsh_bound &&
                      *mid.chsh_bound < 2.0 && mid.min_pt_eigenvalue &&
                      *mid.min_pt_eigenvalue < 0.0;

  const bool pass = std::abs(ppt_flip - 1.0 / 3.0) <= 1e-6 &&
                    std::abs(chsh_flip - 1.0 / std::sqrt(2.0)) <= 1e-6 && mid_ok;
  gate.line(6, pass,
            "werner thresholds at 1/3 (PPT) and 1/sqrt(2) (CHSH); p=0.5 entangled yet "
            "CHSH-satisfying",
            "ppt flip = " + fmt(ppt_flip) + ", chsh flip = " + fmt(chsh_flip));
}

// 7. Dice: exact rational moments, Monte Carlo coverage, faithful embedding.
void criterion_dice(Gate& gate) {
  const DiceSpec spec = DiceSpec::default_experiment();
  bool pass = true;
  std::string detail;

  const auto moments = dice_exact_rational(spec);
  if (!moments || !(moments->e_a == Rational(5, 8)) || !(moments->e_b == Rational(5, 8)) ||
      !(moments->cov == Rational(1, 192))) {
    pass = false;
    detail = "exact moments wrong";
  }

  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SampleEstimate est = sample_coincidences(spec, seed, 1000000);
    if (std::abs(est.report.cov - 1.0 / 192.0) <= 3.0 * est.cov_stderr) ++within;
  }
  if (within < 95) pass = false;

  const StateSpec embedded = quantum_like_embedding(spec);
  const DensityOperator rho = realize(embedded);
  const Split s = rho.split_or_throw();
  const CorrelationReport q = covariance(rho, embed(dice_readout(Side::Left), s),
                                         embed(dice_readout(Side::Right), s));
  const CorrelationReport c = dice_exact(spec);
  const double gap = std::max({std::abs(q.e_a - c.e_a), std::abs(q.e_b - c.e_b),
                               std::abs(q.e_ab - c.e_ab), std::abs(q.cov - c.cov)});
  if (gap > 1e-12) pass = false;
  if (classify(embedded).verdict != Verdict::NonSeparable) pass = false;

  if (detail.empty())
    detail = "E(A)=5/8, cov=1/192; " + std::to_string(within) +
             "/100 seeds within 3 stderr; embedding gap = " + fmt(gap);
  gate.line(7, pass, "dice experiment: exact 1/192, sampled coverage, faithful embedding",
            detail);
}

// 8. Position demo: cov equals the variance difference on discretized
//    Gaussian products.
void criterion_position(Gate& gate) {
  CounterRng rng(1008);
  double worst = 0.0;
  bool verdicts_ok = true;
  for (int i = 0; i < 20; ++i) {
    const GaussianProductState state(rng.uniform(-1.0, 1.0), rng.uniform(0.25, 2.5),
                                     rng.uniform(-1.0, 1.0), rng.uniform(0.25, 2.5));
    const PositionCovReport r = position_cov_demo(state, 1024);
    worst = std::max(worst, r.identity_residual);
    verdicts_ok = verdicts_ok && r.classification.verdict == Verdict::Separable;
  }
  gate.line(8, worst <= 1e-6 && verdicts_ok,
            "position demo: |cov - (v1 - v2)| <= 1e-6 across 20 randomized Gaussian sets",
            "max residual = " + fmt(worst));
}

// 9. Spin demo: covariance of commuting squared collective spins matches
//    the closed form on product states.
void criterion_spin(Gate& gate) {
  CounterRng rng(1009);
  double worst = 0.0;
  bool verdicts_ok = true;
  for (int i = 0; i < 200; ++i) {
    const SpinCovReport r = spin_cov_demo(random_unit_vector(rng), random_unit_vector(rng));
    worst = std::max(worst, std::abs(r.report.cov - r.closed_form));
    verdicts_ok = verdicts_ok && r.classification.verdict == Verdict::Separable;
  }

  const double r = 1.0 / std::sqrt(2.0);
  const SpinCovReport diag = spin_cov_demo(Vector3(r, 0, r), Vector3(r, 0, r));
  const bool diag_ok = std::abs(diag.report.cov + 1.0 / 16.0) <= 1e-12;

  gate.line(9, worst <= 1e-12 && verdicts_ok && diag_ok,
            "spin demo: closed form holds across 200 bloch pairs, -1/16 at the diagonal pair",
            "max gap = " + fmt(worst) + ", diagonal cov = " + fmt(diag.report.cov));
}

// 10. Seeded CLI invocations are byte-reproducible.
struct CmdResult {
  int code = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  CmdResult r;
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void criterion_reproducible_cli(Gate& gate, const char* bin) {
  if (!bin) {
    gate.line(10, false, "seeded CLI invocations are byte-reproducible",
              "no binary path given");
    return;
  }
  const std::vector<std::string> invocations = {
      "selftest --seed 7",
      "dice --samples 100000 --seed 42",
      "chsh --state bell:phi+ --settings optimal",
      "classify --state werner:0.5",
      "torre --demo position",
  };
  bool pass = true;
  std::string detail = std::to_string(invocations.size()) + " invocations, two runs each";
  for (const std::string& args : invocations) {
    const std::string cmd = std::string("'") + bin + "' " + args;
    const CmdResult first = run_cmd(cmd);
    const CmdResult second = run_cmd(cmd);
    if (first.code != 0 || second.code != 0 || first.out != second.out || first.out.empty()) {
      pass = false;
      detail = "mismatch or failure on: " + args;
      break;
    }
  }
  gate.line(10, pass, "seeded CLI invocations are byte-reproducible", detail);
}

}  // namespace

int main(int argc, char** argv) {
  Gate gate;
  criterion_product_zero_cov(gate);
  criterion_bilinearity(gate);
  criterion_mixture_expectation(gate);
  criterion_mixture_chsh(gate);
  criterion_maximize_vs_bound(gate);
  criterion_werner_thresholds(gate);
  criterion_dice(gate);
  criterion_position(gate);
  criterion_spin(gate);
  criterion_reproducible_cli(gate, argc > 1 ? argv[1] : nullptr);

  std::printf("%d/10 criteria passed\n", 10 - gate.failures);
  return gate.failures;
}
