// qcov: covariance, CHSH, and separability reports for bipartite quantum
// states, plus the classical dice experiment and its quantum-like embedding.
//
// Exit codes: 0 success, 2 input error, 3 dimension/semantics error,
// 4 numeric failure (including failed selftest checks).

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qcov/bellwitness.hpp"
#include "qcov/core.hpp"
#include "qcov/correlation.hpp"
#include "qcov/counterexamples.hpp"
#include "qcov/json_io.hpp"
#include "qcov/lhv.hpp"
#include "qcov/selftest.hpp"
#include "qcov/types.hpp"

namespace {

std::string fmt15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

void emit_json(const qcov::Json& doc) { std::cout << doc.dump(2) << "\n"; }

std::uint64_t resolve_seed(const CLI::App* sub, std::uint64_t flag_value) {
  if (sub->count("--seed") > 0) return flag_value;
  if (const char* env = std::getenv("QCOV_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing junk");
      return static_cast<std::uint64_t>(v);
    } catch (const std::logic_error&) {
      throw qcov::InvalidInputError(std::string("QCOV_SEED: cannot parse '") + env + "'");
    }
  }
  return 0;
}

/// side:body where side is left|right and body is x|y|z, proj0|proj1, or a
/// Bloch 3-vector nx,ny,nz (normalized).
qcov::LocalObservable observable_from_string(const std::string& text) {
  qcov::Side side;
  std::string body;
  if (text.rfind("left:", 0) == 0) {
    side = qcov::Side::Left;
    body = text.substr(5);
  } else if (text.rfind("right:", 0) == 0) {
    side = qcov::Side::Right;
    body = text.substr(6);
  } else {
    throw qcov::InvalidInputError("observable: expected left:<spec> or right:<spec>, got '" +
                                  text + "'");
  }
  if (body == "x") return {qcov::pauli(qcov::Axis::X), side};
  if (body == "y") return {qcov::pauli(qcov::Axis::Y), side};
  if (body == "z") return {qcov::pauli(qcov::Axis::Z), side};
  if (body == "proj0" || body == "proj1") {
    qcov::CMatrix proj = qcov::CMatrix::Zero(2, 2);
    proj(body == "proj0" ? 0 : 1, body == "proj0" ? 0 : 1) = 1.0;
    return {proj, side};
  }
  return {qcov::bloch_observable(qcov::bloch_from_string(body)), side};
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

int run_classify(const std::string& state_text, const std::string& format) {
  const qcov::Classification c = qcov::classify(qcov::state_from_string(state_text));
  if (format == "json") {
    emit_json(qcov::classification_to_json(c));
  } else if (format == "csv") {
    std::cout << "verdict,construction,min_pt_eigenvalue,chsh_bound\n"
              << qcov::to_string(c.verdict) << "," << c.construction << ","
              << (c.min_pt_eigenvalue ? fmt15(*c.min_pt_eigenvalue) : "") << ","
              << (c.chsh_bound ? fmt15(*c.chsh_bound) : "") << "\n";
  } else {
    std::cout << "verdict: " << qcov::to_string(c.verdict) << "\n"
              << "construction: " << c.construction << "\n"
              << "note: " << c.note << "\n";
    if (c.min_pt_eigenvalue)
      std::cout << "min partial-transpose eigenvalue: " << fmt15(*c.min_pt_eigenvalue) << "\n";
    if (c.chsh_bound) std::cout << "best CHSH value: " << fmt15(*c.chsh_bound) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// chsh
// ---------------------------------------------------------------------------

int run_chsh(const std::string& state_text, const std::string& settings_text, bool oracle,
             const std::string& format) {
  const qcov::DensityOperator rho = qcov::realize(qcov::state_from_string(state_text));
  const qcov::ChshResult result =
      settings_text == "optimal" ? qcov::chsh_maximize(rho)
                                 : qcov::chsh_value(rho, qcov::settings_from_string(settings_text));
  std::optional<double> bound;
  if (oracle) bound = qcov::horodecki_bound(rho);

  if (format == "json") {
    qcov::Json doc = qcov::chsh_result_to_json(result);
    if (bound) doc["horodecki_bound"] = qcov::number15(*bound);
    emit_json(doc);
  } else if (format == "csv") {
    std::cout << "value,ab,ab_prime,a_prime_b,a_prime_b_prime,converged"
              << (bound ? ",horodecki_bound" : "") << "\n"
              << fmt15(result.value) << "," << fmt15(result.correlators.ab) << ","
              << fmt15(result.correlators.ab_prime) << "," << fmt15(result.correlators.a_prime_b)
              << "," << fmt15(result.correlators.a_prime_b_prime) << ","
              << (result.converged ? "true" : "false");
    if (bound) std::cout << "," << fmt15(*bound);
    std::cout << "\n";
  } else {
    std::cout << "CHSH value: " << fmt15(result.value) << "\n"
              << "correlators: E(AB)=" << fmt15(result.correlators.ab)
              << " E(AB')=" << fmt15(result.correlators.ab_prime)
              << " E(A'B)=" << fmt15(result.correlators.a_prime_b)
              << " E(A'B')=" << fmt15(result.correlators.a_prime_b_prime) << "\n"
              << "converged: " << (result.converged ? "yes" : "no") << "\n";
    if (bound) std::cout << "closed-form bound: " << fmt15(*bound) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// cov
// ---------------------------------------------------------------------------

void print_report_csv(const qcov::CorrelationReport& r) {
  std::cout << "e_a,e_b,e_ab,cov,var_a,var_b\n"
            << fmt15(r.e_a) << "," << fmt15(r.e_b) << "," << fmt15(r.e_ab) << "," << fmt15(r.cov)
            << "," << fmt15(r.var_a) << "," << fmt15(r.var_b) << "\n";
}

void print_report_pretty(const qcov::CorrelationReport& r) {
  std::cout << "E(A) = " << fmt15(r.e_a) << "\n"
            << "E(B) = " << fmt15(r.e_b) << "\n"
            << "E(AB) = " << fmt15(r.e_ab) << "\n"
            << "cov(A,B) = " << fmt15(r.cov) << "\n"
            << "var(A) = " << fmt15(r.var_a) << "\n"
            << "var(B) = " << fmt15(r.var_b) << "\n";
}

int run_cov(const std::string& state_text, const std::string& obs_a, const std::string& obs_b,
            bool symmetrized, const std::string& format) {
  const qcov::DensityOperator rho = qcov::realize(qcov::state_from_string(state_text));
  const qcov::Split split = rho.split_or_throw();
  const qcov::CMatrix a = qcov::embed(observable_from_string(obs_a), split);
  const qcov::CMatrix b = qcov::embed(observable_from_string(obs_b), split);
  const qcov::CorrelationReport report =
      qcov::covariance(rho, a, b,
                       symmetrized ? qcov::PairOrdering::Symmetrize
                                   : qcov::PairOrdering::RequireCommuting);
  if (format == "json")
    emit_json(qcov::report_to_json(report));
  else if (format == "csv")
    print_report_csv(report);
  else
    print_report_pretty(report);
  return 0;
}

// ---------------------------------------------------------------------------
// dice
// ---------------------------------------------------------------------------

int run_dice(const std::optional<std::string>& spec_path, bool exact, std::uint64_t samples,
             std::uint64_t seed, const std::string& format) {
  const qcov::DiceSpec spec = spec_path
                                  ? qcov::dice_from_json(qcov::read_json_file(*spec_path, "dice"))
                                  : qcov::DiceSpec::default_experiment();
  if (exact) {
    const qcov::CorrelationReport report = qcov::dice_exact(spec);
    if (format == "json") {
      emit_json(qcov::dice_exact_report_json(spec));
    } else if (format == "csv") {
      print_report_csv(report);
    } else {
      print_report_pretty(report);
      if (const auto m = qcov::dice_exact_rational(spec))
        std::cout << "exact: E(A)=" << m->e_a.str() << " E(B)=" << m->e_b.str()
                  << " E(AB)=" << m->e_ab.str() << " cov=" << m->cov.str() << "\n";
    }
    return 0;
  }

  const qcov::SampleEstimate est = qcov::sample_coincidences(spec, seed, samples);
  if (format == "json") {
    emit_json(qcov::sample_estimate_to_json(est, seed));
  } else if (format == "csv") {
    std::cout << "n,mean_a,mean_b,mean_ab,cov_hat,stderr_cov,seed\n"
              << est.counts.n << "," << fmt15(est.report.e_a) << "," << fmt15(est.report.e_b)
              << "," << fmt15(est.report.e_ab) << "," << fmt15(est.report.cov) << ","
              << fmt15(est.cov_stderr) << "," << seed << "\n";
  } else {
    std::cout << "n = " << est.counts.n << "\n"
              << "mean(A) = " << fmt15(est.report.e_a) << "\n"
              << "mean(B) = " << fmt15(est.report.e_b) << "\n"
              << "mean(AB) = " << fmt15(est.report.e_ab) << "\n"
              << "cov estimate = " << fmt15(est.report.cov) << " +/- "
              << fmt15(est.cov_stderr) << "\n"
              << "seed = " << seed << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// torre
// ---------------------------------------------------------------------------

int run_torre_spin(const std::string& bloch, const std::string& bloch2,
                   const std::string& format) {
  const qcov::SpinCovReport r =
      qcov::spin_cov_demo(qcov::bloch_from_string(bloch), qcov::bloch_from_string(bloch2));
  if (format == "json") {
    emit_json(qcov::spin_report_to_json(r));
  } else if (format == "csv") {
    std::cout << "cov,closed_form,e_sz2,e_sx2,verdict\n"
              << fmt15(r.report.cov) << "," << fmt15(r.closed_form) << "," << fmt15(r.report.e_a)
              << "," << fmt15(r.report.e_b) << "," << qcov::to_string(r.classification.verdict)
              << "\n";
  } else {
    std::cout << "cov(Sz^2, Sx^2) = " << fmt15(r.report.cov) << "\n"
              << "closed form = " << fmt15(r.closed_form) << "\n"
              << "E(Sz^2) = " << fmt15(r.report.e_a) << ", E(Sx^2) = " << fmt15(r.report.e_b)
              << "\n"
              << "state verdict: " << qcov::to_string(r.classification.verdict) << "\n";
  }
  return 0;
}

int run_torre_position(const qcov::GaussianProductState& state,
                       const std::optional<qcov::GridSpec>& shared_grid, int n,
                       const std::string& format) {
  auto demo_at = [&](int points) {
    if (shared_grid) {
      const qcov::GridSpec g(shared_grid->x_min, shared_grid->x_max, points);
      return qcov::position_cov_demo(state, g);
    }
    return qcov::position_cov_demo(state, points);
  };

  if (format == "csv") {
    // Convergence table for plotting: doubling grid sizes up to n.
    std::vector<int> sizes;
    for (int s = 16; s < n; s *= 2) sizes.push_back(s);
    sizes.push_back(n);
    std::cout << "n_points,residual\n";
    for (const int s : sizes)
      std::cout << s << "," << fmt15(demo_at(s).identity_residual) << "\n";
    return 0;
  }

  const qcov::PositionCovReport r = demo_at(n);
  if (format == "json") {
    emit_json(qcov::position_report_to_json(r));
  } else {
    std::cout << "cov(X1+X2, X1-X2) = " << fmt15(r.report.cov) << "\n"
              << "var(X1) - var(X2) = " << fmt15(r.var_x1 - r.var_x2) << "\n"
              << "identity residual = " << fmt15(r.identity_residual) << "\n"
              << "state verdict: " << qcov::to_string(r.classification.verdict) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

int run_selftest_cmd(std::uint64_t seed, const std::string& format) {
  const std::vector<qcov::CheckResult> checks = qcov::run_selftest(seed);
  std::size_t failed = 0;
  for (const auto& c : checks) failed += c.pass ? 0 : 1;

  if (format == "json") {
    qcov::Json rows = qcov::Json::array();
    for (const auto& c : checks)
      rows.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    emit_json(qcov::Json{{"seed", seed},
                         {"passed", checks.size() - failed},
                         {"failed", failed},
                         {"checks", rows}});
  } else if (format == "csv") {
    std::cout << "name,pass\n";
    for (const auto& c : checks)
      std::cout << c.name << "," << (c.pass ? "true" : "false") << "\n";
  } else {
    for (const auto& c : checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  }
  return failed == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance and entanglement toolkit for bipartite states"};
  app.require_subcommand(1);

  const auto add_format = [](CLI::App* sub, std::string& target) {
    sub->add_option("--format", target, "Output format")
        ->check(CLI::IsMember({"json", "csv", "pretty"}))
        ->capture_default_str();
  };

  // classify
  auto* classify = app.add_subcommand("classify", "Classify a state as separable, "
                                                  "non-separable, or entangled");
  std::string classify_state;
  std::string classify_format = "json";
  classify->add_option("--state", classify_state, "State file or keyword")->required();
  add_format(classify, classify_format);

  // chsh
  auto* chsh = app.add_subcommand("chsh", "Evaluate or maximize the CHSH combination");
  std::string chsh_state, chsh_settings = "optimal", chsh_format = "json";
  bool chsh_oracle = false;
  chsh->add_option("--state", chsh_state, "State file or keyword (2x2 split)")->required();
  chsh->add_option("--settings", chsh_settings,
                   "Twelve comma-separated reals (a, a', b, b') or 'optimal'")
      ->capture_default_str();
  chsh->add_flag("--oracle", chsh_oracle, "Also print the closed-form two-qubit bound");
  add_format(chsh, chsh_format);

  // cov
  auto* cov = app.add_subcommand("cov", "Covariance report for two local observables");
  std::string cov_state, cov_obs_a = "left:z", cov_obs_b = "right:z", cov_format = "json";
  bool cov_symmetrized = false;
  cov->add_option("--state", cov_state, "State file or keyword")->required();
  cov->add_option("--obs-a", cov_obs_a, "left:{x|y|z|proj0|proj1|nx,ny,nz}")
      ->capture_default_str();
  cov->add_option("--obs-b", cov_obs_b, "right:{x|y|z|proj0|proj1|nx,ny,nz}")
      ->capture_default_str();
  cov->add_flag("--symmetrized", cov_symmetrized,
                "Use E((ab+ba)/2) for non-commuting observables");
  add_format(cov, cov_format);

  // dice
  auto* dice = app.add_subcommand("dice", "Dice-pair experiment: exact moments or "
                                          "Monte Carlo estimate");
  std::string dice_spec, dice_format = "json";
  bool dice_exact_flag = false;
  std::uint64_t dice_samples = 0, dice_seed = 0;
  dice->add_option("--spec", dice_spec, "DiceSpec JSON file (default: built-in experiment)");
  auto* exact_opt = dice->add_flag("--exact", dice_exact_flag, "Exact moments");
  auto* samples_opt =
      dice->add_option("--samples", dice_samples, "Number of Monte Carlo trials");
  dice->add_option("--seed", dice_seed, "RNG seed (QCOV_SEED as fallback, default 0)");
  exact_opt->excludes(samples_opt);
  add_format(dice, dice_format);

  // torre
  auto* torre = app.add_subcommand("torre", "Covariance-without-entanglement demonstrations");
  std::string torre_demo, torre_bloch = "1,0,1", torre_bloch2 = "1,0,1", torre_format = "json";
  double torre_mu1 = 0.0, torre_v1 = 1.0, torre_mu2 = 0.0, torre_v2 = 0.25;
  double torre_xmin = 0.0, torre_xmax = 0.0;
  int torre_n = 1024;
  torre->add_option("--demo", torre_demo, "Which demonstration")
      ->check(CLI::IsMember({"spin", "position"}))
      ->required();
  torre->add_option("--bloch", torre_bloch, "First Bloch vector (spin demo)")
      ->capture_default_str();
  torre->add_option("--bloch2", torre_bloch2, "Second Bloch vector (spin demo)")
      ->capture_default_str();
  torre->add_option("--mu1", torre_mu1, "Mean of X1 (position demo)")->capture_default_str();
  torre->add_option("--v1", torre_v1, "Variance of X1 (position demo)")->capture_default_str();
  torre->add_option("--mu2", torre_mu2, "Mean of X2 (position demo)")->capture_default_str();
  torre->add_option("--v2", torre_v2, "Variance of X2 (position demo)")->capture_default_str();
  auto* xmin_opt = torre->add_option("--xmin", torre_xmin, "Explicit grid lower edge");
  auto* xmax_opt = torre->add_option("--xmax", torre_xmax, "Explicit grid upper edge");
  xmin_opt->needs(xmax_opt);
  xmax_opt->needs(xmin_opt);
  torre->add_option("--n", torre_n, "Grid points per coordinate")->capture_default_str();
  add_format(torre, torre_format);

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant suite");
  std::string selftest_format = "json";
  std::uint64_t selftest_seed = 0;
  selftest->add_option("--seed", selftest_seed, "RNG seed (QCOV_SEED as fallback, default 0)");
  add_format(selftest, selftest_format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*classify) return run_classify(classify_state, classify_format);
    if (*chsh) return run_chsh(chsh_state, chsh_settings, chsh_oracle, chsh_format);
    if (*cov) return run_cov(cov_state, cov_obs_a, cov_obs_b, cov_symmetrized, cov_format);
    if (*dice) {
      const bool sampled = dice->count("--samples") > 0;
      if (sampled && dice_samples == 0)
        throw qcov::InvalidInputError("dice: --samples must be at least 1");
      const std::uint64_t seed = resolve_seed(dice, dice_seed);
      std::optional<std::string> spec_path;
      if (dice->count("--spec") > 0) spec_path = dice_spec;
      return run_dice(spec_path, !sampled, dice_samples, seed, dice_format);
    }
    if (*torre) {
      if (torre_demo == "spin") return run_torre_spin(torre_bloch, torre_bloch2, torre_format);
      const qcov::GaussianProductState state(torre_mu1, torre_v1, torre_mu2, torre_v2);
      std::optional<qcov::GridSpec> grid;
      if (torre->count("--xmin") > 0) grid = qcov::GridSpec(torre_xmin, torre_xmax, torre_n);
      return run_torre_position(state, grid, torre_n, torre_format);
    }
    if (*selftest) return run_selftest_cmd(resolve_seed(selftest, selftest_seed),
                                           selftest_format);
  } catch (const qcov::InvalidInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const qcov::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return 3;
  } catch (const qcov::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
