#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "qcov/core.hpp"
#include "qcov/random_states.hpp"
#include "qcov/rng.hpp"
#include "qcov/types.hpp"

using namespace qcov;

namespace {

CMatrix herm2(Complex a, Complex b, Complex c) {
  CMatrix m(2, 2);
  m << a, b, std::conj(b), c;
  return m;
}

}  // namespace

TEST_CASE("pauli matrices have their defining entries") {
  const CMatrix x = pauli(Axis::X);
  CHECK(x(0, 0) == Complex(0, 0));
  CHECK(x(0, 1) == Complex(1, 0));
  CHECK(x(1, 0) == Complex(1, 0));
  CHECK(x(1, 1) == Complex(0, 0));

  const CMatrix y = pauli(Axis::Y);
  CHECK(y(0, 1) == Complex(0, -1));
  CHECK(y(1, 0) == Complex(0, 1));

  const CMatrix z = pauli(Axis::Z);
  CHECK(z(0, 0) == Complex(1, 0));
  CHECK(z(1, 1) == Complex(-1, 0));

  CHECK(max_abs(x * x - identity(2)) == 0.0);
  CHECK(max_abs(y * y - identity(2)) < 1e-15);
  CHECK(max_abs(z * z - identity(2)) == 0.0);
  // xy = iz closes the algebra.
  CHECK(max_abs(x * y - Complex(0, 1) * z) < 1e-15);
}

TEST_CASE("kron is associative and bilinear") {
  const CMatrix x = pauli(Axis::X), y = pauli(Axis::Y), z = pauli(Axis::Z);
  CHECK(max_abs(kron(kron(x, y), z) - kron(x, kron(y, z))) == 0.0);

  CounterRng rng(11);
  const CMatrix a = random_hermitian(rng, 2);
  const CMatrix b = random_hermitian(rng, 3);
  const CMatrix c = random_hermitian(rng, 2);
  CHECK(max_abs(kron(a + c, b) - (kron(a, b) + kron(c, b))) < 1e-12);
  CHECK(max_abs(kron(a, 2.5 * b) - 2.5 * kron(a, b)) < 1e-12);
  CHECK(max_abs(kron(a, b) * kron(c, b) - kron((a * c).eval(), (b * b).eval())) < 1e-10);
}

TEST_CASE("kron(sigma_z, sigma_x) has the expected block layout") {
  const CMatrix m = kron(pauli(Axis::Z), pauli(Axis::X));
  REQUIRE(m.rows() == 4);
  CHECK(m(0, 1) == Complex(1, 0));
  CHECK(m(1, 0) == Complex(1, 0));
  CHECK(m(2, 3) == Complex(-1, 0));
  CHECK(m(3, 2) == Complex(-1, 0));
  CHECK(m(0, 0) == Complex(0, 0));
  CHECK(m(0, 3) == Complex(0, 0));
}

TEST_CASE("bloch_observable maps axes to pauli matrices and rejects non-unit input") {
  CHECK(max_abs(bloch_observable(Vector3(0, 0, 1)) - pauli(Axis::Z)) == 0.0);
  CHECK(max_abs(bloch_observable(Vector3(1, 0, 0)) - pauli(Axis::X)) == 0.0);
  CHECK_THROWS_AS(bloch_observable(Vector3(0.7071, 0, 0.7071)), InvalidInputError);
  CHECK_THROWS_AS(bloch_observable(Vector3(0, 0, 0)), InvalidInputError);

  CounterRng rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto evs = oracle::jacobi_eigenvalues(bloch_observable(random_unit_vector(rng)));
    REQUIRE(evs.size() == 2);
    CHECK(evs[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(evs[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("bloch_projector is an idempotent trace-1 projector") {
  CounterRng rng(4);
  for (int i = 0; i < 5; ++i) {
    const CMatrix p = bloch_projector(random_unit_vector(rng));
    CHECK(max_abs(p * p - p) < 1e-14);
    CHECK(std::abs(p.trace() - Complex(1, 0)) < 1e-14);
    CHECK(oracle::min_eigenvalue(p) > -1e-14);
  }
}

TEST_CASE("DensityOperator rejects invalid matrices") {
  CMatrix bad(2, 2);
  bad << Complex(0.5, 0), Complex(0.1, 0.2), Complex(0.3, 0.1), Complex(0.5, 0);
  CHECK_THROWS_AS(DensityOperator{bad}, InvalidInputError);

  CHECK_THROWS_AS(DensityOperator{(0.7 * identity(2)).eval()}, InvalidInputError);

  CMatrix indefinite(2, 2);
  indefinite << Complex(1.5, 0), Complex(0, 0), Complex(0, 0), Complex(-0.5, 0);
  CHECK_THROWS_AS(DensityOperator{indefinite}, InvalidInputError);

  CHECK_THROWS_AS(DensityOperator{CMatrix::Zero(2, 3)}, DimensionError);
}

TEST_CASE("DensityOperator split constructor checks dimensions") {
  const CMatrix quarter = 0.25 * identity(4);
  CHECK_NOTHROW(DensityOperator(quarter, Split{2, 2}));
  CHECK_THROWS_AS(DensityOperator(quarter, Split{2, 3}), DimensionError);
  CHECK_THROWS_AS(DensityOperator(quarter, Split{0, 4}), DimensionError);

  const Eigen::Index big = 17;
  CHECK_THROWS_AS(DensityOperator(identity(big) / double(big), Split{big, 1}), DimensionError);

  const DensityOperator bare{quarter};
  CHECK_FALSE(bare.split().has_value());
  CHECK_THROWS_AS(bare.split_or_throw(), DimensionError);
  CHECK(bare.with_split(Split{2, 2}).split_or_throw() == Split{2, 2});
}

TEST_CASE("LocalObservable requires a Hermitian square matrix") {
  CHECK_NOTHROW(LocalObservable(pauli(Axis::Y), Side::Left));
  CMatrix nonherm(2, 2);
  nonherm << Complex(0, 0), Complex(1, 0), Complex(0, 0), Complex(0, 0);
  CHECK_THROWS_AS(LocalObservable(nonherm, Side::Right), InvalidInputError);
  CHECK_THROWS_AS(LocalObservable(CMatrix::Zero(2, 3), Side::Left), DimensionError);
}

TEST_CASE("embed places an observable on its own factor") {
  const Split s{2, 2};
  CHECK(max_abs(embed(LocalObservable(pauli(Axis::Z), Side::Left), s) -
                kron(pauli(Axis::Z), identity(2))) == 0.0);
  CHECK(max_abs(embed(LocalObservable(pauli(Axis::X), Side::Right), s) -
                kron(identity(2), pauli(Axis::X))) == 0.0);
  CHECK_THROWS_AS(embed(LocalObservable(pauli(Axis::X), Side::Left), Split{3, 2}),
                  DimensionError);

  // Observables on opposite factors always commute.
  CounterRng rng(9);
  for (int i = 0; i < 10; ++i) {
    const CMatrix a = embed(LocalObservable(random_hermitian(rng, 2), Side::Left), s);
    const CMatrix b = embed(LocalObservable(random_hermitian(rng, 2), Side::Right), s);
    CHECK(commutator_norm(a, b) < 1e-12);
  }
}

TEST_CASE("StateSpec factories validate their form") {
  const DensityOperator half{(0.5 * identity(2)).eval()};
  const DensityOperator pure{herm2(1, 0, 0)};

  const StateSpec prod = StateSpec::product(half, pure);
  CHECK(prod.kind() == StateSpec::Kind::Product);
  CHECK(prod.split() == Split{2, 2});
  CHECK_THROWS_AS(prod.as_mixture(), InvalidInputError);

  CHECK_THROWS_AS(StateSpec::mixture({}), InvalidInputError);
  CHECK_THROWS_AS(StateSpec::mixture({{0.5, half, half}, {0.4, pure, pure}}), InvalidInputError);
  CHECK_THROWS_AS(StateSpec::mixture({{1.5, half, half}, {-0.5, pure, pure}}), InvalidInputError);

  // A one-term mixture is just a product.
  const StateSpec collapsed = StateSpec::mixture({{1.0, half, pure}});
  CHECK(collapsed.kind() == StateSpec::Kind::Product);

  const DensityOperator trit{(identity(3) / 3.0).eval()};
  CHECK_THROWS_AS(StateSpec::mixture({{0.5, half, half}, {0.5, half, trit}}), DimensionError);

  CHECK_THROWS_AS(StateSpec::general(DensityOperator{(0.25 * identity(4)).eval()}),
                  DimensionError);
  const StateSpec gen = StateSpec::general(DensityOperator((0.25 * identity(4)).eval(), {2, 2}));
  CHECK(gen.kind() == StateSpec::Kind::General);
}

TEST_CASE("realize produces the matrix each spec form describes") {
  const DensityOperator up{herm2(1, 0, 0)};
  const DensityOperator down{herm2(0, 0, 1)};

  const DensityOperator rho_prod = realize(StateSpec::product(up, down));
  CHECK(max_abs(rho_prod.matrix() - kron(up.matrix(), down.matrix())) == 0.0);
  CHECK(rho_prod.split_or_throw() == Split{2, 2});

  const StateSpec mix = StateSpec::mixture({{0.25, up, up}, {0.75, down, down}});
  const CMatrix expected = 0.25 * kron(up.matrix(), up.matrix()).eval() +
                           0.75 * kron(down.matrix(), down.matrix()).eval();
  CHECK(max_abs(realize(mix).matrix() - expected) < 1e-15);

  const StateSpec gen = werner(0.3);
  CHECK(max_abs(realize(gen).matrix() - gen.as_general().rho.matrix()) == 0.0);
}

TEST_CASE("partial_transpose is an involution and preserves product positivity") {
  CounterRng rng(21);
  const Split s{2, 3};
  const CMatrix rho = random_mixed_density(rng, 6);
  const CMatrix once = partial_transpose(rho, s, Side::Right);
  CHECK(max_abs(partial_transpose(once, s, Side::Right) - rho) == 0.0);
  const CMatrix left_once = partial_transpose(rho, s, Side::Left);
  CHECK(max_abs(partial_transpose(left_once, s, Side::Left) - rho) == 0.0);

  // Transposing both factors is the full transpose.
  CHECK(max_abs(partial_transpose(once, s, Side::Left) - rho.transpose()) < 1e-15);

  CHECK_THROWS_AS(partial_transpose(rho, Split{2, 2}, Side::Right), DimensionError);

  const DensityOperator dop(rho, s);
  CHECK(max_abs(partial_transpose(dop, Side::Right) - once) == 0.0);

  // The partial transpose of any product state stays a valid state.
  for (int i = 0; i < 5; ++i) {
    const DensityOperator prod = realize(random_product_state(rng, Split{2, 2}));
    CHECK(oracle::min_eigenvalue(partial_transpose(prod, Side::Right)) > -1e-10);
  }
}

TEST_CASE("partial transpose of the phi+ projector has eigenvalue -1/2") {
  const CMatrix pt = partial_transpose(bell_state(BellKind::PhiPlus), Side::Right);
  const auto evs = oracle::jacobi_eigenvalues(pt);
  CHECK(evs.front() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(evs.back() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("partial_trace reduces to the expected factor") {
  const DensityOperator bell = bell_state(BellKind::PhiPlus);
  CHECK(max_abs(partial_trace(bell, Side::Right) - 0.5 * identity(2)) < 1e-15);
  CHECK(max_abs(partial_trace(bell, Side::Left) - 0.5 * identity(2)) < 1e-15);

  CounterRng rng(5);
  const CMatrix a = random_mixed_density(rng, 2);
  const CMatrix b = random_mixed_density(rng, 3);
  const DensityOperator prod(kron(a, b), Split{2, 3});
  CHECK(max_abs(partial_trace(prod, Side::Right) - a) < 1e-14);
  CHECK(max_abs(partial_trace(prod, Side::Left) - b) < 1e-14);
  CHECK(std::abs(partial_trace(prod, Side::Left).trace() - Complex(1, 0)) < 1e-14);
}

TEST_CASE("bell states are orthonormal rank-1 projectors") {
  const BellKind kinds[] = {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus,
                            BellKind::PsiMinus};
  for (const BellKind k : kinds) {
    const CMatrix m = bell_state(k).matrix();
    CHECK(max_abs(m * m - m) < 1e-15);  // pure
  }
  for (const BellKind k1 : kinds)
    for (const BellKind k2 : kinds) {
      const Complex overlap = (bell_state(k1).matrix() * bell_state(k2).matrix()).trace();
      CHECK(std::abs(overlap - (k1 == k2 ? Complex(1, 0) : Complex(0, 0))) < 1e-15);
    }

  const CMatrix phi = bell_state(BellKind::PhiPlus).matrix();
  CHECK(phi(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi(0, 3).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi(3, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(phi(1, 1) == Complex(0, 0));
}

TEST_CASE("bell_kind_from_string parses the four names") {
  CHECK(bell_kind_from_string("phi+") == BellKind::PhiPlus);
  CHECK(bell_kind_from_string("phi-") == BellKind::PhiMinus);
  CHECK(bell_kind_from_string("psi+") == BellKind::PsiPlus);
  CHECK(bell_kind_from_string("psi-") == BellKind::PsiMinus);
  CHECK_THROWS_AS(bell_kind_from_string("phi"), InvalidInputError);
  CHECK_THROWS_AS(bell_kind_from_string(""), InvalidInputError);
}

TEST_CASE("werner family endpoints and partial-transpose spectrum") {
  CHECK(max_abs(realize(werner(0.0)).matrix() - 0.25 * identity(4)) == 0.0);
  CHECK(max_abs(realize(werner(1.0)).matrix() - bell_state(BellKind::PsiMinus).matrix()) <
        1e-15);
  CHECK_THROWS_AS(werner(-0.1), InvalidInputError);
  CHECK_THROWS_AS(werner(1.0000001), InvalidInputError);

  // Minimum eigenvalue of the partial transpose is (1-3p)/4.
  for (const double p : {0.0, 0.2, 1.0 / 3.0, 0.4, 0.7, 1.0}) {
    const double min_ev =
        oracle::min_eigenvalue(partial_transpose(realize(werner(p)), Side::Right));
    CHECK(min_ev == doctest::Approx((1.0 - 3.0 * p) / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("maximally_mixed carries its split") {
  const StateSpec spec = maximally_mixed(Split{2, 3});
  const DensityOperator rho = realize(spec);
  CHECK(rho.split_or_throw() == Split{2, 3});
  CHECK(max_abs(rho.matrix() - identity(6) / 6.0) == 0.0);
}

TEST_CASE("random generators produce valid states and settings") {
  CounterRng rng(77);
  for (int i = 0; i < 5; ++i) {
    CHECK_NOTHROW(realize(random_product_state(rng, Split{2, 2})));
    CHECK_NOTHROW(realize(random_mixture(rng, Split{2, 2})));
    const CMatrix h = random_bounded_hermitian(rng, 3);
    const auto evs = oracle::jacobi_eigenvalues(h);
    CHECK(evs.front() > -1.0 - 1e-12);
    CHECK(evs.back() < 1.0 + 1e-12);
  }
  const ChshSettings s = random_settings(rng);
  CHECK(s.a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.b_prime.norm() == doctest::Approx(1.0).epsilon(1e-12));
}
