#include <doctest.h>

#include "qrf/pipeline.hpp"

using namespace qrf;

namespace {
const SystemId A{"A"}, B{"B"}, C{"C"}, D{"D"};
}

TEST_CASE("tensor products of states and operators") {
  const int n = 3;
  const StateVector s = tensor(basis_state(n, {A}, {0}), basis_state(n, {B}, {1}));
  CHECK(s.systems == Registry{A, B});
  CHECK(std::abs(s.amps(0 * 3 + 1) - cplx(1.0)) < 1e-15);
  CHECK(s.amps.cwiseAbs().sum() == doctest::Approx(1.0));

  const DenseOperator id2 = tensor(identity_op(n, {A}), identity_op(n, {B}));
  CHECK((id2.mat - Eigen::MatrixXcd::Identity(9, 9)).cwiseAbs().maxCoeff() <
        1e-15);

  Eigen::VectorXcd plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const StateVector sp = tensor(state_from_amplitudes(2, {A}, plus),
                                basis_state(2, {B}, {0}));
  CHECK(std::abs(sp.amps(0) - cplx(1.0 / std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(sp.amps(2) - cplx(1.0 / std::sqrt(2.0))) < 1e-12);

  CHECK_THROWS_AS(tensor(basis_state(2, {A}, {0}), basis_state(2, {A}, {0})),
                  composition_error);
}

TEST_CASE("registry permutation rewrites amplitudes") {
  Rng rng(5);
  StateVector s;
  s.local_dim = 3;
  s.systems = {A, B};
  s.amps = random_state_amps(9, rng);
  const StateVector t = permute_systems(s, {B, A});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(std::abs(t.amps(b * 3 + a) - s.amps(a * 3 + b)) < 1e-15);
}

TEST_CASE("partial trace") {
  SUBCASE("product state factorises") {
    Rng rng(11);
    StateVector sa;
    sa.local_dim = 3;
    sa.systems = {A};
    sa.amps = random_state_amps(3, rng);
    StateVector sb;
    sb.local_dim = 3;
    sb.systems = {B};
    sb.amps = random_state_amps(3, rng);
    const DensityMatrix joint = dm_of(tensor(sa, sb));
    const DensityMatrix ra = partial_trace(joint, {A});
    CHECK((ra.mat - dm_of(sa).mat).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("maximally entangled pair reduces to the flat state") {
    Eigen::VectorXcd bell(4);
    bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    const DensityMatrix rho = dm_of(state_from_amplitudes(2, {A, B}, bell));
    const DensityMatrix ra = partial_trace(rho, {A});
    CHECK((ra.mat - 0.5 * Eigen::MatrixXcd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  SUBCASE("four-party embedding leaves ABC pure") {
    // Sector-0 constrained state with the balancing system D at momentum -P.
    const int n = 4, p = 3;
    Rng rng(23);
    StateVector kin3;
    kin3.local_dim = n;
    kin3.systems = {A, B, C};
    kin3.amps = random_state_amps(64, rng);
    const StateVector kin4 =
        tensor(kin3, state_from_amplitudes(n, {D}, momentum_ket(n, -p)));
    const PhysicalState phys = sector_project(kin4, ChargeLabel(0, n));
    const DensityMatrix reduced =
        partial_trace(dm_of(phys.state), {A, B, C});
    CHECK(purity(reduced) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("trace preservation and positivity on random states") {
    Rng rng(31);
    for (int rep = 0; rep < 5; ++rep) {
      StateVector s;
      s.local_dim = 3;
      s.systems = {A, B, C};
      s.amps = random_state_amps(27, rng);
      const DensityMatrix rb = partial_trace(dm_of(s), {B});
      CHECK(std::abs(rb.trace() - 1.0) < 1e-10);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rb.mat);
      CHECK(es.eigenvalues().minCoeff() > -1e-9);
    }
  }
  SUBCASE("unknown label") {
    const DensityMatrix rho = dm_of(basis_state(2, {A, B}, {0, 0}));
    CHECK_THROWS_AS(partial_trace(rho, {C}), composition_error);
  }
}

TEST_CASE("operator Schmidt decomposition") {
  SUBCASE("rank one for products of HS-normalised factors") {
    Rng rng(7);
    Eigen::MatrixXcd mb = random_hermitian(3, rng);
    Eigen::MatrixXcd mc = random_hermitian(3, rng);
    mb /= std::sqrt((mb * mb).trace().real());
    mc /= std::sqrt((mc * mc).trace().real());
    const DenseOperator prod = tensor(single_system_op(3, B, mb, true),
                                      single_system_op(3, C, mc, true));
    const auto terms = operator_schmidt_decompose(prod, {B});
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].lambda == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("position difference has rank two") {
    const int n = 4;
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) x(i, i) = i;
    const DenseOperator diff =
        [&] {
          DenseOperator o = tensor(single_system_op(n, B, x, true),
                                   identity_op(n, {D}));
          o.mat -= tensor(identity_op(n, {B}), single_system_op(n, D, x, true))
                       .mat;
          return o;
        }();
    CHECK(operator_schmidt_decompose(diff, {B}).size() == 2);
  }
  SUBCASE("random Hermitian reconstructs with Hermitian factors") {
    Rng rng(13);
    for (const int n : {2, 3}) {
      DenseOperator o;
      o.local_dim = n;
      o.in_systems = {B, C};
      o.out_systems = {B, C};
      o.mat = random_hermitian(n * n, rng);
      o.hermitian = true;
      const auto terms = operator_schmidt_decompose(o, {B});
      Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(n * n, n * n);
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto& t = terms[k];
        CHECK(max_abs(t.left.mat - t.left.mat.adjoint()) < 1e-10);
        CHECK(max_abs(t.right.mat - t.right.mat.adjoint()) < 1e-10);
        rebuilt += t.lambda * tensor(t.left, t.right).mat;
        if (k > 0) CHECK(terms[k - 1].lambda >= t.lambda);
        // Hilbert-Schmidt orthonormality.
        for (std::size_t j = 0; j <= k; ++j) {
          const cplx gl =
              (terms[j].left.mat.adjoint() * t.left.mat).trace();
          const cplx gr =
              (terms[j].right.mat.adjoint() * t.right.mat).trace();
          if (j == k) {
            CHECK(std::abs(gl - cplx(1.0)) < 1e-10);
            CHECK(std::abs(gr - cplx(1.0)) < 1e-10);
          } else {
            // Distinct terms are orthogonal in at least the paired product.
            CHECK(std::abs(gl * gr) < 1e-10);
          }
        }
      }
      CHECK(max_abs(o.mat - rebuilt) < 1e-9);
    }
  }
  SUBCASE("non-Hermitian operators reconstruct too") {
    Rng rng(19);
    DenseOperator o;
    o.local_dim = 2;
    o.in_systems = {B, C};
    o.out_systems = {B, C};
    o.mat = Eigen::MatrixXcd(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) o.mat(i, j) = rng.gauss_complex();
    const auto terms = operator_schmidt_decompose(o, {B});
    Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(4, 4);
    for (const auto& t : terms)
      rebuilt += t.lambda * tensor(t.left, t.right).mat;
    CHECK(max_abs(o.mat - rebuilt) < 1e-9);
  }
  SUBCASE("cut must bipartition") {
    const DenseOperator id = identity_op(2, {B, C});
    CHECK_THROWS_AS(operator_schmidt_decompose(id, {}), composition_error);
    CHECK_THROWS_AS(operator_schmidt_decompose(id, {B, C}),
                    composition_error);
  }
}

TEST_CASE("fidelity and canonical phase") {
  Rng rng(29);
  StateVector s;
  s.local_dim = 4;
  s.systems = {A, B};
  s.amps = random_state_amps(16, rng);

  StateVector rotated = s;
  rotated.amps *= std::polar(1.0, 1.234);
  CHECK(fidelity_up_to_global_phase(s, rotated) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK(fidelity_up_to_global_phase(basis_state(2, {A}, {0}),
                                    basis_state(2, {A}, {1})) ==
        doctest::Approx(0.0));

  Eigen::VectorXcd plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(fidelity_up_to_global_phase(state_from_amplitudes(2, {A}, plus),
                                    basis_state(2, {A}, {0})) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));

  const auto [canon, removed] = canonicalize_phase(rotated);
  const auto [canon2, removed2] = canonicalize_phase(s);
  CHECK((canon.amps - canon2.amps).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(canon.amps(0).imag() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(canon.amps(0).real() > 0.0);
  CHECK(std::abs(wrap_phase(removed - removed2 - 1.234)) < 1e-12);
}

TEST_CASE("purity of pure states") {
  Rng rng(37);
  StateVector s;
  s.local_dim = 5;
  s.systems = {A, B};
  s.amps = random_state_amps(25, rng);
  CHECK(purity(dm_of(s)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("embed and apply agree with dense expectations") {
  const int n = 3;
  Rng rng(41);
  const Eigen::MatrixXcd m = random_hermitian(n, rng);
  const DenseOperator ob = single_system_op(n, B, m, true);
  StateVector s;
  s.local_dim = n;
  s.systems = {A, B};
  s.amps = random_state_amps(9, rng);

  const DenseOperator lifted = embed(ob, {A, B});
  const StateVector via_embed = apply(lifted, s);
  const StateVector direct = apply(ob, s);
  CHECK((via_embed.amps - direct.amps).cwiseAbs().maxCoeff() < 1e-12);

  const cplx e1 = expectation(ob, s);
  const cplx e2 = expectation(lifted, dm_of(s));
  CHECK(std::abs(e1 - e2) < 1e-12);
}
