#include <doctest.h>

#include "qrf/group.hpp"

using namespace qrf;

TEST_CASE("group addition") {
  CHECK(GroupElement(3, 4) + GroupElement(2, 4) == GroupElement(1, 4));
  CHECK(GroupElement(0, 7) + GroupElement(5, 7) == GroupElement(5, 7));
  CHECK(GroupElement(1, 2) + GroupElement(1, 2) == GroupElement(0, 2));
  CHECK((-GroupElement(1, 4)) == GroupElement(3, 4));
  CHECK_THROWS_AS(GroupElement(1, 4) + GroupElement(1, 5), config_error);
}

TEST_CASE("modular helpers") {
  CHECK(mod_reduce(-1, 4) == 3);
  CHECK(mod_reduce(9, 4) == 1);
  CHECK(mod_gcd(-2, 4) == 2);
  CHECK(mod_inverse(3, 8) == 3);
  CHECK(mod_inverse(2, 5) == 3);
  CHECK_THROWS_AS(mod_inverse(2, 4), config_error);
}

TEST_CASE("character evaluation") {
  const Character trivial{ChargeLabel(0, 6)};
  for (int x = 0; x < 6; ++x)
    CHECK(std::abs(trivial.eval(GroupElement(x, 6)) - cplx(1.0)) < 1e-15);

  const Character c1{ChargeLabel(1, 4)};
  CHECK(std::abs(c1.eval(GroupElement(1, 4)) - cplx(0.0, 1.0)) < 1e-15);

  const Character c2{ChargeLabel(2, 4)};
  CHECK(std::abs(c2.eval(GroupElement(3, 4)) - cplx(-1.0, 0.0)) < 1e-15);

  CHECK_THROWS_AS(c1.eval(GroupElement(1, 5)), config_error);
}

TEST_CASE("character multiplicativity and completeness") {
  for (const int n : {2, 3, 4, 5, 8}) {
    for (int c = 0; c < n; ++c) {
      const Character chi{ChargeLabel(c, n)};
      for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
          const cplx lhs = chi.eval(GroupElement(x, n)) *
                           chi.eval(GroupElement(y, n));
          const cplx rhs = chi.eval(GroupElement(x + y, n));
          CHECK(std::abs(lhs - rhs) < 1e-12);
        }
      }
      for (int c2 = 0; c2 < n; ++c2) {
        const Character chi2{ChargeLabel(c2, n)};
        cplx acc = 0.0;
        for (int x = 0; x < n; ++x)
          acc += chi.eval(GroupElement(x, n)) *
                 std::conj(chi2.eval(GroupElement(x, n)));
        acc /= static_cast<double>(n);
        CHECK(std::abs(acc - (c == c2 ? cplx(1.0) : cplx(0.0))) < 1e-12);
      }
    }
  }
}

TEST_CASE("dft maps delta to uniform and back") {
  Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(5);
  delta(0) = 1.0;
  const Eigen::VectorXcd flat = dft(delta);
  for (int k = 0; k < 5; ++k)
    CHECK(std::abs(flat(k) - cplx(1.0 / std::sqrt(5.0))) < 1e-12);
  const Eigen::VectorXcd back = idft(flat);
  CHECK((back - delta).norm() < 1e-12);

  Eigen::VectorXcd two(2);
  two << 1.0, 0.0;
  const Eigen::VectorXcd had = dft(two);
  CHECK(std::abs(had(0) - cplx(1.0 / std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(had(1) - cplx(1.0 / std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("dft unitarity over the default grid") {
  for (const int n : {2, 3, 4, 5, 8}) {
    Eigen::MatrixXcd f(n, n);
    for (int y = 0; y < n; ++y) {
      Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(n);
      delta(y) = 1.0;
      f.col(y) = dft(delta);
    }
    const Eigen::MatrixXcd gram = f.adjoint() * f;
    CHECK((gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-12);

    Rng rng(17 + n);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.gauss_complex();
    CHECK((idft(dft(v)) - v).cwiseAbs().maxCoeff() < 1e-12);
  }
}
