#pragma once

#include <Eigen/Dense>

#include "qrf/common.hpp"

namespace qrf {

/// Element of the cyclic translation group Z_N. Values are kept reduced.
struct GroupElement {
  int value = 0;
  int modulus = 2;

  GroupElement() = default;
  GroupElement(int v, int n);

  GroupElement operator+(const GroupElement& o) const;
  GroupElement operator-(const GroupElement& o) const;
  GroupElement operator-() const;
  bool operator==(const GroupElement& o) const = default;
};

/// Momentum-sector label, an integer mod N. The physical momentum attached
/// to label k is 2*pi*k/N.
struct ChargeLabel {
  int value = 0;
  int modulus = 2;

  ChargeLabel() = default;
  ChargeLabel(int v, int n);

  ChargeLabel operator+(const ChargeLabel& o) const;
  ChargeLabel operator-() const;
  bool operator==(const ChargeLabel& o) const = default;
};

/// Multiplicative character of Z_N attached to a charge label.
struct Character {
  ChargeLabel charge;

  /// omega^{charge * x} with omega = exp(2*pi*i/N).
  cplx eval(const GroupElement& x) const;
};

/// exp(2*pi*i*k/N) evaluated without accumulating phase error.
cplx unit_root(int k, int n);

int mod_reduce(long long v, int n);

/// gcd of |a| and n (n > 0).
int mod_gcd(long long a, int n);

/// Multiplicative inverse of a mod n; requires gcd(a, n) == 1.
int mod_inverse(int a, int n);

/// Forward unitary DFT: out(k) = (1/sqrt(N)) sum_y omega^{-k y} in(y).
/// With the momentum kets used throughout (|k> has position amplitudes
/// omega^{+k y}/sqrt(N)), this maps position amplitudes to momentum
/// amplitudes.
Eigen::VectorXcd dft(const Eigen::VectorXcd& amplitudes);

/// Inverse of dft().
Eigen::VectorXcd idft(const Eigen::VectorXcd& amplitudes);

}  // namespace qrf
