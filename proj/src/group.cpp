#include "qrf/group.hpp"

#include <numeric>

namespace qrf {

namespace {

void check_modulus(int n) {
  if (n < kMinModulus || n > kMaxModulus) {
    throw config_error("modulus out of supported range [2, 64]: " +
                       std::to_string(n));
  }
}

void check_same(int a, int b) {
  if (a != b) {
    throw config_error("modulus mismatch: " + std::to_string(a) + " vs " +
                       std::to_string(b));
  }
}

}  // namespace

int mod_reduce(long long v, int n) {
  long long r = v % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

int mod_gcd(long long a, int n) {
  long long x = a % n;
  if (x < 0) x += n;
  return static_cast<int>(std::gcd(x, static_cast<long long>(n)));
}

int mod_inverse(int a, int n) {
  a = mod_reduce(a, n);
  if (mod_gcd(a, n) != 1) {
    throw config_error("no modular inverse: gcd(" + std::to_string(a) + ", " +
                       std::to_string(n) + ") != 1");
  }
  // Extended Euclid.
  int t = 0, new_t = 1;
  int r = n, new_r = a;
  while (new_r != 0) {
    const int q = r / new_r;
    int tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  return mod_reduce(t, n);
}

GroupElement::GroupElement(int v, int n) : value(mod_reduce(v, n)), modulus(n) {
  check_modulus(n);
}

GroupElement GroupElement::operator+(const GroupElement& o) const {
  check_same(modulus, o.modulus);
  return GroupElement(value + o.value, modulus);
}

GroupElement GroupElement::operator-(const GroupElement& o) const {
  check_same(modulus, o.modulus);
  return GroupElement(value - o.value, modulus);
}

GroupElement GroupElement::operator-() const {
  return GroupElement(-value, modulus);
}

ChargeLabel::ChargeLabel(int v, int n) : value(mod_reduce(v, n)), modulus(n) {
  check_modulus(n);
}

ChargeLabel ChargeLabel::operator+(const ChargeLabel& o) const {
  check_same(modulus, o.modulus);
  return ChargeLabel(value + o.value, modulus);
}

ChargeLabel ChargeLabel::operator-() const {
  return ChargeLabel(-value, modulus);
}

cplx unit_root(int k, int n) {
  const int r = mod_reduce(k, n);
  return std::polar(1.0, kTwoPi * static_cast<double>(r) / n);
}

cplx Character::eval(const GroupElement& x) const {
  check_same(charge.modulus, x.modulus);
  return unit_root(static_cast<int>(
                       (static_cast<long long>(charge.value) * x.value) %
                       charge.modulus),
                   charge.modulus);
}

Eigen::VectorXcd dft(const Eigen::VectorXcd& amplitudes) {
  const int n = static_cast<int>(amplitudes.size());
  check_modulus(n);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (int y = 0; y < n; ++y) {
      acc += unit_root(mod_reduce(-static_cast<long long>(k) * y, n), n) *
             amplitudes(y);
    }
    out(k) = scale * acc;
  }
  return out;
}

Eigen::VectorXcd idft(const Eigen::VectorXcd& amplitudes) {
  const int n = static_cast<int>(amplitudes.size());
  check_modulus(n);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int y = 0; y < n; ++y) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += unit_root(mod_reduce(static_cast<long long>(k) * y, n), n) *
             amplitudes(k);
    }
    out(y) = scale * acc;
  }
  return out;
}

}  // namespace qrf
