#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qrf {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Default comparison tolerance for phases, norms and operator residuals.
inline constexpr double kTol = 1e-10;

/// Local dimensions supported per scenario.
inline constexpr int kMinModulus = 2;
inline constexpr int kMaxModulus = 64;

// Error vocabulary. Every throwing path in the library uses one of these.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct composition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct empty_sector_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct reduction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct extraction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degenerate_geometry_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct localization_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct indeterminate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic RNG. All randomness flows from one 64-bit seed, and the
/// distributions are hand-rolled on top of mt19937_64 so that streams are
/// identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  int below(int n) {
    return static_cast<int>(uniform() * n) % n;
  }

  /// Standard normal via Box-Muller.
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(kTwoPi * v);
    has_spare_ = true;
    return r * std::cos(kTwoPi * v);
  }

  cplx gauss_complex() {
    const double re = gauss();
    const double im = gauss();
    return {re, im};
  }

  /// Child stream, decorrelated from the parent by a fixed tweak.
  Rng fork(std::uint64_t tag) {
    return Rng(gen_() ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Wrap a phase into (-pi, pi].
inline double wrap_phase(double a) {
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  if (a > kPi) a -= kTwoPi;
  return a;
}

}  // namespace qrf
