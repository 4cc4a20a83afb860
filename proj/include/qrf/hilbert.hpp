#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qrf/group.hpp"

namespace qrf {

/// Symbolic label of an N-level subsystem (A, B, C, ...).
struct SystemId {
  std::string label;

  SystemId() = default;
  SystemId(const char* s) : label(s) {}  // NOLINT: intended implicit
  explicit SystemId(std::string s) : label(std::move(s)) {}

  auto operator<=>(const SystemId&) const = default;
};

using Registry = std::vector<SystemId>;

/// Frame tag carried by every state: either the external (Eve) description,
/// the constrained perspective-neutral description in a fixed sector, or the
/// description relative to an internal frame at a chosen origin.
struct FrameContext {
  enum class Kind { External, Physical, Relative };
  Kind kind = Kind::External;
  int sector = 0;        // Physical / Relative
  SystemId frame;        // Relative
  int origin = 0;        // Relative

  static FrameContext external() { return {}; }
  static FrameContext physical(int sector) {
    return {Kind::Physical, sector, {}, 0};
  }
  static FrameContext relative(const SystemId& frame, int origin, int sector) {
    return {Kind::Relative, sector, frame, origin};
  }
};

/// Pure state over an ordered list of N-level subsystems. Amplitudes are
/// row-major over the registry: the first system is the most significant
/// digit of the basis index.
struct StateVector {
  int local_dim = 2;
  Registry systems;
  Eigen::VectorXcd amps;
  FrameContext context;

  Eigen::Index dim() const { return amps.size(); }
  int num_systems() const { return static_cast<int>(systems.size()); }
  double norm() const { return amps.norm(); }
};

/// Dense operator between two registries of equal local dimension. Square
/// (in == out) for observables; rectangular registries for frame changes.
struct DenseOperator {
  int local_dim = 2;
  Registry in_systems;
  Registry out_systems;
  Eigen::MatrixXcd mat;
  bool hermitian = false;

  bool endo() const { return in_systems == out_systems; }
};

struct DensityMatrix {
  int local_dim = 2;
  Registry systems;
  Eigen::MatrixXcd mat;

  double trace() const { return mat.trace().real(); }
};

// ---- registry / index helpers ----

long long pow_dim(int base, int k);
long long index_of(const std::vector<int>& digits, int n);
std::vector<int> digits_of(long long index, int n, int k);
bool registry_contains(const Registry& reg, const SystemId& s);
int registry_position(const Registry& reg, const SystemId& s);
Registry registry_sorted(Registry reg);
Registry registry_remove(Registry reg, const SystemId& s);
std::string registry_str(const Registry& reg);

// ---- construction ----

StateVector basis_state(int n, const Registry& systems,
                        const std::vector<int>& digits);
StateVector state_from_amplitudes(int n, const Registry& systems,
                                  Eigen::VectorXcd amps);
DenseOperator identity_op(int n, const Registry& systems);

/// Single-system building blocks.
Eigen::MatrixXcd shift_matrix(int n, int x);        // |y> -> |y+x>
Eigen::MatrixXcd clock_matrix(int n, int power);    // diag(omega^{power*y})
Eigen::MatrixXcd parity_matrix(int n);              // |y> -> |-y>
Eigen::MatrixXcd momentum_label_matrix(int n);      // diag(k) in DFT basis
Eigen::MatrixXcd dft_kets_matrix(int n);            // columns are |k>
Eigen::VectorXcd momentum_ket(int n, int k);
DenseOperator single_system_op(int n, const SystemId& s, Eigen::MatrixXcd m,
                               bool hermitian = false);

// ---- composition and application ----

StateVector tensor(const StateVector& a, const StateVector& b);
DenseOperator tensor(const DenseOperator& a, const DenseOperator& b);

/// Reorder a state's registry. The permutation is explicit; amplitudes are
/// rewritten to match the new digit order.
StateVector permute_systems(const StateVector& s, const Registry& order);
DensityMatrix permute_systems(const DensityMatrix& r, const Registry& order);

/// Lift an endo-operator to a larger registry (identity elsewhere).
DenseOperator embed(const DenseOperator& op, const Registry& full);

/// Reorder both registries of an operator. in/out orders must be
/// permutations of the current ones.
DenseOperator permute_op(const DenseOperator& op, const Registry& in_order,
                         const Registry& out_order);

/// Apply an operator whose in-registry is a subset of the state's systems.
/// The touched block is replaced by the operator's out-registry; the result
/// registry is sorted by label.
StateVector apply(const DenseOperator& op, const StateVector& s);
DensityMatrix apply(const DenseOperator& op, const DensityMatrix& r);

cplx inner(const StateVector& a, const StateVector& b);
cplx expectation(const DenseOperator& op, const StateVector& s);
cplx expectation(const DenseOperator& op, const DensityMatrix& r);

DensityMatrix dm_of(const StateVector& s);
double purity(const DensityMatrix& r);

/// Trace out everything but `keep` (subset of the registry, any order; the
/// result registry preserves the original order of kept systems).
DensityMatrix partial_trace(const DensityMatrix& r, const Registry& keep);

/// |<a|b>| on matching registries (permutes b if needed).
double fidelity_up_to_global_phase(const StateVector& a, const StateVector& b);

/// Canonical phase convention: the first amplitude with modulus > 1e-8 in
/// lexicographic index order is made real positive. Returns the canonical
/// state and the phase that was removed.
std::pair<StateVector, double> canonicalize_phase(const StateVector& s);

// ---- operator Schmidt decomposition ----

struct SchmidtTerm {
  double lambda = 0.0;
  DenseOperator left;
  DenseOperator right;
};

/// O = sum_k lambda_k L_k (x) R_k across the (left | rest) cut, factors
/// orthonormal in the Hilbert-Schmidt inner product, lambda descending,
/// terms below 1e-10 dropped. Hermitian inputs yield Hermitian factors
/// (the decomposition is computed in a Hermitian operator basis, where the
/// coefficient matrix is real).
std::vector<SchmidtTerm> operator_schmidt_decompose(const DenseOperator& op,
                                                    const Registry& left);

/// Hilbert-Schmidt-orthonormal Hermitian basis of dim x dim matrices:
/// dim diagonal units, then symmetric and antisymmetric pair combinations.
std::vector<Eigen::MatrixXcd> hermitian_basis(int dim);

Eigen::MatrixXcd random_hermitian(int dim, Rng& rng);
Eigen::VectorXcd random_state_amps(long long dim, Rng& rng);

double max_abs(const Eigen::MatrixXcd& m);

}  // namespace qrf
