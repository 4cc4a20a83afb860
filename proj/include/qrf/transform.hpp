#pragma once

#include <functional>

#include "qrf/hilbert.hpp"

namespace qrf {

/// Branch-dependent phase f(x) for the generalised frame-change family,
/// tabulated over Z_N (radians).
struct PhaseFunction {
  std::vector<double> values;

  int modulus() const { return static_cast<int>(values.size()); }
  double at(int x) const { return values[mod_reduce(x, modulus())]; }
  cplx factor(int x) const { return std::polar(1.0, at(x)); }

  static PhaseFunction zero(int n) { return {std::vector<double>(n, 0.0)}; }
  /// The character phase f(x) = 2*pi*c*x/N.
  static PhaseFunction character(int n, int c);
};

/// A constructed frame-change unitary together with its metadata.
///
/// Every member of the family acts on basis states as
///   |y...>_spectators |z>_target  ->  phase(z) |a0 - z>_source |y... + s0 - z>
/// which covers S^P (a0 = s0 = 0, phase = omega^{-zP}), the origin-shifted
/// S^P(X,Z) (a0 = X+Z, s0 = Z, phase = omega^{(Z-z)P}) and S^f
/// (a0 = s0 = 0, phase = e^{if(z)}).
///
/// Input registry: [spectators..., target]; output: [source, spectators...].
/// The A-for-C relabeling is explicit in those registries; applying the
/// change through apply() also resorts the state registry.
class FrameChange {
 public:
  SystemId source;
  SystemId target;
  std::vector<SystemId> spectators;
  int local_dim = 2;
  ChargeLabel sector;             // meaningful for the S^P forms
  GroupElement origin_source;     // X
  GroupElement origin_target;     // Z
  bool phase_function_form = false;
  PhaseFunction phase_fn;

  Registry in_systems() const;
  Registry out_systems() const;

  /// phase(z), the target-position-controlled phase.
  cplx phase(int z) const;
  /// Source digit produced from target digit z.
  int source_digit(int z) const;
  /// Shift applied to every spectator digit when the target digit is z.
  int spectator_shift(int z) const;

  /// Apply to a state whose registry contains all input systems (and not the
  /// source). O(dim) -- no matrix is materialised.
  StateVector apply_to(const StateVector& s) const;

  /// Dense matrix from in-registry to out-registry. Guarded against large
  /// dimensions; intended for the verification suites at desk scale.
  DenseOperator matrix() const;

  /// The adjoint as a dense operator (registries swapped).
  DenseOperator adjoint_matrix() const;
};

/// Parity-swap |x>_c -> |-x>_a as a rectangular dense operator.
DenseOperator parity_swap(const SystemId& a, const SystemId& c, int n);

/// Quantum-controlled translation: |x>_control |y...>_targets ->
/// omega^{-x*sector} |x> |y-x ...>. Sector 0 is the standard controlled
/// shift. Registry [targets..., control] on both sides.
DenseOperator controlled_translation(const SystemId& control,
                                     const std::vector<SystemId>& targets,
                                     const ChargeLabel& sector);

/// Diagonal sector phase on one system: sum_z omega^{-sector*z} |z><z|.
DenseOperator sector_phase(const SystemId& s, const ChargeLabel& sector);

/// Generalised frame-change for a fixed charge sector, frames at the origin.
FrameChange build_S_P(const SystemId& source, const SystemId& target,
                      const std::vector<SystemId>& spectators,
                      const ChargeLabel& sector);

/// Perspective-neutral form with explicit frame origins X (source) and Z
/// (target). Equals build_S_P at X = Z = 0.
FrameChange build_S_P_XZ(const SystemId& source, const SystemId& target,
                         const std::vector<SystemId>& spectators,
                         const ChargeLabel& sector, const GroupElement& x,
                         const GroupElement& z);

/// Frame change with an arbitrary tabulated phase: parity-swap composed with
/// the standard controlled translation and the diagonal phase e^{if(target)}.
FrameChange build_S_f(const SystemId& source, const SystemId& target,
                      const std::vector<SystemId>& spectators,
                      const PhaseFunction& f);

/// The charged translation representation T^P(x): every listed system is
/// shifted by x and the state picks up omega^{sector*x}.
DenseOperator charged_translation_rep(const std::vector<SystemId>& systems,
                                      const ChargeLabel& sector,
                                      const GroupElement& x);

struct TransitivityResult {
  bool transitive = false;
  double residual = 0.0;
};

/// Checks S_{2->3} S_{1->2} = S_{1->3} over a three-frame family built by
/// `builder(source, target, spectator)`.
TransitivityResult check_transitivity(
    int n, const std::function<FrameChange(const SystemId&, const SystemId&,
                                           const SystemId&)>& builder);

TransitivityResult check_transitivity_sector(int n, const ChargeLabel& sector);
TransitivityResult check_transitivity_phase(const PhaseFunction& f);

struct UnitarityResult {
  bool inverse_law = false;
  double residual = 0.0;
};

/// Checks (S_{src->tgt})^dagger equals the reverse-direction construction.
UnitarityResult check_unitarity_inverse(const FrameChange& fc);

struct PhaseClassification {
  bool admissible = false;
  int character_exponent = 0;   // c with e^{if(x)} = omega^{c x}
  std::string reason;           // "fails transitivity" / "fails unitarity"
};

/// Admissible phases are exactly the characters of Z_N: fit c from f(1),
/// verify every x, and name the broken frame-change law otherwise.
PhaseClassification classify_admissible_phase(const PhaseFunction& f);

/// Compose two frame changes (later after earlier), aligning the
/// intermediate registries. Result maps earlier.in -> later.out.
DenseOperator compose(const FrameChange& later, const FrameChange& earlier);

/// Max-abs difference between two operators after aligning registries.
double operator_distance(const DenseOperator& a, const DenseOperator& b);

}  // namespace qrf
