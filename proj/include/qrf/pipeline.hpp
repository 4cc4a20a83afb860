#pragma once

#include "qrf/transform.hpp"

namespace qrf {

/// Unconstrained preparation relative to the external frame.
struct KinematicalState {
  StateVector state;
};

/// Constrained state in a fixed charge sector. The defining property is
/// invariance under the charged translation representation; equivalently,
/// rigidly translating every position by -x multiplies the state by
/// omega^{P x}.
struct PhysicalState {
  StateVector state;
  ChargeLabel sector;
  double weight = 0.0;  // squared norm of the raw projection
};

/// State relative to an internal frame at a chosen origin; the frame system
/// is absent from the registry.
struct RelativeState {
  StateVector state;
  SystemId frame;
  GroupElement origin;
  ChargeLabel sector;
  double conditional_norm = 0.0;
};

/// Rigid translation of every subsystem position by +x (no phase).
StateVector translate_all(const StateVector& s, int x);

/// Coherent G-twirl onto sector P: (1/N) sum_x omega^{Px} translate_all(x).
/// Returns the normalised projection and its squared-norm weight. Weights
/// over all P sum to one. Projections lighter than 1e-12 raise
/// empty_sector_error.
PhysicalState sector_project(const StateVector& kin, const ChargeLabel& sector);

/// Weight of every sector (no normalisation, no throwing).
std::vector<double> sector_weights(const StateVector& kin);

/// Schroedinger reduction: condition the frame system on position X and
/// renormalise. For states out of sector_project the conditional norm is
/// 1/sqrt(N) for every X.
RelativeState reduce(const PhysicalState& phys, const SystemId& frame,
                     const GroupElement& x);

/// Jump into another internal frame via the origin-aware frame change; the
/// result equals reducing the same physical state directly at new_frame.
RelativeState frame_jump(const RelativeState& rel, const SystemId& new_frame,
                         const GroupElement& z);

/// Incoherent G-twirl of an observable: (1/N) sum_x U O U^dagger over the
/// (charged) translation representation. Output commutes with every total
/// shift.
DenseOperator incoherent_twirl(const DenseOperator& op,
                               const ChargeLabel& sector);

/// Relational observable: the frame-conditioned transport of O,
/// sum_x |x><x|_frame (x) U(x - X) O U(x - X)^dagger. Invariant under the
/// incoherent twirl; its expectation on a physical state equals the
/// expectation of O on the corresponding relative state.
DenseOperator relational_observable(const DenseOperator& op,
                                    const SystemId& frame,
                                    const GroupElement& x,
                                    const ChargeLabel& sector);

// Mixed-state pipeline (used by the superposition-of-sectors analysis and
// the superposition-vs-mixture comparison).

struct PhysicalDensity {
  DensityMatrix dm;
  ChargeLabel sector;
  double weight = 0.0;
};

PhysicalDensity sector_project_dm(const DensityMatrix& rho,
                                  const ChargeLabel& sector);
DensityMatrix reduce_dm(const DensityMatrix& rho, const SystemId& frame,
                        const GroupElement& x);

}  // namespace qrf
