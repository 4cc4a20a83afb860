#pragma once

#include <optional>

#include "qrf/observables.hpp"

namespace qrf {

// Fixed cast of the accessibility game.
inline const SystemId kFrameA{"A"};
inline const SystemId kSystemB{"B"};
inline const SystemId kFrameC{"C"};
inline const SystemId kSystemD{"D"};

enum class Level {
  One,
  Two,
  ThreePhaseDiff,
  ThreeRatio,
  ThreeProcess,
  ExtraParticle,
  Perspectival,
};

/// Two-branch preparation: (|x1>_A |z1>_C + e^{i phi} |x2>_A |z2>_C)/sqrt(2)
/// tensored with an arbitrary state of B.
struct Eq31Preparation {
  int x1 = 0, x2 = 0, z1 = 0, z2 = 0;
  double phi = 0.0;
  Eigen::VectorXcd phi_b;  // length N; normalised on use

  int marker_a_frame(int i) const { return i == 0 ? z1 - x1 : z2 - x2; }
};

struct Preparation {
  enum class Type { Eq31, Table, Random };
  Type type = Type::Eq31;
  Eq31Preparation eq31;
  Eigen::VectorXcd table;          // length N^3, registry [A, B, C]
  std::uint64_t random_seed = 0;   // Type::Random
};

struct GameConfig {
  int n = 4;
  int sector = 0;
  Preparation preparation;
  Level level = Level::One;
  int rounds = 2;
  double tolerance = kTol;
  std::uint64_t seed = 0;
  int shots = 0;  // 0: exact expectation values
};

StateVector make_kinematical(const GameConfig& config);

/// Preparation pipeline: kinematical state, then projection onto the
/// configured sector. Deterministic given the preparation seed.
PhysicalState prepare(const GameConfig& config);

// ---- Level 1: relative framed observables ----

struct Distribution {
  std::vector<double> outcomes;        // eigenvalues of O_B
  std::vector<double> probabilities;   // joint with the frame marker at y
};

/// Outcome distribution of the framed observable O_B (x) |y><y| on a
/// relative state. Probabilities sum to the weight of the marker position.
Distribution level1_statistics(const RelativeState& rel,
                               const DenseOperator& o_b,
                               const GroupElement& y);

double total_variation(const Distribution& a, const Distribution& b);

/// Expectation values of the complete framed family: every Hermitian basis
/// element on the non-frame system B paired with every sharp position of
/// the other frame. Identical across sectors for fixed geometry.
std::vector<double> framed_family_expectations(const StateVector& rel_state,
                                               const SystemId& marker);
std::vector<double> framed_family_expectations(const DensityMatrix& rel_dm,
                                               const SystemId& marker);

// ---- Level 2: relational tomography ----

struct TomographyResult {
  StateVector reconstructed;  // dominant eigenvector, canonical phase
  DensityMatrix rho;
  double purity = 1.0;
  bool mixed_warning = false;
};

/// Linear-inversion tomography from a complete Hermitian operator basis.
/// Exact by default; with shots > 0 every expectation value is estimated
/// from seeded finite sampling.
TomographyResult level2_tomography(const RelativeState& rel, int shots = 0,
                                   Rng* rng = nullptr);
TomographyResult level2_tomography(const DensityMatrix& rel_dm);

/// Same reconstruction with every basis element realised as an invariant
/// relational observable evaluated on the physical state.
TomographyResult level2_tomography_relational(const PhysicalState& phys,
                                              const SystemId& frame,
                                              const GroupElement& origin);

/// Inter-branch phase of a two-branch relative state. Branches are labelled
/// by the marker system sitting at pos1 / pos2; the returned value is the
/// phase of branch 2 relative to branch 1 under the translation-matched
/// overlap convention.
double extract_branch_phase(const RelativeState& rel, const SystemId& marker,
                            const GroupElement& pos1, const GroupElement& pos2);

/// Eq-31 family branch phase: phi + (x1 - x2) P (2 pi / N), wrapped.
double branch_phase_formula(double phi, int x1, int x2, int sector, int n);

/// The Level-2 confusion partner: a different sector with the compensating
/// preparation phase that reproduces the identical relative-to-A state.
GameConfig confusion_partner(const GameConfig& config, int other_sector);

// ---- Level 3: classical communication ----

struct RecoveryResult {
  bool unique = false;
  int sector = -1;
  std::vector<int> candidates;  // populated when not unique
  double margin = 0.0;          // process variant: fidelity gap to runner-up
};

/// Phase-difference recovery from Phi_A, Phi_C and the branch geometry.
/// Solves P * Delta = -(Phi_A - Phi_C)/(2 pi / N) mod N with
/// Delta = (x2 - z2) - (x1 - z1). Degenerate geometry (Delta = 0) throws.
RecoveryResult recover_sector_phase_difference(double phi_a, double phi_c,
                                               int x1, int x2, int z1, int z2,
                                               int n);

/// Same recovery with Delta supplied directly (Delta is itself observable
/// through the relative-position markers of the two frames).
RecoveryResult recover_sector_phase_difference_delta(double phi_a,
                                                     double phi_c, int delta,
                                                     int n);

/// Finite-shot emulation of measured statistics (seeded, deterministic).
Distribution sample_distribution(const Distribution& d, int shots, Rng& rng);
double sample_expectation(const DenseOperator& herm, const StateVector& s,
                          int shots, Rng& rng);

/// Relative wavefunctions as tables: Phi_A(u, v) over [B, C] and
/// Phi_C(s, t) over [A, B].
struct RelativeWaveTables {
  int n = 2;
  Eigen::MatrixXcd phi_a;  // (u, v)
  Eigen::MatrixXcd phi_c;  // (s, t)
};

RelativeWaveTables make_wave_tables(const StateVector& rel_a,
                                    const StateVector& rel_c);

/// Max deviation of Phi_C(s, t) from omega^{P s} Phi_A(t-s, -s) after a
/// single global phase alignment.
double wave_table_identity_deviation(const RelativeWaveTables& tables,
                                     int sector);

/// Ratio recovery: R(s, t) = Phi_C(s, t) / Phi_A(t-s, -s) carries the phase
/// omega^{P s}; the sector is filtered against all admissible columns.
/// Perfect inter-frame localisation throws localization_error.
RecoveryResult recover_sector_ratio(const RelativeWaveTables& tables,
                                    double angle_tol = 1e-6);

/// Process-tomography recovery from (relative-to-A input, observed
/// relative-to-C output) pairs: best-fitting sector by mean fidelity.
/// A fidelity margin below 1e-6 throws indeterminate_error.
RecoveryResult recover_sector_process(
    const std::vector<std::pair<StateVector, StateVector>>& pairs, int n);

// ---- Extra-particle readout ----

struct ExtraParticleResult {
  std::vector<double> sector_weights;
  std::vector<int> populated;
  std::optional<double> phi;
  std::optional<int> branch_separation;  // x1 - x2 mod N
  std::vector<int> separation_candidates;
  int sector_pair[2] = {-1, -1};
};

/// Incoherent sector decomposition of a two-branch kinematical preparation;
/// with at least two populated sectors the preparation phase phi becomes
/// recoverable through postselection.
ExtraParticleResult extra_particle_mode(const StateVector& kin);

// ---- Superposition of charge sectors ----

struct SectorMixReport {
  double purity_bc = 0.0;
  double overlap = 0.0;  // |<psi^{P1}|psi^{P2}>| of the branch states
  double branch_fidelity[2] = {0.0, 0.0};
};

/// Four-party embedding with D prepared in an equal superposition of the
/// momenta -P1 and -P2: after the sector-0 twirl, reduction to A and
/// tracing out D, the BC state is a mixture of the two single-sector
/// relative states.
SectorMixReport superposition_sector_demo(int n, int p1, int p2, int x1,
                                          int x2, int y, int z);

// ---- Purely perspectival variant ----

/// Alice prepares a relative-to-A state directly; the frame relation (the
/// sector tag carried by the preparation) produces Charlie's view, and the
/// chosen recovery runs without any external preparation.
RecoveryResult perspectival_variant_round(const RelativeState& alice,
                                          Level method, Rng& rng,
                                          int process_rounds = 3);

}  // namespace qrf
