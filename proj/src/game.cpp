#include "qrf/game.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace qrf {

namespace {

Eigen::VectorXcd normalized_or_throw(Eigen::VectorXcd v,
                                     const std::string& what) {
  const double nrm = v.norm();
  if (nrm < 1e-12) throw config_error(what + " has zero norm");
  return v / nrm;
}

/// Contract one system against a fixed ket; the remaining state is
/// renormalised and its squared norm returned.
std::pair<StateVector, double> project_component(const StateVector& s,
                                                 const SystemId& sys,
                                                 const Eigen::VectorXcd& ket) {
  const int n = s.local_dim;
  const int k = s.num_systems();
  const int pos = registry_position(s.systems, sys);
  Registry rest = registry_remove(s.systems, sys);
  StateVector out;
  out.local_dim = n;
  out.systems = rest;
  out.amps = Eigen::VectorXcd::Zero(pow_dim(n, k - 1));
  out.context = s.context;
  for (long long idx = 0; idx < s.dim(); ++idx) {
    const cplx a = s.amps(idx);
    if (a == cplx(0.0)) continue;
    const auto dg = digits_of(idx, n, k);
    std::vector<int> rd;
    rd.reserve(k - 1);
    for (int i = 0; i < k; ++i)
      if (i != pos) rd.push_back(dg[i]);
    out.amps(index_of(rd, n)) += std::conj(ket(dg[pos])) * a;
  }
  const double w = out.amps.squaredNorm();
  if (w > 1e-12) out.amps /= std::sqrt(w);
  return {out, w};
}

/// Marginal position distribution of one system.
std::vector<double> position_marginal(const StateVector& s,
                                      const SystemId& sys) {
  const int n = s.local_dim;
  const int k = s.num_systems();
  const int pos = registry_position(s.systems, sys);
  std::vector<double> p(n, 0.0);
  for (long long idx = 0; idx < s.dim(); ++idx) {
    const double w = std::norm(s.amps(idx));
    if (w == 0.0) continue;
    p[digits_of(idx, n, k)[pos]] += w;
  }
  return p;
}

/// Rigid translation of every system by +x.
Eigen::VectorXcd rigid_translate(const Eigen::VectorXcd& amps, int n, int k,
                                 int x) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(amps.size());
  for (long long idx = 0; idx < amps.size(); ++idx) {
    const cplx a = amps(idx);
    if (a == cplx(0.0)) continue;
    auto dg = digits_of(idx, n, k);
    for (auto& d : dg) d = mod_reduce(d + x, n);
    out(index_of(dg, n)) = a;
  }
  return out;
}

TomographyResult tomography_core(
    int n, const Registry& systems,
    const std::function<double(const DenseOperator&)>& expval,
    const FrameContext& context) {
  const long long d = pow_dim(n, static_cast<int>(systems.size()));
  const auto basis = hermitian_basis(static_cast<int>(d));
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& g : basis) {
    DenseOperator op;
    op.local_dim = n;
    op.in_systems = systems;
    op.out_systems = systems;
    op.mat = g;
    op.hermitian = true;
    rho += expval(op) * g;
  }

  TomographyResult result;
  result.rho.local_dim = n;
  result.rho.systems = systems;
  result.rho.mat = rho;
  result.purity = (rho * rho).trace().real();
  result.mixed_warning = result.purity < 1.0 - 1e-6;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  Eigen::VectorXcd dominant = es.eigenvectors().col(d - 1);
  StateVector rec;
  rec.local_dim = n;
  rec.systems = systems;
  rec.amps = dominant;
  rec.context = context;
  result.reconstructed = canonicalize_phase(rec).first;
  return result;
}

}  // namespace

StateVector make_kinematical(const GameConfig& config) {
  const int n = config.n;
  const Registry abc = {kFrameA, kSystemB, kFrameC};
  switch (config.preparation.type) {
    case Preparation::Type::Eq31: {
      const auto& p = config.preparation.eq31;
      Eigen::VectorXcd phi_b = p.phi_b;
      if (phi_b.size() == 0) {
        phi_b = Eigen::VectorXcd::Zero(n);
        phi_b(0) = 1.0;
      }
      if (phi_b.size() != n)
        throw config_error("phi_b amplitude table must have length N");
      phi_b = normalized_or_throw(phi_b, "phi_b");

      Eigen::VectorXcd amps =
          Eigen::VectorXcd::Zero(pow_dim(n, 3));
      const double w = 1.0 / std::sqrt(2.0);
      const cplx branch2 = std::polar(w, p.phi);
      const int x1 = mod_reduce(p.x1, n), x2 = mod_reduce(p.x2, n);
      const int z1 = mod_reduce(p.z1, n), z2 = mod_reduce(p.z2, n);
      for (int y = 0; y < n; ++y) {
        const cplx b = phi_b(y);
        if (b == cplx(0.0)) continue;
        amps(index_of({x1, y, z1}, n)) += w * b;
        amps(index_of({x2, y, z2}, n)) += branch2 * b;
      }
      StateVector s = state_from_amplitudes(n, abc, std::move(amps));
      s.amps = normalized_or_throw(s.amps, "Eq31 preparation");
      return s;
    }
    case Preparation::Type::Table: {
      if (config.preparation.table.size() != pow_dim(n, 3))
        throw config_error("preparation table must have length N^3");
      StateVector s =
          state_from_amplitudes(n, abc, config.preparation.table);
      s.amps = normalized_or_throw(s.amps, "table preparation");
      return s;
    }
    case Preparation::Type::Random: {
      Rng rng(config.preparation.random_seed);
      return state_from_amplitudes(n, abc,
                                   random_state_amps(pow_dim(n, 3), rng));
    }
  }
  throw config_error("unknown preparation type");
}

PhysicalState prepare(const GameConfig& config) {
  return sector_project(make_kinematical(config),
                        ChargeLabel(config.sector, config.n));
}

Distribution level1_statistics(const RelativeState& rel,
                               const DenseOperator& o_b,
                               const GroupElement& y) {
  if (o_b.in_systems.size() != 1 || o_b.in_systems[0] != kSystemB)
    throw composition_error("framed observable must act on B only");
  if (max_abs(o_b.mat - o_b.mat.adjoint()) > kTol)
    throw contract_error("framed observable must be Hermitian");

  // Marker is whichever frame system remains in the relative registry.
  Registry rest = registry_remove(rel.state.systems, kSystemB);
  if (rest.size() != 1)
    throw composition_error("expected a two-system relative state");
  const SystemId marker = rest[0];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(o_b.mat);
  Distribution dist;
  const int n = rel.state.local_dim;
  Eigen::VectorXcd ket = Eigen::VectorXcd::Zero(n);
  ket(mod_reduce(y.value, n)) = 1.0;
  const auto [conditioned, weight] =
      project_component(rel.state, marker, ket);
  for (int j = 0; j < es.eigenvalues().size(); ++j) {
    dist.outcomes.push_back(es.eigenvalues()(j));
    const cplx amp = es.eigenvectors().col(j).adjoint() * conditioned.amps;
    dist.probabilities.push_back(weight * std::norm(amp));
  }
  return dist;
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (a.outcomes.size() != b.outcomes.size())
    throw composition_error("distributions are not comparable");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.probabilities.size(); ++i)
    tv += std::abs(a.probabilities[i] - b.probabilities[i]);
  return 0.5 * tv;
}

Distribution sample_distribution(const Distribution& d, int shots, Rng& rng) {
  Distribution out = d;
  std::fill(out.probabilities.begin(), out.probabilities.end(), 0.0);
  const double total =
      std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0);
  for (int s = 0; s < shots; ++s) {
    double u = rng.uniform();
    if (u >= total) continue;  // marker elsewhere: null outcome
    for (std::size_t j = 0; j < d.probabilities.size(); ++j) {
      if (u < d.probabilities[j]) {
        out.probabilities[j] += 1.0;
        break;
      }
      u -= d.probabilities[j];
    }
  }
  for (auto& p : out.probabilities) p /= shots;
  return out;
}

double sample_expectation(const DenseOperator& herm, const StateVector& s,
                          int shots, Rng& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm.mat);
  const StateVector aligned = permute_systems(s, herm.in_systems);
  Eigen::VectorXd probs(es.eigenvalues().size());
  for (int j = 0; j < es.eigenvalues().size(); ++j) {
    const cplx amp = es.eigenvectors().col(j).adjoint() * aligned.amps;
    probs(j) = std::norm(amp);
  }
  double acc = 0.0;
  for (int t = 0; t < shots; ++t) {
    double u = rng.uniform() * probs.sum();
    int j = 0;
    while (j + 1 < probs.size() && u >= probs(j)) {
      u -= probs(j);
      ++j;
    }
    acc += es.eigenvalues()(j);
  }
  return acc / shots;
}

std::vector<double> framed_family_expectations(const StateVector& rel_state,
                                               const SystemId& marker) {
  const int n = rel_state.local_dim;
  std::vector<double> out;
  const auto basis = hermitian_basis(n);
  const DensityMatrix rho = dm_of(rel_state);
  for (const auto& g : basis) {
    const DenseOperator gb = single_system_op(n, kSystemB, g, true);
    for (int y = 0; y < n; ++y) {
      Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(n, n);
      proj(y, y) = 1.0;
      const DenseOperator framed =
          tensor(gb, single_system_op(n, marker, proj, true));
      out.push_back(expectation(framed, rho).real());
    }
  }
  return out;
}

std::vector<double> framed_family_expectations(const DensityMatrix& rel_dm,
                                               const SystemId& marker) {
  const int n = rel_dm.local_dim;
  std::vector<double> out;
  const auto basis = hermitian_basis(n);
  for (const auto& g : basis) {
    const DenseOperator gb = single_system_op(n, kSystemB, g, true);
    for (int y = 0; y < n; ++y) {
      Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(n, n);
      proj(y, y) = 1.0;
      const DenseOperator framed =
          tensor(gb, single_system_op(n, marker, proj, true));
      out.push_back(expectation(framed, rel_dm).real());
    }
  }
  return out;
}

TomographyResult level2_tomography(const RelativeState& rel, int shots,
                                   Rng* rng) {
  const StateVector& s = rel.state;
  const DensityMatrix rho = dm_of(s);
  auto expval = [&](const DenseOperator& op) {
    if (shots > 0 && rng != nullptr)
      return sample_expectation(op, s, shots, *rng);
    return expectation(op, rho).real();
  };
  return tomography_core(s.local_dim, s.systems, expval, s.context);
}

TomographyResult level2_tomography(const DensityMatrix& rel_dm) {
  auto expval = [&](const DenseOperator& op) {
    return expectation(op, rel_dm).real();
  };
  return tomography_core(rel_dm.local_dim, rel_dm.systems, expval,
                         FrameContext::external());
}

TomographyResult level2_tomography_relational(const PhysicalState& phys,
                                              const SystemId& frame,
                                              const GroupElement& origin) {
  Registry rest = registry_remove(phys.state.systems, frame);
  auto expval = [&](const DenseOperator& op) {
    const DenseOperator f =
        relational_observable(op, frame, origin, phys.sector);
    return expectation(f, phys.state).real();
  };
  return tomography_core(
      phys.state.local_dim, rest, expval,
      FrameContext::relative(frame, origin.value, phys.sector.value));
}

double extract_branch_phase(const RelativeState& rel, const SystemId& marker,
                            const GroupElement& pos1,
                            const GroupElement& pos2) {
  if (pos1.value == pos2.value)
    throw extraction_error("branch markers overlap");
  const int n = rel.state.local_dim;
  Eigen::VectorXcd ket1 = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd ket2 = Eigen::VectorXcd::Zero(n);
  ket1(pos1.value) = 1.0;
  ket2(pos2.value) = 1.0;
  const auto [b1, w1] = project_component(rel.state, marker, ket1);
  const auto [b2, w2] = project_component(rel.state, marker, ket2);
  if (w1 < 1e-8 || w2 < 1e-8)
    throw extraction_error("branch missing at the requested marker position");

  // Branch 2 is a rigid translate of branch 1 up to the inter-branch phase;
  // match the translation by maximising the overlap.
  const int k = b1.num_systems();
  int best = 0;
  cplx best_corr = 0.0;
  for (int delta = 0; delta < n; ++delta) {
    const Eigen::VectorXcd t1 = rigid_translate(b1.amps, n, k, delta);
    const cplx corr = t1.dot(b2.amps);
    if (std::abs(corr) > std::abs(best_corr) + 1e-12) {
      best_corr = corr;
      best = delta;
    }
  }
  (void)best;
  if (std::abs(best_corr) < 1e-8)
    throw extraction_error("branches do not overlap under any translation");
  return std::arg(best_corr);
}

double branch_phase_formula(double phi, int x1, int x2, int sector, int n) {
  return wrap_phase(phi + static_cast<double>(x1 - x2) * sector * kTwoPi / n);
}

GameConfig confusion_partner(const GameConfig& config, int other_sector) {
  if (config.preparation.type != Preparation::Type::Eq31)
    throw config_error("confusion partner requires an Eq31 preparation");
  GameConfig out = config;
  const auto& p = config.preparation.eq31;
  out.sector = mod_reduce(other_sector, config.n);
  out.preparation.eq31.phi = wrap_phase(
      p.phi + static_cast<double>(p.x1 - p.x2) *
                  (config.sector - out.sector) * kTwoPi / config.n);
  return out;
}

RecoveryResult recover_sector_phase_difference(double phi_a, double phi_c,
                                               int x1, int x2, int z1, int z2,
                                               int n) {
  const int delta = mod_reduce((x2 - z2) - (x1 - z1), n);
  return recover_sector_phase_difference_delta(phi_a, phi_c, delta, n);
}

RecoveryResult recover_sector_phase_difference_delta(double phi_a,
                                                     double phi_c, int delta,
                                                     int n) {
  delta = mod_reduce(delta, n);
  if (delta == 0)
    throw degenerate_geometry_error(
        "x1 - x2 = z1 - z2: the phase difference carries no sector "
        "information");
  const double dphi = wrap_phase(phi_a - phi_c);
  // P * delta = -dphi / (2 pi / N)  (mod N)
  const double lattice = kTwoPi / n;
  const int m = mod_reduce(std::llround(-dphi / lattice), n);
  if (std::abs(wrap_phase(dphi + m * lattice)) > 1e-6)
    throw indeterminate_error("phase difference off the sector lattice");

  const int g = mod_gcd(delta, n);
  RecoveryResult out;
  if (m % g != 0)
    throw indeterminate_error("phase difference incompatible with geometry");
  if (g == 1) {
    out.unique = true;
    out.sector = mod_reduce(static_cast<long long>(m) * mod_inverse(delta, n),
                            n);
    return out;
  }
  const int n0 = n / g;
  const int p0 =
      mod_reduce(static_cast<long long>(m / g) * mod_inverse(delta / g, n0),
                 n0);
  for (int t = 0; t < g; ++t) out.candidates.push_back(p0 + t * n0);
  std::sort(out.candidates.begin(), out.candidates.end());
  return out;
}

RelativeWaveTables make_wave_tables(const StateVector& rel_a,
                                    const StateVector& rel_c) {
  const int n = rel_a.local_dim;
  const StateVector a = permute_systems(rel_a, {kSystemB, kFrameC});
  const StateVector c = permute_systems(rel_c, {kFrameA, kSystemB});
  RelativeWaveTables t;
  t.n = n;
  t.phi_a = Eigen::MatrixXcd(n, n);
  t.phi_c = Eigen::MatrixXcd(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      t.phi_a(u, v) = a.amps(static_cast<long long>(u) * n + v);
      t.phi_c(u, v) = c.amps(static_cast<long long>(u) * n + v);
    }
  return t;
}

double wave_table_identity_deviation(const RelativeWaveTables& tables,
                                     int sector) {
  const int n = tables.n;
  // Align the single tomographic global phase on the heaviest entry.
  cplx align = 1.0;
  double best = 0.0;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      const cplx lhs = tables.phi_c(s, t);
      const cplx rhs = unit_root(mod_reduce(
                            static_cast<long long>(sector) * s, n), n) *
                       tables.phi_a(mod_reduce(t - s, n), mod_reduce(-s, n));
      const double w = std::min(std::abs(lhs), std::abs(rhs));
      if (w > best) {
        best = w;
        align = (std::abs(rhs) > 0) ? lhs / rhs : cplx(1.0);
      }
    }
  if (best == 0.0) return 0.0;
  align /= std::abs(align);
  double dev = 0.0;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      const cplx rhs = unit_root(mod_reduce(
                            static_cast<long long>(sector) * s, n), n) *
                       tables.phi_a(mod_reduce(t - s, n), mod_reduce(-s, n));
      dev = std::max(dev, std::abs(tables.phi_c(s, t) - align * rhs));
    }
  return dev;
}

RecoveryResult recover_sector_ratio(const RelativeWaveTables& tables,
                                    double angle_tol) {
  const int n = tables.n;
  constexpr double kSupport = 1e-8;

  // Column accumulator: arg of Phi_C(s, t) conj(Phi_A(t-s, -s)) per s.
  std::vector<cplx> column(n, 0.0);
  std::vector<bool> present(n, false);
  double modulus_dev = 0.0;
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      const cplx num = tables.phi_c(s, t);
      const cplx den = tables.phi_a(mod_reduce(t - s, n), mod_reduce(-s, n));
      if (std::abs(num) < kSupport || std::abs(den) < kSupport) continue;
      modulus_dev =
          std::max(modulus_dev, std::abs(std::abs(num / den) - 1.0));
      column[s] += num * std::conj(den);
      present[s] = true;
    }
  }
  std::vector<int> support;
  for (int s = 0; s < n; ++s)
    if (present[s]) support.push_back(s);
  if (support.size() < 2) {
    throw localization_error(
        "frames perfectly localised relative to one another: only one "
        "relative-position column is populated");
  }

  const int s0 = support.front();
  const double theta0 = std::arg(column[s0]);
  RecoveryResult out;
  for (int p = 0; p < n; ++p) {
    bool ok = true;
    for (const int s : support) {
      const double expected =
          static_cast<double>(p) * mod_reduce(s - s0, n) * kTwoPi / n;
      if (std::abs(wrap_phase(std::arg(column[s]) - theta0 - expected)) >
          angle_tol) {
        ok = false;
        break;
      }
    }
    if (ok) out.candidates.push_back(p);
  }
  if (out.candidates.empty())
    throw indeterminate_error("no sector matches the ratio phases");
  if (out.candidates.size() == 1) {
    out.unique = true;
    out.sector = out.candidates.front();
    out.candidates.clear();
  }
  out.margin = modulus_dev;
  return out;
}

RecoveryResult recover_sector_process(
    const std::vector<std::pair<StateVector, StateVector>>& pairs, int n) {
  if (pairs.empty()) throw config_error("process recovery needs probe pairs");
  std::vector<double> score(n, 0.0);
  for (int p = 0; p < n; ++p) {
    const FrameChange fc =
        build_S_P(kFrameA, kFrameC, {kSystemB}, ChargeLabel(p, n));
    double acc = 0.0;
    for (const auto& [input, observed] : pairs)
      acc += fidelity_up_to_global_phase(fc.apply_to(input), observed);
    score[p] = acc / pairs.size();
  }
  int best = 0;
  for (int p = 1; p < n; ++p)
    if (score[p] > score[best]) best = p;
  double runner_up = -1.0;
  for (int p = 0; p < n; ++p)
    if (p != best) runner_up = std::max(runner_up, score[p]);
  RecoveryResult out;
  out.margin = score[best] - runner_up;
  if (out.margin < 1e-6)
    throw indeterminate_error(
        "probe pairs do not span enough of the space to single out a "
        "sector");
  out.unique = true;
  out.sector = best;
  return out;
}

ExtraParticleResult extra_particle_mode(const StateVector& kin) {
  const int n = kin.local_dim;
  ExtraParticleResult result;
  result.sector_weights = sector_weights(kin);
  for (int p = 0; p < n; ++p)
    if (result.sector_weights[p] > 1e-12) result.populated.push_back(p);
  if (result.populated.size() < 2) return result;

  // First coprime-difference pair in ascending sector order.
  int p1 = -1, p2 = -1;
  bool coprime = false;
  for (std::size_t i = 0; i < result.populated.size() && !coprime; ++i) {
    for (std::size_t j = i + 1; j < result.populated.size(); ++j) {
      if (mod_gcd(result.populated[j] - result.populated[i], n) == 1) {
        p1 = result.populated[i];
        p2 = result.populated[j];
        coprime = true;
        break;
      }
    }
  }
  if (!coprime) {
    p1 = result.populated[0];
    p2 = result.populated[1];
  }
  result.sector_pair[0] = p1;
  result.sector_pair[1] = p2;

  // Post-select each sector and read the branch phase relative to A.
  const auto phase_in_sector = [&](int p) {
    const PhysicalState phys = sector_project(kin, ChargeLabel(p, n));
    const RelativeState rel = reduce(phys, kFrameA, GroupElement(0, n));
    const auto marginal = position_marginal(rel.state, kFrameC);
    std::vector<int> markers;
    for (int c = 0; c < n; ++c)
      if (marginal[c] > 1e-8) markers.push_back(c);
    if (markers.size() != 2)
      throw extraction_error(
          "expected two marker positions for the branch readout");
    return extract_branch_phase(rel, kFrameC, GroupElement(markers[0], n),
                                GroupElement(markers[1], n));
  };
  const double phi1 = phase_in_sector(p1);
  const double phi2 = phase_in_sector(p2);

  // Phi_{P2} - Phi_{P1} = d (P2 - P1) (2 pi / N) with d = x1 - x2.
  const double lattice = kTwoPi / n;
  const int m = mod_reduce(std::llround(wrap_phase(phi2 - phi1) / lattice), n);
  const int dp = mod_reduce(p2 - p1, n);
  const int g = mod_gcd(dp, n);
  if (g == 1) {
    const int d = mod_reduce(static_cast<long long>(m) * mod_inverse(dp, n), n);
    result.branch_separation = d;
    result.phi = wrap_phase(phi1 - static_cast<double>(d) * p1 * lattice);
  } else if (m % g == 0) {
    const int n0 = n / g;
    const int d0 = mod_reduce(
        static_cast<long long>(m / g) * mod_inverse(dp / g, n0), n0);
    for (int t = 0; t < g; ++t)
      result.separation_candidates.push_back(d0 + t * n0);
  }
  return result;
}

SectorMixReport superposition_sector_demo(int n, int p1, int p2, int x1,
                                          int x2, int y, int z) {
  const Registry abc = {kFrameA, kSystemB, kFrameC};
  Eigen::VectorXcd a_amp = Eigen::VectorXcd::Zero(n);
  a_amp(mod_reduce(x1, n)) += 1.0;
  a_amp(mod_reduce(x2, n)) += 1.0;
  a_amp.normalize();
  StateVector sa = state_from_amplitudes(n, {kFrameA}, a_amp);
  StateVector sb = basis_state(n, {kSystemB}, {mod_reduce(y, n)});
  StateVector sc = basis_state(n, {kFrameC}, {mod_reduce(z, n)});
  const StateVector kin3 = tensor(tensor(sa, sb), sc);

  Eigen::VectorXcd d_amp =
      momentum_ket(n, mod_reduce(-p1, n)) + momentum_ket(n, mod_reduce(-p2, n));
  d_amp.normalize();
  StateVector sd = state_from_amplitudes(n, {kSystemD}, d_amp);
  const StateVector kin4 = tensor(kin3, sd);

  const PhysicalState phys = sector_project(kin4, ChargeLabel(0, n));
  const RelativeState rel = reduce(phys, kFrameA, GroupElement(0, n));
  const DensityMatrix rho = dm_of(rel.state);
  const DensityMatrix rho_bc = partial_trace(rho, {kSystemB, kFrameC});

  SectorMixReport report;
  report.purity_bc = purity(rho_bc);

  StateVector branch[2];
  const int ps[2] = {mod_reduce(p1, n), mod_reduce(p2, n)};
  for (int i = 0; i < 2; ++i) {
    const PhysicalState single = sector_project(kin3, ChargeLabel(ps[i], n));
    branch[i] = reduce(single, kFrameA, GroupElement(0, n)).state;
  }
  report.overlap = fidelity_up_to_global_phase(branch[0], branch[1]);
  for (int i = 0; i < 2; ++i) {
    const auto [bc, w] =
        project_component(rel.state, kSystemD, momentum_ket(n, -ps[i]));
    report.branch_fidelity[i] =
        w > 1e-12 ? fidelity_up_to_global_phase(bc, branch[i]) : 0.0;
  }
  return report;
}

RecoveryResult perspectival_variant_round(const RelativeState& alice,
                                          Level method, Rng& rng,
                                          int process_rounds) {
  const int n = alice.state.local_dim;
  // The frame relation itself plays nature: Charlie's description is the
  // jumped state. The recovery below never touches the sector tag directly.
  const RelativeState charlie = frame_jump(alice, kFrameC, GroupElement(0, n));

  switch (method) {
    case Level::ThreePhaseDiff: {
      const auto marginal = position_marginal(alice.state, kFrameC);
      std::vector<int> markers;
      for (int c = 0; c < n; ++c)
        if (marginal[c] > 1e-8) markers.push_back(c);
      if (markers.size() != 2)
        throw extraction_error("phase-difference readout needs two branches");
      const int c1 = markers[0], c2 = markers[1];
      const double phi_a = extract_branch_phase(
          alice, kFrameC, GroupElement(c1, n), GroupElement(c2, n));
      // Branch alignment across frames: the branch with C at c sits with A
      // at -c in Charlie's description.
      const double phi_c = extract_branch_phase(
          charlie, kFrameA, GroupElement(-c1, n), GroupElement(-c2, n));
      return recover_sector_phase_difference_delta(phi_a, phi_c,
                                                   mod_reduce(c1 - c2, n), n);
    }
    case Level::ThreeRatio: {
      const StateVector a_canon = canonicalize_phase(alice.state).first;
      const TomographyResult tomo = level2_tomography(charlie);
      return recover_sector_ratio(
          make_wave_tables(a_canon, tomo.reconstructed));
    }
    case Level::ThreeProcess: {
      std::vector<std::pair<StateVector, StateVector>> pairs;
      pairs.emplace_back(alice.state,
                         level2_tomography(charlie).reconstructed);
      for (int r = 1; r < process_rounds; ++r) {
        RelativeState probe = alice;
        probe.state.amps = random_state_amps(alice.state.dim(), rng);
        const RelativeState seen = frame_jump(probe, kFrameC, GroupElement(0, n));
        pairs.emplace_back(probe.state,
                           level2_tomography(seen).reconstructed);
      }
      return recover_sector_process(pairs, n);
    }
    default:
      throw config_error("perspectival variant supports the level-3 methods");
  }
}

}  // namespace qrf
