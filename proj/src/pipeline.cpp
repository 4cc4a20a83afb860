#include "qrf/pipeline.hpp"

namespace qrf {

StateVector translate_all(const StateVector& s, int x) {
  const int n = s.local_dim;
  const int k = s.num_systems();
  StateVector out = s;
  out.amps = Eigen::VectorXcd::Zero(s.dim());
  for (long long idx = 0; idx < s.dim(); ++idx) {
    const cplx a = s.amps(idx);
    if (a == cplx(0.0)) continue;
    auto dg = digits_of(idx, n, k);
    for (auto& d : dg) d = mod_reduce(d + x, n);
    out.amps(index_of(dg, n)) = a;
  }
  return out;
}

PhysicalState sector_project(const StateVector& kin,
                             const ChargeLabel& sector) {
  const int n = kin.local_dim;
  if (sector.modulus != n)
    throw config_error("sector modulus does not match state dimension");
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(kin.dim());
  for (int x = 0; x < n; ++x) {
    const cplx ph = unit_root(
        mod_reduce(static_cast<long long>(sector.value) * x, n), n);
    acc += ph * translate_all(kin, x).amps;
  }
  acc /= static_cast<double>(n);
  const double weight = acc.squaredNorm();
  if (weight < 1e-12) {
    throw empty_sector_error("kinematical state has no support in sector " +
                             std::to_string(sector.value));
  }
  PhysicalState out;
  out.state = kin;
  out.state.amps = acc / std::sqrt(weight);
  out.state.context = FrameContext::physical(sector.value);
  out.sector = sector;
  out.weight = weight;
  return out;
}

std::vector<double> sector_weights(const StateVector& kin) {
  const int n = kin.local_dim;
  std::vector<double> w(n, 0.0);
  for (int p = 0; p < n; ++p) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(kin.dim());
    for (int x = 0; x < n; ++x) {
      acc += unit_root(mod_reduce(static_cast<long long>(p) * x, n), n) *
             translate_all(kin, x).amps;
    }
    w[p] = acc.squaredNorm() / (static_cast<double>(n) * n);
  }
  return w;
}

RelativeState reduce(const PhysicalState& phys, const SystemId& frame,
                     const GroupElement& x) {
  const StateVector& s = phys.state;
  const int n = s.local_dim;
  if (x.modulus != n) throw config_error("origin modulus mismatch");
  const int k = s.num_systems();
  const int fpos = registry_position(s.systems, frame);

  Registry rest = registry_remove(s.systems, frame);
  StateVector red;
  red.local_dim = n;
  red.systems = rest;
  red.amps = Eigen::VectorXcd::Zero(pow_dim(n, k - 1));
  for (long long idx = 0; idx < s.dim(); ++idx) {
    const auto dg = digits_of(idx, n, k);
    if (dg[fpos] != x.value) continue;
    std::vector<int> rd;
    rd.reserve(k - 1);
    for (int i = 0; i < k; ++i)
      if (i != fpos) rd.push_back(dg[i]);
    red.amps(index_of(rd, n)) = s.amps(idx);
  }
  const double cn = red.amps.norm();
  if (cn < 1e-12) {
    throw reduction_error("frame " + frame.label +
                          " has no amplitude at the requested origin");
  }
  red.amps /= cn;
  red.context = FrameContext::relative(frame, x.value, phys.sector.value);

  RelativeState out;
  out.state = std::move(red);
  out.frame = frame;
  out.origin = x;
  out.sector = phys.sector;
  out.conditional_norm = cn;
  return out;
}

RelativeState frame_jump(const RelativeState& rel, const SystemId& new_frame,
                         const GroupElement& z) {
  if (!registry_contains(rel.state.systems, new_frame)) {
    throw composition_error("new frame " + new_frame.label +
                            " absent from relative state");
  }
  Registry spect = registry_remove(rel.state.systems, new_frame);
  const FrameChange fc = build_S_P_XZ(rel.frame, new_frame, spect, rel.sector,
                                      rel.origin, z);
  RelativeState out;
  out.state = fc.apply_to(rel.state);
  out.state.context =
      FrameContext::relative(new_frame, z.value, rel.sector.value);
  out.frame = new_frame;
  out.origin = z;
  out.sector = rel.sector;
  out.conditional_norm = rel.conditional_norm;
  return out;
}

DenseOperator incoherent_twirl(const DenseOperator& op,
                               const ChargeLabel& sector) {
  if (!op.endo())
    throw composition_error("incoherent twirl expects an endo-operator");
  const int n = op.local_dim;
  DenseOperator out = op;
  out.mat = Eigen::MatrixXcd::Zero(op.mat.rows(), op.mat.cols());
  for (int x = 0; x < n; ++x) {
    const DenseOperator u =
        charged_translation_rep(op.in_systems, sector, GroupElement(x, n));
    out.mat += u.mat * op.mat * u.mat.adjoint();
  }
  out.mat /= static_cast<double>(n);
  return out;
}

DenseOperator relational_observable(const DenseOperator& op,
                                    const SystemId& frame,
                                    const GroupElement& x,
                                    const ChargeLabel& sector) {
  if (!op.endo())
    throw composition_error("relational observable expects an endo-operator");
  if (registry_contains(op.in_systems, frame))
    throw composition_error("observable acts on the frame system");
  const int n = op.local_dim;

  Registry full = op.in_systems;
  full.push_back(frame);
  full = registry_sorted(full);
  const int k = static_cast<int>(full.size());
  const int fpos = registry_position(full, frame);
  const long long d = pow_dim(n, k);
  const long long dsub = op.mat.rows();

  // Positions of the observable's systems inside the full registry.
  std::vector<int> opos;
  for (const auto& s : op.in_systems)
    opos.push_back(registry_position(full, s));

  DenseOperator out;
  out.local_dim = n;
  out.in_systems = full;
  out.out_systems = full;
  out.hermitian = op.hermitian;
  out.mat = Eigen::MatrixXcd::Zero(d, d);

  const int ksub = static_cast<int>(op.in_systems.size());
  for (int xa = 0; xa < n; ++xa) {
    const DenseOperator u = charged_translation_rep(
        op.in_systems, sector, GroupElement(xa - x.value, n));
    const Eigen::MatrixXcd block = u.mat * op.mat * u.mat.adjoint();
    // Scatter the block onto the frame-diagonal sector x_frame = xa.
    for (long long r = 0; r < dsub; ++r) {
      const auto rd = digits_of(r, n, ksub);
      for (long long c = 0; c < dsub; ++c) {
        const cplx v = block(r, c);
        if (v == cplx(0.0)) continue;
        const auto cd = digits_of(c, n, ksub);
        std::vector<int> row(k, 0), col(k, 0);
        row[fpos] = xa;
        col[fpos] = xa;
        for (int i = 0; i < ksub; ++i) {
          row[opos[i]] = rd[i];
          col[opos[i]] = cd[i];
        }
        out.mat(index_of(row, n), index_of(col, n)) = v;
      }
    }
  }
  return out;
}

PhysicalDensity sector_project_dm(const DensityMatrix& rho,
                                  const ChargeLabel& sector) {
  const int n = rho.local_dim;
  if (sector.modulus != n)
    throw config_error("sector modulus does not match state dimension");
  const DenseOperator id = identity_op(n, rho.systems);
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(id.mat.rows(), id.mat.cols());
  for (int x = 0; x < n; ++x) {
    proj += charged_translation_rep(rho.systems, sector, GroupElement(x, n)).mat;
  }
  proj /= static_cast<double>(n);
  Eigen::MatrixXcd m = proj * rho.mat * proj.adjoint();
  const double weight = m.trace().real();
  if (weight < 1e-12)
    throw empty_sector_error("density matrix has no support in sector " +
                             std::to_string(sector.value));
  PhysicalDensity out;
  out.dm = rho;
  out.dm.mat = m / weight;
  out.sector = sector;
  out.weight = weight;
  return out;
}

DensityMatrix reduce_dm(const DensityMatrix& rho, const SystemId& frame,
                        const GroupElement& x) {
  const int n = rho.local_dim;
  const int k = static_cast<int>(rho.systems.size());
  const int fpos = registry_position(rho.systems, frame);
  Registry rest = registry_remove(rho.systems, frame);
  const long long dr = pow_dim(n, k - 1);

  DensityMatrix out;
  out.local_dim = n;
  out.systems = rest;
  out.mat = Eigen::MatrixXcd::Zero(dr, dr);

  std::vector<long long> rows;
  rows.reserve(dr);
  for (long long idx = 0; idx < rho.mat.rows(); ++idx) {
    const auto dg = digits_of(idx, n, k);
    if (dg[fpos] == x.value) rows.push_back(idx);
  }
  for (long long i = 0; i < dr; ++i)
    for (long long j = 0; j < dr; ++j) out.mat(i, j) = rho.mat(rows[i], rows[j]);
  const double tr = out.mat.trace().real();
  if (tr < 1e-12)
    throw reduction_error("frame " + frame.label +
                          " has no weight at the requested origin");
  out.mat /= tr;
  return out;
}

}  // namespace qrf
