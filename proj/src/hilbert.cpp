#include "qrf/hilbert.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace qrf {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw composition_error(msg);
}

std::vector<int> positions_in(const Registry& reg, const Registry& subset) {
  std::vector<int> out;
  out.reserve(subset.size());
  for (const auto& s : subset) out.push_back(registry_position(reg, s));
  return out;
}

}  // namespace

long long pow_dim(int base, int k) {
  long long d = 1;
  for (int i = 0; i < k; ++i) d *= base;
  return d;
}

long long index_of(const std::vector<int>& digits, int n) {
  long long idx = 0;
  for (int d : digits) idx = idx * n + d;
  return idx;
}

std::vector<int> digits_of(long long index, int n, int k) {
  std::vector<int> d(k, 0);
  for (int i = k - 1; i >= 0; --i) {
    d[i] = static_cast<int>(index % n);
    index /= n;
  }
  return d;
}

bool registry_contains(const Registry& reg, const SystemId& s) {
  return std::find(reg.begin(), reg.end(), s) != reg.end();
}

int registry_position(const Registry& reg, const SystemId& s) {
  const auto it = std::find(reg.begin(), reg.end(), s);
  require(it != reg.end(), "unknown system label " + s.label);
  return static_cast<int>(it - reg.begin());
}

Registry registry_sorted(Registry reg) {
  std::sort(reg.begin(), reg.end());
  return reg;
}

Registry registry_remove(Registry reg, const SystemId& s) {
  const int p = registry_position(reg, s);
  reg.erase(reg.begin() + p);
  return reg;
}

std::string registry_str(const Registry& reg) {
  std::string out;
  for (const auto& s : reg) out += s.label;
  return out;
}

StateVector basis_state(int n, const Registry& systems,
                        const std::vector<int>& digits) {
  require(systems.size() == digits.size(), "digit count != system count");
  StateVector s;
  s.local_dim = n;
  s.systems = systems;
  s.amps = Eigen::VectorXcd::Zero(pow_dim(n, static_cast<int>(systems.size())));
  std::vector<int> reduced = digits;
  for (auto& d : reduced) d = mod_reduce(d, n);
  s.amps(index_of(reduced, n)) = 1.0;
  return s;
}

StateVector state_from_amplitudes(int n, const Registry& systems,
                                  Eigen::VectorXcd amps) {
  require(amps.size() == pow_dim(n, static_cast<int>(systems.size())),
          "amplitude length does not match N^k");
  StateVector s;
  s.local_dim = n;
  s.systems = systems;
  s.amps = std::move(amps);
  return s;
}

DenseOperator identity_op(int n, const Registry& systems) {
  DenseOperator op;
  op.local_dim = n;
  op.in_systems = systems;
  op.out_systems = systems;
  const long long d = pow_dim(n, static_cast<int>(systems.size()));
  op.mat = Eigen::MatrixXcd::Identity(d, d);
  op.hermitian = true;
  return op;
}

Eigen::MatrixXcd shift_matrix(int n, int x) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int y = 0; y < n; ++y) m(mod_reduce(y + x, n), y) = 1.0;
  return m;
}

Eigen::MatrixXcd clock_matrix(int n, int power) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int y = 0; y < n; ++y)
    m(y, y) = unit_root(mod_reduce(static_cast<long long>(power) * y, n), n);
  return m;
}

Eigen::MatrixXcd parity_matrix(int n) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int y = 0; y < n; ++y) m(mod_reduce(-y, n), y) = 1.0;
  return m;
}

Eigen::MatrixXcd dft_kets_matrix(int n) {
  Eigen::MatrixXcd v(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    for (int y = 0; y < n; ++y)
      v(y, k) = scale * unit_root(mod_reduce(static_cast<long long>(k) * y, n), n);
  return v;
}

Eigen::MatrixXcd momentum_label_matrix(int n) {
  const Eigen::MatrixXcd v = dft_kets_matrix(n);
  Eigen::VectorXcd labels(n);
  for (int k = 0; k < n; ++k) labels(k) = static_cast<double>(k);
  return v * labels.asDiagonal() * v.adjoint();
}

Eigen::VectorXcd momentum_ket(int n, int k) {
  return dft_kets_matrix(n).col(mod_reduce(k, n));
}

DenseOperator single_system_op(int n, const SystemId& s, Eigen::MatrixXcd m,
                               bool hermitian) {
  DenseOperator op;
  op.local_dim = n;
  op.in_systems = {s};
  op.out_systems = {s};
  op.mat = std::move(m);
  op.hermitian = hermitian;
  if (hermitian) {
    require(max_abs(op.mat - op.mat.adjoint()) < kTol,
            "operator flagged Hermitian is not");
  }
  return op;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  require(a.local_dim == b.local_dim, "local dimension mismatch");
  for (const auto& s : b.systems)
    require(!registry_contains(a.systems, s),
            "overlapping system label " + s.label);
  StateVector out;
  out.local_dim = a.local_dim;
  out.systems = a.systems;
  out.systems.insert(out.systems.end(), b.systems.begin(), b.systems.end());
  out.amps = Eigen::VectorXcd(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    for (Eigen::Index j = 0; j < b.dim(); ++j)
      out.amps(i * b.dim() + j) = a.amps(i) * b.amps(j);
  out.context = a.context;
  return out;
}

DenseOperator tensor(const DenseOperator& a, const DenseOperator& b) {
  require(a.local_dim == b.local_dim, "local dimension mismatch");
  for (const auto& s : b.in_systems)
    require(!registry_contains(a.in_systems, s),
            "overlapping system label " + s.label);
  for (const auto& s : b.out_systems)
    require(!registry_contains(a.out_systems, s),
            "overlapping system label " + s.label);
  DenseOperator out;
  out.local_dim = a.local_dim;
  out.in_systems = a.in_systems;
  out.in_systems.insert(out.in_systems.end(), b.in_systems.begin(),
                        b.in_systems.end());
  out.out_systems = a.out_systems;
  out.out_systems.insert(out.out_systems.end(), b.out_systems.begin(),
                         b.out_systems.end());
  out.mat = Eigen::MatrixXcd(a.mat.rows() * b.mat.rows(),
                             a.mat.cols() * b.mat.cols());
  for (Eigen::Index i = 0; i < a.mat.rows(); ++i)
    for (Eigen::Index j = 0; j < a.mat.cols(); ++j)
      out.mat.block(i * b.mat.rows(), j * b.mat.cols(), b.mat.rows(),
                    b.mat.cols()) = a.mat(i, j) * b.mat;
  out.hermitian = a.hermitian && b.hermitian;
  return out;
}

StateVector permute_systems(const StateVector& s, const Registry& order) {
  require(order.size() == s.systems.size() &&
              registry_sorted(order) == registry_sorted(s.systems),
          "registry permutation mismatch");
  if (order == s.systems) return s;
  const int k = s.num_systems();
  const int n = s.local_dim;
  const auto pos = positions_in(s.systems, order);
  StateVector out = s;
  out.systems = order;
  for (long long idx = 0; idx < s.dim(); ++idx) {
    const auto d = digits_of(idx, n, k);
    std::vector<int> nd(k);
    for (int i = 0; i < k; ++i) nd[i] = d[pos[i]];
    out.amps(index_of(nd, n)) = s.amps(idx);
  }
  return out;
}

DensityMatrix permute_systems(const DensityMatrix& r, const Registry& order) {
  require(order.size() == r.systems.size() &&
              registry_sorted(order) == registry_sorted(r.systems),
          "registry permutation mismatch");
  if (order == r.systems) return r;
  const int k = static_cast<int>(r.systems.size());
  const int n = r.local_dim;
  const auto pos = positions_in(r.systems, order);
  const long long d = r.mat.rows();
  std::vector<long long> map(d);
  for (long long idx = 0; idx < d; ++idx) {
    const auto dg = digits_of(idx, n, k);
    std::vector<int> nd(k);
    for (int i = 0; i < k; ++i) nd[i] = dg[pos[i]];
    map[idx] = index_of(nd, n);
  }
  DensityMatrix out = r;
  out.systems = order;
  for (long long i = 0; i < d; ++i)
    for (long long j = 0; j < d; ++j) out.mat(map[i], map[j]) = r.mat(i, j);
  return out;
}

DenseOperator embed(const DenseOperator& op, const Registry& full) {
  require(op.endo(), "embed requires an endo-operator");
  for (const auto& s : op.in_systems)
    require(registry_contains(full, s), "embed target misses " + s.label);
  const int n = op.local_dim;
  const int k = static_cast<int>(full.size());
  const int ks = static_cast<int>(op.in_systems.size());
  const auto pos = positions_in(full, op.in_systems);
  const long long d = pow_dim(n, k);
  const long long ds = pow_dim(n, ks);
  DenseOperator out;
  out.local_dim = n;
  out.in_systems = full;
  out.out_systems = full;
  out.hermitian = op.hermitian;
  out.mat = Eigen::MatrixXcd::Zero(d, d);
  // Iterate the untouched digits once, filling the operator block pattern.
  for (long long col = 0; col < d; ++col) {
    const auto dg = digits_of(col, n, k);
    std::vector<int> sub(ks);
    for (int i = 0; i < ks; ++i) sub[i] = dg[pos[i]];
    const long long subcol = index_of(sub, n);
    for (long long subrow = 0; subrow < ds; ++subrow) {
      const cplx v = op.mat(subrow, subcol);
      if (v == cplx(0.0)) continue;
      auto ndg = dg;
      const auto srd = digits_of(subrow, n, ks);
      for (int i = 0; i < ks; ++i) ndg[pos[i]] = srd[i];
      out.mat(index_of(ndg, n), col) += v;
    }
  }
  return out;
}

DenseOperator permute_op(const DenseOperator& op, const Registry& in_order,
                         const Registry& out_order) {
  const int n = op.local_dim;
  const auto remap = [n](const Eigen::MatrixXcd& m, const Registry& cur,
                         const Registry& next, bool rows) {
    require(registry_sorted(cur) == registry_sorted(next),
            "registry permutation mismatch");
    const int k = static_cast<int>(cur.size());
    const auto pos = positions_in(cur, next);
    const long long d = rows ? m.rows() : m.cols();
    std::vector<long long> map(d);
    for (long long idx = 0; idx < d; ++idx) {
      const auto dg = digits_of(idx, n, k);
      std::vector<int> nd(k);
      for (int i = 0; i < k; ++i) nd[i] = dg[pos[i]];
      map[idx] = index_of(nd, n);
    }
    Eigen::MatrixXcd out(m.rows(), m.cols());
    if (rows) {
      for (long long i = 0; i < d; ++i) out.row(map[i]) = m.row(i);
    } else {
      for (long long j = 0; j < d; ++j) out.col(map[j]) = m.col(j);
    }
    return out;
  };
  DenseOperator out = op;
  out.mat = remap(out.mat, op.out_systems, out_order, true);
  out.mat = remap(out.mat, op.in_systems, in_order, false);
  out.in_systems = in_order;
  out.out_systems = out_order;
  return out;
}

StateVector apply(const DenseOperator& op, const StateVector& s) {
  const int n = s.local_dim;
  require(op.local_dim == n, "local dimension mismatch");
  for (const auto& sys : op.in_systems)
    require(registry_contains(s.systems, sys),
            "operator input system " + sys.label + " absent from state");

  Registry others = s.systems;
  for (const auto& sys : op.in_systems) others = registry_remove(others, sys);
  for (const auto& sys : op.out_systems)
    require(!registry_contains(others, sys),
            "operator output system " + sys.label + " collides");

  Registry result = others;
  result.insert(result.end(), op.out_systems.begin(), op.out_systems.end());
  result = registry_sorted(result);

  const int ko = static_cast<int>(others.size());
  const int ki = static_cast<int>(op.in_systems.size());
  const int kq = static_cast<int>(op.out_systems.size());
  const int kr = static_cast<int>(result.size());
  const long long do_ = pow_dim(n, ko);
  const long long di = pow_dim(n, ki);
  const long long dq = pow_dim(n, kq);

  const auto in_pos = positions_in(s.systems, op.in_systems);
  const auto oth_pos = positions_in(s.systems, others);
  // Positions of others and out-systems inside the sorted result registry.
  std::vector<int> oth_res(ko), out_res(kq);
  for (int i = 0; i < ko; ++i) oth_res[i] = registry_position(result, others[i]);
  for (int i = 0; i < kq; ++i)
    out_res[i] = registry_position(result, op.out_systems[i]);

  StateVector out;
  out.local_dim = n;
  out.systems = result;
  out.amps = Eigen::VectorXcd::Zero(pow_dim(n, kr));
  out.context = s.context;

  const int k = s.num_systems();
  for (long long idx = 0; idx < s.dim(); ++idx) {
    const cplx a = s.amps(idx);
    if (a == cplx(0.0)) continue;
    const auto dg = digits_of(idx, n, k);
    std::vector<int> in_dg(ki), oth_dg(ko);
    for (int i = 0; i < ki; ++i) in_dg[i] = dg[in_pos[i]];
    for (int i = 0; i < ko; ++i) oth_dg[i] = dg[oth_pos[i]];
    const long long col = index_of(in_dg, n);
    for (long long row = 0; row < dq; ++row) {
      const cplx v = op.mat(row, col);
      if (v == cplx(0.0)) continue;
      const auto out_dg = digits_of(row, n, kq);
      std::vector<int> res_dg(kr, 0);
      for (int i = 0; i < ko; ++i) res_dg[oth_res[i]] = oth_dg[i];
      for (int i = 0; i < kq; ++i) res_dg[out_res[i]] = out_dg[i];
      out.amps(index_of(res_dg, n)) += v * a;
    }
  }
  (void)do_;
  (void)di;
  return out;
}

DensityMatrix apply(const DenseOperator& op, const DensityMatrix& r) {
  require(op.endo(), "density-matrix application expects an endo-operator");
  const DenseOperator lifted =
      op.in_systems == r.systems ? op : embed(op, r.systems);
  DensityMatrix out = r;
  out.mat = lifted.mat * r.mat * lifted.mat.adjoint();
  return out;
}

cplx inner(const StateVector& a, const StateVector& b) {
  require(registry_sorted(a.systems) == registry_sorted(b.systems),
          "inner product registry mismatch");
  const StateVector bb = permute_systems(b, a.systems);
  return a.amps.dot(bb.amps);
}

cplx expectation(const DenseOperator& op, const StateVector& s) {
  const StateVector os = apply(op, s);
  return inner(s, os);
}

cplx expectation(const DenseOperator& op, const DensityMatrix& r) {
  const DenseOperator lifted =
      (op.endo() && op.in_systems == r.systems) ? op : embed(op, r.systems);
  return (lifted.mat * r.mat).trace();
}

DensityMatrix dm_of(const StateVector& s) {
  DensityMatrix r;
  r.local_dim = s.local_dim;
  r.systems = s.systems;
  r.mat = s.amps * s.amps.adjoint();
  return r;
}

double purity(const DensityMatrix& r) {
  return (r.mat * r.mat).trace().real();
}

DensityMatrix partial_trace(const DensityMatrix& r, const Registry& keep) {
  for (const auto& s : keep)
    require(registry_contains(r.systems, s),
            "unknown system label " + s.label);
  // Preserve the original ordering of kept systems.
  Registry kept;
  for (const auto& s : r.systems)
    if (registry_contains(keep, s)) kept.push_back(s);
  Registry traced;
  for (const auto& s : r.systems)
    if (!registry_contains(keep, s)) traced.push_back(s);

  const int n = r.local_dim;
  const int k = static_cast<int>(r.systems.size());
  const int kk = static_cast<int>(kept.size());
  const int kt = static_cast<int>(traced.size());
  const auto kpos = positions_in(r.systems, kept);
  const auto tpos = positions_in(r.systems, traced);
  const long long dk = pow_dim(n, kk);
  const long long dt = pow_dim(n, kt);

  DensityMatrix out;
  out.local_dim = n;
  out.systems = kept;
  out.mat = Eigen::MatrixXcd::Zero(dk, dk);

  std::vector<int> full(k, 0);
  for (long long i = 0; i < dk; ++i) {
    const auto di = digits_of(i, n, kk);
    for (long long j = 0; j < dk; ++j) {
      const auto dj = digits_of(j, n, kk);
      cplx acc = 0.0;
      for (long long t = 0; t < dt; ++t) {
        const auto dtg = digits_of(t, n, kt);
        for (int m = 0; m < kk; ++m) full[kpos[m]] = di[m];
        for (int m = 0; m < kt; ++m) full[tpos[m]] = dtg[m];
        const long long row = index_of(full, n);
        for (int m = 0; m < kk; ++m) full[kpos[m]] = dj[m];
        const long long col = index_of(full, n);
        acc += r.mat(row, col);
      }
      out.mat(i, j) = acc;
    }
  }
  return out;
}

double fidelity_up_to_global_phase(const StateVector& a,
                                   const StateVector& b) {
  return std::abs(inner(a, b));
}

std::pair<StateVector, double> canonicalize_phase(const StateVector& s) {
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    if (std::abs(s.amps(i)) > 1e-8) {
      const double phase = std::arg(s.amps(i));
      StateVector out = s;
      out.amps *= std::polar(1.0, -phase);
      return {out, phase};
    }
  }
  return {s, 0.0};
}

std::vector<Eigen::MatrixXcd> hermitian_basis(int dim) {
  std::vector<Eigen::MatrixXcd> basis;
  basis.reserve(static_cast<std::size_t>(dim) * dim);
  for (int i = 0; i < dim; ++i) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    m(i, i) = 1.0;
    basis.push_back(m);
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(dim, dim);
      sym(i, j) = inv_sqrt2;
      sym(j, i) = inv_sqrt2;
      basis.push_back(sym);
      Eigen::MatrixXcd asym = Eigen::MatrixXcd::Zero(dim, dim);
      asym(i, j) = cplx(0.0, -inv_sqrt2);
      asym(j, i) = cplx(0.0, inv_sqrt2);
      basis.push_back(asym);
    }
  }
  return basis;
}

std::vector<SchmidtTerm> operator_schmidt_decompose(const DenseOperator& op,
                                                    const Registry& left) {
  require(op.endo(), "operator Schmidt decomposition expects an endo-operator");
  require(op.in_systems.size() >= 2, "need at least two systems");
  require(!left.empty() && left.size() < op.in_systems.size(),
          "cut does not bipartition the registry");
  for (const auto& s : left)
    require(registry_contains(op.in_systems, s),
            "cut system " + s.label + " absent");

  Registry right;
  for (const auto& s : op.in_systems)
    if (!registry_contains(left, s)) right.push_back(s);
  Registry order = left;
  order.insert(order.end(), right.begin(), right.end());
  const DenseOperator o = permute_op(op, order, order);

  const int n = op.local_dim;
  const long long dl = pow_dim(n, static_cast<int>(left.size()));
  const long long dr = pow_dim(n, static_cast<int>(right.size()));

  const bool herm = max_abs(o.mat - o.mat.adjoint()) < 1e-12;

  // Reshuffle O[(il ir),(jl jr)] -> R[(il jl),(ir jr)].
  Eigen::MatrixXcd resh(dl * dl, dr * dr);
  for (long long il = 0; il < dl; ++il)
    for (long long ir = 0; ir < dr; ++ir)
      for (long long jl = 0; jl < dl; ++jl)
        for (long long jr = 0; jr < dr; ++jr)
          resh(il * dl + jl, ir * dr + jr) =
              o.mat(il * dr + ir, jl * dr + jr);

  std::vector<SchmidtTerm> terms;
  const auto make_op = [&](const Registry& reg, Eigen::MatrixXcd m,
                           bool h) {
    DenseOperator f;
    f.local_dim = n;
    f.in_systems = reg;
    f.out_systems = reg;
    f.mat = std::move(m);
    f.hermitian = h;
    return f;
  };

  if (herm) {
    // Coefficients in a Hermitian basis are real; a real SVD then yields
    // Hermitian factor pairs directly.
    const auto gl = hermitian_basis(static_cast<int>(dl));
    const auto gr = hermitian_basis(static_cast<int>(dr));
    Eigen::MatrixXd coeff(gl.size(), gr.size());
    for (std::size_t m = 0; m < gl.size(); ++m) {
      // vec(GL_m)^dagger R applied once per row.
      Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(dr * dr);
      for (long long il = 0; il < dl; ++il)
        for (long long jl = 0; jl < dl; ++jl) {
          const cplx g = std::conj(gl[m](il, jl));
          if (g == cplx(0.0)) continue;
          row += g * resh.row(il * dl + jl);
        }
      for (std::size_t p = 0; p < gr.size(); ++p) {
        cplx acc = 0.0;
        for (long long ir = 0; ir < dr; ++ir)
          for (long long jr = 0; jr < dr; ++jr)
            acc += row(ir * dr + jr) * std::conj(gr[p](ir, jr));
        coeff(m, p) = acc.real();
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        coeff, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) < kTol) break;
      Eigen::MatrixXcd lm = Eigen::MatrixXcd::Zero(dl, dl);
      Eigen::MatrixXcd rm = Eigen::MatrixXcd::Zero(dr, dr);
      for (std::size_t m = 0; m < gl.size(); ++m)
        lm += svd.matrixU()(m, k) * gl[m];
      for (std::size_t p = 0; p < gr.size(); ++p)
        rm += svd.matrixV()(p, k) * gr[p];
      terms.push_back({sv(k), make_op(left, std::move(lm), true),
                       make_op(right, std::move(rm), true)});
    }
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        resh, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) < kTol) break;
      Eigen::MatrixXcd lm(dl, dl), rm(dr, dr);
      for (long long il = 0; il < dl; ++il)
        for (long long jl = 0; jl < dl; ++jl)
          lm(il, jl) = svd.matrixU()(il * dl + jl, k);
      for (long long ir = 0; ir < dr; ++ir)
        for (long long jr = 0; jr < dr; ++jr)
          rm(ir, jr) = std::conj(svd.matrixV()(ir * dr + jr, k));
      terms.push_back({sv(k), make_op(left, std::move(lm), false),
                       make_op(right, std::move(rm), false)});
    }
  }
  return terms;
}

Eigen::MatrixXcd random_hermitian(int dim, Rng& rng) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& g : hermitian_basis(dim)) m += rng.gauss() * g;
  return m;
}

Eigen::VectorXcd random_state_amps(long long dim, Rng& rng) {
  Eigen::VectorXcd v(dim);
  for (long long i = 0; i < dim; ++i) v(i) = rng.gauss_complex();
  v.normalize();
  return v;
}

double max_abs(const Eigen::MatrixXcd& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace qrf
