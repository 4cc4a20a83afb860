#include "qrf/transform.hpp"

#include <algorithm>
#include <cmath>

namespace qrf {

namespace {

// Dense frame-change matrices are a verification device; state application
// goes through apply_to. Keep realised dimensions at desk scale.
constexpr long long kMaxDenseDim = 2048;

void check_distinct(const SystemId& source, const SystemId& target,
                    const std::vector<SystemId>& spectators) {
  Registry all = {source, target};
  all.insert(all.end(), spectators.begin(), spectators.end());
  Registry sorted = registry_sorted(all);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) {
      throw composition_error("frame-change labels must be distinct: " +
                              sorted[i].label);
    }
  }
}

}  // namespace

PhaseFunction PhaseFunction::character(int n, int c) {
  PhaseFunction f;
  f.values.resize(n);
  for (int x = 0; x < n; ++x)
    f.values[x] = kTwoPi * static_cast<double>(mod_reduce(
                               static_cast<long long>(c) * x, n)) / n;
  return f;
}

Registry FrameChange::in_systems() const {
  Registry r = spectators;
  r.push_back(target);
  return r;
}

Registry FrameChange::out_systems() const {
  Registry r = {source};
  r.insert(r.end(), spectators.begin(), spectators.end());
  return r;
}

cplx FrameChange::phase(int z) const {
  if (phase_function_form) return phase_fn.factor(z);
  const int n = local_dim;
  return unit_root(
      mod_reduce(static_cast<long long>(origin_target.value - z) * sector.value,
                 n),
      n);
}

int FrameChange::source_digit(int z) const {
  return mod_reduce(origin_source.value + origin_target.value - z, local_dim);
}

int FrameChange::spectator_shift(int z) const {
  return mod_reduce(origin_target.value - z, local_dim);
}

StateVector FrameChange::apply_to(const StateVector& s) const {
  const int n = local_dim;
  if (s.local_dim != n) throw composition_error("local dimension mismatch");
  if (registry_contains(s.systems, source)) {
    throw composition_error("source frame " + source.label +
                            " already present in state registry");
  }
  if (registry_sorted(s.systems) != registry_sorted(in_systems())) {
    throw composition_error("state registry " + registry_str(s.systems) +
                            " does not match frame-change input " +
                            registry_str(in_systems()));
  }

  const int k = s.num_systems();
  const int tpos = registry_position(s.systems, target);
  Registry result = s.systems;
  result[tpos] = source;
  result = registry_sorted(result);
  const int spos = registry_position(result, source);
  // Position of each non-target input system inside the result registry.
  std::vector<int> respos(k, -1);
  for (int i = 0; i < k; ++i) {
    if (i != tpos) respos[i] = registry_position(result, s.systems[i]);
  }

  StateVector out;
  out.local_dim = n;
  out.systems = result;
  out.amps = Eigen::VectorXcd::Zero(s.dim());
  out.context = s.context;
  std::vector<int> nd(k, 0);
  for (long long idx = 0; idx < s.dim(); ++idx) {
    const cplx a = s.amps(idx);
    if (a == cplx(0.0)) continue;
    const auto dg = digits_of(idx, n, k);
    const int z = dg[tpos];
    const int shift = spectator_shift(z);
    nd[spos] = source_digit(z);
    for (int i = 0; i < k; ++i) {
      if (i == tpos) continue;
      nd[respos[i]] = mod_reduce(dg[i] + shift, n);
    }
    out.amps(index_of(nd, n)) += phase(z) * a;
  }
  return out;
}

DenseOperator FrameChange::matrix() const {
  const int n = local_dim;
  const int k = static_cast<int>(spectators.size()) + 1;
  const long long d = pow_dim(n, k);
  if (d > kMaxDenseDim) {
    throw composition_error(
        "frame-change matrix too large to realise; use apply_to");
  }
  DenseOperator op;
  op.local_dim = n;
  op.in_systems = in_systems();
  op.out_systems = out_systems();
  op.mat = Eigen::MatrixXcd::Zero(d, d);
  const int ks = k - 1;
  std::vector<int> nd(k, 0);
  for (long long col = 0; col < d; ++col) {
    const auto dg = digits_of(col, n, k);  // [spectators..., target]
    const int z = dg[ks];
    const int shift = spectator_shift(z);
    nd[0] = source_digit(z);  // [source, spectators...]
    for (int i = 0; i < ks; ++i) nd[i + 1] = mod_reduce(dg[i] + shift, n);
    op.mat(index_of(nd, n), col) = phase(z);
  }
  return op;
}

DenseOperator FrameChange::adjoint_matrix() const {
  DenseOperator m = matrix();
  DenseOperator out;
  out.local_dim = m.local_dim;
  out.in_systems = m.out_systems;
  out.out_systems = m.in_systems;
  out.mat = m.mat.adjoint();
  return out;
}

DenseOperator parity_swap(const SystemId& a, const SystemId& c, int n) {
  DenseOperator op;
  op.local_dim = n;
  op.in_systems = {c};
  op.out_systems = {a};
  op.mat = parity_matrix(n);
  return op;
}

DenseOperator controlled_translation(const SystemId& control,
                                     const std::vector<SystemId>& targets,
                                     const ChargeLabel& sector) {
  for (const auto& t : targets) {
    if (t == control)
      throw composition_error("control system cannot be a target");
  }
  const int n = sector.modulus;
  const int k = static_cast<int>(targets.size()) + 1;
  const long long d = pow_dim(n, k);
  if (d > kMaxDenseDim)
    throw composition_error("controlled translation too large to realise");
  Registry reg = targets;
  reg.push_back(control);
  DenseOperator op;
  op.local_dim = n;
  op.in_systems = reg;
  op.out_systems = reg;
  op.mat = Eigen::MatrixXcd::Zero(d, d);
  const int kt = k - 1;
  std::vector<int> nd(k, 0);
  for (long long col = 0; col < d; ++col) {
    const auto dg = digits_of(col, n, k);
    const int x = dg[kt];
    nd[kt] = x;
    for (int i = 0; i < kt; ++i) nd[i] = mod_reduce(dg[i] - x, n);
    const cplx ph = unit_root(
        mod_reduce(-static_cast<long long>(x) * sector.value, n), n);
    op.mat(index_of(nd, n), col) = ph;
  }
  return op;
}

DenseOperator sector_phase(const SystemId& s, const ChargeLabel& sector) {
  const int n = sector.modulus;
  return single_system_op(n, s, clock_matrix(n, mod_reduce(-sector.value, n)));
}

FrameChange build_S_P(const SystemId& source, const SystemId& target,
                      const std::vector<SystemId>& spectators,
                      const ChargeLabel& sector) {
  return build_S_P_XZ(source, target, spectators, sector,
                      GroupElement(0, sector.modulus),
                      GroupElement(0, sector.modulus));
}

FrameChange build_S_P_XZ(const SystemId& source, const SystemId& target,
                         const std::vector<SystemId>& spectators,
                         const ChargeLabel& sector, const GroupElement& x,
                         const GroupElement& z) {
  check_distinct(source, target, spectators);
  if (x.modulus != sector.modulus || z.modulus != sector.modulus)
    throw config_error("origin modulus does not match sector modulus");
  FrameChange fc;
  fc.source = source;
  fc.target = target;
  fc.spectators = spectators;
  fc.local_dim = sector.modulus;
  fc.sector = sector;
  fc.origin_source = x;
  fc.origin_target = z;
  return fc;
}

FrameChange build_S_f(const SystemId& source, const SystemId& target,
                      const std::vector<SystemId>& spectators,
                      const PhaseFunction& f) {
  check_distinct(source, target, spectators);
  const int n = f.modulus();
  if (n < kMinModulus || n > kMaxModulus)
    throw config_error("phase table length out of range");
  FrameChange fc;
  fc.source = source;
  fc.target = target;
  fc.spectators = spectators;
  fc.local_dim = n;
  fc.sector = ChargeLabel(0, n);
  fc.origin_source = GroupElement(0, n);
  fc.origin_target = GroupElement(0, n);
  fc.phase_function_form = true;
  fc.phase_fn = f;
  return fc;
}

DenseOperator charged_translation_rep(const std::vector<SystemId>& systems,
                                      const ChargeLabel& sector,
                                      const GroupElement& x) {
  if (x.modulus != sector.modulus)
    throw config_error("element modulus does not match sector modulus");
  const int n = sector.modulus;
  const int k = static_cast<int>(systems.size());
  const long long d = pow_dim(n, k);
  if (d > kMaxDenseDim)
    throw composition_error("translation representation too large to realise");
  DenseOperator op;
  op.local_dim = n;
  op.in_systems = systems;
  op.out_systems = systems;
  op.mat = Eigen::MatrixXcd::Zero(d, d);
  const cplx ph = unit_root(
      mod_reduce(static_cast<long long>(sector.value) * x.value, n), n);
  std::vector<int> nd(k, 0);
  for (long long col = 0; col < d; ++col) {
    const auto dg = digits_of(col, n, k);
    for (int i = 0; i < k; ++i) nd[i] = mod_reduce(dg[i] + x.value, n);
    op.mat(index_of(nd, n), col) = ph;
  }
  return op;
}

DenseOperator compose(const FrameChange& later, const FrameChange& earlier) {
  const DenseOperator l = later.matrix();
  DenseOperator e = earlier.matrix();
  if (registry_sorted(e.out_systems) != registry_sorted(l.in_systems))
    throw composition_error("frame changes do not chain");
  e = permute_op(e, e.in_systems, l.in_systems);
  DenseOperator out;
  out.local_dim = l.local_dim;
  out.in_systems = e.in_systems;
  out.out_systems = l.out_systems;
  out.mat = l.mat * e.mat;
  return out;
}

double operator_distance(const DenseOperator& a, const DenseOperator& b) {
  if (registry_sorted(a.in_systems) != registry_sorted(b.in_systems) ||
      registry_sorted(a.out_systems) != registry_sorted(b.out_systems))
    throw composition_error("operator registries do not match");
  const DenseOperator bb = permute_op(b, a.in_systems, a.out_systems);
  return max_abs(a.mat - bb.mat);
}

TransitivityResult check_transitivity(
    int n, const std::function<FrameChange(const SystemId&, const SystemId&,
                                           const SystemId&)>& builder) {
  (void)n;
  const SystemId f1("F1"), f2("F2"), f3("F3");
  const FrameChange s12 = builder(f1, f2, f3);
  const FrameChange s23 = builder(f2, f3, f1);
  const FrameChange s13 = builder(f1, f3, f2);
  const DenseOperator composite = compose(s23, s12);
  const double r = operator_distance(composite, s13.matrix());
  return {r < kTol, r};
}

TransitivityResult check_transitivity_sector(int n, const ChargeLabel& sector) {
  return check_transitivity(
      n, [&](const SystemId& a, const SystemId& b, const SystemId& c) {
        return build_S_P(a, b, {c}, sector);
      });
}

TransitivityResult check_transitivity_phase(const PhaseFunction& f) {
  return check_transitivity(
      f.modulus(), [&](const SystemId& a, const SystemId& b, const SystemId& c) {
        return build_S_f(a, b, {c}, f);
      });
}

UnitarityResult check_unitarity_inverse(const FrameChange& fc) {
  FrameChange reverse = fc;
  reverse.source = fc.target;
  reverse.target = fc.source;
  reverse.origin_source = fc.origin_target;
  reverse.origin_target = fc.origin_source;
  const double r = operator_distance(fc.adjoint_matrix(), reverse.matrix());
  return {r < kTol, r};
}

PhaseClassification classify_admissible_phase(const PhaseFunction& f) {
  const int n = f.modulus();
  const int c = mod_reduce(
      static_cast<long long>(std::llround(f.at(1) * n / kTwoPi)), n);
  double worst = 0.0;
  for (int x = 0; x < n; ++x) {
    worst = std::max(
        worst, std::abs(f.factor(x) -
                        unit_root(mod_reduce(static_cast<long long>(c) * x, n),
                                  n)));
  }
  if (worst < 1e-9) return {true, c, ""};

  PhaseClassification out;
  out.admissible = false;
  const TransitivityResult tr = check_transitivity_phase(f);
  if (!tr.transitive) {
    out.reason = "fails transitivity";
    return out;
  }
  const SystemId f1("F1"), f2("F2"), f3("F3");
  const UnitarityResult un = check_unitarity_inverse(build_S_f(f1, f2, {f3}, f));
  if (!un.inverse_law) {
    out.reason = "fails unitarity";
    return out;
  }
  throw contract_error(
      "phase table satisfies both frame-change laws but is not a character");
}

}  // namespace qrf
