#include "qrf/verify.hpp"

#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

namespace qrf {

namespace {

CheckResult make_check(const std::string& name, double residual, double tol,
                       const std::string& detail = "") {
  return {name, residual, tol, residual < tol, detail};
}

/// Optionally sign-broken parity swap used by the mutation fixture.
DenseOperator parity_for(const VerifyOptions& opt, const SystemId& a,
                         const SystemId& c, int n) {
  DenseOperator op = parity_swap(a, c, n);
  if (opt.mutate_parity_sign) {
    op.mat = Eigen::MatrixXcd::Identity(n, n);  // |x>_c -> |+x>_a
  }
  return op;
}

/// S^P assembled from its building blocks (parity swap x charged controlled
/// translation), honouring the mutation fixture.
DenseOperator assemble_sp(const VerifyOptions& opt, const SystemId& source,
                          const SystemId& target,
                          const std::vector<SystemId>& spectators,
                          const ChargeLabel& sector) {
  const int n = sector.modulus;
  const DenseOperator ct = controlled_translation(target, spectators, sector);
  DenseOperator pi = parity_for(opt, source, target, n);
  pi = tensor(identity_op(n, spectators), pi);
  // pi: [spect..., target] -> [spect..., source]
  DenseOperator out;
  out.local_dim = n;
  out.in_systems = ct.in_systems;
  out.out_systems = pi.out_systems;
  out.mat = pi.mat * permute_op(ct, pi.in_systems, pi.in_systems).mat;
  Registry canonical = {source};
  canonical.insert(canonical.end(), spectators.begin(), spectators.end());
  return permute_op(out, out.in_systems, canonical);
}

/// Clock of x_B - x_A on the [source, spectator] output registry.
DenseOperator relative_clock(const SystemId& a, const SystemId& b, int n) {
  return tensor(single_system_op(n, a, clock_matrix(n, n - 1)),
                single_system_op(n, b, clock_matrix(n, 1)));
}

Eigen::VectorXcd random_eq31_phi_b(int n, Rng& rng) {
  return random_state_amps(n, rng);
}

struct Eq31Geometry {
  int x1, x2, z1, z2;
};

/// Random two-branch geometry with distinguishable branches
/// (z1 - x1 != z2 - x2 mod N).
Eq31Geometry random_nondegenerate_geometry(int n, Rng& rng) {
  while (true) {
    Eq31Geometry g{rng.below(n), rng.below(n), rng.below(n), rng.below(n)};
    if (g.x1 == g.x2) continue;
    if (mod_reduce(g.z1 - g.x1, n) == mod_reduce(g.z2 - g.x2, n)) continue;
    return g;
  }
}

GameConfig eq31_config(int n, int sector, const Eq31Geometry& g, double phi,
                       Eigen::VectorXcd phi_b) {
  GameConfig cfg;
  cfg.n = n;
  cfg.sector = sector;
  cfg.preparation.type = Preparation::Type::Eq31;
  cfg.preparation.eq31 = {g.x1, g.x2, g.z1, g.z2, phi, std::move(phi_b)};
  return cfg;
}

}  // namespace

SuiteReport run_transforms_suite(const VerifyOptions& opt) {
  SuiteReport report;
  report.suite = "transforms";
  const double tol = opt.tolerance;
  const SystemId a("A"), b("B"), c("C"), d("D");
  Rng rng(opt.seed);

  // Unitarity inverse law, exhaustive over the grid.
  {
    double worst = 0.0;
    for (const int n : opt.n_grid) {
      for (int p = 0; p < n; ++p) {
        const ChargeLabel sector(p, n);
        if (opt.mutate_parity_sign) {
          const DenseOperator fwd = assemble_sp(opt, a, b, {c}, sector);
          const DenseOperator rev = assemble_sp(opt, b, a, {c}, sector);
          DenseOperator adj;
          adj.local_dim = n;
          adj.in_systems = fwd.out_systems;
          adj.out_systems = fwd.in_systems;
          adj.mat = fwd.mat.adjoint();
          worst = std::max(worst, operator_distance(adj, rev));
        } else {
          worst = std::max(
              worst,
              check_unitarity_inverse(build_S_P(a, b, {c}, sector)).residual);
        }
      }
    }
    report.checks.push_back(make_check(
        "unitarity inverse law (S^P_{A->B})^dagger = S^P_{B->A}", worst, tol));
  }

  // Transitivity, exhaustive over the grid.
  {
    double worst = 0.0;
    for (const int n : opt.n_grid) {
      for (int p = 0; p < n; ++p) {
        const ChargeLabel sector(p, n);
        if (opt.mutate_parity_sign) {
          const SystemId f1("F1"), f2("F2"), f3("F3");
          const DenseOperator s12 = assemble_sp(opt, f1, f2, {f3}, sector);
          const DenseOperator s23 = assemble_sp(opt, f2, f3, {f1}, sector);
          const DenseOperator s13 = assemble_sp(opt, f1, f3, {f2}, sector);
          DenseOperator comp;
          comp.local_dim = n;
          comp.in_systems = s12.in_systems;
          comp.out_systems = s23.out_systems;
          comp.mat =
              s23.mat * permute_op(s12, s12.in_systems, s23.in_systems).mat;
          worst = std::max(worst, operator_distance(comp, s13));
        } else {
          worst =
              std::max(worst, check_transitivity_sector(n, sector).residual);
        }
      }
    }
    report.checks.push_back(make_check(
        "transitivity S^P_{B->C} S^P_{A->B} = S^P_{A->C}", worst, tol));
  }

  // Closed form equals the assembled parity x controlled-translation form.
  {
    double worst = 0.0;
    for (const int n : opt.n_grid) {
      for (int p = 0; p < n; ++p) {
        const ChargeLabel sector(p, n);
        const DenseOperator assembled = assemble_sp(opt, a, c, {b}, sector);
        worst = std::max(
            worst,
            operator_distance(build_S_P(a, c, {b}, sector).matrix(),
                              assembled));
      }
    }
    report.checks.push_back(make_check(
        "closed form = parity-swap x charged controlled translation", worst,
        tol));
  }

  // Canonical-variable transport (clock form), all sectors.
  {
    double worst_xb = 0.0, worst_xc = 0.0, worst_kb = 0.0, worst_kc = 0.0;
    for (const int n : opt.n_grid) {
      const Eigen::MatrixXcd kmat = momentum_label_matrix(n);
      for (int p = 0; p < n; ++p) {
        const FrameChange fc = build_S_P(a, c, {b}, ChargeLabel(p, n));
        const DenseOperator s = fc.matrix();
        const auto transport = [&](const DenseOperator& o) {
          const DenseOperator al = permute_op(embed(o, {b, c}), s.in_systems,
                                              s.in_systems);
          return Eigen::MatrixXcd(s.mat * al.mat * s.mat.adjoint());
        };
        // x_B -> q_B - q_A (clock form).
        {
          const Eigen::MatrixXcd got =
              transport(single_system_op(n, b, clock_matrix(n, 1)));
          const DenseOperator want = permute_op(
              relative_clock(a, b, n), s.out_systems, s.out_systems);
          worst_xb = std::max(worst_xb, max_abs(got - want.mat));
        }
        // x_C -> -q_A (clock form).
        {
          const Eigen::MatrixXcd got =
              transport(single_system_op(n, c, clock_matrix(n, 1)));
          const DenseOperator want = permute_op(
              embed(single_system_op(n, a, clock_matrix(n, n - 1)), {a, b}),
              s.out_systems, s.out_systems);
          worst_xc = std::max(worst_xc, max_abs(got - want.mat));
        }
        // k_B -> k_B.
        {
          const Eigen::MatrixXcd got =
              transport(single_system_op(n, b, kmat, true));
          const DenseOperator want = permute_op(
              embed(single_system_op(n, b, kmat, true), {a, b}),
              s.out_systems, s.out_systems);
          worst_kb = std::max(worst_kb, max_abs(got - want.mat));
        }
        // k_C -> (-k_A - k_B + P) mod N.
        {
          const Eigen::MatrixXcd got =
              transport(single_system_op(n, c, kmat, true));
          const Eigen::MatrixXcd v = dft_kets_matrix(n);
          Eigen::MatrixXcd folded =
              Eigen::MatrixXcd::Zero(n * n, n * n);
          for (int ka = 0; ka < n; ++ka)
            for (int kb = 0; kb < n; ++kb) {
              const long long i = static_cast<long long>(ka) * n + kb;
              folded(i, i) = mod_reduce(-ka - kb + p, n);
            }
          const Eigen::MatrixXcd vv = Eigen::kroneckerProduct(v, v).eval();
          DenseOperator want;
          want.local_dim = n;
          want.in_systems = {a, b};
          want.out_systems = {a, b};
          want.mat = vv * folded * vv.adjoint();
          const DenseOperator aligned =
              permute_op(want, s.out_systems, s.out_systems);
          worst_kc = std::max(worst_kc, max_abs(got - aligned.mat));
        }
      }
    }
    const double op_tol = 1e-9;
    report.checks.push_back(make_check(
        "canonical transport: x_B -> q_B - q_A (clock form)", worst_xb,
        op_tol));
    report.checks.push_back(make_check(
        "canonical transport: x_C -> -q_A (clock form)", worst_xc, op_tol));
    report.checks.push_back(
        make_check("canonical transport: p_B -> pi_B", worst_kb, op_tol));
    report.checks.push_back(make_check(
        "canonical transport: p_C -> -(pi_A + pi_B) + P (mod N)", worst_kc,
        op_tol));
  }

  // D-embedding: S^0 with spectators {B, D} on psi^P (x) |-P>_D equals
  // (S^P psi^P) (x) |-P>_D.
  {
    double worst = 0.0;
    for (const int n : opt.n_grid) {
      for (int p = 0; p < n; ++p) {
        for (int rep = 0; rep < 3; ++rep) {
          StateVector psi;
          psi.local_dim = n;
          psi.systems = {b, c};
          psi.amps = random_state_amps(static_cast<long long>(n) * n, rng);
          StateVector dstate = state_from_amplitudes(
              n, {d}, momentum_ket(n, mod_reduce(-p, n)));
          const StateVector four = tensor(psi, dstate);

          const FrameChange s0 =
              build_S_P(a, c, {b, d}, ChargeLabel(0, n));
          const StateVector lhs = s0.apply_to(four);

          const FrameChange sp = build_S_P(a, c, {b}, ChargeLabel(p, n));
          const StateVector rhs = tensor(sp.apply_to(psi), dstate);
          const StateVector rhs_sorted =
              permute_systems(rhs, lhs.systems);
          worst = std::max(worst,
                           (lhs.amps - rhs_sorted.amps).cwiseAbs().maxCoeff());
        }
      }
    }
    report.checks.push_back(make_check(
        "D-embedding: S^0 on {B,D} acts as S^P (x) identity on |-P>_D",
        worst, tol));
  }

  return report;
}

SuiteReport run_pipeline_suite(const VerifyOptions& opt) {
  SuiteReport report;
  report.suite = "pipeline";
  const double tol = opt.tolerance;
  const SystemId a("A"), b("B"), c("C"), d("D");
  Rng rng(opt.seed);

  // Sector completeness on random kinematical states.
  {
    double worst = 0.0;
    for (const int n : opt.n_grid) {
      for (int rep = 0; rep < 5; ++rep) {
        StateVector kin;
        kin.local_dim = n;
        kin.systems = {a, b, c};
        kin.amps = random_state_amps(pow_dim(n, 3), rng);
        const auto w = sector_weights(kin);
        double sum = 0.0;
        for (const double x : w) sum += x;
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    report.checks.push_back(
        make_check("sector weights sum to one", worst, tol));
  }

  // Physical covariance: T^P(x) fixes the projected state.
  {
    double worst = 0.0;
    for (const int n : opt.n_grid) {
      for (int p = 0; p < n; ++p) {
        StateVector kin;
        kin.local_dim = n;
        kin.systems = {a, b, c};
        kin.amps = random_state_amps(pow_dim(n, 3), rng);
        const PhysicalState phys = sector_project(kin, ChargeLabel(p, n));
        for (int x = 0; x < n; ++x) {
          const Eigen::VectorXcd moved =
              unit_root(mod_reduce(static_cast<long long>(p) * x, n), n) *
              translate_all(phys.state, x).amps;
          worst = std::max(
              worst, (moved - phys.state.amps).cwiseAbs().maxCoeff());
        }
        // Equal conditional norms 1/sqrt(N) for every origin.
        for (int x = 0; x < n; ++x) {
          const RelativeState rel =
              reduce(phys, a, GroupElement(x, n));
          worst = std::max(worst, std::abs(rel.conditional_norm -
                                           1.0 / std::sqrt(double(n))));
        }
      }
    }
    report.checks.push_back(make_check(
        "physical covariance and equal reduction norms", worst, tol));
  }

  // Commuting square: frame_jump after reduce(A, X) equals reduce(C, Z).
  {
    double worst_fid = 0.0, worst_amp = 0.0;
    for (const int n : opt.n_grid) {
      for (int p = 0; p < n; ++p) {
        for (int rep = 0; rep < 4; ++rep) {
          const int x = rng.below(n), z = rng.below(n);
          StateVector kin;
          kin.local_dim = n;
          kin.systems = {a, b, c};
          kin.amps = random_state_amps(pow_dim(n, 3), rng);
          const PhysicalState phys = sector_project(kin, ChargeLabel(p, n));
          const RelativeState via_a = reduce(phys, a, GroupElement(x, n));
          const RelativeState jumped =
              frame_jump(via_a, c, GroupElement(z, n));
          const RelativeState direct = reduce(phys, c, GroupElement(z, n));
          worst_fid = std::max(
              worst_fid, std::abs(1.0 - fidelity_up_to_global_phase(
                                            jumped.state, direct.state)));
          const StateVector aligned =
              permute_systems(direct.state, jumped.state.systems);
          worst_amp = std::max(
              worst_amp,
              (jumped.state.amps - aligned.amps).cwiseAbs().maxCoeff());
        }
      }
    }
    report.checks.push_back(make_check(
        "commuting square: jump after reduce = direct reduce (fidelity)",
        worst_fid, tol));
    report.checks.push_back(make_check(
        "commuting square: amplitude-level equality", worst_amp, tol));
  }

  // Branch-phase law on random nondegenerate two-branch preparations.
  {
    double worst = 0.0;
    for (const int n : opt.n_grid) {
      for (int rep = 0; rep < 6; ++rep) {
        const Eq31Geometry g = random_nondegenerate_geometry(n, rng);
        const double phi = wrap_phase(kTwoPi * rng.uniform() - kPi);
        const int p = rng.below(n);
        const GameConfig cfg =
            eq31_config(n, p, g, phi, random_eq31_phi_b(n, rng));
        const PhysicalState phys = prepare(cfg);
        const RelativeState rel = reduce(phys, a, GroupElement(0, n));
        const double got = extract_branch_phase(
            rel, c, GroupElement(mod_reduce(g.z1 - g.x1, n), n),
            GroupElement(mod_reduce(g.z2 - g.x2, n), n));
        const double want = branch_phase_formula(phi, g.x1, g.x2, p, n);
        worst = std::max(worst, std::abs(wrap_phase(got - want)));
      }
    }
    report.checks.push_back(make_check(
        "branch-phase law Phi^(A) = phi + (x1-x2) P (2 pi/N)", worst, 1e-9));
  }

  // D-embedding through the full pipeline (four-party sector 0 vs
  // three-party sector P) and purity of D.
  {
    double worst_fid = 0.0, worst_pur = 0.0;
    for (const int n : opt.n_grid) {
      for (int p = 0; p < n; ++p) {
        StateVector kin3;
        kin3.local_dim = n;
        kin3.systems = {a, b, c};
        kin3.amps = random_state_amps(pow_dim(n, 3), rng);
        const StateVector kin4 = tensor(
            kin3,
            state_from_amplitudes(n, {d}, momentum_ket(n, mod_reduce(-p, n))));

        const PhysicalState phys4 = sector_project(kin4, ChargeLabel(0, n));
        const RelativeState rel4 = reduce(phys4, a, GroupElement(0, n));
        const DensityMatrix rho = dm_of(rel4.state);
        const DensityMatrix rho_bc = partial_trace(rho, {b, c});
        const DensityMatrix rho_d = partial_trace(rho, {d});
        worst_pur = std::max(worst_pur, std::abs(1.0 - purity(rho_d)));

        const PhysicalState phys3 = sector_project(kin3, ChargeLabel(p, n));
        const RelativeState rel3 = reduce(phys3, a, GroupElement(0, n));
        const cplx fid =
            (dm_of(rel3.state).mat * permute_systems(rho_bc, rel3.state.systems)
                                         .mat)
                .trace();
        worst_fid = std::max(worst_fid, std::abs(1.0 - fid.real()));
      }
    }
    report.checks.push_back(make_check(
        "D-embedding pipeline: traced four-party state matches sector-P "
        "relative state",
        worst_fid, tol));
    report.checks.push_back(
        make_check("D-embedding pipeline: D stays pure", worst_pur, tol));
  }

  // Relational observables: expectation bridge and twirl invariance.
  {
    double worst_bridge = 0.0, worst_twirl = 0.0, worst_momentum = 0.0;
    for (const int n : opt.n_grid) {
      if (n > 5) continue;  // desk-scale operator dimensions
      for (int p = 0; p < n; ++p) {
        StateVector kin;
        kin.local_dim = n;
        kin.systems = {a, b, c};
        kin.amps = random_state_amps(pow_dim(n, 3), rng);
        const PhysicalState phys = sector_project(kin, ChargeLabel(p, n));
        const int x = rng.below(n);
        const RelativeState rel = reduce(phys, a, GroupElement(x, n));

        DenseOperator o;
        o.local_dim = n;
        o.in_systems = {b, c};
        o.out_systems = {b, c};
        o.mat = random_hermitian(n * n, rng);
        o.hermitian = true;

        const DenseOperator f = relational_observable(
            o, a, GroupElement(x, n), ChargeLabel(p, n));
        const double lhs = expectation(f, phys.state).real();
        const double rhs = expectation(o, rel.state).real();
        worst_bridge = std::max(worst_bridge, std::abs(lhs - rhs));

        const DenseOperator twirled = incoherent_twirl(f, ChargeLabel(p, n));
        worst_twirl = std::max(worst_twirl, max_abs(twirled.mat - f.mat));

        // Momentum of the other frame is itself relational.
        const DenseOperator kc = embed(
            single_system_op(n, c, momentum_label_matrix(n), true), {b, c});
        const DenseOperator fkc = relational_observable(
            kc, a, GroupElement(0, n), ChargeLabel(p, n));
        const DenseOperator plain = embed(
            single_system_op(n, c, momentum_label_matrix(n), true), {a, b, c});
        worst_momentum = std::max(
            worst_momentum,
            operator_distance(fkc, plain));
      }
    }
    report.checks.push_back(make_check(
        "relational expectation bridge <F_O>_phys = <O>_rel", worst_bridge,
        1e-9));
    report.checks.push_back(make_check(
        "relational observables are incoherent-twirl fixed points",
        worst_twirl, tol));
    report.checks.push_back(make_check(
        "F_{p_C, A}(0) = p_C", worst_momentum, tol));
  }

  return report;
}

SuiteReport run_observables_suite(const VerifyOptions& opt) {
  SuiteReport report;
  report.suite = "observables";
  const double tol = opt.tolerance;
  const SystemId a("A"), b("B"), c("C");
  Rng rng(opt.seed);

  // Theorem-1 biconditional over random sector-0-invariant Hermitians.
  {
    int disagreements = 0;
    int total = 0;
    std::vector<int> grid;
    for (const int n : opt.n_grid)
      if (n <= 6) grid.push_back(n);
    const int per_n = (510 + static_cast<int>(grid.size()) - 1) /
                      std::max<std::size_t>(grid.size(), 1);
    for (const int n : grid) {
      const DenseOperator ct =
          controlled_translation(c, {b}, ChargeLabel(0, n));
      for (int rep = 0; rep < per_n; ++rep) {
        DenseOperator o;
        o.local_dim = n;
        o.in_systems = {b, c};
        o.out_systems = {b, c};
        o.mat = random_hermitian(n * n, rng);
        // Average over the cyclic group generated by the controlled
        // translation; the result commutes with it, i.e. is sector-0
        // invariant.
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n * n, n * n);
        Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(n * n, n * n);
        for (int j = 0; j < n; ++j) {
          acc += power * o.mat * power.adjoint();
          power = ct.mat * power;
        }
        o.mat = acc / static_cast<double>(n);
        o.mat = 0.5 * (o.mat + o.mat.adjoint().eval());
        o.hermitian = true;
        ++total;
        try {
          (void)theorem1_classify(o, a, c, {b});
        } catch (const contract_error&) {
          ++disagreements;
        }
      }
    }
    report.checks.push_back(make_check(
        "Theorem 1 biconditional over " + std::to_string(total) +
            " random invariant observables",
        static_cast<double>(disagreements), 0.5));
  }

  // Parity example: invariant sectors are exactly {P : 2P = 0 mod N}.
  {
    double fails = 0.0;
    for (const int n : opt.n_grid) {
      DenseOperator pp = tensor(single_system_op(n, b, parity_matrix(n)),
                                single_system_op(n, c, parity_matrix(n)));
      const InvarianceReport rep = theorem1_classify(pp, a, c, {b});
      std::set<int> want;
      for (int p = 0; p < n; ++p)
        if (mod_reduce(2 * p, n) == 0) want.insert(p);
      if (rep.invariant_sectors != want || !rep.s0_invariant) fails += 1.0;
    }
    report.checks.push_back(make_check(
        "parity pair invariant exactly on {P : 2P = 0 mod N}", fails, 0.5));
  }

  // Proposition 1 families and exclusivity.
  {
    double fails = 0.0;
    for (const int n : opt.n_grid) {
      if (n > 6) continue;
      const Eigen::MatrixXcd v = dft_kets_matrix(n);
      for (int rep = 0; rep < 10; ++rep) {
        // Case 1: random function of momentum x random function of position.
        Eigen::VectorXd fk(n), fx(n);
        for (int i = 0; i < n; ++i) {
          fk(i) = rng.gauss();
          fx(i) = rng.gauss();
        }
        const DenseOperator ob = single_system_op(
            n, b,
            (v * fk.cast<cplx>().asDiagonal() * v.adjoint()).eval());
        const DenseOperator oc =
            single_system_op(n, c, fx.cast<cplx>().asDiagonal());
        if (proposition1_classify(ob, oc) != Prop1Verdict::Case1Commuting)
          fails += 1.0;

        // Case 2: antidiagonal in momentum x antidiagonal in position.
        Eigen::MatrixXcd mb = Eigen::MatrixXcd::Zero(n, n);
        Eigen::MatrixXcd mc = Eigen::MatrixXcd::Zero(n, n);
        for (int k = 0; k < n; ++k) {
          const int mk = mod_reduce(-k, n);
          const cplx vb = rng.gauss_complex();
          mb(k, mk) += vb;
          mb(mk, k) += std::conj(vb);
          const cplx vc = rng.gauss_complex();
          mc(k, mk) += vc;
          mc(mk, k) += std::conj(vc);
        }
        const DenseOperator ob2 =
            single_system_op(n, b, (v * mb * v.adjoint()).eval());
        const DenseOperator oc2 = single_system_op(n, c, mc);
        if (proposition1_classify(ob2, oc2) !=
            Prop1Verdict::Case2Anticommuting)
          fails += 1.0;

        // Random products are generically not sector-0 invariant, and never
        // land in the mixed verdict.
        const DenseOperator rb =
            single_system_op(n, b, random_hermitian(n, rng));
        const DenseOperator rc =
            single_system_op(n, c, random_hermitian(n, rng));
        if (proposition1_classify(rb, rc) == Prop1Verdict::MixedInvalid)
          fails += 1.0;
      }
    }
    report.checks.push_back(make_check(
        "Proposition 1: case families classified, no mixed verdicts", fails,
        0.5));
  }

  // Relative-distance analysis on four systems.
  {
    double fails = 0.0;
    for (const int n : {2, 3, 4}) {
      const RelativeDistanceReport rep = relative_distance_demo(n);
      if (!rep.spectator_pair_invariant) fails += 1.0;
      if (!rep.frame_pair_maps_to_xb_form) fails += 1.0;
      for (const double r : rep.frame_pair_invariance_residuals)
        if (r < 0.1) fails += 1.0;  // must be visibly non-invariant
    }
    report.checks.push_back(make_check(
        "relative distances: x_B - x_D invariant, x_B - x_C maps to x_B",
        fails, 0.5));
  }

  // Hamiltonian covariance.
  {
    double fails = 0.0;
    for (const int n : opt.n_grid) {
      if (n > 8) continue;
      std::vector<double> potential(n);
      for (auto& x : potential) x = rng.gauss();
      const auto without = hamiltonian_covariance_demo(n, potential, false);
      if (!without.covariant_all_sectors) fails += 1.0;
      if (without.p_dependence > tol) fails += 1.0;
      const auto with = hamiltonian_covariance_demo(n, potential, true);
      for (const double r : with.covariance_residuals)
        if (r < 0.1) fails += 1.0;  // broken in every sector, including 0
    }
    report.checks.push_back(make_check(
        "Hamiltonian covariance: spectator-only holds, frame kinetic breaks",
        fails, 0.5));
  }

  return report;
}

SuiteReport run_appendix_e_suite(const VerifyOptions& opt) {
  SuiteReport report;
  report.suite = "appendixE";
  Rng rng(opt.seed);

  // Exhaustive enumeration over the 2 pi k / N phase grid for small N: the
  // admissible tables are exactly the N characters, and admissibility
  // coincides with transitivity + the inverse law in every case.
  {
    double fails = 0.0;
    int admissible_total = 0;
    for (const int n : {2, 3, 4}) {
      long long tables = 1;
      for (int i = 0; i < n; ++i) tables *= n;
      int admissible = 0;
      for (long long t = 0; t < tables; ++t) {
        PhaseFunction f;
        f.values.resize(n);
        long long rest = t;
        for (int x = 0; x < n; ++x) {
          f.values[x] = kTwoPi * static_cast<double>(rest % n) / n;
          rest /= n;
        }
        bool adm = false;
        try {
          const PhaseClassification cls = classify_admissible_phase(f);
          adm = cls.admissible;
        } catch (const contract_error&) {
          fails += 1.0;
          continue;
        }
        const bool laws = check_transitivity_phase(f).transitive &&
                          check_unitarity_inverse(
                              build_S_f(SystemId("F1"), SystemId("F2"),
                                        {SystemId("F3")}, f))
                              .inverse_law;
        if (adm != laws) fails += 1.0;
        if (adm) ++admissible;
      }
      if (admissible != n) fails += 1.0;
      admissible_total += admissible;
    }
    report.checks.push_back(make_check(
        "grid enumeration: admissible tables are exactly the characters (" +
            std::to_string(admissible_total) + " found)",
        fails, 0.5));
  }

  // Random real tables for larger N plus the planted characters.
  {
    double fails = 0.0;
    for (int n = 5; n <= 8; ++n) {
      for (int rep = 0; rep < 30; ++rep) {
        PhaseFunction f;
        f.values.resize(n);
        for (auto& x : f.values) x = kTwoPi * rng.uniform();
        bool adm = false;
        try {
          adm = classify_admissible_phase(f).admissible;
        } catch (const contract_error&) {
          fails += 1.0;
          continue;
        }
        const bool laws = check_transitivity_phase(f).transitive &&
                          check_unitarity_inverse(
                              build_S_f(SystemId("F1"), SystemId("F2"),
                                        {SystemId("F3")}, f))
                              .inverse_law;
        if (adm != laws) fails += 1.0;
      }
      for (int cexp = 0; cexp < n; ++cexp) {
        const PhaseClassification cls =
            classify_admissible_phase(PhaseFunction::character(n, cexp));
        if (!cls.admissible || cls.character_exponent != cexp) fails += 1.0;
      }
    }
    report.checks.push_back(make_check(
        "random tables + planted characters: admissibility = frame-change "
        "laws",
        fails, 0.5));
  }

  return report;
}

SuiteReport run_suite(const std::string& name, const VerifyOptions& opt) {
  if (name == "transforms") return run_transforms_suite(opt);
  if (name == "pipeline") return run_pipeline_suite(opt);
  if (name == "observables") return run_observables_suite(opt);
  if (name == "appendixE") return run_appendix_e_suite(opt);
  throw config_error("unknown verify suite: " + name);
}

std::string format_report(const SuiteReport& report) {
  std::ostringstream out;
  out << "suite " << report.suite << "\n";
  for (const auto& c : report.checks) {
    out << (c.pass ? "  PASS " : "  FAIL ") << c.name
        << "  (max residual " << c.max_residual << ", tolerance "
        << c.tolerance << ")";
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
  }
  return out.str();
}

}  // namespace qrf
