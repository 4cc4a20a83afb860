#include "qrf/scenario.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

namespace qrf::cli {

namespace {

[[noreturn]] void schema_error(const std::string& path,
                               const std::string& what) {
  throw config_error("scenario schema: " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::vector<std::string>& allowed,
                const std::vector<std::string>& required) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      schema_error(path + "/" + key, "unknown field");
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) schema_error(path + "/" + key, "missing field");
  }
}

Eigen::VectorXcd parse_complex_array(const json& arr, const std::string& path) {
  if (!arr.is_array()) schema_error(path, "expected an array of [re, im]");
  Eigen::VectorXcd out(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
        !e[1].is_number())
      schema_error(path + "/" + std::to_string(i), "expected [re, im]");
    out(static_cast<Eigen::Index>(i)) =
        cplx(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

json complex_array_to_json(const Eigen::VectorXcd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back({v(i).real(), v(i).imag()});
  return arr;
}

void validate_preparation(const json& prep, const std::string& path) {
  if (!prep.is_object() || !prep.contains("type"))
    schema_error(path, "preparation needs a type");
  const std::string type = prep.at("type").get<std::string>();
  if (type == "eq31") {
    check_keys(prep, path, {"type", "x1", "x2", "z1", "z2", "phi", "phi_b"},
               {"type", "x1", "x2", "z1", "z2", "phi"});
  } else if (type == "table") {
    check_keys(prep, path, {"type", "amplitudes"}, {"type", "amplitudes"});
  } else if (type == "random") {
    check_keys(prep, path, {"type", "seed"}, {"type", "seed"});
  } else {
    schema_error(path + "/type", "unknown preparation type " + type);
  }
}

Level parse_level(const json& scenario) {
  const std::string level = scenario.at("level").get<std::string>();
  if (level == "level1") return Level::One;
  if (level == "level2") return Level::Two;
  if (level == "extra_particle") return Level::ExtraParticle;
  const std::string method =
      scenario.contains("method") ? scenario.at("method").get<std::string>()
                                  : "";
  if (level == "level3" || level == "perspectival") {
    Level base;
    if (method == "phase_difference")
      base = Level::ThreePhaseDiff;
    else if (method == "ratio")
      base = Level::ThreeRatio;
    else if (method == "process")
      base = Level::ThreeProcess;
    else
      schema_error("/method",
                   "level3/perspectival need method phase_difference | "
                   "ratio | process");
    return level == "perspectival" ? Level::Perspectival : base;
  }
  schema_error("/level", "unknown level " + level);
}

std::string method_of(const json& scenario) {
  return scenario.contains("method") ? scenario.at("method").get<std::string>()
                                     : "";
}

json verdict_recovered(int p) {
  return {{"kind", "P_recovered"}, {"value", p}};
}
json verdict_indistinguishable() { return {{"kind", "indistinguishable"}}; }
json verdict_insufficient(const std::string& reason) {
  return {{"kind", "insufficient"}, {"reason", reason}};
}
json verdict_candidates(const std::vector<int>& cs) {
  return {{"kind", "candidate_set"}, {"candidates", cs}};
}

json verdict_of(const RecoveryResult& r) {
  if (r.unique) return verdict_recovered(r.sector);
  return verdict_candidates(r.candidates);
}

std::vector<int> marker_positions(const StateVector& rel_state,
                                  const SystemId& marker) {
  const int n = rel_state.local_dim;
  const int k = rel_state.num_systems();
  const int pos = registry_position(rel_state.systems, marker);
  std::vector<double> p(n, 0.0);
  for (long long idx = 0; idx < rel_state.dim(); ++idx) {
    const double w = std::norm(rel_state.amps(idx));
    if (w > 0.0) p[digits_of(idx, n, k)[pos]] += w;
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (p[i] > 1e-8) out.push_back(i);
  return out;
}

StateVector make_perspectival_preparation(const GameConfig& cfg) {
  const int n = cfg.n;
  Registry bc = {kSystemB, kFrameC};
  switch (cfg.preparation.type) {
    case Preparation::Type::Eq31: {
      const auto& p = cfg.preparation.eq31;
      Eigen::VectorXcd phi_b = p.phi_b;
      if (phi_b.size() == 0) {
        phi_b = Eigen::VectorXcd::Zero(n);
        phi_b(0) = 1.0;
      }
      if (phi_b.size() != n)
        throw config_error("phi_b amplitude table must have length N");
      phi_b.normalize();
      Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(
          static_cast<long long>(n) * n);
      const double w = 1.0 / std::sqrt(2.0);
      struct Branch {
        int x, z;
        cplx coeff;
      };
      const Branch branches[2] = {
          {mod_reduce(p.x1, n), mod_reduce(p.z1, n), cplx(w, 0.0)},
          {mod_reduce(p.x2, n), mod_reduce(p.z2, n), std::polar(w, p.phi)}};
      for (const auto& br : branches) {
        const cplx sector_phase =
            unit_root(mod_reduce(-static_cast<long long>(br.x) * cfg.sector,
                                 n),
                      n);
        for (int y = 0; y < n; ++y) {
          const cplx amp = phi_b(y);
          if (amp == cplx(0.0)) continue;
          const int yb = mod_reduce(y - br.x, n);
          const int zc = mod_reduce(br.z - br.x, n);
          amps(static_cast<long long>(yb) * n + zc) +=
              br.coeff * sector_phase * amp;
        }
      }
      StateVector s = state_from_amplitudes(n, bc, std::move(amps));
      s.amps.normalize();
      return s;
    }
    case Preparation::Type::Table: {
      if (cfg.preparation.table.size() != static_cast<long long>(n) * n)
        throw config_error(
            "perspectival table preparation must have length N^2 over "
            "[B, C]");
      StateVector s = state_from_amplitudes(n, bc, cfg.preparation.table);
      s.amps.normalize();
      return s;
    }
    case Preparation::Type::Random: {
      Rng rng(cfg.preparation.random_seed);
      return state_from_amplitudes(
          n, bc, random_state_amps(static_cast<long long>(n) * n, rng));
    }
  }
  throw config_error("unknown preparation type");
}

// ---- per-level runners ----

json run_level1(const GameConfig& cfg, Rng& rng) {
  const int n = cfg.n;
  json rounds = json::array();
  std::vector<double> baseline;
  double max_gap = 0.0;
  double max_tv = 0.0;
  for (int p = 0; p < n; ++p) {
    GameConfig swept = cfg;
    swept.sector = p;
    const PhysicalState phys = prepare(swept);
    const RelativeState rel = reduce(phys, kFrameA, GroupElement(0, n));
    const auto expectations = framed_family_expectations(rel.state, kFrameC);
    if (baseline.empty()) baseline = expectations;
    double gap = 0.0;
    for (std::size_t i = 0; i < expectations.size(); ++i)
      gap = std::max(gap, std::abs(expectations[i] - baseline[i]));
    max_gap = std::max(max_gap, gap);

    // Distribution of the sharp position observable of B at every marker.
    Eigen::MatrixXcd xb = Eigen::MatrixXcd::Zero(n, n);
    for (int y = 0; y < n; ++y) xb(y, y) = y;
    json dists = json::array();
    for (const int y : marker_positions(rel.state, kFrameC)) {
      Distribution d = level1_statistics(
          rel, single_system_op(n, kSystemB, xb, true), GroupElement(y, n));
      if (cfg.shots > 0) d = sample_distribution(d, cfg.shots, rng);
      dists.push_back({{"marker", y},
                       {"outcomes", d.outcomes},
                       {"probabilities", d.probabilities}});
    }
    if (p != cfg.sector % n) {
      GameConfig base_cfg = cfg;
      const RelativeState rel0 =
          reduce(prepare(base_cfg), kFrameA, GroupElement(0, n));
      for (const int y : marker_positions(rel.state, kFrameC)) {
        const DenseOperator ob = single_system_op(n, kSystemB, xb, true);
        max_tv = std::max(
            max_tv,
            total_variation(level1_statistics(rel, ob, GroupElement(y, n)),
                            level1_statistics(rel0, ob, GroupElement(y, n))));
      }
    }
    rounds.push_back({{"round", p + 1},
                      {"observer", p % 2 == 0 ? "alice" : "charlie"},
                      {"sector", p},
                      {"expectation_gap", gap},
                      {"framed_distributions", dists}});
  }
  json result;
  result["rounds"] = rounds;
  result["max_expectation_gap"] = max_gap;
  result["max_total_variation"] = max_tv;
  result["verdict"] = max_gap < cfg.tolerance
                          ? verdict_indistinguishable()
                          : verdict_insufficient(
                                "framed statistics vary across sectors");
  return result;
}

json run_level2(const GameConfig& cfg, Rng& rng) {
  const int n = cfg.n;
  const PhysicalState phys = prepare(cfg);
  const RelativeState rel = reduce(phys, kFrameA, GroupElement(0, n));
  const TomographyResult tomo =
      cfg.shots > 0 ? level2_tomography(rel, cfg.shots, &rng)
                    : level2_tomography_relational(phys, kFrameA,
                                                   GroupElement(0, n));
  json result;
  result["reconstruction_fidelity"] =
      fidelity_up_to_global_phase(tomo.reconstructed, rel.state);
  result["purity"] = tomo.purity;
  result["mixed_warning"] = tomo.mixed_warning;
  result["reconstructed"] = state_to_json(tomo.reconstructed);

  const auto markers = marker_positions(rel.state, kFrameC);
  if (markers.size() == 2) {
    RelativeState recon = rel;
    recon.state = tomo.reconstructed;
    const double phi_a =
        extract_branch_phase(recon, kFrameC, GroupElement(markers[0], n),
                             GroupElement(markers[1], n));
    result["phi_a"] = phi_a;
  }
  if (cfg.preparation.type == Preparation::Type::Eq31) {
    const GameConfig partner =
        confusion_partner(cfg, mod_reduce(cfg.sector + 1, n));
    const RelativeState partner_rel =
        reduce(prepare(partner), kFrameA, GroupElement(0, n));
    result["confusion_partner"] = {
        {"sector", partner.sector},
        {"phi", partner.preparation.eq31.phi},
        {"relative_fidelity",
         fidelity_up_to_global_phase(rel.state, partner_rel.state)}};
  }
  result["verdict"] = verdict_insufficient(
      "Phi^(A) constrains P only jointly with the inaccessible x1 - x2 and "
      "phi");
  return result;
}

json run_level3(const GameConfig& cfg, Level method, Rng& rng) {
  const int n = cfg.n;
  json result;
  json comms = json::array();
  try {
    switch (method) {
      case Level::ThreePhaseDiff: {
        const PhysicalState phys = prepare(cfg);
        const RelativeState rel_a = reduce(phys, kFrameA, GroupElement(0, n));
        const RelativeState rel_c = reduce(phys, kFrameC, GroupElement(0, n));
        const auto markers = marker_positions(rel_a.state, kFrameC);
        if (markers.size() != 2) {
          result["verdict"] =
              verdict_insufficient("degenerate-geometry");
          return result;
        }
        const int c1 = markers[0], c2 = markers[1];
        const double phi_a = extract_branch_phase(
            rel_a, kFrameC, GroupElement(c1, n), GroupElement(c2, n));
        const double phi_c = extract_branch_phase(
            rel_c, kFrameA, GroupElement(mod_reduce(-c1, n), n),
            GroupElement(mod_reduce(-c2, n), n));
        comms.push_back({{"from", "alice"}, {"to", "charlie"},
                         {"phi_a", phi_a}, {"markers", {c1, c2}}});
        comms.push_back(
            {{"from", "charlie"}, {"to", "alice"}, {"phi_c", phi_c}});
        result["phi_a"] = phi_a;
        result["phi_c"] = phi_c;
        result["delta"] = mod_reduce(c1 - c2, n);
        const RecoveryResult rec = recover_sector_phase_difference_delta(
            phi_a, phi_c, c1 - c2, n);
        result["verdict"] = verdict_of(rec);
        break;
      }
      case Level::ThreeRatio: {
        const PhysicalState phys = prepare(cfg);
        const RelativeState rel_a = reduce(phys, kFrameA, GroupElement(0, n));
        const RelativeState rel_c = reduce(phys, kFrameC, GroupElement(0, n));
        const TomographyResult tomo_a =
            cfg.shots > 0 ? level2_tomography(rel_a, cfg.shots, &rng)
                          : level2_tomography(rel_a);
        const TomographyResult tomo_c =
            cfg.shots > 0 ? level2_tomography(rel_c, cfg.shots, &rng)
                          : level2_tomography(rel_c);
        comms.push_back({{"from", "alice"}, {"to", "charlie"},
                         {"payload", "Phi_A table"}});
        comms.push_back({{"from", "charlie"}, {"to", "alice"},
                         {"payload", "Phi_C table"}});
        const RelativeWaveTables tables =
            make_wave_tables(tomo_a.reconstructed, tomo_c.reconstructed);
        const double angle_tol = cfg.shots > 0 ? 0.5 * kTwoPi / n : 1e-6;
        const RecoveryResult rec = recover_sector_ratio(tables, angle_tol);
        result["modulus_deviation"] = rec.margin;
        result["verdict"] = verdict_of(rec);
        break;
      }
      case Level::ThreeProcess: {
        const int pairs_wanted = std::max(cfg.rounds, 2);
        std::vector<std::pair<StateVector, StateVector>> pairs;
        for (int r = 0; r < pairs_wanted; ++r) {
          GameConfig probe = cfg;
          probe.preparation.type = Preparation::Type::Random;
          probe.preparation.random_seed = rng.raw();
          const PhysicalState phys = prepare(probe);
          const RelativeState rel_a =
              reduce(phys, kFrameA, GroupElement(0, n));
          const RelativeState rel_c =
              reduce(phys, kFrameC, GroupElement(0, n));
          pairs.emplace_back(level2_tomography(rel_a).reconstructed,
                             level2_tomography(rel_c).reconstructed);
          comms.push_back({{"from", "alice"}, {"to", "charlie"},
                           {"round", r + 1}, {"payload", "input state"}});
        }
        const RecoveryResult rec = recover_sector_process(pairs, n);
        result["fidelity_margin"] = rec.margin;
        result["verdict"] = verdict_of(rec);
        break;
      }
      default:
        throw config_error("not a level-3 method");
    }
  } catch (const degenerate_geometry_error& e) {
    result["verdict"] = verdict_insufficient(std::string("degenerate-geometry: ") + e.what());
  } catch (const localization_error& e) {
    result["verdict"] = verdict_insufficient(std::string("localization: ") + e.what());
  } catch (const indeterminate_error& e) {
    result["verdict"] = verdict_insufficient(std::string("indeterminate: ") + e.what());
  } catch (const extraction_error& e) {
    result["verdict"] = verdict_insufficient(std::string("extraction: ") + e.what());
  }
  result["communication"] = comms;
  return result;
}

json run_extra_particle(const GameConfig& cfg) {
  const StateVector kin = make_kinematical(cfg);
  const ExtraParticleResult res = extra_particle_mode(kin);
  json result;
  result["sector_weights"] = res.sector_weights;
  result["populated"] = res.populated;
  if (res.phi) result["phi"] = *res.phi;
  if (res.branch_separation) result["branch_separation"] = *res.branch_separation;
  if (!res.separation_candidates.empty())
    result["separation_candidates"] = res.separation_candidates;
  if (res.sector_pair[0] >= 0)
    result["sector_pair"] = {res.sector_pair[0], res.sector_pair[1]};
  if (res.populated.size() == 1) {
    result["verdict"] = verdict_recovered(res.populated.front());
  } else {
    result["verdict"] = {{"kind", "sector_distribution"},
                         {"weights", res.sector_weights}};
  }
  return result;
}

json run_perspectival(const GameConfig& cfg, Level method, Rng& rng) {
  const int n = cfg.n;
  RelativeState alice;
  alice.state = make_perspectival_preparation(cfg);
  alice.state.context = FrameContext::relative(kFrameA, 0, cfg.sector);
  alice.frame = kFrameA;
  alice.origin = GroupElement(0, n);
  alice.sector = ChargeLabel(cfg.sector, n);
  alice.conditional_norm = 1.0;

  json result;
  try {
    const RecoveryResult rec = perspectival_variant_round(
        alice, method, rng, std::max(cfg.rounds, 3));
    result["verdict"] = verdict_of(rec);
    result["matches_tag"] = rec.unique && rec.sector == mod_reduce(cfg.sector, n);
  } catch (const extraction_error& e) {
    result["verdict"] = verdict_insufficient(e.what());
  } catch (const localization_error& e) {
    result["verdict"] = verdict_insufficient(e.what());
  } catch (const indeterminate_error& e) {
    result["verdict"] = verdict_insufficient(e.what());
  } catch (const degenerate_geometry_error& e) {
    result["verdict"] = verdict_insufficient(e.what());
  }
  return result;
}

json run_game_result(const json& scenario, const RunOverrides& overrides) {
  GameConfig cfg = parse_game_config(scenario);
  if (overrides.tolerance) cfg.tolerance = *overrides.tolerance;
  if (overrides.seed) cfg.seed = *overrides.seed;
  Rng rng(cfg.seed);
  const Level level = parse_level(scenario);
  switch (level) {
    case Level::One:
      return run_level1(cfg, rng);
    case Level::Two:
      return run_level2(cfg, rng);
    case Level::ThreePhaseDiff:
    case Level::ThreeRatio:
    case Level::ThreeProcess:
      return run_level3(cfg, level, rng);
    case Level::ExtraParticle:
      return run_extra_particle(cfg);
    case Level::Perspectival: {
      const std::string m = method_of(scenario);
      Level inner = Level::ThreeRatio;
      if (m == "phase_difference") inner = Level::ThreePhaseDiff;
      if (m == "process") inner = Level::ThreeProcess;
      return run_perspectival(cfg, inner, rng);
    }
  }
  throw config_error("unhandled level");
}

json run_verify_result(const json& scenario, const RunOverrides& overrides) {
  VerifyOptions opt;
  if (scenario.contains("n_grid"))
    opt.n_grid = scenario.at("n_grid").get<std::vector<int>>();
  if (scenario.contains("tolerance"))
    opt.tolerance = scenario.at("tolerance").get<double>();
  if (scenario.contains("seed"))
    opt.seed = scenario.at("seed").get<std::uint64_t>();
  if (overrides.tolerance) opt.tolerance = *overrides.tolerance;
  if (overrides.seed) opt.seed = *overrides.seed;
  opt.mutate_parity_sign = overrides.mutate_parity_sign;

  const SuiteReport report =
      run_suite(scenario.at("suite").get<std::string>(), opt);
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"max_residual", c.max_residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  }
  return {{"suite", report.suite}, {"checks", checks},
          {"pass", report.passed()}};
}

}  // namespace

json load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open scenario file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("scenario parse error in " + path + ": " + e.what());
  }
  return j;
}

void validate_scenario(const json& scenario) {
  if (!scenario.is_object()) schema_error("/", "expected an object");
  if (!scenario.contains("version") || !scenario.contains("command"))
    schema_error("/", "version and command are required");
  if (scenario.at("version").get<std::string>() != kSchemaVersion)
    schema_error("/version", "unsupported schema version");
  const std::string command = scenario.at("command").get<std::string>();
  if (command == "verify") {
    check_keys(scenario, "/",
               {"version", "command", "suite", "n_grid", "tolerance", "seed"},
               {"version", "command", "suite"});
  } else if (command == "game") {
    check_keys(scenario, "/",
               {"version", "command", "n", "sector", "level", "method",
                "preparation", "rounds", "tolerance", "seed", "shots"},
               {"version", "command", "n", "sector", "level", "preparation"});
    validate_preparation(scenario.at("preparation"), "/preparation");
    (void)parse_level(scenario);
  } else if (command == "sweep") {
    check_keys(scenario, "/",
               {"version", "command", "param", "values", "base", "workers"},
               {"version", "command", "param", "values", "base"});
    const std::string param = scenario.at("param").get<std::string>();
    if (param != "P" && param != "N" && param != "phi" && param != "geometry")
      schema_error("/param", "unsupported sweep parameter " + param);
    validate_scenario(scenario.at("base"));
  } else {
    schema_error("/command", "unknown command " + command);
  }
}

GameConfig parse_game_config(const json& scenario) {
  GameConfig cfg;
  cfg.n = scenario.at("n").get<int>();
  if (cfg.n < kMinModulus || cfg.n > kMaxModulus)
    schema_error("/n", "N out of supported range");
  cfg.sector = mod_reduce(scenario.at("sector").get<int>(), cfg.n);
  cfg.rounds = scenario.value("rounds", 2);
  cfg.tolerance = scenario.value("tolerance", kTol);
  cfg.seed = scenario.value("seed", std::uint64_t{0});
  cfg.shots = scenario.value("shots", 0);

  const json& prep = scenario.at("preparation");
  const std::string type = prep.at("type").get<std::string>();
  if (type == "eq31") {
    cfg.preparation.type = Preparation::Type::Eq31;
    cfg.preparation.eq31.x1 = prep.at("x1").get<int>();
    cfg.preparation.eq31.x2 = prep.at("x2").get<int>();
    cfg.preparation.eq31.z1 = prep.at("z1").get<int>();
    cfg.preparation.eq31.z2 = prep.at("z2").get<int>();
    cfg.preparation.eq31.phi = prep.at("phi").get<double>();
    if (prep.contains("phi_b"))
      cfg.preparation.eq31.phi_b =
          parse_complex_array(prep.at("phi_b"), "/preparation/phi_b");
  } else if (type == "table") {
    cfg.preparation.type = Preparation::Type::Table;
    cfg.preparation.table =
        parse_complex_array(prep.at("amplitudes"), "/preparation/amplitudes");
  } else {
    cfg.preparation.type = Preparation::Type::Random;
    cfg.preparation.random_seed = prep.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

json state_to_json(const StateVector& s) {
  json systems = json::array();
  for (const auto& sys : s.systems) systems.push_back(sys.label);
  return {{"systems", systems}, {"amplitudes", complex_array_to_json(s.amps)}};
}

json run_scenario(const json& scenario, const RunOverrides& overrides) {
  validate_scenario(scenario);
  const std::string command = scenario.at("command").get<std::string>();
  const auto t0 = std::chrono::steady_clock::now();
  json result;
  if (command == "verify") {
    result = run_verify_result(scenario, overrides);
  } else if (command == "game") {
    result = run_game_result(scenario, overrides);
  } else {
    throw config_error("run_scenario handles verify and game");
  }
  const auto t1 = std::chrono::steady_clock::now();
  json record;
  record["version"] = kSchemaVersion;
  record["tool"] = kToolVersion;
  record["command"] = command;
  record["inputs"] = scenario;
  record["result"] = result;
  record["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return record;
}

namespace {

json patch_scenario(const json& base, const std::string& param,
                    const json& value) {
  json out = base;
  if (param == "P") {
    if (out.at("command") != "game")
      schema_error("/param", "P sweep needs a game base");
    out["sector"] = value.get<int>();
  } else if (param == "N") {
    if (out.at("command") == "game") {
      out["n"] = value.get<int>();
      const auto& prep = out.at("preparation");
      if (prep.at("type") == "table" ||
          (prep.at("type") == "eq31" && prep.contains("phi_b")))
        schema_error("/param",
                     "N sweep needs a dimension-free preparation "
                     "(random, or eq31 without phi_b)");
    } else {
      out["n_grid"] = json::array({value.get<int>()});
    }
  } else if (param == "phi") {
    if (out.at("command") != "game" ||
        out.at("preparation").at("type") != "eq31")
      schema_error("/param", "phi sweep needs an eq31 game base");
    out["preparation"]["phi"] = value.get<double>();
  } else if (param == "geometry") {
    if (out.at("command") != "game" ||
        out.at("preparation").at("type") != "eq31")
      schema_error("/param", "geometry sweep needs an eq31 game base");
    if (!value.is_array() || value.size() != 4)
      schema_error("/values", "geometry points are [x1, x2, z1, z2]");
    out["preparation"]["x1"] = value[0].get<int>();
    out["preparation"]["x2"] = value[1].get<int>();
    out["preparation"]["z1"] = value[2].get<int>();
    out["preparation"]["z2"] = value[3].get<int>();
  }
  return out;
}

std::string csv_escape(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  std::string out;
  bool quote = false;
  for (const char ch : s) {
    if (ch == ',' || ch == '"' || ch == '\n') quote = true;
    if (ch == '"') out += '"';
    out += ch;
  }
  return quote ? "\"" + out + "\"" : out;
}

json sweep_row(const json& base, const std::string& param, const json& value,
               const RunOverrides& overrides) {
  json row;
  row["param"] = param;
  row["value"] = value;
  try {
    const json patched = patch_scenario(base, param, value);
    const json record = run_scenario(patched, overrides);
    const json& result = record.at("result");
    row["command"] = record.at("command");
    if (record.at("command") == "verify") {
      row["status"] = result.at("pass").get<bool>() ? "pass" : "fail";
      double worst = 0.0;
      for (const auto& c : result.at("checks"))
        worst = std::max(worst, c.at("max_residual").get<double>());
      row["max_residual"] = worst;
    } else {
      row["status"] = "ok";
      if (patched.contains("sector")) row["p_true"] = patched.at("sector");
      const json& verdict = result.at("verdict");
      row["verdict"] = verdict.at("kind");
      if (verdict.contains("value")) row["p_recovered"] = verdict.at("value");
      if (verdict.contains("candidates"))
        row["candidates"] = verdict.at("candidates");
      if (result.contains("phi_a")) row["phi_a"] = result.at("phi_a");
      if (result.contains("phi_c")) row["phi_c"] = result.at("phi_c");
      if (result.contains("max_expectation_gap"))
        row["max_residual"] = result.at("max_expectation_gap");
    }
  } catch (const std::exception& e) {
    row["status"] = "error";
    row["note"] = e.what();
  }
  return row;
}

}  // namespace

std::string run_sweep_csv(const json& scenario, const RunOverrides& overrides) {
  validate_scenario(scenario);
  const std::string param = scenario.at("param").get<std::string>();
  const json& values = scenario.at("values");
  const json& base = scenario.at("base");
  int workers = scenario.value("workers", 1);
  if (overrides.workers) workers = *overrides.workers;
  workers = std::max(1, std::min<int>(workers, 16));

  std::vector<json> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) break;
      rows[i] = sweep_row(base, param, values[i], overrides);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  const std::vector<std::string> cols = {
      "param",  "value",       "command",    "status",
      "verdict", "p_true",     "p_recovered", "candidates",
      "phi_a",  "phi_c",       "max_residual", "note"};
  std::ostringstream out;
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (row.contains(cols[i])) out << csv_escape(row.at(cols[i]));
      out << (i + 1 < cols.size() ? "," : "\n");
    }
  }
  return out.str();
}

int exit_code_for(const json& record) {
  const json& result = record.at("result");
  if (record.at("command") == "verify")
    return result.at("pass").get<bool>() ? 0 : 1;
  if (result.contains("verdict") &&
      result.at("verdict").at("kind") == "candidate_set")
    return 3;
  return 0;
}

std::string payload_string(const json& record) {
  json copy = record;
  copy.erase("wall_time_ms");
  return copy.dump();
}

}  // namespace qrf::cli
