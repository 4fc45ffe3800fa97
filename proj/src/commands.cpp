#include "lame/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "lame/ansatz.hpp"
#include "lame/forward.hpp"
#include "lame/geometry.hpp"
#include "lame/parallel.hpp"
#include "lame/reconstruct.hpp"
#include "lame/stroh.hpp"

namespace lame {

namespace fs = std::filesystem;

namespace {

json cjson(cplx c) { return json::array({c.real(), c.imag()}); }

template <class M>
json mat_json(const M& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(cjson(cplx(m(i, j))));
    rows.push_back(r);
  }
  return rows;
}

template <class V>
json vec_json(const V& v) {
  json r = json::array();
  for (int i = 0; i < v.size(); ++i) r.push_back(cjson(cplx(v[i])));
  return r;
}

json real_vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, int code, const std::string& msg)
      : std::runtime_error(msg), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const { return stage_; }
  int code() const { return code_; }

 private:
  std::string stage_;
  int code_;
};

// Orchestrator state: outputs, timings, and the manifest.
class Run {
 public:
  Run(std::string command, const CommandOptions& opt) : command_(std::move(command)), opt_(opt) {}

  template <class F>
  auto stage(const std::string& name, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record(name, t0);
      } else {
        auto r = f();
        record(name, t0);
        return r;
      }
    } catch (const StageError&) {
      throw;
    } catch (const ConfigError& e) {
      throw StageError(name, kExitConfig, e.what());
    } catch (const AdmissibilityError& e) {
      throw StageError(name, kExitConfig, e.what());
    } catch (const InputError& e) {
      throw StageError(name, kExitConfig, e.what());
    } catch (const std::exception& e) {
      throw StageError(name, kExitNumerical, e.what());
    }
  }

  void write(const std::string& file, const std::string& content) {
    fs::create_directories(opt_.out_dir);
    fs::path p = fs::path(opt_.out_dir) / file;
    std::ofstream o(p, std::ios::binary);
    o << content;
    o.close();
    outputs_.push_back({file, content.size(), fnv1a64(content)});
  }
  void write_json(const std::string& file, const json& j) { write(file, j.dump(2) + "\n"); }

  void manifest(const std::string& config_hash, int exit_code) {
    json m;
    m["tool"] = "lame-edge";
    m["version"] = kToolVersion;
    m["command"] = command_;
    m["config_hash"] = config_hash;
    m["exit_code"] = exit_code;
    m["jobs"] = resolve_jobs(opt_.jobs);
    json st = json::array();
    for (const auto& [n, s] : timings_) st.push_back({{"stage", n}, {"seconds", s}});
    m["timings"] = st;
    json out = json::array();
    for (const auto& o : outputs_)
      out.push_back({{"file", o.file}, {"bytes", o.bytes}, {"fnv1a64", hex64(o.hash)}});
    m["outputs"] = out;
    fs::create_directories(opt_.out_dir);
    std::ofstream f(fs::path(opt_.out_dir) / "manifest.json", std::ios::binary);
    f << m.dump(2) << "\n";
  }

 private:
  void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timings_.push_back({name, s});
  }
  struct Output {
    std::string file;
    std::size_t bytes;
    std::uint64_t hash;
  };
  std::string command_;
  CommandOptions opt_;
  std::vector<std::pair<std::string, double>> timings_;
  std::vector<Output> outputs_;
};

ExperimentConfig configured(const CommandOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError(std::vector<ConfigIssue>{{"--config", "a config file is required"}});
  if (!(opt.tol_scale > 0)) throw ConfigError(std::vector<ConfigIssue>{{"--tol-scale", "must be positive"}});
  ExperimentConfig c = load_config(opt.config_path);
  c.quad.jobs = opt.jobs;
  c.quad.ode_tol *= opt.tol_scale;
  c.quad.tail_tol *= opt.tol_scale;
  return c;
}

std::string config_hash(const ExperimentConfig& c, const CommandOptions& opt) {
  json j = to_json(c);
  j["tol_scale"] = opt.tol_scale;
  return hex64(fnv1a64(j.dump()));
}

// ---------------------------------------------------------------------------

int cmd_validate(const CommandOptions& opt, std::ostream& out) {
  json report;
  report["config"] = opt.config_path;
  json errs = json::array();
  try {
    json j = read_json_file(opt.config_path);
    for (const auto& i : validate_config_json(j)) errs.push_back({{"field", i.field}, {"message", i.message}});
  } catch (const ConfigError& e) {
    for (const auto& i : e.issues()) errs.push_back({{"field", i.field}, {"message", i.message}});
  }
  report["valid"] = errs.empty();
  report["errors"] = errs;
  out << report.dump(2) << "\n";
  return errs.empty() ? kExitPass : kExitConfig;
}

int cmd_stroh(Run& run, const ExperimentConfig& c, std::ostream& out) {
  LameProfile prof = c.profile();
  double l = prof.lambda.value(0), m = prof.mu.value(0);
  json dirs = json::array();
  for (const Vec3& w : c.directions) {
    json d;
    StrohMatrix K = run.stage("stroh_matrix", [&] { return stroh_matrix(l, m, w); });
    StrohSpectrum sp = run.stage("eigen_jordan", [&] { return eigen_jordan(K); });
    Eigen::ComplexEigenSolver<CMat6> es(K.matrix, false);
    double dev = 0;
    for (int i = 0; i < 6; ++i)
      dev = std::max(dev, std::min(std::abs(es.eigenvalues()[i] - I), std::abs(es.eigenvalues()[i] + I)));
    int mult_p = static_cast<int>(generalized_eigenspace(K.matrix, I, 3).cols());
    int mult_m = static_cast<int>(generalized_eigenspace(K.matrix, -I, 3).cols());
    json ev = json::array();
    for (int i = 0; i < mult_p; ++i) ev.push_back(cjson(I));
    for (int i = 0; i < mult_m; ++i) ev.push_back(cjson(-I));
    d["omega"] = real_vec(w);
    d["lambda"] = l;
    d["mu"] = m;
    d["K0"] = mat_json(K.matrix);
    d["eigenvalues"] = ev;
    d["numerical_eigenvalue_deviation"] = dev;
    d["chain"] = {{"gauge", sp.gauge == Gauge::closed_form ? "closed_form" : "normalized"},
                  {"q1", vec_json(sp.plus[0])},
                  {"q2", vec_json(sp.plus[1])},
                  {"q3", vec_json(sp.plus[2])},
                  {"rank1", sp.rank1},
                  {"rank2", sp.rank2},
                  {"residual", sp.residual}};
    json Z;
    for (ImpedanceVariant v : {ImpedanceVariant::iota_linear, ImpedanceVariant::iota_squared})
      Z[to_string(v)] = mat_json(impedance(l, m, w, v).Z);
    d["Z"] = Z;
    dirs.push_back(d);

    out << "omega = (" << w[0] << ", " << w[1] << ", 0), lambda = " << l << ", mu = " << m << "\n";
    out << "  K0:\n";
    for (int i = 0; i < 6; ++i) {
      out << "   ";
      for (int j = 0; j < 6; ++j)
        out << " " << std::setw(18) << std::showpos << std::setprecision(6)
            << K.matrix(i, j).real() << std::noshowpos;
      out << "\n";
    }
    out << "  eigenvalues: +i x" << mult_p << ", -i x" << mult_m << "\n";
    for (int q = 0; q < 3; ++q) {
      out << "  q" << q + 1 << " =";
      for (int i = 0; i < 6; ++i) out << " (" << sp.plus[q][i].real() << "," << sp.plus[q][i].imag() << ")";
      out << "\n";
    }
    for (ImpedanceVariant v : {ImpedanceVariant::iota_linear, ImpedanceVariant::iota_squared}) {
      CMat3 Zm = impedance(l, m, w, v).Z;
      out << "  Z[" << to_string(v) << "]:\n";
      for (int i = 0; i < 3; ++i) {
        out << "   ";
        for (int j = 0; j < 3; ++j) out << " (" << Zm(i, j).real() << "," << Zm(i, j).imag() << ")";
        out << "\n";
      }
    }
  }
  json j;
  j["command"] = "stroh";
  j["config"] = to_json(c);
  j["directions"] = dirs;
  run.write_json("stroh.json", j);
  return kExitPass;
}

int cmd_forward(Run& run, const ExperimentConfig& c, std::ostream& out) {
  LameProfile prof = c.profile();
  std::vector<DtnSymbol> sym(c.forward_k.size());
  run.stage("dtn_symbol", [&] {
    AdmissibilityReport rep = validate_admissibility(prof, kHmax);
    if (!rep.passed) throw AdmissibilityError("forward profile", "profile is not admissible");
    parallel_for(c.forward_k.size(), resolve_jobs(c.quad.jobs),
                 [&](std::size_t i) { sym[i] = dtn_symbol(prof, c.forward_k[i], c.quad.ode_tol); });
  });
  json rows = json::array();
  out << "k1 k2 | H steps | rel. difference to frozen-surface half-space\n";
  for (const DtnSymbol& s : sym) {
    CMat3 ref = half_space_impedance(prof.lambda.value(0), prof.mu.value(0), s.k);
    double rel = (s.M - ref).norm() / ref.norm();
    double herm = (s.M - s.M.adjoint()).norm() / s.M.norm();
    rows.push_back({{"k", {s.k[0], s.k[1]}},
                    {"M", mat_json(s.M)},
                    {"H", s.H},
                    {"steps", s.steps},
                    {"rejected", s.rejected},
                    {"hermitian_defect", herm},
                    {"surface_half_space", mat_json(ref)},
                    {"relative_difference", rel}});
    out << s.k[0] << " " << s.k[1] << " | " << s.H << " " << s.steps << " | " << rel << "\n";
  }
  json j;
  j["command"] = "forward";
  j["config"] = to_json(c);
  j["symbols"] = rows;
  run.write_json("forward.json", j);
  return kExitPass;
}

int cmd_ansatz_check(Run& run, const ExperimentConfig& c, std::ostream& out) {
  LameProfile prof = c.profile();
  json rows = json::array();
  bool pass = true;
  for (int m : c.ansatz_m) {
    ProbeSpec templ = ProbeSpec::make(CVec3(0, 0, 1), c.directions.front(), c.ansatz_N.front(), m,
                                      prof.holder_exponent, c.cutoff_profile());
    AnsatzSolution st = run.stage("build_correctors", [&] { return build_correctors(templ, prof); });
    std::vector<Vec3> pts;
    for (double z3 : {0.0, 0.5, 1.0, 2.0, 4.0})
      for (double z1 : {-0.5, 0.0, 0.3}) pts.push_back(Vec3(z1, 0.2, z3));
    double cascade = cascade_residual(st, pts);
    ResidualDecay dec = run.stage("residual_decay", [&] { return residual_decay(templ, c.ansatz_N, prof); });
    bool ok = std::abs(dec.slope - dec.expected) <= 0.2;
    pass = pass && ok;
    json degs = json::array();
    for (const auto& v : st.V) degs.push_back(v.degree());
    json res = json::array();
    for (std::size_t i = 0; i < dec.N.size(); ++i)
      res.push_back({{"N", dec.N[i]}, {"residual", dec.residual[i]},
                     {"halving_discrepancy", dec.halving_discrepancy[i]}});
    rows.push_back({{"m", m},
                    {"rho_tilde", templ.rho_tilde},
                    {"n_max", st.n_max()},
                    {"corrector_degrees", degs},
                    {"cascade_residual", cascade},
                    {"residual_ladder", res},
                    {"slope", dec.slope},
                    {"expected_slope", dec.expected},
                    {"pass", ok}});
    out << "m = " << m << ", rho = 1/" << templ.rho_tilde << ": n_max = " << st.n_max()
        << ", cascade residual = " << cascade << ", slope = " << dec.slope << " (expected "
        << dec.expected << ") " << (ok ? "PASS" : "FAIL") << "\n";
  }
  json j;
  j["command"] = "ansatz-check";
  j["config"] = to_json(c);
  j["checks"] = rows;
  j["pass"] = pass;
  run.write_json("ansatz.json", j);
  return pass ? kExitPass : kExitThreshold;
}

int cmd_geometry_check(Run& run, const ExperimentConfig& c, std::ostream& out) {
  LameProfile prof = c.profile();
  LameField field = [&prof](const Vec3& x) {
    double d = std::max(x[2], 0.0);
    return std::make_pair(lambda_at(prof, d), mu_at(prof, d));
  };
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(-1, 1);
  json table = json::array();
  bool pass = true;
  auto row = [&](const std::string& check, const std::string& chart, double value, double tol) {
    bool ok = value <= tol;
    pass = pass && ok;
    table.push_back({{"check", check}, {"chart", chart}, {"value", value}, {"tolerance", tol}, {"pass", ok}});
    out << std::left << std::setw(34) << check << std::setw(12) << chart << std::setw(14)
        << value << " <= " << tol << "  " << (ok ? "PASS" : "FAIL") << "\n";
  };

  struct Case {
    GraphSurface s;
    double depth;
  };
  std::vector<Case> cases = {{GraphSurface::flat(), 1.0},
                             {GraphSurface::sphere(2.0), 0.99},
                             {GraphSurface::paraboloid(1.0), 0.5}};
  for (const Case& cs : cases) {
    BoundaryChart ch = run.stage("build_chart", [&] { return build_chart(cs.s, Vec3::Zero(), cs.depth); });
    ChartCheck cc = check_chart(ch, 5);
    const std::string& nm = cs.s.name();
    row("J(x0) = I", nm, cc.j0_error, 1e-12);
    row("|g33 - 1|", nm, cc.max_g33_error, 1e-8);
    row("|g_a3|", nm, cc.max_ga3_error, 1e-8);
    double cong = 0, matched = 0, major = 0;
    for (int t = 0; t < 20; ++t) {
      double r = cs.s.patch_radius() / std::sqrt(2.0);
      Vec3 y(r * U(rng), r * U(rng), cs.depth * 0.5 * (U(rng) + 1));
      Vec2 z(U(rng), U(rng));
      PushedTensor Pt = push_forward(field, ch, y, PushMode::tensorial);
      PushedTensor Pc = push_forward(field, ch, y, PushMode::component);
      auto [l, m] = field(Pt.x);
      Tensor4 C = tensor_components(l, m);
      Vec3 nu = Pt.J.transpose() * Vec3::UnitZ();
      Vec3 w = Pt.J.transpose() * Vec3(z[0], z[1], 0);
      Blocks ph = physical_blocks(C, nu, w);
      Blocks bt = pushed_blocks(Pt.C, z);
      Blocks bc = pushed_blocks(Pc.C, z);
      double sc = C(0, 0, 0, 0);
      cong = std::max({cong, (bt.T - Pt.J * ph.T * Pt.J.transpose()).norm() / sc,
                       (bt.R - Pt.J * ph.R * Pt.J.transpose()).norm() / sc,
                       (bt.Q - Pt.J * ph.Q * Pt.J.transpose()).norm() / sc});
      matched = std::max({matched, (bc.T - ph.T).norm() / sc, (bc.R - ph.R).norm() / sc,
                          (bc.Q - ph.Q).norm() / sc});
      for (int i = 0; i < 3; ++i)
        for (int q = 0; q < 3; ++q)
          for (int k = 0; k < 3; ++k)
            for (int p = 0; p < 3; ++p)
              major = std::max(major, std::abs(Pc.C(i, q, k, p) - Pc.C(k, p, i, q)) / sc);
    }
    row("tensorial T,R,Q = J (.) J^T", nm, cong, 1e-10);
    row("component T,R,Q = matched blocks", nm, matched, 1e-10);
    row("major symmetry C~_iqkp = C~_kpiq", nm, major, 1e-12);
  }

  // Flat reductions.
  BoundaryChart flat = build_chart(GraphSurface::flat(), Vec3::Zero(), 1.0);
  double flat_push = 0;
  {
    Vec3 y(0.3, -0.2, 0.4);
    PushedTensor P = push_forward(field, flat, y);
    auto [l, m] = field(y);
    Tensor4 C = tensor_components(l, m);
    for (std::size_t i = 0; i < 81; ++i) flat_push = std::max(flat_push, std::abs(P.C.data()[i] - C.data()[i]));
  }
  row("flat push-forward = C", "flat", flat_push, 0.0);
  NonflatData nd{prof.lambda.value(0), prof.mu.value(0), prof.lambda.derivative(0, 1),
                 prof.mu.derivative(0, 1)};
  double flat_red = 0;
  for (const ProbeTemplate& p : c.probes)
    for (FormulaVariant v : {FormulaVariant::plus_one, FormulaVariant::plus_a3_squared})
      for (AkpMode mode : {AkpMode::literal, AkpMode::alternate}) {
        NonflatValue f = first_order_nonflat(flat, nd, p.a, p.omega, v, mode);
        flat_red = std::max(flat_red, std::abs(f.total - theorem2_rhs(p.a, p.omega, 1, nd.dlambda, nd.dmu, v)));
      }
  row("flat first_order_nonflat = rhs", "flat", flat_red, 0.0);
  double rank = 0;
  for (const ProbeTemplate& p : c.probes)
    for (AkpMode mode : {AkpMode::literal, AkpMode::alternate}) {
      Eigen::JacobiSVD<CMat3> svd(akp(p.a, p.omega, mode));
      rank = std::max(rank, svd.singularValues()[1] / std::max(svd.singularValues()[0], 1e-300));
    }
  row("rank A_kp <= 1 (s2/s1)", "-", rank, 1e-12);

  json akp_rows = json::array();
  std::string consistent = "none";
  for (const auto& a : akp_consistency(c.probes, 0.3, 0.2, FormulaVariant::plus_one)) {
    akp_rows.push_back({{"mode", to_string(a.mode)}, {"max_relative_mismatch", a.max_relative_mismatch}});
    if (a.max_relative_mismatch <= 1e-12 && consistent == "none") consistent = to_string(a.mode);
  }
  BoundaryChart sph = build_chart(GraphSurface::sphere(2.0), Vec3::Zero(), 0.99);
  json curv = json::array();
  for (AkpMode mode : {AkpMode::literal, AkpMode::alternate}) {
    NonflatValue f = first_order_nonflat(sph, NonflatData{1, 1, 0, 0}, CVec3(0, 0, 1), Vec3(1, 0, 0),
                                         FormulaVariant::plus_one, mode);
    curv.push_back({{"mode", to_string(mode)}, {"flat", cjson(f.flat)}, {"correction", cjson(f.correction)},
                    {"total", cjson(f.total)}});
    out << "sphere R=2, lambda=mu=1, a=e3, omega=e1, A mode " << to_string(mode)
        << ": correction = (" << f.correction.real() << ", " << f.correction.imag() << ")\n";
  }
  out << "A_kp mode consistent with the flat formula: " << consistent << "\n";
  json j;
  j["command"] = "geometry-check";
  j["config"] = to_json(c);
  j["table"] = table;
  j["akp_modes"] = akp_rows;
  j["akp_consistent_mode"] = consistent;
  j["sphere_curvature_term"] = curv;
  j["pass"] = pass;
  run.write_json("geometry.json", j);
  return pass ? kExitPass : kExitThreshold;
}

json check_json(const std::string& name, double value, double target, double tol, bool ok) {
  return {{"check", name}, {"value", value}, {"target", target}, {"tolerance", tol}, {"pass", ok}};
}

int cmd_reconstruct(Run& run, const ExperimentConfig& c, std::ostream& out) {
  LameProfile prof = c.profile();
  ReconstructionReport rep;
  try {
    rep = run.stage("reconstruct", [&] { return reconstruct(prof, c.reconstruction_settings()); });
  } catch (const StageError& e) {
    json j;
    j["command"] = "reconstruct";
    j["config"] = to_json(c);
    j["error"] = {{"stage", e.stage()}, {"message", e.what()}};
    run.write_json("reconstruct.json", j);
    throw;
  }
  json j = reconstruction_to_json(rep);
  j["config"] = to_json(c);

  json checks = json::array();
  bool pass = true;
  auto rel = [](double est, double truth) { return std::abs(est - truth) / std::abs(truth); };
  auto add = [&](const std::string& n, double v, double target, double tol, bool ok) {
    checks.push_back(check_json(n, v, target, tol, ok));
    pass = pass && ok;
  };
  double l0 = *rep.truth_lambda0, m0 = *rep.truth_mu0;
  add("order0.lambda", rep.order0.lambda, l0, c.acceptance.order0_rel,
      rel(rep.order0.lambda, l0) <= c.acceptance.order0_rel);
  add("order0.mu", rep.order0.mu, m0, c.acceptance.order0_rel, rel(rep.order0.mu, m0) <= c.acceptance.order0_rel);
  auto deriv_check = [&](const std::string& n, double est, double noise, double truth, double tol) {
    bool ok = truth == 0 ? std::abs(est) <= c.acceptance.null_noise_factor * noise
                         : rel(est, truth) <= tol;
    add(n, est, truth, truth == 0 ? c.acceptance.null_noise_factor * noise : tol, ok);
  };
  if (rep.m >= 1) {
    if (rep.calibrated) {
      deriv_check("calibrated.dlambda", rep.calibrated->dlambda, rep.calibrated->noise_dlambda,
                  *rep.truth_dlambda, c.acceptance.calibrated_rel);
      deriv_check("calibrated.dmu", rep.calibrated->dmu, rep.calibrated->noise_dmu, *rep.truth_dmu,
                  c.acceptance.calibrated_rel);
    } else if (c.calibrate) {
      add("calibration.accepted", rep.calibration ? rep.calibration->linearity_error : 1, 0, 0.03, false);
    }
    // Printed variant closest to the measured response.
    const VariantComparison* best = nullptr;
    for (const auto& v : rep.variants)
      if (!best || v.distance < best->distance) best = &v;
    if (best) {
      deriv_check("printed." + to_string(best->variant) + ".dlambda", best->recovery.dlambda,
                  best->recovery.noise_dlambda, *rep.truth_dlambda, c.acceptance.orderm_rel);
      deriv_check("printed." + to_string(best->variant) + ".dmu", best->recovery.dmu,
                  best->recovery.noise_dmu, *rep.truth_dmu, c.acceptance.orderm_rel);
    }
  }
  j["acceptance"] = {{"checks", checks}, {"pass", pass}};
  run.write_json("reconstruct.json", j);
  run.write("ladders.csv", ladders_csv(rep));

  out << "order 0: lambda = " << rep.order0.lambda << ", mu = " << rep.order0.mu
      << " (residual " << rep.order0.residual << ")\n";
  if (rep.calibrated)
    out << "order " << rep.m << " (calibrated): dlambda = " << rep.calibrated->dlambda
        << ", dmu = " << rep.calibrated->dmu << "\n";
  for (const auto& v : rep.variants)
    out << "order " << rep.m << " (" << to_string(v.variant) << "): dlambda = " << v.recovery.dlambda
        << ", dmu = " << v.recovery.dmu << ", distance = " << v.distance << "\n";
  out << "verdict: " << rep.verdict << "\n";
  for (const auto& ch : checks)
    out << "  " << ch["check"].get<std::string>() << ": " << (ch["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  return pass ? kExitPass : kExitThreshold;
}

json ladder_json(const LadderResult& L) {
  json vals = json::array();
  for (std::size_t i = 0; i < L.N.size(); ++i)
    vals.push_back({{"N", L.N[i]}, {"value", cjson(L.values[i])}, {"tail", L.tails[i]}});
  return {{"probe_id", L.probe_id},
          {"a", vec_json(L.a)},
          {"omega", real_vec(L.omega)},
          {"m", L.m},
          {"rho_tilde", L.rho_tilde},
          {"values", vals},
          {"monotone", L.monotone},
          {"limit", cjson(L.fit.limit)},
          {"rate", L.fit.q},
          {"fit_residual", L.fit.residual},
          {"uncertainty", L.fit.uncertainty},
          {"richardson_fallback", L.fit.richardson_fallback},
          {"rate_undetermined", L.fit.q_undetermined},
          {"noise_floor", L.fit.noise_floor}};
}

json orderm_json(const OrderMResult& r) {
  return {{"dlambda", r.dlambda}, {"dmu", r.dmu}, {"residual", r.residual},
          {"condition", r.condition}, {"noise_dlambda", r.noise_dlambda}, {"noise_dmu", r.noise_dmu}};
}

json design_json(const DesignMatrix& D) {
  json rows = json::array();
  for (std::size_t i = 0; i < D.rows.size(); ++i)
    rows.push_back({{"probe_id", D.probe_ids[i]}, {"dlambda", cjson(D.rows[i].dlambda)},
                    {"dmu", cjson(D.rows[i].dmu)}});
  return rows;
}

}  // namespace

json reconstruction_to_json(const ReconstructionReport& rep) {
  json j;
  j["command"] = "reconstruct";
  j["order0"] = {{"lambda", rep.order0.lambda},
                 {"mu", rep.order0.mu},
                 {"residual", rep.order0.residual},
                 {"iterations", rep.order0.iterations},
                 {"newton_converged", rep.order0.newton_converged},
                 {"grid_fallback", rep.order0.grid_fallback},
                 {"admissible", rep.order0.admissible},
                 {"inconsistent", rep.order0.inconsistent},
                 {"condition", rep.order0.condition}};
  if (rep.truth_lambda0) j["order0"]["truth"] = {{"lambda", *rep.truth_lambda0}, {"mu", *rep.truth_mu0}};
  json om;
  om["m"] = rep.m;
  json cond = json::array();
  cond.push_back({{"stage", "order0"}, {"condition", rep.order0.condition}});
  if (rep.m >= 1) {
    json vars = json::array();
    for (const auto& v : rep.variants) {
      vars.push_back({{"variant", to_string(v.variant)}, {"distance", v.distance},
                      {"recovery", orderm_json(v.recovery)}});
      cond.push_back({{"stage", "order_m/" + to_string(v.variant)}, {"condition", v.recovery.condition}});
    }
    om["variants"] = vars;
    if (rep.calibration) {
      om["calibration"] = {{"lambda0", rep.calibration->lambda0},
                           {"mu0", rep.calibration->mu0},
                           {"linearity_error", rep.calibration->linearity_error},
                           {"accepted", rep.calibration->accepted},
                           {"design", design_json(rep.calibration->design)}};
    }
    if (rep.calibrated) {
      om["calibrated"] = orderm_json(*rep.calibrated);
      cond.push_back({{"stage", "order_m/calibrated"}, {"condition", rep.calibrated->condition}});
    }
    if (rep.truth_dlambda) om["truth"] = {{"dlambda", *rep.truth_dlambda}, {"dmu", *rep.truth_dmu}};
  }
  j["order_m"] = om;
  json lad = json::array();
  for (const auto& L : rep.order0_ladders) lad.push_back(ladder_json(L));
  for (const auto& L : rep.orderm_ladders) lad.push_back(ladder_json(L));
  if (rep.calibration)
    for (const auto& L : rep.calibration->ladders) lad.push_back(ladder_json(L));
  j["ladders"] = lad;
  j["variant_verdict"] = rep.verdict;
  j["condition_numbers"] = cond;
  return j;
}

std::string ladders_csv(const ReconstructionReport& rep) {
  std::ostringstream os;
  os << "N,probe_id,re,im,tail,rate\n";
  auto dump = [&](const LadderResult& L, const std::string& prefix) {
    for (std::size_t i = 0; i < L.N.size(); ++i)
      os << L.N[i] << "," << prefix << L.probe_id << "," << num(L.values[i].real()) << ","
         << num(L.values[i].imag()) << "," << num(L.tails[i]) << "," << num(L.fit.q) << "\n";
  };
  for (const auto& L : rep.order0_ladders) dump(L, "order0/");
  for (const auto& L : rep.orderm_ladders) dump(L, "order" + std::to_string(rep.m) + "/");
  if (rep.calibration)
    for (const auto& L : rep.calibration->ladders) dump(L, "calibration/");
  return os.str();
}

int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out,
                std::ostream& err) {
  if (name == "validate") {
    if (opt.config_path.empty()) {
      err << "validate: --config is required\n";
      return kExitConfig;
    }
    return cmd_validate(opt, out);
  }
  using Fn = int (*)(Run&, const ExperimentConfig&, std::ostream&);
  Fn fn = nullptr;
  if (name == "stroh") fn = cmd_stroh;
  else if (name == "forward") fn = cmd_forward;
  else if (name == "ansatz-check") fn = cmd_ansatz_check;
  else if (name == "geometry-check") fn = cmd_geometry_check;
  else if (name == "reconstruct") fn = cmd_reconstruct;
  if (!fn) {
    err << "unknown subcommand '" << name << "'\n";
    return kExitConfig;
  }
  Run run(name, opt);
  std::string hash = "";
  int code = kExitPass;
  try {
    ExperimentConfig c = run.stage("config", [&] { return configured(opt); });
    hash = config_hash(c, opt);
    code = fn(run, c, out);
  } catch (const StageError& e) {
    err << "[" << e.stage() << "] " << e.what() << "\n";
    code = e.code();
  }
  if (code != kExitConfig || !hash.empty()) run.manifest(hash, code);
  return code;
}

}  // namespace lame
