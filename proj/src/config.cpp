#include "lame/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lame/ansatz.hpp"

namespace lame {

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : InputError([&] {
        std::ostringstream os;
        os << "configuration error";
        for (const auto& i : issues) os << "\n  " << i.field << ": " << i.message;
        return os.str();
      }()),
      issues_(std::move(issues)) {}

namespace {

class Reader {
 public:
  explicit Reader(std::vector<ConfigIssue>& out) : issues_(out) {}
  void fail(const std::string& field, const std::string& msg) { issues_.push_back({field, msg}); }

  void keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      fail(where.empty() ? "<root>" : where, "must be an object");
      return;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok |= it.key() == a;
      if (!ok) fail(join(where, it.key()), "unknown field");
    }
  }

  static std::string join(const std::string& a, const std::string& b) {
    return a.empty() ? b : a + "." + b;
  }

  template <class T>
  bool get(const json& obj, const std::string& where, const char* key, T& out, bool required = false) {
    std::string f = join(where, key);
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) fail(f, "required field missing");
      return false;
    }
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw std::runtime_error("x");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::runtime_error("x");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::runtime_error("x");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::runtime_error("x");
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
          throw std::runtime_error("x");
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw std::runtime_error("x");
        for (const auto& e : v)
          if (!e.is_number()) throw std::runtime_error("x");
      } else if constexpr (std::is_same_v<T, std::vector<int>>) {
        if (!v.is_array()) throw std::runtime_error("x");
        for (const auto& e : v)
          if (!e.is_number_integer()) throw std::runtime_error("x");
      }
      out = v.get<T>();
      return true;
    } catch (const std::exception&) {
      fail(f, std::string("wrong type (expected ") + type_name<T>() + ")");
      return false;
    }
  }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, int>) return "integer";
    if constexpr (std::is_same_v<T, double>) return "number";
    if constexpr (std::is_same_v<T, bool>) return "boolean";
    if constexpr (std::is_same_v<T, std::string>) return "string";
    if constexpr (std::is_same_v<T, std::uint64_t>) return "non-negative integer";
    if constexpr (std::is_same_v<T, std::vector<double>>) return "array of numbers";
    if constexpr (std::is_same_v<T, std::vector<int>>) return "array of integers";
    return "value";
  }
  std::vector<ConfigIssue>& issues_;
};

bool is_dyadic_ladder(const std::vector<int>& N, std::string& why) {
  try {
    check_dyadic(N);
    return true;
  } catch (const InputError& e) {
    why = e.what();
    return false;
  }
}

std::string smallness_message(int m, double p, int rt) {
  double rho = 1.0 / rt;
  std::ostringstream os;
  os << "smallness condition (1-rho)(m+p) >= m+rho fails for rho_tilde = " << rt << ", m = " << m
     << ", p = " << p << ": (1-" << rho << ")(" << m + p << ") = " << (1 - rho) * (m + p)
     << " < " << m + rho;
  return os.str();
}

// Parses into c, recording issues; no exceptions for user errors.
void parse_into(const json& j, ExperimentConfig& c, std::vector<ConfigIssue>& issues) {
  Reader r(issues);
  r.keys(j, "", {"schema_version", "name", "profile", "probes", "ladder", "order_m", "cutoff",
                 "quadrature", "calibrate", "acceptance", "forward", "ansatz", "seed"});
  if (!j.is_object()) return;
  if (r.get(j, "", "schema_version", c.schema_version, true) && c.schema_version != 1)
    r.fail("schema_version", "unsupported version " + std::to_string(c.schema_version) +
                                 " (this tool reads version 1)");
  r.get(j, "", "name", c.name);

  if (!j.contains("profile")) {
    r.fail("profile", "required field missing");
  } else {
    const json& p = j.at("profile");
    r.keys(p, "profile", {"lambda", "mu", "max_derivative_order", "holder_exponent"});
    r.get(p, "profile", "lambda", c.lambda_coeffs, true);
    r.get(p, "profile", "mu", c.mu_coeffs, true);
    r.get(p, "profile", "max_derivative_order", c.max_derivative_order);
    r.get(p, "profile", "holder_exponent", c.holder_exponent);
    if (c.lambda_coeffs.empty()) r.fail("profile.lambda", "needs at least one coefficient");
    if (c.mu_coeffs.empty()) r.fail("profile.mu", "needs at least one coefficient");
    if (c.max_derivative_order < 0)
      r.fail("profile.max_derivative_order", "must be >= 0");
    if (!(c.holder_exponent > 0 && c.holder_exponent < 1))
      r.fail("profile.holder_exponent", "must lie in (0, 1)");
  }

  std::vector<json> amps = {"e3", "omega", "sigma1"};
  if (j.contains("probes")) {
    const json& p = j.at("probes");
    r.keys(p, "probes", {"directions", "amplitudes"});
    if (p.is_object() && p.contains("directions")) {
      const json& d = p.at("directions");
      c.directions.clear();
      if (!d.is_array() || d.empty()) {
        r.fail("probes.directions", "must be a non-empty array of [w1, w2]");
      } else {
        for (std::size_t i = 0; i < d.size(); ++i) {
          std::string f = "probes.directions[" + std::to_string(i) + "]";
          if (!d[i].is_array() || d[i].size() != 2 || !d[i][0].is_number() ||
              !d[i][1].is_number()) {
            r.fail(f, "must be [w1, w2]");
            continue;
          }
          Vec3 w(d[i][0].get<double>(), d[i][1].get<double>(), 0);
          if (std::abs(w.norm() - 1) > 1e-12) r.fail(f, "direction must be a unit vector");
          c.directions.push_back(w);
        }
      }
    }
    if (p.is_object() && p.contains("amplitudes")) {
      const json& a = p.at("amplitudes");
      if (!a.is_array() || a.empty())
        r.fail("probes.amplitudes", "must be a non-empty array");
      else
        amps.assign(a.begin(), a.end());
    }
  }
  c.probe_spec = json::array();
  for (const json& a : amps) c.probe_spec.push_back(a);
  c.probes.clear();
  for (const Vec3& w : c.directions) {
    std::ostringstream tag;
    tag << "w(" << w[0] << "," << w[1] << ")";
    for (std::size_t i = 0; i < amps.size(); ++i) {
      std::string f = "probes.amplitudes[" + std::to_string(i) + "]";
      const json& a = amps[i];
      if (a.is_string()) {
        std::string s = a.get<std::string>();
        if (s == "e3")
          c.probes.push_back({"e3@" + tag.str(), CVec3(0, 0, 1), w});
        else if (s == "omega")
          c.probes.push_back({"omega@" + tag.str(), CVec3(w[0], w[1], 0), w});
        else if (s == "sigma1")
          c.probes.push_back({"sigma1@" + tag.str(), CVec3(w[1], -w[0], 0), w});
        else if (&w == &c.directions.front())
          r.fail(f, "unknown named amplitude '" + s + "' (e3, omega, sigma1)");
      } else if (a.is_object() && a.contains("id") && a.contains("a") && a.at("id").is_string() &&
                 a.at("a").is_array() && a.at("a").size() == 3) {
        CVec3 v;
        bool ok = true;
        for (int k = 0; k < 3; ++k) {
          const json& e = a.at("a")[k];
          if (e.is_number())
            v[k] = e.get<double>();
          else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
            v[k] = cplx(e[0].get<double>(), e[1].get<double>());
          else
            ok = false;
        }
        if (!ok || v.norm() == 0) {
          if (&w == &c.directions.front()) r.fail(f, "amplitude entries must be numbers or [re, im], not all zero");
          continue;
        }
        c.probes.push_back({a.at("id").get<std::string>() + "@" + tag.str(), v, w});
      } else if (&w == &c.directions.front()) {
        r.fail(f, "must be a name or {\"id\": ..., \"a\": [a1, a2, a3]}");
      }
    }
  }

  if (j.contains("ladder")) {
    const json& l = j.at("ladder");
    r.keys(l, "ladder", {"N", "rho_tilde_order0", "rho_tilde_orderm"});
    r.get(l, "ladder", "N", c.N_list);
    r.get(l, "ladder", "rho_tilde_order0", c.rho_tilde_order0);
    r.get(l, "ladder", "rho_tilde_orderm", c.rho_tilde_orderm);
  }
  r.get(j, "", "order_m", c.order_m);

  if (j.contains("cutoff")) {
    const json& k = j.at("cutoff");
    r.keys(k, "cutoff", {"kind", "sigma"});
    std::string kind = to_string(c.cutoff);
    if (r.get(k, "cutoff", "kind", kind)) {
      try {
        c.cutoff = cutoff_kind_from_string(kind);
      } catch (const InputError&) {
        r.fail("cutoff.kind", "unknown cutoff '" + kind + "' (gaussian, bump)");
      }
    }
    r.get(k, "cutoff", "sigma", c.cutoff_sigma);
    if (!(c.cutoff_sigma > 0)) r.fail("cutoff.sigma", "must be positive");
  }

  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    r.keys(q, "quadrature", {"nodes", "tail_tol", "ode_tol"});
    r.get(q, "quadrature", "nodes", c.quad.nodes);
    r.get(q, "quadrature", "tail_tol", c.quad.tail_tol);
    r.get(q, "quadrature", "ode_tol", c.quad.ode_tol);
    if (c.quad.nodes < 8) r.fail("quadrature.nodes", "must be >= 8");
    if (!(c.quad.tail_tol > 0 && c.quad.tail_tol < 1)) r.fail("quadrature.tail_tol", "must lie in (0, 1)");
    if (!(c.quad.ode_tol > 0 && c.quad.ode_tol < 1)) r.fail("quadrature.ode_tol", "must lie in (0, 1)");
  }
  r.get(j, "", "calibrate", c.calibrate);

  if (j.contains("acceptance")) {
    const json& a = j.at("acceptance");
    r.keys(a, "acceptance", {"order0_rel", "orderm_rel", "calibrated_rel", "null_noise_factor"});
    r.get(a, "acceptance", "order0_rel", c.acceptance.order0_rel);
    r.get(a, "acceptance", "orderm_rel", c.acceptance.orderm_rel);
    r.get(a, "acceptance", "calibrated_rel", c.acceptance.calibrated_rel);
    r.get(a, "acceptance", "null_noise_factor", c.acceptance.null_noise_factor);
  }

  if (j.contains("forward")) {
    const json& f = j.at("forward");
    r.keys(f, "forward", {"k"});
    if (f.is_object() && f.contains("k")) {
      const json& k = f.at("k");
      c.forward_k.clear();
      if (!k.is_array() || k.empty()) r.fail("forward.k", "must be a non-empty array of [k1, k2]");
      else
        for (std::size_t i = 0; i < k.size(); ++i) {
          if (!k[i].is_array() || k[i].size() != 2 || !k[i][0].is_number() || !k[i][1].is_number()) {
            r.fail("forward.k[" + std::to_string(i) + "]", "must be [k1, k2]");
            continue;
          }
          Vec2 v(k[i][0].get<double>(), k[i][1].get<double>());
          if (v.norm() == 0) r.fail("forward.k[" + std::to_string(i) + "]", "must be nonzero");
          c.forward_k.push_back(v);
        }
    }
  }
  if (j.contains("ansatz")) {
    const json& a = j.at("ansatz");
    r.keys(a, "ansatz", {"N", "m"});
    r.get(a, "ansatz", "N", c.ansatz_N);
    r.get(a, "ansatz", "m", c.ansatz_m);
  }
  r.get(j, "", "seed", c.seed);
}

void cross_checks(const ExperimentConfig& c, std::vector<ConfigIssue>& issues) {
  auto fail = [&](const std::string& f, const std::string& m) { issues.push_back({f, m}); };
  std::string why;
  if (!is_dyadic_ladder(c.N_list, why)) fail("ladder.N", why);
  if (!is_dyadic_ladder(c.ansatz_N, why)) fail("ansatz.N", why);
  if (c.rho_tilde_order0 < 2) fail("ladder.rho_tilde_order0", "must be an integer >= 2");
  else if (!smallness_holds(0, c.holder_exponent, c.rho_tilde_order0))
    fail("ladder.rho_tilde_order0", smallness_message(0, c.holder_exponent, c.rho_tilde_order0));
  if (c.order_m < 0 || c.order_m > 2) fail("order_m", "must be 0, 1 or 2");
  if (c.order_m > c.max_derivative_order)
    fail("order_m", "order " + std::to_string(c.order_m) +
                        " needs profile derivatives up to that order (max_derivative_order = " +
                        std::to_string(c.max_derivative_order) + ")");
  if (c.order_m >= 1) {
    if (c.rho_tilde_orderm < 2) fail("ladder.rho_tilde_orderm", "must be an integer >= 2");
    else if (!smallness_holds(c.order_m, c.holder_exponent, c.rho_tilde_orderm))
      fail("ladder.rho_tilde_orderm",
           smallness_message(c.order_m, c.holder_exponent, c.rho_tilde_orderm));
  }
  for (std::size_t i = 0; i < c.ansatz_m.size(); ++i) {
    int m = c.ansatz_m[i];
    if (m < 0 || m > c.max_derivative_order)
      fail("ansatz.m[" + std::to_string(i) + "]",
           "must lie in [0, max_derivative_order = " + std::to_string(c.max_derivative_order) + "]");
  }
  if (c.probes.size() < 2) fail("probes", "battery needs at least two probes");
  if (c.lambda_coeffs.empty() || c.mu_coeffs.empty()) return;
  try {
    LameProfile p = c.profile();
    AdmissibilityReport rep = validate_admissibility(p, kHmax);
    if (!rep.passed) {
      std::ostringstream os;
      os << "profile is not strongly convex on [0, " << kHmax << "]: min mu = " << rep.min_mu
         << " at y3 = " << rep.min_mu_depth << ", min 3 lambda + 2 mu = " << rep.min_3l2m
         << " at y3 = " << rep.min_3l2m_depth;
      fail("profile", os.str());
    }
  } catch (const std::exception& e) {
    fail("profile", e.what());
  }
}

}  // namespace

LameProfile ExperimentConfig::profile() const {
  return LameProfile::polynomial(lambda_coeffs, mu_coeffs, max_derivative_order,
                                 holder_exponent, name);
}

CutoffProfile ExperimentConfig::cutoff_profile() const {
  return CutoffProfile(cutoff, cutoff_sigma);
}

ReconstructionSettings ExperimentConfig::reconstruction_settings() const {
  ReconstructionSettings s;
  s.order0_probes = probes;
  s.orderm_probes = probes;
  s.N_list = N_list;
  s.m = order_m;
  s.rho_tilde_order0 = rho_tilde_order0;
  s.rho_tilde_orderm = rho_tilde_orderm;
  s.cutoff = cutoff_profile();
  s.quad = quad;
  s.calibrate = calibrate;
  return s;
}

std::vector<ConfigIssue> validate_config_json(const json& j) {
  std::vector<ConfigIssue> issues;
  ExperimentConfig c;
  parse_into(j, c, issues);
  if (issues.empty()) cross_checks(c, issues);
  return issues;
}

ExperimentConfig parse_config(const json& j) {
  std::vector<ConfigIssue> issues;
  ExperimentConfig c;
  parse_into(j, c, issues);
  if (issues.empty()) cross_checks(c, issues);
  if (!issues.empty()) throw ConfigError(issues);
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::vector<ConfigIssue>{{"<file>", "cannot read '" + path + "'"}});
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::vector<ConfigIssue>{{"<file>", std::string("invalid JSON: ") + e.what()}});
  }
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["profile"] = {{"lambda", c.lambda_coeffs},
                  {"mu", c.mu_coeffs},
                  {"max_derivative_order", c.max_derivative_order},
                  {"holder_exponent", c.holder_exponent}};
  json dirs = json::array();
  for (const Vec3& w : c.directions) dirs.push_back({w[0], w[1]});
  j["probes"] = {{"directions", dirs}, {"amplitudes", c.probe_spec}};
  j["ladder"] = {{"N", c.N_list},
                 {"rho_tilde_order0", c.rho_tilde_order0},
                 {"rho_tilde_orderm", c.rho_tilde_orderm}};
  j["order_m"] = c.order_m;
  j["cutoff"] = {{"kind", to_string(c.cutoff)}, {"sigma", c.cutoff_sigma}};
  j["quadrature"] = {{"nodes", c.quad.nodes}, {"tail_tol", c.quad.tail_tol},
                     {"ode_tol", c.quad.ode_tol}};
  j["calibrate"] = c.calibrate;
  j["acceptance"] = {{"order0_rel", c.acceptance.order0_rel},
                     {"orderm_rel", c.acceptance.orderm_rel},
                     {"calibrated_rel", c.acceptance.calibrated_rel},
                     {"null_noise_factor", c.acceptance.null_noise_factor}};
  json ks = json::array();
  for (const Vec2& k : c.forward_k) ks.push_back({k[0], k[1]});
  j["forward"] = {{"k", ks}};
  j["ansatz"] = {{"N", c.ansatz_N}, {"m", c.ansatz_m}};
  j["seed"] = c.seed;
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace lame
