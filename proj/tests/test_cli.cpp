#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
};

fs::path scratch(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("lame_edge_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Result run(const std::string& args) {
  std::string cmd = std::string(LAME_EDGE_EXE) + " " + args + " 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, f)) out.append(buf, n);
  int st = pclose(f);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

json base_config() {
  std::ifstream in(std::string(LAME_EDGE_CONFIGS) + "/gradient.json");
  return json::parse(in);
}

std::string write_config(const fs::path& dir, const std::string& name, const json& j) {
  fs::path p = dir / (name + ".json");
  std::ofstream(p) << j.dump(2);
  return p.string();
}

json errors_of(const Result& r) {
  json j = json::parse(r.out);
  return j.at("errors");
}

bool mentions(const json& errs, const std::string& field, const std::string& text = "") {
  for (const auto& e : errs)
    if (e["field"].get<std::string>() == field &&
        e["message"].get<std::string>().find(text) != std::string::npos)
      return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Validate, BundledConfigsAreValid) {
  for (const char* n : {"gradient", "homogeneous"}) {
    Result r = run("validate --config " + std::string(LAME_EDGE_CONFIGS) + "/" + n + ".json");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(errors_of(r).empty());
  }
}

TEST(Validate, SmallnessViolationNamed) {
  fs::path d = scratch("small");
  json j = base_config();
  j["ladder"]["rho_tilde_orderm"] = 2;
  Result r = run("validate --config " + write_config(d, "c", j));
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(mentions(errors_of(r), "ladder.rho_tilde_orderm")) << r.out;
}

TEST(Validate, NonDyadicLadderNamed) {
  fs::path d = scratch("dyadic");
  json j = base_config();
  j["ladder"]["N"] = {10, 30};
  Result r = run("validate --config " + write_config(d, "c", j));
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(mentions(errors_of(r), "ladder.N")) << r.out;
}

TEST(Validate, UnknownFieldAndMissingProfile) {
  fs::path d = scratch("schema");
  json j = base_config();
  j["colour"] = "blue";
  j.erase("profile");
  Result r = run("validate --config " + write_config(d, "c", j));
  EXPECT_EQ(r.code, 3);
  json e = errors_of(r);
  EXPECT_GE(e.size(), 2u) << r.out;
  EXPECT_NE(r.out.find("colour"), std::string::npos);
  EXPECT_NE(r.out.find("profile"), std::string::npos);
}

TEST(Validate, MissingFileIsConfigError) {
  Result r = run("validate --config /nonexistent/x.json");
  EXPECT_EQ(r.code, 3);
}

TEST(Run, StrohWritesManifest) {
  fs::path d = scratch("stroh");
  Result r = run("stroh --config " + std::string(LAME_EDGE_CONFIGS) + "/homogeneous.json --out " + d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("eigenvalues: +i x3, -i x3"), std::string::npos) << r.out;
  json m = json::parse(slurp(d / "manifest.json"));
  EXPECT_EQ(m["command"], "stroh");
  EXPECT_EQ(m["exit_code"], 0);
  ASSERT_EQ(m["outputs"].size(), 1u);
  EXPECT_EQ(m["outputs"][0]["file"], "stroh.json");
  EXPECT_EQ(m["outputs"][0]["bytes"].get<std::size_t>(), slurp(d / "stroh.json").size());
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 16u);
}

TEST(Run, ForwardAndGeometry) {
  fs::path d = scratch("fwd");
  std::string cfg = std::string(LAME_EDGE_CONFIGS) + "/gradient.json";
  Result f = run("forward --config " + cfg + " --out " + d.string());
  EXPECT_EQ(f.code, 0) << f.out;
  EXPECT_TRUE(fs::exists(d / "forward.json"));
  Result g = run("geometry-check --config " + cfg + " --out " + d.string());
  EXPECT_EQ(g.code, 0) << g.out;
  EXPECT_TRUE(fs::exists(d / "geometry.json"));
  EXPECT_EQ(g.out.find("FAIL"), std::string::npos) << g.out;
}

TEST(Run, MissingDerivativesStopBeforeForward) {
  fs::path d = scratch("deriv");
  json j = base_config();
  j["profile"]["max_derivative_order"] = 0;
  j["ansatz"]["m"] = {0};
  Result r = run("reconstruct --config " + write_config(d, "c", j) + " --out " + (d / "out").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("[config]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("max_derivative_order"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(d / "out" / "reconstruct.json"));
}

TEST(Run, BadOptionIsConfigError) {
  Result r = run("stroh --config " + std::string(LAME_EDGE_CONFIGS) + "/homogeneous.json --jobs -2");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(run("bogus").code, 3);
}

TEST(Run, ReconstructIsDeterministic) {
  fs::path d = scratch("det");
  json j = base_config();
  j["profile"] = {{"lambda", {2.0}}, {"mu", {1.0}}, {"max_derivative_order", 1}, {"holder_exponent", 0.9}};
  j["ladder"]["N"] = {16, 32, 64, 128};
  j["quadrature"]["nodes"] = 16;
  j["calibrate"] = false;
  std::string cfg = write_config(d, "c", j);
  Result a = run("reconstruct --config " + cfg + " --jobs 3 --out " + (d / "a").string());
  Result b = run("reconstruct --config " + cfg + " --jobs 1 --out " + (d / "b").string());
  EXPECT_TRUE(a.code == 0 || a.code == 2) << a.out;
  EXPECT_EQ(a.code, b.code);
  for (const char* f : {"reconstruct.json", "ladders.csv"})
    EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
  json m = json::parse(slurp(d / "a" / "manifest.json"));
  EXPECT_EQ(m["jobs"], 3);
}
