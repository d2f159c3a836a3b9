#include "wiener/wiener_lab.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

using namespace wiener;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run lab(const std::string& args) {
  const std::string cmd = std::string(WIENER_LAB_EXE) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("wiener_lab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Io, MatrixRoundTrip) {
  GenParams gp;
  gp.bandwidth = 1;
  const auto A = generate(GenKind::banded_random, Window(2, 2), 3, gp);
  const auto B = io::matrix_from_json(io::json::parse(io::to_json(A).dump()));
  EXPECT_EQ(max_entry_diff(A, B), 0.0);
  EXPECT_THROW(io::matrix_from_json(io::json{{"d", 1}, {"radius", 1}, {"entries", {{5, 0, 1.0, 0.0}}}}),
               ValidationError);
  EXPECT_THROW(io::matrix_from_json(io::json{{"d", 1}}), ValidationError);
}

TEST(Io, SequenceSymbolAndWeightRoundTrip) {
  const Window w(1, 3);
  LatticeSequence c(w);
  c.set(1, cplx(0.25, -2.0));
  const auto c2 = io::sequence_from_json(io::to_json(c));
  EXPECT_EQ(c2(1), c(1));

  const auto a = parse_coeff_list("2@0,1@1");
  EXPECT_EQ(io::coeffs_from_json(io::to_json(a)).coeffs, a.coeffs);

  for (const auto& u : {WeightMatrix::trivial(), WeightMatrix::polynomial(2.0), WeightMatrix::subexponential(0.5, 0.25),
                        WeightMatrix::constant(4.0)})
    EXPECT_EQ(io::weight_from_json(io::to_json(u)).id(), u.id());
  const auto t = WeightMatrix::table(w, Eigen::MatrixXd::Constant(7, 7, 1.5));
  EXPECT_EQ(io::weight_from_json(io::to_json(t)).eval(w, 2, 3), 1.5);
}

TEST(Io, WeightSpecs) {
  EXPECT_EQ(io::parse_weight("polynomial:2").id(), "polynomial(2)");
  EXPECT_EQ(io::parse_weight("subexp:0.5:1").id(), "subexponential(0.5,1)");
  EXPECT_EQ(io::parse_weight("constant:4").id(), "constant(4)");
  EXPECT_EQ(io::parse_weight(R"({"form":"polynomial","alpha":1.5})").id(), "polynomial(1.5)");
  EXPECT_THROW(io::parse_weight("gaussian"), ValidationError);
  EXPECT_THROW(io::parse_weight("polynomial:x"), ValidationError);
  const Window w(1, 2);
  EXPECT_EQ(io::parse_weight_sequence("power:1", w)(0), 3.0);
  EXPECT_EQ(io::parse_weight_sequence("power:1", w).on(Window(1, 3)).window().radius(), 3);
  EXPECT_THROW(io::parse_weight_sequence("stairs", w), ValidationError);
}

TEST(Io, ProfileCsvRoundTrip) {
  DecayProfile h;
  h.d = 1;
  h.h = {1.0, 0.5, 1.0 / 3.0, 0.0};
  const auto back = io::profile_from_csv("# stamp\n" + io::profile_csv(h), 1);
  EXPECT_EQ(back.h, h.h);
  EXPECT_THROW(io::profile_from_csv("a,b\n", 1), ValidationError);
}

TEST(Io, Fnv1aKnownValues) {
  EXPECT_EQ(io::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(io::hex64(io::fnv1a("a")), "af63dc4c8601ec8c");
}

TEST(Cli, NormOfIdentity) {
  const auto dir = scratch("norm");
  ASSERT_EQ(lab("gen --kind identity --d 1 --radius 4 --out " + dir.string()).code, 0);
  const auto r = lab("norm --matrix " + (dir / "matrix.json").string() + " --p 1 --weight trivial");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("beurling=1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("sjostrand=1\n"), std::string::npos);
  EXPECT_NE(r.out.find("schur=1\n"), std::string::npos);
}

TEST(Cli, ToeplitzReciprocal) {
  const auto dir = scratch("recip");
  const auto r = lab("toeplitz recip --coeffs \"2@0,1@1\" --tol 1e-10 --out " + dir.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("astar_norm=1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("b(3)=-0.0625"), std::string::npos) << r.out;
  const auto doc = io::read_json_file((dir / "recip.json").string());
  EXPECT_EQ(doc["schema_version"], io::kSchemaVersion);
  EXPECT_TRUE(doc.contains("config_hash"));
  EXPECT_NEAR(doc["result"]["astar_norm"].get<double>(), 1.0, 1e-10);
  EXPECT_EQ(slurp(dir / "recip.csv").rfind("# schema_version=1 config_hash=", 0), 0u);
}

TEST(Cli, OutputsAreDeterministicAndStamped) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string args = "--seed 7 gen --kind banded_random --d 2 --radius 3 --bandwidth 1";
  ASSERT_EQ(lab(args + " --out " + a.string()).code, 0);
  ASSERT_EQ(lab(args + " --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "matrix.json"), slurp(b / "matrix.json"));
  EXPECT_EQ(slurp(a / "profile.csv"), slurp(b / "profile.csv"));
  const auto doc = io::read_json_file((a / "matrix.json").string());
  EXPECT_EQ(doc["seed"], 7);
  ASSERT_EQ(lab("--seed 8 gen --kind banded_random --d 2 --radius 3 --bandwidth 1 --out " + b.string()).code, 0);
  EXPECT_NE(slurp(a / "matrix.json"), slurp(b / "matrix.json"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(lab("gen --kind banded_random").code, 1);           // seed missing
  EXPECT_EQ(lab("norm --p 1").code, 1);                          // no matrix
  EXPECT_EQ(lab("norm --coeffs 2@0 --p 0.5").code, 1);           // p < 1
  EXPECT_EQ(lab("bogus").code, 1);
  EXPECT_EQ(lab("--tol -1 toeplitz recip --coeffs 2@0").code, 1);
  EXPECT_EQ(lab("invert --coeffs 1@1 --radius 8").code, 2);  // shift: singular on every window
  EXPECT_EQ(lab("toeplitz recip --coeffs \"1@0,-1@1\"").code, 2);
}

TEST(Cli, VerbsRun) {
  const auto dir = scratch("verbs");
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(lab("weights aq --weight power:1 --radius 8 --q 2" + out).code, 0);
  EXPECT_EQ(lab("--seed 1 weights maximal --radius 6 --trials 3" + out).code, 0);
  EXPECT_EQ(lab("stability --coeffs \"2@0,1@1\" --radius 12 --weight power:1" + out).code, 0);
  EXPECT_EQ(lab("--seed 1 stability --coeffs \"2@0,1@1\" --radius 12 --q 3" + out).code, 0);
  EXPECT_EQ(lab("--seed 1 stability cross --coeffs \"2@0,1@1\" --radii 8,16" + out).code, 0);
  EXPECT_EQ(lab("invert --coeffs \"2@0,1@1\" --radius 16" + out).code, 0);
  EXPECT_EQ(lab("leftinv --coeffs \"2@0,1@1\" --radius 8" + out).code, 0);
  EXPECT_EQ(lab("--quick thetafit --weight polynomial:2 --companion constant:4 --p 2" + out).code, 0);
  EXPECT_EQ(lab("radius --coeffs \"0@0,1@1\" --radius 24 --nmax 4" + out).code, 0);
  EXPECT_EQ(lab("toeplitz minmod --coeffs \"2@0,1@1\"" + out).code, 0);
  EXPECT_EQ(lab("toeplitz stability --coeffs \"1@0,-1@1\" --radii 8,16" + out).code, 0);
  for (const char* f : {"aq.json", "maximal.csv", "cross.json", "invert.json", "inverse_profile.csv",
                        "plot_inverse_profile.py", "thetafit.csv", "radius.json", "minmod.json",
                        "toeplitz_stability.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto inv = io::read_json_file((dir / "invert.json").string());
  EXPECT_LT(inv["result"]["residual"].get<double>(), 1e-10);
  const auto st = io::read_json_file((dir / "toeplitz_stability.json").string());
  EXPECT_EQ(st["result"]["verdict"], "degrading");
}
