// Acceptance battery: one PASS/FAIL line per criterion. Criteria 1-13 run in
// process; 14 runs the CLI suite twice and compares every artifact byte for byte.

#include "wiener/acceptance.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace wiener;

namespace {

// wall-clock caps in seconds; 0 = none
const std::map<int, double> kRuntimeCap = {{1, 120.0}, {4, 60.0}, {5, 10.0}, {8, 120.0}};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct Captured {
  int code = -1;
  std::string out;
};

Captured run(const std::string& cmd) {
  Captured c;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) c.out.append(buf, n);
  const int status = pclose(pipe);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

acceptance::Criterion cli_determinism(std::uint64_t seed) {
  acceptance::Criterion c{14, "byte-identical reruns", false, {}, {}};
  const fs::path root = fs::temp_directory_path() / "wiener_acceptance";
  fs::remove_all(root);
  const std::string base = std::string(WIENER_LAB_EXE) + " suite --quick --seed " + std::to_string(seed) + " --out ";
  const auto a = run(base + (root / "a").string());
  const auto b = run(base + (root / "b").string());
  bool same = a.out == b.out && a.code == b.code;
  std::size_t files = 0, bytes = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto other = root / "b" / entry.path().filename();
    const auto x = slurp(entry.path());
    same = same && fs::exists(other) && x == slurp(other);
    ++files;
    bytes += x.size();
  }
  c.pass = same && files > 0 && a.code == 0;
  c.detail = std::to_string(files) + " files / " + std::to_string(bytes) + " bytes " +
             (same ? "identical" : "DIFFER") + ", suite exit " + std::to_string(a.code);
  fs::remove_all(root);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  acceptance::Options o;
  o.seed = 42;
  for (int k = 1; k < argc; ++k)
    if (std::string(argv[k]) == "--quick") o.quick = true;

  int failures = 0;
  for (int id = 1; id < acceptance::kCriteria; ++id) {
    const auto t0 = std::chrono::steady_clock::now();
    acceptance::Criterion c;
    try {
      c = acceptance::run_one(id, o);
    } catch (const std::exception& e) {
      c = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char t[48];
    std::snprintf(t, sizeof t, " [%.2fs", secs);
    c.detail += t;
    if (auto cap = kRuntimeCap.find(id); cap != kRuntimeCap.end()) {
      std::snprintf(t, sizeof t, " < %.0fs", cap->second);
      c.detail += t;
      if (secs >= cap->second) {
        c.pass = false;
        c.detail += " EXCEEDED";
      }
    }
    c.detail += "]";
    failures += !c.pass;
    std::cout << acceptance::format_line(c) << std::endl;
  }
  const auto c14 = cli_determinism(42);
  failures += !c14.pass;
  std::cout << acceptance::format_line(c14) << std::endl;
  std::cout << (failures ? std::to_string(failures) + " criteria FAIL" : std::string("all 14 criteria PASS")) << "\n";
  return failures ? 1 : 0;
}
