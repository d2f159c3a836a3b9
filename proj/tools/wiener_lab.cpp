// wiener_lab: command-line front end for the localized-matrix lab.
//
// Every verb prints a short key=value summary (or the full JSON document with
// --json) and, when --out is given, writes JSON/CSV artifacts plus plot
// scripts into that directory. Exit codes: 0 ok, 1 invalid input, 2 numerical
// failure.

#include "wiener/acceptance.hpp"
#include "wiener/wiener_lab.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace wiener;
using io::json;

struct Globals {
  std::optional<std::uint64_t> seed;
  double tol = 1e-12;
  std::string out;
  int threads = 1;
  bool quick = false;
  bool print_json = false;
};

// --- config hashing and output ---------------------------------------------

void collect_config(const CLI::App* app, json& cfg) {
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_name();
    if (name.empty() || name == "--help" || name == "--out" || name == "--json") continue;
    if (opt->count() > 0) cfg[name] = opt->results();
    else if (!opt->get_default_str().empty()) cfg[name] = opt->get_default_str();
  }
  for (const CLI::App* sub : app->get_subcommands()) {
    json inner = json::object();
    collect_config(sub, inner);
    cfg[sub->get_name()] = std::move(inner);
  }
}

class Output {
 public:
  Output(const Globals& g, std::string command, json config)
      : g_(g), command_(std::move(command)), config_(std::move(config)) {
    hash_ = io::hex64(io::fnv1a(command_ + "\n" + config_.dump()));
  }

  std::uint64_t seed() const { return g_.seed.value_or(0); }

  json envelope(json result) const {
    json doc;
    doc["schema_version"] = io::kSchemaVersion;
    doc["command"] = command_;
    doc["config_hash"] = hash_;
    doc["seed"] = g_.seed ? json(*g_.seed) : json(nullptr);
    doc["config"] = config_;
    doc["result"] = std::move(result);
    return doc;
  }

  void json_file(const std::string& stem, json result) {
    const json doc = envelope(std::move(result));
    if (!g_.out.empty()) io::write_text_atomic(std::filesystem::path(g_.out) / (stem + ".json"), doc.dump(2) + "\n");
    if (g_.print_json) std::cout << doc.dump(2) << "\n";
  }

  void csv_file(const std::string& stem, const std::string& body) {
    if (g_.out.empty()) return;
    io::write_text_atomic(std::filesystem::path(g_.out) / (stem + ".csv"), stamp("# ") + body);
  }

  /// Matplotlib script plotting column y against x from <stem>.csv.
  void plot_script(const std::string& stem, const std::string& x, const std::string& y, bool logy,
                   const std::string& title) {
    if (g_.out.empty()) return;
    std::string py = stamp("# ");
    py += "import csv, sys\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n";
    py += "rows = [r for r in csv.DictReader(l for l in open('" + stem + ".csv') if not l.startswith('#'))]\n";
    py += "xs = [float(r['" + x + "']) for r in rows]\n";
    py += "ys = [float(r['" + y + "']) for r in rows]\n";
    py += "plt.plot(xs, ys, 'o-')\n";
    if (logy) py += "plt.yscale('log')\n";
    py += "plt.xlabel('" + x + "')\nplt.ylabel('" + y + "')\nplt.title('" + title + "')\n";
    py += "plt.savefig(sys.argv[1] if len(sys.argv) > 1 else '" + stem + ".png', dpi=120)\n";
    io::write_text_atomic(std::filesystem::path(g_.out) / ("plot_" + stem + ".py"), py);
  }

  /// Summary lines round to 12 digits; the JSON artifacts keep full precision.
  void line(const std::string& key, double v) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    if (!g_.print_json) std::cout << key << "=" << buf << "\n";
  }
  void line(const std::string& key, const std::string& v) const {
    if (!g_.print_json) std::cout << key << "=" << v << "\n";
  }

 private:
  std::string stamp(const std::string& prefix) const {
    return prefix + "schema_version=" + std::to_string(io::kSchemaVersion) + " config_hash=" + hash_ +
           " seed=" + (g_.seed ? std::to_string(*g_.seed) : std::string("none")) + "\n";
  }

  const Globals& g_;
  std::string command_;
  json config_;
  std::string hash_;
};

std::uint64_t require_seed(const Globals& g, const std::string& why) {
  if (!g.seed) throw ValidationError("--seed is required for " + why);
  return *g.seed;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : io::detail::split(text, ',')) {
    const double v = io::detail::to_double(s);
    if (v != std::floor(v)) throw ValidationError("not an integer: '" + s + "'");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

double parse_q(const std::string& s) { return s == "inf" ? kInf : io::detail::to_double(s); }

/// "1:trivial,2:power:1,4:trivial"
std::vector<StabilityPair> parse_pairs(const std::string& text, const Window& w) {
  std::vector<StabilityPair> out;
  for (const auto& item : io::detail::split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("pair '" + item + "' must look like q:weight");
    out.push_back({parse_q(item.substr(0, colon)), io::parse_weight_sequence(item.substr(colon + 1), w)});
  }
  return out;
}

SymbolCoeffs load_coeffs(const std::string& text) {
  if (!text.empty() && (text.front() == '{' || text.front() == '@')) {
    auto j = io::read_json_arg(text);
    if (j.contains("result") && j["result"].contains("coeffs")) j = j["result"];
    return io::coeffs_from_json(j);
  }
  return parse_coeff_list(text);
}

struct MatrixSource {
  std::string matrix;
  std::string coeffs;
  int radius = 16;

  void add(CLI::App* app) {
    app->add_option("--matrix", matrix, "matrix JSON (path, @path or inline)");
    app->add_option("--coeffs", coeffs, "Toeplitz coefficients, e.g. \"2@0,1@1\" or JSON");
    app->add_option("--radius", radius, "window radius when --coeffs is used")->capture_default_str();
  }

  LocalizedMatrix load() const {
    if (!matrix.empty() && !coeffs.empty()) throw ValidationError("give either --matrix or --coeffs, not both");
    if (!matrix.empty()) {
      auto j = io::read_json_arg(matrix.front() == '{' || matrix.front() == '@' ? matrix : "@" + matrix);
      if (j.contains("result") && j["result"].contains("matrix")) j = j["result"]["matrix"];
      return io::matrix_from_json(j);
    }
    if (!coeffs.empty()) {
      const auto a = load_coeffs(coeffs);
      return toeplitz_matrix(a, Window(a.d, radius));
    }
    throw ValidationError("a matrix is required: --matrix or --coeffs");
  }
};

json stability_json(const StabilityReport& r) {
  return json{{"q", r.q},
              {"weight", r.weight_id},
              {"radius", r.radius},
              {"lower", r.lower},
              {"upper", r.upper},
              {"verdict", to_string(r.verdict)},
              {"method", r.method},
              {"lower_certified", r.lower_certified},
              {"probe_margin", r.probe_margin}};
}

std::string brackets_csv(const std::vector<StabilityReport>& rows) {
  std::string csv = "radius,q,weight,lower,upper,method\n";
  for (const auto& r : rows)
    csv += std::to_string(r.radius) + "," + io::fmt(r.q) + "," + r.weight_id + "," + io::fmt(r.lower) + "," +
           io::fmt(r.upper) + "," + r.method + "\n";
  return csv;
}

json modulus_json(const MinModulus& m) {
  return json{{"min", m.min},         {"argmin", m.argmin},         {"max", m.max},
              {"slack", m.slack},     {"certified", m.certified},   {"vanishing", m.vanishing},
              {"grid", m.G}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized matrices: norms, weights, stability and inversion"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "seed for randomized commands");
  app.add_option("--tol", g.tol, "numerical tolerance")->capture_default_str();
  app.add_option("--out", g.out, "output directory for JSON/CSV artifacts");
  app.add_option("--threads", g.threads, "worker threads (results do not depend on it)")->capture_default_str();
  app.add_flag("--quick", g.quick, "smaller problem sizes");
  app.add_flag("--json", g.print_json, "print the full JSON document instead of the summary");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a matrix on a window");
  std::string gen_kind = "identity", gen_coeffs;
  int gen_d = 1, gen_radius = 8;
  GenParams gp;
  gen->add_option("--kind", gen_kind, "identity|shift|banded_random|polynomial_decay_random|toeplitz")
      ->capture_default_str();
  gen->add_option("--d", gen_d)->capture_default_str();
  gen->add_option("--radius", gen_radius)->capture_default_str();
  gen->add_option("--bandwidth", gp.bandwidth)->capture_default_str();
  gen->add_option("--amplitude", gp.amplitude)->capture_default_str();
  gen->add_option("--alpha", gp.alpha)->capture_default_str();
  gen->add_option("--axis", gp.shift_axis)->capture_default_str();
  gen->add_option("--coeffs", gen_coeffs, "Toeplitz coefficients");

  // norm
  auto* norm = app.add_subcommand("norm", "Beurling, Sjostrand, Schur and Jaffard norms");
  MatrixSource norm_src;
  norm_src.add(norm);
  double norm_p = 1.0;
  std::string norm_weight = "trivial";
  norm->add_option("--p", norm_p)->capture_default_str();
  norm->add_option("--weight", norm_weight, "trivial|polynomial:a|subexp:delta:tau|constant:c|JSON")
      ->capture_default_str();

  // weights aq | maximal
  auto* weights = app.add_subcommand("weights", "Muckenhoupt weights and the maximal function");
  weights->require_subcommand(1);
  auto* aq = weights->add_subcommand("aq", "scanned A_q bound of a weight sequence");
  std::string aq_weight = "trivial";
  int aq_d = 1, aq_radius = 16, aq_cap = 0, aq_trials = 0;
  std::string aq_q = "2";
  aq->add_option("--weight", aq_weight, "trivial|power:a|JSON table")->capture_default_str();
  aq->add_option("--d", aq_d)->capture_default_str();
  aq->add_option("--radius", aq_radius)->capture_default_str();
  aq->add_option("--q", aq_q)->capture_default_str();
  aq->add_option("--ncap", aq_cap, "largest cube side scanned (0: min(side, 32))")->capture_default_str();
  aq->add_option("--trials", aq_trials, "random checks of the cube-average inequality")->capture_default_str();

  auto* maximal = weights->add_subcommand("maximal", "discrete maximal function");
  std::string max_seq, max_weight = "trivial", max_q = "2";
  int max_d = 1, max_radius = 8, max_trials = 0;
  maximal->add_option("--sequence", max_seq, "sequence JSON; default is the delta at 0");
  maximal->add_option("--d", max_d)->capture_default_str();
  maximal->add_option("--radius", max_radius)->capture_default_str();
  maximal->add_option("--weight", max_weight)->capture_default_str();
  maximal->add_option("--q", max_q)->capture_default_str();
  maximal->add_option("--trials", max_trials, "random weak-type checks")->capture_default_str();

  // stability [cross]
  auto* stab = app.add_subcommand("stability", "l^q_w stability bracket");
  stab->require_subcommand(0, 1);
  MatrixSource stab_src;
  stab_src.add(stab);
  std::string stab_q = "2", stab_weight = "trivial";
  int stab_band = -1, stab_trials = 32;
  stab->add_option("--q", stab_q)->capture_default_str();
  stab->add_option("--weight", stab_weight)->capture_default_str();
  stab->add_option("--band", stab_band, "interior probe margin (-1: twice the bandwidth)")->capture_default_str();
  stab->add_option("--trials", stab_trials)->capture_default_str();

  auto* cross = stab->add_subcommand("cross", "verdicts across (q, w) pairs over growing windows");
  std::string cross_coeffs, cross_radii = "16,32,64", cross_pairs = "1:trivial,2:trivial,2:power:1,4:trivial";
  cross->add_option("--coeffs", cross_coeffs, "Toeplitz coefficients")->required();
  cross->add_option("--radii", cross_radii)->capture_default_str();
  cross->add_option("--pairs", cross_pairs)->capture_default_str();

  // invert / leftinv
  auto* inv = app.add_subcommand("invert", "Neumann-series inverse");
  MatrixSource inv_src;
  inv_src.add(inv);
  double inv_p = 1.0;
  std::string inv_weight = "trivial";
  int inv_kmax = 100000;
  inv->add_option("--p", inv_p, "norm reported for the inverse")->capture_default_str();
  inv->add_option("--weight", inv_weight)->capture_default_str();
  inv->add_option("--kmax", inv_kmax)->capture_default_str();

  auto* linv = app.add_subcommand("leftinv", "left inverse (A*A)^{-1} A*");
  MatrixSource linv_src;
  linv_src.add(linv);

  // thetafit
  auto* theta = app.add_subcommand("thetafit", "fit D t^theta to inf_N (A_N + B_N t)");
  std::string th_weight = "polynomial:2", th_comp;
  double th_p = 2.0, th_tmax = 1e6;
  int th_d = 1, th_nmax = 0, th_tcount = 61;
  theta->add_option("--weight", th_weight)->capture_default_str();
  theta->add_option("--companion", th_comp, "companion weight v (default from the weight)");
  theta->add_option("--p", th_p)->capture_default_str();
  theta->add_option("--d", th_d)->capture_default_str();
  theta->add_option("--nmax", th_nmax, "largest N (0: 2000, 400 with --quick)")->capture_default_str();
  theta->add_option("--tmax", th_tmax)->capture_default_str();
  theta->add_option("--tcount", th_tcount)->capture_default_str();

  // radius
  auto* rad = app.add_subcommand("radius", "Beurling norms of powers against the l2 spectral radius");
  MatrixSource rad_src;
  rad_src.add(rad);
  double rad_p = 1.0;
  std::string rad_weight = "trivial";
  int rad_nmax = 16;
  rad->add_option("--p", rad_p)->capture_default_str();
  rad->add_option("--weight", rad_weight)->capture_default_str();
  rad->add_option("--nmax", rad_nmax)->capture_default_str();

  // toeplitz minmod | recip | stability
  auto* toe = app.add_subcommand("toeplitz", "Toeplitz symbols");
  toe->require_subcommand(1);
  std::string toe_coeffs;
  auto* minmod = toe->add_subcommand("minmod", "certified minimum modulus of the symbol");
  int mm_grid = 0;
  minmod->add_option("--coeffs", toe_coeffs)->required();
  minmod->add_option("--grid", mm_grid, "grid size per axis (0: refine until decided)")->capture_default_str();
  auto* recip = toe->add_subcommand("recip", "Fourier coefficients of 1/a");
  recip->add_option("--coeffs", toe_coeffs)->required();
  auto* tstab = toe->add_subcommand("stability", "symbol criterion with bracket corroboration");
  std::string ts_q = "2", ts_weight = "trivial", ts_radii = "16,32,64";
  tstab->add_option("--coeffs", toe_coeffs)->required();
  tstab->add_option("--q", ts_q)->capture_default_str();
  tstab->add_option("--weight", ts_weight)->capture_default_str();
  tstab->add_option("--radii", ts_radii)->capture_default_str();

  // suite
  auto* suite = app.add_subcommand("suite", "acceptance battery with a pass/fail table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (seed_opt->count() > 0) g.seed = seed_value;
    if (!(g.tol > 0.0)) throw ValidationError("--tol must be > 0");
    if (g.threads < 1) throw ValidationError("--threads must be >= 1");

    std::string command;
    for (const CLI::App* a = app.get_subcommands().front();;) {
      command += (command.empty() ? "" : " ") + a->get_name();
      if (a->get_subcommands().empty()) break;
      a = a->get_subcommands().front();
    }
    json config = json::object();
    collect_config(&app, config);
    Output out(g, command, config);

    if (gen->parsed()) {
      gp.coeffs.d = gen_d;
      const auto kind = parse_gen_kind(gen_kind);
      if (kind == GenKind::toeplitz_from_coeffs) gp.coeffs = load_coeffs(gen_coeffs);
      const bool random = kind == GenKind::banded_random || kind == GenKind::polynomial_decay_random;
      const std::uint64_t seed = random ? require_seed(g, "random generators") : out.seed();
      const auto A = generate(kind, Window(gen_d, gen_radius), seed, gp);
      out.json_file("matrix", json{{"kind", to_string(kind)}, {"matrix", io::to_json(A)}});
      out.csv_file("profile", io::profile_csv(decay_profile(A)));
      out.line("size", double(A.size()));
      out.line("nonzeros", double(A.entries().size()));
      return 0;
    }

    if (norm->parsed()) {
      const auto A = norm_src.load();
      const auto u = io::parse_weight(norm_weight);
      const auto r = norm_report(A, norm_p, u);
      const auto prof = decay_profile(A, u);
      out.json_file("norm", json{{"p", r.p},
                                 {"weight", r.weight_id},
                                 {"beurling", r.beurling},
                                 {"sjostrand", r.sjostrand},
                                 {"schur", r.schur},
                                 {"jaffard", r.jaffard},
                                 {"effective_bandwidth", effective_bandwidth(A)},
                                 {"profile", prof.h}});
      out.csv_file("profile", io::profile_csv(prof));
      out.plot_script("profile", "n", "h", true, "decay profile");
      out.line("beurling", r.beurling);
      out.line("sjostrand", r.sjostrand);
      out.line("schur", r.schur);
      out.line("jaffard", r.jaffard);
      return 0;
    }

    if (aq->parsed()) {
      const Window win(aq_d, aq_radius);
      const auto w = io::parse_weight_sequence(aq_weight, win);
      const double q = parse_q(aq_q);
      const int cap = aq_cap > 0 ? aq_cap : default_aq_cap(win);
      const auto r = aq_bound(w, q, cap);
      json res{{"weight", w.id()},          {"q", r.q},
               {"bound", r.bound},          {"argmax_corner", r.argmax_corner},
               {"argmax_N", r.argmax_N},    {"N_cap", r.N_cap},
               {"cubes_scanned", r.cubes_scanned}};
      out.line("aq", r.bound);
      if (aq_trials > 0) {
        const auto chk = aq_characterization_check(w, q, r, aq_trials, require_seed(g, "--trials"));
        res["check"] = json{{"trials", chk.trials}, {"worst_margin", chk.worst_margin},
                            {"worst_relative", chk.worst_relative}};
        out.line("worst_margin", chk.worst_margin);
      }
      out.json_file("aq", res);
      return 0;
    }

    if (maximal->parsed()) {
      LatticeSequence c = max_seq.empty()
                              ? LatticeSequence::delta(Window(max_d, max_radius), Index(max_d, 0))
                              : io::sequence_from_json(io::read_json_arg(max_seq));
      const Window& win = c.window();
      const auto Mc = maximal_values(c);
      const auto w = io::parse_weight_sequence(max_weight, win);
      const double q = parse_q(max_q);
      const auto single = maximal_weak_type_single(c, w, q);
      json res{{"weight", w.id()},
               {"q", q},
               {"sequence", io::to_json(c)},
               {"maximal", std::vector<double>(Mc.data(), Mc.data() + Mc.size())},
               {"weak_constant", single.weak_constant},
               {"strong_ratio", single.strong_ratio}};
      std::string csv = "position,";
      for (int a = 0; a < win.dim(); ++a) csv += "i" + std::to_string(a + 1) + ",";
      csv += "abs_c,Mc\n";
      for (std::size_t k = 0; k < win.size(); ++k) {
        csv += std::to_string(k) + ",";
        for (int v : win.index(k)) csv += std::to_string(v) + ",";
        csv += io::fmt(std::abs(c(k))) + "," + io::fmt(Mc(static_cast<Eigen::Index>(k))) + "\n";
      }
      if (max_trials > 0) {
        const auto rep = maximal_weak_type_check(w, q, max_trials, require_seed(g, "--trials"));
        res["random"] = json{{"trials", rep.trials}, {"weak_constant", rep.weak_constant},
                             {"strong_ratio", rep.strong_ratio}};
      }
      out.json_file("maximal", res);
      out.csv_file("maximal", csv);
      if (win.dim() == 1) out.plot_script("maximal", "i1", "Mc", true, "maximal function");
      out.line("weak_constant", single.weak_constant);
      out.line("strong_ratio", single.strong_ratio);
      return 0;
    }

    if (cross->parsed()) {
      const auto a = load_coeffs(cross_coeffs);
      const auto radii = parse_int_list(cross_radii);
      const auto pairs = parse_pairs(cross_pairs, Window(a.d, radii.front()));
      BracketOptions opt;
      opt.trials = stab_trials;
      if (stab_band >= 0) opt.band = stab_band;
      bool sampled = false;
      for (const auto& pr : pairs) sampled = sampled || pr.q != 2.0;
      opt.seed = sampled ? require_seed(g, "q != 2 brackets") : out.seed();
      const auto rep = cross_stability_verdicts([&](const Window& w) { return toeplitz_matrix(a, w); }, a.d,
                                                radii, pairs, opt);
      json rows = json::array();
      std::vector<StabilityReport> all;
      auto pair_json = [&](const PairVerdict& pv) {
        json b = json::array();
        for (const auto& r : pv.brackets) b.push_back(stability_json(r));
        return json{{"q", pv.q}, {"weight", pv.weight_id}, {"decay_exponent", pv.decay_exponent},
                    {"verdict", to_string(pv.verdict)}, {"brackets", b}};
      };
      for (const auto& pv : rep.pairs) {
        rows.push_back(pair_json(pv));
        all.insert(all.end(), pv.brackets.begin(), pv.brackets.end());
        out.line("verdict[q=" + io::fmt(pv.q) + "," + pv.weight_id + "]", to_string(pv.verdict));
      }
      out.json_file("cross", json{{"radii", rep.radii},
                                  {"symbol", io::to_json(a)},
                                  {"reference", pair_json(rep.reference)},
                                  {"pairs", rows},
                                  {"consistent", rep.consistent}});
      out.csv_file("cross", brackets_csv(all));
      out.line("consistent", rep.consistent ? "true" : "false");
      return 0;
    }

    if (stab->parsed()) {
      const auto A = stab_src.load();
      const double q = parse_q(stab_q);
      const auto w = io::parse_weight_sequence(stab_weight, A.window());
      BracketOptions opt;
      opt.trials = stab_trials;
      if (stab_band >= 0) opt.band = stab_band;
      opt.seed = q != 2.0 ? require_seed(g, "q != 2 brackets") : out.seed();
      const auto r = stability_bracket(A, q, w, opt);
      out.json_file("stability", stability_json(r));
      out.csv_file("stability", brackets_csv({r}));
      out.line("lower", r.lower);
      out.line("upper", r.upper);
      out.line("verdict", to_string(r.verdict));
      return 0;
    }

    if (inv->parsed()) {
      const auto A = inv_src.load();
      InvertOptions opt;
      opt.tol = g.tol;
      opt.K_max = inv_kmax;
      opt.p = inv_p;
      opt.u = io::parse_weight(inv_weight);
      auto [Ainv, r] = wiener_invert(A, opt);
      json res{{"C1", r.C1},
               {"C2", r.C2},
               {"r0", r.r0},
               {"bracket_method", r.bracket_method},
               {"terms_used", r.terms_used},
               {"series_residual", r.series_residual},
               {"residual", r.residual},
               {"left_residual", r.left_residual},
               {"contraction", r.contraction},
               {"partial", r.partial},
               {"inverse_beurling_norm", r.inverse_beurling_norm},
               {"inverse_profile", r.inverse_profile.h},
               {"inverse", io::to_json(Ainv)}};
      out.json_file("invert", res);
      out.csv_file("inverse_profile", io::profile_csv(r.inverse_profile));
      out.plot_script("inverse_profile", "n", "h", true, "inverse decay profile");
      std::string hist = "term,series_residual\n";
      for (std::size_t k = 0; k < r.residual_history.size(); ++k)
        hist += std::to_string(k + 1) + "," + io::fmt(r.residual_history[k]) + "\n";
      out.csv_file("residual_history", hist);
      out.plot_script("residual_history", "term", "series_residual", true, "Neumann series residual");
      out.line("terms_used", double(r.terms_used));
      out.line("residual", r.residual);
      out.line("inverse_beurling_norm", r.inverse_beurling_norm);
      if (r.partial) {
        std::cerr << "error: series residual " << io::fmt(r.series_residual) << " above tolerance after "
                  << r.terms_used << " terms\n";
        return 2;
      }
      return 0;
    }

    if (linv->parsed()) {
      const auto A = linv_src.load();
      InversionReport r;
      const auto B = left_inverse(A, std::max(g.tol, 1e-10), &r);
      const double res = max_entry_diff(multiply(B, A), LocalizedMatrix::identity(A.window()));
      out.json_file("leftinv", json{{"residual", res}, {"terms_used", r.terms_used}, {"gram_C1", r.C1},
                                    {"gram_C2", r.C2}, {"left_inverse", io::to_json(B)}});
      out.csv_file("left_inverse_profile", io::profile_csv(decay_profile(B)));
      out.line("residual", res);
      return 0;
    }

    if (theta->parsed()) {
      const auto u = io::parse_weight(th_weight);
      const auto v = th_comp.empty() ? default_companion(u, th_p) : io::parse_weight(th_comp);
      const int nmax = th_nmax > 0 ? th_nmax : (g.quick ? 400 : 2000);
      const auto fit = theta_fit(u, v, th_p, th_d, nmax, log_grid(1.0, th_tmax, th_tcount));
      json res{{"weight", u.id()},        {"companion", v.id()},         {"p", th_p},
               {"d", th_d},               {"N_max", nmax},               {"ok", fit.ok},
               {"reason", fit.reason},    {"D", fit.ok ? json(fit.D) : json(nullptr)},
               {"theta", fit.ok ? json(fit.theta) : json(nullptr)},
               {"B_tail_bound", fit.B_tail_bound}, {"exact_cut", fit.exact_cut}};
      std::string csv = "t,min_value,argmin_N,margin\n";
      for (std::size_t k = 0; k < fit.t_grid.size(); ++k)
        csv += io::fmt(fit.t_grid[k]) + "," + io::fmt(fit.min_values[k]) + "," + std::to_string(fit.argmin_N[k]) +
               "," + (k < fit.margins.size() ? io::fmt(fit.margins[k]) : std::string("")) + "\n";
      out.json_file("thetafit", res);
      out.csv_file("thetafit", csv);
      out.plot_script("thetafit", "t", "min_value", true, "inf_N (A_N + B_N t)");
      if (!fit.ok) {
        std::cerr << "error: " << fit.reason << "\n";
        return 2;
      }
      out.line("theta", fit.theta);
      out.line("D", fit.D);
      return 0;
    }

    if (rad->parsed()) {
      const auto A = rad_src.load();
      const auto r = brandenburg_radii(A, rad_p, io::parse_weight(rad_weight), rad_nmax);
      std::string csv = "n,beurling_root,l2_root\n";
      for (std::size_t k = 0; k < r.roots.size(); ++k)
        csv += std::to_string(k + 1) + "," + io::fmt(r.roots[k]) + "," + io::fmt(r.l2_roots[k]) + "\n";
      out.json_file("radius", json{{"roots", r.roots}, {"l2_roots", r.l2_roots}, {"rho_estimate", r.rho_estimate},
                                   {"gap", r.gap}, {"start_radius", r.start_radius}});
      out.csv_file("radius", csv);
      out.plot_script("radius", "n", "beurling_root", false, "||A^n||^{1/n}");
      out.line("rho", r.rho_estimate);
      out.line("gap", r.gap);
      return 0;
    }

    if (minmod->parsed()) {
      const auto a = load_coeffs(toe_coeffs);
      const auto m = mm_grid > 0 ? symbol_min_modulus(a, mm_grid) : certify_min_modulus(a);
      out.json_file("minmod", modulus_json(m));
      out.line("min", m.min);
      out.line("certified", m.certified ? "true" : "false");
      out.line("vanishing", m.vanishing ? "true" : "false");
      return 0;
    }

    if (recip->parsed()) {
      const auto a = load_coeffs(toe_coeffs);
      ReciprocalReport r;
      const auto b = reciprocal_coeffs(a, g.tol, &r);
      std::string csv = "n,re,im\n";
      for (const auto& [n, v] : b.coeffs) {
        std::string idx;
        for (int x : n) idx += (idx.empty() ? "" : ":") + std::to_string(x);
        csv += idx + "," + io::fmt(v.real()) + "," + io::fmt(v.imag()) + "\n";
      }
      out.json_file("recip", json{{"grid", r.G},
                                  {"outer_mass", r.outer_mass},
                                  {"astar_norm", r.astar},
                                  {"convolution_residual", r.convolution_residual},
                                  {"modulus", modulus_json(r.modulus)},
                                  {"coeffs", io::to_json(b)["coeffs"]},
                                  {"d", b.d}});
      out.csv_file("recip", csv);
      out.line("astar_norm", r.astar);
      out.line("convolution_residual", r.convolution_residual);
      int shown = 0;
      for (const auto& [n, v] : b.coeffs) {
        if (b.d != 1 || std::abs(n[0]) > 8 || ++shown > 17) continue;
        out.line("b(" + std::to_string(n[0]) + ")", v.real());
      }
      return 0;
    }

    if (tstab->parsed()) {
      const auto a = load_coeffs(toe_coeffs);
      const auto radii = parse_int_list(ts_radii);
      const double q = parse_q(ts_q);
      const auto w = io::parse_weight_sequence(ts_weight, Window(a.d, radii.front()));
      BracketOptions opt;
      opt.seed = q != 2.0 ? require_seed(g, "q != 2 brackets") : out.seed();
      const auto tc = toeplitz_stability_criterion(a, q, w, radii, opt);
      json b = json::array();
      for (const auto& r : tc.brackets) b.push_back(stability_json(r));
      out.json_file("toeplitz_stability",
                    json{{"verdict", to_string(tc.verdict)}, {"modulus", modulus_json(tc.modulus)}, {"brackets", b}});
      out.csv_file("toeplitz_stability", brackets_csv(tc.brackets));
      out.plot_script("toeplitz_stability", "radius", "lower", true, "lower stability bound");
      out.line("verdict", to_string(tc.verdict));
      out.line("min_modulus", tc.modulus.min);
      return 0;
    }

    if (suite->parsed()) {
      acceptance::Options o;
      o.seed = require_seed(g, "suite");
      o.quick = g.quick;
      const auto results = acceptance::run_all(o, [&](const acceptance::Criterion& c) {
        if (!g.print_json) std::cout << acceptance::format_line(c) << "\n" << std::flush;
      });
      json rows = json::array();
      std::string csv = "id,name,pass,detail\n";
      bool all = true;
      for (const auto& c : results) {
        rows.push_back(acceptance::to_json(c));
        csv += std::to_string(c.id) + ",\"" + c.name + "\"," + (c.pass ? "PASS" : "FAIL") + ",\"" + c.detail + "\"\n";
        all = all && c.pass;
      }
      out.json_file("suite", json{{"quick", g.quick}, {"all_pass", all}, {"criteria", rows}});
      out.csv_file("suite", csv);
      if (!g.print_json) std::cout << (all ? "all criteria pass" : "some criteria FAIL") << "\n";
      return all ? 0 : 2;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
