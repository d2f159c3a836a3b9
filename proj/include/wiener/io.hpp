#pragma once

// JSON / CSV serialization for matrices, sequences, symbols and weights.

#include "wiener/muckenhoupt.hpp"
#include "wiener/weights.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace wiener::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// 64-bit FNV-1a over a canonical string.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

/// Inline JSON if the text starts with '{', '@file' or a path otherwise.
inline json read_json_arg(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("inline JSON: ") + e.what());
    }
  }
  return read_json_file(!text.empty() && text.front() == '@' ? text.substr(1) : text);
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

// --- matrices and sequences -------------------------------------------------

inline json to_json(const LocalizedMatrix& A) {
  const Window& w = A.window();
  json entries = json::array();
  for (const auto& e : A.entries()) {
    json row = json::array();
    for (int v : w.index(e.row)) row.push_back(v);
    for (int v : w.index(e.col)) row.push_back(v);
    row.push_back(e.value.real());
    row.push_back(e.value.imag());
    entries.push_back(std::move(row));
  }
  return json{{"d", w.dim()}, {"radius", w.radius()}, {"entries", std::move(entries)}};
}

inline LocalizedMatrix matrix_from_json(const json& j) {
  const Window w(get_field<int>(j, "d"), get_field<int>(j, "radius"));
  LocalizedMatrix A(w);
  const int d = w.dim();
  for (const auto& row : get_field<json>(j, "entries")) {
    if (!row.is_array() || static_cast<int>(row.size()) != 2 * d + 2)
      throw ValidationError("matrix entry must be [i_1..i_d, j_1..j_d, re, im]");
    Index i(d), k(d);
    for (int t = 0; t < d; ++t) {
      i[t] = row[t].get<int>();
      k[t] = row[d + t].get<int>();
    }
    if (!w.contains(i) || !w.contains(k)) throw ValidationError("matrix entry index outside window");
    A.set(i, k, cplx(row[2 * d].get<double>(), row[2 * d + 1].get<double>()));
  }
  return A;
}

inline json to_json(const LatticeSequence& c) {
  const Window& w = c.window();
  json values = json::array();
  for (std::size_t p = 0; p < w.size(); ++p) {
    if (c(p) == cplx(0.0)) continue;
    json row = json::array();
    for (int v : w.index(p)) row.push_back(v);
    row.push_back(c(p).real());
    row.push_back(c(p).imag());
    values.push_back(std::move(row));
  }
  return json{{"d", w.dim()}, {"radius", w.radius()}, {"values", std::move(values)}};
}

inline LatticeSequence sequence_from_json(const json& j) {
  const Window w(get_field<int>(j, "d"), get_field<int>(j, "radius"));
  LatticeSequence c(w);
  const int d = w.dim();
  for (const auto& row : get_field<json>(j, "values")) {
    if (!row.is_array() || static_cast<int>(row.size()) != d + 2)
      throw ValidationError("sequence value must be [i_1..i_d, re, im]");
    Index i(d);
    for (int t = 0; t < d; ++t) i[t] = row[t].get<int>();
    if (!w.contains(i)) throw ValidationError("sequence index outside window");
    c.set(w.position(i), cplx(row[d].get<double>(), row[d + 1].get<double>()));
  }
  return c;
}

// --- symbols -----------------------------------------------------------------

inline json to_json(const SymbolCoeffs& a) {
  json coeffs = json::array();
  for (const auto& [n, v] : a.coeffs) {
    json row = json::array();
    for (int x : n) row.push_back(x);
    row.push_back(v.real());
    row.push_back(v.imag());
    coeffs.push_back(std::move(row));
  }
  return json{{"d", a.d}, {"coeffs", std::move(coeffs)}};
}

inline SymbolCoeffs coeffs_from_json(const json& j) {
  SymbolCoeffs a;
  a.d = get_field<int>(j, "d");
  if (a.d < 1) throw ValidationError("symbol dimension must be >= 1");
  for (const auto& row : get_field<json>(j, "coeffs")) {
    if (!row.is_array() || static_cast<int>(row.size()) != a.d + 2)
      throw ValidationError("coefficient must be [n_1..n_d, re, im]");
    Index n(a.d);
    for (int t = 0; t < a.d; ++t) n[t] = row[t].get<int>();
    a.coeffs[n] += cplx(row[a.d].get<double>(), row[a.d + 1].get<double>());
  }
  return a;
}

// --- weights -----------------------------------------------------------------

inline json to_json(const WeightMatrix& u) {
  switch (u.form()) {
    case WeightForm::trivial: return json{{"form", "trivial"}};
    case WeightForm::polynomial: return json{{"form", "polynomial"}, {"alpha", u.alpha()}};
    case WeightForm::subexponential:
      return json{{"form", "subexponential"}, {"delta", u.delta()}, {"tau", u.tau()}};
    case WeightForm::constant: return json{{"form", "constant"}, {"c", u.c()}};
    case WeightForm::table: {
      const auto& w = *u.table_window();
      json rows = json::array();
      for (Eigen::Index r = 0; r < u.table_values().rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < u.table_values().cols(); ++c) row.push_back(u.table_values()(r, c));
        rows.push_back(std::move(row));
      }
      return json{{"form", "table"}, {"d", w.dim()}, {"radius", w.radius()}, {"values", std::move(rows)}};
    }
  }
  return {};
}

inline WeightMatrix weight_from_json(const json& j) {
  const auto form = get_field<std::string>(j, "form");
  if (form == "trivial") return WeightMatrix::trivial();
  if (form == "polynomial") return WeightMatrix::polynomial(get_field<double>(j, "alpha"));
  if (form == "subexponential")
    return WeightMatrix::subexponential(get_field<double>(j, "delta"), j.value("tau", 1.0));
  if (form == "constant") return WeightMatrix::constant(get_field<double>(j, "c"));
  if (form == "table") {
    const Window w(get_field<int>(j, "d"), get_field<int>(j, "radius"));
    const auto rows = get_field<std::vector<std::vector<double>>>(j, "values");
    Eigen::MatrixXd v(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != v.cols()) throw ValidationError("ragged weight table");
      for (std::size_t c = 0; c < rows[r].size(); ++c) v(r, c) = rows[r][c];
    }
    return WeightMatrix::table(w, std::move(v));
  }
  throw ValidationError("unknown weight form '" + form + "'");
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError("not a number: '" + s + "'");
  }
}

}  // namespace detail

/// "trivial", "polynomial:2", "subexp:0.5:1", "constant:4", inline JSON or @file.
inline WeightMatrix parse_weight(const std::string& text) {
  if (text.empty()) throw ValidationError("empty weight spec");
  if (text.front() == '{' || text.front() == '@') return weight_from_json(read_json_arg(text));
  const auto parts = detail::split(text, ':');
  const auto& f = parts[0];
  auto arg = [&](std::size_t k, double fallback) {
    return parts.size() > k ? detail::to_double(parts[k]) : fallback;
  };
  if (f == "trivial") return WeightMatrix::trivial();
  if (f == "polynomial" || f == "poly") return WeightMatrix::polynomial(arg(1, 1.0));
  if (f == "subexp" || f == "subexponential") return WeightMatrix::subexponential(arg(1, 0.5), arg(2, 1.0));
  if (f == "constant" || f == "const") return WeightMatrix::constant(arg(1, 1.0));
  throw ValidationError("unknown weight spec '" + text + "'");
}

/// Weight sequence on a window: "trivial", "power:1", {"form":"power","alpha":1} or a table.
inline WeightSequence parse_weight_sequence(const std::string& text, const Window& w) {
  if (text.empty()) throw ValidationError("empty weight sequence spec");
  json j;
  if (text.front() == '{' || text.front() == '@') {
    j = read_json_arg(text);
  } else {
    const auto parts = detail::split(text, ':');
    if (parts[0] == "trivial") return WeightSequence::trivial(w);
    if (parts[0] == "power") return WeightSequence::power(w, parts.size() > 1 ? detail::to_double(parts[1]) : 1.0);
    throw ValidationError("unknown weight sequence spec '" + text + "'");
  }
  const auto form = get_field<std::string>(j, "form");
  if (form == "trivial") return WeightSequence::trivial(w);
  if (form == "power") return WeightSequence::power(w, get_field<double>(j, "alpha"));
  if (form == "table") {
    const auto seq = sequence_from_json(j);
    if (!(seq.window() == w)) throw ValidationError("weight table window does not match");
    return WeightSequence(w, seq.values().real());
  }
  throw ValidationError("unknown weight sequence form '" + form + "'");
}

// --- CSV ---------------------------------------------------------------------

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string profile_csv(const DecayProfile& h) {
  std::string out = "n,h\n";
  for (std::size_t n = 0; n < h.size(); ++n) out += std::to_string(n) + "," + fmt(h[n]) + "\n";
  return out;
}

inline DecayProfile profile_from_csv(const std::string& text, int d) {
  DecayProfile prof;
  prof.d = d;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line) && !line.empty() && line.front() == '#') {
  }
  if (line != "n,h") throw ValidationError("decay profile CSV must start with 'n,h'");
  while (std::getline(ss, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto cols = detail::split(line, ',');
    if (cols.size() != 2) throw ValidationError("bad decay profile row '" + line + "'");
    prof.h.push_back(detail::to_double(cols[1]));
  }
  return prof;
}

}  // namespace wiener::io
