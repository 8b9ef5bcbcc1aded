/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "zcoup/monotone.hpp"

namespace zcoup {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

double to_real(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last)
    fail(ErrorCode::Parse, where + ": cannot parse number '" + t + "'");
  return v;
}

long to_index(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t == "O") return kOrigin;
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || v < 0)
    fail(ErrorCode::Parse, where + ": bad atom index '" + t + "'");
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Lines of a CSV file, skipping blank lines; the first is the header.
std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) fail(ErrorCode::Parse, "CSV input is empty (missing header)");
  return lines;
}

Table numeric_table(const std::string& text) {
  Table t;
  const auto lines = csv_lines(text);
  t.header = split(lines[0], ',');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != t.header.size())
      fail(ErrorCode::Parse, "line " + std::to_string(i + 1) + ": expected " +
                                 std::to_string(t.header.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(to_real(c, "line " + std::to_string(i + 1)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  if (got != want) {
    std::string w;
    for (const auto& s : want) w += (w.empty() ? "" : ",") + s;
    fail(ErrorCode::Parse, "unexpected CSV header, want " + w);
  }
}

std::vector<std::string> coord_names(char prefix, std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < d; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

void append_row(std::string& out, std::span<const double> a) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k) out += ',';
    out += format_real(a[k]);
  }
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

void dump_value(const Json& j, int indent, int level, std::string& out) {
  const auto pad = [&](int l) {
    if (indent > 0) out += '\n' + std::string(static_cast<std::size_t>(indent * l), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        pad(level + 1);
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_value(it.value(), indent, level + 1, out);
      }
      pad(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        pad(level + 1);
        dump_value(j[i], indent, level + 1, out);
      }
      pad(level);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

DiscreteMeasure parse_measure_csv(const std::string& text) {
  const Table t = numeric_table(text);
  if (t.header.size() < 2) fail(ErrorCode::Parse, "measure CSV needs at least x0,w");
  const std::size_t d = t.header.size() - 1;
  auto want = coord_names('x', d);
  want.push_back("w");
  expect_header(t.header, want);
  DiscreteMeasure m(d);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    try {
      m.add(std::span<const double>(r.data(), d), r[d]);
    } catch (const Error& e) {
      fail(ErrorCode::Parse, "atom " + std::to_string(i) + ": " + e.what());
    }
  }
  return m;
}

std::string format_measure_csv(const DiscreteMeasure& m) {
  auto head = coord_names('x', m.dim());
  head.push_back("w");
  std::string out = join(head) + '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    append_row(out, m.atom(i));
    out += ',' + format_real(m.weight(i)) + '\n';
  }
  return out;
}

ZeroCoupling parse_coupling_csv(const std::string& text, const DiscreteMeasure& sources,
                                const DiscreteMeasure& targets) {
  require(sources.dim() == targets.dim(), "measure dimensions differ");
  const auto lines = csv_lines(text);
  expect_header(split(lines[0], ','), {"src", "dst", "mass"});
  ZeroCoupling g{sources, targets, {}};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    const std::string where = "line " + std::to_string(i + 1);
    if (cells.size() != 3) fail(ErrorCode::Parse, where + ": expected 3 fields");
    CouplingEntry e{to_index(cells[0], where), to_index(cells[1], where), to_real(cells[2], where)};
    if (e.src != kOrigin && static_cast<std::size_t>(e.src) >= sources.size())
      fail(ErrorCode::Parse, where + ": source index out of range");
    if (e.dst != kOrigin && static_cast<std::size_t>(e.dst) >= targets.size())
      fail(ErrorCode::Parse, where + ": target index out of range");
    if (e.src == kOrigin && e.dst == kOrigin)
      fail(ErrorCode::Parse, where + ": origin-to-origin entries are not stored");
    if (!(e.mass > 0.0) || !std::isfinite(e.mass))
      fail(ErrorCode::Parse, where + ": mass must be positive and finite");
    g.entries.push_back(e);
  }
  return g;
}

std::string format_coupling_csv(const ZeroCoupling& g) {
  std::string out = "src,dst,mass\n";
  auto idx = [](long v) { return v == kOrigin ? std::string("O") : std::to_string(v); };
  for (const auto& e : g.entries) out += idx(e.src) + ',' + idx(e.dst) + ',' + format_real(e.mass) + '\n';
  return out;
}

SupportSet parse_support_csv(const std::string& text) {
  const Table t = numeric_table(text);
  if (t.header.size() < 2 || t.header.size() % 2 != 0)
    fail(ErrorCode::Parse, "support CSV needs an even number of columns");
  const std::size_t d = t.header.size() / 2;
  auto want = coord_names('x', d);
  const auto ys = coord_names('y', d);
  want.insert(want.end(), ys.begin(), ys.end());
  expect_header(t.header, want);
  SupportSet s(d);
  for (const auto& r : t.rows) {
    for (double v : r)
      if (!std::isfinite(v)) fail(ErrorCode::Parse, "support coordinates must be finite");
    s.add({r.data(), d}, {r.data() + d, d});
  }
  return s;
}

std::string format_support_csv(const SupportSet& s) {
  auto head = coord_names('x', s.dim());
  const auto ys = coord_names('y', s.dim());
  head.insert(head.end(), ys.begin(), ys.end());
  std::string out = join(head) + '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    append_row(out, s.x(i));
    out += ',';
    append_row(out, s.y(i));
    out += '\n';
  }
  return out;
}

DiscretePotential parse_potential_csv(const std::string& text) {
  const Table t = numeric_table(text);
  if (t.header.size() < 3 || t.header.size() % 2 != 1)
    fail(ErrorCode::Parse, "potential CSV needs 2d+1 columns");
  const std::size_t d = t.header.size() / 2;
  auto want = coord_names('x', d);
  want.push_back("psi");
  const auto gs = coord_names('g', d);
  want.insert(want.end(), gs.begin(), gs.end());
  expect_header(t.header, want);
  DiscretePotential p(d);
  for (const auto& r : t.rows) p.add_node({r.data(), d}, r[d], {r.data() + d + 1, d});
  return p;
}

std::string format_potential_csv(const DiscretePotential& p) {
  auto head = coord_names('x', p.dim());
  head.push_back("psi");
  const auto gs = coord_names('g', p.dim());
  head.insert(head.end(), gs.begin(), gs.end());
  std::string out = join(head) + '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    append_row(out, p.x(i));
    out += ',' + format_real(p.psi(i)) + ',';
    append_row(out, p.grad(i));
    out += '\n';
  }
  return out;
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::Parse, "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorCode::Parse, "config line " + std::to_string(lineno) + ": empty key");
    if (!cfg.emplace(key, value).second)
      fail(ErrorCode::Parse, "config key '" + key + "' given twice");
  }
  return cfg;
}

std::string config_string(const Config& cfg, const std::string& key,
                          std::optional<std::string> fallback) {
  const auto it = cfg.find(key);
  if (it != cfg.end()) return it->second;
  if (fallback) return *fallback;
  fail(ErrorCode::Parse, "config key '" + key + "' is required");
}

double config_real(const Config& cfg, const std::string& key, std::optional<double> fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) {
    if (fallback) return *fallback;
    fail(ErrorCode::Parse, "config key '" + key + "' is required");
  }
  return to_real(it->second, "config key '" + key + "'");
}

int config_int(const Config& cfg, const std::string& key, std::optional<int> fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) {
    if (fallback) return *fallback;
    fail(ErrorCode::Parse, "config key '" + key + "' is required");
  }
  int v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::Parse, "config key '" + key + "': expected an integer");
  return v;
}

bool config_bool(const Config& cfg, const std::string& key, std::optional<bool> fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) {
    if (fallback) return *fallback;
    fail(ErrorCode::Parse, "config key '" + key + "' is required");
  }
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  fail(ErrorCode::Parse, "config key '" + key + "': expected true or false");
}

HomogeneousMeasure homogeneous_from_config(const Config& cfg) {
  static const std::vector<std::string> known = {
      "dim", "alpha", "angular_kind", "angular_spec", "angular_mass", "smooth", "resolution",
      "radial_slowly_varying", "transform"};
  for (const auto& [k, v] : cfg)
    if (std::find(known.begin(), known.end(), k) == known.end())
      fail(ErrorCode::Parse, "unknown config key '" + k + "'");
  const int dim = config_int(cfg, "dim");
  if (dim < 1) fail(ErrorCode::Parse, "dim must be >= 1");
  const double alpha = config_real(cfg, "alpha");
  const std::string kind = config_string(cfg, "angular_kind");
  const std::string spec = config_string(cfg, "angular_spec");
  const bool smooth = config_bool(cfg, "smooth", false);
  const auto d = static_cast<std::size_t>(dim);
  try {
    if (kind == "discrete") {
      std::vector<double> dirs, weights;
      for (const auto& atom : split(spec, '|')) {
        const auto colon = atom.find(':');
        if (colon == std::string::npos) fail(ErrorCode::Parse, "discrete angular atom needs dir:weight");
        const auto comps = split(atom.substr(0, colon), ',');
        if (comps.size() != d) fail(ErrorCode::Parse, "angular atom has wrong dimension");
        std::vector<double> u;
        for (const auto& c : comps) u.push_back(to_real(c, "angular atom"));
        const double n = norm(u);
        if (!(n > 0.0)) fail(ErrorCode::Parse, "angular atom direction must be nonzero");
        for (double& c : u) dirs.push_back(c / n);
        weights.push_back(to_real(atom.substr(colon + 1), "angular weight"));
      }
      if (cfg.count("angular_mass")) {
        const double want = config_real(cfg, "angular_mass");
        const double have = ordered_sum(weights);
        if (std::abs(want - have) > 1e-12 * std::max(1.0, have))
          fail(ErrorCode::Parse, "angular_mass disagrees with the discrete weights");
      }
      return HomogeneousMeasure(alpha, AngularLaw::discrete(d, dirs, weights), smooth);
    }
    if (kind == "density") {
      std::optional<double> mass;
      if (cfg.count("angular_mass")) mass = config_real(cfg, "angular_mass");
      const int res = config_int(cfg, "resolution", 256);
      return HomogeneousMeasure(alpha, AngularLaw::density(AngularDensity::named(d, spec), mass, res),
                                smooth);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    fail(ErrorCode::Parse, std::string("invalid measure config: ") + e.what());
  }
  fail(ErrorCode::Parse, "angular_kind must be discrete or density");
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_value(j, indent, 0, out);
  return out;
}

}  // namespace zcoup
