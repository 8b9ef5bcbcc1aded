/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
// Command-line front end. Talks to the library through the C API only.
//
// Exit codes:
//   0  success
//   1  the checked property is violated
//   2  parse, configuration or I/O error
//   3  unbalanced masses without --reservoir
//   4  any other library failure

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "zcoup/zcoup.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnbalanced = 3;
constexpr int kExitFailure = 4;

struct Failure {
  int code;
};

int exit_code_for(zc_status s) {
  switch (s) {
    case ZC_OK: return kExitOk;
    case ZC_ERR_PARSE:
    case ZC_ERR_IO:
    case ZC_ERR_INVALID_ARGUMENT: return kExitInput;
    case ZC_ERR_UNBALANCED: return kExitUnbalanced;
    case ZC_ERR_NOT_CYCLICALLY_MONOTONE: return kExitViolated;
    default: return kExitFailure;
  }
}

void check(zc_status s, const char* what) {
  if (s == ZC_OK) return;
  std::fprintf(stderr, "zcoup: %s: %s\n", what, zc_last_error());
  throw Failure{exit_code_for(s)};
}

struct StrFree {
  void operator()(char* p) const { zc_string_free(p); }
};
using Str = std::unique_ptr<char, StrFree>;

template <class T, void (*F)(T*)>
struct Freer {
  void operator()(T* p) const { F(p); }
};
using Measure = std::unique_ptr<zc_measure, Freer<zc_measure, zc_measure_free>>;
using Homog = std::unique_ptr<zc_homog, Freer<zc_homog, zc_homog_free>>;
using Coupling = std::unique_ptr<zc_coupling, Freer<zc_coupling, zc_coupling_free>>;
using Support = std::unique_ptr<zc_support, Freer<zc_support, zc_support_free>>;
using Potential = std::unique_ptr<zc_potential, Freer<zc_potential, zc_potential_free>>;

Measure read_measure(const std::string& path) {
  zc_measure* m = nullptr;
  check(zc_measure_read_csv(path.c_str(), &m), path.c_str());
  return Measure(m);
}

Homog read_homog(const std::string& path) {
  zc_homog* h = nullptr;
  check(zc_homog_read_config(path.c_str(), &h), path.c_str());
  return Homog(h);
}

Support read_support(const std::string& path) {
  zc_support* s = nullptr;
  check(zc_support_read_csv(path.c_str(), &s), path.c_str());
  return Support(s);
}

std::string slurp(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) {
    std::fprintf(stderr, "zcoup: cannot open %s\n", path.c_str());
    throw Failure{kExitInput};
  }
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
  std::fclose(f);
  return out;
}

void write_out(const std::string& path, const char* text) {
  check(zc_write_file(path.c_str(), text), path.c_str());
}

void print_json(const char* text) {
  std::fputs(text, stdout);
  std::fputc('\n', stdout);
}

std::string seed_text(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(seed));
  return buf;
}

// Comma-separated list of numbers or "n^p" tokens.
std::vector<double> parse_t_grid(const std::string& text, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      if (tok.rfind("n^", 0) == 0)
        out.push_back(std::pow(static_cast<double>(n), std::stod(tok.substr(2))));
      else
        out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      std::fprintf(stderr, "zcoup: bad t-grid entry '%s'\n", tok.c_str());
      throw Failure{kExitInput};
    }
  }
  if (out.empty()) {
    std::fprintf(stderr, "zcoup: empty t-grid\n");
    throw Failure{kExitInput};
  }
  return out;
}

// ----------------------------------------------------------------- commands

int cmd_solve(const std::string& mu_path, const std::string& nu_path, bool reservoir,
              const std::string& out, double tol) {
  auto mu = read_measure(mu_path);
  auto nu = read_measure(nu_path);
  zc_coupling* g = nullptr;
  check(zc_solve(mu.get(), nu.get(), reservoir ? 1 : 0, &g), "solve");
  Coupling coupling(g);
  if (!out.empty()) {
    char* csv = nullptr;
    check(zc_coupling_to_csv(g, &csv), "coupling");
    Str keep(csv);
    write_out(out, csv);
  }
  char* report = nullptr;
  check(zc_coupling_report_json(g, tol, &report), "report");
  Str keep(report);
  print_json(report);
  return kExitOk;
}

int cmd_check_cm(const std::string& path, double tol) {
  auto s = read_support(path);
  int ok = 0;
  char* report = nullptr;
  check(zc_support_is_cyclically_monotone(s.get(), tol, &ok, &report), "check-cm");
  Str keep(report);
  print_json(report);
  if (!ok) std::fprintf(stderr, "zcoup: support is not cyclically monotone\n");
  return ok ? kExitOk : kExitViolated;
}

int cmd_potential(const std::string& path, std::size_t base, double tol, const std::string& out) {
  auto s = read_support(path);
  zc_potential* p = nullptr;
  check(zc_potential_build(s.get(), base, tol, &p), "potential");
  Potential pot(p);
  char* csv = nullptr;
  check(zc_potential_to_csv(p, &csv), "potential");
  Str keep(csv);
  if (out.empty()) {
    std::fputs(csv, stdout);
    return kExitOk;
  }
  write_out(out, csv);
  char buf[128];
  std::snprintf(buf, sizeof buf, "{\n  \"nodes\": %zu,\n  \"base\": %zu\n}", zc_support_size(s.get()), base);
  print_json(buf);
  return kExitOk;
}

int cmd_discretize(const std::string& cfg, double r_lo, double r_hi, const std::string& mode,
                   int resolution, std::uint64_t seed, const std::string& out) {
  auto h = read_homog(cfg);
  const zc_discretize_mode m = mode == "mc" ? ZC_MONTE_CARLO : ZC_QUADRATURE;
  zc_measure* d = nullptr;
  check(zc_discretize(h.get(), r_lo, r_hi, m, resolution, seed, &d), "discretize");
  Measure disc(d);
  char* csv = nullptr;
  check(zc_measure_to_csv(d, &csv), "discretize");
  Str keep(csv);
  write_out(out, csv);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\n  \"master_seed\": %s,\n  \"atoms\": %zu,\n  \"total_mass\": %.17g\n}",
                seed_text(seed).c_str(), zc_measure_size(d), zc_measure_total(d));
  print_json(buf);
  return kExitOk;
}

int cmd_check_criteria(const std::string& mu, const std::string& nu, int grid) {
  auto a = read_homog(mu);
  auto b = read_homog(nu);
  int holds = 0;
  char* report = nullptr;
  check(zc_check_criteria(a.get(), b.get(), grid, &holds, &report), "check-criteria");
  Str keep(report);
  print_json(report);
  return holds ? kExitOk : kExitViolated;
}

int cmd_probe_halfspace(const std::string& mu, const std::string& nu, int grid) {
  auto a = read_homog(mu);
  auto b = read_homog(nu);
  char* report = nullptr;
  check(zc_probe_halfspace(a.get(), b.get(), grid, &report), "probe-halfspace");
  Str keep(report);
  print_json(report);
  return kExitOk;
}

int cmd_oracle_verify(int resolution, double tol, double perturb) {
  if (resolution < 16) {
    std::fprintf(stderr, "zcoup: --resolution must be at least 16\n");
    return kExitInput;
  }
  int pass = 0;
  char* report = nullptr;
  check(zc_oracle_verify(resolution, tol, 1.0 + perturb, &pass, &report), "oracle-verify");
  Str keep(report);
  print_json(report);
  if (!pass) std::fprintf(stderr, "zcoup: oracle verification failed\n");
  return pass ? kExitOk : kExitViolated;
}

struct ExperimentFlags {
  std::string p, q, t_grid = "n^0.3,n^0.5,n^0.7", out;
  std::size_t n = 20000;
  int seeds = 10;
  std::uint64_t master_seed = 0xC0FFEE;
  double r_lo = 1.0, r_hi = 3.0, y_max = 6.0;
  int reference_resolution = 64;
};

int cmd_tail_experiment(const ExperimentFlags& f) {
  const std::string p = slurp(f.p);
  const std::string q = slurp(f.q);
  const auto grid = parse_t_grid(f.t_grid, f.n);
  zc_experiment_params params{f.n, grid.data(), grid.size(), f.seeds, f.master_seed,
                              f.r_lo, f.r_hi, f.y_max, f.reference_resolution};
  std::fprintf(stderr, "zcoup: tail experiment n=%zu seeds=%d master_seed=%s\n", f.n, f.seeds,
               seed_text(f.master_seed).c_str());
  char* csv = nullptr;
  char* summary = nullptr;
  check(zc_tail_experiment(p.c_str(), q.c_str(), &params, &csv, &summary), "tail-experiment");
  Str keep_csv(csv), keep_summary(summary);
  std::error_code ec;
  std::filesystem::create_directories(f.out, ec);
  if (ec) {
    std::fprintf(stderr, "zcoup: cannot create %s: %s\n", f.out.c_str(), ec.message().c_str());
    return kExitInput;
  }
  const auto dir = std::filesystem::path(f.out);
  write_out((dir / "tail_experiment.csv").string(), csv);
  write_out((dir / "summary.json").string(), (std::string(summary) + "\n").c_str());
  print_json(summary);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-couplings of measures on punctured Euclidean space"};
  app.require_subcommand(1);
  int rc = kExitOk;

  std::string mu, nu, out, support;
  bool reservoir = false;
  double tol = 1e-9;
  auto* solve = app.add_subcommand("solve", "Minimum-cost zero-coupling of two discrete measures");
  solve->add_option("--mu", mu, "Source measure CSV")->required();
  solve->add_option("--nu", nu, "Target measure CSV")->required();
  solve->add_flag("--reservoir", reservoir, "Route unmatched mass through the origin");
  solve->add_option("--out", out, "Write the coupling CSV here");
  solve->add_option("--tol", tol, "Relative tolerance of the checks");
  solve->callback([&] { rc = cmd_solve(mu, nu, reservoir, out, tol); });

  auto* cm = app.add_subcommand("check-cm", "Cyclical monotonicity of a support CSV");
  cm->add_option("--support", support, "Support CSV")->required();
  cm->add_option("--tol", tol, "Relative tolerance");
  cm->callback([&] { rc = cmd_check_cm(support, tol); });

  std::size_t base = 0;
  auto* pot = app.add_subcommand("potential", "Convex potential realising a support");
  pot->add_option("--support", support, "Support CSV")->required();
  pot->add_option("--base", base, "Index of the normalising pair");
  pot->add_option("--tol", tol, "Relative tolerance");
  pot->add_option("--out", out, "Write the potential CSV here (default stdout)");
  pot->callback([&] { rc = cmd_potential(support, base, tol, out); });

  std::string config, mode = "quadrature";
  double r_lo = 1.0, r_hi = 10.0;
  int resolution = 64;
  std::uint64_t seed = 0xC0FFEE;
  auto* disc = app.add_subcommand("discretize", "Discretise a homogeneous measure on an annulus");
  disc->add_option("--config", config, "Measure config")->required();
  disc->add_option("--r-lo", r_lo, "Inner radius");
  disc->add_option("--r-hi", r_hi, "Outer radius");
  disc->add_option("--mode", mode, "quadrature or mc")->check(CLI::IsMember({"quadrature", "mc"}));
  disc->add_option("--resolution", resolution, "Grid size or sample count");
  disc->add_option("--master-seed", seed, "Seed for Monte Carlo mode");
  disc->add_option("--out", out, "Output measure CSV")->required();
  disc->callback([&] { rc = cmd_discretize(config, r_lo, r_hi, mode, resolution, seed, out); });

  int grid = 64;
  auto* crit = app.add_subcommand("check-criteria", "Properness criteria for two homogeneous measures");
  crit->add_option("--mu", mu, "Source measure config")->required();
  crit->add_option("--nu", nu, "Target measure config")->required();
  crit->add_option("--grid", grid, "Direction grid size");
  crit->callback([&] { rc = cmd_check_criteria(mu, nu, grid); });

  auto* probe = app.add_subcommand("probe-halfspace", "Experimental half-space mass comparison");
  probe->add_option("--mu", mu, "Source measure config")->required();
  probe->add_option("--nu", nu, "Target measure config")->required();
  probe->add_option("--grid", grid, "Direction grid size");
  probe->callback([&] { rc = cmd_probe_halfspace(mu, nu, grid); });

  int oracle_res = 128;
  double oracle_tol = 1e-3, perturb = 0.0;
  auto* oracle = app.add_subcommand("oracle-verify", "Closed-form push-forward oracle");
  oracle->add_option("--resolution", oracle_res, "Quadrature resolution (multiple of 4)");
  oracle->add_option("--tol", oracle_tol, "Relative mass tolerance");
  oracle->add_option("--perturb", perturb, "Relative gradient perturbation (negative control)");
  oracle->callback([&] { rc = cmd_oracle_verify(oracle_res, oracle_tol, perturb); });

  ExperimentFlags ef;
  auto* tail = app.add_subcommand("tail-experiment", "Tail couplings of regularly varying samples");
  tail->add_option("--p", ef.p, "Config of P")->required();
  tail->add_option("--q", ef.q, "Config of Q")->required();
  tail->add_option("--n", ef.n, "Sample size");
  tail->add_option("--t-grid", ef.t_grid, "Comma list; entries may be n^p");
  tail->add_option("--seeds", ef.seeds, "Number of seeds");
  tail->add_option("--master-seed", ef.master_seed, "Master seed");
  tail->add_option("--window-r-lo", ef.r_lo, "Window inner radius in x");
  tail->add_option("--window-r-hi", ef.r_hi, "Window outer radius in x");
  tail->add_option("--window-y-max", ef.y_max, "Window radius in y");
  tail->add_option("--reference-resolution", ef.reference_resolution, "Reference grid size");
  tail->add_option("--out", ef.out, "Output directory")->required();
  tail->callback([&] { rc = cmd_tail_experiment(ef); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  } catch (const Failure& f) {
    return f.code;
  }
  return rc;
}
