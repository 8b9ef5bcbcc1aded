/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset. Exit status is nonzero if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "oracles.hpp"
#include "zcoup/io.hpp"
#include "zcoup/monotone.hpp"
#include "zcoup/onedim.hpp"
#include "zcoup/oracle.hpp"
#include "zcoup/proper.hpp"
#include "zcoup/regvar.hpp"
#include "zcoup/transport.hpp"

#ifndef ZCOUP_CLI
#error "ZCOUP_CLI must name the command-line binary"
#endif
#ifndef ZCOUP_FIXTURES
#error "ZCOUP_FIXTURES must name the fixture directory"
#endif

using namespace zcoup;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string fixture(const std::string& name) { return std::string(ZCOUP_FIXTURES) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Run the CLI with stdout captured to a file; returns the exit status.
int run_cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string("\"") + ZCOUP_CLI + "\" " + args + " > \"" +
                          stdout_file.string() + "\" 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

bool all_cyclically_monotone(const std::vector<ZeroCoupling>& plans, std::size_t* bad) {
  *bad = 0;
  for (const auto& g : plans)
    if (!is_cyclically_monotone(coupling_support(g, true), 1e-9).ok) ++*bad;
  return *bad == 0;
}

// Plans produced by the optimality suite and the 1D module; shared with the
// monotonicity criterion.
std::vector<ZeroCoupling> g_suite_plans;

std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> random_small_instances() {
  std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> out;
  std::mt19937_64 rng(0xC0FFEE);
  std::uniform_int_distribution<int> count(1, 4);
  for (int k = 0; k < 100; ++k) {
    const std::size_t d = 1 + static_cast<std::size_t>(k % 3);
    auto mu = oracle::random_measure(rng, d, static_cast<std::size_t>(count(rng)));
    auto nu = oracle::random_measure(rng, d, static_cast<std::size_t>(count(rng)));
    out.emplace_back(std::move(mu), std::move(nu));
  }
  return out;
}

// ------------------------------------------------------------------ criteria

Outcome crit_oracle() {
  const fs::path dir = fs::temp_directory_path() / "zcoup_acc_oracle";
  fs::create_directories(dir);
  const auto t0 = Clock::now();
  const int rc = run_cli("oracle-verify --resolution 128 --tol 1e-3", dir / "out.json");
  const double secs = seconds_since(t0);
  const auto j = nlohmann::json::parse(slurp(dir / "out.json"), nullptr, false);
  if (j.is_discarded()) return {false, fmt("exit %d, unparsable report", rc)};
  const double push = j.value("pushforward_max_rel_error", 1.0);
  const double fd = j.value("fd_max_error", 1.0);
  const double hom = j.value("value_homogeneity_error", 1.0);
  const bool ok = rc == 0 && push <= 1e-3 && fd <= 1e-6 && hom <= 1e-12 && secs < 30.0;
  return {ok, fmt("exit %d, mass error %.3g, fd error %.3g, value homogeneity %.3g, %.2f s", rc, push,
                  fd, hom, secs)};
}

Outcome crit_optimality() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int failures = 0;
  for (const auto& [mu, nu] : random_small_instances()) {
    const auto g = solve_zero_coupling(mu, nu, true);
    const double want = brute_force_min_cost(mu, nu, true).cost;
    const double rel = std::abs(coupling_cost(g) - want) / std::max(1.0, std::abs(want));
    worst = std::max(worst, rel);
    if (rel > 1e-9) ++failures;
    g_suite_plans.push_back(g);
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 10.0,
          fmt("100 instances, %d mismatches, worst relative gap %.3g, %.2f s", failures, worst, secs)};
}

Outcome crit_monotone_plans() {
  if (g_suite_plans.empty())
    for (const auto& [mu, nu] : random_small_instances()) g_suite_plans.push_back(solve_zero_coupling(mu, nu, true));
  std::vector<ZeroCoupling> one_d;
  std::mt19937_64 rng(0xC0FFEE + 1);
  std::uniform_int_distribution<int> count(1, 50);
  for (int k = 0; k < 100; ++k) {
    const auto mu = oracle::random_measure(rng, 1, static_cast<std::size_t>(count(rng)));
    const auto nu = oracle::random_measure(rng, 1, static_cast<std::size_t>(count(rng)));
    one_d.push_back(solve_1d(mu, nu));
    one_d.push_back(solve_zero_coupling(mu, nu, true));
  }
  std::size_t bad_a = 0, bad_b = 0;
  const bool a = all_cyclically_monotone(g_suite_plans, &bad_a);
  const bool b = all_cyclically_monotone(one_d, &bad_b);
  return {a && b, fmt("%zu solver plans (%zu violations), %zu 1D plans (%zu violations)",
                      g_suite_plans.size(), bad_a, one_d.size(), bad_b)};
}

Outcome crit_example_1_2() {
  const auto mu = parse_measure_csv(read_text_file(fixture("ex12_mu.csv")));
  const auto nu = parse_measure_csv(read_text_file(fixture("ex12_nu.csv")));
  const auto g = solve_zero_coupling(mu, nu, true);
  const auto r = residual_decomposition(g);
  bool ok = r.left_residual == nu.total() && r.right_residual == mu.total() && !check_proper(g);
  // The same on a truncation of the analytic pair.
  const auto pos = homogeneous_from_config(parse_config(read_text_file(fixture("ex12_pos.cfg"))));
  const auto neg = homogeneous_from_config(parse_config(read_text_file(fixture("ex12_neg.cfg"))));
  TruncationParams p;
  p.resolution = 64;
  p.outer = 1.0;
  const auto [a, b] = truncate_and_balance(&pos, &neg, 8, p);
  const auto h = solve_zero_coupling(a, b, true);
  const auto rh = residual_decomposition(h);
  ok = ok && rh.left_residual == b.total() && rh.right_residual == a.total() && !check_proper(h);
  const bool crit = check_1d_criterion(ExtReal::inf(), ExtReal::of(0), ExtReal::of(0), ExtReal::inf());
  ok = ok && !crit;
  return {ok, fmt("fixture residuals %g/%g vs masses %g/%g, truncated residuals %.17g/%.17g vs %.17g/%.17g, "
                  "1D criterion %s",
                  r.left_residual, r.right_residual, nu.total(), mu.total(), rh.left_residual,
                  rh.right_residual, b.total(), a.total(), crit ? "true" : "false")};
}

Outcome crit_properness_shadow() {
  const auto mu = homogeneous_from_config(parse_config(read_text_file(fixture("mu_quartic.cfg"))));
  const auto nu = homogeneous_from_config(parse_config(read_text_file(fixture("nu_quartic.cfg"))));
  const bool cone = check_cone_condition(mu, nu).holds;
  std::vector<double> ratios;
  for (int n : {4, 8, 16}) {
    TruncationParams p;
    p.resolution = 64;
    p.outer = 1.0;
    const auto [a, b] = truncate_and_balance(&mu, &nu, n, p);
    const auto g = solve_zero_coupling(a, b, true);
    std::vector<double> moved;
    for (const auto& e : g.entries) moved.push_back(e.mass);
    ratios.push_back(residual_decomposition(g).left_residual / ordered_sum(moved));
  }
  const bool non_increasing = ratios[1] <= ratios[0] && ratios[2] <= ratios[1];
  const bool small = ratios.back() <= 0.01;
  return {cone && non_increasing && small,
          fmt("cone condition %s, left residual share %.4f, %.4f, %.4f (non-increasing %s, final <= 1%% %s)",
              cone ? "holds" : "fails", ratios[0], ratios[1], ratios[2], non_increasing ? "yes" : "no",
              small ? "yes" : "no")};
}

Outcome crit_coupling_homogeneity() {
  // The limit coupling of the closed-form pair is the graph of the gradient.
  constexpr double kLo = 0.25, kHi = 64.0;
  const auto mu = discretize(mu_quartic_measure(), kLo, kHi, DiscretizeMode::Quadrature, 256);
  ZeroCoupling g{mu, DiscreteMeasure(2), {}};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    g.targets.add(*grad_psi_quartic(mu.atom(i)), mu.weight(i));
    g.entries.push_back({static_cast<long>(i), static_cast<long>(i), mu.weight(i)});
  }
  const std::vector<ProductAnnulus> annuli = {
      {1, 4, 0, kInf}, {1, 4, 0.5, 2}, {1, 4, 2, 8}, {1, 2, 1, 4}, {2, 4, 0, 3}};
  const std::vector<double> lambdas = {0.5, 2.0};
  // Quadrature error of every set the check touches, against exact masses.
  double quad = 0.0;
  for (double lam : {1.0, 0.5, 2.0})
    for (const auto& a : annuli) {
      const ProductAnnulus s{a.r_lo / lam, a.r_hi / lam, a.s_lo / lam, a.s_hi / lam};
      const double exact = pushed_mass_quartic({s.s_lo, s.s_hi, 0.5 * kPi, 1.5 * kPi}, s.r_lo, s.r_hi);
      quad = std::max(quad, std::abs(coupling_mass(g, s) - exact) / exact);
    }
  const double tol = 2.0 * quad;
  const auto rep = check_coupling_homogeneity(g, 1.0, 1.0, lambdas, annuli, tol);
  return {rep.holds && quad <= 1e-2,
          fmt("quadrature error %.3g, tol %.3g, max mass deviation %.3g over %zu rows", quad, tol,
              rep.max_mass_deviation, rep.rows.size())};
}

Outcome crit_gradient_homogeneity() {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) pts.push_back({0.2 + 0.3 * i, -2.0 + 0.45 * j});
  const GradientMap grad = [](ConstCoords p) { return grad_psi_quartic(p); };
  const auto rep = check_gradient_homogeneity(grad, nullptr, 1.0, 1.0, pts, {0.5, 2.0, 10.0}, 1e-12);
  return {rep.holds, fmt("100 points, max relative deviation %.3g", rep.max_grad_deviation)};
}

Outcome crit_tail_trend() {
  const auto t0 = Clock::now();
  const auto model = RVModel::from_config(parse_config(read_text_file(fixture("uniform_a1.cfg"))));
  ExperimentConfig cfg{.p = model, .q = model};
  cfg.n = 20000;
  const double n = static_cast<double>(cfg.n);
  cfg.t_grid = {std::pow(n, 0.3), std::pow(n, 0.5), std::pow(n, 0.7)};
  cfg.seeds = 10;
  const auto res = tail_coupling_experiment(cfg);
  const double secs = seconds_since(t0);
  const auto& m = res.summary.median_fell;
  const bool trend = res.summary.fell_non_increasing;
  const bool final_ok = m.back() <= 0.15;
  const auto j = experiment_summary_json(cfg, res);
  std::string pairs;
  for (const auto& v : j["median_window_pairs"]) pairs += (pairs.empty() ? "" : "/") + std::to_string(v.get<std::size_t>());
  return {trend && final_ok && secs < 300.0,
          fmt("median fell distance %.4f, %.4f, %.4f (non-increasing %s, final <= 0.15 %s), "
              "median window pairs %s, %.1f s",
              m[0], m[1], m[2], trend ? "yes" : "no", final_ok ? "yes" : "no", pairs.c_str(), secs)};
}

Outcome crit_scaling() {
  SupportSet graph(2);
  for (int i = 1; i <= 20; ++i)
    for (int j = -10; j <= 10; ++j) {
      const std::array x{0.15 * i, 0.3 * j};
      graph.add(x, *grad_psi_quartic(x));
    }
  double worst = 0.0;
  for (double lam : {0.5, 2.0}) {
    const auto s = scaled_subdifferential(graph, lam, lam);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto y = *grad_psi_quartic(s.x(k));
      for (int c = 0; c < 2; ++c)
        worst = std::max(worst, std::abs(s.y(k)[c] - y[c]) / std::max(1.0, std::abs(y[c])));
    }
  }
  return {worst <= 1e-12, fmt("%zu graph points, max relative deviation %.3g", graph.size(), worst)};
}

Outcome crit_determinism() {
  const std::string f = ZCOUP_FIXTURES;
  struct Cmd {
    std::string name, args;
    std::vector<std::string> files;  // output files written under the run dir
  };
  const std::vector<Cmd> cmds = {
      {"solve", "solve --mu " + f + "/ex12_mu.csv --nu " + f + "/ex12_nu.csv --reservoir --out @/g.csv", {"g.csv"}},
      {"check-cm", "check-cm --support " + f + "/rotation_support.csv", {}},
      {"potential", "potential --support " + f + "/half_axes_support.csv --out @/p.csv", {"p.csv"}},
      {"discretize", "discretize --config " + f + "/uniform_a1.cfg --mode mc --resolution 500 --out @/d.csv",
       {"d.csv"}},
      {"check-criteria", "check-criteria --mu " + f + "/mu_quartic.cfg --nu " + f + "/nu_quartic.cfg", {}},
      {"probe-halfspace", "probe-halfspace --mu " + f + "/mu_quartic.cfg --nu " + f + "/nu_quartic.cfg --grid 16", {}},
      {"oracle-verify", "oracle-verify --resolution 64 --tol 1e-2", {}},
      {"tail-experiment",
       "tail-experiment --p " + f + "/uniform_a1.cfg --q " + f + "/uniform_a1.cfg --n 2000 --seeds 2 --out @/te",
       {"te/tail_experiment.csv", "te/summary.json"}},
  };
  int identical = 0;
  std::string diffs;
  for (const auto& c : cmds) {
    std::array<fs::path, 2> dirs;
    std::array<int, 2> rc{};
    for (int r = 0; r < 2; ++r) {
      dirs[r] = fs::temp_directory_path() / ("zcoup_acc_det_" + std::to_string(r)) / c.name;
      fs::remove_all(dirs[r]);
      fs::create_directories(dirs[r]);
      std::string args = c.args;
      for (std::size_t at; (at = args.find('@')) != std::string::npos;) args.replace(at, 1, dirs[r].string());
      rc[r] = run_cli(args, dirs[r] / "stdout.txt");
    }
    // stdout never contains run paths, so it must match too.
    bool same = rc[0] == rc[1] && slurp(dirs[0] / "stdout.txt") == slurp(dirs[1] / "stdout.txt") &&
                !slurp(dirs[0] / "stdout.txt").empty();
    for (const auto& file : c.files) {
      const auto a = slurp(dirs[0] / file);
      same = same && !a.empty() && a == slurp(dirs[1] / file);
    }
    if (same)
      ++identical;
    else
      diffs += " " + c.name;
  }
  return {identical == static_cast<int>(cmds.size()),
          fmt("%d of %zu commands byte-identical across reruns%s%s", identical, cmds.size(),
              diffs.empty() ? "" : "; differing:", diffs.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "oracle end-to-end", crit_oracle},
      {2, "solver optimality", crit_optimality},
      {3, "cyclical monotonicity of all plans", crit_monotone_plans},
      {4, "sign-separated example", crit_example_1_2},
      {5, "properness criterion shadow", crit_properness_shadow},
      {6, "homogeneity of the limit coupling", crit_coupling_homogeneity},
      {7, "gradient homogeneity", crit_gradient_homogeneity},
      {8, "tail-limit trend", crit_tail_trend},
      {9, "scaling invariance", crit_scaling},
      {10, "CLI determinism", crit_determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("[%s] criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
