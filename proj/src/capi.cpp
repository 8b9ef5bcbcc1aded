/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/zcoup.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "zcoup/io.hpp"
#include "zcoup/monotone.hpp"
#include "zcoup/onedim.hpp"
#include "zcoup/oracle.hpp"
#include "zcoup/proper.hpp"
#include "zcoup/regvar.hpp"
#include "zcoup/transport.hpp"

struct zc_measure {
  zcoup::DiscreteMeasure m;
};
struct zc_homog {
  zcoup::HomogeneousMeasure h;
};
struct zc_coupling {
  zcoup::ZeroCoupling g;
};
struct zc_support {
  zcoup::SupportSet s;
};
struct zc_potential {
  zcoup::DiscretePotential p;
};

namespace {

thread_local std::string g_last_error;

zc_status to_status(zcoup::ErrorCode c) {
  using zcoup::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return ZC_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return ZC_ERR_PARSE;
    case ErrorCode::Io: return ZC_ERR_IO;
    case ErrorCode::Unbalanced: return ZC_ERR_UNBALANCED;
    case ErrorCode::EmptyTruncation: return ZC_ERR_EMPTY_TRUNCATION;
    case ErrorCode::DomainViolation: return ZC_ERR_DOMAIN;
    case ErrorCode::OracleLimit: return ZC_ERR_ORACLE_LIMIT;
    case ErrorCode::NotCyclicallyMonotone: return ZC_ERR_NOT_CYCLICALLY_MONOTONE;
    case ErrorCode::EmptySupport: return ZC_ERR_EMPTY_SUPPORT;
    case ErrorCode::Internal: return ZC_ERR_INTERNAL;
  }
  return ZC_ERR_INTERNAL;
}

// Run f, translating exceptions into status codes and the thread-local
// message.
template <class F>
zc_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ZC_OK;
  } catch (const zcoup::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ZC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ZC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) zcoup::fail(zcoup::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

zcoup::DiscretizeMode mode_of(zc_discretize_mode m) {
  return m == ZC_MONTE_CARLO ? zcoup::DiscretizeMode::MonteCarlo : zcoup::DiscretizeMode::Quadrature;
}

zcoup::MeasureRef side_ref(const zc_measure* d, const zc_homog* h, const char* name) {
  if ((d == nullptr) == (h == nullptr))
    zcoup::fail(zcoup::ErrorCode::InvalidArgument,
                std::string(name) + ": give exactly one of the discrete or homogeneous form");
  if (d) return &d->m;
  return &h->h;
}

const char* verdict_name(zcoup::ConeVerdict v) {
  switch (v) {
    case zcoup::ConeVerdict::Holds: return "holds";
    case zcoup::ConeVerdict::Fails: return "fails";
    case zcoup::ConeVerdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

}  // namespace

extern "C" {

const char* zc_version(void) { return "0.1.0"; }
const char* zc_last_error(void) { return g_last_error.c_str(); }
void zc_string_free(char* s) { std::free(s); }

// ------------------------------------------------------------------ measures

zc_status zc_measure_create(size_t dim, const double* coords, const double* weights, size_t count,
                            zc_measure** out) {
  return guard([&] {
    need(out, "out");
    if (count > 0) {
      need(coords, "coords");
      need(weights, "weights");
    }
    zcoup::require(dim >= 1, "dimension must be positive");
    auto* m = new zc_measure{zcoup::DiscreteMeasure(dim)};
    try {
      for (size_t i = 0; i < count; ++i) m->m.add({coords + i * dim, dim}, weights[i]);
    } catch (...) {
      delete m;
      throw;
    }
    *out = m;
  });
}

zc_status zc_measure_parse_csv(const char* text, zc_measure** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new zc_measure{zcoup::parse_measure_csv(text)};
  });
}

zc_status zc_measure_read_csv(const char* path, zc_measure** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new zc_measure{zcoup::parse_measure_csv(zcoup::read_text_file(path))};
  });
}

zc_status zc_measure_to_csv(const zc_measure* m, char** out) {
  return guard([&] {
    need(m, "measure");
    need(out, "out");
    *out = dup_string(zcoup::format_measure_csv(m->m));
  });
}

void zc_measure_free(zc_measure* m) { delete m; }
size_t zc_measure_dim(const zc_measure* m) { return m ? m->m.dim() : 0; }
size_t zc_measure_size(const zc_measure* m) { return m ? m->m.size() : 0; }
double zc_measure_total(const zc_measure* m) { return m ? m->m.total() : 0.0; }

zc_status zc_measure_atom(const zc_measure* m, size_t i, double* coords, double* weight) {
  return guard([&] {
    need(m, "measure");
    zcoup::require(i < m->m.size(), "atom index out of range");
    if (coords) {
      const auto a = m->m.atom(i);
      std::copy(a.begin(), a.end(), coords);
    }
    if (weight) *weight = m->m.weight(i);
  });
}

zc_status zc_measure_mass_annulus(const zc_measure* m, double r_lo, double r_hi, double* out) {
  return guard([&] {
    need(m, "measure");
    need(out, "out");
    *out = zcoup::mass_annulus(m->m, r_lo, r_hi);
  });
}

// ------------------------------------------------------------- homogeneous

zc_status zc_homog_parse_config(const char* text, zc_homog** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new zc_homog{zcoup::homogeneous_from_config(zcoup::parse_config(text))};
  });
}

zc_status zc_homog_read_config(const char* path, zc_homog** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new zc_homog{
        zcoup::homogeneous_from_config(zcoup::parse_config(zcoup::read_text_file(path)))};
  });
}

void zc_homog_free(zc_homog* h) { delete h; }
size_t zc_homog_dim(const zc_homog* h) { return h ? h->h.dim : 0; }

zc_status zc_homog_mass_annulus(const zc_homog* h, double r_lo, double r_hi, double* out) {
  return guard([&] {
    need(h, "measure");
    need(out, "out");
    *out = zcoup::mass_annulus(h->h, r_lo, r_hi);
  });
}

zc_status zc_homog_mass_cone(const zc_homog* h, const double* direction, double eps, int* infinite,
                             double* cap_mass) {
  return guard([&] {
    need(h, "measure");
    need(direction, "direction");
    const auto r = zcoup::mass_cone(
        h->h, zcoup::Cone(std::vector<double>(direction, direction + h->h.dim), eps));
    if (infinite) *infinite = r.infinite ? 1 : 0;
    if (cap_mass) *cap_mass = r.cap_mass;
  });
}

zc_status zc_discretize(const zc_homog* h, double r_lo, double r_hi, zc_discretize_mode mode,
                        int resolution, uint64_t seed, zc_measure** out) {
  return guard([&] {
    need(h, "measure");
    need(out, "out");
    *out = new zc_measure{zcoup::discretize(h->h, r_lo, r_hi, mode_of(mode), resolution, seed)};
  });
}

zc_status zc_truncate_and_balance(const zc_measure* mu_d, const zc_homog* mu_h,
                                  const zc_measure* nu_d, const zc_homog* nu_h, int n,
                                  zc_discretize_mode mode, int resolution, uint64_t seed,
                                  zc_measure** mu_out, zc_measure** nu_out) {
  return guard([&] {
    need(mu_out, "mu_out");
    need(nu_out, "nu_out");
    zcoup::TruncationParams p;
    p.mode = mode_of(mode);
    p.resolution = resolution;
    p.seed = seed;
    auto [a, b] = zcoup::truncate_and_balance(side_ref(mu_d, mu_h, "mu"), side_ref(nu_d, nu_h, "nu"),
                                              n, p);
    auto* ma = new zc_measure{std::move(a)};
    *nu_out = new zc_measure{std::move(b)};
    *mu_out = ma;
  });
}

// ---------------------------------------------------------------- couplings

zc_status zc_solve(const zc_measure* mu, const zc_measure* nu, int reservoir, zc_coupling** out) {
  return guard([&] {
    need(mu, "mu");
    need(nu, "nu");
    need(out, "out");
    *out = new zc_coupling{zcoup::solve_zero_coupling(mu->m, nu->m, reservoir != 0)};
  });
}

zc_status zc_solve_1d(const zc_measure* mu, const zc_measure* nu, zc_coupling** out) {
  return guard([&] {
    need(mu, "mu");
    need(nu, "nu");
    need(out, "out");
    *out = new zc_coupling{zcoup::solve_1d(mu->m, nu->m)};
  });
}

zc_status zc_trivial_coupling(const zc_measure* mu, const zc_measure* nu, zc_coupling** out) {
  return guard([&] {
    need(mu, "mu");
    need(nu, "nu");
    need(out, "out");
    *out = new zc_coupling{zcoup::trivial_zero_coupling(mu->m, nu->m)};
  });
}

zc_status zc_brute_force(const zc_measure* mu, const zc_measure* nu, int reservoir, double* cost,
                         zc_coupling** out) {
  return guard([&] {
    need(mu, "mu");
    need(nu, "nu");
    auto r = zcoup::brute_force_min_cost(mu->m, nu->m, reservoir != 0);
    if (cost) *cost = r.cost;
    if (out) *out = new zc_coupling{std::move(r.coupling)};
  });
}

zc_status zc_coupling_parse_csv(const char* text, const zc_measure* mu, const zc_measure* nu,
                                zc_coupling** out) {
  return guard([&] {
    need(text, "text");
    need(mu, "mu");
    need(nu, "nu");
    need(out, "out");
    *out = new zc_coupling{zcoup::parse_coupling_csv(text, mu->m, nu->m)};
  });
}

zc_status zc_coupling_to_csv(const zc_coupling* g, char** out) {
  return guard([&] {
    need(g, "coupling");
    need(out, "out");
    *out = dup_string(zcoup::format_coupling_csv(g->g));
  });
}

void zc_coupling_free(zc_coupling* g) { delete g; }
size_t zc_coupling_size(const zc_coupling* g) { return g ? g->g.entries.size() : 0; }

zc_status zc_coupling_entry(const zc_coupling* g, size_t i, long* src, long* dst, double* mass) {
  return guard([&] {
    need(g, "coupling");
    zcoup::require(i < g->g.entries.size(), "entry index out of range");
    const auto& e = g->g.entries[i];
    if (src) *src = e.src;
    if (dst) *dst = e.dst;
    if (mass) *mass = e.mass;
  });
}

double zc_coupling_cost(const zc_coupling* g) { return g ? zcoup::coupling_cost(g->g) : 0.0; }

zc_status zc_coupling_margins(const zc_coupling* g, double* max_left, double* max_right) {
  return guard([&] {
    need(g, "coupling");
    const auto r = zcoup::check_margins(g->g);
    if (max_left) *max_left = r.max_left_violation;
    if (max_right) *max_right = r.max_right_violation;
  });
}

zc_status zc_coupling_residuals(const zc_coupling* g, double* left, double* right) {
  return guard([&] {
    need(g, "coupling");
    const auto r = zcoup::residual_decomposition(g->g);
    if (left) *left = r.left_residual;
    if (right) *right = r.right_residual;
  });
}

int zc_coupling_is_proper(const zc_coupling* g, double tol) {
  return g && zcoup::check_proper(g->g, tol) ? 1 : 0;
}

zc_status zc_coupling_support(const zc_coupling* g, int with_origin, zc_support** out) {
  return guard([&] {
    need(g, "coupling");
    need(out, "out");
    *out = new zc_support{zcoup::coupling_support(g->g, with_origin != 0)};
  });
}

zc_status zc_coupling_report_json(const zc_coupling* g, double tol, char** out) {
  return guard([&] {
    need(g, "coupling");
    need(out, "out");
    const auto res = zcoup::residual_decomposition(g->g);
    const auto margins = zcoup::check_margins(g->g);
    const auto cm = zcoup::is_cyclically_monotone(zcoup::coupling_support(g->g, true), tol);
    zcoup::Json j;
    j["cost"] = zcoup::coupling_cost(g->g);
    j["left_residual"] = res.left_residual;
    j["right_residual"] = res.right_residual;
    j["cm_check"] = cm.ok;
    j["proper"] = zcoup::check_proper(g->g, tol);
    j["max_margin_violation"] = std::max(margins.max_left_violation, margins.max_right_violation);
    j["entries"] = g->g.entries.size();
    *out = dup_string(zcoup::dump_json(j));
  });
}

// ---------------------------------------------------------------- supports

zc_status zc_support_parse_csv(const char* text, zc_support** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new zc_support{zcoup::parse_support_csv(text)};
  });
}

zc_status zc_support_read_csv(const char* path, zc_support** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new zc_support{zcoup::parse_support_csv(zcoup::read_text_file(path))};
  });
}

zc_status zc_support_to_csv(const zc_support* s, char** out) {
  return guard([&] {
    need(s, "support");
    need(out, "out");
    *out = dup_string(zcoup::format_support_csv(s->s));
  });
}

void zc_support_free(zc_support* s) { delete s; }
size_t zc_support_size(const zc_support* s) { return s ? s->s.size() : 0; }
size_t zc_support_dim(const zc_support* s) { return s ? s->s.dim() : 0; }

zc_status zc_support_is_monotone(const zc_support* s, double tol, int* ok) {
  return guard([&] {
    need(s, "support");
    need(ok, "ok");
    *ok = zcoup::is_monotone(s->s, tol).ok ? 1 : 0;
  });
}

zc_status zc_support_is_cyclically_monotone(const zc_support* s, double tol, int* ok,
                                            char** report) {
  return guard([&] {
    need(s, "support");
    need(ok, "ok");
    const auto r = zcoup::is_cyclically_monotone(s->s, tol);
    *ok = r.ok ? 1 : 0;
    if (report) {
      zcoup::Json j;
      j["cyclically_monotone"] = r.ok;
      j["pairs"] = s->s.size();
      j["tolerance"] = r.tolerance;
      if (!r.ok) {
        j["witness_cycle"] = r.cycle;
        j["cycle_value"] = r.cycle_value;
      }
      *report = dup_string(zcoup::dump_json(j));
    }
  });
}

zc_status zc_potential_build(const zc_support* s, size_t base_index, double tol,
                             zc_potential** out) {
  return guard([&] {
    need(s, "support");
    need(out, "out");
    *out = new zc_potential{zcoup::rockafellar_potential(s->s, base_index, tol)};
  });
}

zc_status zc_potential_to_csv(const zc_potential* p, char** out) {
  return guard([&] {
    need(p, "potential");
    need(out, "out");
    *out = dup_string(zcoup::format_potential_csv(p->p));
  });
}

void zc_potential_free(zc_potential* p) { delete p; }

zc_status zc_potential_contains(const zc_potential* p, const double* x, const double* v, double tol,
                                int* ok) {
  return guard([&] {
    need(p, "potential");
    need(x, "x");
    need(v, "v");
    need(ok, "ok");
    const std::size_t d = p->p.dim();
    *ok = zcoup::subdifferential_contains(p->p, {x, d}, {v, d}, tol) ? 1 : 0;
  });
}

zc_status zc_push_forward_potential(const zc_potential* p, const zc_measure* m, zc_measure** out,
                                    double* origin_residual) {
  return guard([&] {
    need(p, "potential");
    need(m, "measure");
    need(out, "out");
    auto r = zcoup::push_forward(p->p, m->m);
    if (origin_residual) *origin_residual = r.origin_residual;
    *out = new zc_measure{std::move(r.measure)};
  });
}

// ----------------------------------------------------------------- reports

zc_status zc_check_criteria(const zc_homog* mu, const zc_homog* nu, int grid, int* holds,
                            char** report) {
  return guard([&] {
    need(mu, "mu");
    need(nu, "nu");
    const auto nec = zcoup::check_necessary(mu->h, nu->h, grid);
    const auto cone = zcoup::check_cone_condition(mu->h, nu->h, zcoup::kDefaultEpsGrid, grid);
    if (holds) *holds = cone.holds ? 1 : 0;
    if (report) {
      zcoup::Json j;
      j["criterion"] = "cone_condition";
      j["holds"] = cone.holds;
      zcoup::Json details = zcoup::Json::array();
      for (const auto& d : cone.directions) {
        zcoup::Json row;
        row["direction"] = d.direction;
        row["verdict"] = verdict_name(d.verdict);
        row["eps"] = d.eps ? zcoup::Json(*d.eps) : zcoup::Json(nullptr);
        row["halfspace_mass"] = d.halfspace_mass;
        details.push_back(row);
      }
      j["details"] = details;
      zcoup::Json n;
      n["criterion"] = "necessary_condition";
      n["holds"] = nec.holds;
      n["details"] = nec.failing_direction
                         ? zcoup::Json::array({{{"failing_direction", *nec.failing_direction}}})
                         : zcoup::Json::array();
      zcoup::Json all;
      all["cone"] = j;
      all["necessary"] = n;
      *report = dup_string(zcoup::dump_json(all));
    }
  });
}

zc_status zc_probe_halfspace(const zc_homog* mu, const zc_homog* nu, int grid, char** report) {
  return guard([&] {
    need(mu, "mu");
    need(nu, "nu");
    need(report, "report");
    const auto probes = zcoup::probe_halfspace(mu->h, nu->h, grid);
    zcoup::Json j;
    j["criterion"] = "halfspace_probe";
    j["experimental"] = true;
    bool all = true;
    zcoup::Json details = zcoup::Json::array();
    for (const auto& p : probes) {
      all = all && p.mu_dominates;
      details.push_back({{"direction", p.direction},
                         {"mu_cap_mass", p.mu_mass},
                         {"nu_cap_mass", p.nu_mass},
                         {"mu_dominates", p.mu_dominates}});
    }
    j["holds"] = all;
    j["details"] = details;
    *report = dup_string(zcoup::dump_json(j));
  });
}

zc_status zc_oracle_verify(int resolution, double tol, double grad_scale, int* pass,
                           char** report) {
  return guard([&] {
    const auto s = zcoup::run_oracle_suite(resolution, tol, grad_scale);
    if (pass) *pass = s.pass ? 1 : 0;
    if (report) {
      zcoup::Json j;
      j["resolution"] = resolution;
      j["tol"] = tol;
      j["grad_scale"] = grad_scale;
      j["pushforward_max_rel_error"] = s.push.max_rel_error;
      j["pushforward_total_mass"] = s.push.total_mass;
      j["right_half_plane_mass"] = s.push.right_half_mass;
      j["pushforward_sets"] = s.push.masses.size();
      j["pushforward_pass"] = s.push.pass;
      j["fd_max_error"] = s.fd_max_error;
      j["value_homogeneity_error"] = s.value_homogeneity_error;
      j["grad_homogeneity_error"] = s.grad_homogeneity_error;
      j["pass"] = s.pass;
      *report = dup_string(zcoup::dump_json(j));
    }
  });
}

zc_status zc_tail_experiment(const char* p_config, const char* q_config,
                             const zc_experiment_params* params, char** csv, char** summary) {
  return guard([&] {
    need(p_config, "p_config");
    need(q_config, "q_config");
    need(params, "params");
    if (params->t_count > 0) need(params->t_grid, "t_grid");
    zcoup::ExperimentConfig cfg{
        .p = zcoup::RVModel::from_config(zcoup::parse_config(p_config)),
        .q = zcoup::RVModel::from_config(zcoup::parse_config(q_config)),
        .n = params->n,
        .t_grid = std::vector<double>(params->t_grid, params->t_grid + params->t_count),
        .seeds = params->seeds,
        .master_seed = params->master_seed,
        .window = {params->window_r_lo, params->window_r_hi, params->window_y_max},
        .r_grid = {1.0, 2.0, 4.0},
        .reference_resolution = params->reference_resolution,
    };
    const auto res = zcoup::tail_coupling_experiment(cfg);
    if (csv) *csv = dup_string(zcoup::format_experiment_csv(res.rows));
    if (summary) *summary = dup_string(zcoup::dump_json(zcoup::experiment_summary_json(cfg, res)));
  });
}

zc_status zc_write_file(const char* path, const char* text) {
  return guard([&] {
    need(path, "path");
    need(text, "text");
    zcoup::write_text_file(path, text);
  });
}

}  // extern "C"
