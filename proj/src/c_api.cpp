#include "qmst/qmst.h"

#include "qmst/bounds.hpp"
#include "qmst/instances.hpp"
#include "qmst/prsm.hpp"
#include "qmst/validation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

struct qmst_instance {
  qmst::Instance inst;
};

struct qmst_params {
  qmst::PrsmParams p;
};

struct qmst_result {
  qmst::BoundResult r;
};

struct qmst_report {
  qmst::ValidationReport report;
  std::string text;
};

namespace {

thread_local std::string last_error;

qmst_status fail(qmst_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
qmst_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const qmst::ParseError& e) {
    return fail(QMST_ERR_PARSE, e.what());
  } catch (const qmst::IoError& e) {
    return fail(QMST_ERR_IO, e.what());
  } catch (const qmst::InvalidArgument& e) {
    return fail(QMST_ERR_INVALID_ARGUMENT, e.what());
  } catch (const qmst::Error& e) {
    return fail(QMST_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QMST_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QMST_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QMST_ERR_INTERNAL, "unknown error");
  }
}

#define QMST_REQUIRE(cond, msg) \
  do {                          \
    if (!(cond)) return fail(QMST_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

const char* const kParamKeys[] = {"tau",         "gamma1",          "gamma2",     "eps_prsm",
                                  "eps_proj",    "cut_violation_eps", "ncutsmax", "ncutsmin",
                                  "epslbimprov", "noutermax",       "max_total_iters", "time_limit",
                                  "max_dykstra_cycles", "use_cuts", nullptr};

bool integral(double v) { return std::isfinite(v) && std::floor(v) == v && std::abs(v) < 2e9; }

}  // namespace

extern "C" {

const char* qmst_last_error(void) { return last_error.c_str(); }

const char* qmst_version(void) { return "1.0.0"; }

const char* qmst_status_name(qmst_status status) {
  switch (status) {
    case QMST_OK: return "ok";
    case QMST_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QMST_ERR_IO: return "i/o error";
    case QMST_ERR_PARSE: return "parse error";
    case QMST_ERR_NUMERIC: return "numerical error";
    case QMST_ERR_LIMIT: return "limit exceeded";
    case QMST_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* qmst_termination_name(int termination) {
  if (termination < QMST_TERM_RESIDUAL || termination > QMST_TERM_TIME_LIMIT) return "unknown";
  // Names are string literals, so the view is null-terminated.
  return qmst::termination_name(static_cast<qmst::Termination>(termination)).data();
}

qmst_status qmst_instance_generate(const char* family, int n, int density, uint64_t seed, double cmax_diag,
                                   double cmax_off, qmst_instance** out) {
  QMST_REQUIRE(family && out, "null argument");
  return guarded([&] {
    qmst::InstanceSpec spec;
    spec.family = qmst::parse_family(family);
    spec.n = n;
    spec.density = density;
    spec.seed = seed;
    spec.cmax_diag = cmax_diag;
    spec.cmax_off = cmax_off;
    *out = new qmst_instance{qmst::generate(spec)};
    return QMST_OK;
  });
}

qmst_status qmst_instance_create(int n, int m, const int* endpoints, const double* q, qmst_instance** out) {
  QMST_REQUIRE(out && (m == 0 || (endpoints && q)), "null argument");
  QMST_REQUIRE(n >= 1 && m >= 0, "n must be positive and m nonnegative");
  return guarded([&] {
    std::vector<qmst::Edge> edges;
    for (int k = 0; k < m; ++k) edges.push_back({endpoints[2 * k], endpoints[2 * k + 1]});
    qmst::Instance inst{qmst::Graph(n, std::move(edges)), qmst::Matrix(m, m), std::nullopt, std::nullopt, {}};
    for (int e = 0; e < m; ++e) {
      for (int f = 0; f < m; ++f) inst.q(e, f) = q[static_cast<size_t>(e) * m + f];
    }
    qmst::validate_costs(inst.graph, inst.q);
    *out = new qmst_instance{std::move(inst)};
    return QMST_OK;
  });
}

qmst_status qmst_instance_read(const char* path, qmst_instance** out) {
  QMST_REQUIRE(path && out, "null argument");
  return guarded([&] {
    *out = new qmst_instance{qmst::read_instance(std::filesystem::path(path))};
    return QMST_OK;
  });
}

qmst_status qmst_instance_write(const qmst_instance* inst, const char* path) {
  QMST_REQUIRE(inst && path, "null argument");
  return guarded([&] {
    qmst::write_instance(inst->inst, std::filesystem::path(path));
    return QMST_OK;
  });
}

void qmst_instance_free(qmst_instance* inst) { delete inst; }

int qmst_instance_n(const qmst_instance* inst) { return inst ? inst->inst.graph.n() : -1; }

int qmst_instance_m(const qmst_instance* inst) { return inst ? inst->inst.graph.m() : -1; }

int qmst_instance_density(const qmst_instance* inst) {
  if (!inst) return -1;
  if (inst->inst.meta) return inst->inst.meta->density;
  const double n = inst->inst.graph.n();
  if (n < 2) return 0;
  return static_cast<int>(std::lround(100.0 * inst->inst.graph.m() / (n * (n - 1) / 2.0)));
}

qmst_status qmst_instance_edge(const qmst_instance* inst, int k, int* u, int* v) {
  QMST_REQUIRE(inst && u && v, "null argument");
  QMST_REQUIRE(k >= 0 && k < inst->inst.graph.m(), "edge index out of range");
  *u = inst->inst.graph.edge(k).u;
  *v = inst->inst.graph.edge(k).v;
  return QMST_OK;
}

qmst_status qmst_instance_cost(const qmst_instance* inst, int e, int f, double* out) {
  QMST_REQUIRE(inst && out, "null argument");
  const int m = inst->inst.graph.m();
  QMST_REQUIRE(e >= 0 && e < m && f >= 0 && f < m, "edge index out of range");
  *out = inst->inst.q(e, f);
  return QMST_OK;
}

int qmst_instance_get_ub(const qmst_instance* inst, double* ub) {
  if (!inst || !inst->inst.ub) return 0;
  if (ub) *ub = *inst->inst.ub;
  return 1;
}

qmst_status qmst_instance_set_ub(qmst_instance* inst, double ub) {
  QMST_REQUIRE(inst, "null argument");
  QMST_REQUIRE(std::isfinite(ub), "upper bound must be finite");
  inst->inst.ub = ub;
  return QMST_OK;
}

void qmst_instance_clear_ub(qmst_instance* inst) {
  if (inst) inst->inst.ub.reset();
}

qmst_status qmst_params_create(qmst_params** out) {
  QMST_REQUIRE(out, "null argument");
  return guarded([&] {
    *out = new qmst_params{};
    return QMST_OK;
  });
}

void qmst_params_free(qmst_params* params) { delete params; }

qmst_status qmst_params_set(qmst_params* params, const char* key, double value) {
  QMST_REQUIRE(params && key, "null argument");
  QMST_REQUIRE(!std::isnan(value), "parameter value is NaN");
  qmst::PrsmParams& p = params->p;
  const std::string k = key;
  auto as_int = [&](int& target) {
    if (!integral(value)) return fail(QMST_ERR_INVALID_ARGUMENT, "parameter '" + k + "' must be an integer");
    target = static_cast<int>(value);
    return QMST_OK;
  };
  qmst::PrsmParams next = p;
  qmst_status status = QMST_OK;
  if (k == "tau") {
    if (value == 0.0) {
      next.tau.reset();
    } else {
      next.tau = value;
    }
  } else if (k == "gamma1") {
    next.gamma1 = value;
  } else if (k == "gamma2") {
    next.gamma2 = value;
  } else if (k == "eps_prsm") {
    next.eps_prsm = value;
  } else if (k == "eps_proj") {
    next.eps_proj = value;
  } else if (k == "cut_violation_eps") {
    next.cut_violation_eps = value;
  } else if (k == "ncutsmax") {
    int v = 0;
    status = as_int(v);
    if (v < 0) {
      next.ncutsmax.reset();
    } else {
      next.ncutsmax = v;
    }
  } else if (k == "ncutsmin") {
    status = as_int(next.ncutsmin);
  } else if (k == "epslbimprov") {
    next.epslbimprov = value;
  } else if (k == "noutermax") {
    status = as_int(next.noutermax);
  } else if (k == "max_total_iters") {
    status = as_int(next.max_total_iters);
  } else if (k == "time_limit") {
    next.time_limit_secs = value;
  } else if (k == "max_dykstra_cycles") {
    status = as_int(next.max_dykstra_cycles);
  } else if (k == "use_cuts") {
    if (value != 0.0 && value != 1.0) return fail(QMST_ERR_INVALID_ARGUMENT, "use_cuts must be 0 or 1");
    next.use_cuts = value != 0.0;
  } else {
    return fail(QMST_ERR_INVALID_ARGUMENT, "unknown parameter '" + k + "'");
  }
  if (status != QMST_OK) return status;
  return guarded([&] {
    next.validate();
    p = next;
    return QMST_OK;
  });
}

qmst_status qmst_params_get(const qmst_params* params, const char* key, double* value) {
  QMST_REQUIRE(params && key && value, "null argument");
  const qmst::PrsmParams& p = params->p;
  const std::string k = key;
  if (k == "tau") {
    *value = p.tau.value_or(0.0);
  } else if (k == "gamma1") {
    *value = p.gamma1;
  } else if (k == "gamma2") {
    *value = p.gamma2;
  } else if (k == "eps_prsm") {
    *value = p.eps_prsm;
  } else if (k == "eps_proj") {
    *value = p.eps_proj;
  } else if (k == "cut_violation_eps") {
    *value = p.cut_violation_eps;
  } else if (k == "ncutsmax") {
    *value = p.ncutsmax.value_or(-1);
  } else if (k == "ncutsmin") {
    *value = p.ncutsmin;
  } else if (k == "epslbimprov") {
    *value = p.epslbimprov;
  } else if (k == "noutermax") {
    *value = p.noutermax;
  } else if (k == "max_total_iters") {
    *value = p.max_total_iters;
  } else if (k == "time_limit") {
    *value = p.time_limit_secs;
  } else if (k == "max_dykstra_cycles") {
    *value = p.max_dykstra_cycles;
  } else if (k == "use_cuts") {
    *value = p.use_cuts ? 1.0 : 0.0;
  } else {
    return fail(QMST_ERR_INVALID_ARGUMENT, "unknown parameter '" + k + "'");
  }
  return QMST_OK;
}

qmst_status qmst_params_validate(const qmst_params* params) {
  QMST_REQUIRE(params, "null argument");
  return guarded([&] {
    params->p.validate();
    return QMST_OK;
  });
}

const char* const* qmst_params_keys(void) { return kParamKeys; }

qmst_status qmst_solve(const qmst_instance* inst, const qmst_params* params, qmst_result** out) {
  QMST_REQUIRE(inst && out, "null argument");
  return guarded([&] {
    const qmst::PrsmParams p = params ? params->p : qmst::PrsmParams{};
    *out = new qmst_result{qmst::solve_bound(inst->inst, p)};
    return QMST_OK;
  });
}

qmst_status qmst_result_summary(const qmst_result* result, qmst_summary* out) {
  QMST_REQUIRE(result && out, "null argument");
  const qmst::BoundResult& r = result->r;
  out->lb_dnn = r.lb_dnn;
  out->time_dnn = r.time_dnn;
  out->lb_cuts = r.lb_cuts;
  out->time_total = r.time_total;
  out->tau = r.tau;
  out->iterations = r.iterations;
  out->cuts_added = r.cuts_added;
  out->rounds = static_cast<int>(r.outer_log.size());
  out->termination = static_cast<int>(r.termination);
  return QMST_OK;
}

int qmst_result_round_count(const qmst_result* result) {
  return result ? static_cast<int>(result->r.outer_log.size()) : -1;
}

qmst_status qmst_result_round(const qmst_result* result, int index, qmst_round* out) {
  QMST_REQUIRE(result && out, "null argument");
  QMST_REQUIRE(index >= 0 && index < static_cast<int>(result->r.outer_log.size()), "round index out of range");
  const qmst::OuterRound& o = result->r.outer_log[index];
  out->round = o.round;
  out->inner_iterations = o.inner_iterations;
  out->valid_lb = o.valid_lb;
  out->best_lb = o.best_lb;
  out->primal_residual = o.primal_residual;
  out->dual_residual = o.dual_residual;
  out->cuts_active = o.cuts_active;
  out->cuts_found = o.cuts_found;
  out->cuts_added = o.cuts_added;
  out->seconds = o.seconds;
  return QMST_OK;
}

void qmst_result_free(qmst_result* result) { delete result; }

qmst_status qmst_exact(const qmst_instance* inst, double* value, double* x) {
  QMST_REQUIRE(inst && value, "null argument");
  const qmst::EnumerationOptions options;
  if (inst->inst.graph.n() > options.max_vertices) {
    return fail(QMST_ERR_LIMIT, "exact enumeration is limited to n <= " + std::to_string(options.max_vertices));
  }
  return guarded([&] {
    const qmst::TreeSolution s = qmst::brute_force_qmstp(inst->inst, options);
    *value = s.value;
    if (x) std::copy(s.x.data(), s.x.data() + s.x.size(), x);
    return QMST_OK;
  });
}

qmst_status qmst_upper_bound(const qmst_instance* inst, int effort, double* value, double* x) {
  QMST_REQUIRE(inst && value, "null argument");
  QMST_REQUIRE(effort >= 1, "effort must be at least 1");
  return guarded([&] {
    const qmst::TreeSolution s = qmst::heuristic_upper_bound(inst->inst, effort);
    *value = s.value;
    if (x) std::copy(s.x.data(), s.x.data() + s.x.size(), x);
    return QMST_OK;
  });
}

qmst_status qmst_validate(int perturb, int max_n, qmst_report** out) {
  QMST_REQUIRE(out, "null argument");
  return guarded([&] {
    qmst::ValidationOptions options;
    options.perturb = perturb != 0;
    if (max_n > 0) options.max_n = max_n;
    auto* report = new qmst_report{qmst::run_validation(options), {}};
    report->text = report->report.text();
    *out = report;
    return QMST_OK;
  });
}

int qmst_report_passed(const qmst_report* report) { return report && report->report.passed() ? 1 : 0; }

const char* qmst_report_text(const qmst_report* report) { return report ? report->text.c_str() : ""; }

int qmst_report_group_count(const qmst_report* report) {
  return report ? static_cast<int>(report->report.groups.size()) : -1;
}

const char* qmst_report_group_name(const qmst_report* report, int index) {
  if (!report || index < 0 || index >= static_cast<int>(report->report.groups.size())) return nullptr;
  return report->report.groups[index].group.c_str();
}

int qmst_report_group_passed(const qmst_report* report, int index) {
  if (!report || index < 0 || index >= static_cast<int>(report->report.groups.size())) return 0;
  return report->report.groups[index].passed() ? 1 : 0;
}

void qmst_report_free(qmst_report* report) { delete report; }

}  // extern "C"
