// qmst: generate instances, compute lower bounds, run structural checks.
#include "qmst/qmst.h"

#include <CLI11.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr const char* kCsvHeader = "n,d,m,UB,LB_DNN,gap_dnn,time_dnn,LB_CUTS,gap_cuts,time_total,iterations,cuts,closed";

struct InstanceDeleter {
  void operator()(qmst_instance* p) const { qmst_instance_free(p); }
};
struct ParamsDeleter {
  void operator()(qmst_params* p) const { qmst_params_free(p); }
};
struct ResultDeleter {
  void operator()(qmst_result* p) const { qmst_result_free(p); }
};
struct ReportDeleter {
  void operator()(qmst_report* p) const { qmst_report_free(p); }
};
using InstancePtr = std::unique_ptr<qmst_instance, InstanceDeleter>;
using ParamsPtr = std::unique_ptr<qmst_params, ParamsDeleter>;
using ResultPtr = std::unique_ptr<qmst_result, ResultDeleter>;
using ReportPtr = std::unique_ptr<qmst_report, ReportDeleter>;

class CliFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(qmst_status status, const std::string& what) {
  if (status != QMST_OK) {
    throw CliFailure(what + ": " + qmst_status_name(status) + ": " + qmst_last_error());
  }
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::string env_name(const std::string& key) {
  std::string out = "QMST_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string flag_name(const std::string& key) {
  std::string out = "--";
  for (char c : key) out += c == '_' ? '-' : c;
  return out;
}

struct SolveOptions {
  std::string instance;
  std::map<std::string, std::optional<double>> overrides;
  bool no_cuts = false;
  std::optional<double> ub;
  std::string csv;
  bool quiet = false;
};

ParamsPtr build_params(const SolveOptions& opt) {
  qmst_params* raw = nullptr;
  check(qmst_params_create(&raw), "creating parameters");
  ParamsPtr params(raw);
  for (const char* const* k = qmst_params_keys(); *k; ++k) {
    const std::string name = env_name(*k);
    if (const char* value = std::getenv(name.c_str())) {
      const auto v = parse_number(value);
      if (!v) throw CliFailure("environment variable " + name + " is not a number: '" + value + "'");
      check(qmst_params_set(params.get(), *k, *v), name);
    }
  }
  for (const auto& [key, value] : opt.overrides) {
    if (value) check(qmst_params_set(params.get(), key.c_str(), *value), flag_name(key));
  }
  if (opt.no_cuts) check(qmst_params_set(params.get(), "use_cuts", 0.0), "--no-cuts");
  return params;
}

std::string csv_row(const qmst_instance* inst, std::optional<double> ub, const qmst_summary& s) {
  const int n = qmst_instance_n(inst);
  const int m = qmst_instance_m(inst);
  auto gap = [&](double lb) { return ub && *ub != 0.0 ? fixed(100.0 * (*ub - lb) / *ub, 4) : std::string(); };
  std::string closed;
  if (ub && *ub - s.lb_dnn > 1e-12) closed = fixed(100.0 * (s.lb_cuts - s.lb_dnn) / (*ub - s.lb_dnn), 4);
  std::string row = std::to_string(n) + "," + std::to_string(qmst_instance_density(inst)) + "," + std::to_string(m) +
                    "," + (ub ? fixed(*ub, 6) : "") + "," + fixed(s.lb_dnn, 6) + "," + gap(s.lb_dnn) + "," +
                    fixed(s.time_dnn, 2) + "," + fixed(s.lb_cuts, 6) + "," + gap(s.lb_cuts) + "," +
                    fixed(s.time_total, 2) + "," + std::to_string(s.iterations) + "," +
                    std::to_string(s.cuts_added) + "," + closed;
  return row;
}

void append_csv(const std::string& path, const std::string& row) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw CliFailure("cannot open '" + path + "' for appending");
  if (fresh) out << kCsvHeader << "\n";
  out << row << "\n";
  if (!out.flush()) throw CliFailure("failed writing '" + path + "'");
}

InstancePtr load(const std::string& path) {
  qmst_instance* raw = nullptr;
  check(qmst_instance_read(path.c_str(), &raw), "reading '" + path + "'");
  return InstancePtr(raw);
}

int run_solve(const SolveOptions& opt) {
  InstancePtr inst = load(opt.instance);
  ParamsPtr params = build_params(opt);
  if (opt.ub) check(qmst_instance_set_ub(inst.get(), *opt.ub), "--ub");
  double ub_value = 0.0;
  std::optional<double> ub;
  if (qmst_instance_get_ub(inst.get(), &ub_value)) ub = ub_value;

  qmst_result* raw = nullptr;
  check(qmst_solve(inst.get(), params.get(), &raw), "solving");
  ResultPtr result(raw);
  qmst_summary s{};
  check(qmst_result_summary(result.get(), &s), "reading result");

  if (!opt.quiet) {
    std::cerr << "round  inner  valid_lb        best_lb         primal     dual       cuts  found  added  time\n";
    for (int r = 0; r < qmst_result_round_count(result.get()); ++r) {
      qmst_round o{};
      check(qmst_result_round(result.get(), r, &o), "reading round");
      char line[256];
      std::snprintf(line, sizeof line, "%5d  %5d  %-14.6f  %-14.6f  %.3e  %.3e  %4d  %5d  %5d  %.2f\n", o.round,
                    o.inner_iterations, o.valid_lb, o.best_lb, o.primal_residual, o.dual_residual, o.cuts_active,
                    o.cuts_found, o.cuts_added, o.seconds);
      std::cerr << line;
    }
    std::cerr << "termination: " << qmst_termination_name(s.termination) << ", tau " << s.tau << "\n";
  }

  const std::string row = csv_row(inst.get(), ub, s);
  if (!opt.csv.empty()) {
    append_csv(opt.csv, row);
  } else {
    std::cout << kCsvHeader << "\n" << row << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower bounds for the quadratic minimum spanning tree problem"};
  app.require_subcommand(1);

  struct {
    std::string family;
    int n = 0;
    int d = 100;
    std::uint64_t seed = 0;
    std::string out;
    double cmax_diag = 100.0;
    double cmax_off = 100.0;
  } gen;
  CLI::App* generate = app.add_subcommand("generate", "Generate a random instance");
  generate->add_option("--family", gen.family, "CP1..CP4, OPsym, OPvsym, OPesym, SV")->required();
  generate->add_option("--n", gen.n, "Number of vertices")->required();
  generate->add_option("--d", gen.d, "Edge density in percent");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--out", gen.out, "Output file")->required();
  generate->add_option("--cmax-diag", gen.cmax_diag, "SV: maximum linear cost");
  generate->add_option("--cmax-off", gen.cmax_off, "SV: maximum interaction cost");

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "Compute the lower bound of an instance");
  solve->add_option("instance", solve_opt.instance, "Instance file")->required();
  for (const char* const* k = qmst_params_keys(); *k; ++k) {
    if (std::string(*k) == "use_cuts") continue;
    solve->add_option(flag_name(*k), solve_opt.overrides[*k], "Override " + std::string(*k));
  }
  solve->add_flag("--no-cuts", solve_opt.no_cuts, "Stop after the first round (no cutting planes)");
  solve->add_option("--ub", solve_opt.ub, "Upper bound for gap reporting");
  solve->add_option("--csv", solve_opt.csv, "Append the result row to this CSV file");
  solve->add_flag("--quiet", solve_opt.quiet, "No per-round log");

  bool perturb = false;
  int max_n = 8;
  CLI::App* validate = app.add_subcommand("validate", "Run the structural checks");
  validate->add_option("--max-n", max_n, "Largest complete graph in the sweep")->check(CLI::Range(3, 10));
  validate->add_flag("--perturb", perturb)->group("");

  std::string exact_path;
  CLI::App* exact = app.add_subcommand("exact", "Exact optimum by enumeration (n <= 12)");
  exact->add_option("instance", exact_path, "Instance file")->required();

  std::string ub_path;
  int effort = 8;
  CLI::App* ub = app.add_subcommand("ub", "Heuristic upper bound");
  ub->add_option("instance", ub_path, "Instance file")->required();
  ub->add_option("--effort", effort, "Number of greedy starts")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      qmst_instance* raw = nullptr;
      check(qmst_instance_generate(gen.family.c_str(), gen.n, gen.d, gen.seed, gen.cmax_diag, gen.cmax_off, &raw),
            "generating");
      InstancePtr inst(raw);
      check(qmst_instance_write(inst.get(), gen.out.c_str()), "writing");
      return 0;
    }
    if (*solve) return run_solve(solve_opt);
    if (*validate) {
      qmst_report* raw = nullptr;
      check(qmst_validate(perturb ? 1 : 0, max_n, &raw), "validating");
      ReportPtr report(raw);
      std::cout << qmst_report_text(report.get());
      return qmst_report_passed(report.get()) ? 0 : 1;
    }
    if (*exact || *ub) {
      InstancePtr inst = load(*exact ? exact_path : ub_path);
      std::vector<double> x(static_cast<size_t>(qmst_instance_m(inst.get())));
      double value = 0.0;
      if (*exact) {
        check(qmst_exact(inst.get(), &value, x.data()), "enumerating");
      } else {
        check(qmst_upper_bound(inst.get(), effort, &value, x.data()), "heuristic");
      }
      std::cout << fixed(value, 6) << "\n";
      for (size_t k = 0; k < x.size(); ++k) {
        if (x[k] > 0.5) {
          int u = 0;
          int v = 0;
          check(qmst_instance_edge(inst.get(), static_cast<int>(k), &u, &v), "edge");
          std::cout << u + 1 << " " << v + 1 << "\n";
        }
      }
      return 0;
    }
  } catch (const CliFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
