#include "mdseries/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "mdseries/experiments.hpp"

namespace mdseries::cli {

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a == std::string::npos) throw ArgumentError("empty item in list '" + text + "'");
    out.push_back(item.substr(a, b - a + 1));
  }
  if (out.empty()) throw ArgumentError("empty list");
  return out;
}

int parse_int(const std::string& text) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ArgumentError("not an integer: '" + text + "'");
  return v;
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split(text)) out.push_back(parse_precision(s));
  return out;
}

std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : split(text)) out.push_back(parse_int(s));
  return out;
}

/// Writes to the named file, or to `fallback` when the name is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ArgumentError("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void print_trace(std::ostream& os, const NewtonTrace& trace) {
  char buf[128];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof buf, "  iteration %2d : |dx| = %.6E  (%.3f s)\n", r.iteration,
                  r.update_norm, r.wall_seconds);
    os << buf;
  }
}

unsigned max_workers(const RunConfig& cfg) {
  return *std::max_element(cfg.workers.begin(), cfg.workers.end());
}

int cmd_norm_demo(const RunConfig& cfg, std::ostream& out) {
  bool ok = true;
  for (int k : cfg.levels) {
    const NormDemoRow row = norm_demo(k, cfg.seed);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s : %s   |norm - 8| = %.3E (limit %.0E)%s\n",
                  std::string(precision_name(k)).c_str(), row.display.c_str(), row.residual,
                  row.threshold, row.ok ? "" : "  FAILED");
    out << buf;
    ok = ok && row.ok;
  }
  return ok ? kOk : kNumericalFailure;
}

int cmd_circle_demo(const RunConfig& cfg, bool tolerance_given, std::ostream& out) {
  bool ok = true;
  for (int k : cfg.levels) {
    NewtonConfig ncfg;
    ncfg.tolerance = tolerance_given ? cfg.tolerance : (k == 1 ? 1e-12 : k == 2 ? 1e-30 : 1e-32);
    ncfg.max_iterations = cfg.max_iterations;
    const int degree = cfg.degrees.front();
    const CircleDemoResult res = circle_demo(k, degree, ncfg, max_workers(cfg));
    out << precision_name(k) << ", degree " << degree << ", tolerance " << ncfg.tolerance << '\n';
    if (!res.trace.converged) {
      out << "no convergence" << (res.trace.diverged ? " (diverged)" : "") << '\n';
      print_trace(out, res.trace);
      ok = false;
      continue;
    }
    out << "converged in " << res.trace.iterations() << " iterations\n";
    out << "x = " << res.x_series << '\n';
    out << "y = " << res.y_series << '\n';
    if (res.cosine_check) {
      out << "cosine coefficients " << (*res.cosine_check ? "match" : "DO NOT match") << '\n';
      ok = ok && *res.cosine_check;
    }
  }
  return ok ? kOk : kNumericalFailure;
}

int cmd_cost_report(const RunConfig& cfg, std::ostream& out) {
  print_cost_table(out, cost_table(cfg.levels));
  return kOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  BenchConfig b;
  b.seed = cfg.seed;
  b.npolys = cfg.npolys;
  b.nvars = cfg.nvars;
  b.terms = cfg.terms;
  b.max_exponent = cfg.max_exponent;
  b.degrees = cfg.degrees;
  b.levels = cfg.levels;
  b.workers = cfg.workers;
  if (std::find(b.workers.begin(), b.workers.end(), 1u) == b.workers.end()) {
    b.workers.insert(b.workers.begin(), 1u);
  }
  b.tolerance = cfg.tolerance;
  b.max_iterations = cfg.max_iterations;
  b.repetitions = cfg.repetitions;

  Sink csv(cfg.out, out);
  csv.stream() << kBenchCsvHeader << '\n';
  const auto rows = run_bench(b, [&](const BenchRow& row) {
    write_bench_rows(csv.stream(), row.problem, std::span<const BenchResult>(&row.result, 1));
    csv.stream().flush();
  });
  if (!cfg.plot.empty()) {
    Sink plot(cfg.plot, out);
    write_plot_data(plot.stream(), rows);
  }
  return kOk;
}

template <int K>
int newton_on_file(const RunConfig& cfg, std::istream& is, const SystemHeader& h,
                   std::ostream& out, std::ostream& err) {
  const PolySystem<K> f = read_system_body<K>(is, h);
  Vector<K> x0;
  std::string start = cfg.start;
  if (start.empty() && std::ifstream(cfg.system + ".start")) start = cfg.system + ".start";
  if (!start.empty()) {
    std::ifstream in(start);
    if (!in) throw ArgumentError("cannot read start point '" + start + "'");
    x0 = read_vector<K>(in);
  } else {
    x0 = unit_modulus_vector<K>(cfg.seed, static_cast<std::size_t>(h.nvars));
  }
  NewtonConfig ncfg;
  ncfg.tolerance = cfg.tolerance;
  ncfg.max_iterations = cfg.max_iterations;
  const auto res = parallel_newton<K>(f, x0, ncfg, max_workers(cfg));
  {
    Sink csv(cfg.out, out);
    write_trace_csv(csv.stream(), res.trace);
  }
  std::ostream& log = cfg.out.empty() ? err : out;
  log << (res.trace.converged ? "converged" : res.trace.diverged ? "diverged" : "not converged")
      << " after " << res.trace.iterations() << " iterations, |dx| = "
      << format_scientific(res.trace.final_update_norm()) << '\n';
  return res.trace.converged ? kOk : kNumericalFailure;
}

int cmd_newton(const RunConfig& cfg, bool precision_given, std::ostream& out,
               std::ostream& err) {
  std::ifstream in(cfg.system);
  if (!in) throw ArgumentError("cannot read system file '" + cfg.system + "'");
  const SystemHeader h = read_system_header(in);
  const int k = precision_given ? cfg.levels.front() : h.k;
  return with_level(k, [&](auto level) {
    return newton_on_file<decltype(level)::value>(cfg, in, h, out, err);
  });
}

int cmd_gen_system(const RunConfig& cfg, std::ostream& out) {
  const int k = cfg.levels.front();
  const int degree = cfg.degrees.front();
  return with_level(k, [&](auto level) {
    constexpr int K = decltype(level)::value;
    Sink sys(cfg.out, out);
    if (cfg.npolys == cfg.nvars) {
      const auto [f, z] =
          balanced_curve_system<K>(cfg.seed, cfg.nvars, cfg.terms, cfg.max_exponent, degree);
      write_system(sys.stream(), f);
      const std::string start =
          !cfg.start.empty() ? cfg.start : (cfg.out.empty() ? "" : cfg.out + ".start");
      if (!start.empty()) {
        Sink s(start, out);
        write_vector<K>(s.stream(), z);
      }
    } else {
      write_system(sys.stream(), random_system<K>(cfg.seed, cfg.npolys, cfg.nvars, cfg.terms,
                                                  cfg.max_exponent, degree));
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace

std::vector<unsigned> parse_workers(const std::string& text) {
  if (text == "max") {
    const unsigned cores = physical_cores();
    return cores > 1 ? std::vector<unsigned>{1u, cores} : std::vector<unsigned>{1u};
  }
  std::vector<unsigned> out;
  for (const auto& s : split(text)) {
    const int w = parse_int(s);
    if (w < 1) throw ArgumentError("worker counts must be positive");
    out.push_back(static_cast<unsigned>(w));
  }
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.nvars < 1) throw ArgumentError("--vars must be at least 1");
  if (cfg.npolys < cfg.nvars) throw ArgumentError("--polys must be at least --vars");
  if (cfg.terms < 1) throw ArgumentError("--terms must be at least 1");
  if (cfg.max_exponent < 0) throw ArgumentError("--max-exp must be non-negative");
  for (int d : cfg.degrees) {
    if (d != 8 && d != 16 && d != 24 && d != 32) {
      throw ArgumentError("--degree must be one of 8, 16, 24, 32");
    }
  }
  if (cfg.levels.empty() || cfg.degrees.empty() || cfg.workers.empty()) {
    throw ArgumentError("empty list");
  }
  for (unsigned w : cfg.workers) {
    if (w < 1) throw ArgumentError("worker counts must be positive");
  }
  if (!(cfg.tolerance > 0.0)) throw ArgumentError("--tol must be positive");
  if (cfg.max_iterations && *cfg.max_iterations < 1) {
    throw ArgumentError("--max-iters must be at least 1");
  }
  if (cfg.repetitions < 1) throw ArgumentError("--repetitions must be at least 1");
  if (cfg.command == "newton" && cfg.system.empty()) {
    throw ArgumentError("newton needs --system FILE");
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Newton's method on power series in multiple double precision", "mdseries"};
  app.set_config("--config", "", "key=value file; command line flags take precedence");
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.seed = 2024;
  std::string levels_text = "d,dd,td,qd,pd,od,xd";
  std::string degrees_text = "8,16,32";
  std::string workers_text = "1,2,4,8";
  int max_iters = 0;

  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--polys", cfg.npolys, "number of polynomials N")->capture_default_str();
  app.add_option("--vars", cfg.nvars, "number of variables n")->capture_default_str();
  app.add_option("--terms", cfg.terms, "monomials per polynomial")->capture_default_str();
  app.add_option("--max-exp", cfg.max_exponent, "largest exponent of a variable")
      ->capture_default_str();
  auto* degree_opt = app.add_option("--degree", degrees_text, "truncation degree(s): 8,16,24,32")
                         ->capture_default_str();
  auto* precision_opt =
      app.add_option("--precision", levels_text, "precision list: d,dd,td,qd,pd,od,xd")
          ->capture_default_str();
  app.add_option("--workers", workers_text, "worker counts, e.g. 1,2,4,8, or max")
      ->capture_default_str();
  auto* tol_opt = app.add_option("--tol", cfg.tolerance, "tolerance on |dx|")->capture_default_str();
  auto* iters_opt = app.add_option("--max-iters", max_iters, "iteration limit");
  app.add_option("--repetitions", cfg.repetitions, "timed runs per measurement")
      ->capture_default_str();
  app.add_option("--out", cfg.out, "output file (default: standard output)");
  app.add_option("--plot", cfg.plot, "long-format plot data file (bench)");
  app.add_option("--system", cfg.system, "system file (newton)");
  app.add_option("--start", cfg.start, "start point file (newton, gen-system)");

  const std::pair<const char*, const char*> commands[] = {
      {"norm-demo", "2-norm of a 64-entry unit-modulus vector at each precision"},
      {"circle-demo", "cosine and sine series from x^2 + y^2 = 1"},
      {"bench", "speedup and efficiency over worker counts (CSV)"},
      {"cost-report", "hardware operations per multiple double operation"},
      {"newton", "Newton's method on a saved system"},
      {"gen-system", "write a random system (and start point) to a file"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->fallthrough();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  bool precision_given = precision_opt->count() > 0;
  try {
    if (!precision_given && (cfg.command == "circle-demo" || cfg.command == "gen-system")) {
      levels_text = cfg.command == "circle-demo" ? "d" : "dd";
    }
    if (degree_opt->count() == 0 && cfg.command != "bench") degrees_text = "8";
    cfg.levels = parse_levels(levels_text);
    cfg.degrees = parse_degrees(degrees_text);
    cfg.workers = parse_workers(workers_text);
    if (iters_opt->count() > 0) cfg.max_iterations = max_iters;
    validate(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (cfg.command == "norm-demo") return cmd_norm_demo(cfg, out);
    if (cfg.command == "circle-demo") return cmd_circle_demo(cfg, tol_opt->count() > 0, out);
    if (cfg.command == "cost-report") return cmd_cost_report(cfg, out);
    if (cfg.command == "bench") return cmd_bench(cfg, out);
    if (cfg.command == "newton") return cmd_newton(cfg, precision_given, out, err);
    return cmd_gen_system(cfg, out);
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace mdseries::cli
