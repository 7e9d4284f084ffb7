#include "mdseries/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace mdseries {

double norm_demo_threshold(int k) {
  switch (k) {
    case 1: return 1e-13;
    case 2: return 1e-30;
    case 3: return 1e-46;
    case 4: return 1e-62;
    case 5: return 1e-78;
    case 8: return 1e-126;
    case 10: return 1e-157;
    default: throw ArgumentError("unsupported precision level " + std::to_string(k));
  }
}

NormDemoRow norm_demo(int k, std::uint64_t seed, std::size_t n) {
  return with_level(k, [&](auto level) {
    constexpr int K = decltype(level)::value;
    const Expansion<K> norm = norm2<K>(unit_modulus_vector<K>(seed, n));
    const Expansion<K> exact = md_sqrt(Expansion<K>(static_cast<double>(n)));
    NormDemoRow row;
    row.k = k;
    row.display = to_string(norm);
    row.residual = std::abs((norm - exact).to_double());
    row.threshold = norm_demo_threshold(k);
    row.ok = row.residual <= row.threshold;
    return row;
  });
}

CircleDemoResult circle_demo(int k, int degree, const NewtonConfig& cfg, unsigned workers) {
  return with_level(k, [&](auto level) {
    constexpr int K = decltype(level)::value;
    const auto res = parallel_newton<K>(circle_system<K>(degree),
                                        Vector<K>{Complex<K>(1.0), Complex<K>(0.0)}, cfg,
                                        workers);
    CircleDemoResult out;
    out.k = k;
    out.degree = degree;
    out.trace = res.trace;
    out.x_series = to_string(res.x[0]);
    out.y_series = to_string(res.x[1]);
    for (int j = 0; j <= degree; ++j) {
      out.x_leading.push_back(res.x[0][j].re[0]);
      if (j % 2 == 1) out.x_odd_modulus.push_back(res.x[0][j].magnitude());
    }
    if (k == 1 && degree == 8) {
      const double cosine[] = {1.0, -0.5, 1.0 / 24, -1.0 / 720, 1.0 / 40320};
      bool ok = true;
      for (int i = 0; i <= 4; ++i) {
        const auto& c = res.x[0][2 * i];
        ok = ok && std::abs(c.re[0] - cosine[i]) <= 1e-13 && std::abs(c.im[0]) <= 1e-13;
      }
      for (double m : out.x_odd_modulus) ok = ok && m <= 1e-13;
      out.cosine_check = ok;
    }
    return out;
  });
}

std::vector<CostRow> cost_table(const std::vector<int>& levels) {
  const CostReport base = report_costs(1);
  std::vector<CostRow> rows;
  for (int k : levels) {
    CostRow r;
    r.k = k;
    r.measured = report_costs(k);
    r.published = published_costs(k);
    r.add_ratio = static_cast<double>(r.measured.add.total()) / base.add.total();
    r.mul_ratio = static_cast<double>(r.measured.mul.total()) / base.mul.total();
    r.div_ratio = static_cast<double>(r.measured.div.total()) / base.div.total();
    rows.push_back(r);
  }
  return rows;
}

void print_cost_table(std::ostream& os, const std::vector<CostRow>& rows) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-3s %-4s %7s %7s %7s %7s %7s %8s %9s %10s\n", "k", "op",
                "+", "-", "*", "/", "fma", "total", "reference", "ratio(k=1)");
  os << buf;
  for (const auto& r : rows) {
    const struct {
      const char* name;
      const OpCounter& m;
      const OpCounter& p;
      double ratio;
    } ops[] = {{"add", r.measured.add, r.published.add, r.add_ratio},
               {"mul", r.measured.mul, r.published.mul, r.mul_ratio},
               {"div", r.measured.div, r.published.div, r.div_ratio}};
    for (const auto& op : ops) {
      std::snprintf(buf, sizeof buf, "%-3d %-4s %7llu %7llu %7llu %7llu %7llu %8llu %9llu %10.1f\n",
                    r.k, op.name, static_cast<unsigned long long>(op.m.adds),
                    static_cast<unsigned long long>(op.m.subs),
                    static_cast<unsigned long long>(op.m.muls),
                    static_cast<unsigned long long>(op.m.divs),
                    static_cast<unsigned long long>(op.m.fmas),
                    static_cast<unsigned long long>(op.m.total()),
                    static_cast<unsigned long long>(op.p.total()), op.ratio);
      os << buf;
    }
  }
}

namespace {

template <int K>
std::pair<PolySystem<K>, Vector<K>> bench_problem(const BenchConfig& cfg, int degree) {
  if (cfg.npolys == cfg.nvars) {
    return balanced_curve_system<K>(cfg.seed, cfg.nvars, cfg.terms, cfg.max_exponent, degree);
  }
  return {random_system<K>(cfg.seed, cfg.npolys, cfg.nvars, cfg.terms, cfg.max_exponent, degree),
          unit_modulus_vector<K>(cfg.seed ^ 0x5bd1e995ULL, static_cast<std::size_t>(cfg.nvars))};
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg,
                                const std::function<void(const BenchRow&)>& sink) {
  std::vector<BenchRow> rows;
  for (int degree : cfg.degrees) {
    for (int k : cfg.levels) {
      with_level(k, [&](auto level) {
        constexpr int K = decltype(level)::value;
        const auto [f, x0] = bench_problem<K>(cfg, degree);
        NewtonConfig ncfg;
        ncfg.tolerance = cfg.tolerance;
        ncfg.max_iterations = cfg.max_iterations;
        if (cfg.npolys != cfg.nvars) {
          ncfg.divergence_factor = std::numeric_limits<double>::infinity();
        }
        const auto results = measure_efficiency<K>(f, x0, ncfg, cfg.workers, cfg.repetitions);
        for (const auto& r : results) {
          BenchRow row;
          row.problem = {cfg.seed, cfg.npolys, cfg.nvars, cfg.terms, degree, k};
          row.result = r;
          rows.push_back(row);
          if (sink) sink(row);
        }
      });
    }
  }
  return rows;
}

void write_plot_data(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "degree k workers efficiency speedup\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d %d %u %.4f %.4f\n", r.problem.degree, r.problem.k,
                  r.result.workers, r.result.efficiency, r.result.speedup);
    os << buf;
  }
}

std::vector<LadderRow> precision_ladder(std::uint64_t seed, int n, int terms, int max_exponent,
                                        int degree, const std::vector<int>& levels,
                                        const NewtonConfig& cfg, unsigned workers) {
  std::vector<LadderRow> rows;
  for (int k : levels) {
    with_level(k, [&](auto level) {
      constexpr int K = decltype(level)::value;
      const auto [f, z] = balanced_curve_system<K>(seed, n, terms, max_exponent, degree);
      rows.push_back({k, parallel_newton<K>(f, z, cfg, workers).trace});
    });
  }
  return rows;
}

}  // namespace mdseries
