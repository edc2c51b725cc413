// Benchmark CLI: runs the four SpMM kernels plus the rule-selected kernel
// over Matrix Market files and/or the built-in R-MAT grid, reporting GFLOPS
// and selection loss as CSV.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "spmk/spmk.hpp"

namespace {

struct Options {
  std::vector<std::string> matrix_paths;
  bool rmat_grid = false;
  std::vector<std::size_t> n_values{1, 2, 4, 8, 32, 128};
  std::string kernel = "all";
  std::size_t repeats = 7;
  std::size_t warmup = 2;
  std::size_t lane_width = 32;
  std::size_t seq_chunk = 256;
  std::size_t threads = 0;
  std::string csv_path;
  std::uint64_t seed = 42;
  int precision = 64;
  bool calibrate = false;
};

std::string base_name(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

template <typename T>
int run(const Options& opt) {
  using namespace spmk;

  std::vector<NamedMatrix<T>> corpus;
  for (const auto& path : opt.matrix_paths) {
    corpus.emplace_back(base_name(path), read_matrix_market<T>(path));
  }
  if (opt.rmat_grid) {
    for (auto& nm : full_corpus<T>(opt.seed)) corpus.push_back(std::move(nm));
  }
  if (corpus.empty()) {
    std::cerr << "no input: pass --matrix <path.mtx> and/or --rmat-grid\n";
    return 2;
  }

  KernelConfig cfg;
  cfg.lane_width = opt.lane_width;
  cfg.seq_chunk = opt.seq_chunk;
  cfg.worker_count = opt.threads;
  SelectorThresholds thresholds;

  std::vector<BenchRecord> records;
  if (opt.kernel == "all") {
    records = run_benchmark(corpus, opt.n_values, cfg, thresholds,
                            opt.repeats, opt.warmup);
  } else {
    for (const auto& [name, a] : corpus) {
      const auto features = extract_features(a);
      for (std::size_t n : opt.n_values) {
        const auto x = make_dense<T>(a.num_cols, Index(n), 0x00D5EED + n);
        const auto oracle = oracle_spmm(a, x);
        const bool is_auto = opt.kernel == "auto";
        const KernelId id = is_auto ? select_kernel(features, n, thresholds)
                                    : parse_kernel(opt.kernel);
        BenchRecord rec = measure_kernel(name, a, x, oracle, id, cfg,
                                         opt.repeats, opt.warmup);
        rec.selected_by_rule = is_auto;
        records.push_back(std::move(rec));
      }
    }
  }

  SelectionLossSummary summary;
  if (opt.kernel == "all") {
    summary = summarize_selection_loss(records);
    std::printf("mean rule-based loss: %.4f\n", mean_per_n_loss(summary));
    for (const auto& [k, l] : summary.single_kernel_loss) {
      std::printf("always-%s loss:      %.4f\n", k.c_str(), l);
    }
  }

  if (!opt.csv_path.empty()) {
    std::ofstream out(opt.csv_path);
    if (!out) {
      std::cerr << "cannot open " << opt.csv_path << " for writing\n";
      return 2;
    }
    emit_csv(records, summary, out);
  } else {
    emit_csv(records, summary, std::cout);
  }

  if (opt.calibrate) {
    std::vector<CalibrationRecord> cal;
    std::map<std::string, MatrixFeatures> features;
    for (const auto& [name, a] : corpus) features[name] = extract_features(a);
    for (const auto& r : records) {
      if (r.selected_by_rule) continue;
      cal.push_back({features.at(r.matrix_name), r.n, parse_kernel(r.kernel),
                     r.gflops});
    }
    const auto t = calibrate_thresholds(cal);
    std::printf("calibrated thresholds: n_parallel_max=%zu t_parallel_avg=%g "
                "t_cv=%g\n", t.n_parallel_max, t.t_parallel_avg, t.t_cv);
  }

  for (const auto& r : records) {
    if (!r.correct) {
      std::cerr << "correctness failure: " << r.matrix_name << " n=" << r.n
                << " kernel=" << r.kernel << "\n";
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Adaptive workload-balanced / parallel-reduction sparse "
               "matrix kernel benchmark"};
  app.add_option("--matrix", opt.matrix_paths,
                 "Matrix Market coordinate file(s)");
  app.add_flag("--rmat-grid", opt.rmat_grid,
               "include the built-in 27-matrix R-MAT grid plus edge cases");
  app.add_option("--n", opt.n_values, "dense matrix widths to sweep")
      ->delimiter(',');
  app.add_option("--kernel", opt.kernel,
                 "auto|par-rs|par-ws|seq-rs|seq-ws|all")
      ->check(CLI::IsMember({"auto", "par-rs", "par-ws", "seq-rs", "seq-ws",
                             "all"}));
  app.add_option("--repeats", opt.repeats, "measured runs per cell (median)");
  app.add_option("--warmup", opt.warmup, "discarded runs per cell");
  app.add_option("--lane-width", opt.lane_width, "lane group width W");
  app.add_option("--seq-chunk", opt.seq_chunk,
                 "nonzeros per unit for the sequential balanced kernel");
  app.add_option("--threads", opt.threads, "worker count (0 = all cores)");
  app.add_option("--csv", opt.csv_path, "write records to this CSV file");
  app.add_option("--seed", opt.seed, "seed for the R-MAT grid");
  app.add_option("--precision", opt.precision, "element width in bits")
      ->check(CLI::IsMember({32, 64}));
  app.add_flag("--calibrate", opt.calibrate,
               "grid-search selector thresholds on the produced records");
  CLI11_PARSE(app, argc, argv);

  try {
    return opt.precision == 32 ? run<float>(opt) : run<double>(opt);
  } catch (const spmk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
