// Command-line front end: benchmark reproduction, generic expmv solving with
// certified stopping, box-only bound evaluation, and elliptic diagnostics.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kexpm/bounds.hpp"
#include "kexpm/csv.hpp"
#include "kexpm/matrix_market.hpp"
#include "kexpm/problems.hpp"
#include "kexpm/svg.hpp"

namespace fs = std::filesystem;
using namespace kexpm;

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitNonConvergence = 3;

struct Options {
  int example_id = 0;
  std::vector<double> tau_list;
  double tol = 1e-8;
  int max_k = 120;
  std::string matrix_path;
  std::string vector_path;
  std::string out_dir = ".";
  std::uint64_t seed = kDefaultSeed;
  int simpson_n = 10;
  double crouzeix_q = kCrouzeixConstant;
  // bounds subcommand inputs
  double box_a = 0.0, box_b = 0.0, box_c = 0.0;
  double norm_a = 0.0;
  bool skew = false;
  std::optional<double> rho_disk;
  std::optional<double> level_r;
  int level_points = 256;
  double elliptic_m = 0.5;
};

std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

void write_chart(const fs::path& path, const std::string& title,
                 const std::vector<ConvergenceRecord>& recs) {
  auto collect = [&recs](auto&& get) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(recs.size());
    for (const auto& r : recs)
      pts.emplace_back(r.k, get(r));
    return pts;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ChartSeries> series;
  series.push_back({"error", SeriesStyle::solid,
                    collect([&](const ConvergenceRecord& r) { return r.err_true.value_or(nan); })});
  series.push_back({"a posteriori estimate", SeriesStyle::plus,
                    collect([](const ConvergenceRecord& r) { return r.est_post; })});
  series.push_back({"a priori bound", SeriesStyle::dashed,
                    collect([](const ConvergenceRecord& r) { return r.bnd_prior; })});
  bool any_saad = false, any_hl = false;
  for (const auto& r : recs) {
    any_saad |= r.bnd_saad.has_value();
    any_hl |= r.bnd_hl.has_value();
  }
  if (any_saad)
    series.push_back({"Saad bound", SeriesStyle::cross,
                      collect([&](const ConvergenceRecord& r) { return r.bnd_saad.value_or(nan); })});
  if (any_hl)
    series.push_back({"Hochbruck-Lubich bound", SeriesStyle::dotted,
                      collect([&](const ConvergenceRecord& r) { return r.bnd_hl.value_or(nan); })});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_svg_chart(out, title, series);
}

struct BenchmarkRun {
  std::string stem;
  std::string title;
  TestProblem problem;
  SpectralBox box;          // conformal box in general mode, H interval in skew mode
  double norm = 0.0;
  std::optional<double> rho_disk;
  double tau = 0.0;
};

void execute_run(const BenchmarkRun& run, const Options& opt) {
  const int kmax = static_cast<int>(std::min<Eigen::Index>(opt.max_k, run.problem.op->dim()));
  auto ctx = make_context(run.box, run.tau, run.norm, run.problem.mode, run.rho_disk);
  ctx.simpson_n = opt.simpson_n;
  ctx.crouzeix_q = opt.crouzeix_q;
  const auto dec = run.problem.mode == BoundMode::skew
                       ? lanczos(*run.problem.op, run.problem.v, kmax)
                       : arnoldi(*run.problem.op, run.problem.v, kmax);
  const Vector w_ref = reference_solution(run.problem, run.tau);
  const auto records = bound_curve(ctx, dec, kmax, true, &w_ref);

  const fs::path csv_path = fs::path(opt.out_dir) / (run.stem + ".csv");
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open '" + csv_path.string() + "' for writing");
  write_records_csv(csv, records);
  write_chart(fs::path(opt.out_dir) / (run.stem + ".svg"), run.title, records);
}

int cmd_example(const Options& opt) {
  if (opt.example_id < 1 || opt.example_id > 4) {
    std::cerr << "kexpm: invalid example id " << opt.example_id << " (expected 1..4)\n";
    return kExitInputError;
  }
  fs::create_directories(opt.out_dir);

  std::vector<BenchmarkRun> runs;
  const double s2 = std::sqrt(2.0) / 2.0;
  switch (opt.example_id) {
    case 1: {
      const SpectralBox box{1.0 - s2, 1.0 + s2, s2};
      const auto taus = opt.tau_list.empty() ? std::vector<double>{10, 20, 30, 40}
                                             : opt.tau_list;
      for (double tau : taus) {
        auto p = lattice_normal_matrix(31, box, opt.seed);
        const double norm = p.op->norm_estimate();
        runs.push_back({"example1_tau" + format_g(tau),
                        "lattice spectrum in |z-1|<1, tau=" + format_g(tau), std::move(p),
                        box, norm, 1.0, tau});
      }
      break;
    }
    case 2: {
      const auto taus = opt.tau_list.empty() ? std::vector<double>{30} : opt.tau_list;
      for (double tau : taus) {
        for (const char* ms : {"0.01", "0.1", "0.9", "0.99"}) {
          const auto box = example2_box(std::stod(ms));
          auto p = lattice_normal_matrix(31, box, opt.seed);
          const double norm = p.op->norm_estimate();
          runs.push_back({"example2_m" + std::string(ms) + "_tau" + format_g(tau),
                          "rectangle with m=" + std::string(ms) + ", tau=" + format_g(tau),
                          std::move(p), box, norm, {}, tau});
        }
        for (double shift : {-1.0, -10.0}) {
          const SpectralBox box{shift, 2.0 + shift, 1.0};
          auto p = lattice_normal_matrix(31, box, opt.seed);
          const double norm = p.op->norm_estimate();
          runs.push_back({"example2_shift" + format_g(shift) + "_tau" + format_g(tau),
                          "shifted square [" + format_g(shift) + "," + format_g(2 + shift) +
                              "]x[-1,1], tau=" + format_g(tau),
                          std::move(p), box, norm, {}, tau});
        }
      }
      break;
    }
    case 3: {
      const auto taus = opt.tau_list.empty() ? std::vector<double>{2, 10, 20, 50}
                                             : opt.tau_list;
      auto probe = convection_diffusion(20, opt.seed);
      const SpectralBox box = spectral_box(*probe.op);
      const double norm = probe.op->norm_estimate();
      for (double tau : taus)
        runs.push_back({"example3_tau" + format_g(tau),
                        "convection-diffusion 20x20 grid, tau=" + format_g(tau),
                        convection_diffusion(20, opt.seed), box, norm, {}, tau});
      break;
    }
    case 4: {
      const auto taus = opt.tau_list.empty() ? std::vector<double>{2, 10, 20, 50}
                                             : opt.tau_list;
      for (double tau : taus) {
        auto p = diagonal_skew(1000, opt.seed);
        const SpectralBox box = *p.box_exact;
        runs.push_back({"example4_tau" + format_g(tau),
                        "unitary evolution of diag(j/n), n=1000, tau=" + format_g(tau),
                        std::move(p), box, 1.0, {}, tau});
      }
      break;
    }
  }

  std::vector<std::future<void>> pool;
  pool.reserve(runs.size());
  for (const auto& run : runs)
    pool.push_back(std::async(std::launch::async, [&run, &opt] { execute_run(run, opt); }));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].get();
    std::cout << runs[i].stem << " -> " << (fs::path(opt.out_dir) / runs[i].stem).string()
              << ".{csv,svg}\n";
  }
  return 0;
}

// Hermitian generator H = iA of a skew-Hermitian operator A.
class SkewGenerator final : public LinearOperator {
public:
  explicit SkewGenerator(const LinearOperator& a) : a_(&a) {}
  Eigen::Index dim() const override { return a_->dim(); }
  void apply(const Vector& x, Vector& y) const override {
    a_->apply(x, y);
    y *= std::complex<double>(0.0, 1.0);
  }
  void apply_adjoint(const Vector& x, Vector& y) const override { apply(x, y); }
  double norm_estimate() const override { return a_->norm_estimate(); }
  Structure structure() const override { return Structure::hermitian; }

private:
  const LinearOperator* a_;
};

int cmd_expmv(const Options& opt) {
  if (opt.tau_list.size() != 1) {
    std::cerr << "kexpm expmv: exactly one --tau value is required\n";
    return kExitInputError;
  }
  const double tau = opt.tau_list[0];
  const auto t0 = std::chrono::steady_clock::now();

  MarketMatrix mm;
  try {
    mm = read_matrix_market_file(opt.matrix_path);
  } catch (const MarketParseError& e) {
    std::cerr << "kexpm expmv: " << opt.matrix_path << ": " << e.what() << "\n";
    return kExitInputError;
  }
  if (mm.matrix.rows() != mm.matrix.cols()) {
    std::cerr << "kexpm expmv: matrix must be square\n";
    return kExitInputError;
  }
  CsrOperator A(std::move(mm.matrix), mm.structure());

  Vector v;
  if (!opt.vector_path.empty()) {
    v = read_vector_file(opt.vector_path);
    if (v.size() != A.dim()) {
      std::cerr << "kexpm expmv: vector dimension " << v.size() << " does not match matrix "
                << A.dim() << "\n";
      return kExitInputError;
    }
    const double norm = v.norm();
    if (norm == 0.0) {
      std::cerr << "kexpm expmv: start vector is zero\n";
      return kExitInputError;
    }
    v /= norm;
  } else {
    v = seeded_unit_vector(A.dim(), opt.seed);
  }

  const SpectralBox box = spectral_box(A);
  const Structure tag = A.structure();
  const BoundMode est_mode =
      tag == Structure::skew_hermitian ? BoundMode::skew : BoundMode::general;
  const double nu = est_mode == BoundMode::skew ? 0.0 : box.a;

  std::optional<SkewGenerator> gen;
  const LinearOperator* op = &A;
  if (tag == Structure::skew_hermitian) {
    gen.emplace(A);
    op = &*gen;
  }

  const int kcap = static_cast<int>(std::min<Eigen::Index>(opt.max_k, A.dim()));
  KrylovDecomposition dec = tag == Structure::general ? arnoldi(*op, v, 1)
                                                      : lanczos(*op, v, 1);
  double estimate = std::numeric_limits<double>::infinity();
  int k_used = 0;
  bool converged = false;
  for (int k = 1; k <= kcap; ++k) {
    extend(dec, *op, k);
    estimate = aposteriori_estimate(dec, k, tau, nu, est_mode, opt.simpson_n);
    k_used = k;
    if (estimate <= opt.tol) {
      converged = true;
      break;
    }
    if (dec.breakdown) {
      converged = true;  // exact subspace
      break;
    }
  }

  const ApproxMode mode = tag == Structure::skew_hermitian ? ApproxMode::unitary
                                                           : ApproxMode::real_exponential;
  Vector w = krylov_approx(dec, k_used, tau, mode);
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);

  fs::create_directories(opt.out_dir);
  write_vector_file((fs::path(opt.out_dir) / "w.txt").string(), w);
  {
    std::ofstream summary(fs::path(opt.out_dir) / "expmv_summary.txt");
    summary << "converged: " << (converged ? "yes" : "no") << "\n"
            << "k: " << k_used << "\n"
            << "estimate: " << detail::number_field(estimate) << "\n"
            << "tolerance: " << detail::number_field(opt.tol) << "\n"
            << "tau: " << detail::number_field(tau) << "\n"
            << "box: [" << detail::number_field(box.a) << ", " << detail::number_field(box.b)
            << "] x [-" << detail::number_field(box.c) << ", " << detail::number_field(box.c)
            << "]" << (box.estimated ? " (estimated)" : "") << "\n"
            << "elapsed_ms: " << elapsed.count() << "\n";
  }
  std::cout << (converged ? "converged" : "no convergence") << " at k=" << k_used
            << ", estimate=" << estimate << " (tol " << opt.tol << ")\n";
  return converged ? 0 : kExitNonConvergence;
}

int cmd_bounds(const Options& opt) {
  fs::create_directories(opt.out_dir);
  SpectralBox box{opt.box_a, opt.box_b, opt.box_c};
  const double norm =
      opt.norm_a > 0.0 ? opt.norm_a
                       : std::max({std::abs(box.a), std::abs(box.b), box.c});
  if (opt.tau_list.size() != 1) {
    std::cerr << "kexpm bounds: exactly one --tau value is required\n";
    return kExitInputError;
  }
  auto ctx = make_context(box, opt.tau_list[0], norm,
                          opt.skew ? BoundMode::skew : BoundMode::general, opt.rho_disk);
  ctx.crouzeix_q = opt.crouzeix_q;

  std::vector<ConvergenceRecord> records;
  for (int k = 1; k <= opt.max_k; ++k) {
    ConvergenceRecord rec;
    rec.k = k;
    rec.est_post = std::numeric_limits<double>::quiet_NaN();
    const auto pb = best_prior_bound(ctx, k);
    rec.bnd_prior = pb.value;
    rec.q_used = pb.q;
    const auto ref = reference_bounds(ctx, k);
    rec.bnd_saad = ref.saad;
    rec.bnd_hl = ref.hochbruck_lubich;
    records.push_back(rec);
  }
  const fs::path csv_path = fs::path(opt.out_dir) / "bounds.csv";
  std::ofstream csv(csv_path);
  write_records_csv(csv, records);
  std::cout << "bounds -> " << csv_path.string() << "\n";

  if (opt.level_r) {
    if (!ctx.cp) {
      std::cerr << "kexpm bounds: --level-curve requires a nondegenerate box\n";
      return kExitInputError;
    }
    const auto pts = level_curve(*ctx.cp, box, *opt.level_r, opt.level_points);
    const fs::path lc_path = fs::path(opt.out_dir) / "level_curve.csv";
    std::ofstream lc(lc_path);
    lc << "theta,re,im\n";
    for (std::size_t j = 0; j < pts.size(); ++j) {
      lc << detail::number_field(2.0 * std::numbers::pi * j / pts.size()) << ','
         << detail::number_field(pts[j].real()) << ','
         << detail::number_field(pts[j].imag()) << '\n';
    }
    std::cout << "level curve -> " << lc_path.string() << "\n";
  }
  return 0;
}

int cmd_elliptic_debug(const Options& opt) {
  const auto km = complete_elliptic(opt.elliptic_m);
  const auto kp = complete_elliptic(1.0 - opt.elliptic_m);
  std::printf("m   = %.17g\n", opt.elliptic_m);
  std::printf("K   = %.17g\n", km.K);
  std::printf("E   = %.17g\n", km.E);
  std::printf("K'  = %.17g\n", kp.K);
  std::printf("E'  = %.17g\n", kp.E);
  std::printf("f(m)   = E - (1-m)K  = %.17g\n", elliptic_f(opt.elliptic_m));
  std::printf("f(1-m) = E' - m K'   = %.17g\n", elliptic_f(1.0 - opt.elliptic_m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Krylov evaluation of e^{-tau A} v with certified error estimates and "
               "a priori convergence bounds from the spectral rectangle"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out_dir, "output directory")->envname("KEXPM_OUT");
    sub->add_option("--seed", opt.seed, "random seed for generated start vectors");
    sub->add_option("--simpson", opt.simpson_n, "Simpson subintervals for the estimator")
        ->check(CLI::Range(2, 1 << 20));
    sub->add_option("--crouzeix", opt.crouzeix_q, "Crouzeix constant override");
    sub->add_option("--max-k", opt.max_k, "iteration cap")->check(CLI::PositiveNumber);
  };

  auto* ex = app.add_subcommand("example", "reproduce a built-in benchmark (1..4)");
  ex->add_option("--example", opt.example_id, "benchmark id")->required();
  ex->add_option("--tau", opt.tau_list, "time steps (overrides the benchmark defaults)")
      ->delimiter(',');
  add_common(ex);

  auto* solve = app.add_subcommand("expmv", "compute w = e^{-tau A} v with certified stopping");
  solve->add_option("--matrix", opt.matrix_path, "Matrix Market coordinate file")->required();
  solve->add_option("--vector", opt.vector_path, "start vector file (one entry per line)");
  solve->add_option("--tau", opt.tau_list, "time step")->required()->delimiter(',');
  solve->add_option("--tol", opt.tol, "stopping tolerance on the a posteriori estimate")
      ->check(CLI::PositiveNumber);
  add_common(solve);

  auto* bnd = app.add_subcommand("bounds", "evaluate a priori bounds for a spectral box");
  bnd->add_option("--a", opt.box_a, "min eigenvalue of the Hermitian part")->required();
  bnd->add_option("--b", opt.box_b, "max eigenvalue of the Hermitian part")->required();
  bnd->add_option("--c", opt.box_c, "skew-Hermitian part radius")->required();
  bnd->add_option("--tau", opt.tau_list, "time step")->required()->delimiter(',');
  bnd->add_option("--norm", opt.norm_a, "2-norm upper estimate (default from the box)");
  bnd->add_flag("--skew", opt.skew, "treat [a,b] as the Hermitian generator interval");
  bnd->add_option("--rho-disk", opt.rho_disk, "radius of a disk |z-rho|<rho containing W(A)");
  bnd->add_option("--level-curve", opt.level_r, "also dump the level curve C_r for this r");
  bnd->add_option("--points", opt.level_points, "level curve sample count")
      ->check(CLI::Range(8, 1 << 20));
  add_common(bnd);

  auto* ell = app.add_subcommand("elliptic-debug", "print complete elliptic integrals");
  ell->add_option("--m", opt.elliptic_m, "modulus parameter in (0,1)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (app.got_subcommand(ex)) return cmd_example(opt);
    if (app.got_subcommand(solve)) return cmd_expmv(opt);
    if (app.got_subcommand(bnd)) return cmd_bounds(opt);
    if (app.got_subcommand(ell)) return cmd_elliptic_debug(opt);
  } catch (const MarketParseError& e) {
    std::cerr << "kexpm: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "kexpm: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "kexpm: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "kexpm: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
