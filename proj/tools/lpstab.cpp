// Command line front end: generate example operators, analyze matrix files,
// estimate lower lp bounds, localize witnesses, build left inverses and run
// the verification suites.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "lpstab/errors.hpp"
#include "lpstab/inverse.hpp"
#include "lpstab/io.hpp"
#include "lpstab/verification.hpp"
#include "lpstab/zoo.hpp"

namespace fs = std::filesystem;
using namespace lpstab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

struct GlobalArgs {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string p_grid;
  bool emit_json = true;
  bool emit_csv = true;
  bool sparse_grid = false;
  double invert_rel_tol = 1e-9;
};

io::RunConfig make_config(const GlobalArgs& g) {
  io::RunConfig cfg = io::RunConfig::defaults();
  cfg.seed = g.seed;
  cfg.allow_sparse_grid = g.sparse_grid;
  cfg.invert_rel_tol = g.invert_rel_tol;
  if (!g.p_grid.empty()) cfg.p_grid = io::parse_p_grid(g.p_grid);
  cfg.validate();
  return cfg;
}

void print_stats(const IndexedMatrix& a) {
  const auto& s = a.stats();
  std::printf("rows %d  cols %d%s  entries %zu\n", a.rows(), a.cols(),
              a.rows_are_cols() ? " (same index set)" : "",
              a.entries().size());
  std::printf("thickness r = %g  sparseness v = %d  sup |a| = %g\n",
              s.thickness, s.sparseness, s.sup_norm);
  if (s.band_width)
    std::printf("band width = %g\n", *s.band_width);
  const MetricSpace& sp = a.col_space();
  std::printf("space: growth d = %.3f  K = %.3f  doubling D = %.3f\n",
              sp.growth_d(), sp.growth_K(), sp.doubling_D());
}

Weight parse_weight(const std::string& spec) {
  if (spec.rfind("poly:", 0) == 0)
    return Weight::polynomial(std::stod(spec.substr(5)));
  if (spec.rfind("subexp:", 0) == 0) {
    auto rest = spec.substr(7);
    auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw ParameterError("weight: expected subexp:C,delta");
    return Weight::subexponential(std::stod(rest.substr(0, comma)),
                                  std::stod(rest.substr(comma + 1)));
  }
  throw ParameterError("weight: expected poly:<alpha> or subexp:<C>,<delta>");
}

int cmd_gen(const GlobalArgs& g, const std::string& name, int n, double p,
            int N, double lambda, double alpha, double width, double r,
            int v, double density, double beta, const std::string& out) {
  IndexedMatrix a = [&]() -> IndexedMatrix {
    auto space = [&](int sz) {
      return std::make_shared<const MetricSpace>(MetricSpace::z_interval(sz));
    };
    if (name == "random-walk") return zoo::random_walk_operator(n);
    if (name == "staircase") return zoo::staircase_matrix(p, N);
    if (name == "dilation") return zoo::dilation_matrix(n, lambda);
    if (name == "slanted") return zoo::slanted_matrix(alpha, width, n, g.seed);
    if (name == "thin-sparse")
      return zoo::random_thin_sparse(space(n), r, v, density, g.seed);
    if (name == "banded")
      return zoo::random_thin_sparse(space(n), r, v, density, g.seed, true);
    if (name == "poly-decay")
      return zoo::polynomial_decay_matrix(space(n), beta, g.seed);
    throw ParameterError("unknown generator '" + name + "'");
  }();
  io::write_matrix(a, out);
  std::printf("wrote %s\n", out.c_str());
  print_stats(a);
  return kExitOk;
}

int cmd_analyze(const GlobalArgs& g, const std::string& file,
                const std::string& weight_spec) {
  IndexedMatrix a = io::read_matrix(file);
  print_stats(a);
  auto n1 = op_norm(a, Exponent(1.0));
  auto n2 = op_norm(a, Exponent(2.0));
  auto ninf = op_norm(a, Exponent::inf());
  std::printf("|A|_1 = %.12g  |A|_2 = %.12g  |A|_inf = %.12g\n", n1.value,
              n2.value, ninf.value);
  std::printf("schur = %.12g\n", schur_norm(a));
  Weight w = parse_weight(weight_spec);
  if (a.rows_are_cols()) {
    std::printf("weighted schur (%s) = %.12g\n", w.str().c_str(),
                weighted_schur_norm(a, w));
    if (a.col_space().is_lattice())
      std::printf("cd norm = %.12g\n", cd_norm(a));
    auto gb = check_gram_banded(a);
    std::printf("gram band: propagation %.3f <= %.3f : %s\n", gb.propagation,
                gb.limit, gb.holds ? "ok" : "VIOLATED");
  }
  {
    // seeded spot check: 2r-disjoint bumps must map to disjoint supports
    double r = a.stats().thickness;
    int gap = 2 * static_cast<int>(r) + 1;
    if (2 * gap + 2 < a.cols()) {
      std::vector<double> u(a.cols(), 0.0), v(a.cols(), 0.0);
      u[0] = 1.0;
      v[gap + 1] = 1.0;
      auto ds = check_disjoint_supports(a, u, v);
      std::printf("disjoint supports (gap %d > 2r): %s\n", gap + 1,
                  ds.holds ? "ok" : "VIOLATED");
    }
  }
  auto ss = sparse_sparse_bound(a);
  std::printf("sparse-sparse bound v*|A|_sup = %.12g : %s\n", ss.bound,
              ss.verified ? "ok" : "VIOLATED");
  if (a.rows_are_cols() && a.col_space().diameter() >= 16) {
    std::vector<double> radii;
    for (double rr = 2.0; rr <= a.col_space().diameter() / 2.0; rr *= 2.0)
      radii.push_back(rr);
    if (radii.size() >= 3) {
      DecayProfile prof = decay_profile(a, radii);
      std::printf("decay: fitted t = %.4f (%s)\n", prof.fitted_t,
                  decay_class_name(prof.decay_class).c_str());
    }
  }
  // structured JSON report
  if (g.emit_json) {
    std::string path = (fs::path(g.out_dir) / "analyze.json").string();
    std::string body = "{\"norm_1\":" + io::format_double(n1.value) +
                       ",\"norm_2\":" + io::format_double(n2.value) +
                       ",\"norm_inf\":" + io::format_double(ninf.value) +
                       ",\"schur\":" + io::format_double(schur_norm(a)) +
                       ",\"thickness\":" +
                       io::format_double(a.stats().thickness) +
                       ",\"sparseness\":" +
                       std::to_string(a.stats().sparseness) + "}\n";
    io::atomic_write_text(path, body);
    std::printf("report: %s\n", path.c_str());
  }
  return kExitOk;
}

IndexedMatrix restrict_prefix(const IndexedMatrix& a, int m) {
  auto sub = std::make_shared<const MetricSpace>(MetricSpace::z_interval(m));
  std::vector<Entry> kept;
  for (const Entry& e : a.entries())
    if (e.row < m && e.col < m) kept.push_back(e);
  return IndexedMatrix::from_entries(sub, m, true, std::move(kept));
}

int cmd_lambda(const GlobalArgs& g, const std::string& file,
               const std::string& window_sweep) {
  io::RunConfig cfg = make_config(g);
  IndexedMatrix a = io::read_matrix(file);
  if (!window_sweep.empty()) {
    if (!a.rows_are_cols() ||
        a.col_space().kind() != MetricSpace::Kind::ZInterval)
      throw ParameterError("--window-sweep needs a square interval-indexed "
                           "matrix");
    std::stringstream ss(window_sweep);
    std::string item;
    while (std::getline(ss, item, ',')) {
      int w = std::stoi(item);
      if (w < 2 || w > a.cols())
        throw ParameterError("window sweep value out of range");
      double l2 = lambda_exact_2(restrict_prefix(a, w)).value;
      std::printf("window %5d: lambda_2 = %.12g\n", w, l2);
    }
  }
  StabilityReport rep = stability_report(a, cfg.p_grid, cfg.budget, cfg.seed,
                                         cfg.allow_sparse_grid);
  for (const auto& e : rep.estimates)
    std::printf("p=%-5s lambda_hat = %.12g  (%s)\n", e.p.str().c_str(),
                e.value, lambda_method_name(e.method).c_str());
  std::printf("lambda = %.12g at p_m=%s;  Lambda = %.12g at p_M=%s\n",
              rep.lambda_small, rep.p_m.str().c_str(), rep.Lambda_big,
              rep.p_M.str().c_str());
  std::printf("verdict: %s\n", verdict_name(rep.verdict).c_str());

  PropagationConstants consts =
      a.col_space().kind() == MetricSpace::Kind::ZInterval && a.rows_are_cols()
          ? PropagationConstants::z_constants(a)
          : PropagationConstants::measured(
                a, std::max(1.0, a.stats().thickness) * 4.0);
  ChainResult chain = chain_propagation(rep, consts, a);
  std::printf("chained bound: lambda >= %.6g * Lambda^%.3g = %.6g (%s)\n",
              chain.k_constant, chain.Lambda_exponent, chain.bound,
              chain.consistent ? "consistent" : "INCONSISTENT");
  if (chain.zrem2)
    std::printf("interval single-step check (K=18, 162 r^3): %s\n",
                chain.zrem2->holds ? "holds" : "VIOLATED");

  fs::path dir(g.out_dir);
  if (g.emit_json) {
    io::atomic_write_text(dir / "lambda.json", io::stability_report_json(rep));
    io::atomic_write_text(dir / "chain.json", io::chain_result_json(chain));
  }
  if (g.emit_csv)
    io::atomic_write_text(dir / "lambda.csv", io::stability_report_csv(rep));
  return kExitOk;
}

int cmd_localize(const GlobalArgs& g, const std::string& file, double L,
                 const std::string& p_text, const std::string& f_spec) {
  IndexedMatrix a = io::read_matrix(file);
  Exponent p = parse_exponent(p_text);
  std::vector<double> f(a.cols(), 0.0);
  if (f_spec == "constant") {
    std::fill(f.begin(), f.end(), 1.0);
  } else if (f_spec.rfind("delta:", 0) == 0) {
    int idx = std::stoi(f_spec.substr(6));
    if (idx < 0 || idx >= a.cols()) throw ParameterError("delta index range");
    f[idx] = 1.0;
  } else if (f_spec == "random") {
    std::mt19937_64 gen(g.seed);
    for (double& x : f)
      x = static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
  } else {
    throw ParameterError("f must be constant, delta:<i> or random");
  }
  if (L > 0.0) {
    LocalizeResult loc = localize(a, f, L, p);
    const auto& c = loc.certificate;
    std::printf("localized at center %d, support radius %.1f (2L = %.1f)\n",
                loc.ball_center, c.support_radius, 2 * L);
    std::printf("ratio_f %.8g -> ratio_h %.8g, bound %.8g: %s\n", c.ratio_f,
                c.ratio_h, c.bound,
                c.holds ? "certificate holds" : "VIOLATED");
    if (g.emit_json)
      io::atomic_write_text(fs::path(g.out_dir) / "localize.json",
                            io::localize_certificate_json(c));
    return kExitOk;
  }
  // L sweep: report the measured decay of the localized ratio
  io::RunConfig cfg = make_config(g);
  std::vector<double> Ls, ratios;
  for (double Lv : cfg.L_sweep) {
    if (Lv < std::max(1.0, a.stats().thickness)) continue;
    if (6.0 * Lv > a.col_space().diameter()) break;
    auto loc = localize(a, f, Lv, p);
    Ls.push_back(Lv);
    ratios.push_back(loc.certificate.ratio_h);
    std::printf("L %6g: ratio_h = %.10g  bound = %.10g  %s\n", Lv,
                loc.certificate.ratio_h, loc.certificate.bound,
                loc.certificate.holds ? "ok" : "VIOLATED");
  }
  if (Ls.size() >= 2) {
    double expo = std::log(ratios.front() / ratios.back()) /
                  std::log(Ls.back() / Ls.front());
    std::printf("measured ratio decay exponent over the sweep: %.3f\n", expo);
  }
  return kExitOk;
}

int cmd_invert(const GlobalArgs& g, const std::string& file,
               const std::string& weight_spec,
               const std::string& emit_inverse) {
  io::RunConfig cfg = make_config(g);
  IndexedMatrix a = io::read_matrix(file);
  PipelineOptions opts;
  opts.seed = cfg.seed;
  opts.budget = cfg.budget;
  opts.not_bounded_rel_tol = cfg.invert_rel_tol;
  PipelineReport rep =
      stability_pipeline(a, parse_weight(weight_spec), cfg.p_grid, opts);
  for (std::size_t i = 0; i < rep.windows.size(); ++i)
    std::printf("window %4d: lambda_2 = %.10g\n", rep.windows[i],
                rep.lambda2_by_window[i]);
  std::printf("trend exponent %.3f, decay t = %.3f (%s)\n",
              rep.trend_exponent, rep.decay.fitted_t,
              decay_class_name(rep.decay.decay_class).c_str());
  std::printf("verdict: %s\n", verdict_name(rep.verdict).c_str());
  if (rep.inverse)
    std::printf("|BA - I|_max = %.3g, sigma_min = %.6g\n",
                rep.inverse->diagnostics.ba_minus_i_max,
                rep.inverse->diagnostics.sigma_min);
  fs::path dir(g.out_dir);
  if (g.emit_json)
    io::atomic_write_text(dir / "invert.json", io::pipeline_report_json(rep));
  if (g.emit_csv)
    io::atomic_write_text(dir / "invert.csv", io::pipeline_report_csv(rep));
  if (!emit_inverse.empty()) {
    if (!rep.inverse)
      std::printf("no inverse emitted: verdict %s\n",
                  verdict_name(rep.verdict).c_str());
    else
      io::write_matrix(rep.inverse->B, emit_inverse);
  }
  return kExitOk;
}

int cmd_verify(const GlobalArgs& g, const std::string& suite) {
  auto results = verify::run_suite(suite, g.seed);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %2d %-70s %6.2fs\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds);
    if (!r.pass) {
      all = false;
      std::printf("       %s\n", r.details.c_str());
      if (r.counterexample) {
        fs::path dump = fs::path(g.out_dir) /
                        ("counterexample_" + std::to_string(r.id) + ".json");
        io::atomic_write_text(dump, *r.counterexample);
        std::printf("       counterexample: %s\n", dump.string().c_str());
      }
    }
  }
  return all ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lp lower-bound toolkit for matrices over doubling metric "
               "spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--seed", g.seed, "RNG seed (runs are reproducible)");
  app.add_option("--out-dir", g.out_dir, "directory for report files");
  app.add_option("--p-grid", g.p_grid, "comma list of exponents, e.g. "
                                       "1,1.5,2,inf");
  app.add_flag("--sparse-grid", g.sparse_grid,
               "allow a grid without 1, 2 and inf");
  app.add_flag("!--no-json", g.emit_json, "disable JSON reports");
  app.add_flag("!--no-csv", g.emit_csv, "disable CSV reports");
  app.add_option("--invert-tol", g.invert_rel_tol,
                 "relative sigma_min tolerance for the inverse stage");

  // gen
  auto* gen = app.add_subcommand("gen", "generate an example operator");
  std::string gen_name, gen_out = "matrix.json";
  int gen_n = 100, gen_N = 16, gen_v = 3;
  double gen_p = 1.0, gen_lambda = 1.0, gen_alpha = 1.0, gen_width = 1.0;
  double gen_r = 1.0, gen_density = 0.8, gen_beta = 3.0;
  gen->add_option("generator", gen_name,
                  "random-walk | staircase | dilation | slanted | "
                  "thin-sparse | banded | poly-decay")
      ->required();
  gen->add_option("--n", gen_n, "window size");
  gen->add_option("--p", gen_p, "staircase exponent");
  gen->add_option("--N", gen_N, "staircase columns");
  gen->add_option("--lambda", gen_lambda, "dilation factor");
  gen->add_option("--alpha", gen_alpha, "slant slope");
  gen->add_option("--width", gen_width, "slant width");
  gen->add_option("--r", gen_r, "thickness");
  gen->add_option("--v", gen_v, "sparseness budget");
  gen->add_option("--density", gen_density, "fill density");
  gen->add_option("--beta", gen_beta, "decay exponent");
  gen->add_option("--out", gen_out, "output file");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "norms and structural stats");
  std::string an_file, an_weight = "poly:1";
  analyze->add_option("file", an_file)->required();
  analyze->add_option("--weight", an_weight, "poly:<a> | subexp:<C>,<d>");

  // lambda
  auto* lam = app.add_subcommand("lambda", "lower lp bound estimates");
  std::string lam_file, lam_sweep;
  lam->add_option("file", lam_file)->required();
  lam->add_option("--window-sweep", lam_sweep,
                  "comma list of sub-window sizes for the lambda_2 trend");

  // localize
  auto* loc = app.add_subcommand("localize", "localize a witness function");
  std::string loc_file, loc_p = "2", loc_f = "random";
  double loc_L = 0.0;
  loc->add_option("file", loc_file)->required();
  loc->add_option("--L", loc_L, "localization radius (0 sweeps the default "
                                "ladder)");
  loc->add_option("--p", loc_p, "exponent");
  loc->add_option("--f", loc_f, "constant | delta:<i> | random");

  // invert
  auto* inv = app.add_subcommand("invert", "left-inverse pipeline");
  std::string inv_file, inv_weight = "poly:1", inv_emit;
  inv->add_option("file", inv_file)->required();
  inv->add_option("--weight", inv_weight, "poly:<a> | subexp:<C>,<d>");
  inv->add_option("--emit-inverse", inv_emit, "write B to this file");

  // verify
  auto* ver = app.add_subcommand("verify", "run acceptance suites");
  std::string ver_suite = "all";
  ver->add_option("--suite", ver_suite,
                  "structure | localization | sequences | propagation | "
                  "inverse | zoo | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen)
      return cmd_gen(g, gen_name, gen_n, gen_p, gen_N, gen_lambda, gen_alpha,
                     gen_width, gen_r, gen_v, gen_density, gen_beta, gen_out);
    if (*analyze) return cmd_analyze(g, an_file, an_weight);
    if (*lam) return cmd_lambda(g, lam_file, lam_sweep);
    if (*loc) return cmd_localize(g, loc_file, loc_L, loc_p, loc_f);
    if (*inv) return cmd_invert(g, inv_file, inv_weight, inv_emit);
    if (*ver) return cmd_verify(g, ver_suite);
  } catch (const CapacityError& e) {
    std::fprintf(stderr, "capacity: %s\nreduce the window and retry\n",
                 e.what());
    return kExitCapacity;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const StructureError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const DegenerateInputError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerifyFail;
  }
  return kExitUsage;
}
