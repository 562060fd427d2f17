#include "geoscale/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geoscale/baselines.hpp"
#include "geoscale/csv.hpp"
#include "geoscale/dataset.hpp"
#include "geoscale/distortion.hpp"
#include "geoscale/embedding.hpp"
#include "geoscale/errors.hpp"
#include "geoscale/kernel.hpp"
#include "geoscale/report.hpp"

namespace geoscale::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

enum class Format { csv, json };

struct RunConfig {
  std::string command;
  // generate
  std::string manifold = "hourglass";
  Index n = 1000;
  double sigma = 0.0;
  Index ambient_dim = 13;
  // estimate / compare / smoothing
  std::string input;
  std::string clean;
  std::string noisy;
  Index d_prime = 1;
  std::optional<double> eps_min;
  std::optional<double> eps_max;
  std::size_t grid_count = 20;
  double gamma = 1e-4;
  Index n_prime = 200;
  std::uint64_t seed = 0;
  MetricForm form = MetricForm::dual;
  bool squared = true;
  std::size_t replicates = 1;
  Index k = 2;
  Index m = 3;
  std::string out_dir = ".";
  Format format = Format::csv;
};

// Failure in a named pipeline stage; carries the exit code to report.
struct StageError {
  std::string stage;
  std::string message;
  int code;
};

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw StageError{name, e.what(), kInputError};
  } catch (const ParseError& e) {
    throw StageError{name, e.what(), kInputError};
  } catch (const IoError& e) {
    throw StageError{name, e.what(), kInputError};
  } catch (const Error& e) {
    throw StageError{name, e.what(), kComputationError};
  } catch (const std::bad_alloc&) {
    throw StageError{name, "out of memory", kComputationError};
  }
}

std::string metric_name(MetricForm form) { return form == MetricForm::dual ? "dual" : "inverse"; }

void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }

template <typename Writer>
std::string render(Writer&& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

void validate(const RunConfig& cfg) {
  const auto fail = [](const std::string& msg) { throw InvalidArgument(msg); };
  if (cfg.d_prime < 1) fail("--d-prime must be >= 1");
  if (cfg.grid_count < 2) fail("--grid-count must be >= 2");
  if (!(cfg.gamma > 0.0)) fail("--gamma must be > 0");
  if (cfg.n_prime < 1) fail("--n-prime must be >= 1");
  if (cfg.replicates < 1) fail("--replicates must be >= 1");
  if (cfg.eps_min && !(*cfg.eps_min > 0.0)) fail("--eps-min must be > 0");
  if (cfg.eps_max && !(*cfg.eps_max > 0.0)) fail("--eps-max must be > 0");
  if (cfg.eps_min && cfg.eps_max && !(*cfg.eps_min < *cfg.eps_max)) {
    fail("--eps-min must be smaller than --eps-max");
  }
  if (cfg.k < 1) fail("--k must be >= 1");
  if (cfg.m < 1) fail("--m must be >= 1");
  if (!(cfg.sigma >= 0.0)) fail("--sigma must be >= 0");
  if (cfg.n < 10) fail("--n must be >= 10");
}

fs::path prepare_out_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  return dir;
}

EpsilonGrid build_grid(const RunConfig& cfg, const Matrix& sq_dists) {
  const double lo = cfg.eps_min ? *cfg.eps_min : epsilon_min(sq_dists, cfg.gamma);
  const double hi = cfg.eps_max ? *cfg.eps_max : epsilon_max(sq_dists);
  return log_grid(lo, hi, cfg.grid_count);
}

ordered_json grid_json(const EpsilonGrid& grid) { return ordered_json(grid.values()); }

// ---------------------------------------------------------------------------

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = stage("prepare output", [&] { return prepare_out_dir(cfg); });
  const PointCloud clean = stage("generate", [&] {
    if (cfg.manifold == "hourglass") return generate_hourglass(cfg.n, cfg.seed);
    if (cfg.manifold == "dome") return generate_dome(cfg.n, cfg.seed);
    return generate_square(cfg.n, cfg.seed);
  });
  const PointCloud noisy = stage("add noise", [&] {
    return embed_with_noise(clean, {cfg.ambient_dim, cfg.sigma, cfg.seed});
  });

  stage("write output", [&] {
    save_csv(clean, dir / "clean.csv");
    save_csv(noisy, dir / "noisy.csv");
    ordered_json manifest;
    manifest["generator"] = cfg.manifold;
    manifest["n"] = cfg.n;
    manifest["sigma"] = cfg.sigma;
    manifest["ambient_dim"] = cfg.ambient_dim;
    manifest["seed"] = cfg.seed;
    manifest["files"] = {{"clean", "clean.csv"}, {"noisy", "noisy.csv"}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  });
  out << "wrote " << (dir / "clean.csv").string() << ", " << (dir / "noisy.csv").string()
      << " and manifest.json (" << cfg.manifold << ", n=" << cfg.n << ")\n";
  return kSuccess;
}

struct Estimate {
  std::vector<DistortionCurve> curves;
  double mean = 0.0;
  double stddev = 0.0;
};

Estimate run_estimate(const RunConfig& cfg, const PointCloud& cloud, const EpsilonGrid& grid,
                      MetricForm form) {
  Estimate est;
  for (std::size_t r = 0; r < cfg.replicates; ++r) {
    SelectionOptions options;
    options.n_prime = cfg.n_prime;
    options.seed = cfg.seed + r;
    options.distortion.form = form;
    options.distortion.squared = cfg.squared;
    est.curves.push_back(select_bandwidth(cloud, cfg.d_prime, grid, options));
  }
  double sum = 0.0;
  for (const auto& c : est.curves) sum += c.eps_hat;
  est.mean = sum / static_cast<double>(est.curves.size());
  double ss = 0.0;
  for (const auto& c : est.curves) ss += (c.eps_hat - est.mean) * (c.eps_hat - est.mean);
  est.stddev = est.curves.size() > 1 ? std::sqrt(ss / static_cast<double>(est.curves.size() - 1)) : 0.0;
  return est;
}

void write_curves(const fs::path& dir, const std::string& stem, const Estimate& est, Format format) {
  for (std::size_t r = 0; r < est.curves.size(); ++r) {
    const std::string suffix = r == 0 ? "" : "_rep" + std::to_string(r);
    if (format == Format::json) {
      write_text(dir / (stem + suffix + ".json"), curve_to_json(est.curves[r]));
    } else {
      write_text(dir / (stem + suffix + ".csv"),
                 render([&](std::ostream& o) { write_curve_csv(o, est.curves[r]); }));
    }
  }
}

ordered_json estimate_json(const RunConfig& cfg, const std::string& input, const EpsilonGrid& grid,
                           const Estimate& est, MetricForm form) {
  ordered_json doc;
  doc["input"] = input;
  doc["d_prime"] = cfg.d_prime;
  doc["n_prime"] = cfg.n_prime;
  doc["metric"] = metric_name(form);
  doc["norm"] = cfg.squared ? "squared" : "plain";
  doc["grid"] = grid_json(grid);
  doc["eps_hat"] = est.curves.front().eps_hat;
  ordered_json reps = ordered_json::array();
  for (const auto& c : est.curves) {
    std::size_t failed = 0;
    for (const auto& r : c.results) failed += r.failures.size();
    reps.push_back({{"seed", c.seed}, {"eps_hat", c.eps_hat}, {"failed_evaluations", failed}});
  }
  doc["replicates"] = std::move(reps);
  doc["eps_hat_mean"] = est.mean;
  doc["eps_hat_stddev"] = est.stddev;
  return doc;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  const PointCloud cloud = stage("load input", [&] { return load_csv(cfg.input); });
  stage("validate config", [&] {
    if (cfg.n_prime > cloud.size()) {
      throw InvalidArgument("--n-prime " + std::to_string(cfg.n_prime) + " exceeds the " +
                            std::to_string(cloud.size()) + " points in the input");
    }
    if (cfg.d_prime > std::min(cloud.ambient_dim(), cloud.size() - 1)) {
      throw InvalidArgument("--d-prime exceeds the data dimension");
    }
  });
  const fs::path dir = stage("prepare output", [&] { return prepare_out_dir(cfg); });
  const Matrix sq_dists = stage("distances", [&] { return pairwise_sq_dists(cloud); });
  const EpsilonGrid grid = stage("build grid", [&] { return build_grid(cfg, sq_dists); });
  const Estimate est = stage("select bandwidth", [&] { return run_estimate(cfg, cloud, grid, cfg.form); });

  stage("write output", [&] {
    write_curves(dir, "curve", est, cfg.format);
    write_text(dir / "estimate.json",
               estimate_json(cfg, cfg.input, grid, est, cfg.form).dump(2) + "\n");
  });

  out << "eps_hat = " << format_double(est.curves.front().eps_hat) << '\n';
  if (cfg.replicates > 1) {
    out << "eps_hat mean = " << format_double(est.mean)
        << ", stddev = " << format_double(est.stddev) << " over " << cfg.replicates
        << " replicates\n";
  }
  return kSuccess;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const PointCloud cloud = stage("load input", [&] { return load_csv(cfg.input); });
  stage("validate config", [&] {
    if (cfg.n_prime > cloud.size()) {
      throw InvalidArgument("--n-prime exceeds the number of input points");
    }
    if (cfg.k + 1 > std::min(cloud.ambient_dim(), cloud.size() - 1)) {
      throw InvalidArgument("--k needs K + 1 <= min(r, N - 1)");
    }
  });
  const fs::path dir = stage("prepare output", [&] { return prepare_out_dir(cfg); });
  const Matrix sq_dists = stage("distances", [&] { return pairwise_sq_dists(cloud); });
  const EpsilonGrid grid = stage("build grid", [&] { return build_grid(cfg, sq_dists); });

  const Estimate gc = stage("GC", [&] { return run_estimate(cfg, cloud, grid, MetricForm::dual); });
  const Estimate gc_inv =
      stage("GC inverse", [&] { return run_estimate(cfg, cloud, grid, MetricForm::inverse); });
  const ReconstructionCurve rec = stage("Rec", [&] { return select_bandwidth_rec(cloud, grid); });
  const Index sv_count = std::min<Index>(std::max<Index>(cfg.k + 1, 9),
                                         std::min(cloud.ambient_dim(), cloud.size() - 1));
  const SingularValueProfile profile = stage("multiscale SVD", [&] {
    return multiscale_svd(cloud, grid, sv_count, gc.curves.front().eval_indices);
  });
  const ClmrRange clmr = stage("CLMR", [&] { return clmr_range(profile, cfg.k); });

  const auto fmt_opt = [](bool defined, double v) { return defined ? format_double(v) : std::string("nan"); };
  stage("write output", [&] {
    std::ostringstream table;
    table << "method,eps_hat,eps_lo,eps_hi\n";
    table << "GC," << format_double(gc.curves.front().eps_hat) << ",nan,nan\n";
    table << "GC_inverse," << format_double(gc_inv.curves.front().eps_hat) << ",nan,nan\n";
    table << "Rec," << format_double(rec.eps_hat) << ",nan,nan\n";
    table << "CLMR,nan," << fmt_opt(clmr.defined_lo, clmr.eps_lo) << ','
          << fmt_opt(clmr.defined_hi, clmr.eps_hi) << '\n';
    write_text(dir / "comparison.csv", table.str());

    write_curves(dir, "gc_curve", gc, cfg.format);
    write_curves(dir, "gc_inverse_curve", gc_inv, cfg.format);
    write_text(dir / "rec_curve.csv", render([&](std::ostream& o) { write_reconstruction_csv(o, rec); }));
    write_text(dir / "svd_profile.csv", render([&](std::ostream& o) { write_profile_csv(o, profile); }));

    ordered_json doc;
    doc["input"] = cfg.input;
    doc["grid"] = grid_json(grid);
    doc["d_prime"] = cfg.d_prime;
    doc["n_prime"] = cfg.n_prime;
    doc["seed"] = cfg.seed;
    doc["k"] = cfg.k;
    const auto nullable = [](bool defined, double v) { return defined ? ordered_json(v) : ordered_json(nullptr); };
    doc["methods"] = ordered_json::array({
        {{"method", "GC"}, {"eps_hat", gc.curves.front().eps_hat}, {"eps_lo", nullptr}, {"eps_hi", nullptr}},
        {{"method", "GC_inverse"}, {"eps_hat", gc_inv.curves.front().eps_hat}, {"eps_lo", nullptr}, {"eps_hi", nullptr}},
        {{"method", "Rec"}, {"eps_hat", rec.eps_hat}, {"eps_lo", nullptr}, {"eps_hi", nullptr}},
        {{"method", "CLMR"}, {"eps_hat", nullptr}, {"eps_lo", nullable(clmr.defined_lo, clmr.eps_lo)},
         {"eps_hi", nullable(clmr.defined_hi, clmr.eps_hi)}},
    });
    write_text(dir / "comparison.json", doc.dump(2) + "\n");
  });

  out << "GC         eps_hat = " << format_double(gc.curves.front().eps_hat) << '\n'
      << "GC inverse eps_hat = " << format_double(gc_inv.curves.front().eps_hat) << '\n'
      << "Rec        eps_hat = " << format_double(rec.eps_hat) << '\n'
      << "CLMR       range   = [" << fmt_opt(clmr.defined_lo, clmr.eps_lo) << ", "
      << fmt_opt(clmr.defined_hi, clmr.eps_hi) << "]\n";
  return kSuccess;
}

int cmd_smoothing(const RunConfig& cfg, std::ostream& out) {
  const PointCloud clean = stage("load clean input", [&] { return load_csv(cfg.clean); });
  const PointCloud noisy = stage("load noisy input", [&] { return load_csv(cfg.noisy); });
  stage("validate config", [&] {
    if (clean.size() != noisy.size()) {
      throw InvalidArgument("clean and noisy inputs have different point counts");
    }
    if (cfg.n_prime > noisy.size()) {
      throw InvalidArgument("--n-prime exceeds the number of input points");
    }
  });
  const fs::path dir = stage("prepare output", [&] { return prepare_out_dir(cfg); });
  const Matrix noisy_sq = stage("distances", [&] { return pairwise_sq_dists(noisy); });
  const EpsilonGrid grid = stage("build grid", [&] { return build_grid(cfg, noisy_sq); });
  const EpsilonGrid star_grid = stage("build clean grid", [&] {
    return build_grid(cfg, pairwise_sq_dists(clean));
  });
  const Estimate est = stage("select bandwidth", [&] { return run_estimate(cfg, noisy, grid, cfg.form); });
  const SmoothingCurve curve =
      stage("smoothing", [&] { return smoothing_delta(clean, noisy, grid, star_grid, cfg.m); });

  const double eps_hat = est.curves.front().eps_hat;
  const std::size_t hat_index = est.curves.front().eps_hat_index;
  std::vector<bool> usable(curve.delta.size());
  for (std::size_t g = 0; g < usable.size(); ++g) usable[g] = !curve.missing[g];
  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < curve.delta.size(); ++g) {
    if (usable[g] && (!best || curve.delta[g] < curve.delta[*best])) best = g;
  }

  stage("write output", [&] {
    write_text(dir / "smoothing.csv", render([&](std::ostream& o) { write_smoothing_csv(o, curve); }));
    ordered_json doc;
    doc["clean"] = cfg.clean;
    doc["noisy"] = cfg.noisy;
    doc["m"] = cfg.m;
    doc["grid"] = grid_json(grid);
    doc["star_grid"] = grid_json(star_grid);
    doc["eps_hat"] = eps_hat;
    doc["eps_hat_index"] = hat_index;
    doc["delta_at_eps_hat"] =
        curve.missing[hat_index] ? ordered_json(nullptr) : ordered_json(curve.delta[hat_index]);
    doc["min_delta"] = best ? ordered_json(curve.delta[*best]) : ordered_json(nullptr);
    doc["argmin_eps"] = best ? ordered_json(grid[*best]) : ordered_json(nullptr);
    ordered_json rows = ordered_json::array();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      rows.push_back({{"epsilon", grid[g]},
                      {"delta", curve.missing[g] ? ordered_json(nullptr) : ordered_json(curve.delta[g])},
                      {"argmin_eps_star", curve.argmin_star[g] ? ordered_json(star_grid[*curve.argmin_star[g]])
                                                               : ordered_json(nullptr)},
                      {"is_eps_hat", g == hat_index}});
    }
    doc["rows"] = std::move(rows);
    write_text(dir / "smoothing.json", doc.dump(2) + "\n");
  });

  out << "eps_hat = " << format_double(eps_hat) << ", delta(eps_hat) = "
      << format_double(curve.delta[hat_index]);
  if (best) {
    out << ", min delta = " << format_double(curve.delta[*best]) << " at eps = "
        << format_double(grid[*best]);
  }
  out << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------

void add_grid_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--d-prime", cfg.d_prime, "Working dimension d'")->capture_default_str();
  sub->add_option("--eps-min", cfg.eps_min, "Override the lower end of the bandwidth grid");
  sub->add_option("--eps-max", cfg.eps_max, "Override the upper end of the bandwidth grid");
  sub->add_option("--grid-count", cfg.grid_count, "Number of log-spaced grid points")->capture_default_str();
  sub->add_option("--gamma", cfg.gamma, "Tolerance defining eps_min")->capture_default_str();
  sub->add_option("--n-prime", cfg.n_prime, "Evaluation subsample size")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Subsample seed")->capture_default_str();
  sub->add_option("--replicates", cfg.replicates, "Repeat with seeds seed..seed+R-1")->capture_default_str();
  sub->add_option("--metric", cfg.form, "dual (GC) or inverse (GC^-1)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, MetricForm>{{"dual", MetricForm::dual}, {"inverse", MetricForm::inverse}})
                     .description("{dual,inverse}"))
      ->default_str("dual");
  sub->add_option("--norm", cfg.squared, "Distortion average: squared or plain")
      ->transform(CLI::CheckedTransformer(std::map<std::string, bool>{{"squared", true}, {"plain", false}})
                     .description("{squared,plain}"))
      ->default_str("squared");
  sub->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--format", cfg.format, "Curve file format: csv or json")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::csv}, {"json", Format::json}})
                     .description("{csv,json}"))
      ->default_str("csv");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"geoscale: heat-kernel bandwidth selection by geometric consistency"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  auto* generate = app.add_subcommand("generate", "Sample a synthetic manifold, clean and noisy");
  generate->add_option("--manifold", cfg.manifold, "hourglass, dome or square")
      ->check(CLI::IsMember({"hourglass", "dome", "square"}))
      ->capture_default_str();
  generate->add_option("--n", cfg.n, "Number of points")->capture_default_str();
  generate->add_option("--sigma", cfg.sigma, "Gaussian noise standard deviation")->capture_default_str();
  generate->add_option("--ambient-dim", cfg.ambient_dim, "Embedding dimension of the noisy cloud")
      ->capture_default_str();
  generate->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  generate->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "Select eps by minimizing the distortion");
  estimate->add_option("--input", cfg.input, "Point cloud CSV")->required();
  add_grid_options(estimate, cfg);

  auto* compare = app.add_subcommand("compare", "GC, GC^-1, Rec and CLMR side by side");
  compare->add_option("--input", cfg.input, "Point cloud CSV")->required();
  compare->add_option("--k", cfg.k, "CLMR parameter K")->capture_default_str();
  add_grid_options(compare, cfg);

  auto* smoothing = app.add_subcommand("smoothing", "Embedding discrepancy between clean and noisy clouds");
  smoothing->add_option("--clean", cfg.clean, "Clean point cloud CSV")->required();
  smoothing->add_option("--noisy", cfg.noisy, "Noisy point cloud CSV (same point order)")->required();
  smoothing->add_option("--m", cfg.m, "Embedding dimension")->capture_default_str();
  add_grid_options(smoothing, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "geoscale: parse arguments: " << e.what() << '\n';
    return kInputError;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    stage("validate config", [&] { validate(cfg); });
    if (cfg.command == "generate") return cmd_generate(cfg, out);
    if (cfg.command == "estimate") return cmd_estimate(cfg, out);
    if (cfg.command == "compare") return cmd_compare(cfg, out);
    return cmd_smoothing(cfg, out);
  } catch (const StageError& e) {
    err << "geoscale " << cfg.command << ": " << e.stage << ": " << e.message << '\n';
    return e.code;
  }
}

} // namespace geoscale::cli
