// egestat: spectral statistics of two-particle embedded Gaussian ensembles.
//
// Subcommands:
//   generate   populate the one-particle spectrum cache
//   stats      Monte-Carlo estimators (form factor, number variance,
//              spacing histograms) over analysis windows
//   analytic   closed-form curves for the embedded ensembles
//   model      low-frequency-cutoff model curves
//   compare    join an estimate with an analytic curve, z-score verdict
//   preset     figure-ready bundles (fig2 ... fig13)
//   run        execute a JSON run configuration
//
// Every CSV gets a .meta.json sidecar with the config hash, version and
// runtime. CSV bytes are deterministic in (config, seed) for any --threads.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ege/analytic.hpp"
#include "ege/cache.hpp"
#include "ege/curve.hpp"
#include "ege/estimators.hpp"
#include "ege/pipeline.hpp"
#include "ege/specfun.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ege;

namespace {

constexpr const char* kVersion = "egestat 0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

BetaKind beta_from_string(const std::string& s) {
  if (s == "1" || s == "goe" || s == "orthogonal") return BetaKind::orthogonal;
  if (s == "2" || s == "gue" || s == "unitary") return BetaKind::unitary;
  if (s == "4" || s == "gse" || s == "symplectic") return BetaKind::symplectic;
  if (s == "poisson") return BetaKind::poisson;
  throw UsageError("unknown beta '" + s + "' (use 1|2|4|poisson)");
}

analytic::AnalyticModel model_from_string(const std::string& s,
                                          double density) {
  if (s == "egue") return analytic::AnalyticModel::egue(density);
  if (s == "egse") return analytic::AnalyticModel::egse(density);
  if (s == "egoe") return analytic::AnalyticModel::egoe(density);
  throw UsageError("unknown model '" + s + "' (use egue|egse|egoe)");
}

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

void write_sidecar(const fs::path& csv_path, const json& config,
                   double runtime_ms) {
  json side;
  side["version"] = kVersion;
  side["config"] = config;
  // FNV-1a of the canonical config string
  const std::string repr = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(h));
  side["config_hash"] = hash;
  side["runtime_ms"] = runtime_ms;
  side["written_at"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  std::ofstream out(csv_path.string() + ".meta.json", std::ios::trunc);
  out << side.dump(2) << "\n";
}

void emit_curve(fs::path path, const Curve& curve,
                const Metadata& metadata, const json& config,
                const Stopwatch& watch, const std::string& format = "csv") {
  if (format == "json") {
    path.replace_extension(".json");
    write_curve_json(path, curve, metadata);
  } else if (format == "csv") {
    write_curve_csv(path, curve, metadata);
  } else {
    throw UsageError("unknown output format '" + format + "' (csv|json)");
  }
  write_sidecar(path, config, watch.ms());
  std::cout << "wrote " << path.string() << " (" << curve.abscissa.size()
            << " rows)\n";
}

struct EnsembleFlags {
  std::string beta = "2";
  int n_levels = 300;
  int realizations = 1000;
  std::uint64_t seed = 1;
  std::string density = "uniform";
  bool dense = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--beta", beta, "ensemble: 1|2|4|poisson")
        ->capture_default_str();
    cmd->add_option("--n-levels,-n", n_levels, "one-particle levels N")
        ->capture_default_str();
    cmd->add_option("--realizations,-m", realizations, "ensemble size")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "base seed")->capture_default_str();
    cmd->add_option("--density", density,
                    "one-particle density mode: uniform|semicircle")
        ->capture_default_str();
    cmd->add_flag("--dense-sampling", dense,
                  "dense-matrix sampling cross-check path (beta 1|2)");
  }

  EnsembleConfig config() const {
    EnsembleConfig c;
    c.beta = beta_from_string(beta);
    c.n_levels = n_levels;
    c.realizations = realizations;
    c.seed = seed;
    if (density == "uniform")
      c.density_mode = DensityMode::uniform;
    else if (density == "semicircle")
      c.density_mode = DensityMode::semicircle;
    else
      throw UsageError("unknown density mode '" + density + "'");
    c.dense_sampling = dense;
    c.validate();
    return c;
  }

  json to_json() const {
    return json{{"beta", beta},
                {"n_levels", n_levels},
                {"realizations", realizations},
                {"seed", seed},
                {"density", density},
                {"dense_sampling", dense}};
  }
};

fs::path cache_dir_or_env(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("EGESTAT_CACHE_DIR")) return env;
  return {};
}

// ---------------------------------------------------------------- generate

int cmd_generate(const EnsembleFlags& flags, const std::string& cache_flag,
                 int threads) {
  const fs::path dir = cache_dir_or_env(cache_flag);
  if (dir.empty())
    throw UsageError("generate: --cache-dir (or EGESTAT_CACHE_DIR) required");
  const EnsembleConfig config = flags.config();
  Stopwatch watch;
  const int written = populate_cache(config, dir, threads);
  json manifest = flags.to_json();
  manifest["cache_dir"] = dir.string();
  manifest["files_written"] = written;
  const fs::path manifest_path =
      dir / config.content_hash() / "manifest.json";
  std::ofstream(manifest_path) << manifest.dump(2) << "\n";
  std::cout << "cache " << dir.string() << ": " << written << " new spectra ("
            << config.realizations << " total, key " << config.content_hash()
            << ", " << format_double(watch.ms()) << " ms)\n";
  return 0;
}

// -------------------------------------------------------------------- stats

struct StatsArgs {
  EnsembleFlags flags;
  std::vector<double> zeta_targets{0.0};
  double half_width = 0.0;  // 0 -> 2N
  std::string k_grid = "";
  std::string r_grid = "log:1:900:36";
  std::string orders = "";
  int bins = 80;
  double s_max = 8.0;
  bool offset_averaging = false;
  std::string out_dir = "out";
  std::string cache_flag;
  bool use_cache = false;
  int threads = 0;
  bool dump_windows = false;
  bool export_map = false;
  bool density_curve = false;
  std::string format = "csv";
};

std::vector<int> parse_orders(const std::string& s) {
  std::vector<int> out;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

int cmd_stats(const StatsArgs& args) {
  const EnsembleConfig config = args.flags.config();
  const fs::path out_dir = args.out_dir;
  fs::create_directories(out_dir);

  PipelineOptions popt;
  popt.threads = args.threads;
  popt.cache_dir = cache_dir_or_env(args.cache_flag);
  popt.use_cache = args.use_cache && !popt.cache_dir.empty();

  for (double zeta : args.zeta_targets) {
    Stopwatch watch;
    WindowPlan plan;
    plan.zeta_center = zeta;
    plan.half_width =
        args.half_width > 0.0 ? args.half_width : 2.0 * config.n_levels;

    const auto windows = generate_windows(config, plan, popt);
    const double density = windows[0].local_density;
    const std::string tag = "_zeta" + format_double(zeta);

    json jconfig = args.flags.to_json();
    jconfig["zeta_center"] = zeta;
    jconfig["half_width"] = plan.half_width;
    jconfig["local_density"] = density;
    jconfig["ensemble_hash"] = config.content_hash();

    Metadata meta{{"beta", args.flags.beta},
                  {"n_levels", std::to_string(config.n_levels)},
                  {"realizations", std::to_string(config.realizations)},
                  {"seed", std::to_string(config.seed)},
                  {"zeta_center", format_double(zeta)},
                  {"half_width", format_double(plan.half_width)},
                  {"local_density", format_double(density)}};

    if (!args.k_grid.empty()) {
      const auto est = form_factor_estimate(windows, parse_grid(args.k_grid));
      Metadata m = meta;
      m.emplace_back("mean_count", format_double(est.mean_count));
      m.emplace_back("k_grid", args.k_grid);
      emit_curve(out_dir / ("formfactor" + tag + ".csv"), est.curve, m,
                 jconfig, watch, args.format);
    }

    if (!args.r_grid.empty()) {
      NumberVarianceOptions opt;
      opt.offset_averaging = args.offset_averaging;
      const auto est =
          number_variance_estimate(windows, parse_grid(args.r_grid), opt);
      Metadata m = meta;
      m.emplace_back("r_grid", args.r_grid);
      m.emplace_back("offset_averaging",
                     args.offset_averaging ? "true" : "false");
      emit_curve(out_dir / ("sigma2" + tag + ".csv"), est.curve, m, jconfig,
                 watch, args.format);
    }

    if (!args.orders.empty()) {
      for (int order : parse_orders(args.orders)) {
        const auto hist =
            spacing_histogram(windows, order, args.bins, args.s_max);
        Metadata m = meta;
        m.emplace_back("order", std::to_string(order));
        m.emplace_back("pooled_spacings", std::to_string(hist.total_pooled));
        m.emplace_back("mean_spacing", format_double(hist.mean_spacing));
        emit_curve(
            out_dir / ("spacing_k" + std::to_string(order) + tag + ".csv"),
            hist.as_curve(), m, jconfig, watch, args.format);
      }
    }

    if (args.dump_windows) {
      const fs::path path = out_dir / ("windows" + tag + ".csv");
      std::ofstream out(path, std::ios::trunc);
      out << "realization_index,zeta\n";
      char buf[32];
      for (const auto& w : windows)
        for (double z : w.levels) {
          std::snprintf(buf, sizeof(buf), "%.17g", z);
          out << w.realization_index << ',' << buf << "\n";
        }
      write_sidecar(path, jconfig, watch.ms());
      std::cout << "wrote " << path.string() << "\n";
    }
  }

  if (args.density_curve) {
    Stopwatch watch;
    const Curve density = two_particle_density_curve(config, 120, popt);
    emit_curve(out_dir / "density.csv", density,
               {{"beta", args.flags.beta},
                {"n_levels", std::to_string(config.n_levels)},
                {"realizations", std::to_string(config.realizations)}},
               args.flags.to_json(), watch, args.format);
  }

  if (args.export_map && config.density_mode == DensityMode::semicircle) {
    Stopwatch watch;
    const UnfoldingMap map = build_empirical_map(config, popt);
    const fs::path path = out_dir / "unfolding_map.csv";
    std::ofstream out(path, std::ios::trunc);
    out << "xi,zeta\n";
    char b1[32], b2[32];
    for (Eigen::Index i = 0; i < map.xi_knots().size(); ++i) {
      std::snprintf(b1, sizeof(b1), "%.17g", map.xi_knots()[i]);
      std::snprintf(b2, sizeof(b2), "%.17g", map.zeta_knots()[i]);
      out << b1 << ',' << b2 << "\n";
    }
    write_sidecar(path, args.flags.to_json(), watch.ms());
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- analytic

struct AnalyticArgs {
  std::string model = "egue";
  double density = 499.75;
  std::string quantity = "sigma2";  // sigma2|formfactor|smallr|y2|delta3
  std::string r_grid = "log:0.1:4000:64";
  std::string k_grid = "";
  double window_width = 0.0;  // formfactor: >0 -> finite-window expectation
  std::string out = "analytic.csv";
  std::string format = "csv";
};

int cmd_analytic(const AnalyticArgs& args) {
  const auto model = model_from_string(args.model, args.density);
  Stopwatch watch;

  json jconfig{{"model", args.model},
               {"density", args.density},
               {"quantity", args.quantity}};
  Metadata meta{{"model", args.model},
                {"local_density", format_double(args.density)},
                {"quantity", args.quantity}};

  Curve curve;
  if (args.quantity == "formfactor") {
    const Eigen::ArrayXd grid =
        parse_grid(args.k_grid.empty() ? "log:1e-4:0.1:64" : args.k_grid);
    curve.kind = CurveKind::form_factor;
    curve.abscissa = grid;
    curve.values.resize(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      curve.values[i] =
          args.window_width > 0.0
              ? analytic::f2_two_particle_windowed(grid[i], model,
                                                   args.window_width)
              : analytic::f2_two_particle(grid[i], model);
    if (args.window_width > 0.0)
      meta.emplace_back("window_width", format_double(args.window_width));
  } else {
    const Eigen::ArrayXd grid = parse_grid(args.r_grid);
    curve.kind = CurveKind::number_variance;
    curve.abscissa = grid;
    curve.values.resize(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      if (args.quantity == "sigma2")
        curve.values[i] = analytic::sigma2_closed(grid[i], model);
      else if (args.quantity == "smallr")
        curve.values[i] = analytic::sigma2_small_r(grid[i], model);
      else if (args.quantity == "y2")
        curve.values[i] = analytic::y2_two_particle(grid[i], model);
      else if (args.quantity == "delta3")
        curve.values[i] = analytic::delta3_from_sigma2(model, grid[i]);
      else
        throw UsageError("unknown quantity '" + args.quantity + "'");
    }
  }

  const double sat = analytic::sigma2_saturation(model);
  meta.emplace_back("sigma2_saturation", format_double(sat));
  jconfig["sigma2_saturation"] = sat;
  std::cout << args.model << " saturation: Sigma^2_sat = " << sat
            << "  (Delta3_sat = " << 0.5 * sat << ")\n";

  emit_curve(args.out, curve, meta, jconfig, watch, args.format);
  return 0;
}

// -------------------------------------------------------------------- model

struct ModelArgs {
  std::string cutoff = "poisson";  // poisson|gxe
  double delta = 0.01;
  std::string beta = "2";  // gxe only
  std::string r_grid = "lin:1:200:100";
  std::string out = "model.csv";
  bool reference = false;  // also write the delta = 0 Gaussian curve
  std::string format = "csv";
};

int cmd_model(const ModelArgs& args) {
  Stopwatch watch;
  analytic::AnalyticModel model =
      args.cutoff == "poisson"
          ? analytic::AnalyticModel::poisson_cutoff(args.delta)
          : args.cutoff == "gxe"
                ? analytic::AnalyticModel::gxe_cutoff(
                      args.delta, beta_from_string(args.beta))
                : throw UsageError("unknown cutoff '" + args.cutoff + "'");

  const Eigen::ArrayXd grid = parse_grid(args.r_grid);
  Curve curve;
  curve.kind = CurveKind::number_variance;
  curve.abscissa = grid;
  curve.values.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    curve.values[i] = analytic::sigma2_quadrature(grid[i], model);

  const double sat = analytic::sigma2_saturation(model);
  json jconfig{{"cutoff", args.cutoff},
               {"delta", args.delta},
               {"beta", args.beta},
               {"sigma2_saturation", sat}};
  Metadata meta{{"cutoff", args.cutoff},
                {"delta", format_double(args.delta)},
                {"sigma2_saturation", format_double(sat)}};
  if (args.cutoff == "gxe") meta.emplace_back("beta", args.beta);
  std::cout << args.cutoff << " cutoff delta=" << args.delta
            << ": Sigma^2_sat = " << sat << "\n";
  emit_curve(args.out, curve, meta, jconfig, watch, args.format);

  if (args.reference && args.cutoff == "gxe") {
    Curve ref;
    ref.kind = CurveKind::number_variance;
    ref.abscissa = grid;
    ref.values.resize(grid.size());
    const BetaKind b = beta_from_string(args.beta);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      ref.values[i] = analytic::gaussian_sigma2(grid[i], b);
    fs::path ref_path = args.out;
    ref_path.replace_extension(".reference.csv");
    emit_curve(ref_path, ref, {{"beta", args.beta}, {"delta", "0"}},
               jconfig, watch, args.format);
  }
  return 0;
}

// ------------------------------------------------------------------ compare

struct CompareArgs {
  std::string estimate;
  std::string analytic_file;
  std::string out = "";
  double z_threshold = 3.0;
  double pass_fraction = 0.95;
};

int cmd_compare(const CompareArgs& args) {
  if (!fs::exists(args.estimate))
    throw UsageError("compare: estimate file missing: " + args.estimate);
  if (!fs::exists(args.analytic_file))
    throw UsageError("compare: analytic file missing: " + args.analytic_file);

  const CurveFile est = read_curve_csv(args.estimate);
  const CurveFile ana = read_curve_csv(args.analytic_file);
  const Eigen::Index n = est.curve.abscissa.size();
  if (n == 0) throw UsageError("compare: estimate file has no rows");

  Stopwatch watch;
  std::vector<std::string> rows;
  int matched = 0, within = 0;
  double worst_z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = est.curve.abscissa[i];
    // join on abscissa with relative tolerance
    Eigen::Index j = -1;
    for (Eigen::Index q = 0; q < ana.curve.abscissa.size(); ++q)
      if (std::abs(ana.curve.abscissa[q] - x) <=
          1e-9 * std::max(1.0, std::abs(x))) {
        j = q;
        break;
      }
    if (j < 0) continue;
    ++matched;
    const double e1 = est.curve.stderrs.size() ? est.curve.stderrs[i] : 0.0;
    const double e2 = ana.curve.stderrs.size() ? ana.curve.stderrs[j] : 0.0;
    const double sigma = std::sqrt(e1 * e1 + e2 * e2);
    const double diff = est.curve.values[i] - ana.curve.values[j];
    const double z = sigma > 0.0 ? diff / sigma : (diff == 0.0 ? 0.0 : 1e300);
    if (std::abs(z) <= args.z_threshold) ++within;
    worst_z = std::max(worst_z, std::abs(z));
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.6g", x,
                  est.curve.values[i], e1, ana.curve.values[j], e2, z);
    rows.emplace_back(buf);
  }
  if (matched == 0)
    throw UsageError("compare: no matching abscissae between the inputs");

  const double fraction = static_cast<double>(within) / matched;
  const bool pass = fraction >= args.pass_fraction;

  if (!args.out.empty()) {
    fs::path path = args.out;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    out << "# estimate=" << args.estimate << "\n";
    out << "# analytic=" << args.analytic_file << "\n";
    out << "abscissa,estimate,estimate_stderr,analytic,analytic_stderr,z\n";
    for (const auto& r : rows) out << r << "\n";
    write_sidecar(path,
                  json{{"estimate", args.estimate},
                       {"analytic", args.analytic_file},
                       {"z_threshold", args.z_threshold}},
                  watch.ms());
  }

  std::printf("compare: %d/%d points within %.3gsigma (%.1f%%), worst |z| = %.3g: %s\n",
              within, matched, args.z_threshold, 100.0 * fraction, worst_z,
              pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

// ------------------------------------------------------------------- preset

int run_preset(const std::string& name, const std::string& out_dir,
               bool full_scale, int threads);

// ---------------------------------------------------------------------- run

int run_config_file(const std::string& path, int threads_override) {
  if (!fs::exists(path)) throw UsageError("run: config file missing: " + path);
  json cfg;
  std::ifstream(path) >> cfg;
  const std::string command = cfg.value("command", "");
  auto flags_from = [&](const json& j) {
    EnsembleFlags f;
    f.beta = j.value("beta", f.beta);
    f.n_levels = j.value("n_levels", f.n_levels);
    f.realizations = j.value("realizations", f.realizations);
    f.seed = j.value("seed", f.seed);
    f.density = j.value("density", f.density);
    f.dense = j.value("dense_sampling", f.dense);
    return f;
  };
  const int threads = threads_override > 0
                          ? threads_override
                          : cfg.value("threads", 0);

  if (command == "generate")
    return cmd_generate(flags_from(cfg.value("ensemble", json::object())),
                        cfg.value("cache_dir", ""), threads);
  if (command == "stats") {
    StatsArgs a;
    a.flags = flags_from(cfg.value("ensemble", json::object()));
    a.zeta_targets =
        cfg.value("zeta_targets", std::vector<double>{0.0});
    a.half_width = cfg.value("window_half_width", 0.0);
    a.k_grid = cfg.value("k_grid", a.k_grid);
    a.r_grid = cfg.value("r_grid", a.r_grid);
    a.orders = cfg.value("orders", a.orders);
    a.offset_averaging = cfg.value("offset_averaging", false);
    a.out_dir = cfg.value("output_dir", a.out_dir);
    a.cache_flag = cfg.value("cache_dir", "");
    a.use_cache = cfg.value("use_cache", false);
    a.density_curve = cfg.value("density_curve", false);
    a.format = cfg.value("format", a.format);
    a.threads = threads;
    return cmd_stats(a);
  }
  if (command == "analytic") {
    AnalyticArgs a;
    a.model = cfg.value("model", a.model);
    a.density = cfg.value("density", a.density);
    a.quantity = cfg.value("quantity", a.quantity);
    a.r_grid = cfg.value("r_grid", a.r_grid);
    a.k_grid = cfg.value("k_grid", a.k_grid);
    a.window_width = cfg.value("window_width", 0.0);
    a.out = cfg.value("output", a.out);
    a.format = cfg.value("format", a.format);
    return cmd_analytic(a);
  }
  if (command == "model") {
    ModelArgs a;
    a.cutoff = cfg.value("cutoff", a.cutoff);
    a.delta = cfg.value("delta", a.delta);
    a.beta = cfg.value("beta", a.beta);
    a.r_grid = cfg.value("r_grid", a.r_grid);
    a.out = cfg.value("output", a.out);
    a.reference = cfg.value("reference", false);
    a.format = cfg.value("format", a.format);
    return cmd_model(a);
  }
  if (command == "compare") {
    CompareArgs a;
    a.estimate = cfg.value("estimate", "");
    a.analytic_file = cfg.value("analytic", "");
    a.out = cfg.value("output", "");
    a.z_threshold = cfg.value("z_threshold", 3.0);
    a.pass_fraction = cfg.value("pass_fraction", 0.95);
    return cmd_compare(a);
  }
  if (command == "preset")
    return run_preset(cfg.value("name", ""), cfg.value("output_dir", "out"),
                      cfg.value("full_scale", false), threads);
  throw UsageError("run: unknown command '" + command + "' in " + path);
}

// ------------------------------------------------------------------ presets

struct PresetScale {
  int n_levels;
  int realizations;
  std::vector<double> zeta_targets;
};

int run_preset(const std::string& name, const std::string& out_dir,
               bool full_scale, int threads) {
  const fs::path dir = fs::path(out_dir) / name;
  fs::create_directories(dir);

  // desk scale shrinks N and the ensemble; zeta targets scale with N^2
  const int n = full_scale ? 1000 : 300;
  const int reals_big = full_scale ? 100000 : 1000;
  const double zscale = static_cast<double>(n) * n / (1000.0 * 1000.0);
  const std::vector<double> zetas{1500.0 * zscale, 50000.0 * zscale,
                                  100000.0 * zscale};

  // largest window honoring the 2% density-variation cap at this target
  auto half_width_for = [n](double zeta) {
    const double rho = tent_density(invert_unfold_tent(zeta, n), n);
    return std::min(2.0 * n, 0.038 * rho * rho);
  };

  auto stats_for = [&](const std::string& beta, const StatsArgs& base) {
    StatsArgs a = base;
    a.flags.beta = beta;
    a.flags.n_levels = n;
    a.flags.seed = 1 + static_cast<std::uint64_t>(beta_from_string(beta));
    a.out_dir = (dir / beta).string();
    a.threads = threads;
    return a;
  };

  auto analytic_overlay = [&](const std::string& model, double density,
                              const std::string& quantity,
                              const std::string& grid, const fs::path& out,
                              double window_width = 0.0) {
    AnalyticArgs a;
    a.model = model;
    a.density = density;
    a.quantity = quantity;
    if (quantity == "formfactor")
      a.k_grid = grid;
    else
      a.r_grid = grid;
    a.window_width = window_width;
    a.out = out.string();
    cmd_analytic(a);
  };

  const std::vector<std::string> all_betas{"goe", "gue", "gse"};
  auto model_name = [](const std::string& beta) {
    return beta == "goe" ? std::string("egoe")
                         : beta == "gue" ? std::string("egue")
                                         : std::string("egse");
  };

  if (name == "fig2") {
    // small-r number variance, all three ensembles
    StatsArgs base;
    base.flags.realizations = reals_big;
    base.zeta_targets = {zetas[1]};
    base.r_grid = "lin:0.25:5:20";
    base.k_grid = "";
    base.offset_averaging = true;
    for (const auto& beta : all_betas) {
      auto a = stats_for(beta, base);
      cmd_stats(a);
      const double density =
          tent_density(invert_unfold_tent(zetas[1], n), n);
      analytic_overlay(model_name(beta), density, "smallr", base.r_grid,
                       dir / beta / "smallr_overlay.csv");
    }
    return 0;
  }
  if (name == "fig3") {
    StatsArgs base;
    base.flags.realizations = std::max(reals_big / 2, 200);
    base.zeta_targets = {zetas[1]};
    base.r_grid = "";
    base.orders = "0,1,2,3";
    for (const auto& beta : all_betas) cmd_stats(stats_for(beta, base));
    return 0;
  }
  if (name == "fig4") {
    for (double delta : {0.005, 0.01, 0.02}) {
      ModelArgs a;
      a.cutoff = "poisson";
      a.delta = delta;
      a.r_grid = "log:1:4000:60";
      a.out = (dir / ("poisson_delta" + format_double(delta) + ".csv")).string();
      cmd_model(a);
    }
    return 0;
  }
  if (name == "fig5") {
    for (const auto& beta : {"1", "2", "4"})
      for (double delta : {0.005, 0.01}) {
        ModelArgs a;
        a.cutoff = "gxe";
        a.beta = beta;
        a.delta = delta;
        a.r_grid = "log:1:4000:60";
        a.reference = true;
        a.out = (dir / ("gxe_beta" + std::string(beta) + "_delta" +
                        format_double(delta) + ".csv"))
                    .string();
        cmd_model(a);
      }
    return 0;
  }
  if (name == "fig6" || name == "fig8" || name == "fig10" || name == "fig7" ||
      name == "fig9" || name == "fig11") {
    const bool form_factor =
        name == "fig6" || name == "fig8" || name == "fig10";
    const std::string beta = (name == "fig6" || name == "fig7")   ? "gue"
                             : (name == "fig8" || name == "fig9") ? "gse"
                                                                  : "goe";
    StatsArgs base;
    base.flags.realizations = reals_big;
    // run each target separately: grids and window widths track the local
    // density, and the farthest target needs a narrower window to honor the
    // density-variation cap
    for (double zeta : zetas) {
      const double density = tent_density(invert_unfold_tent(zeta, n), n);
      const double w = half_width_for(zeta);
      StatsArgs a = stats_for(beta, base);
      a.zeta_targets = {zeta};
      a.half_width = w;
      if (form_factor) {
        char grid[64];
        std::snprintf(grid, sizeof(grid), "log:%.10g:%.10g:24",
                      0.05 / density, 3.0 / density);
        a.k_grid = grid;
        a.r_grid = "";
        cmd_stats(a);
        analytic_overlay(model_name(beta), density, "formfactor", grid,
                         dir / beta /
                             ("formfactor_overlay_zeta" + format_double(zeta) +
                              ".csv"),
                         2.0 * w);
      } else {
        const double r_max = std::min(3.0 * n, 1.5 * w);
        a.r_grid = "log:0.5:" + format_double(r_max) + ":40";
        cmd_stats(a);
        analytic_overlay(model_name(beta), density, "sigma2", a.r_grid,
                         dir / beta /
                             ("sigma2_overlay_zeta" + format_double(zeta) +
                              ".csv"));
      }
    }
    return 0;
  }
  if (name == "fig12") {
    const int big_n = full_scale ? 5000 : 600;
    const double zeta = 50000.0 * big_n * big_n / (5000.0 * 5000.0);
    const double density = tent_density(invert_unfold_tent(zeta, big_n), big_n);
    StatsArgs base;
    base.flags.n_levels = big_n;
    base.flags.realizations = full_scale ? 5000 : 300;
    base.zeta_targets = {zeta};
    // this run chases r up to 4N, so the window must be wider than the
    // default 2N; the near-center target leaves plenty of headroom under
    // the density-variation cap
    base.half_width =
        std::min(0.038 * density * density, 4.0 * big_n / 1.5);
    base.r_grid = "log:0.5:" +
                  format_double(std::min(4.0 * big_n, 1.5 * base.half_width)) +
                  ":40";
    for (const auto& beta : all_betas) {
      StatsArgs a = stats_for(beta, base);
      a.flags.n_levels = big_n;
      cmd_stats(a);
      analytic_overlay(model_name(beta), density, "sigma2", base.r_grid,
                       dir / beta / "sigma2_overlay.csv");
    }
    return 0;
  }
  if (name == "fig13") {
    StatsArgs base;
    base.flags.beta = "gue";
    base.flags.density = "semicircle";
    base.flags.realizations = reals_big;
    base.zeta_targets = {0.0};
    base.r_grid = "log:0.5:" + format_double(3.0 * n) + ":40";
    base.export_map = true;
    base.density_curve = true;
    auto a = stats_for("gue", base);
    a.flags.density = "semicircle";
    cmd_stats(a);
    return 0;
  }
  throw UsageError("unknown preset '" + name +
                   "' (fig2..fig13 are available)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral statistics of two-particle embedded Gaussian "
               "ensembles"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "populate the spectrum cache");
  EnsembleFlags gen_flags;
  gen_flags.attach(gen);
  std::string gen_cache;
  int gen_threads = 0;
  gen->add_option("--cache-dir", gen_cache, "cache directory");
  gen->add_option("--threads,-j", gen_threads, "worker threads (0 = auto)");

  // stats
  auto* stats = app.add_subcommand("stats", "Monte-Carlo estimators");
  StatsArgs stats_args;
  stats_args.flags.attach(stats);
  stats->add_option("--zeta", stats_args.zeta_targets,
                    "unfolded window centers (repeatable)")
      ->capture_default_str();
  stats->add_option("--half-width,-w", stats_args.half_width,
                    "window half-width in unfolded units (0 = 2N)");
  stats->add_option("--k-grid", stats_args.k_grid,
                    "form-factor grid lin:a:b:n|log:a:b:n");
  stats->add_option("--r-grid", stats_args.r_grid,
                    "number-variance grid")
      ->capture_default_str();
  stats->add_option("--orders", stats_args.orders,
                    "spacing orders, comma separated (e.g. 0,1,2,3)");
  stats->add_option("--bins", stats_args.bins, "spacing histogram bins")
      ->capture_default_str();
  stats->add_option("--s-max", stats_args.s_max, "spacing histogram range")
      ->capture_default_str();
  stats->add_flag("--offset-averaging", stats_args.offset_averaging,
                  "average interval offsets (small-r variance reduction; "
                  "biased if the density drifts across the window)");
  stats->add_option("--out,-o", stats_args.out_dir, "output directory")
      ->capture_default_str();
  stats->add_option("--cache-dir", stats_args.cache_flag, "spectrum cache");
  stats->add_flag("--use-cache", stats_args.use_cache,
                  "read spectra from the cache when present");
  stats->add_option("--threads,-j", stats_args.threads, "worker threads");
  stats->add_flag("--dump-windows", stats_args.dump_windows,
                  "write one CSV row per window level");
  stats->add_flag("--export-map", stats_args.export_map,
                  "write the empirical unfolding map (semicircle mode)");
  stats->add_flag("--density-curve", stats_args.density_curve,
                  "write the mean two-particle level density");
  stats->add_option("--format", stats_args.format, "output format: csv|json")
      ->capture_default_str();

  // analytic
  auto* ana = app.add_subcommand("analytic", "closed-form curves");
  AnalyticArgs ana_args;
  ana->add_option("--model", ana_args.model, "egue|egse|egoe")
      ->capture_default_str();
  ana->add_option("--density", ana_args.density, "local density R1^(2)(xi)")
      ->capture_default_str();
  ana->add_option("--quantity", ana_args.quantity,
                  "sigma2|formfactor|smallr|y2|delta3")
      ->capture_default_str();
  ana->add_option("--r-grid", ana_args.r_grid, "abscissa grid")
      ->capture_default_str();
  ana->add_option("--k-grid", ana_args.k_grid, "form-factor grid");
  ana->add_option("--window-width", ana_args.window_width,
                  "finite-window expectation for the form factor");
  ana->add_option("--out,-o", ana_args.out, "output CSV")
      ->capture_default_str();
  ana->add_option("--format", ana_args.format, "output format: csv|json")
      ->capture_default_str();

  // model
  auto* mod = app.add_subcommand("model", "cutoff-model curves");
  ModelArgs mod_args;
  mod->add_option("--cutoff", mod_args.cutoff, "poisson|gxe")
      ->capture_default_str();
  mod->add_option("--delta", mod_args.delta, "frequency cutoff (> 0)")
      ->capture_default_str();
  mod->add_option("--beta", mod_args.beta, "Gaussian ensemble for gxe")
      ->capture_default_str();
  mod->add_option("--r-grid", mod_args.r_grid, "abscissa grid")
      ->capture_default_str();
  mod->add_option("--out,-o", mod_args.out, "output CSV")
      ->capture_default_str();
  mod->add_flag("--reference", mod_args.reference,
                "also write the delta = 0 Gaussian-ensemble curve");
  mod->add_option("--format", mod_args.format, "output format: csv|json")
      ->capture_default_str();

  // compare
  auto* cmp = app.add_subcommand("compare",
                                 "join an estimate with an analytic curve");
  CompareArgs cmp_args;
  cmp->add_option("--estimate", cmp_args.estimate, "estimate CSV")->required();
  cmp->add_option("--analytic", cmp_args.analytic_file, "analytic CSV")
      ->required();
  cmp->add_option("--out,-o", cmp_args.out, "joined table CSV");
  cmp->add_option("--z-threshold", cmp_args.z_threshold, "sigma threshold")
      ->capture_default_str();
  cmp->add_option("--pass-fraction", cmp_args.pass_fraction,
                  "fraction of points required within the threshold")
      ->capture_default_str();

  // preset
  auto* pre = app.add_subcommand("preset", "figure-ready bundles");
  std::string preset_name;
  std::string preset_out = "out";
  bool preset_full = false;
  int preset_threads = 0;
  pre->add_option("name", preset_name, "fig2..fig13")->required();
  pre->add_option("--out,-o", preset_out, "output directory")
      ->capture_default_str();
  pre->add_flag("--full-scale", preset_full,
                "full production ensemble sizes instead of desk scale");
  pre->add_option("--threads,-j", preset_threads, "worker threads");

  // run
  auto* run = app.add_subcommand("run", "execute a JSON run configuration");
  std::string run_config;
  int run_threads = 0;
  run->add_option("config", run_config, "JSON config path")->required();
  run->add_option("--threads,-j", run_threads, "worker threads override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_flags, gen_cache, gen_threads);
    if (stats->parsed()) return cmd_stats(stats_args);
    if (ana->parsed()) return cmd_analytic(ana_args);
    if (mod->parsed()) return cmd_model(mod_args);
    if (cmp->parsed()) return cmd_compare(cmp_args);
    if (pre->parsed())
      return run_preset(preset_name, preset_out, preset_full, preset_threads);
    if (run->parsed()) return run_config_file(run_config, run_threads);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
