#include "moebius_cli/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "moebius/energies.hpp"
#include "moebius/error.hpp"
#include "moebius/experiments.hpp"
#include "moebius/inscription.hpp"
#include "moebius/io.hpp"
#include "moebius/optimize.hpp"
#include "moebius/parallel.hpp"

#ifndef MOEBIUS_KIT_VERSION
#define MOEBIUS_KIT_VERSION "0.0.0"
#endif

namespace moebius::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  int threads = 0;
  std::string out_dir = ".";

  // energy
  std::string polygon;
  std::string curve;
  std::string kind;
  std::string scheme = "forward";
  double tol = -1.0;
  std::string out;
  std::string terms;

  // inscribe
  std::size_t n = 0;
  bool equilateral = false;
  std::string subdivision = "subdivision.json";
  std::string csv;

  // minimize
  std::uint64_t seed = 0;
  int dim = 3;
  std::size_t max_iter = 5000;
  std::string trace = "trace.csv";

  // study
  std::string n_list;
  std::string mode = "uniform";
  std::string family = "inscribed";
  std::size_t seeds = 10;
  double reference = std::nan("");
  bool plot_data = false;
};

std::string fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidInput: return 1;
    case ErrorKind::kSingularity: return 2;
    case ErrorKind::kNonConvergence: return 3;
  }
  return 1;
}

class Runner {
 public:
  Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  std::string path(const std::string& name) const {
    const fs::path p(name);
    return p.is_absolute() ? p.string() : (fs::path(o_.out_dir) / p).string();
  }

  void write(const std::string& name, const std::string& text) {
    const std::string p = path(name);
    io::write_file(p, text);
    artifacts_.push_back(p);
  }

  const std::vector<std::string>& artifacts() const { return artifacts_; }

  ArcLengthCurve load_curve() const {
    if (o_.curve.empty()) fail_input("--curve is required");
    const CurveDescriptor d = io::curve_descriptor_from_json(io::read_file(o_.curve));
    return arclength_reparametrize(ParametricCurve::from_descriptor(d));
  }

  std::vector<std::size_t> n_list() const {
    if (o_.n_list.empty()) fail_input("--n is required");
    return io::parse_n_list(o_.n_list);
  }

  StudyOptions study_options() const {
    StudyOptions s;
    s.reference = o_.reference;
    if (o_.tol > 0.0) s.quadrature_tol = o_.tol;
    return s;
  }

  void energy() {
    if (o_.polygon.empty() == o_.curve.empty()) fail_input("energy needs exactly one of --polygon, --curve");
    std::string kind = o_.kind.empty() ? (o_.curve.empty() ? "discrete" : "smooth") : o_.kind;
    EnergyReport r;
    if (kind == "smooth") {
      if (o_.curve.empty()) fail_input("--kind smooth needs --curve");
      r = smooth_moebius_energy(load_curve(), o_.tol > 0.0 ? o_.tol : 1e-8);
    } else if (kind == "discrete" || kind == "mindist") {
      if (o_.polygon.empty()) fail_input("--kind " + kind + " needs --polygon");
      const ClosedPolygon p = io::polygon_from_json(io::read_file(o_.polygon));
      const bool keep = !o_.terms.empty();
      r = kind == "discrete"
              ? discrete_moebius_energy(p, weight_scheme_from_string(o_.scheme), keep)
              : minimum_distance_energy(p, keep);
    } else {
      fail_input("unknown energy kind '" + kind + "'");
    }
    write(o_.out.empty() ? "energy.json" : o_.out, io::energy_report_to_json(r));
    if (!o_.terms.empty() && r.terms) write(o_.terms, io::term_matrix_to_csv(*r.terms));
    out_ << fixed12(r.value) << '\n';
  }

  void inscribe() {
    if (o_.n < 3) fail_input("--n must be at least 3");
    const ArcLengthCurve c = load_curve();
    ClosedPolygon p;
    SubdivisionSpec s;
    if (o_.equilateral) {
      EquilateralInscription e = inscribe_equilateral(c, o_.n, o_.tol > 0.0 ? o_.tol : 1e-10);
      p = std::move(e.polygon);
      s = std::move(e.subdivision);
    } else {
      InscribedPolygon u = inscribe_uniform(c, o_.n);
      p = std::move(u.polygon);
      s = std::move(u.subdivision);
    }
    write(o_.out.empty() ? "polygon.json" : o_.out, io::polygon_to_json(p));
    write(o_.subdivision, io::subdivision_to_json(s));
    if (!o_.csv.empty()) write(o_.csv, io::polygon_to_csv(p));
    out_ << "max_relative_edge_deviation " << io::format_number(certify_equilateral(p).max_relative_deviation)
         << '\n';
  }

  void minimize() {
    ClosedPolygon start;
    if (!o_.polygon.empty()) {
      start = io::polygon_from_json(io::read_file(o_.polygon));
    } else {
      if (o_.n < 3) fail_input("--n must be at least 3");
      start = random_equilateral_polygon(o_.n, o_.dim, o_.seed);
    }
    OptimizerConfig cfg;
    cfg.max_iterations = o_.max_iter;
    cfg.seed = o_.seed;
    const DescentTrace t = minimize_discrete_energy(start, cfg);
    write(o_.out.empty() ? "minimizer.json" : o_.out, io::polygon_to_json(t.final_polygon));
    write(o_.trace, io::trace_to_csv(t));
    out_ << fixed12(t.final_energy) << '\n';
    out_ << "termination " << to_string(t.reason) << " iterations " << t.rows.back().iteration
         << " gap " << io::format_number(t.regular_gap) << '\n';
    if (t.barrier_pair) {
      out_ << "barrier pair " << t.barrier_pair->first << ' ' << t.barrier_pair->second << '\n';
    }
  }

  template <class Report>
  void write_report(const std::string& stem, const Report& r) {
    write(o_.out.empty() ? stem + ".csv" : o_.out, io::report_to_csv(r));
    write(stem + ".json", io::report_to_json(r));
  }

  void plot(const std::string& name, const std::string& xl, const std::string& yl,
            const std::vector<double>& x, const std::vector<double>& y) {
    if (o_.plot_data) write(name, io::plot_data(xl, yl, x, y));
  }

  void study_rate() {
    const ConvergenceReport r = convergence_study(load_curve(), n_list(),
                                                  subdivision_mode_from_string(o_.mode), study_options());
    write_report("study-rate", r);
    std::vector<double> n, gap;
    for (const auto& row : r.rows) {
      n.push_back(static_cast<double>(row.n));
      gap.push_back(row.gap);
    }
    plot("study-rate.dat", "n", "gap", n, gap);
    out_ << "slope " << io::format_number(r.slope) << " intercept " << io::format_number(r.intercept)
         << '\n';
  }

  void study_gamma() {
    const GammaRecoveryReport r = gamma_recovery_study(load_curve(), n_list(), study_options());
    write_report("study-gamma", r);
    std::vector<double> n, gap, d;
    for (const auto& row : r.rows) {
      n.push_back(static_cast<double>(row.n));
      gap.push_back(row.gap);
      d.push_back(row.w1inf);
    }
    plot("study-gamma-gap.dat", "n", "gap", n, gap);
    plot("study-gamma-w1inf.dat", "n", "w1inf", n, d);
    out_ << "shrink_ok " << (r.shrink_ok ? "true" : "false") << '\n';
  }

  void study_minimizers() {
    std::vector<std::uint64_t> seeds;
    for (std::size_t k = 0; k < o_.seeds; ++k) seeds.push_back(o_.seed + k);
    OptimizerConfig cfg;
    cfg.max_iterations = o_.max_iter;
    const MinimizerReport r = minimizer_study(n_list(), seeds, o_.dim, cfg);
    write_report("study-minimizers", r);
    std::vector<double> n, d;
    for (const auto& row : r.rows) {
      n.push_back(static_cast<double>(row.n));
      d.push_back(row.circle_w1inf);
    }
    plot("study-minimizers.dat", "n", "circle_w1inf", n, d);
    out_ << "circle_decreasing " << (r.circle_decreasing ? "true" : "false") << '\n';
  }

  void study_liminf() {
    const LiminfReport r = liminf_spotcheck(load_curve(), polygon_family_from_string(o_.family),
                                            n_list(), o_.seed, study_options());
    write_report("study-liminf", r);
    std::vector<double> n, e;
    for (const auto& row : r.rows) {
      n.push_back(static_cast<double>(row.n));
      e.push_back(row.energy);
    }
    plot("study-liminf.dat", "n", "energy", n, e);
    out_ << "liminf_proxy " << io::format_number(r.proxy.value) << " pass "
         << (r.pass ? "true" : "false") << '\n';
  }

 private:
  const Options& o_;
  std::ostream& out_;
  std::vector<std::string> artifacts_;
};

json option_values(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    if (opt->count() == 0 && opt->get_default_str().empty()) continue;
    const auto& res = opt->results();
    std::string name = opt->get_name();
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    if (res.empty()) {
      j[name] = opt->get_default_str();
    } else if (res.size() == 1) {
      j[name] = res.front();
    } else {
      j[name] = res;
    }
  }
  return j;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Discrete and smooth Moebius energies of closed curves", "moebius-kit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MOEBIUS_KIT_VERSION);
  app.add_option("--threads", o.threads, "Worker threads (default: MOEBIUS_KIT_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out-dir", o.out_dir, "Directory for artifacts and run-manifest.json")
      ->capture_default_str();

  auto* energy = app.add_subcommand("energy", "Evaluate an energy");
  auto* src = energy->add_option("--polygon", o.polygon, "Polygon JSON");
  energy->add_option("--curve", o.curve, "Curve descriptor JSON")->excludes(src);
  energy->add_option("--kind", o.kind, "discrete | mindist | smooth")
      ->check(CLI::IsMember({"discrete", "mindist", "smooth"}));
  energy->add_option("--scheme", o.scheme, "forward | averaged")
      ->check(CLI::IsMember({"forward", "averaged"}))
      ->capture_default_str();
  energy->add_option("--tol", o.tol, "Quadrature tolerance (smooth)");
  energy->add_option("--out", o.out, "Energy report JSON (default energy.json)");
  energy->add_option("--terms", o.terms, "Per-pair term matrix CSV");

  auto* inscribe = app.add_subcommand("inscribe", "Inscribe a polygon in a curve");
  inscribe->add_option("--curve", o.curve, "Curve descriptor JSON")->required();
  inscribe->add_option("--n", o.n, "Vertex count")->required();
  inscribe->add_flag("--equilateral", o.equilateral, "Equal chords instead of equal arcs");
  inscribe->add_option("--tol", o.tol, "Closure tolerance (equilateral)");
  inscribe->add_option("--out", o.out, "Polygon JSON (default polygon.json)");
  inscribe->add_option("--subdivision", o.subdivision, "Subdivision JSON")->capture_default_str();
  inscribe->add_option("--csv", o.csv, "Polygon CSV");

  auto* minimize = app.add_subcommand("minimize", "Projected descent over equilateral polygons");
  minimize->add_option("--n", o.n, "Vertex count of the random start");
  minimize->add_option("--seed", o.seed, "Seed of the random start")->capture_default_str();
  minimize->add_option("--dim", o.dim, "Ambient dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
  minimize->add_option("--polygon", o.polygon, "Start polygon JSON instead of a random one");
  minimize->add_option("--max-iter", o.max_iter, "Iteration cap")->capture_default_str();
  minimize->add_option("--out", o.out, "Final polygon JSON (default minimizer.json)");
  minimize->add_option("--trace", o.trace, "Descent trace CSV")->capture_default_str();

  auto* study = app.add_subcommand("study", "Scripted experiments");
  study->require_subcommand(1);
  auto add_common = [&](CLI::App* s, bool with_curve) {
    if (with_curve) s->add_option("--curve", o.curve, "Curve descriptor JSON")->required();
    s->add_option("--n", o.n_list, "n list: a:b:x2, a:b:+k or a,b,c")->required();
    s->add_option("--out", o.out, "Report CSV (JSON next to it)");
    s->add_flag("--plot-data", o.plot_data, "Also write two-column .dat files");
  };
  auto* rate = study->add_subcommand("rate", "Energy convergence rate of inscribed polygons");
  add_common(rate, true);
  rate->add_option("--mode", o.mode, "uniform | equilateral")
      ->check(CLI::IsMember({"uniform", "equilateral"}))
      ->capture_default_str();
  rate->add_option("--reference", o.reference, "Known curve energy (skips quadrature)");
  rate->add_option("--tol", o.tol, "Quadrature tolerance");
  auto* gamma = study->add_subcommand("gamma", "Recovery sequence energies and distances");
  add_common(gamma, true);
  gamma->add_option("--reference", o.reference, "Known curve energy (skips quadrature)");
  gamma->add_option("--tol", o.tol, "Quadrature tolerance");
  auto* mins = study->add_subcommand("minimizers", "Descent from random equilateral polygons");
  add_common(mins, false);
  mins->add_option("--seeds", o.seeds, "Number of seeds")->capture_default_str();
  mins->add_option("--seed", o.seed, "First seed")->capture_default_str();
  mins->add_option("--dim", o.dim, "Ambient dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
  mins->add_option("--max-iter", o.max_iter, "Iteration cap per run")->capture_default_str();
  auto* liminf = study->add_subcommand("liminf", "Lower bound spot check");
  add_common(liminf, true);
  liminf->add_option("--family", o.family, "inscribed | perturbed")
      ->check(CLI::IsMember({"inscribed", "perturbed"}))
      ->capture_default_str();
  liminf->add_option("--seed", o.seed, "Perturbation seed")->capture_default_str();
  liminf->add_option("--reference", o.reference, "Known curve energy (skips quadrature)");
  liminf->add_option("--tol", o.tol, "Quadrature tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (o.threads > 0) set_thread_count(o.threads);

  const CLI::App* leaf = nullptr;
  std::string command;
  for (const CLI::App* a = &app; !a->get_subcommands().empty();) {
    a = a->get_subcommands().front();
    command += command.empty() ? a->get_name() : " " + a->get_name();
    leaf = a;
  }

  Runner runner(o, out);
  int code = 0;
  std::string message;
  try {
    fs::create_directories(o.out_dir);
    if (leaf == energy) runner.energy();
    else if (leaf == inscribe) runner.inscribe();
    else if (leaf == minimize) runner.minimize();
    else if (leaf == rate) runner.study_rate();
    else if (leaf == gamma) runner.study_gamma();
    else if (leaf == mins) runner.study_minimizers();
    else if (leaf == liminf) runner.study_liminf();
  } catch (const Error& e) {
    code = exit_code(e.kind());
    message = e.what();
  } catch (const fs::filesystem_error& e) {
    code = 1;
    message = e.what();
  }
  if (code != 0) err << "error: " << message << '\n';

  json manifest;
  manifest["tool"] = "moebius-kit";
  manifest["version"] = MOEBIUS_KIT_VERSION;
  manifest["modules"] = {{"curves", MOEBIUS_KIT_VERSION},      {"polygon", MOEBIUS_KIT_VERSION},
                         {"energies", MOEBIUS_KIT_VERSION},    {"inscription", MOEBIUS_KIT_VERSION},
                         {"optimize", MOEBIUS_KIT_VERSION},    {"experiments", MOEBIUS_KIT_VERSION},
                         {"cli", MOEBIUS_KIT_VERSION}};
  manifest["command"] = command;
  manifest["argv"] = std::vector<std::string>(argv + 1, argv + argc);
  json config = option_values(&app);
  for (const CLI::App* a = &app; !a->get_subcommands().empty();) {
    a = a->get_subcommands().front();
    config.update(option_values(a));
  }
  manifest["config"] = config;
  manifest["seed"] = o.seed;
  manifest["threads"] = thread_count();
  manifest["artifacts"] = runner.artifacts();
  manifest["exit_code"] = code;
  if (!message.empty()) manifest["error"] = message;
  manifest["timestamp"] = timestamp();
  try {
    io::write_file(runner.path("run-manifest.json"), manifest.dump(2) + "\n");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (code == 0) code = 1;
  }
  return code;
}

}  // namespace moebius::cli
