// Command-line front end: 1D interpolation, discrete-to-continuum energy
// checks, semi-supervised labeling, image inpainting, and the prox self
// test. Every subcommand is deterministic under fixed --seed and writes
// machine-readable CSV/JSON outputs plus an effective-config dump that
// reproduces the run via --config.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hpl/energy.hpp"
#include "hpl/experiments.hpp"
#include "hpl/image.hpp"
#include "hpl/inpaint.hpp"
#include "hpl/parallel.hpp"
#include "hpl/prox_selftest.hpp"
#include "hpl/solver.hpp"
#include "hpl/ssl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 0;
};

void add_global_options(CLI::App* app, GlobalOpts& g) {
  app->add_option("--seed", g.seed, "RNG seed (uint64)");
  app->add_option("--out-dir", g.out_dir, "Directory for default outputs");
  app->add_option("--threads", g.threads,
                  "Worker threads (0 = hardware concurrency)");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

struct GraphSpec {
  hpl::GraphFamily family = hpl::GraphFamily::eps;
  double eps = 0.0;
  int k = 0;
};

GraphSpec parse_graph(const std::string& s) {
  GraphSpec g;
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string tail =
      colon == std::string::npos ? "" : s.substr(colon + 1);
  try {
    if (head == "eps") {
      g.family = hpl::GraphFamily::eps;
      g.eps = std::stod(tail);
      return g;
    }
    if (head == "knn") {
      g.family = hpl::GraphFamily::knn;
      g.k = std::stoi(tail);
      return g;
    }
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("--graph expects eps:VALUE or knn:VALUE, got \"" +
                              s + "\"");
}

hpl::WeightScheme parse_weights(const std::string& s) {
  if (s == "homogeneous") return hpl::WeightScheme::homogeneous();
  const std::string prefix = "selftuning:";
  if (s.rfind(prefix, 0) == 0) {
    try {
      return hpl::WeightScheme::self_tuning(std::stoi(s.substr(prefix.size())));
    } catch (const std::exception&) {
    }
  }
  throw std::invalid_argument(
      "--weights expects homogeneous or selftuning:K0, got \"" + s + "\"");
}

hpl::InpaintMethod parse_method(const std::string& s) {
  if (s == "gpl") return hpl::InpaintMethod::gpl;
  if (s == "hpl") return hpl::InpaintMethod::hpl;
  throw std::invalid_argument("--method expects gpl or hpl, got \"" + s + "\"");
}

// Builds the structure requested by --method/--graph over a cloud.
hpl::Hypergraph build_structure(const hpl::PointCloud& cloud,
                                const hpl::NeighborIndex& index,
                                hpl::InpaintMethod method, const GraphSpec& gs,
                                const hpl::WeightScheme& scheme) {
  if (method == hpl::InpaintMethod::gpl) {
    return gs.family == hpl::GraphFamily::eps
               ? hpl::build_pair_graph_eps(cloud, gs.eps, scheme, &index)
               : hpl::build_pair_graph_knn(cloud, gs.k, scheme, &index);
  }
  return gs.family == hpl::GraphFamily::eps
             ? hpl::build_eps_ball(cloud, gs.eps, scheme, &index)
             : hpl::build_knn(cloud, gs.k, scheme, &index);
}

// ---------------------------------------------------------------------------
// Effective-config round trip: --config FILE loads a flat JSON object whose
// keys are long option names; values are injected as synthetic argv tokens
// right after the subcommand, so explicit flags (later tokens) override the
// file. Keys holding arrays repeat the flag; the file's array is dropped
// whenever the flag appears explicitly.
// ---------------------------------------------------------------------------

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw std::invalid_argument("--config expects a file path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;

  std::ifstream in(config_path);
  if (!in)
    throw std::invalid_argument("cannot open config file: " + config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config parse error: " + std::string(e.what()));
  }
  if (!cfg.is_object())
    throw std::invalid_argument("config must be a JSON object");

  std::string sub = cfg.value("subcommand", "");
  std::vector<std::string> out;
  std::size_t insert_at = 0;
  if (!rest.empty() && !rest.front().empty() && rest.front()[0] != '-') {
    if (!sub.empty() && rest.front() != sub)
      throw std::invalid_argument("config is for subcommand \"" + sub +
                                  "\" but \"" + rest.front() +
                                  "\" was requested");
    out.push_back(rest.front());
    insert_at = 1;
  } else if (!sub.empty()) {
    out.push_back(sub);
  } else {
    throw std::invalid_argument("config has no subcommand field");
  }

  auto to_token = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  for (const auto& [key, value] : cfg.items()) {
    if (key == "subcommand") continue;
    const std::string flag = "--" + key;
    const bool overridden =
        std::find(rest.begin() + insert_at, rest.end(), flag) != rest.end();
    if (overridden && value.is_array()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& item : value) {
        out.push_back(flag);
        out.push_back(to_token(item));
      }
    } else {
      out.push_back(flag);
      out.push_back(to_token(value));
    }
  }
  out.insert(out.end(), rest.begin() + insert_at, rest.end());
  return out;
}

// ---------------------------------------------------------------------------
// interp1d
// ---------------------------------------------------------------------------

struct Interp1dOpts {
  GlobalOpts g;
  std::size_t n = 1280;
  std::string graph = "eps:0.048";
  double p = 2.0;
  std::string weights = "homogeneous";
  std::string labels_file;
  std::size_t epochs = 200;
  double tol = 1e-7;
  std::string out;
  std::string metrics_out;
};

int run_interp1d_cmd(const Interp1dOpts& o) {
  hpl::set_thread_count(o.g.threads);
  const fs::path out_dir(o.g.out_dir);
  fs::create_directories(out_dir);
  const fs::path out_csv =
      o.out.empty() ? out_dir / "interp1d.csv" : fs::path(o.out);
  const fs::path out_json = o.metrics_out.empty()
                                ? out_dir / "interp1d_metrics.json"
                                : fs::path(o.metrics_out);

  const GraphSpec gs = parse_graph(o.graph);
  hpl::Interp1dConfig cfg;
  cfg.n = o.n;
  cfg.family = gs.family;
  cfg.eps = gs.eps;
  cfg.k = gs.k;
  cfg.p = o.p;
  cfg.scheme = parse_weights(o.weights);
  cfg.seed = o.g.seed;
  cfg.solver.epochs = o.epochs;
  cfg.solver.tol = o.tol;
  cfg.solver.seed = o.g.seed;
  if (!o.labels_file.empty()) cfg.labels = hpl::load_labels(o.labels_file);

  const hpl::Interp1dResult res = hpl::run_interp1d(cfg);

  // rows sorted by x
  std::vector<std::size_t> order(res.cloud.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return res.cloud.coord(a, 0) < res.cloud.coord(b, 0);
  });
  std::string csv = "x,u_gpl,u_hpl\n";
  for (std::size_t i : order)
    csv += fmt(res.cloud.coord(i, 0)) + "," + fmt(res.u_gpl[i]) + "," +
           fmt(res.u_hpl[i]) + "\n";
  write_text(out_csv, csv);

  json metrics;
  metrics["n"] = o.n;
  metrics["graph"] = o.graph;
  metrics["p"] = o.p;
  metrics["spike_index"] = {{"gpl", res.spike_gpl}, {"hpl", res.spike_hpl}};
  json labels = json::array();
  for (const auto& [i, y] : res.labels.entries)
    labels.push_back({{"index", i},
                      {"x", res.cloud.coord(static_cast<std::size_t>(i), 0)},
                      {"y", y}});
  metrics["labels"] = labels;
  metrics["gpl"] = res.diag_gpl.to_json();
  metrics["hpl"] = res.diag_hpl.to_json();
  metrics["warnings"] = res.warnings;
  write_json(out_json, metrics);

  json dump{{"subcommand", "interp1d"}, {"seed", o.g.seed},
            {"threads", o.g.threads}, {"n", o.n},
            {"graph", o.graph},       {"p", o.p},
            {"weights", o.weights},   {"epochs", o.epochs},
            {"tol", o.tol}};
  if (!o.labels_file.empty()) dump["labels"] = o.labels_file;
  if (!o.out.empty()) dump["out"] = o.out;
  if (!o.metrics_out.empty()) dump["metrics-out"] = o.metrics_out;
  write_json(out_dir / "interp1d_config.json", dump);
  std::cout << "interp1d: spike gpl=" << fmt(res.spike_gpl)
            << " hpl=" << fmt(res.spike_hpl) << " -> " << out_csv.string()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// gamma-check
// ---------------------------------------------------------------------------

struct GammaOpts {
  GlobalOpts g;
  std::string function = "linear";
  double p = 2.0;
  std::string kind = "eps";
  std::vector<std::string> points;
  std::string out;
};

int run_gamma_cmd(const GammaOpts& o) {
  hpl::set_thread_count(o.g.threads);
  const fs::path out_dir(o.g.out_dir);
  fs::create_directories(out_dir);
  const fs::path out_csv =
      o.out.empty() ? out_dir / "gamma_check.csv" : fs::path(o.out);

  std::function<double(double)> u_fn, grad_fn;
  if (o.function == "linear") {
    u_fn = [](double x) { return x; };
    grad_fn = [](double) { return 1.0; };
  } else if (o.function == "quadratic") {
    u_fn = [](double x) { return x * x; };
    grad_fn = [](double x) { return 2.0 * x; };
  } else if (o.function == "sine") {
    u_fn = [](double x) { return std::sin(2.0 * std::numbers::pi * x); };
    grad_fn = [](double x) {
      return 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * x);
    };
  } else if (o.function == "constant") {
    u_fn = [](double) { return 1.0; };
    grad_fn = [](double) { return 0.0; };
  } else {
    throw std::invalid_argument("--function expects linear|quadratic|sine|constant");
  }

  hpl::GraphFamily family;
  if (o.kind == "eps")
    family = hpl::GraphFamily::eps;
  else if (o.kind == "knn")
    family = hpl::GraphFamily::knn;
  else
    throw std::invalid_argument("--kind expects eps or knn");

  if (o.points.empty())
    throw std::invalid_argument("gamma-check needs at least one --point n:param");
  std::vector<std::pair<std::size_t, double>> schedule;
  for (const auto& s : o.points) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--point expects n:param, got \"" + s + "\"");
    try {
      schedule.emplace_back(std::stoull(s.substr(0, colon)),
                            std::stod(s.substr(colon + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("--point expects n:param, got \"" + s + "\"");
    }
  }

  const auto report =
      hpl::gamma_check(u_fn, grad_fn, o.p, family, schedule, o.g.seed);
  std::ostringstream csv;
  report.write_csv(csv);
  write_text(out_csv, csv.str());
  for (const auto& w : report.warnings)
    std::cerr << "warning: " << w << "\n";

  json dump{{"subcommand", "gamma-check"}, {"seed", o.g.seed},
            {"threads", o.g.threads},      {"function", o.function},
            {"p", o.p},                    {"kind", o.kind},
            {"point", o.points}};
  if (!o.out.empty()) dump["out"] = o.out;
  write_json(out_dir / "gamma_check_config.json", dump);
  std::cout << "gamma-check: " << report.rows.size() << " rows -> "
            << out_csv.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// ssl
// ---------------------------------------------------------------------------

struct SslOpts {
  GlobalOpts g;
  std::string points_file;
  std::string labels_file;
  std::string truth_file;
  std::string method = "hpl";
  std::string graph = "knn:21";
  double p = 2.0;
  std::string weights = "selftuning:21";
  std::size_t epochs = 200;
  double tol = 1e-6;
  std::string out;
  std::string metrics_out;
};

int run_ssl_cmd(const SslOpts& o) {
  hpl::set_thread_count(o.g.threads);
  const fs::path out_dir(o.g.out_dir);
  fs::create_directories(out_dir);
  const fs::path out_csv =
      o.out.empty() ? out_dir / "predictions.csv" : fs::path(o.out);
  const fs::path out_json = o.metrics_out.empty()
                                ? out_dir / "ssl_metrics.json"
                                : fs::path(o.metrics_out);

  const hpl::PointCloud cloud = hpl::load_point_cloud(o.points_file);
  const hpl::LabelConstraints raw = hpl::load_labels(o.labels_file);
  std::vector<std::pair<int, int>> assignments;
  for (const auto& [i, y] : raw.entries)
    assignments.emplace_back(i, static_cast<int>(std::llround(y)));
  const auto labels = hpl::ClassLabels::from_assignments(assignments);

  const GraphSpec gs = parse_graph(o.graph);
  const hpl::NeighborIndex index(cloud);
  const hpl::Hypergraph hg =
      build_structure(cloud, index, parse_method(o.method), gs,
                      parse_weights(o.weights));

  hpl::SolverConfig scfg;
  scfg.epochs = o.epochs;
  scfg.tol = o.tol;
  scfg.seed = o.g.seed;
  const auto result = hpl::one_vs_rest(hg, labels, o.p, scfg);

  std::string csv = "index,class\n";
  for (std::size_t v = 0; v < result.predictions.size(); ++v)
    csv += std::to_string(v) + "," + std::to_string(result.predictions[v]) +
           "\n";
  write_text(out_csv, csv);

  json metrics;
  metrics["n"] = cloud.size();
  metrics["dim"] = cloud.dim();
  metrics["method"] = o.method;
  metrics["graph"] = o.graph;
  metrics["classes"] = labels.class_ids;
  metrics["labeled"] = labels.assignments.size();
  metrics["connected"] = hg.connected;
  metrics["warnings"] = result.warnings;
  if (!o.truth_file.empty()) {
    const hpl::LabelConstraints traw = hpl::load_labels(o.truth_file);
    std::vector<int> truth(cloud.size(), -1);
    for (const auto& [i, y] : traw.entries)
      truth[static_cast<std::size_t>(i)] = static_cast<int>(std::llround(y));
    std::vector<int> training;
    for (const auto& [v, c] : labels.assignments) training.push_back(v);
    metrics["accuracy"] =
        hpl::accuracy(result.predictions, truth, training, false);
    metrics["accuracy_unlabeled"] =
        hpl::accuracy(result.predictions, truth, training, true);
  }
  write_json(out_json, metrics);

  json dump{{"subcommand", "ssl"},    {"seed", o.g.seed},
            {"threads", o.g.threads}, {"points", o.points_file},
            {"labels", o.labels_file}, {"method", o.method},
            {"graph", o.graph},       {"p", o.p},
            {"weights", o.weights},   {"epochs", o.epochs},
            {"tol", o.tol}};
  if (!o.truth_file.empty()) dump["truth"] = o.truth_file;
  if (!o.out.empty()) dump["out"] = o.out;
  if (!o.metrics_out.empty()) dump["metrics-out"] = o.metrics_out;
  write_json(out_dir / "ssl_config.json", dump);
  std::cout << "ssl: " << result.predictions.size() << " predictions -> "
            << out_csv.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// inpaint
// ---------------------------------------------------------------------------

struct InpaintOpts {
  GlobalOpts g;
  std::string image_file;
  std::string mask_file;
  double sample_rate = 0.0;
  std::string method = "hpl";
  int s1 = 11;
  int s2 = 11;
  double lambda = 10.0;
  int knn = 21;
  int K = 0;
  double p = 2.0;
  std::size_t epochs = 60;
  double tol = 1e-5;
  std::string initial_file;
  std::string reference_file;
  std::string out;
  std::string metrics_out;
  std::string mask_out;
};

int run_inpaint_cmd(const InpaintOpts& o) {
  hpl::set_thread_count(o.g.threads);
  const fs::path out_dir(o.g.out_dir);
  fs::create_directories(out_dir);
  const fs::path out_pgm =
      o.out.empty() ? out_dir / "inpainted.pgm" : fs::path(o.out);
  const fs::path out_json = o.metrics_out.empty()
                                ? out_dir / "inpaint_metrics.json"
                                : fs::path(o.metrics_out);

  if (o.mask_file.empty() == (o.sample_rate == 0.0))
    throw std::invalid_argument(
        "inpaint needs exactly one of --mask or --sample-rate");

  const hpl::ImageGrid img = hpl::load_pgm(o.image_file);
  const hpl::PixelMask mask =
      o.mask_file.empty()
          ? hpl::sample_mask(img.rows, img.cols, o.sample_rate, o.g.seed)
          : hpl::load_mask(o.mask_file, img.rows, img.cols);
  if (!o.mask_out.empty()) hpl::save_mask(mask, o.mask_out);

  hpl::PatchConfig pcfg;
  pcfg.s1 = o.s1;
  pcfg.s2 = o.s2;
  pcfg.lambda = o.lambda;
  pcfg.k_n = o.knn;
  pcfg.K = o.K;
  pcfg.method = parse_method(o.method);
  pcfg.p = o.p;
  hpl::SolverConfig scfg;
  scfg.epochs = o.epochs;
  scfg.tol = o.tol;
  scfg.seed = o.g.seed;

  std::optional<hpl::ImageGrid> initial;
  if (!o.initial_file.empty()) initial = hpl::load_pgm(o.initial_file);

  hpl::InpaintDiagnostics diag;
  const hpl::ImageGrid restored =
      hpl::inpaint(img, mask, pcfg, scfg,
                   initial.has_value() ? &*initial : nullptr, &diag);
  hpl::save_pgm(restored, out_pgm);

  json metrics;
  metrics["method"] = o.method;
  metrics["observed_pixels"] = mask.count();
  metrics["rows"] = img.rows;
  metrics["cols"] = img.cols;
  metrics["K"] = pcfg.outer_iterations();
  metrics["diagnostics"] = diag.to_json();
  if (!o.reference_file.empty()) {
    const hpl::ImageGrid ref = hpl::load_pgm(o.reference_file);
    const double q = hpl::psnr(ref, restored);
    metrics["psnr_db"] = std::isinf(q) ? 99.0 : q;
    metrics["ssim"] = hpl::ssim(ref, restored);
  }
  write_json(out_json, metrics);

  json dump{{"subcommand", "inpaint"}, {"seed", o.g.seed},
            {"threads", o.g.threads},  {"image", o.image_file},
            {"method", o.method},      {"s1", o.s1},
            {"s2", o.s2},              {"lambda", o.lambda},
            {"knn", o.knn},            {"K", o.K},
            {"p", o.p},                {"epochs", o.epochs},
            {"tol", o.tol}};
  if (!o.mask_file.empty()) dump["mask"] = o.mask_file;
  if (o.sample_rate > 0.0) dump["sample-rate"] = o.sample_rate;
  if (!o.initial_file.empty()) dump["initial"] = o.initial_file;
  if (!o.reference_file.empty()) dump["reference"] = o.reference_file;
  if (!o.out.empty()) dump["out"] = o.out;
  if (!o.metrics_out.empty()) dump["metrics-out"] = o.metrics_out;
  if (!o.mask_out.empty()) dump["mask-out"] = o.mask_out;
  write_json(out_dir / "inpaint_config.json", dump);
  std::cout << "inpaint: " << mask.count() << " observed pixels -> "
            << out_pgm.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// prox-test
// ---------------------------------------------------------------------------

struct ProxTestOpts {
  GlobalOpts g;
  std::size_t instances = 1000;
  std::size_t max_m = 6;
  std::string out;
};

int run_prox_test_cmd(const ProxTestOpts& o) {
  const auto rep = hpl::run_prox_selftest(o.instances, o.max_m, o.g.seed);
  const json j = rep.to_json();
  std::cout << j.dump(2) << "\n";
  if (!o.out.empty()) write_json(o.out, j);
  const fs::path out_dir(o.g.out_dir);
  fs::create_directories(out_dir);
  json dump{{"subcommand", "prox-test"},
            {"seed", o.g.seed},
            {"threads", o.g.threads},
            {"instances", o.instances},
            {"max-m", o.max_m}};
  if (!o.out.empty()) dump["out"] = o.out;
  write_json(out_dir / "prox_test_config.json", dump);
  return rep.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-cloud interpolation via hypergraph p-Laplacian "
               "regularization"};
  app.require_subcommand(1);

  Interp1dOpts io;
  auto* interp = app.add_subcommand(
      "interp1d", "1D interpolation: pairwise graph vs hypergraph");
  add_global_options(interp, io.g);
  interp->add_option("--n", io.n, "Number of sampled points");
  interp->add_option("--graph", io.graph, "eps:VALUE or knn:VALUE");
  interp->add_option("--p", io.p, "Exponent p >= 1");
  interp->add_option("--weights", io.weights,
                     "homogeneous or selftuning:K0");
  interp->add_option("--labels", io.labels_file,
                     "Label CSV (index,value); default: six-point set");
  interp->add_option("--epochs", io.epochs, "Solver epochs");
  interp->add_option("--tol", io.tol, "Solver stopping tolerance");
  interp->add_option("--out", io.out, "Results CSV path");
  interp->add_option("--metrics-out", io.metrics_out, "Metrics JSON path");

  GammaOpts go;
  auto* gamma = app.add_subcommand(
      "gamma-check", "Discrete vs continuum energy trend report");
  add_global_options(gamma, go.g);
  gamma->add_option("--function", go.function,
                    "linear|quadratic|sine|constant");
  gamma->add_option("--p", go.p, "Exponent p >= 1");
  gamma->add_option("--kind", go.kind, "eps or knn");
  gamma->add_option("--point", go.points,
                    "Schedule entry n:param (repeatable)");
  gamma->add_option("--out", go.out, "Report CSV path");

  SslOpts so;
  auto* ssl = app.add_subcommand("ssl",
                                 "One-vs-rest semi-supervised labeling");
  add_global_options(ssl, so.g);
  ssl->add_option("--points", so.points_file, "Point cloud CSV")->required();
  ssl->add_option("--labels", so.labels_file, "Training labels CSV")
      ->required();
  ssl->add_option("--truth", so.truth_file,
                  "Ground-truth labels CSV for accuracy reporting");
  ssl->add_option("--method", so.method, "gpl or hpl");
  ssl->add_option("--graph", so.graph, "eps:VALUE or knn:VALUE");
  ssl->add_option("--p", so.p, "Exponent p >= 1");
  ssl->add_option("--weights", so.weights, "homogeneous or selftuning:K0");
  ssl->add_option("--epochs", so.epochs, "Solver epochs");
  ssl->add_option("--tol", so.tol, "Solver stopping tolerance");
  ssl->add_option("--out", so.out, "Predictions CSV path");
  ssl->add_option("--metrics-out", so.metrics_out, "Metrics JSON path");

  InpaintOpts po;
  auto* inp = app.add_subcommand("inpaint",
                                 "Patch-based grayscale inpainting");
  add_global_options(inp, po.g);
  inp->add_option("--image", po.image_file, "Observed image (PGM)")
      ->required();
  inp->add_option("--mask", po.mask_file, "Observed-pixel CSV (i,j rows)");
  inp->add_option("--sample-rate", po.sample_rate,
                  "Generate a mask with this observation rate");
  inp->add_option("--method", po.method, "gpl or hpl");
  inp->add_option("--s1", po.s1, "Patch height (odd)");
  inp->add_option("--s2", po.s2, "Patch width (odd)");
  inp->add_option("--lambda", po.lambda, "Semilocal coordinate weight");
  inp->add_option("--knn", po.knn, "Neighbors per patch");
  inp->add_option("--K", po.K, "Outer iterations (0 = method default)");
  inp->add_option("--p", po.p, "Exponent p >= 1");
  inp->add_option("--epochs", po.epochs, "Solver epochs per outer iteration");
  inp->add_option("--tol", po.tol, "Solver stopping tolerance");
  inp->add_option("--initial", po.initial_file, "Initial guess (PGM)");
  inp->add_option("--reference", po.reference_file,
                  "Ground truth (PGM) for PSNR/SSIM");
  inp->add_option("--out", po.out, "Restored image path (PGM)");
  inp->add_option("--metrics-out", po.metrics_out, "Metrics JSON path");
  inp->add_option("--mask-out", po.mask_out, "Write the generated mask CSV");

  ProxTestOpts xo;
  auto* prox = app.add_subcommand("prox-test",
                                  "Prox oracle self-test (prints JSON)");
  add_global_options(prox, xo.g);
  prox->add_option("--instances", xo.instances, "Random instances");
  prox->add_option("--max-m", xo.max_m, "Max vector length");
  prox->add_option("--out", xo.out, "Also write the JSON report here");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args);
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (interp->parsed()) return run_interp1d_cmd(io);
    if (gamma->parsed()) return run_gamma_cmd(go);
    if (ssl->parsed()) return run_ssl_cmd(so);
    if (inp->parsed()) return run_inpaint_cmd(po);
    if (prox->parsed()) return run_prox_test_cmd(xo);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
