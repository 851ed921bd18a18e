#include "cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "th/error.hpp"
#include "th/holo.hpp"
#include "th/json_util.hpp"
#include "th/localmodel.hpp"
#include "th/parallel.hpp"
#include "th/scene.hpp"
#include "th/strata.hpp"
#include "th/svg.hpp"
#include "th/tracer.hpp"
#include "th/tspace.hpp"

namespace th::cli {

namespace fs = std::filesystem;

namespace {

struct Config {
  std::string scene_path;
  std::string out_dir;
  unsigned threads = 0;
  std::size_t seed_grid = 16;
  std::optional<double> tol_contact;
  bool dot = false;
  bool svg = false;
  bool no_polyline = false;

  std::string seeds_file;
  std::string data_file;
  std::size_t probes = 2000;
  std::size_t samples = 2000;       // 3D shell samples
  std::size_t samples_per_arc = 8;  // 2D
  std::size_t per_curve = 256;
  bool strict_plus = false;
  std::vector<std::string> omegas;
  double epsilon = 1e-2;
};

void setup_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_logger_mt("th");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TH_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

void emit(const Json& j) { std::cout << dump_canonical(j) << std::flush; }

void write_output(const Config& cfg, const std::string& name, const std::string& text) {
  const fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
  write_text_file(dir / name, text);
  spdlog::info("wrote {}", (dir / name).string());
}

Scene load(const Config& cfg) {
  Scene scene = load_scene(cfg.scene_path);
  if (cfg.tol_contact) {
    ToleranceSet tol = scene.tol();
    tol.contact = *cfg.tol_contact;
    scene = scene.with_tolerances(tol);
  }
  return scene;
}

/// Returns the validation exit code, printing the report when it fails.
bool validated(const Scene& scene, Json* sink) {
  const ValidationReport report = validate(scene);
  if (sink) (*sink)["validation"] = to_json(report);
  if (!report.passed) {
    for (const auto& f : report.failures) spdlog::warn("validation: {}", f);
    if (!sink) emit(Json{{"validation", to_json(report)}});
  }
  return report.passed;
}

Json stratify_json(const Scene& scene, const Config& cfg) {
  const std::size_t dim = scene.dimension();
  Json points = Json::array();
  std::map<std::string, int> counts;
  auto key = [](const BoundaryPoint& b) {
    return std::to_string(b.multiplicity) + (b.side > 0 ? "+" : "-");
  };
  Json j{{"dimension", dim}};
  if (dim == 2) {
    const auto curves = extract_boundary_curves(scene);
    Json curve_json = Json::array();
    for (const auto& c : curves) {
      curve_json.push_back({{"length", round12(c.length)}, {"vertices", c.points.size()}});
      for (const Point& p : c.points) {
        const double lz = scene.lie_value(1, p);
        if (std::abs(lz) > scene.tol().deriv_zero) ++counts[lz > 0 ? "1+" : "1-"];
      }
    }
    for (const auto& t : locate_tangencies(scene, curves)) {
      Json b = to_json(t.point, dim);
      b["curve"] = t.curve;
      b["s"] = round12(t.s);
      points.push_back(b);
      ++counts[key(t.point)];
    }
    j["curves"] = curve_json;
  } else {
    for (const auto& b : stratum_sample_3d(scene, cfg.samples)) {
      ++counts[key(b)];
      if (b.multiplicity >= 2) points.push_back(to_json(b, dim));
    }
    j["samples"] = cfg.samples;
  }
  j["points"] = points;
  j["counts"] = counts;
  return j;
}

bool nested_filtration(const QuotientComplex& cx) {
  for (int k = 1; k < static_cast<int>(cx.dimension); ++k) {
    const auto outer = filtration(cx, k);
    for (std::size_t id : filtration(cx, k + 1))
      if (!std::binary_search(outer.begin(), outer.end(), id)) return false;
  }
  return true;
}

Json filtration_json(const QuotientComplex& cx) {
  Json j = Json::object();
  for (int k = 1; k <= static_cast<int>(cx.dimension); ++k) {
    const auto ids = filtration(cx, k);
    if (cx.mode == ComplexMode::Exact2d)
      j[std::to_string(k)] = ids;
    else
      j[std::to_string(k)] = {{"count", ids.size()}};
  }
  return j;
}

ComplexOptions complex_options(const Config& cfg) {
  ComplexOptions o;
  o.samples_per_arc = cfg.samples_per_arc;
  o.samples_3d = cfg.samples;
  return o;
}

struct ComplexResult {
  Json json;
  bool ok = true;
};

ComplexResult complex_json(const Scene& scene, const QuotientComplex& cx) {
  ComplexResult r;
  r.json = to_json(cx);
  const FiberStatistics stats = fiber_statistics(cx);
  r.json["fibers"] = to_json(stats);
  r.json["filtration"] = filtration_json(cx);
  const bool nested = nested_filtration(cx);
  r.json["filtration_nested"] = nested;
  r.ok = stats.violations.empty() && nested;
  if (cx.mode == ComplexMode::Exact2d) {
    const auto b = betti(cx);
    r.json["betti"] = b;
    if (scene.reference_betti()) {
      auto ref = *scene.reference_betti();
      ref.resize(2, 0);
      const bool match = ref == b;
      r.json["betti_matches_reference"] = match;
      r.ok = r.ok && match;
    }
  } else {
    r.json["betti"] = nullptr;
  }
  if (scene.reference_betti()) r.json["reference_betti"] = *scene.reference_betti();
  return r;
}

int cmd_validate(const Config& cfg) {
  const Scene scene = load(cfg);
  const ValidationReport report = validate(scene);
  emit(to_json(report));
  return report.passed ? kOk : kValidationFailed;
}

int cmd_stratify(const Config& cfg) {
  const Scene scene = load(cfg);
  if (!validated(scene, nullptr)) return kValidationFailed;
  emit(stratify_json(scene, cfg));
  return kOk;
}

int cmd_trace(const Config& cfg) {
  const Scene scene = load(cfg);
  if (!validated(scene, nullptr)) return kValidationFailed;
  std::vector<Point> seeds;
  if (!cfg.seeds_file.empty()) {
    const Json j = read_json_file(cfg.seeds_file);
    const Json& list = j.is_object() ? j.at("seeds") : j;
    for (const auto& s : list) seeds.push_back(point_from_json(s));
  } else {
    seeds = boundary_seeds(scene, cfg.seed_grid);
  }
  const auto records = trace_batch(scene, seeds);
  Json out = Json::array();
  bool ok = true;
  for (const auto& r : records) {
    out.push_back(to_json(r, scene.dimension(), !cfg.no_polyline));
    ok = ok && check_parity(r.divisor);
  }
  emit(out);
  return ok ? kOk : kInvariantViolated;
}

int cmd_complex(const Config& cfg) {
  const Scene scene = load(cfg);
  if (!validated(scene, nullptr)) return kValidationFailed;
  const QuotientComplex cx = build_complex(scene, complex_options(cfg));
  const ComplexResult r = complex_json(scene, cx);
  if (cfg.dot) write_output(cfg, "complex.dot", to_dot(cx.graph));
  if (cfg.svg && cx.mode == ComplexMode::Exact2d) write_output(cfg, "scene.svg", render_svg(scene, cx));
  emit(r.json);
  return r.ok ? kOk : kInvariantViolated;
}

int cmd_extract(const Config& cfg) {
  const Scene scene = load(cfg);
  if (!validated(scene, nullptr)) return kValidationFailed;
  ExtractOptions o;
  o.per_curve = cfg.per_curve;
  o.shell_samples = cfg.samples;
  o.strict_plus = cfg.strict_plus;
  const Json j = to_json(extract_boundary_data(scene, o));
  if (!cfg.out_dir.empty()) write_output(cfg, "boundary_data.json", dump_canonical(j));
  emit(j);
  return kOk;
}

int cmd_reconstruct(const Config& cfg) {
  const BoundaryData data = boundary_data_from_json(read_json_file(cfg.data_file));
  emit(to_json(reconstruct(data)));
  return kOk;
}

bool report_passes(const ReconstructionReport& r) {
  return r.order_axiom_failures == 0 && r.interior_acceptance >= 0.999 &&
         r.leaf_consistency == 1.0 && r.class_count_match.value_or(true) &&
         r.graph_isomorphic.value_or(true);
}

int cmd_verify(const Config& cfg) {
  const Scene scene = load(cfg);
  const BoundaryData data = boundary_data_from_json(read_json_file(cfg.data_file));
  std::optional<QuotientComplex> cx;
  if (scene.dimension() == 2 && !data.strict_plus) cx = build_complex_2d(scene, complex_options(cfg));
  VerifyOptions o;
  o.probes = cfg.probes;
  o.complex = cx ? &*cx : nullptr;
  const ReconstructionReport report = verify_reconstruction(scene, data, o);
  emit(to_json(report));
  return report_passes(report) ? kOk : kInvariantViolated;
}

int cmd_roundtrip(const Config& cfg) {
  std::vector<OmegaType> words;
  for (const auto& s : cfg.omegas) words.push_back(parse_omega(s));
  if (words.empty()) words = {{1, 1}, {2}, {1, 2, 1}, {3, 1}, {1, 4, 1}};
  Json out = Json::array();
  bool ok = true;
  for (const auto& w : words) {
    const RoundtripReport r = roundtrip(w, cfg.epsilon, true);
    out.push_back(to_json(r));
    ok = ok && r.passed;
  }
  emit(out);
  return ok ? kOk : kInvariantViolated;
}

int cmd_report(const Config& cfg) {
  const Scene scene = load(cfg);
  Json doc;
  doc["scene"] = scene_to_json(scene);
  Json verdicts = Json::object();
  if (!validated(scene, &doc)) {
    verdicts["validation"] = false;
    doc["verdicts"] = verdicts;
    emit(doc);
    return kValidationFailed;
  }
  verdicts["validation"] = true;
  std::string stage = "stratify";
  try {
    doc["stratify"] = stratify_json(scene, cfg);

    stage = "complex";
    const QuotientComplex cx = build_complex(scene, complex_options(cfg));
    const ComplexResult cr = complex_json(scene, cx);
    doc["complex"] = cr.json;
    verdicts["fiber_bounds"] = cr.json["fibers"]["violations"].empty();
    verdicts["filtration_nested"] = cr.json["filtration_nested"];
    if (cr.json.contains("betti_matches_reference"))
      verdicts["betti_matches_reference"] = cr.json["betti_matches_reference"];
    bool parity = true;
    for (const auto& c : cx.classes) parity = parity && check_parity(c.representative.divisor);
    verdicts["divisor_parity"] = parity;

    stage = "holography";
    ExtractOptions eo;
    eo.per_curve = cfg.per_curve;
    eo.shell_samples = cfg.samples;
    const BoundaryData extracted = extract_boundary_data(scene, eo);
    // Reconstruction consumes the serialized form only.
    const BoundaryData data = boundary_data_from_json(Json::parse(to_json(extracted).dump()));
    const Reconstruction rec = reconstruct(data);
    VerifyOptions vo;
    vo.probes = cfg.probes;
    vo.complex = cx.mode == ComplexMode::Exact2d ? &cx : nullptr;
    const ReconstructionReport rep = verify_reconstruction(scene, data, vo);
    Json holo{{"samples", data.samples.size()},
              {"relations", data.relations.size()},
              {"reconstruction", {{"class_count", rec.classes.size()}}},
              {"verify", to_json(rep)}};
    if (rec.graph) {
      const auto [b0, b1] = betti_gf2(*rec.graph);
      holo["reconstruction"]["graph"] = {{"vertices", rec.graph->vertex_count},
                                         {"edges", rec.graph->edges.size()},
                                         {"betti", {b0, b1}}};
    }
    doc["holography"] = holo;
    verdicts["holography"] = report_passes(rep);
  } catch (const Error& e) {
    doc["error"] = {{"stage", stage}, {"kind", to_string(e.kind())}, {"message", e.what()}};
    doc["verdicts"] = verdicts;
    emit(doc);
    return kPipelineError;
  }
  doc["verdicts"] = verdicts;
  bool all = true;
  for (const auto& [k, v] : verdicts.items()) all = all && v.get<bool>();
  doc["passed"] = all;
  emit(doc);
  return all ? kOk : kInvariantViolated;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  setup_logging();
  Config cfg;
  CLI::App app{"Trajectory spaces and boundary holography for traversing flows", "th"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", cfg.out_dir, "Directory for written artifacts");
  app.add_option("--threads", cfg.threads, "Worker threads (default: hardware concurrency)");
  app.add_option("--seed-grid", cfg.seed_grid, "Boundary seeds per curve for trace");
  app.add_option("--tol-contact", cfg.tol_contact, "Override tol.contact of the scene");
  app.add_flag("--dot", cfg.dot, "Write complex.dot");
  app.add_flag("--svg", cfg.svg, "Write scene.svg (planar scenes)");
  app.add_flag("--no-polyline", cfg.no_polyline, "Omit trajectory polylines");
  app.add_option("--probes", cfg.probes, "Interior probes for holography verify");
  app.add_option("--samples", cfg.samples, "Boundary samples in dimension 3");
  app.add_option("--samples-per-arc", cfg.samples_per_arc, "Traces per boundary arc in dimension 2");
  app.add_option("--per-curve", cfg.per_curve, "Holography seeds per boundary curve");

  auto scene_cmd = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("scene", cfg.scene_path, "Scene JSON file")->required()->check(CLI::ExistingFile);
    return sub;
  };
  auto* validate_cmd = scene_cmd("validate", "Check the standing hypotheses on a grid");
  auto* stratify_cmd = scene_cmd("stratify", "Classify boundary tangency strata");
  auto* trace_cmd = scene_cmd("trace", "Trace trajectories and report their divisors");
  trace_cmd->add_option("--seeds", cfg.seeds_file, "JSON array of seed points")->check(CLI::ExistingFile);
  trace_cmd->add_option("--grid", cfg.seed_grid, "Boundary seeds per curve");
  auto* complex_cmd = scene_cmd("complex", "Build the trajectory-space complex");
  auto* report_cmd = scene_cmd("report", "Run every stage and consolidate verdicts");

  auto* holo_cmd = app.add_subcommand("holography", "Boundary-data reconstruction");
  holo_cmd->require_subcommand(1);
  auto* extract_cmd = holo_cmd->add_subcommand("extract", "Record boundary data of a scene");
  extract_cmd->add_option("scene", cfg.scene_path, "Scene JSON file")->required()->check(CLI::ExistingFile);
  extract_cmd->add_flag("--strict-plus", cfg.strict_plus, "Keep only samples on the + boundary");
  auto* reconstruct_cmd = holo_cmd->add_subcommand("reconstruct", "Rebuild classes from boundary data");
  reconstruct_cmd->add_option("--data", cfg.data_file, "Boundary data JSON")->required()->check(CLI::ExistingFile);
  auto* verify_cmd = holo_cmd->add_subcommand("verify", "Check a reconstruction against its scene");
  verify_cmd->add_option("scene", cfg.scene_path, "Scene JSON file")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--data", cfg.data_file, "Boundary data JSON")->required()->check(CLI::ExistingFile);

  auto* roundtrip_cmd = app.add_subcommand("roundtrip", "Trace local models of given multiplicity words");
  roundtrip_cmd->add_option("--omega", cfg.omegas, "Multiplicity word such as 1,2,1 (repeatable)");
  roundtrip_cmd->add_option("--epsilon", cfg.epsilon, "Coefficient perturbation");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  if (cfg.threads > 0) set_thread_count(cfg.threads);
  if (cfg.tol_contact && !(*cfg.tol_contact > 0.0)) {
    std::cerr << "error: --tol-contact must be positive\n";
    return kUsage;
  }

  try {
    if (*validate_cmd) return cmd_validate(cfg);
    if (*stratify_cmd) return cmd_stratify(cfg);
    if (*trace_cmd) return cmd_trace(cfg);
    if (*complex_cmd) return cmd_complex(cfg);
    if (*report_cmd) return cmd_report(cfg);
    if (*extract_cmd) return cmd_extract(cfg);
    if (*reconstruct_cmd) return cmd_reconstruct(cfg);
    if (*verify_cmd) return cmd_verify(cfg);
    if (*roundtrip_cmd) return cmd_roundtrip(cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Scene && cfg.tol_contact) {
      std::cerr << "error: " << e.what() << "\n";
      return kUsage;
    }
    spdlog::error("{}: {}", to_string(e.kind()), e.what());
    emit(Json{{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}});
    return kPipelineError;
  }
  std::cerr << app.help();
  return kUsage;
}

}  // namespace th::cli
