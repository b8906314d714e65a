// Command-line front end: generate graphs, run the solver, the spectral
// baseline, clone ensembles, parameter sweeps and timing benchmarks.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sdpcd/edge_list_io.hpp"
#include "sdpcd/errors.hpp"
#include "sdpcd/experiment.hpp"

namespace {

using namespace sdpcd;

enum ExitCode { kOk = 0, kInvalidConfig = 1, kIoFailure = 2, kNotConverged = 3 };

struct Overrides {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> settings;
};

void add_common_flags(CLI::App* sub, Overrides& ov) {
  auto setting = [&ov, sub](const std::string& name, const std::string& help) {
    const std::string key = name;
    sub->add_option_function<std::string>(
        "--" + name, [&ov, key](const std::string& v) { ov.settings.emplace_back(key, v); }, help);
  };
  auto flag = [&ov, sub](const std::string& name, const std::string& help) {
    const std::string key = name;
    sub->add_flag_callback(
        "--" + name, [&ov, key] { ov.settings.emplace_back(key, "true"); }, help);
  };
  sub->add_option("--config", ov.config_path, "key = value settings file; flags override it");
  setting("n", "vertex count of the generated graph");
  setting("c", "mean degree");
  setting("lambda", "signal-to-noise ratio");
  setting("cin", "intra-group degree parameter (with --cout instead of --lambda)");
  setting("cout", "inter-group degree parameter");
  setting("p", "neighborhood-clique probability on the 2-core");
  setting("m", "spin rank");
  setting("eps", "stop when the largest spin change in a sweep is below this");
  setting("max-sweeps", "sweep limit per solver run");
  setting("field-rule", "exclude | include the spin itself in the magnetization term");
  setting("clones", "independent solver runs on the same graph");
  setting("seed", "master seed");
  setting("checkpoints", "comma-separated sweeps at which overlaps are measured");
  setting("threads", "worker threads (0: all cores)");
  setting("out", "output path stem");
  setting("format", "csv | json");
  setting("graph", "edge-list file to use instead of generating an SBM graph");
  flag("extend-trees", "score on the full graph by extending labels to pruned trees");
  flag("procrustes", "align clone pairs with the best orthogonal map");
  flag("strict", "exit with status 3 when a solver run does not converge");
  flag("no-spectral", "skip the Bethe Hessian baseline");
}

void print_record(const RunRecord& r, const std::string& tag = "") {
  std::printf("%sgraph: raw %zu vertices / %zu edges, core %zu / %zu", tag.c_str(),
              r.graph.raw_vertices, r.graph.raw_edges, r.graph.core_vertices, r.graph.core_edges);
  if (r.graph.clique_edges) std::printf(" (+%zu clique edges)", r.graph.clique_edges);
  std::printf("\n");
  if (!r.clones.empty()) {
    std::size_t converged = 0;
    double t = 0.0;
    for (const auto& c : r.clones) {
      converged += c.converged ? 1 : 0;
      t += static_cast<double>(c.t_conv);
    }
    std::printf("%sclones: %zu, converged %zu, mean t_conv %.1f, overlap %.4f +- %.4f, %.2f s\n",
                tag.c_str(), r.clones.size(), converged, t / static_cast<double>(r.clones.size()),
                r.mean_overlap(), r.overlap_stddev(), r.solve_seconds);
  }
  if (r.spectral.computed) {
    std::printf("%sspectral: overlap %.4f, lambda2 %.4f, IPR %.3g%s\n", tag.c_str(),
                r.spectral.overlap, r.spectral.second_eigenvalue, r.spectral.localization,
                r.spectral.detected ? "" : " (no detection)");
  }
  if (r.distances.computed && !r.distances.raw.empty()) {
    std::printf("%sdistances: raw median %.4f, aligned median %.4f\n", tag.c_str(),
                quantile(r.distances.raw, 0.5), quantile(r.distances.aligned, 0.5));
  }
}

void print_written(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::printf("wrote %s\n", p.string().c_str());
}

int run(ExperimentConfig cfg) {
  switch (cfg.kind) {
    case ExperimentKind::kGenerate: {
      const PreparedGraph g = prepare_graph(cfg);
      save_edge_list(cfg.out, g.raw, g.planted ? &*g.planted : nullptr);
      std::printf("graph: %zu vertices, %zu edges (core %zu / %zu)\nwrote %s\n",
                  g.raw.num_vertices(), g.raw.num_edges(), g.two_core.core.num_vertices(),
                  g.two_core.core.num_edges(), cfg.out.c_str());
      return kOk;
    }
    case ExperimentKind::kSweep: {
      const auto points = run_sweep(cfg);
      if (cfg.out.empty()) {
        write_sweep_csv(std::cout, points);
      } else {
        print_written(write_outputs(points, cfg));
      }
      if (cfg.strict) {
        for (const auto& pt : points) {
          if (!pt.record.all_converged()) return kNotConverged;
        }
      }
      return kOk;
    }
    case ExperimentKind::kRobustness: {
      const RobustnessRecord rec = run_robustness(cfg);
      print_record(rec.clean, "[p=0] ");
      print_record(rec.perturbed, "[p=" + std::to_string(cfg.p) + "] ");
      if (!cfg.out.empty()) {
        std::filesystem::path stem(cfg.out);
        if (stem.extension() == ".csv" || stem.extension() == ".json") stem.replace_extension();
        RunRecord clean = rec.clean;
        RunRecord perturbed = rec.perturbed;
        clean.config.out = stem.string() + ".clean";
        perturbed.config.out = stem.string() + ".perturbed";
        print_written(write_outputs(clean));
        print_written(write_outputs(perturbed));
      }
      if (cfg.strict && !(rec.clean.all_converged() && rec.perturbed.all_converged())) {
        return kNotConverged;
      }
      return kOk;
    }
    default: break;
  }

  RunRecord rec = cfg.kind == ExperimentKind::kBench ? run_bench(cfg) : run_clones(cfg);
  print_record(rec);
  if (!cfg.out.empty()) print_written(write_outputs(rec));
  if (cfg.strict && !rec.all_converged()) return kNotConverged;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community detection by a rank-m SDP relaxation solved with block-coordinate ascent"};
  app.require_subcommand(1);

  Overrides ov;
  const std::pair<const char*, const char*> commands[] = {
      {"generate", "write an SBM graph with its planted partition"},
      {"solve", "run the solver once"},
      {"spectral", "run the Bethe Hessian baseline"},
      {"clones", "clone ensemble with overlaps and distance histograms"},
      {"sweep", "grid over lambda or m"},
      {"robustness", "clone ensembles at p = 0 and at --p on the same graph seed"},
      {"bench", "wall-clock timings and overlap versus time"},
  };
  std::string sweep_over;
  std::string sweep_values;
  std::size_t replicates = 0;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common_flags(sub, ov);
    if (std::string(name) == "sweep") {
      sub->add_option("--over", sweep_over, "lambda | m")->required();
      sub->add_option("--values", sweep_values, "comma-separated grid values")->required();
      sub->add_option("--replicates", replicates, "graphs per grid point");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    ExperimentConfig cfg;
    if (!ov.config_path.empty()) cfg = load_config(ov.config_path);
    const std::string name = app.get_subcommands().front()->get_name();
    apply_setting(cfg, "kind", name);
    if (name == "solve") {
      cfg.clones = 1;
      cfg.spectral = false;
    }
    if (name == "sweep") {
      apply_setting(cfg, "over", sweep_over);
      apply_setting(cfg, "values", sweep_values);
      if (replicates != 0) cfg.replicates = replicates;
    }
    for (const auto& [key, value] : ov.settings) {
      if (key == "no-spectral") {
        cfg.spectral = false;
      } else {
        apply_setting(cfg, key, value);
      }
    }
    cfg.validate();
    return run(std::move(cfg));
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ParseError& e) {
    std::cerr << "graph file: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  }
}
