#include "sdpcd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sdpcd/edge_list_io.hpp"

namespace sdpcd {

namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::ordered_json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& field, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(field, "cannot parse '" + text + "' as a number");
  }
  return value;
}

bool parse_bool(const std::string& field, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(field, "expected a boolean, got '" + text + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& field, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_number<T>(field, item));
  }
  return out;
}

SbmParams sbm_params(const ExperimentConfig& config) {
  if (config.c_in || config.c_out) return SbmParams{config.n, *config.c_in, *config.c_out};
  return params_from_snr(config.n, config.c, *config.lambda);
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

double score(const PreparedGraph& graph, const ExperimentConfig& config,
             std::span<const Label> core_labels) {
  if (!graph.planted) return nan();
  if (!config.extend_trees) return overlap(core_labels, graph.core_planted);
  const auto full = extend_labels_to_trees(core_labels, graph.two_core.forest);
  return overlap(full, graph.planted->labels);
}

SpectralRecord run_spectral(const PreparedGraph& graph, const ExperimentConfig& config) {
  SpectralRecord rec;
  if (graph.working.num_vertices() < 2 || graph.working.num_edges() == 0) return rec;
  const auto start = Clock::now();
  LanczosOptions opts;
  opts.seed = derive_seed(config.seed, StreamTag::kSpectral);
  const SpectralEstimate est = bethe_hessian_estimate(graph.working, opts);
  rec.computed = true;
  rec.r = est.r;
  rec.overlap = score(graph, config, est.labels);
  rec.first_eigenvalue = est.first_eigenvalue;
  rec.second_eigenvalue = est.second_eigenvalue;
  rec.localization = est.localization;
  rec.detected = est.detected;
  rec.converged = est.converged;
  rec.seconds = seconds_since(start);
  return rec;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return nan();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string stem_of(const std::string& out) {
  std::filesystem::path p(out);
  if (p.extension() == ".csv" || p.extension() == ".json") p.replace_extension();
  return p.string();
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << std::setprecision(12);
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw IoError("write to " + path.string() + " failed");
}

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["n"] = c.n;
  j["c"] = c.c;
  j["lambda"] = c.lambda ? Json(*c.lambda) : Json(nullptr);
  j["c_in"] = c.c_in ? Json(*c.c_in) : Json(nullptr);
  j["c_out"] = c.c_out ? Json(*c.c_out) : Json(nullptr);
  j["graph"] = c.graph_path;
  j["p"] = c.p;
  j["m"] = c.rank;
  j["eps"] = c.epsilon;
  j["max_sweeps"] = c.max_sweeps;
  j["field_rule"] = c.field_rule == FieldRule::kExcludeSelf ? "exclude" : "include";
  j["clones"] = c.clones;
  j["seed"] = c.seed;
  j["checkpoints"] = c.checkpoint_sweeps();
  j["over"] = to_string(c.over);
  j["values"] = c.values;
  j["replicates"] = c.replicates;
  j["spectral"] = c.spectral;
  j["distances"] = c.distances;
  j["extend_trees"] = c.extend_trees;
  j["procrustes"] = c.procrustes;
  j["threads"] = c.threads;
  j["out"] = c.out;
  j["format"] = c.format == OutputFormat::kCsv ? "csv" : "json";
  j["strict"] = c.strict;
  return j;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json histogram_json(const DistanceHistogram& h) {
  Json j;
  j["edges"] = h.edges;
  j["counts"] = h.counts;
  j["total"] = h.total;
  return j;
}

Json summary_json(const std::vector<double>& d) {
  Json j;
  if (d.empty()) return j;
  j["median"] = quantile(d, 0.5);
  j["p05"] = quantile(d, 0.05);
  j["p95"] = quantile(d, 0.95);
  j["min"] = *std::min_element(d.begin(), d.end());
  j["max"] = *std::max_element(d.begin(), d.end());
  return j;
}

Json record_json(const RunRecord& r, bool timings) {
  Json j;
  j["config"] = config_json(r.config);
  Json g;
  g["raw_vertices"] = r.graph.raw_vertices;
  g["raw_edges"] = r.graph.raw_edges;
  g["core_vertices"] = r.graph.core_vertices;
  g["core_edges"] = r.graph.core_edges;
  g["clique_edges"] = r.graph.clique_edges;
  g["graph_seed"] = r.graph.graph_seed;
  g["perturbation_seed"] = r.graph.perturbation_seed;
  j["graph"] = g;

  Json clones = Json::array();
  for (const auto& c : r.clones) {
    Json cj;
    cj["index"] = c.index;
    cj["seed"] = c.seed;
    cj["t_conv"] = c.t_conv;
    cj["converged"] = c.converged;
    cj["objective"] = c.objective;
    cj["mag_norm"] = c.magnetization_norm;
    cj["overlap"] = number_or_null(c.overlap);
    Json cps = Json::array();
    for (const auto& cp : c.checkpoints) {
      Json x;
      x["sweep"] = cp.sweep;
      x["overlap"] = number_or_null(cp.overlap);
      if (timings) x["seconds"] = cp.seconds;
      cps.push_back(x);
    }
    cj["checkpoints"] = cps;
    if (timings) {
      cj["solve_seconds"] = c.solve_seconds;
      cj["projection_seconds"] = c.projection_seconds;
    }
    clones.push_back(cj);
  }
  j["clones"] = clones;
  j["mean_overlap"] = number_or_null(r.mean_overlap());
  j["sd_overlap"] = number_or_null(r.overlap_stddev());

  if (r.spectral.computed) {
    Json s;
    s["r"] = r.spectral.r;
    s["overlap"] = number_or_null(r.spectral.overlap);
    s["first_eigenvalue"] = r.spectral.first_eigenvalue;
    s["second_eigenvalue"] = r.spectral.second_eigenvalue;
    s["localization"] = r.spectral.localization;
    s["detected"] = r.spectral.detected;
    s["converged"] = r.spectral.converged;
    j["spectral"] = s;
  }
  if (r.distances.computed) {
    Json d;
    d["alignment"] = r.config.procrustes ? "procrustes" : "principal_axis";
    d["pairs"] = r.distances.raw.size();
    d["flagged_pairs"] = r.distances.flagged_pairs;
    d["raw"] = summary_json(r.distances.raw);
    d["aligned"] = summary_json(r.distances.aligned);
    d["raw_histogram"] = histogram_json(r.distances.raw_histogram);
    d["aligned_histogram"] = histogram_json(r.distances.aligned_histogram);
    j["distances"] = d;
  }
  if (timings) {
    Json t;
    t["generate"] = r.graph.generate_seconds;
    t["prune"] = r.graph.prune_seconds;
    t["perturb"] = r.graph.perturb_seconds;
    t["spectral"] = r.spectral.seconds;
    t["solve"] = r.solve_seconds;
    t["distances"] = r.distances.seconds;
    j["timings"] = t;
  }
  return j;
}

struct SweepRow {
  double value;
  std::vector<double> overlaps;
  std::vector<double> t_conv;
  std::size_t converged = 0;
  std::vector<double> spectral;
  std::vector<double> core_vertices;
};

std::vector<SweepRow> aggregate(const std::vector<SweepPoint>& points) {
  std::vector<SweepRow> rows;
  for (const auto& pt : points) {
    if (rows.size() <= pt.grid_index) rows.resize(pt.grid_index + 1, SweepRow{pt.value, {}, {}, 0, {}, {}});
    SweepRow& row = rows[pt.grid_index];
    row.value = pt.value;
    for (const auto& c : pt.record.clones) {
      row.overlaps.push_back(c.overlap);
      row.t_conv.push_back(static_cast<double>(c.t_conv));
      row.converged += c.converged ? 1 : 0;
    }
    if (pt.record.spectral.computed) row.spectral.push_back(pt.record.spectral.overlap);
    row.core_vertices.push_back(static_cast<double>(pt.record.graph.core_vertices));
  }
  return rows;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kGenerate: return "generate";
    case ExperimentKind::kSolve: return "solve";
    case ExperimentKind::kSpectral: return "spectral";
    case ExperimentKind::kClones: return "clones";
    case ExperimentKind::kSweep: return "sweep";
    case ExperimentKind::kRobustness: return "robustness";
    case ExperimentKind::kBench: return "bench";
  }
  return "?";
}

std::string to_string(SweepAxis axis) { return axis == SweepAxis::kLambda ? "lambda" : "m"; }

void ExperimentConfig::validate() const {
  const bool uses_file = !graph_path.empty();
  if (uses_file && kind == ExperimentKind::kGenerate) {
    throw ConfigError("graph", "generate writes a graph and cannot read one");
  }
  if (uses_file && kind == ExperimentKind::kSweep && over == SweepAxis::kLambda) {
    throw ConfigError("graph", "a lambda sweep generates its graphs");
  }
  if (!uses_file) {
    if (n < 2 || n % 2 != 0) throw ConfigError("n", "must be even and at least 2");
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("c", "must be positive");
    if (c_in.has_value() != c_out.has_value()) {
      throw ConfigError(c_in ? "cout" : "cin", "cin and cout must be given together");
    }
    if (c_in && lambda) throw ConfigError("lambda", "give either lambda or cin/cout, not both");
    if (!c_in && !lambda) throw ConfigError("lambda", "missing (or give cin and cout)");
    if (c_in) {
      if (!(*c_in >= 0.0)) throw ConfigError("cin", "must be >= 0");
      if (!(*c_out >= 0.0)) throw ConfigError("cout", "must be >= 0");
      if (*c_in > static_cast<double>(n)) throw ConfigError("cin", "cin/n exceeds 1");
      if (*c_out > static_cast<double>(n)) throw ConfigError("cout", "cout/n exceeds 1");
    } else {
      const auto check_lambda = [&](double lam, const char* field) {
        if (!(lam >= 0.0)) throw ConfigError(field, "lambda must be >= 0");
        try {
          const SbmParams params = params_from_snr(n, c, lam);
          if (params.c_in > static_cast<double>(n)) throw ConfigError(field, "c_in/n exceeds 1");
        } catch (const ConfigError&) {
          throw;
        } catch (const InvalidParameter& e) {
          throw ConfigError(field, e.what());
        }
      };
      if (!(kind == ExperimentKind::kSweep && over == SweepAxis::kLambda)) {
        check_lambda(*lambda, "lambda");
      } else {
        for (double v : values) check_lambda(v, "values");
      }
    }
  }
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p", "must lie in [0, 1]");
  if (rank == 0) throw ConfigError("m", "must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("eps", "must be > 0");
  if (max_sweeps == 0) throw ConfigError("max-sweeps", "must be >= 1");
  if (clones == 0) throw ConfigError("clones", "must be >= 1");
  if (replicates == 0) throw ConfigError("replicates", "must be >= 1");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0) throw ConfigError("checkpoints", "sweeps are 1-based");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw ConfigError("checkpoints", "must be strictly increasing");
    }
  }
  if (kind == ExperimentKind::kSweep && over == SweepAxis::kRank) {
    for (double v : values) {
      if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("values", "ranks must be integers >= 1");
    }
  }
  if (kind == ExperimentKind::kGenerate && out.empty()) {
    throw ConfigError("out", "generate needs an output path");
  }
}

std::vector<std::size_t> ExperimentConfig::checkpoint_sweeps() const {
  std::vector<std::size_t> out;
  if (checkpoints.empty()) {
    for (std::size_t s = 1; s <= max_sweeps; s *= 2) out.push_back(s);
  } else {
    for (std::size_t s : checkpoints) {
      if (s <= max_sweeps) out.push_back(s);
    }
  }
  return out;
}

std::size_t ExperimentConfig::worker_count() const {
  if (threads != 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void apply_setting(ExperimentConfig& config, const std::string& raw_key, const std::string& raw) {
  const std::string key = normalize_key(trim(raw_key));
  const std::string value = trim(raw);
  if (key == "kind") {
    static const std::pair<const char*, ExperimentKind> kinds[] = {
        {"generate", ExperimentKind::kGenerate}, {"solve", ExperimentKind::kSolve},
        {"spectral", ExperimentKind::kSpectral}, {"clones", ExperimentKind::kClones},
        {"sweep", ExperimentKind::kSweep},       {"robustness", ExperimentKind::kRobustness},
        {"bench", ExperimentKind::kBench}};
    for (const auto& [name, kind] : kinds) {
      if (value == name) {
        config.kind = kind;
        return;
      }
    }
    throw ConfigError(key, "unknown experiment kind '" + value + "'");
  } else if (key == "n") {
    config.n = parse_number<std::size_t>(key, value);
  } else if (key == "c") {
    config.c = parse_number<double>(key, value);
  } else if (key == "lambda") {
    config.lambda = parse_number<double>(key, value);
    config.c_in.reset();
    config.c_out.reset();
  } else if (key == "cin" || key == "c-in") {
    config.c_in = parse_number<double>("cin", value);
    config.lambda.reset();
  } else if (key == "cout" || key == "c-out") {
    config.c_out = parse_number<double>("cout", value);
    config.lambda.reset();
  } else if (key == "graph") {
    config.graph_path = value;
  } else if (key == "p") {
    config.p = parse_number<double>(key, value);
  } else if (key == "m" || key == "rank") {
    config.rank = parse_number<std::size_t>("m", value);
  } else if (key == "eps" || key == "epsilon") {
    config.epsilon = parse_number<double>("eps", value);
  } else if (key == "max-sweeps") {
    config.max_sweeps = parse_number<std::size_t>(key, value);
  } else if (key == "field-rule") {
    if (value == "exclude") {
      config.field_rule = FieldRule::kExcludeSelf;
    } else if (value == "include") {
      config.field_rule = FieldRule::kIncludeSelf;
    } else {
      throw ConfigError(key, "expected 'exclude' or 'include'");
    }
  } else if (key == "clones") {
    config.clones = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    config.seed = parse_number<Seed>(key, value);
  } else if (key == "checkpoints") {
    config.checkpoints = parse_list<std::size_t>(key, value);
  } else if (key == "over") {
    if (value == "lambda") {
      config.over = SweepAxis::kLambda;
    } else if (value == "m" || value == "rank") {
      config.over = SweepAxis::kRank;
    } else {
      throw ConfigError(key, "expected 'lambda' or 'm'");
    }
  } else if (key == "values") {
    config.values = parse_list<double>(key, value);
  } else if (key == "replicates") {
    config.replicates = parse_number<std::size_t>(key, value);
  } else if (key == "spectral") {
    config.spectral = parse_bool(key, value);
  } else if (key == "distances") {
    config.distances = parse_bool(key, value);
  } else if (key == "extend-trees") {
    config.extend_trees = parse_bool(key, value);
  } else if (key == "procrustes") {
    config.procrustes = parse_bool(key, value);
  } else if (key == "threads") {
    config.threads = parse_number<std::size_t>(key, value);
  } else if (key == "out") {
    config.out = value;
  } else if (key == "format") {
    if (value == "csv") {
      config.format = OutputFormat::kCsv;
    } else if (value == "json") {
      config.format = OutputFormat::kJson;
    } else {
      throw ConfigError(key, "expected 'csv' or 'json'");
    }
  } else if (key == "strict") {
    config.strict = parse_bool(key, value);
  } else {
    throw ConfigError(key, "unknown setting");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file " + path.string());
  return parse_config(f, std::move(base));
}

PreparedGraph prepare_graph(const ExperimentConfig& config) {
  PreparedGraph out;
  auto start = Clock::now();
  if (!config.graph_path.empty()) {
    EdgeListFile file = load_edge_list(config.graph_path);
    out.raw = std::move(file.graph);
    out.planted = std::move(file.partition);
  } else {
    out.graph_seed = derive_seed(config.seed, StreamTag::kGraph);
    SbmSample sample = sbm_generate(sbm_params(config), out.graph_seed);
    out.raw = std::move(sample.graph);
    out.planted = std::move(sample.partition);
  }
  out.generate_seconds = seconds_since(start);

  start = Clock::now();
  out.two_core = two_core(out.raw);
  if (out.planted) out.core_planted = restrict_to_core(out.planted->labels, out.two_core.forest);
  out.prune_seconds = seconds_since(start);

  start = Clock::now();
  if (config.p > 0.0) {
    out.perturbation_seed = derive_seed(config.seed, StreamTag::kPerturbation);
    out.working = add_neighborhood_cliques(out.two_core.core, config.p, out.perturbation_seed);
  } else {
    out.working = out.two_core.core;
  }
  out.clique_edges = out.working.num_edges() - out.two_core.core.num_edges();
  out.perturb_seconds = seconds_since(start);
  return out;
}

double RunRecord::mean_overlap() const {
  std::vector<double> q;
  for (const auto& c : clones) q.push_back(c.overlap);
  return mean_of(q);
}

double RunRecord::overlap_stddev() const {
  std::vector<double> q;
  for (const auto& c : clones) q.push_back(c.overlap);
  return stddev_of(q);
}

bool RunRecord::all_converged() const {
  return std::all_of(clones.begin(), clones.end(), [](const CloneRecord& c) { return c.converged; });
}

RunRecord run_on_graph(const PreparedGraph& graph, const ExperimentConfig& config,
                       Seed clone_master) {
  RunRecord rec;
  rec.config = config;
  rec.graph.raw_vertices = graph.raw.num_vertices();
  rec.graph.raw_edges = graph.raw.num_edges();
  rec.graph.core_vertices = graph.two_core.core.num_vertices();
  rec.graph.core_edges = graph.working.num_edges();
  rec.graph.clique_edges = graph.clique_edges;
  rec.graph.graph_seed = graph.graph_seed;
  rec.graph.perturbation_seed = graph.perturbation_seed;
  rec.graph.generate_seconds = graph.generate_seconds;
  rec.graph.prune_seconds = graph.prune_seconds;
  rec.graph.perturb_seconds = graph.perturb_seconds;

  if (config.spectral) rec.spectral = run_spectral(graph, config);
  if (graph.working.num_vertices() == 0) return rec;

  const std::vector<std::size_t> checkpoints = config.checkpoint_sweeps();
  const std::size_t clones = config.kind == ExperimentKind::kSpectral ? 0 : config.clones;
  const bool keep_configs = config.distances && clones >= 2;
  std::vector<SpinConfig> finals(keep_configs ? clones : 0);
  rec.clones.resize(clones);

  const auto start = Clock::now();
  parallel_for(clones, config.worker_count(), [&](std::size_t i) {
    CloneRecord& c = rec.clones[i];
    c.index = i;
    c.seed = derive_seed(clone_master, StreamTag::kClone, i);
    SolverOptions opts;
    opts.rank = config.rank;
    opts.epsilon = config.epsilon;
    opts.max_sweeps = config.max_sweeps;
    opts.seed = c.seed;
    opts.field_rule = config.field_rule;
    opts.record_objective = false;

    std::size_t next = 0;
    double solver_time = 0.0;
    auto observer = [&](const SweepStats& stats, const SpinConfig& spins) {
      solver_time += stats.seconds;
      if (next < checkpoints.size() && checkpoints[next] == stats.sweep) {
        const auto t0 = Clock::now();
        const double q = score(graph, config, project_to_labels(spins));
        c.projection_seconds += seconds_since(t0);
        c.checkpoints.push_back(Checkpoint{stats.sweep, q, solver_time});
        ++next;
      }
    };
    SolverResult res = run_solver(graph.working, opts, observer);
    c.t_conv = res.t_conv;
    c.converged = res.converged;
    c.objective = objective(res.config, graph.working);
    c.magnetization_norm = res.final_magnetization_norm;
    const auto t0 = Clock::now();
    c.overlap = score(graph, config, project_to_labels(res.config));
    c.projection_seconds += seconds_since(t0);
    c.solve_seconds = solver_time;
    if (keep_configs) finals[i] = std::move(res.config);
  });
  rec.solve_seconds = seconds_since(start);

  if (keep_configs) {
    const auto t0 = Clock::now();
    DistanceRecord& d = rec.distances;
    d.computed = true;
    d.raw = raw_pairwise_distances(finals).distances;
    const PairwiseDistances aligned = aligned_pairwise_distances(
        finals, config.procrustes ? AlignmentMode::kProcrustes : AlignmentMode::kPrincipalAxis);
    d.aligned = aligned.distances;
    d.flagged_pairs = static_cast<std::size_t>(
        std::count(aligned.flagged.begin(), aligned.flagged.end(), true));
    d.raw_histogram = make_histogram(d.raw, false);
    d.aligned_histogram = make_histogram(d.aligned, true);
    d.seconds = seconds_since(t0);
  }
  return rec;
}

RunRecord run_clones(const ExperimentConfig& config) {
  config.validate();
  const PreparedGraph graph = prepare_graph(config);
  return run_on_graph(graph, config, config.seed);
}

RobustnessRecord run_robustness(const ExperimentConfig& config) {
  config.validate();
  ExperimentConfig clean = config;
  clean.p = 0.0;
  RobustnessRecord out;
  out.clean = run_clones(clean);
  out.perturbed = run_clones(config);
  return out;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < config.values.size(); ++i) {
    for (std::size_t r = 0; r < config.replicates; ++r) {
      SweepPoint pt;
      pt.grid_index = i;
      pt.value = config.values[i];
      pt.replicate = r;
      points.push_back(std::move(pt));
    }
  }
  if (points.empty()) return points;

  // Run grid points concurrently when there are enough of them, otherwise
  // parallelize the clones inside each point.
  const std::size_t workers = config.worker_count();
  const bool outer = points.size() >= workers;
  ExperimentConfig child_base = config;
  child_base.kind = ExperimentKind::kClones;
  child_base.threads = outer ? 1 : workers;

  std::vector<PreparedGraph> shared;
  if (config.over == SweepAxis::kRank) {
    shared.resize(config.replicates);
    parallel_for(config.replicates, workers, [&](std::size_t r) {
      ExperimentConfig g = child_base;
      g.seed = derive_seed(config.seed, StreamTag::kReplicate, r);
      shared[r] = prepare_graph(g);
    });
  }

  std::vector<SpectralRecord> shared_spectral(shared.size());
  if (config.spectral && config.over == SweepAxis::kRank) {
    parallel_for(shared.size(), workers, [&](std::size_t r) {
      ExperimentConfig g = child_base;
      g.seed = derive_seed(config.seed, StreamTag::kReplicate, r);
      shared_spectral[r] = run_spectral(shared[r], g);
    });
  }

  parallel_for(points.size(), outer ? workers : 1, [&](std::size_t k) {
    SweepPoint& pt = points[k];
    ExperimentConfig child = child_base;
    const Seed point_seed =
        derive_seed(derive_seed(config.seed, StreamTag::kGridPoint, pt.grid_index),
                    StreamTag::kReplicate, pt.replicate);
    if (config.over == SweepAxis::kLambda) {
      child.lambda = pt.value;
      child.c_in.reset();
      child.c_out.reset();
      child.seed = point_seed;
      pt.record = run_clones(child);
    } else {
      child.rank = static_cast<std::size_t>(pt.value);
      child.seed = derive_seed(config.seed, StreamTag::kReplicate, pt.replicate);
      child.spectral = false;
      pt.record = run_on_graph(shared[pt.replicate], child, point_seed);
      pt.record.spectral = shared_spectral[pt.replicate];
    }
  });
  return points;
}

RunRecord run_bench(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.distances = false;
  c.spectral = false;
  return run_clones(c);
}

void write_clone_csv(std::ostream& out, const RunRecord& record, bool include_timings) {
  out << "clone,seed,t_conv,converged,objective,mag_norm,overlap";
  if (include_timings) out << ",solve_seconds,projection_seconds";
  out << '\n';
  for (const auto& c : record.clones) {
    out << c.index << ',' << c.seed << ',' << c.t_conv << ',' << (c.converged ? 1 : 0) << ','
        << c.objective << ',' << c.magnetization_norm << ',' << c.overlap;
    if (include_timings) out << ',' << c.solve_seconds << ',' << c.projection_seconds;
    out << '\n';
  }
}

void write_checkpoint_csv(std::ostream& out, const RunRecord& record, bool include_timings) {
  out << "clone,sweep,overlap";
  if (include_timings) out << ",seconds";
  out << '\n';
  for (const auto& c : record.clones) {
    for (const auto& cp : c.checkpoints) {
      out << c.index << ',' << cp.sweep << ',' << cp.overlap;
      if (include_timings) out << ',' << cp.seconds;
      out << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "value,replicates,clones,mean_overlap,sd_overlap,mean_t_conv,converged_fraction,"
         "spectral_overlap,mean_core_vertices\n";
  for (const SweepRow& row : aggregate(points)) {
    const std::size_t total = row.overlaps.size();
    out << row.value << ',' << row.core_vertices.size() << ',' << total << ','
        << mean_of(row.overlaps) << ',' << stddev_of(row.overlaps) << ',' << mean_of(row.t_conv)
        << ',' << (total ? static_cast<double>(row.converged) / static_cast<double>(total) : 0.0)
        << ',' << mean_of(row.spectral) << ',' << mean_of(row.core_vertices) << '\n';
  }
}

std::string to_json(const RunRecord& record, bool include_timings) {
  return record_json(record, include_timings).dump(2);
}

std::string to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

std::string to_json(const std::vector<SweepPoint>& points, const ExperimentConfig& config,
                    bool include_timings) {
  Json j;
  j["config"] = config_json(config);
  Json arr = Json::array();
  for (const auto& pt : points) {
    Json x;
    x["grid_index"] = pt.grid_index;
    x["value"] = pt.value;
    x["replicate"] = pt.replicate;
    x["record"] = record_json(pt.record, include_timings);
    arr.push_back(x);
  }
  j["points"] = arr;
  return j.dump(2);
}

std::vector<std::filesystem::path> write_outputs(const RunRecord& record) {
  const ExperimentConfig& cfg = record.config;
  if (cfg.out.empty()) throw ConfigError("out", "no output path given");
  const std::string stem = stem_of(cfg.out);
  const bool timings = cfg.kind == ExperimentKind::kBench;
  std::vector<std::filesystem::path> written;

  const std::filesystem::path json_path = stem + ".json";
  if (cfg.format == OutputFormat::kCsv) {
    const std::filesystem::path csv_path = stem + ".csv";
    auto f = open_output(csv_path);
    write_clone_csv(f, record, timings);
    finish(f, csv_path);
    written.push_back(csv_path);

    const std::filesystem::path cp_path = stem + ".checkpoints.csv";
    auto g = open_output(cp_path);
    write_checkpoint_csv(g, record, timings);
    finish(g, cp_path);
    written.push_back(cp_path);

    if (record.distances.computed) {
      const std::filesystem::path hist_path = stem + ".hist.csv";
      auto h = open_output(hist_path);
      write_histogram_csv(h, record.distances.raw_histogram, true);
      write_histogram_csv(h, record.distances.aligned_histogram, false);
      finish(h, hist_path);
      written.push_back(hist_path);
    }
  }
  auto j = open_output(json_path);
  j << to_json(record, true) << '\n';
  finish(j, json_path);
  written.push_back(json_path);
  return written;
}

std::vector<std::filesystem::path> write_outputs(const std::vector<SweepPoint>& points,
                                                 const ExperimentConfig& config) {
  if (config.out.empty()) throw ConfigError("out", "no output path given");
  const std::string stem = stem_of(config.out);
  std::vector<std::filesystem::path> written;
  if (config.format == OutputFormat::kCsv) {
    const std::filesystem::path csv_path = stem + ".csv";
    auto f = open_output(csv_path);
    write_sweep_csv(f, points);
    finish(f, csv_path);
    written.push_back(csv_path);
  }
  const std::filesystem::path json_path = stem + ".json";
  auto j = open_output(json_path);
  j << to_json(points, config, true) << '\n';
  finish(j, json_path);
  written.push_back(json_path);
  return written;
}

}  // namespace sdpcd
