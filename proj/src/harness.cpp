#include "dsebo/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <thread>

#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"

namespace dsebo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw ConfigError("unknown config key" +
                        (where.empty() ? std::string() : " in " + where) +
                        ": " + key);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key has wrong type: ") + key);
  }
}

double stat_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stat_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = stat_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::string trace_file_name(int rep) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trace_%03d.csv", rep);
  return buf;
}

json summary_json(const ExperimentConfig& cfg,
                  const std::vector<RunTrace>& traces) {
  std::vector<double> finals, times;
  for (const RunTrace& t : traces) {
    if (!t.rows.empty()) finals.push_back(t.final_best());
    times.push_back(t.wall_clock_ms / 1000.0);
  }
  json runs = json::array();
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const RunTrace& t = traces[r];
    json exp = json::array();
    for (const ExpansionRecord& e : t.expansions)
      exp.push_back({{"dim", e.dim}, {"best", e.best}});
    json run = {{"trace", trace_file_name(static_cast<int>(r))},
                {"seed", t.seed},
                {"final_best", t.rows.empty() ? json(nullptr)
                                              : json(t.final_best())},
                {"wall_clock_s", t.wall_clock_ms / 1000.0},
                {"expansions", exp}};
    if (std::isfinite(t.initial_value)) run["initial_value"] = t.initial_value;
    if (!t.error.empty()) run["error"] = t.error;
    runs.push_back(run);
  }
  json s = {
      {"function", cfg.function},
      {"algorithm", cfg.algorithm},
      {"D", cfg.ambient_dim},
      {"d_f", cfg.effective_dim},
      {"budget", cfg.budget},
      {"repetitions", cfg.repetitions},
      {"config_digest", cfg.digest},
      {"convergence_value",
       {{"mean", stat_mean(finals)}, {"std", stat_std(finals)}}},
      {"best_solution",
       finals.empty()
           ? json(nullptr)
           : json(*std::min_element(finals.begin(), finals.end()))},
      {"time_s", {{"mean", stat_mean(times)}}},
      {"runs", runs},
  };
  const auto base = BaseFunction::make(cfg.function, cfg.effective_dim);
  if (auto fmin = base.known_minimum()) {
    s["f_star"] = *fmin;
    s["regret_reference"] = "base_optimum";
    if (!finals.empty()) s["regret_mean"] = stat_mean(finals) - *fmin;
  } else if (!finals.empty()) {
    // No closed-form optimum (michalewicz): regret against the best value
    // observed across these runs.
    const double ref = *std::min_element(finals.begin(), finals.end());
    s["f_star"] = ref;
    s["regret_reference"] = "best_observed";
    s["regret_mean"] = stat_mean(finals) - ref;
  }
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void ExperimentConfig::validate() const {
  BaseFunction::make(function, effective_dim);  // name + dimension check
  if (ambient_dim <= effective_dim)
    throw ConfigError("config: D must exceed d_f");
  if (!(penalty_constant > 0.0))
    throw ConfigError("config: K must be positive");
  if (budget < 1) throw ConfigError("config: budget must be at least 1");
  if (repetitions < 1)
    throw ConfigError("config: repetitions must be at least 1");
  if (parallel < 1) throw ConfigError("config: parallel must be at least 1");
  acquisition.validate();
  if (algorithm == "dsebo") {
    DseboConfig d = dsebo;
    d.budget = budget;
    d.validate(ambient_dim);
  } else if (algorithm == "fixed_embedding") {
    if (fixed_dim < 1 || fixed_dim > ambient_dim)
      throw ConfigError("config: fixed_embedding d outside [1, D]");
  } else if (algorithm == "random_search") {
    // nothing extra
  } else if (algorithm.rfind("mab:", 0) == 0) {
    strategy_from_name(algorithm.substr(4));
    MabConfig m = mab;
    m.budget = budget;
    m.validate(ambient_dim);
  } else {
    throw ConfigError("config: unknown algorithm: " + algorithm);
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  require_keys(root, "",
               {"function", "D", "d_f", "c", "K", "algorithm", "budget",
                "repetitions", "seed", "parallel", "record_timings", "out",
                "dsebo", "fixed_embedding", "mab", "acquisition"});

  ExperimentConfig cfg;
  cfg.function = get_or<std::string>(root, "function", cfg.function);
  cfg.ambient_dim = get_or<int>(root, "D", cfg.ambient_dim);
  cfg.effective_dim = get_or<int>(root, "d_f", cfg.effective_dim);
  cfg.shift = get_or<double>(root, "c", cfg.shift);
  cfg.penalty_constant = get_or<double>(root, "K", cfg.penalty_constant);
  cfg.algorithm = get_or<std::string>(root, "algorithm", cfg.algorithm);
  cfg.budget = get_or<int>(root, "budget", cfg.budget);
  cfg.repetitions = get_or<int>(root, "repetitions", cfg.repetitions);
  cfg.base_seed = get_or<std::uint64_t>(root, "seed", cfg.base_seed);
  cfg.parallel = get_or<int>(root, "parallel", cfg.parallel);
  cfg.record_timings =
      get_or<bool>(root, "record_timings", cfg.record_timings);
  cfg.out = get_or<std::string>(root, "out", cfg.out);

  if (root.contains("acquisition")) {
    const json& a = root.at("acquisition");
    require_keys(a, "acquisition",
                 {"delta", "n_uniform", "n_local", "local_sigma_scale"});
    cfg.acquisition.delta = get_or<double>(a, "delta", cfg.acquisition.delta);
    cfg.acquisition.n_uniform =
        get_or<int>(a, "n_uniform", cfg.acquisition.n_uniform);
    cfg.acquisition.n_local =
        get_or<int>(a, "n_local", cfg.acquisition.n_local);
    cfg.acquisition.local_sigma_scale = get_or<double>(
        a, "local_sigma_scale", cfg.acquisition.local_sigma_scale);
  }

  cfg.dsebo = DseboConfig::defaults_for(cfg.ambient_dim);
  if (root.contains("dsebo")) {
    const json& d = root.at("dsebo");
    require_keys(d, "dsebo", {"d_l", "d_h", "beta", "alpha_threshold"});
    cfg.dsebo.d_l = get_or<int>(d, "d_l", cfg.dsebo.d_l);
    cfg.dsebo.d_h = get_or<int>(d, "d_h", cfg.dsebo.d_h);
    cfg.dsebo.beta = get_or<double>(d, "beta", cfg.dsebo.beta);
    cfg.dsebo.alpha_threshold =
        get_or<double>(d, "alpha_threshold", cfg.dsebo.alpha_threshold);
  }

  if (root.contains("fixed_embedding")) {
    const json& f = root.at("fixed_embedding");
    require_keys(f, "fixed_embedding", {"d"});
    cfg.fixed_dim = get_or<int>(f, "d", cfg.fixed_dim);
  }

  if (root.contains("mab")) {
    const json& m = root.at("mab");
    require_keys(m, "mab", {"arms", "epsilon", "ucb_e_c", "tau"});
    if (m.contains("arms"))
      cfg.mab.arm_dims = m.at("arms").get<std::vector<int>>();
    cfg.mab.strategy.epsilon =
        get_or<double>(m, "epsilon", cfg.mab.strategy.epsilon);
    cfg.mab.strategy.ucb_e_c =
        get_or<double>(m, "ucb_e_c", cfg.mab.strategy.ucb_e_c);
    cfg.mab.strategy.tau = get_or<double>(m, "tau", cfg.mab.strategy.tau);
  }

  cfg.digest = hex64(fnv1a(root.dump()));
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

RunTrace run_fixed_embedding(const Objective& objective, int ambient_dim,
                             int d, int budget, std::uint64_t seed,
                             const AcquisitionConfig& acq) {
  DseboConfig cfg;
  cfg.d_l = d;
  cfg.d_h = d;
  cfg.budget = budget;
  cfg.seed = seed;
  cfg.acquisition = acq;
  return run_dsebo(objective, ambient_dim, cfg);
}

RunTrace run_random_search(const Objective& objective, int ambient_dim,
                           int budget, std::uint64_t seed,
                           const AmbientBox& box) {
  if (budget < 1) throw ConfigError("random search: budget must be >= 1");
  const auto run_start = std::chrono::steady_clock::now();
  RunTrace trace;
  trace.seed = seed;
  trace.rows.reserve(budget);
  auto rng = substream(seed, Stream::random_search);
  double best = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= budget; ++t) {
    const auto iter_start = std::chrono::steady_clock::now();
    Eigen::VectorXd x(ambient_dim);
    for (int i = 0; i < ambient_dim; ++i) x[i] = uniform(rng, box.lo, box.hi);
    const double y = objective(x);
    if (!std::isfinite(y)) {
      trace.error =
          "non-finite objective value at iteration " + std::to_string(t);
      break;
    }
    best = std::min(best, y);
    trace.rows.push_back(
        {t, ambient_dim, y, best,
         std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - iter_start)
             .count()});
  }
  trace.wall_clock_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - run_start)
                            .count();
  return trace;
}

HighDimFunction make_objective(const ExperimentConfig& cfg) {
  return make_high_dim(BaseFunction::make(cfg.function, cfg.effective_dim),
                       cfg.ambient_dim, cfg.shift, cfg.penalty_constant);
}

RunTrace run_one(const ExperimentConfig& cfg, std::uint64_t seed) {
  const HighDimFunction f = make_objective(cfg);
  const Objective objective = [f](const Eigen::VectorXd& x) { return f(x); };
  RunTrace trace;
  if (cfg.algorithm == "dsebo") {
    DseboConfig d = cfg.dsebo;
    d.budget = cfg.budget;
    d.seed = seed;
    d.acquisition = cfg.acquisition;
    trace = run_dsebo(objective, cfg.ambient_dim, d);
  } else if (cfg.algorithm == "fixed_embedding") {
    trace = run_fixed_embedding(objective, cfg.ambient_dim, cfg.fixed_dim,
                                cfg.budget, seed, cfg.acquisition);
  } else if (cfg.algorithm == "random_search") {
    trace = run_random_search(objective, cfg.ambient_dim, cfg.budget, seed);
  } else if (cfg.algorithm.rfind("mab:", 0) == 0) {
    MabConfig m = cfg.mab;
    m.strategy.kind = strategy_from_name(cfg.algorithm.substr(4));
    m.budget = cfg.budget;
    m.seed = seed;
    m.acquisition = cfg.acquisition;
    trace = run_mab(objective, cfg.ambient_dim, m);
  } else {
    throw ConfigError("unknown algorithm: " + cfg.algorithm);
  }
  trace.config_digest = cfg.digest;
  return trace;
}

void write_trace_csv(const RunTrace& trace, std::ostream& out,
                     bool with_timings) {
  out << "iter,dim,f,best,elapsed_ms\n";
  for (const TraceRow& row : trace.rows) {
    out << row.iter << ',' << row.dim << ',' << format_double(row.value)
        << ',' << format_double(row.best) << ','
        << (with_timings ? format_double(row.elapsed_ms) : "0") << '\n';
  }
}

RunTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "iter,dim,f,best,elapsed_ms")
    throw DataError("trace CSV: bad header");
  RunTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow row;
    std::istringstream ss(line);
    std::string field;
    const auto next = [&]() -> std::string {
      if (!std::getline(ss, field, ',')) throw DataError("trace CSV: short row");
      return field;
    };
    row.iter = std::stoi(next());
    row.dim = std::stoi(next());
    row.value = std::stod(next());
    row.best = std::stod(next());
    row.elapsed_ms = std::stod(next());
    trace.rows.push_back(row);
  }
  return trace;
}

int effective_parallelism(int configured) {
  if (const char* env = std::getenv("DSEBO_PARALLEL")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1, configured);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const fs::path& out_dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  {
    std::ofstream probe(out_dir / ".write_probe");
    if (!probe) throw ConfigError("output directory not writable: " +
                                  out_dir.string());
  }
  fs::remove(out_dir / ".write_probe", ec);

  std::vector<RunTrace> traces(cfg.repetitions);
  std::vector<std::exception_ptr> failures(cfg.repetitions);
  const int workers =
      std::min(effective_parallelism(cfg.parallel), cfg.repetitions);
  std::atomic<int> counter{0};
  const auto work = [&]() {
    while (true) {
      const int r = counter.fetch_add(1);
      if (r >= cfg.repetitions) return;
      try {
        traces[r] = run_one(cfg, cfg.base_seed + static_cast<std::uint64_t>(r));
      } catch (...) {
        failures[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  for (int r = 0; r < cfg.repetitions; ++r) {
    const fs::path file = out_dir / trace_file_name(r);
    std::ofstream out(file, std::ios::binary);  // LF endings everywhere
    write_trace_csv(traces[r], out, cfg.record_timings);
    if (!out) throw ConfigError("failed to write " + file.string());
    result.trace_files.push_back(file);
  }
  result.summary_file = out_dir / "summary.json";
  {
    std::ofstream out(result.summary_file, std::ios::binary);
    out << summary_json(cfg, traces).dump(2) << '\n';
  }

  for (int r = 0; r < cfg.repetitions; ++r)
    if (failures[r]) std::rethrow_exception(failures[r]);
  for (const RunTrace& t : traces)
    if (!t.error.empty()) throw DataError("run aborted: " + t.error);
  return result;
}

std::vector<ExperimentResult> sweep(const ExperimentConfig& cfg,
                                    const std::string& param,
                                    const std::vector<double>& values,
                                    const fs::path& out_dir) {
  if (cfg.algorithm != "dsebo")
    throw ConfigError("sweep: parameter " + param +
                      " applies to the dsebo algorithm only");
  if (param != "beta" && param != "d_h")
    throw ConfigError("sweep: unknown parameter: " + param);
  if (values.empty()) throw ConfigError("sweep: no values given");

  std::vector<ExperimentResult> results;
  json cross = json::array();
  for (double v : values) {
    ExperimentConfig c = cfg;
    std::string name;
    if (param == "beta") {
      c.dsebo.beta = v;
      name = "beta_" + format_double(v);
    } else {
      c.dsebo.d_h = std::min(static_cast<int>(v), cfg.ambient_dim);
      c.dsebo.d_l = std::min(c.dsebo.d_l, c.dsebo.d_h);
      name = "d_h_" + std::to_string(c.dsebo.d_h);
    }
    const fs::path sub = out_dir / name;
    results.push_back(run_experiment(c, sub));

    // Mean per-expansion dimension increment, recomputed from the traces.
    std::vector<double> deltas;
    std::vector<double> finals;
    for (const fs::path& file : results.back().trace_files) {
      std::ifstream in(file);
      const RunTrace t = read_trace_csv(in);
      for (std::size_t i = 1; i < t.rows.size(); ++i)
        if (t.rows[i].dim != t.rows[i - 1].dim)
          deltas.push_back(
              static_cast<double>(t.rows[i].dim - t.rows[i - 1].dim));
      if (!t.rows.empty()) finals.push_back(t.rows.back().best);
    }
    cross.push_back(
        {{"param", param},
         {"value", v},
         {"directory", name},
         {"convergence_value",
          {{"mean", stat_mean(finals)}, {"std", stat_std(finals)}}},
         {"expansions_per_run",
          deltas.empty()
              ? 0.0
              : static_cast<double>(deltas.size()) /
                    static_cast<double>(results.back().trace_files.size())},
         {"mean_delta_d", deltas.empty() ? json(nullptr)
                                         : json(stat_mean(deltas))}});
  }
  std::ofstream out(out_dir / "sweep_summary.json", std::ios::binary);
  out << cross.dump(2) << '\n';
  return results;
}

std::string summarize_directory(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  if (files.empty())
    throw ConfigError("summarize: no trace files in " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<double> finals;
  std::vector<double> times;
  json runs = json::array();
  for (const fs::path& file : files) {
    std::ifstream in(file);
    if (!in) throw ConfigError("summarize: cannot open " + file.string());
    const RunTrace t = read_trace_csv(in);
    double elapsed = 0.0;
    for (const TraceRow& row : t.rows) elapsed += row.elapsed_ms;
    if (!t.rows.empty()) finals.push_back(t.rows.back().best);
    times.push_back(elapsed / 1000.0);
    runs.push_back({{"trace", file.filename().string()},
                    {"rows", t.rows.size()},
                    {"final_best", t.rows.empty() ? json(nullptr)
                                                  : json(t.rows.back().best)}});
  }
  const json s = {
      {"directory", dir.string()},
      {"repetitions", files.size()},
      {"convergence_value",
       {{"mean", stat_mean(finals)}, {"std", stat_std(finals)}}},
      {"best_solution",
       finals.empty()
           ? json(nullptr)
           : json(*std::min_element(finals.begin(), finals.end()))},
      {"time_s", {{"mean", stat_mean(times)}}},
      {"runs", runs},
  };
  return s.dump(2);
}

}  // namespace dsebo
