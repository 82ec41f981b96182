#include "lrmc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "lrmc/csv.hpp"
#include "lrmc/rng.hpp"

namespace lrmc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::string body = value;
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') throw std::invalid_argument("unterminated list");
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

long parse_long(const std::string& s) {
  std::size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

double parse_real(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false: " + s);
}

std::string variant_name(Variant v) {
  return v == Variant::Vanilla ? "vanilla" : "projected";
}

std::string default_output_dir() {
  const char* env = std::getenv("LRMC_OUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("out");
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

long ExperimentConfig::cell_count() const {
  return static_cast<long>(n1.size() * n2.size() * r.size() * kappa.size() * p.size());
}

std::vector<Variant> ExperimentConfig::variants() const {
  if (variant == "vanilla") return {Variant::Vanilla};
  if (variant == "projected") return {Variant::Projected};
  return {Variant::Vanilla, Variant::Projected};
}

long ExperimentConfig::planned_runs() const {
  return cell_count() * static_cast<long>(seeds.size()) *
         static_cast<long>(variants().size());
}

std::vector<std::string> ExperimentConfig::validation_errors() const {
  std::vector<std::string> errors;
  auto require = [&errors](bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  };

  require(!n1.empty(), "n1: must be nonempty");
  require(!n2.empty(), "n2: must be nonempty");
  require(!r.empty(), "r: must be nonempty");
  require(!kappa.empty(), "kappa: must be nonempty");
  require(!p.empty(), "p: must be nonempty");
  require(!seeds.empty(), "seeds: must be nonempty");
  for (Index v : n1) require(v >= 1, "n1: entries must be >= 1");
  for (Index v : n2) require(v >= 1, "n2: entries must be >= 1");
  for (Index v : r) require(v >= 1, "r: entries must be >= 1");
  for (double v : kappa) require(v >= 1.0, "kappa: entries must be >= 1 (got " + format_double(v) + ")");
  for (double v : p) require(v > 0.0 && v <= 1.0, "p: must be in (0,1] (got " + format_double(v) + ")");
  if (!n1.empty() && !n2.empty() && !r.empty()) {
    const Index min_n = std::min(*std::min_element(n1.begin(), n1.end()),
                                 *std::min_element(n2.begin(), n2.end()));
    const Index max_r = *std::max_element(r.begin(), r.end());
    require(max_r <= min_n, "r: largest rank " + std::to_string(max_r) +
                                " exceeds smallest dimension " + std::to_string(min_n));
  }
  require(variant == "vanilla" || variant == "projected" || variant == "both",
          "variant: must be vanilla, projected or both (got " + variant + ")");
  require(success_tol > 0.0, "success_tol: must be positive");
  require(loo_cap >= 0, "loo_cap: must be >= 0");
  require(threads >= 1, "threads: must be >= 1");
  require(!output_dir.empty(), "output_dir: must be nonempty");
  require(solver.eta >= 0.0, "eta: must be positive or auto");
  require(solver.max_iters >= 0, "max_iters: must be >= 0");
  require(solver.stop_tol >= 0.0, "stop_tol: must be >= 0");
  require(solver.record_every >= 1, "record_every: must be >= 1");
  require(solver.projection_slack >= 0.0, "projection_slack: must be >= 0");
  return errors;
}

void ExperimentConfig::validate() const {
  const std::vector<std::string> errors = validation_errors();
  if (!errors.empty()) {
    std::string message = "config validation failed: ";
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (i > 0) message += "; ";
      message += errors[i];
    }
    throw std::invalid_argument(message);
  }
}

namespace {

template <typename T>
std::string join_list(const std::vector<T>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out + "]";
}

}  // namespace

std::string ExperimentConfig::serialize(bool include_runtime_keys) const {
  std::string out;
  out += "n1 = " + join_list(n1) + "\n";
  out += "n2 = " + join_list(n2) + "\n";
  out += "r = " + join_list(r) + "\n";
  out += "kappa = " + join_list(kappa) + "\n";
  out += "p = " + join_list(p) + "\n";
  out += "seeds = " + join_list(seeds) + "\n";
  out += "variant = " + variant + "\n";
  out += "eta = " + (solver.eta == 0.0 ? std::string("auto") : format_double(solver.eta)) + "\n";
  out += "max_iters = " + std::to_string(solver.max_iters) + "\n";
  out += "stop_tol = " + format_double(solver.stop_tol) + "\n";
  out += "record_every = " + std::to_string(solver.record_every) + "\n";
  out += "success_tol = " + format_double(success_tol) + "\n";
  out += "plateau_stop = " + std::string(solver.plateau_stop ? "true" : "false") + "\n";
  out += "use_oracle_spectrum = " + std::string(solver.use_oracle_spectrum ? "true" : "false") + "\n";
  out += "projection_slack = " + format_double(solver.projection_slack) + "\n";
  out += "loo_enabled = " + std::string(loo_enabled ? "true" : "false") + "\n";
  out += "loo_cap = " + std::to_string(loo_cap) + "\n";
  out += "hessian_check = " + std::string(hessian_check ? "true" : "false") + "\n";
  if (include_runtime_keys) {
    out += "output_dir = " + output_dir + "\n";
    out += "threads = " + std::to_string(threads) + "\n";
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.output_dir = default_output_dir();

  std::vector<std::string> errors;
  std::map<std::string, std::string> entries;
  std::stringstream lines(text);
  std::string line;
  long line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty key or value");
      continue;
    }
    if (entries.count(key)) {
      errors.push_back(key + ": duplicate key");
      continue;
    }
    entries[key] = value;
  }

  auto take = [&entries](const std::string& key) -> const std::string* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto parse_index_list = [&errors](const std::string& key, const std::string& value,
                                    std::vector<Index>& out) {
    try {
      std::vector<Index> parsed;
      for (const auto& item : split_list(value)) parsed.push_back(parse_long(item));
      out = std::move(parsed);
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
    }
  };
  auto parse_real_list = [&errors](const std::string& key, const std::string& value,
                                   std::vector<double>& out) {
    try {
      std::vector<double> parsed;
      for (const auto& item : split_list(value)) parsed.push_back(parse_real(item));
      out = std::move(parsed);
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
    }
  };

  if (const auto* v = take("n1")) parse_index_list("n1", *v, cfg.n1);
  if (const auto* v = take("n2")) parse_index_list("n2", *v, cfg.n2);
  if (const auto* v = take("r")) parse_index_list("r", *v, cfg.r);
  if (const auto* v = take("kappa")) parse_real_list("kappa", *v, cfg.kappa);
  if (const auto* v = take("p")) parse_real_list("p", *v, cfg.p);
  if (const auto* v = take("seeds")) {
    try {
      std::vector<std::uint64_t> parsed;
      for (const auto& item : split_list(*v)) parsed.push_back(parse_u64(item));
      cfg.seeds = std::move(parsed);
    } catch (const std::exception& e) {
      errors.push_back(std::string("seeds: ") + e.what());
    }
  }
  if (const auto* v = take("variant")) cfg.variant = *v;
  if (const auto* v = take("eta")) {
    if (*v == "auto") {
      cfg.solver.eta = 0.0;
    } else {
      try {
        cfg.solver.eta = parse_real(*v);
        if (cfg.solver.eta <= 0.0) errors.push_back("eta: must be positive or auto");
      } catch (const std::exception& e) {
        errors.push_back(std::string("eta: ") + e.what());
      }
    }
  }

  auto parse_scalar = [&errors](const std::string& key, const std::string& value, auto parser,
                                auto& out) {
    try {
      out = parser(value);
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
    }
  };
  if (const auto* v = take("max_iters")) parse_scalar("max_iters", *v, parse_long, cfg.solver.max_iters);
  if (const auto* v = take("stop_tol")) parse_scalar("stop_tol", *v, parse_real, cfg.solver.stop_tol);
  if (const auto* v = take("record_every")) parse_scalar("record_every", *v, parse_long, cfg.solver.record_every);
  if (const auto* v = take("success_tol")) parse_scalar("success_tol", *v, parse_real, cfg.success_tol);
  if (const auto* v = take("plateau_stop")) parse_scalar("plateau_stop", *v, parse_bool, cfg.solver.plateau_stop);
  if (const auto* v = take("use_oracle_spectrum")) parse_scalar("use_oracle_spectrum", *v, parse_bool, cfg.solver.use_oracle_spectrum);
  if (const auto* v = take("projection_slack")) parse_scalar("projection_slack", *v, parse_real, cfg.solver.projection_slack);
  if (const auto* v = take("loo_enabled")) parse_scalar("loo_enabled", *v, parse_bool, cfg.loo_enabled);
  if (const auto* v = take("loo_cap")) parse_scalar("loo_cap", *v, parse_long, cfg.loo_cap);
  if (const auto* v = take("hessian_check")) parse_scalar("hessian_check", *v, parse_bool, cfg.hessian_check);
  if (const auto* v = take("output_dir")) cfg.output_dir = *v;
  if (const auto* v = take("threads")) {
    long t = 0;
    parse_scalar("threads", *v, parse_long, t);
    cfg.threads = static_cast<int>(t);
  }

  static const std::vector<std::string> known = {
      "n1", "n2", "r", "kappa", "p", "seeds", "variant", "eta", "max_iters",
      "stop_tol", "record_every", "success_tol", "plateau_stop", "use_oracle_spectrum",
      "projection_slack", "loo_enabled", "loo_cap", "hessian_check", "output_dir", "threads"};
  for (const auto& [key, value] : entries) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      errors.push_back(key + ": unknown key");
    }
  }

  // Range checks run even when some keys failed to parse, so one pass
  // reports every offending key.
  for (const std::string& issue : cfg.validation_errors()) errors.push_back(issue);

  if (!errors.empty()) {
    std::string message = "config validation failed: ";
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (i > 0) message += "; ";
      message += errors[i];
    }
    throw std::invalid_argument(message);
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::vector<Cell> expand_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  cells.reserve(cfg.cell_count());
  long index = 0;
  for (Index a : cfg.n1)
    for (Index b : cfg.n2)
      for (Index rr : cfg.r)
        for (double k : cfg.kappa)
          for (double pp : cfg.p) {
            cells.push_back(Cell{index++, a, b, rr, k, pp});
          }
  return cells;
}

std::uint64_t run_stream(std::uint64_t seed, long cell_index, std::uint64_t purpose) {
  const std::uint64_t base = derive_stream(seed, static_cast<std::uint64_t>(cell_index));
  return derive_stream(base, purpose);
}

namespace {

SeedOutcome execute_run(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed,
                        Variant variant) {
  SeedOutcome outcome;
  outcome.seed = seed;
  try {
    const GroundTruth gt = generate_ground_truth(cell.n1, cell.n2, cell.r, cell.kappa,
                                                 run_stream(seed, cell.index, 1));
    const SamplingMask mask =
        sample_mask(cell.n1, cell.n2, cell.p, run_stream(seed, cell.index, 2));
    SolverConfig sc = cfg.solver;
    sc.recovery_stop_tol = cfg.success_tol;

    const bool with_loo =
        cfg.loo_enabled && variant == Variant::Vanilla && cell.n1 + cell.n2 <= cfg.loo_cap;
    RunResult result;
    if (with_loo) {
      LooRun loo = run_with_loo(gt, mask, sc);
      result = std::move(loo.main);
      outcome.loo = std::move(loo.diagnostics);
    } else {
      result = run(gt, mask, sc, variant);
    }

    outcome.final_err = result.final_recovery_err;
    outcome.success = result.final_recovery_err <= cfg.success_tol;
    outcome.iters_to_threshold = result.iters_to_recovery;
    if (outcome.success && outcome.iters_to_threshold < 0) {
      outcome.iters_to_threshold = result.iterations;
    }
    outcome.iterations = result.iterations;
    outcome.records = std::move(result.records);
    if (result.diverged) {
      outcome.failed = true;
      outcome.note = "diverged";
    }
  } catch (const std::exception& e) {
    outcome.failed = true;
    outcome.success = false;
    outcome.final_err = std::numeric_limits<double>::infinity();
    outcome.note = e.what();
  }
  return outcome;
}

}  // namespace

std::vector<SweepResult> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<Cell> cells = expand_cells(cfg);
  const std::vector<Variant> variants = cfg.variants();

  struct Task {
    std::size_t cell = 0, variant = 0, seed = 0;
  };
  std::vector<Task> tasks;
  tasks.reserve(cells.size() * variants.size() * cfg.seeds.size());
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::size_t v = 0; v < variants.size(); ++v)
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) tasks.push_back(Task{c, v, s});

  std::vector<SeedOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      outcomes[i] =
          execute_run(cfg, cells[task.cell], cfg.seeds[task.seed], variants[task.variant]);
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(tasks.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<SweepResult> results;
  results.reserve(cells.size());
  std::size_t task_index = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepResult result;
    result.cell = cells[c];
    for (std::size_t v = 0; v < variants.size(); ++v) {
      VariantResult vr;
      vr.variant = variants[v];
      long successes = 0;
      double err_sum = 0.0;
      double iter_sum = 0.0;
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        vr.outcomes.push_back(std::move(outcomes[task_index++]));
        const SeedOutcome& oc = vr.outcomes.back();
        err_sum += oc.final_err;
        if (oc.success) {
          ++successes;
          iter_sum += static_cast<double>(oc.iters_to_threshold);
        }
      }
      vr.success_rate = static_cast<double>(successes) / static_cast<double>(cfg.seeds.size());
      vr.mean_final_err = err_sum / static_cast<double>(cfg.seeds.size());
      vr.mean_iters = successes > 0 ? iter_sum / static_cast<double>(successes)
                                    : std::numeric_limits<double>::quiet_NaN();
      result.variants.push_back(std::move(vr));
    }

    if (cfg.hessian_check) {
      const Cell& cell = cells[c];
      const std::uint64_t aux = run_stream(cfg.seeds.front(), cell.index, 3);
      const GroundTruth gt = generate_ground_truth(cell.n1, cell.n2, cell.r, cell.kappa,
                                                   run_stream(cfg.seeds.front(), cell.index, 1));
      const SamplingMask mask =
          sample_mask(cell.n1, cell.n2, cell.p, run_stream(cfg.seeds.front(), cell.index, 2));
      const HessianBoundsResult hb = hessian_bounds_check(gt, mask, 200, 1.0, aux);
      CheckSummary summary;
      summary.name = "hessian_bounds";
      summary.params = "n1=" + std::to_string(cell.n1) + ";n2=" + std::to_string(cell.n2) +
                       ";r=" + std::to_string(cell.r) + ";kappa=" + format_double(cell.kappa) +
                       ";p=" + format_double(cell.p) + ";samples=200";
      summary.statistic = hb.fraction;
      summary.pass = hb.fraction >= 0.95;
      result.checks.push_back(std::move(summary));
    }

    results.push_back(std::move(result));
  }
  return results;
}

namespace {

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryRecord>& records) {
  auto out = open_for_write(path);
  out << kTrajectoryCsvHeader << "\n";
  for (const auto& rec : records) {
    out << rec.iter << "," << format_double(rec.objective) << ","
        << format_double(rec.frob_err) << "," << format_double(rec.spec_err) << ","
        << format_double(rec.two_inf_err) << "," << format_double(rec.balance_gap) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_loo_csv(const std::filesystem::path& path, const std::vector<LooDiagnostics>& diags) {
  auto out = open_for_write(path);
  out << kLooCsvHeader << "\n";
  for (const auto& d : diags) {
    out << d.t << "," << format_double(d.main_err_spec) << ","
        << format_double(d.max_rowwise_err) << "," << format_double(d.max_pair_dist_frob)
        << "," << format_double(d.main_err_2inf) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string cell_tag(const Cell& cell) {
  std::string idx = std::to_string(cell.index);
  while (idx.size() < 3) idx.insert(idx.begin(), '0');
  return "cell" + idx;
}

}  // namespace

void emit_report(const std::vector<SweepResult>& results, const ExperimentConfig& cfg,
                 const std::filesystem::path& output_dir) {
  if (results.empty()) throw std::invalid_argument("emit_report: no results");
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw std::runtime_error("cannot create directory: " + output_dir.string());
  const auto trajectories_dir = output_dir / "trajectories";
  const auto diagnostics_dir = output_dir / "diagnostics";
  std::filesystem::create_directories(trajectories_dir);
  std::filesystem::create_directories(diagnostics_dir);

  const bool both = cfg.variants().size() == 2;
  auto sweep = open_for_write(output_dir / "sweep.csv");
  if (both) {
    sweep << "n1,n2,r,kappa,p,seeds,vanilla_success_rate,vanilla_mean_iters,"
             "vanilla_mean_final_err,projected_success_rate,projected_mean_iters,"
             "projected_mean_final_err\n";
  } else {
    sweep << "n1,n2,r,kappa,p,variant,seeds,success_rate,mean_iters,mean_final_err\n";
  }

  bool any_loo = false;
  bool any_check = false;
  for (const auto& result : results) {
    const Cell& cell = result.cell;
    sweep << cell.n1 << "," << cell.n2 << "," << cell.r << "," << format_double(cell.kappa)
          << "," << format_double(cell.p) << ",";
    if (both) {
      sweep << cfg.seeds.size();
      for (const auto& vr : result.variants) {
        sweep << "," << format_double(vr.success_rate) << "," << format_double(vr.mean_iters)
              << "," << format_double(vr.mean_final_err);
      }
      sweep << "\n";
    } else {
      const auto& vr = result.variants.front();
      sweep << variant_name(vr.variant) << "," << cfg.seeds.size() << ","
            << format_double(vr.success_rate) << "," << format_double(vr.mean_iters) << ","
            << format_double(vr.mean_final_err) << "\n";
    }

    for (const auto& vr : result.variants) {
      for (const auto& outcome : vr.outcomes) {
        const std::string base =
            cell_tag(cell) + "_seed" + std::to_string(outcome.seed) + "_" + variant_name(vr.variant);
        write_trajectory_csv(trajectories_dir / (base + ".csv"), outcome.records);
        if (!outcome.loo.empty()) {
          const bool subset = outcome.loo.front().subset;
          write_loo_csv(diagnostics_dir / (base + (subset ? "_loo_subset.csv" : "_loo.csv")),
                        outcome.loo);
          any_loo = true;
        }
      }
    }
    any_check = any_check || !result.checks.empty();
  }
  sweep.close();

  if (any_check) {
    auto checks = open_for_write(diagnostics_dir / "checks.csv");
    checks << kCheckCsvHeader << "\n";
    for (const auto& result : results)
      for (const auto& summary : result.checks) checks << check_csv_line(summary) << "\n";
  }

  auto summary = open_for_write(output_dir / "summary.txt");
  summary << "sweep summary\n=============\n\nconfig:\n"
          << cfg.serialize(/*include_runtime_keys=*/false) << "\n";
  for (const auto& result : results) {
    const Cell& cell = result.cell;
    summary << cell_tag(cell) << ": n1=" << cell.n1 << " n2=" << cell.n2 << " r=" << cell.r
            << " kappa=" << format_double(cell.kappa) << " p=" << format_double(cell.p)
            << " aspect=" << format_double(static_cast<double>(cell.n1) /
                                           static_cast<double>(cell.n2))
            << "\n";
    for (const auto& vr : result.variants) {
      summary << "  " << variant_name(vr.variant)
              << ": success_rate=" << format_double(vr.success_rate)
              << " mean_iters=" << format_double(vr.mean_iters)
              << " mean_final_err=" << format_double(vr.mean_final_err) << "\n";
      for (const auto& outcome : vr.outcomes) {
        summary << "    seed " << outcome.seed << ": final_err=" << format_double(outcome.final_err)
                << " iters=" << outcome.iterations
                << (outcome.success ? " success" : " fail");
        if (outcome.failed) summary << " [" << outcome.note << "]";
        summary << "\n";
      }
    }
    for (const auto& check : result.checks) {
      summary << "  check " << check.name << ": statistic=" << format_double(check.statistic)
              << (check.pass ? " pass" : " fail") << "\n";
    }
  }
  if (any_loo) {
    summary << "\nleave-one-out diagnostics written under diagnostics/\n";
  }
  if (!summary) throw std::runtime_error("write failed: " + (output_dir / "summary.txt").string());
}

}  // namespace lrmc
