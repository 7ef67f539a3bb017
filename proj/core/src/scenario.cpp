#include "effhsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "effhsim/engines.hpp"
#include "effhsim/version.hpp"

namespace effhsim {

namespace {

// ---------------------------------------------------------------- parsing

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
  size_t used = 0;
  double out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("value of '" + key + "' is not a number: '" + v + "'");
  }
  if (trim(v.substr(used)) != "")
    throw ConfigError("trailing garbage in value of '" + key + "': '" + v + "'");
  return out;
}

int parse_int(const std::string& v, const std::string& key) {
  const double d = parse_double(v, key);
  const int i = static_cast<int>(std::lround(d));
  if (std::fabs(d - i) > 1e-12)
    throw ConfigError("value of '" + key + "' must be an integer: '" + v + "'");
  return i;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_double(item, key));
  return out;
}

const std::set<std::string> kModelKeys = {
    "kind", "delta", "deltas", "lambda_z", "lambda_x", "lambda",
    "omega", "gamma", "cutoff", "temperature", "n_spins"};
const std::set<std::string> kMethodKeys = {
    "task", "engines", "t_max", "n_points", "rc_levels",
    "gh_order", "theta_points", "radial_order", "eps1", "eps2"};
const std::set<std::string> kSweepKeys = {"parameter", "values", "min", "max", "count"};
const std::set<std::string> kSweepableParams = {"lambda_z", "lambda_x", "lambda",
                                                "temperature", "epsilon"};

Task parse_task(const std::string& v) {
  if (v == "dynamics") return Task::Dynamics;
  if (v == "equilibrium") return Task::Equilibrium;
  if (v == "kappa_scan") return Task::KappaScan;
  if (v == "xi_scan") return Task::XiScan;
  if (v == "rates_table") return Task::RatesTable;
  if (v == "chain_build") return Task::ChainBuild;
  if (v == "nonuniqueness_demo") return Task::NonuniquenessDemo;
  throw ConfigError("unknown task '" + v + "'");
}

Engine parse_engine(const std::string& v) {
  if (v == "uw") return Engine::UW;
  if (v == "rc") return Engine::RC;
  if (v == "effh") return Engine::EFFH;
  throw ConfigError("unknown engine '" + v + "' (expected uw, rc or effh)");
}

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::UW: return "uw";
    case Engine::RC: return "rc";
    case Engine::EFFH: return "effh";
  }
  return "?";
}

}  // namespace

BathSpec Scenario::bath(const std::string& label) const {
  BathSpec b;
  b.lambda = label == "z" ? lambda_z : label == "x" ? lambda_x : lambda;
  b.omega_rc = omega;
  b.gamma = gamma;
  b.cutoff = cutoff;
  b.temperature = temperature;
  b.coupling_label = label;
  return b;
}

ModelSpec Scenario::model() const {
  ModelSpec m;
  m.kind = model_kind;
  m.delta = delta;
  if (model_kind == ModelSpec::Kind::Impurity) {
    m.baths = {bath("z"), bath("x")};
  } else {
    m.n_spins = n_spins;
    m.deltas = deltas.empty() ? std::vector<double>(n_spins, delta) : deltas;
    for (int n = 1; n <= n_spins; ++n) m.baths.push_back(bath(std::to_string(n)));
  }
  return m;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  Scenario sc;
  std::map<std::string, std::string> model_kv, method_kv, sweep_kv;
  bool saw_sweep = false;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "method" && section != "sweep")
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      if (section == "sweep") saw_sweep = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" + key +
                        "' outside any [section]");
    auto& kv = section == "model" ? model_kv : section == "method" ? method_kv : sweep_kv;
    const auto& allowed = section == "model" ? kModelKeys
                         : section == "method" ? kMethodKeys : kSweepKeys;
    if (!allowed.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key +
                        "' in section [" + section + "]");
    if (kv.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = value;
  }

  auto take = [](std::map<std::string, std::string>& kv, const std::string& key)
      -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  // [model]
  if (auto v = take(model_kv, "kind")) {
    if (*v == "impurity") sc.model_kind = ModelSpec::Kind::Impurity;
    else if (*v == "chain") sc.model_kind = ModelSpec::Kind::Chain;
    else throw ConfigError("unknown model kind '" + *v + "'");
  }
  if (auto v = take(model_kv, "delta")) sc.delta = parse_double(*v, "delta");
  if (auto v = take(model_kv, "deltas")) sc.deltas = parse_double_list(*v, "deltas");
  if (auto v = take(model_kv, "lambda_z")) sc.lambda_z = parse_double(*v, "lambda_z");
  if (auto v = take(model_kv, "lambda_x")) sc.lambda_x = parse_double(*v, "lambda_x");
  if (auto v = take(model_kv, "lambda")) sc.lambda = parse_double(*v, "lambda");
  if (auto v = take(model_kv, "omega")) sc.omega = parse_double(*v, "omega");
  if (auto v = take(model_kv, "gamma")) sc.gamma = parse_double(*v, "gamma");
  if (auto v = take(model_kv, "cutoff")) sc.cutoff = parse_double(*v, "cutoff");
  if (auto v = take(model_kv, "temperature")) sc.temperature = parse_double(*v, "temperature");
  if (auto v = take(model_kv, "n_spins")) sc.n_spins = parse_int(*v, "n_spins");

  // [method]
  if (auto v = take(method_kv, "task")) sc.task = parse_task(*v);
  else throw ConfigError("missing required key 'task' in [method]");
  if (auto v = take(method_kv, "engines")) {
    for (const auto& e : split_list(*v)) sc.engines.push_back(parse_engine(e));
  }
  if (auto v = take(method_kv, "t_max")) sc.t_max = parse_double(*v, "t_max");
  if (auto v = take(method_kv, "n_points")) sc.n_points = parse_int(*v, "n_points");
  if (auto v = take(method_kv, "rc_levels")) sc.rc_levels = parse_int(*v, "rc_levels");
  if (auto v = take(method_kv, "gh_order")) sc.quad.gh_order = parse_int(*v, "gh_order");
  if (auto v = take(method_kv, "theta_points"))
    sc.quad.theta_points = parse_int(*v, "theta_points");
  if (auto v = take(method_kv, "radial_order"))
    sc.quad.radial_order = parse_int(*v, "radial_order");
  if (auto v = take(method_kv, "eps1")) sc.eps1 = parse_double(*v, "eps1");
  if (auto v = take(method_kv, "eps2")) sc.eps2 = parse_double(*v, "eps2");

  // [sweep]
  if (saw_sweep) {
    SweepSpec sweep;
    if (auto v = take(sweep_kv, "parameter")) sweep.parameter = *v;
    else throw ConfigError("missing required key 'parameter' in [sweep]");
    if (!kSweepableParams.count(sweep.parameter))
      throw ConfigError("sweep parameter '" + sweep.parameter + "' is not a real parameter");
    const auto values = take(sweep_kv, "values");
    const auto vmin = take(sweep_kv, "min");
    const auto vmax = take(sweep_kv, "max");
    const auto vcount = take(sweep_kv, "count");
    if (values) {
      if (vmin || vmax || vcount)
        throw ConfigError("[sweep] takes either 'values' or 'min/max/count', not both");
      sweep.values = parse_double_list(*values, "values");
    } else {
      if (!vmin || !vmax || !vcount)
        throw ConfigError("[sweep] needs 'values' or all of 'min', 'max', 'count'");
      const double lo = parse_double(*vmin, "min");
      const double hi = parse_double(*vmax, "max");
      const int n = parse_int(*vcount, "count");
      if (n < 1) throw ConfigError("[sweep] count must be >= 1");
      for (int i = 0; i < n; ++i)
        sweep.values.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    }
    if (sweep.values.empty()) throw ConfigError("[sweep] values list is empty");
    sc.sweep = std::move(sweep);
  }

  // task-specific requirements
  const bool needs_engines = sc.task == Task::Dynamics || sc.task == Task::Equilibrium;
  if (needs_engines && sc.engines.empty())
    throw ConfigError("task requires 'engines' in [method]");
  if (sc.task == Task::RatesTable && sc.engines.empty())
    sc.engines = {Engine::RC, Engine::EFFH};
  if (sc.model_kind == ModelSpec::Kind::Chain || sc.task == Task::ChainBuild) {
    if (sc.n_spins <= 0)
      throw ConfigError("chain model requires 'n_spins' in [model]");
    if (sc.n_spins % 2 != 0)
      throw ConfigError("chain requires an even number of spins (n_spins = " +
                        std::to_string(sc.n_spins) + ")");
    if (!sc.deltas.empty() && static_cast<int>(sc.deltas.size()) != sc.n_spins)
      throw ConfigError("'deltas' length must equal n_spins");
  }
  if ((sc.task == Task::KappaScan || sc.task == Task::XiScan) && !sc.sweep)
    throw ConfigError("scan tasks require a [sweep] section");
  if (sc.task == Task::RatesTable && !sc.sweep)
    throw ConfigError("rates_table requires a [sweep] over lambda_z");

  try {
    sc.quad.validate();
    if (sc.rc_levels < 2) throw std::invalid_argument("rc_levels must be >= 2");
    if (sc.n_points < 2) throw std::invalid_argument("n_points must be >= 2");
    sc.bath("z").validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid parameter: ") + e.what());
  }
  return sc;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

// ---------------------------------------------------------------- output

namespace {

std::string format_value(double v) {
  if (!std::isfinite(v)) throw NumericError("non-finite value in output");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", v);   // 12 significant digits
  return buf;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& dir, const std::string& name,
          std::vector<std::string> columns)
      : path_(dir / name), columns_(std::move(columns)) {
    std::string header;
    for (size_t i = 0; i < columns_.size(); ++i)
      header += (i ? "," : "") + columns_[i];
    body_ = header + "\n";
  }

  void row(const std::vector<double>& values, const std::string& point_label) {
    if (values.size() != columns_.size())
      throw std::logic_error("CsvFile: column count mismatch");
    std::string line;
    for (size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]))
        throw NumericError("non-finite value for column '" + columns_[i] + "' at " +
                           point_label);
      line += (i ? "," : "") + format_value(values[i]);
    }
    body_ += line + "\n";
    ++rows_;
  }

  std::string write(const std::map<std::string, std::string>& metadata, long declared_rows) {
    if (rows_ != declared_rows)
      throw NumericError("row count " + std::to_string(rows_) + " does not match declared "
                         "grid size " + std::to_string(declared_rows) + " for " +
                         path_.string());
    {
      std::ofstream out(path_, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path_.string());
      out << body_;
    }
    {
      std::ofstream meta(path_.string() + ".meta", std::ios::binary);
      meta << "file = " << path_.filename().string() << "\n";
      meta << "library_version = " << kVersion << "\n";
      for (const auto& [k, v] : metadata) meta << k << " = " << v << "\n";
    }
    return path_.string();
  }

 private:
  std::filesystem::path path_;
  std::vector<std::string> columns_;
  std::string body_;
  long rows_ = 0;
};

std::map<std::string, std::string> base_metadata(const Scenario& sc) {
  std::map<std::string, std::string> m;
  auto put = [&](const std::string& k, double v) { m[k] = format_value(v); };
  m["model"] = sc.model_kind == ModelSpec::Kind::Impurity ? "impurity" : "chain";
  put("delta", sc.delta);
  put("omega", sc.omega);
  put("gamma", sc.gamma);
  put("cutoff", sc.cutoff);
  put("temperature", sc.temperature);
  if (sc.model_kind == ModelSpec::Kind::Impurity) {
    put("lambda_z", sc.lambda_z);
    put("lambda_x", sc.lambda_x);
  } else {
    put("lambda", sc.lambda);
    m["n_spins"] = std::to_string(sc.n_spins);
  }
  m["gh_order"] = std::to_string(sc.quad.gh_order);
  m["theta_points"] = std::to_string(sc.quad.theta_points);
  m["radial_order"] = std::to_string(sc.quad.radial_order);
  m["rc_levels"] = std::to_string(sc.rc_levels);
  if (const char* seed = std::getenv("EFFH_SIM_SEED")) m["effh_sim_seed"] = seed;
  return m;
}

// Deterministic worker pool: evaluates fn(i) for i in [0, n) on `jobs`
// threads, results land in grid order.
template <typename F>
void parallel_for(long n, int jobs, F fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next(0);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&, w] {
      try {
        for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

// A scenario with one sweep parameter substituted.
Scenario at_point(const Scenario& sc, double value) {
  Scenario p = sc;
  if (!sc.sweep) return p;
  const std::string& par = sc.sweep->parameter;
  if (par == "lambda_z") p.lambda_z = value;
  else if (par == "lambda_x") p.lambda_x = value;
  else if (par == "lambda") p.lambda = value;
  else if (par == "temperature") p.temperature = value;
  else if (par == "epsilon") { /* handled by the scan tasks directly */ }
  return p;
}

struct EngineRun {
  Trajectory traj;
  double eq_sz = 0.0;
};

EngineRun run_dynamics_one(const Scenario& sc, Engine engine) {
  EngineRun out;
  const BathSpec bz = sc.bath("z"), bx = sc.bath("x");
  if (engine == Engine::RC) {
    RcEngine rc = make_rc_generator(sc.model(), sc.rc_levels);
    const double slow = slowest_decay_rate(rc.gen);
    const double t_max = sc.t_max ? *sc.t_max : 9.0 / slow;
    const auto times = linspace(0.0, t_max, sc.n_points);
    // exact spectral evolution: the RC superoperator carries Bohr frequencies
    // up to ~2 M Omega, far above the decay scale an adaptive stepper resolves
    out.traj = propagate_spectral(rc.gen, rc_initial_state(rc.sys), times);
    const int n_baths = static_cast<int>(rc.sys.factor_dims.size()) - 1;
    const int m = rc.sys.truncation_m;
    record_observable(out.traj, "sz", embed_rc_probe(pauli('z'), n_baths, m));
    record_observable(out.traj, "sx", embed_rc_probe(pauli('x'), n_baths, m));
    out.eq_sz = steady_state(rc.gen).expectation(embed_rc_probe(pauli('z'), n_baths, m));
    return out;
  }

  RedfieldGenerator gen = engine == Engine::UW
                              ? make_uw_generator(sc.delta, bz, bx)
                              : make_effh_generator(sc.delta, bz, bx, sc.quad).gen;
  const double slow = slowest_decay_rate(gen);
  const double t_max = sc.t_max ? *sc.t_max : 9.0 / slow;
  const auto times = linspace(0.0, t_max, sc.n_points);
  out.traj = propagate(gen, plus_state(), times);
  record_observable(out.traj, "sz", pauli('z'));
  record_observable(out.traj, "sx", pauli('x'));
  out.eq_sz = steady_state(gen).expectation(pauli('z'));
  return out;
}

}  // namespace

// System observable lifted to the RC-extended space (the expectation of the
// embedded operator equals that of the reduced state).
Operator embed_rc_probe(const Operator& sys_op, int n_baths, int m_levels) {
  std::vector<Operator> factors{sys_op};
  for (int b = 0; b < n_baths; ++b) factors.push_back(Operator::identity(m_levels));
  return tensor(factors);
}

namespace {

RunResult run_dynamics(const Scenario& sc, const std::filesystem::path& dir, int jobs) {
  RunResult result;
  std::vector<double> sweep_values = sc.sweep ? sc.sweep->values : std::vector<double>{0.0};
  const bool swept = sc.sweep.has_value();

  struct Cell { Engine engine; double value; EngineRun run; };
  std::vector<Cell> cells;
  for (Engine e : sc.engines)
    for (double v : sweep_values) cells.push_back({e, v, {}});

  parallel_for(static_cast<long>(cells.size()), jobs, [&](long i) {
    const Scenario point = swept ? at_point(sc, cells[i].value) : sc;
    cells[i].run = run_dynamics_one(point, cells[i].engine);
  });

  for (size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    std::string name = "dynamics_" + engine_name(cell.engine);
    if (swept) name += "_" + std::to_string(i % sweep_values.size());
    name += ".csv";
    CsvFile csv(dir, name, {"t", "sz", "sx"});
    const auto& traj = cell.run.traj;
    for (size_t k = 0; k < traj.times.size(); ++k)
      csv.row({traj.times[k], traj.observables.at("sz")[k], traj.observables.at("sx")[k]},
              "t = " + std::to_string(traj.times[k]));
    auto meta = base_metadata(sc);
    meta["engine"] = engine_name(cell.engine);
    meta["eq_sz"] = format_value(cell.run.eq_sz);
    if (swept) {
      meta["sweep_parameter"] = sc.sweep->parameter;
      meta["sweep_value"] = format_value(cell.value);
    }
    result.files_written.push_back(csv.write(meta, sc.n_points));
  }
  return result;
}

RunResult run_equilibrium(const Scenario& sc, const std::filesystem::path& dir, int jobs) {
  std::vector<double> sweep_values = sc.sweep ? sc.sweep->values : std::vector<double>{0.0};
  const bool swept = sc.sweep.has_value();
  const long n = static_cast<long>(sweep_values.size());

  struct Row { std::map<std::string, double> vals; int achieved_m = 0; };
  std::vector<Row> rows(n);
  parallel_for(n, jobs, [&](long i) {
    const Scenario point = swept ? at_point(sc, sweep_values[i]) : sc;
    Row& row = rows[i];
    row.vals["lambda_z"] = point.lambda_z;
    row.vals["lambda_x"] = point.lambda_x;
    const double beta = 1.0 / point.temperature;
    for (Engine e : sc.engines) {
      DensityMatrix rho;
      if (e == Engine::UW) {
        rho = gibbs_state(Operator(point.delta * pauli('z').mat, true), beta);
      } else if (e == Engine::EFFH) {
        const EffectiveModel m =
            build_impurity_effective(point.delta, point.bath("z"), point.bath("x"), point.quad);
        rho = gibbs_state(m.h_s_eff, beta);
      } else {
        ConvergedEquilibrium ce = rc_equilibrium_converged(point.model(), beta, pauli('z'),
                                                           1e-3, point.rc_levels);
        rho = ce.state;
        row.achieved_m = std::max(row.achieved_m, ce.achieved_m);
      }
      row.vals["sz_" + engine_name(e)] = rho.expectation(pauli('z'));
      row.vals["sx_" + engine_name(e)] = rho.expectation(pauli('x'));
    }
  });

  std::vector<std::string> cols = {"lambda_z", "lambda_x"};
  for (Engine e : sc.engines) {
    cols.push_back("sz_" + engine_name(e));
    cols.push_back("sx_" + engine_name(e));
  }
  CsvFile csv(dir, "equilibrium.csv", cols);
  int achieved_m = 0;
  for (long i = 0; i < n; ++i) {
    std::vector<double> v;
    for (const auto& c : cols) v.push_back(rows[i].vals.at(c));
    csv.row(v, "point " + std::to_string(i));
    achieved_m = std::max(achieved_m, rows[i].achieved_m);
  }
  auto meta = base_metadata(sc);
  if (achieved_m > 0) meta["achieved_rc_levels"] = std::to_string(achieved_m);
  if (swept) meta["sweep_parameter"] = sc.sweep->parameter;
  RunResult result;
  result.files_written.push_back(csv.write(meta, n));
  return result;
}

RunResult run_kappa_scan(const Scenario& sc, const std::filesystem::path& dir, int jobs) {
  const std::vector<double>& axis = sc.sweep->values;
  const long n = static_cast<long>(axis.size());
  const long total = n * n;
  std::vector<KappaPair> grid(total);
  parallel_for(total, jobs, [&](long i) {
    const double lz = axis[i / n], lx = axis[i % n];
    grid[i] = kappa_pair(lz / sc.omega, lx / sc.omega, sc.quad);
  });
  CsvFile csv(dir, "kappa_scan.csv", {"lambda_z", "lambda_x", "kappa_z", "kappa_x"});
  for (long i = 0; i < total; ++i) {
    const double lz = axis[i / n], lx = axis[i % n];
    csv.row({lz, lx, grid[i].kappa_z, grid[i].kappa_x},
            "lambda_z = " + std::to_string(lz) + ", lambda_x = " + std::to_string(lx));
  }
  RunResult result;
  result.files_written.push_back(csv.write(base_metadata(sc), total));
  return result;
}

RunResult run_xi_scan(const Scenario& sc, const std::filesystem::path& dir, int jobs) {
  const std::vector<double>& eps = sc.sweep->values;
  const long n = static_cast<long>(eps.size());
  std::vector<std::array<double, 3>> rows(n);
  parallel_for(n, jobs, [&](long i) {
    const double k = kappa_equal(eps[i]);
    rows[i] = {xi(eps[i], sc.quad), k, 2.0 * k - 1.0};
  });
  CsvFile csv(dir, "xi_scan.csv", {"epsilon", "xi", "kappa", "splitting_dressing"});
  for (long i = 0; i < n; ++i)
    csv.row({eps[i], rows[i][0], rows[i][1], rows[i][2]},
            "epsilon = " + std::to_string(eps[i]));
  RunResult result;
  result.files_written.push_back(csv.write(base_metadata(sc), n));
  return result;
}

RunResult run_rates_table(const Scenario& sc, const std::filesystem::path& dir, int jobs) {
  const std::vector<double>& lzs = sc.sweep->values;
  const long n = static_cast<long>(lzs.size());
  struct Row { double kz, kx, g_eff, g_rc, r2; };
  std::vector<Row> rows(n);
  parallel_for(n, jobs, [&](long i) {
    const Scenario point = at_point(sc, lzs[i]);
    const BathSpec bz = point.bath("z"), bx = point.bath("x");
    const KappaPair k = kappa_pair(bz.epsilon(), bx.epsilon(), point.quad);
    const RatePair rates = analytic_rates(point.delta, bz, bx, point.quad);
    Row row{k.kappa_z, k.kappa_x, rates.gamma_eff, 0.0, 0.0};

    RcEngine rc = make_rc_generator(point.model(), point.rc_levels);
    const double slow = slowest_decay_rate(rc.gen);
    const double t_max = point.t_max ? *point.t_max : 9.0 / slow;
    const auto times = linspace(0.0, t_max, point.n_points);
    Trajectory traj = propagate_spectral(rc.gen, rc_initial_state(rc.sys), times);
    const int n_baths = static_cast<int>(rc.sys.factor_dims.size()) - 1;
    const Operator probe = embed_rc_probe(pauli('z'), n_baths, rc.sys.truncation_m);
    record_observable(traj, "sz", probe);
    const double eq = steady_state(rc.gen).expectation(probe);
    const DecayFit fit = fit_decay_rate(traj, "sz", eq);
    row.g_rc = fit.gamma;
    row.r2 = fit.r_squared;
    rows[i] = row;
  });

  CsvFile csv(dir, "rates_table.csv",
              {"lambda_x", "lambda_z", "kappa_z", "kappa_x", "gamma_eff", "gamma_rc_fitted"});
  for (long i = 0; i < n; ++i)
    csv.row({sc.lambda_x, lzs[i], rows[i].kz, rows[i].kx, rows[i].g_eff, rows[i].g_rc},
            "lambda_z = " + std::to_string(lzs[i]));
  auto meta = base_metadata(sc);
  for (long i = 0; i < n; ++i)
    meta["fit_r_squared_" + std::to_string(i)] = format_value(rows[i].r2);
  RunResult result;
  result.files_written.push_back(csv.write(meta, n));
  return result;
}

RunResult run_chain_build(const Scenario& sc, const std::filesystem::path& dir, int) {
  const std::vector<double> deltas =
      sc.deltas.empty() ? std::vector<double>(sc.n_spins, sc.delta) : sc.deltas;
  const EffectiveModel model = build_chain_effective(sc.n_spins, deltas, sc.lambda, sc.omega,
                                                     sc.quad, sc.bath("1"));
  const EigResult eig = hermitian_eig(model.h_s_eff);
  CsvFile csv(dir, "chain_effective.csv", {"index", "eigenvalue"});
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    csv.row({static_cast<double>(i), eig.eigenvalues(i)}, "index " + std::to_string(i));
  auto meta = base_metadata(sc);
  const double eps = sc.lambda / sc.omega;
  meta["epsilon"] = format_value(eps);
  meta["kappa"] = format_value(kappa_equal(eps));
  meta["splitting_dressing"] = format_value(2.0 * kappa_equal(eps) - 1.0);
  if (sc.n_spins > 2) meta["xi"] = format_value(xi(eps, sc.quad));
  RunResult result;
  result.files_written.push_back(csv.write(meta, eig.eigenvalues.size()));
  return result;
}

RunResult run_nonuniqueness(const Scenario& sc, const std::filesystem::path& dir, int) {
  const Operator s1 = Operator((pauli('z').mat + pauli('x').mat) / std::sqrt(2.0), true);
  const Operator s2 = pauli('x');
  const Operator h_s = Operator(sc.delta * pauli('z').mat, true);
  const Operator h12 =
      factorized_polaron_demo(PolaronOrder::OneThenTwo, s1, s2, sc.eps1, sc.eps2, h_s);
  const Operator h21 =
      factorized_polaron_demo(PolaronOrder::TwoThenOne, s1, s2, sc.eps1, sc.eps2, h_s);
  std::vector<CouplingTerm> coup{{sc.eps1, s1}, {sc.eps2, s2}};
  const Operator h_nf = effective_operator(h_s, coup, sc.quad);
  std::vector<CouplingTerm> coup_perm{{sc.eps2, s2}, {sc.eps1, s1}};
  const Operator h_nf_perm = effective_operator(h_s, coup_perm, sc.quad);

  CsvFile csv(dir, "nonuniqueness.csv",
              {"row", "col", "re_one_then_two", "im_one_then_two", "re_two_then_one",
               "im_two_then_one", "re_nonfactorized", "im_nonfactorized"});
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      csv.row({static_cast<double>(r), static_cast<double>(c), h12.mat(r, c).real(),
               h12.mat(r, c).imag(), h21.mat(r, c).real(), h21.mat(r, c).imag(),
               h_nf.mat(r, c).real(), h_nf.mat(r, c).imag()},
              "entry (" + std::to_string(r) + "," + std::to_string(c) + ")");
  auto meta = base_metadata(sc);
  meta["eps1"] = format_value(sc.eps1);
  meta["eps2"] = format_value(sc.eps2);
  meta["order_difference_norm"] = format_value((h12.mat - h21.mat).norm());
  meta["permutation_residual"] = format_value((h_nf.mat - h_nf_perm.mat).cwiseAbs().maxCoeff());
  RunResult result;
  result.files_written.push_back(csv.write(meta, 4));
  return result;
}

}  // namespace

RunResult run(const Scenario& scenario, const std::string& out_dir, int jobs) {
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  switch (scenario.task) {
    case Task::Dynamics: return run_dynamics(scenario, dir, jobs);
    case Task::Equilibrium: return run_equilibrium(scenario, dir, jobs);
    case Task::KappaScan: return run_kappa_scan(scenario, dir, jobs);
    case Task::XiScan: return run_xi_scan(scenario, dir, jobs);
    case Task::RatesTable: return run_rates_table(scenario, dir, jobs);
    case Task::ChainBuild: return run_chain_build(scenario, dir, jobs);
    case Task::NonuniquenessDemo: return run_nonuniqueness(scenario, dir, jobs);
  }
  throw ConfigError("unhandled task");
}

}  // namespace effhsim
