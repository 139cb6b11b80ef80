#include "xsdp/cli.hpp"

#include "xsdp/domlang.hpp"
#include "xsdp/sdp.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace xsdp::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

Rational parse_literal(const std::string& text) {
  std::string t = trim(text);
  bool neg = false;
  if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    neg = t[0] == '-';
    t = t.substr(1);
  }
  Rational q;
  if (auto slash = t.find('/'); slash != std::string::npos) {
    Rational den = parse_decimal(t.substr(slash + 1));
    if (den == 0) throw Error("division by zero in '" + text + "'");
    q = parse_decimal(t.substr(0, slash)) / den;
  } else {
    q = parse_decimal(t);
  }
  return neg ? Rational(-q) : q;
}

Dcmdp load(const RunConfig& cfg) {
  if (cfg.domain.empty()) throw UsageError("--domain is required");
  Dcmdp m = load_domain(cfg.domain);
  if (!cfg.discount.empty()) {
    Rational g = parse_literal(cfg.discount);
    if (g < 0 || g > 1) throw UsageError("--discount must lie in [0,1]");
    m.discount = g;
  }
  return m;
}

std::size_t target_horizon(const RunConfig& cfg, const Dcmdp& m, bool prefer_horizon) {
  if (prefer_horizon && cfg.horizon_set) return cfg.horizon;
  if (cfg.iterations_set) return cfg.iterations;
  if (cfg.horizon_set) return cfg.horizon;
  if (m.horizon) return *m.horizon;
  throw UsageError("--iterations is required (the domain has an unbounded horizon)");
}

SolveResult run_solver(const Dcmdp& m, const RunConfig& cfg, std::size_t horizon) {
  SolveOptions opts;
  opts.horizon = horizon;
  opts.prune = cfg.prune;
  return solve(m, opts);
}

/// V^h, following the fixpoint once iteration stopped early.
const Iteration& iteration_at(const SolveResult& r, std::size_t h) {
  if (h < r.iterations.size()) return r.iterations[h];
  if (r.converged) return r.iterations.back();
  return r.at(h);
}

void write_or_print(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) out << content;
  else write_atomically(path, content);
}

int report(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return dynamic_cast<const UsageError*>(&e) ? 2 : 1;
}

}  // namespace

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw Error("cannot write '" + tmp.string() + "'");
    o << content;
    if (!o) throw Error("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

Assignment parse_state(const Dcmdp& m, const std::string& text) {
  Assignment s;
  for (const std::string& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("expected name=value, got '" + item + "'");
    const std::string name = trim(item.substr(0, eq));
    const std::string value = trim(item.substr(eq + 1));
    auto v = m.vars().find(name);
    if (!v) throw UsageError("unknown variable '" + name + "'");
    if (m.vars().is_boolean(*v)) {
      if (value == "true" || value == "1") s.set_bool(*v, true);
      else if (value == "false" || value == "0") s.set_bool(*v, false);
      else throw UsageError("boolean '" + name + "' takes true/false, got '" + value + "'");
    } else {
      try {
        s.set(*v, parse_literal(value));
      } catch (const Error&) {
        throw UsageError("malformed value '" + value + "' for '" + name + "'");
      }
    }
  }
  return s;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Dcmdp m = load(cfg);
    const std::size_t horizon = target_horizon(cfg, m, false);
    SolveResult r = run_solver(m, cfg, horizon);

    std::ostringstream csv;
    csv << "iter,nodes,leaves,decisions,time_ms\n";
    const std::size_t first = r.iterations.size() > 1 ? 1 : 0;
    for (std::size_t h = first; h < r.iterations.size(); ++h) {
      const Iteration& it = r.iterations[h];
      csv << h << "," << it.stats.nodes << "," << it.stats.leaves << "," << it.stats.decisions << ","
          << static_cast<long long>(it.time_ms + 0.5) << "\n";
    }
    write_or_print(cfg.stats_path, csv.str(), out);

    for (std::size_t h = first; h < r.iterations.size(); ++h) {
      const std::string stem = "V" + std::to_string(h);
      if (!cfg.dot_dir.empty())
        write_atomically((std::filesystem::path(cfg.dot_dir) / (stem + ".dot")).string(),
                         m.store->export_dot(r.iterations[h].value));
      if (!cfg.case_dir.empty())
        write_atomically((std::filesystem::path(cfg.case_dir) / (stem + ".case")).string(),
                         to_case(*m.store, r.iterations[h].value));
    }
    if (r.converged) err << "converged at iteration " << r.final_horizon << "\n";
    return 0;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Dcmdp m = load(cfg);
    if (cfg.state.empty()) throw UsageError("--state is required");
    Assignment s = parse_state(m, cfg.state);
    try {
      check_state(m, s);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    const std::size_t h = target_horizon(cfg, m, true);
    SolveResult r = run_solver(m, cfg, h);
    const Iteration& it = iteration_at(r, h);
    const Rational v = m.store->evaluate(it.value, s);
    out << "value " << to_string(v) << "\n";
    out << "decimal " << to_decimal(v) << "\n";
    if (h > 0) {
      std::size_t best = 0;
      Rational best_v = m.store->evaluate(it.q[0], s);
      for (std::size_t i = 1; i < it.q.size(); ++i) {
        Rational q = m.store->evaluate(it.q[i], s);
        if (q > best_v) {
          best = i;
          best_v = q;
        }
      }
      out << "action " << m.actions[best].name << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int cmd_grid(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Dcmdp m = load(cfg);
    if (cfg.axes.size() != 2) throw UsageError("--vars takes exactly two continuous variables");
    if (cfg.resolution < 2) throw UsageError("--res must be at least 2");
    std::vector<VarId> axes;
    for (const std::string& a : cfg.axes) {
      auto v = m.vars().find(a);
      if (!v || m.vars().is_boolean(*v)) throw UsageError("grid axis '" + a + "' is not a continuous variable");
      axes.push_back(*v);
    }
    if (axes[0] == axes[1]) throw UsageError("grid axes must differ");
    std::string fixed_text;
    for (const auto& f : cfg.fixed) fixed_text += f + ",";
    Assignment base = parse_state(m, fixed_text);
    for (VarId v : m.bvars)
      if (!base.has(v)) throw UsageError("variable '" + m.vars().display_name(v) + "' is neither an axis nor fixed");
    for (VarId v : m.cvars)
      if (!base.has(v) && v != axes[0] && v != axes[1])
        throw UsageError("variable '" + m.vars().display_name(v) + "' is neither an axis nor fixed");

    const std::size_t h = target_horizon(cfg, m, true);
    SolveResult r = run_solver(m, cfg, h);
    const NodeRef value = iteration_at(r, h).value;
    const Store& store = *m.store;

    const std::size_t res = cfg.resolution;
    auto coord = [&](VarId v, std::size_t i) {
      const VarInfo& info = m.vars().info(v);
      Rational t(mpz_class(static_cast<unsigned long>(i)), mpz_class(static_cast<unsigned long>(res - 1)));
      t.canonicalize();
      return Rational(info.lower + (info.upper - info.lower) * t);
    };
    for (VarId v : axes) base.set(v, coord(v, 0));
    check_state(m, base);

    // read-only evaluation on a frozen store, fanned out over rows of ax1
    std::vector<std::string> rows(res);
    auto work = [&](std::size_t begin, std::size_t step) {
      Assignment s = base;
      for (std::size_t i = begin; i < res; i += step) {
        std::string block;
        const Rational a = coord(axes[0], i);
        s.set(axes[0], a);
        for (std::size_t j = 0; j < res; ++j) {
          const Rational b = coord(axes[1], j);
          s.set(axes[1], b);
          block += to_decimal(a) + "," + to_decimal(b) + "," + to_decimal(store.evaluate(value, s)) + "\n";
        }
        rows[i] = std::move(block);
      }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w, workers);
    work(0, workers);
    for (auto& t : pool) t.join();

    std::string csv = cfg.axes[0] + "," + cfg.axes[1] + ",value\n";
    for (const auto& block : rows) csv += block;
    write_or_print(cfg.out_path, csv, out);
    return 0;
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact symbolic value iteration for hybrid discrete/continuous MDPs"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string vars_csv;
  std::string fix_csv;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--domain", cfg.domain, "domain file (.dcmdp)")->required();
    sub->add_option("--iterations", cfg.iterations, "number of backups");
    sub->add_flag("--prune", cfg.prune, "prune infeasible paths after every backup");
    sub->add_option("--discount", cfg.discount, "override the domain's discount");
  };
  CLI::App* solve_cmd = app.add_subcommand("solve", "run value iteration and report statistics");
  common(solve_cmd);
  solve_cmd->add_option("--dot", cfg.dot_dir, "directory for per-iteration DOT files");
  solve_cmd->add_option("--case", cfg.case_dir, "directory for per-iteration case files");
  solve_cmd->add_option("--stats", cfg.stats_path, "stats CSV path (stdout if omitted)");

  CLI::App* eval_cmd = app.add_subcommand("eval", "value and greedy action at a state");
  common(eval_cmd);
  eval_cmd->add_option("--state", cfg.state, "assignment, e.g. k=0,x1=30,x2=40")->required();
  eval_cmd->add_option("--horizon", cfg.horizon, "stages to go");

  CLI::App* grid_cmd = app.add_subcommand("grid", "sample V^h on a 2-D grid");
  common(grid_cmd);
  grid_cmd->add_option("--horizon", cfg.horizon, "stages to go");
  grid_cmd->add_option("--vars", vars_csv, "two axes, e.g. x1,x2")->required();
  grid_cmd->add_option("--fix", fix_csv, "values for the other variables, e.g. k=0");
  grid_cmd->add_option("--res", cfg.resolution, "points per axis")->check(CLI::Range(2, 100000));
  grid_cmd->add_option("--out", cfg.out_path, "CSV path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 2;
  }
  cfg.iterations_set = solve_cmd->count("--iterations") + eval_cmd->count("--iterations") +
                           grid_cmd->count("--iterations") > 0;
  cfg.horizon_set = eval_cmd->count("--horizon") + grid_cmd->count("--horizon") > 0;
  cfg.axes = split(vars_csv, ',');
  cfg.fixed = split(fix_csv, ',');

  if (*solve_cmd) return cmd_solve(cfg, out, err);
  if (*eval_cmd) return cmd_eval(cfg, out, err);
  return cmd_grid(cfg, out, err);
}

}  // namespace xsdp::cli
