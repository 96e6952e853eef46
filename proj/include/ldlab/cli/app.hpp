#ifndef LDLAB_CLI_APP_HPP
#define LDLAB_CLI_APP_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ldlab/bounds.hpp"
#include "ldlab/cli/report.hpp"
#include "ldlab/code_io.hpp"
#include "ldlab/ensemble.hpp"
#include "ldlab/errors.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/verifier.hpp"

namespace ldlab::cli {

enum ExitCode : int { kOk = 0, kVerifyFail = 1, kUsage = 2, kNumeric = 3 };

inline constexpr double kStrictRootTol = 1e-13;
inline constexpr double kStrictArgTol = 1e-12;

/// Options shared by all subcommands.
struct GlobalConfig {
  std::string format = "auto";
  std::string output;
  unsigned threads = 0;
  bool strict = false;
  double root_tol = numerics::kDefaultRootTol;
  double arg_tol = numerics::kDefaultArgTol;
  int max_iter = numerics::kDefaultMaxIter;
  int grid_points = numerics::kDefaultGridPoints;

  bounds::BoundOptions bound_options() const {
    bounds::BoundOptions o;
    o.root.tol = strict ? std::min(root_tol, kStrictRootTol) : root_tol;
    o.root.max_iter = max_iter;
    o.maximize.tol = strict ? std::min(arg_tol, kStrictArgTol) : arg_tol;
    o.maximize.grid_points = grid_points;
    return o;
  }

  unsigned worker_count() const { return threads > 0 ? threads : default_threads(); }
};

struct BoundArgs {
  std::string kind;
  int s = 0;
  std::optional<int> L;
  std::optional<double> Q;
  std::optional<double> R;
  bool global = false;
};

struct Table1Args {
  std::string cells = "all";
};

struct CurveArgs {
  int s = 0;
  int L = 0;
  std::string q_mode = "optimize";
  std::optional<double> Q;
  std::string grid = "0:0.4:41";
};

struct SimulateArgs {
  int s = 0;
  int L = 0;
  int N = 0;
  std::optional<std::int64_t> t;
  std::optional<double> R;
  std::optional<double> Q;
  std::optional<int> w;
  std::string mode = "both";
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  std::string rounding = "ceil";
};

struct VerifyArgs {
  std::string file;
  int s = 0;
  int L = 0;
  double epsilon = 0.0;
  std::string mode = "exact";
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::uint64_t budget = verifier::kDefaultSubsetBudget;
};

/// A report plus the exit status the command asks for.
struct CommandResult {
  Report report;
  int status = kOk;
};

// ------------------------------------------------------------------- bound

inline const char* bound_formula(const std::string& kind, bool fixed_Q, bool global) {
  if (kind == "capacity")
    return fixed_Q ? "C(s,Q) = h(Q) - q0 h(Q/q0), q0 = 1 - (1-Q)^s"
                   : "C(s) = max_Q [h(Q) - q0 h(Q/q0)], q0 = 1 - (1-Q)^s";
  if (kind == "rate")
    return fixed_Q ? "A_L(s,Q)/(s+L-1), A_L = log2(Q/(1-y)) - s K(Q,1-y) - L K(Q,(1-y)/(1-y^s))"
                   : "R_L(s) = max_Q A_L(s,Q)/(s+L-1), y the stationary root in [1-Q,1)";
  if (kind == "exponent")
    return fixed_Q ? "E_L(s,R,Q) = min_q A(s,Q,q) + L [h(Q) - q h(Q/q) - R]^+"
                   : "E_L(s,R) = max_Q E_L(s,R,Q)";
  if (kind == "rcrit")
    return global ? "largest R with E_L(s,R) = (s+L-1) R_L(s) - L R"
                  : "R_cr(s,L,Q) = h(Q) - q2 h(Q/q2), q2 = Q (1-y^s)/(1-y)";
  return "lim_{L->inf} R_L(s) = log2((s-1)^(s-1)/s^s + 1)";
}

inline CommandResult cmd_bound(const BoundArgs& a, const GlobalConfig& g) {
  const auto opts = g.bound_options();
  const bool needs_L = a.kind == "rate" || a.kind == "exponent" || a.kind == "rcrit";
  if (needs_L && !a.L) throw CLI::ValidationError("--L", "required for bound " + a.kind);
  if (a.kind == "exponent" && !a.R) throw CLI::ValidationError("--R", "required for bound exponent");
  if (a.kind == "rate-inf" && a.Q) throw CLI::ValidationError("--Q", "not used by bound rate-inf");
  if (a.global && a.kind != "rcrit") throw CLI::ValidationError("--global", "only used by bound rcrit");
  if (a.global && a.Q) throw CLI::ValidationError("--global", "excludes --Q");
  if (a.s < 1) throw DomainError("strength s must be >= 1");
  if (a.L && *a.L < 1) throw DomainError("list size L must be >= 1");
  if (a.Q && !(*a.Q > 0.0 && *a.Q < 1.0)) throw DomainError("relative weight Q must lie in (0,1)");

  Report r;
  r.command = "bound";
  r.parameters = {{"kind", a.kind}, {"s", std::int64_t{a.s}}};
  if (a.L) r.parameters.emplace_back("L", std::int64_t{*a.L});
  if (a.Q) r.parameters.emplace_back("Q", *a.Q);
  if (a.R) r.parameters.emplace_back("R", *a.R);
  r.columns = {"kind", "s", "L", "Q", "R", "value", "argmax_Q", "inner", "evaluations", "residual", "formula"};

  Value value, argmax, inner, evaluations, residual, branch;
  std::optional<double> Q_used = a.Q;
  if (a.kind == "capacity") {
    if (a.Q) {
      value = bounds::capacity_at_Q(a.s, *a.Q);
      evaluations = std::int64_t{1};
    } else {
      const auto b = bounds::capacity(a.s, opts);
      value = b.value;
      argmax = *b.argmax_Q;
      evaluations = std::int64_t{b.evaluations};
    }
  } else if (a.kind == "rate") {
    if (a.Q) {
      const auto root = bounds::stationary_root(a.s, *a.L, *a.Q, opts.root);
      value = bounds::list_exponent_at_Q(a.s, *a.L, *a.Q, opts.root) / (a.s + *a.L - 1);
      inner = root.x;
      residual = root.residual;
      evaluations = std::int64_t{root.iterations};
    } else {
      const auto b = bounds::random_coding_rate(a.s, *a.L, opts);
      value = b.value;
      argmax = *b.argmax_Q;
      inner = *b.inner;
      residual = b.residual;
      evaluations = std::int64_t{b.evaluations};
    }
  } else if (a.kind == "exponent") {
    if (a.Q) {
      const auto e = bounds::exponent_at_Q_detail(a.s, *a.L, *a.R, *a.Q, opts.root);
      value = e.value;
      inner = e.q_min;
      branch = std::string(bounds::to_string(e.branch));
      evaluations = std::int64_t{1};
    } else {
      const auto b = bounds::exponent(a.s, *a.L, *a.R, opts);
      value = b.value;
      argmax = *b.argmax_Q;
      evaluations = std::int64_t{b.evaluations};
      branch = std::string(bounds::to_string(
          bounds::exponent_at_Q_detail(a.s, *a.L, *a.R, *b.argmax_Q, opts.root).branch));
    }
  } else if (a.kind == "rcrit") {
    if (a.global) {
      const auto b = bounds::critical_rate(a.s, *a.L, opts);
      value = b.value;
      evaluations = std::int64_t{b.evaluations};
    } else {
      if (!Q_used) {
        const auto b = bounds::random_coding_rate(a.s, *a.L, opts);
        Q_used = *b.argmax_Q;
        argmax = *b.argmax_Q;
        evaluations = std::int64_t{b.evaluations};
      }
      const auto p = bounds::list_minimizer(a.s, *a.L, *Q_used, opts.root);
      value = bounds::critical_rate_at_Q(a.s, *a.L, *Q_used, opts.root);
      inner = p.q;
    }
  } else if (a.kind == "rate-inf") {
    value = bounds::random_coding_rate_limit(a.s);
  } else {
    throw CLI::ValidationError("KIND", "unknown bound kind " + a.kind);
  }

  auto opt_int = [](const std::optional<int>& v) -> Value {
    return v ? Value(std::int64_t{*v}) : Value{};
  };
  auto opt_dbl = [](const std::optional<double>& v) -> Value { return v ? Value(*v) : Value{}; };
  r.add_row({a.kind, std::int64_t{a.s}, opt_int(a.L), opt_dbl(a.Q), opt_dbl(a.R), value, argmax, inner,
             evaluations, residual, std::string(bound_formula(a.kind, a.Q.has_value(), a.global))});
  r.summary = {{"value", value}};
  if (!std::holds_alternative<std::monostate>(argmax)) r.summary.emplace_back("argmax_Q", argmax);
  if (!std::holds_alternative<std::monostate>(branch)) r.summary.emplace_back("branch", branch);
  return {std::move(r), kOk};
}

// ------------------------------------------------------------------- table1

inline constexpr int kTableMinS = 2;
inline constexpr int kTableMaxS = 10;
inline constexpr int kTableMinL = 2;
inline constexpr int kTableMaxL = 10;

/// Cells whose L=2 entry is not a random-coding value.
inline bool table_cell_excluded(int s, int L) { return L == 2 && s >= 7; }

inline constexpr const char* kExcludedNote = "excluded: requires external R_1(s)";

struct TableCellRequest {
  bool capacity_block = false;
  int s = 0;
  int L = 0;
};

/// "all", or a comma-separated list of "s_L" rate cells and "C_s" capacity cells.
inline std::vector<TableCellRequest> parse_cells(const std::string& spec) {
  std::vector<TableCellRequest> out;
  if (spec == "all") {
    for (int s = kTableMinS; s <= kTableMaxS; ++s)
      for (int L = kTableMinL; L <= kTableMaxL; ++L) out.push_back({false, s, L});
    for (int s = kTableMinS; s <= kTableMaxS; ++s) out.push_back({true, s, 1});
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  auto to_int = [&](const std::string& x) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(x, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != x.size()) throw CLI::ValidationError("--cells", "bad cell '" + item + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    if (item.size() > 2 && (item[0] == 'C' || item[0] == 'c') && item[1] == '_') {
      const int s = to_int(item.substr(2));
      if (s < kTableMinS || s > kTableMaxS) throw CLI::ValidationError("--cells", "s out of range in '" + item + "'");
      out.push_back({true, s, 1});
      continue;
    }
    const auto pos = item.find('_');
    if (pos == std::string::npos) throw CLI::ValidationError("--cells", "bad cell '" + item + "'");
    const int s = to_int(item.substr(0, pos)), L = to_int(item.substr(pos + 1));
    if (s < kTableMinS || s > kTableMaxS || L < kTableMinL || L > kTableMaxL)
      throw CLI::ValidationError("--cells", "cell out of range '" + item + "'");
    out.push_back({false, s, L});
  }
  if (out.empty()) throw CLI::ValidationError("--cells", "no cells given");
  return out;
}

inline CommandResult cmd_table1(const Table1Args& a, const GlobalConfig& g) {
  const auto cells = parse_cells(a.cells);
  const auto opts = g.bound_options();
  std::vector<std::vector<Value>> rows(cells.size());
  parallel_for(cells.size(), g.worker_count(), [&](std::size_t i) {
    const auto& c = cells[i];
    if (c.capacity_block) {
      const auto cap = bounds::capacity(c.s, opts);
      // The list-size-one critical rate is taken at the maximizer of A_1(s,Q).
      const auto rate1 = bounds::random_coding_rate(c.s, 1, opts);
      const double rcr = bounds::critical_rate_at_Q(c.s, 1, *rate1.argmax_Q, opts.root);
      rows[i] = {std::string("capacity"), std::int64_t{c.s}, std::int64_t{1}, *cap.argmax_Q, cap.value, rcr,
                 std::string()};
      return;
    }
    if (table_cell_excluded(c.s, c.L)) {
      rows[i] = {std::string("rate"), std::int64_t{c.s}, std::int64_t{c.L}, Value{}, Value{}, Value{},
                 std::string(kExcludedNote)};
      return;
    }
    const auto rate = bounds::random_coding_rate(c.s, c.L, opts);
    const double rcr = bounds::critical_rate_at_Q(c.s, c.L, *rate.argmax_Q, opts.root);
    rows[i] = {std::string("rate"), std::int64_t{c.s}, std::int64_t{c.L}, *rate.argmax_Q, rate.value, rcr,
               std::string()};
  });
  Report r;
  r.command = "table1";
  r.parameters = {{"cells", a.cells}};
  r.columns = {"block", "s", "L", "Q", "rate", "critical_rate", "note"};
  r.rows = std::move(rows);
  return {std::move(r), kOk};
}

// ------------------------------------------------------------------- curve

struct RateGrid {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

inline RateGrid parse_grid(const std::string& spec) {
  RateGrid g;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  std::string rest;
  if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.n) || c1 != ':' || c2 != ':' || (in >> rest))
    throw CLI::ValidationError("--r-grid", "expected lo:hi:n, got '" + spec + "'");
  if (!(g.lo >= 0.0 && g.hi >= g.lo) || g.n < 1)
    throw CLI::ValidationError("--r-grid", "need 0 <= lo <= hi and n >= 1");
  return g;
}

inline CommandResult cmd_curve(const CurveArgs& a, const GlobalConfig& g) {
  const auto grid = parse_grid(a.grid);
  const bool fixed = a.q_mode == "fixed";
  if (fixed && !a.Q) throw CLI::ValidationError("--Q", "required with --q fixed");
  if (!fixed && a.Q) throw CLI::ValidationError("--Q", "only used with --q fixed");
  const auto curve = bounds::exponent_curve(a.s, a.L, grid.lo, grid.hi, grid.n,
                                            fixed ? a.Q : std::nullopt, g.bound_options());
  Report r;
  r.command = "curve";
  r.parameters = {{"s", std::int64_t{a.s}}, {"L", std::int64_t{a.L}}, {"q", a.q_mode}, {"r_grid", a.grid}};
  if (a.Q) r.parameters.emplace_back("Q", *a.Q);
  r.columns = {"R", "E", "branch", "dE_dR", "Q", "critical_rate", "capacity"};
  for (const auto& p : curve.samples)
    r.add_row({p.R, p.E, std::string(bounds::to_string(p.branch)), p.slope, p.Q, curve.critical_rate, curve.capacity});
  r.summary = {{"critical_rate", curve.critical_rate}, {"capacity", curve.capacity}};
  return {std::move(r), kOk};
}

// ---------------------------------------------------------------- simulate

inline CommandResult cmd_simulate(const SimulateArgs& a, const GlobalConfig& g) {
  if (a.t.has_value() == a.R.has_value()) throw CLI::ValidationError("--t/--R", "give exactly one of --t and --R");
  if (a.Q.has_value() == a.w.has_value()) throw CLI::ValidationError("--Q/--w", "give exactly one of --Q and --w");
  if (a.s < 1 || a.L < 1) throw DomainError("simulate: need s >= 1 and L >= 1");
  if (a.N < 2) throw DomainError("simulate: N must be at least 2");
  const auto rounding = a.rounding == "floor" ? ensemble::SizeRounding::Floor : ensemble::SizeRounding::Ceil;
  const std::int64_t t = a.t ? *a.t : ensemble::code_size(*a.R, a.N, rounding);
  const auto spec = a.Q ? ensemble::EnsembleSpec::from_Q(a.N, t, *a.Q, a.seed)
                        : ensemble::EnsembleSpec::with_weight(a.N, t, *a.w, a.seed);
  const double R = a.R ? *a.R : std::log2(static_cast<double>(t)) / a.N;
  const bool do_exact = a.mode != "mc", do_mc = a.mode != "exact";

  Value exact, log2_exact, union_bound, lower_bound, mc, mc_stderr, mc_hits;
  if (do_exact) {
    const auto b = ensemble::bad_probability(a.s, a.L, spec);
    exact = b.exact;
    log2_exact = b.log2_exact;
    union_bound = b.union_bound;
    lower_bound = b.lower_bound;
  }
  if (do_mc) {
    const auto m = ensemble::monte_carlo_bad_prob(a.s, a.L, spec, a.trials, g.worker_count());
    mc = m.estimate;
    mc_stderr = m.stderr_;
    mc_hits = m.hits;
  }
  const double wQ = static_cast<double>(spec.w) / spec.N;
  const double E = bounds::exponent_at_Q(a.s, a.L, R, wQ, g.bound_options().root);

  Report r;
  r.command = "simulate";
  r.parameters = {{"s", std::int64_t{a.s}}, {"L", std::int64_t{a.L}}, {"N", std::int64_t{a.N}},
                  {"t", t},                 {"w", std::int64_t{spec.w}}, {"R", R},
                  {"mode", a.mode},          {"seed", static_cast<std::int64_t>(a.seed)}};
  if (do_mc) r.parameters.emplace_back("trials", a.trials);
  r.columns = {"s", "L", "N", "t", "w", "Q", "R", "exact", "log2_exact", "mc", "mc_stderr", "mc_hits",
               "union_bound", "lower_bound", "exponent", "predicted"};
  r.add_row({std::int64_t{a.s}, std::int64_t{a.L}, std::int64_t{a.N}, t, std::int64_t{spec.w}, wQ, R, exact,
             log2_exact, mc, mc_stderr, mc_hits, union_bound, lower_bound, E, std::exp2(-a.N * E)});
  if (do_exact) r.summary.emplace_back("exact", exact);
  if (do_mc) {
    r.summary.emplace_back("mc", mc);
    r.summary.emplace_back("mc_stderr", mc_stderr);
  }
  if (do_exact) {
    r.summary.emplace_back("union_bound", union_bound);
    r.summary.emplace_back("lower_bound", lower_bound);
  }
  r.summary.emplace_back("predicted", std::exp2(-a.N * E));
  return {std::move(r), kOk};
}

// ------------------------------------------------------------------ verify

inline std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

inline CommandResult cmd_verify(const VerifyArgs& a, const GlobalConfig& g) {
  if (!(a.epsilon >= 0.0 && a.epsilon < 1.0)) throw DomainError("verify: epsilon must lie in [0,1)");
  const auto X = io::load_code(a.file);
  verifier::BadCountReport rep;
  if (a.mode == "sampled") {
    rep = verifier::count_bad_sampled(X, a.s, a.L, a.samples, a.seed, g.worker_count());
  } else {
    try {
      rep = verifier::count_bad(X, a.s, a.L, a.budget, g.worker_count());
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(std::string(e.what()) + " (--mode sampled)");
    }
  }
  const bool pass = rep.epsilon <= a.epsilon;

  Report r;
  r.command = "verify";
  r.parameters = {{"file", a.file},          {"s", std::int64_t{a.s}}, {"L", std::int64_t{a.L}},
                  {"epsilon", a.epsilon},   {"mode", a.mode}};
  if (rep.sampled) r.parameters.emplace_back("seed", static_cast<std::int64_t>(a.seed));
  r.columns = {"N", "t", "s", "L", "mode", "bad", "good", "total", "epsilon", "stderr", "threshold", "pass",
               "witness_S", "witness_Lambda"};
  r.add_row({std::int64_t{X.rows()}, std::int64_t{X.cols()}, std::int64_t{a.s}, std::int64_t{a.L}, a.mode,
             static_cast<std::int64_t>(rep.bad), static_cast<std::int64_t>(rep.good),
             static_cast<std::int64_t>(rep.total), rep.epsilon, rep.sampled ? Value(rep.stderr_) : Value{},
             a.epsilon, pass, rep.witness ? Value(join(rep.witness->S)) : Value{},
             rep.witness ? Value(join(rep.witness->Lambda)) : Value{}});
  r.summary = {{"epsilon", rep.epsilon}, {"result", std::string(pass ? "pass" : "fail")}};
  return {std::move(r), pass ? kOk : kVerifyFail};
}

// --------------------------------------------------------------------- run

inline Format resolve_format(const std::string& f, bool out_is_tty) {
  if (f == "table") return Format::Table;
  if (f == "csv") return Format::Csv;
  if (f == "json") return Format::Json;
  return out_is_tty ? Format::Table : Format::Csv;
}

/// Runs the command line; writes results to `out` (or --output) and
/// diagnostics to `err`. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, bool out_is_tty) {
  CLI::App app{"Random-coding bounds for list-decoding disjunctive codes", "ldlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ldlab 0.1.0");

  GlobalConfig g;
  app.add_option("--format", g.format, "Output format (auto: table on a terminal, else csv)")
      ->check(CLI::IsMember({"auto", "table", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--output,-o", g.output, "Write results to this file");
  app.add_option("--threads", g.threads, "Worker threads (default: LDLAB_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--strict", g.strict, "Tighten tolerances to 1e-13 (roots) and 1e-12 (arguments)");
  app.add_option("--root-tol", g.root_tol, "Root bracket width tolerance")->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--arg-tol", g.arg_tol, "Maximizer argument tolerance")->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--max-iter", g.max_iter, "Root solver iteration limit")->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--grid-points", g.grid_points, "Maximizer grid size")->check(CLI::Range(3, 1 << 20))
      ->capture_default_str();

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Evaluate one analytic bound");
  bound->fallthrough();
  bound->add_option("kind", ba.kind, "capacity | rate | exponent | rcrit | rate-inf")
      ->required()
      ->check(CLI::IsMember({"capacity", "rate", "exponent", "rcrit", "rate-inf"}));
  bound->add_option("--s", ba.s, "Strength")->required();
  bound->add_option("--L", ba.L, "List size");
  bound->add_option("--Q", ba.Q, "Fix the relative column weight instead of optimizing");
  bound->add_option("--R", ba.R, "Rate");
  bound->add_flag("--global", ba.global, "rcrit: breakpoint of the Q-optimized exponent curve");

  Table1Args ta;
  auto* table1 = app.add_subcommand("table1", "Rate and critical-rate table for s,L = 2..10");
  table1->fallthrough();
  table1->add_option("--cells", ta.cells, "all, or a list such as 2_2,9_6,C_3")->capture_default_str();

  CurveArgs ca;
  auto* curve = app.add_subcommand("curve", "Sample the error exponent over a rate grid");
  curve->fallthrough();
  curve->add_option("--s", ca.s, "Strength")->required();
  curve->add_option("--L", ca.L, "List size")->required();
  curve->add_option("--q", ca.q_mode, "fixed | optimize")
      ->check(CLI::IsMember({"fixed", "optimize"}))
      ->capture_default_str();
  curve->add_option("--Q", ca.Q, "Relative column weight for --q fixed");
  curve->add_option("--r-grid", ca.grid, "Rates lo:hi:n")->capture_default_str();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Bad-subset probability of the constant-weight ensemble");
  simulate->fallthrough();
  simulate->add_option("--s", sa.s, "Strength")->required();
  simulate->add_option("--L", sa.L, "List size")->required();
  simulate->add_option("--N", sa.N, "Code length")->required();
  simulate->add_option("--t", sa.t, "Code size");
  simulate->add_option("--R", sa.R, "Rate; code size is 2^(RN) rounded");
  simulate->add_option("--Q", sa.Q, "Relative column weight; w = floor(QN)");
  simulate->add_option("--w", sa.w, "Column weight");
  simulate->add_option("--mode", sa.mode, "exact | mc | both")
      ->check(CLI::IsMember({"exact", "mc", "both"}))
      ->capture_default_str();
  simulate->add_option("--trials", sa.trials, "Monte Carlo trials")->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  simulate->add_option("--rounding", sa.rounding, "ceil | floor for 2^(RN)")
      ->check(CLI::IsMember({"ceil", "floor"}))
      ->capture_default_str();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Count s_L-bad subsets of an explicit code");
  verify->fallthrough();
  verify->add_option("file", va.file, "Code file (text or JSON)")->required();
  verify->add_option("--s", va.s, "Strength")->required();
  verify->add_option("--L", va.L, "List size")->required();
  verify->add_option("--epsilon", va.epsilon, "Largest admissible bad fraction")->capture_default_str();
  verify->add_option("--mode", va.mode, "exact | sampled")
      ->check(CLI::IsMember({"exact", "sampled"}))
      ->capture_default_str();
  verify->add_option("--samples", va.samples, "Subsets drawn in sampled mode")->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--seed", va.seed, "Random seed for sampled mode")->capture_default_str();
  verify->add_option("--budget", va.budget, "Largest C(t,s) enumerated in exact mode")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CommandResult res;
    if (*bound) res = cmd_bound(ba, g);
    else if (*table1) res = cmd_table1(ta, g);
    else if (*curve) res = cmd_curve(ca, g);
    else if (*simulate) res = cmd_simulate(sa, g);
    else res = cmd_verify(va, g);

    if (!g.output.empty()) {
      std::ofstream f(g.output);
      if (!f) {
        err << "error: cannot open " << g.output << " for writing\n";
        return kUsage;
      }
      write_report(res.report, resolve_format(g.format, false), f);
    } else {
      write_report(res.report, resolve_format(g.format, out_is_tty), out);
    }
    return res.status;
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n"
        << "  root tolerance " << g.bound_options().root.tol << ", argument tolerance "
        << g.bound_options().maximize.tol << ", iteration limit " << g.max_iter << "\n";
    return kNumeric;
  }
}

} // namespace ldlab::cli

#endif // LDLAB_CLI_APP_HPP
