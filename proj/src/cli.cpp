#include "tou/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tou/alpha_estimators.hpp"
#include "tou/dependence.hpp"
#include "tou/errors.hpp"
#include "tou/pipeline.hpp"
#include "tou/validation.hpp"

namespace tou {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

struct Globals {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "tsv";
};

class Context {
 public:
  Context(const Globals& g, const CLI::Option* seed_opt, const CLI::Option* out_dir_opt, std::ostream& out)
      : out_(out) {
    if (!g.config_path.empty()) {
      std::ifstream in(g.config_path);
      if (!in) throw Error(ErrorKind::Io, "cannot open config " + g.config_path);
      try {
        config_ = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, "config " + g.config_path + ": " + e.what());
      }
      if (!config_.is_object()) throw Error(ErrorKind::Parse, "config " + g.config_path + ": expected an object");
    }
    analysis_ = AnalysisConfig::from_json(config_);
    if (seed_opt->count() > 0 || !config_.contains("seed")) analysis_.seed.seed = g.seed;
    out_dir_ = pick(out_dir_opt, g.out_dir, "out_dir");
    format_ = g.format;
  }

  template <typename T>
  T pick(const CLI::Option* opt, const T& cli_value, const char* key) const {
    if (opt->count() > 0 || !config_.contains(key)) return cli_value;
    try {
      return config_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidParameter, std::string("config key '") + key + "': " + e.what());
    }
  }

  [[nodiscard]] const json& config() const { return config_; }
  [[nodiscard]] AnalysisConfig& analysis() { return analysis_; }
  [[nodiscard]] RngSeed seed() const { return analysis_.seed; }
  [[nodiscard]] bool json_format() const { return format_ == "json"; }
  [[nodiscard]] std::ostream& out() const { return out_; }

  void write(const std::string& name, const std::string& content) const {
    fs::create_directories(out_dir_);
    const auto path = out_dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
    f << content;
    if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
    out_ << "wrote " << path.string() << '\n';
  }

  void write_json(const std::string& stem, const json& j) const { write(stem + ".json", j.dump(2) + "\n"); }

 private:
  json config_ = json::object();
  AnalysisConfig analysis_;
  fs::path out_dir_;
  std::string format_;
  std::ostream& out_;
};

PriceSeries load_input(const Context& ctx, const CLI::Option* opt, const std::string& input) {
  const auto path = ctx.pick(opt, input, "input");
  if (path.empty()) throw UsageError("--input is required");
  return load_csv(path);
}

TransformSpec load_transform(const Context& ctx, const CLI::Option* opt, const std::string& cli_value) {
  if (opt->count() == 0 && ctx.config().contains("transform")) {
    const auto& t = ctx.config().at("transform");
    if (t.is_object()) return TransformSpec::from_json(t);
    if (t.is_string() && t.get<std::string>() != "paper") {
      std::ifstream in(t.get<std::string>());
      if (!in) throw Error(ErrorKind::Io, "cannot open transform " + t.get<std::string>());
      return TransformSpec::from_json(json::parse(in));
    }
    return TransformSpec::paper_example();
  }
  if (cli_value == "paper") return TransformSpec::paper_example();
  std::ifstream in(cli_value);
  if (!in) throw Error(ErrorKind::Io, "cannot open transform " + cli_value);
  try {
    return TransformSpec::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, "transform " + cli_value + ": " + e.what());
  }
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  double alpha = 0.05;
  double tau = 1.0;
  std::size_t n = 10000;
  double dt = 1.0;
  std::string transform = "paper";
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* dt_opt = nullptr;
  CLI::Option* transform_opt = nullptr;

  void attach(CLI::App* cmd, std::size_t default_n, double default_tau) {
    n = default_n;
    tau = default_tau;
    alpha_opt = cmd->add_option("--alpha", alpha, "OU drift alpha")->capture_default_str();
    tau_opt = cmd->add_option("--tau", tau, "OU diffusion tau")->capture_default_str();
    n_opt = cmd->add_option("--n", n, "number of observations")->capture_default_str();
    dt_opt = cmd->add_option("--dt", dt, "time step")->capture_default_str();
    transform_opt = cmd->add_option("--transform", transform, "'paper' or a transform JSON file")->capture_default_str();
  }

  SimulatedDataset run(const Context& ctx) const {
    const OUParams p(ctx.pick(alpha_opt, alpha, "alpha"), ctx.pick(tau_opt, tau, "tau"));
    const auto h = load_transform(ctx, transform_opt, transform);
    return simulate_dataset(p, h, ctx.pick(n_opt, n, "n"), ctx.pick(dt_opt, dt, "dt"), ctx.seed());
  }
};

int cmd_simulate(Context& ctx, const SimulateArgs& args) {
  const auto data = args.run(ctx);
  if (ctx.json_format()) {
    ctx.write_json("simulate", {{"metadata", data.metadata},
                                {"x", data.x.values()},
                                {"y", data.y.values()},
                                {"saturated", data.saturated}});
  } else {
    std::ostringstream s;
    s << "t\tx\ty\tsaturated\n";
    std::size_t next_sat = 0;
    for (std::size_t i = 0; i < data.y.size(); ++i) {
      const bool sat = next_sat < data.saturated.size() && data.saturated[next_sat] == i;
      if (sat) ++next_sat;
      s << num(data.y.time(i)) << '\t' << num(data.x.values()[i]) << '\t' << num(data.y.values()[i]) << '\t' << sat
        << '\n';
    }
    ctx.write("simulate.tsv", s.str());
    ctx.write_json("simulate.meta", data.metadata);
  }
  return kExitOk;
}

int cmd_gen_synthetic(Context& ctx, const SimulateArgs& args, const CLI::Option* start_opt, const std::string& start) {
  const auto data = args.run(ctx);
  const auto date = parse_date(ctx.pick(start_opt, start, "start"));
  if (!date) throw Error(ErrorKind::InvalidParameter, "invalid --start date");
  const auto prices = synthetic_prices(data.y, *date);
  std::ostringstream s;
  write_csv(s, prices);
  ctx.write("synthetic.csv", s.str());
  auto meta = data.metadata;
  meta["price"] = "exp(y)";
  meta["start"] = format_date(*date);
  ctx.write_json("synthetic.meta", meta);
  return kExitOk;
}

// returns -------------------------------------------------------------------

int cmd_returns(Context& ctx, const PriceSeries& series, std::size_t delta) {
  const auto r = log_returns(series, delta);
  if (ctx.json_format()) {
    json dates = json::array();
    for (std::size_t i = delta; i < series.size(); ++i) dates.push_back(format_date(series.dates()[i]));
    ctx.write_json("returns", {{"delta", delta}, {"dates", dates}, {"returns", r.values()}});
  } else {
    std::ostringstream s;
    s << "date\treturn\n";
    for (std::size_t i = 0; i < r.size(); ++i)
      s << format_date(series.dates()[i + delta]) << '\t' << num(r.values()[i]) << '\n';
    ctx.write("returns.tsv", s.str());
  }
  return kExitOk;
}

// tails ---------------------------------------------------------------------

std::string cell_tsv(const TailCell& c) { return c.error ? "NA" : num(c.value); }

int cmd_tails(Context& ctx, const PriceSeries& series) {
  const auto report = run_tail_report(series.log_prices(), ctx.analysis());
  if (ctx.json_format()) {
    ctx.write_json("tails", to_json(report));
  } else {
    std::ostringstream s;
    s << "delta\tside\tn";
    for (double f : ctx.analysis().tail_fractions) {
      const auto tag = num(f);
      s << "\tloglog_" << tag << "\tr2_" << tag << "\tpoor_fit_" << tag;
    }
    s << "\thill_2pct\thill_5pct\terrors\n";
    for (const auto& row : report.rows) {
      std::string errors;
      auto note = [&](const char* what, const TailCell& c) {
        if (c.error) errors += (errors.empty() ? "" : ",") + std::string(what) + ":" + *c.error;
      };
      s << row.delta << '\t' << to_string(row.side) << '\t' << row.n;
      for (const auto& [f, c] : row.loglog) {
        s << '\t' << cell_tsv(c) << '\t' << num(c.r_squared) << '\t' << (c.r_squared ? (c.poor_fit ? "1" : "0") : "NA");
        note("loglog", c);
      }
      note("hill_2pct", row.hill2);
      note("hill_5pct", row.hill5);
      s << '\t' << cell_tsv(row.hill2) << '\t' << cell_tsv(row.hill5) << '\t' << (errors.empty() ? "-" : errors)
        << '\n';
    }
    ctx.write("tails.tsv", s.str());
  }
  for (const auto& row : report.rows) {
    std::ostringstream p;
    p << "ln_value\tln_tail_prob\n";
    for (const auto& pt : row.plot) p << num(pt.ln_value) << '\t' << num(pt.ln_tail_prob) << '\n';
    ctx.write("tail_plot_d" + std::to_string(row.delta) + "_" + to_string(row.side) + ".tsv", p.str());
  }
  return kExitOk;
}

// spearman ------------------------------------------------------------------

int cmd_spearman(Context& ctx, const PriceSeries& series, const std::string& mode_name, std::size_t delta,
                 std::size_t k_max, bool pooled, std::ostream& err) {
  ProfileMode mode;
  if (mode_name == "levels") {
    mode = ProfileMode::Levels;
  } else if (mode_name == "increments") {
    mode = ProfileMode::Increments;
  } else {
    throw UsageError("--mode must be 'levels' or 'increments'");
  }
  std::optional<std::size_t> block;
  if (mode == ProfileMode::Levels && !pooled) block = ctx.analysis().block_len;
  const auto prof = spearman_profile(series.log_prices(), k_max, mode, delta, block);
  for (const auto& w : prof.warnings) err << "warning: " << w << '\n';
  const std::string stem = std::string("spearman_") + mode_name;
  if (ctx.json_format()) {
    ctx.write_json(stem, to_json(prof));
  } else {
    std::ostringstream s;
    s << "k\trho_s\tn_pairs\tn_blocks\n";
    for (const auto& p : prof.points) s << p.k << '\t' << num(p.rho_s) << '\t' << p.n_pairs << '\t' << p.n_blocks << '\n';
    ctx.write(stem + ".tsv", s.str());
  }
  return kExitOk;
}

// copula-gof ----------------------------------------------------------------

int cmd_copula_gof(Context& ctx, const PriceSeries& series, std::size_t delta) {
  const auto& cfg = ctx.analysis();
  const auto r = log_returns(series, delta);
  std::vector<Pair> pairs;
  for (std::size_t t = cfg.gof_stride; t + cfg.gof_offset < r.size(); t += cfg.gof_stride)
    pairs.emplace_back(r.values()[t], r.values()[t + cfg.gof_offset]);
  const auto fit = gauss_copula_gof(pairs, cfg.n_bootstrap, ctx.seed());
  auto j = to_json(fit);
  j["delta"] = delta;
  j["stride"] = cfg.gof_stride;
  j["offset"] = cfg.gof_offset;
  if (ctx.json_format()) {
    ctx.write_json("copula_gof", j);
  } else {
    std::ostringstream s;
    s << "key\tvalue\n";
    for (const auto& [key, value] : j.items()) s << key << '\t' << (value.is_number_float() ? num(value.get<double>()) : value.dump()) << '\n';
    ctx.write("copula_gof.tsv", s.str());
  }
  std::ostringstream p;
  p << "u\tv\n";
  for (const auto& [u, v] : pseudo_observations(pairs)) p << num(u) << '\t' << num(v) << '\n';
  ctx.write("pseudo_observations.tsv", p.str());
  return kExitOk;
}

// estimate-alpha ------------------------------------------------------------

int cmd_estimate_alpha(Context& ctx, const PriceSeries& series, const std::vector<std::size_t>& ks,
                       const std::vector<double>& band_levels, std::size_t increments_delta) {
  if (band_levels.size() != 2) throw UsageError("--band takes two F-levels");
  const auto z = series.log_prices();
  std::vector<AlphaEstimate> rows;
  std::vector<std::string> status;
  auto attempt = [&](AlphaMethod method, std::size_t k, auto&& fn) {
    try {
      rows.push_back(fn());
      status.emplace_back(to_string(rows.back().status));
    } catch (const Error& e) {
      AlphaEstimate failed;
      failed.method = method;
      if (k > 0) failed.lag = k;
      rows.push_back(failed);
      status.push_back(std::string("error:") + to_string(e.kind()));
    }
  };
  for (auto k : ks) attempt(AlphaMethod::RankCorr, k, [&] { return alpha_rank(z, k); });
  for (auto k : ks) attempt(AlphaMethod::SignEmpiricalMedian, k, [&] { return alpha_sign_empirical_median(z, k); });
  if (increments_delta > 0)
    for (auto k : ks)
      if (k < increments_delta)
        attempt(AlphaMethod::RankCorrIncrements, k, [&] { return alpha_rank_increments(z, k, increments_delta); });
  attempt(AlphaMethod::BandCrossing, 0, [&] {
    const auto band = BandSpec::from_quantiles(z.values(), band_levels[0], band_levels[1]);
    return alpha_band_crossing(z, band, z.duration());
  });

  if (ctx.json_format()) {
    json arr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto j = to_json(rows[i]);
      j["status"] = status[i];
      arr.push_back(j);
    }
    ctx.write_json("alpha", {{"estimates", arr}});
  } else {
    std::ostringstream s;
    s << "method\tk\tvalue\tstatus\tn_used\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& e = rows[i];
      s << to_string(e.method) << '\t' << (e.lag ? std::to_string(*e.lag) : "NA") << '\t' << num(e.value) << '\t'
        << status[i] << '\t' << e.n_used << '\n';
    }
    ctx.write("alpha.tsv", s.str());
  }
  return kExitOk;
}

// validate ------------------------------------------------------------------

int cmd_validate(Context& ctx, const std::string& suite_name) {
  const auto suite = suite_from_string(suite_name);
  const auto budget =
      ctx.config().contains("budget") ? ValidationBudget::from_json(ctx.config().at("budget")) : ValidationBudget{};
  const auto report = validate_theorems(suite, budget, ctx.seed());
  if (ctx.json_format()) {
    ctx.write_json("validation", to_json(report));
  } else {
    std::ostringstream s;
    s << "suite\tname\tstatistic\ttarget\tlower\tupper\tpass\tdetail\n";
    for (const auto& c : report.checks)
      s << c.suite << '\t' << c.name << '\t' << num(c.statistic) << '\t' << num(c.target) << '\t' << num(c.lower)
        << '\t' << num(c.upper) << '\t' << (c.pass ? "pass" : "FAIL") << '\t' << c.detail << '\n';
    ctx.write("validation.tsv", s.str());
  }
  for (const auto& c : report.checks)
    ctx.out() << (c.pass ? "pass " : "FAIL ") << c.suite << ' ' << c.name << ' ' << num(c.statistic) << '\n';
  return report.all_pass() ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transformed Ornstein-Uhlenbeck toolkit: simulation, tail and dependence analysis, drift estimation"};
  app.name("tou");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--config", g.config_path, "JSON config file; command line flags take precedence");
  auto* out_dir_opt = app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"tsv", "json"}))->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "simulate Y = h(X) for a stationary OU path X");
  SimulateArgs sim_args;
  sim_args.attach(simulate, 10000, 1.0);

  auto* synth = app.add_subcommand("gen-synthetic", "write a synthetic daily price CSV with log price h(X)");
  SimulateArgs synth_args;
  synth_args.attach(synth, 2062, std::sqrt(0.1));
  std::string start = "2003-01-01";
  auto* start_opt = synth->add_option("--start", start, "first date")->capture_default_str();

  std::string input;
  std::size_t delta = 1;
  auto add_input = [&](CLI::App* cmd) { return cmd->add_option("--input", input, "price CSV (date,price)"); };

  auto* returns = app.add_subcommand("returns", "lag-delta log returns of a price series");
  auto* returns_input = add_input(returns);
  auto* returns_delta = returns->add_option("--delta", delta, "lag")->capture_default_str();

  auto* tails = app.add_subcommand("tails", "tail index table and log-log plot data for the increments");
  auto* tails_input = add_input(tails);
  std::vector<std::size_t> delta_list;
  auto* tails_deltas = tails->add_option("--deltas", delta_list, "increment lags (default from config)");

  auto* spearman = app.add_subcommand("spearman", "Spearman's rho profile over lags");
  auto* spearman_input = add_input(spearman);
  std::string mode = "levels";
  std::size_t sp_delta = 20;
  std::size_t k_max = 0;
  std::size_t block_len = 0;
  bool pooled = false;
  auto* mode_opt = spearman->add_option("--mode", mode, "levels or increments")->capture_default_str();
  auto* sp_delta_opt = spearman->add_option("--delta", sp_delta, "increment lag")->capture_default_str();
  auto* kmax_opt = spearman->add_option("--k-max", k_max, "largest lag (default from config)");
  auto* block_opt = spearman->add_option("--block-len", block_len, "block length for levels (default from config)");
  spearman->add_flag("--pooled", pooled, "levels over the whole sample instead of blocks");

  auto* gof = app.add_subcommand("copula-gof", "Gauss copula goodness of fit on rarefied increment pairs");
  auto* gof_input = add_input(gof);
  std::size_t gof_delta = 20;
  std::size_t stride = 0, offset = 0, n_boot = 0;
  auto* gof_delta_opt = gof->add_option("--delta", gof_delta, "increment lag")->capture_default_str();
  auto* stride_opt = gof->add_option("--stride", stride, "keep every stride-th pair (default from config)");
  auto* offset_opt = gof->add_option("--offset", offset, "lag between coordinates (default from config)");
  auto* boot_opt = gof->add_option("--bootstrap", n_boot, "bootstrap replicates (default from config)");

  auto* estimate = app.add_subcommand("estimate-alpha", "drift estimates from log price levels");
  auto* est_input = add_input(estimate);
  std::vector<std::size_t> ks = {5, 10, 15, 20, 25, 30};
  std::vector<double> band = {0.3, 0.7};
  std::size_t inc_delta = 0;
  auto* ks_opt = estimate->add_option("--ks", ks, "lags")->delimiter(',')->capture_default_str();
  auto* band_opt = estimate->add_option("--band", band, "F-levels of the band")->delimiter(',')->capture_default_str();
  auto* inc_opt = estimate->add_option("--increments-delta", inc_delta, "also estimate from lag-delta increments");

  auto* validate = app.add_subcommand("validate", "Monte Carlo validation suites");
  std::string suite = "ALL";
  auto* suite_opt = validate->add_option("--suite", suite, "suite")
                        ->check(CLI::IsMember({"T1", "T2", "T3", "T4", "ALL"}))
                        ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Context ctx(g, seed_opt, out_dir_opt, out);
    auto& cfg = ctx.analysis();
    if (simulate->parsed()) return cmd_simulate(ctx, sim_args);
    if (synth->parsed()) return cmd_gen_synthetic(ctx, synth_args, start_opt, start);
    if (returns->parsed())
      return cmd_returns(ctx, load_input(ctx, returns_input, input), ctx.pick(returns_delta, delta, "delta"));
    if (tails->parsed()) {
      if (tails_deltas->count() > 0) cfg.delta_list = delta_list;
      cfg.validate();
      return cmd_tails(ctx, load_input(ctx, tails_input, input));
    }
    if (spearman->parsed()) {
      if (kmax_opt->count() > 0) cfg.k_max = k_max;
      if (block_opt->count() > 0) cfg.block_len = block_len;
      cfg.validate();
      return cmd_spearman(ctx, load_input(ctx, spearman_input, input), ctx.pick(mode_opt, mode, "mode"),
                          ctx.pick(sp_delta_opt, sp_delta, "delta"), cfg.k_max, pooled, err);
    }
    if (gof->parsed()) {
      if (stride_opt->count() > 0) cfg.gof_stride = stride;
      if (offset_opt->count() > 0) cfg.gof_offset = offset;
      if (boot_opt->count() > 0) cfg.n_bootstrap = n_boot;
      cfg.validate();
      return cmd_copula_gof(ctx, load_input(ctx, gof_input, input), ctx.pick(gof_delta_opt, gof_delta, "delta"));
    }
    if (estimate->parsed())
      return cmd_estimate_alpha(ctx, load_input(ctx, est_input, input), ctx.pick(ks_opt, ks, "ks"),
                                ctx.pick(band_opt, band, "band"), ctx.pick(inc_opt, inc_delta, "increments_delta"));
    if (validate->parsed()) return cmd_validate(ctx, ctx.pick(suite_opt, suite, "suite"));
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace tou
