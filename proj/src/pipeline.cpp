#include "tou/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "tou/dependence.hpp"
#include "tou/errors.hpp"

namespace tou {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto y = parse_int<int>(text.substr(0, 4));
  const auto m = parse_int<unsigned>(text.substr(5, 2));
  const auto d = parse_int<unsigned>(text.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{*m}, std::chrono::day{*d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

PriceSeries::PriceSeries(std::vector<Date> dates, std::vector<double> prices)
    : dates_(std::move(dates)), prices_(std::move(prices)) {
  if (dates_.size() != prices_.size()) throw Error(ErrorKind::InvalidParameter, "PriceSeries: length mismatch");
  for (std::size_t i = 0; i < prices_.size(); ++i) {
    if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i]))
      throw Error(ErrorKind::InvalidParameter, "PriceSeries: prices must be positive and finite");
    if (i > 0 && !(dates_[i - 1] < dates_[i]))
      throw Error(ErrorKind::InvalidParameter, "PriceSeries: dates must be strictly increasing");
  }
}

SamplePath PriceSeries::log_prices() const {
  if (prices_.empty()) throw Error(ErrorKind::EmptyInput, "PriceSeries: no observations");
  std::vector<double> z(prices_.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::log(prices_[i]);
  return SamplePath(0.0, 1.0, std::move(z));
}

PriceSeries read_csv(std::istream& in) {
  std::vector<Date> dates;
  std::vector<double> prices;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ParseError(lineno, "expected two comma-separated fields");
    const auto date_field = trim(text.substr(0, comma));
    const auto price_field = trim(text.substr(comma + 1));
    if (price_field.find(',') != std::string_view::npos) throw ParseError(lineno, "expected two comma-separated fields");
    const auto date = parse_date(date_field);
    const auto price = parse_double(price_field);
    if (first_content) {
      first_content = false;
      if (!date && !price) continue;  // header
    }
    if (!date) throw ParseError(lineno, "invalid date '" + std::string(date_field) + "'");
    if (!price || !std::isfinite(*price)) throw ParseError(lineno, "invalid price '" + std::string(price_field) + "'");
    if (!(*price > 0.0)) throw ParseError(lineno, "non-positive price");
    if (!dates.empty() && !(dates.back() < *date)) throw ParseError(lineno, "dates not strictly increasing");
    dates.push_back(*date);
    prices.push_back(*price);
  }
  if (prices.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");
  return PriceSeries(std::move(dates), std::move(prices));
}

PriceSeries load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const PriceSeries& series) {
  out << "date,price\n";
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, series.prices()[i]);
    out << format_date(series.dates()[i]) << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  }
}

SamplePath log_returns(const SamplePath& levels, std::size_t delta) {
  if (delta == 0) throw Error(ErrorKind::Domain, "log_returns: delta must be >= 1");
  if (delta >= levels.size()) throw Error(ErrorKind::Domain, "log_returns: delta must be < series length");
  const auto& z = levels.values();
  std::vector<double> r(z.size() - delta);
  for (std::size_t t = delta; t < z.size(); ++t) r[t - delta] = z[t] - z[t - delta];
  return SamplePath(levels.time(delta), levels.dt(), std::move(r));
}

SamplePath log_returns(const PriceSeries& series, std::size_t delta) {
  if (delta == 0) throw Error(ErrorKind::Domain, "log_returns: delta must be >= 1");
  if (delta >= series.size()) throw Error(ErrorKind::Domain, "log_returns: delta must be < series length");
  return log_returns(series.log_prices(), delta);
}

std::vector<SamplePath> split_blocks(const SamplePath& series, std::size_t block_len) {
  if (block_len == 0) throw Error(ErrorKind::InvalidParameter, "split_blocks: block_len must be >= 1");
  std::vector<SamplePath> blocks;
  const auto& v = series.values();
  for (std::size_t start = 0; start + block_len <= v.size(); start += block_len) {
    blocks.emplace_back(series.time(start), series.dt(),
                        std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(start),
                                            v.begin() + static_cast<std::ptrdiff_t>(start + block_len)));
  }
  return blocks;
}

namespace {

std::optional<double> lag_spearman(const std::vector<double>& w, std::size_t k) {
  const std::size_t m = w.size() - k;
  try {
    return spearman_rho(std::span<const double>(w.data(), m), std::span<const double>(w.data() + k, m));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UndefinedCorrelation) return std::nullopt;
    throw;
  }
}

}  // namespace

SpearmanProfile spearman_profile(const SamplePath& series, std::size_t k_max, ProfileMode mode, std::size_t delta,
                                 std::optional<std::size_t> block_len) {
  SpearmanProfile prof;
  prof.mode = mode;
  prof.delta = delta;
  auto omit = [&](std::size_t k, const std::string& why) {
    prof.warnings.push_back("k=" + std::to_string(k) + " omitted: " + why);
  };

  if (mode == ProfileMode::Levels && block_len) {
    prof.block_len = block_len;
    prof.block_averaged = true;
    const auto blocks = split_blocks(series, *block_len);
    for (std::size_t k = 0; k <= k_max; ++k) {
      if (blocks.empty() || *block_len < k + 3) {
        omit(k, "fewer than 3 pairs per block");
        continue;
      }
      std::vector<double> row;
      double sum = 0.0;
      std::size_t used = 0;
      for (const auto& b : blocks) {
        const auto r = k == 0 ? std::optional<double>(1.0) : lag_spearman(b.values(), k);
        row.push_back(r ? *r : std::numeric_limits<double>::quiet_NaN());
        if (r) {
          sum += *r;
          ++used;
        }
      }
      if (used == 0) {
        omit(k, "constant data in every block");
        continue;
      }
      prof.points.push_back({k, sum / static_cast<double>(used), (*block_len - k) * used, used});
      prof.per_block.push_back(std::move(row));
    }
    return prof;
  }

  std::vector<double> w;
  if (mode == ProfileMode::Increments) {
    if (delta == 0) throw Error(ErrorKind::Domain, "spearman_profile: increments need delta >= 1");
    if (delta < series.size()) w = log_returns(series, delta).values();
  } else {
    w = series.values();
  }
  for (std::size_t k = 0; k <= k_max; ++k) {
    if (w.size() < k + 3) {
      omit(k, "fewer than 3 pairs");
      continue;
    }
    const auto r = k == 0 ? std::optional<double>(1.0) : lag_spearman(w, k);
    if (!r) {
      omit(k, "constant data");
      continue;
    }
    prof.points.push_back({k, *r, w.size() - k, 0});
  }
  return prof;
}

nlohmann::json to_json(const SpearmanProfile& profile) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : profile.points)
    pts.push_back({{"k", p.k}, {"rho_s", p.rho_s}, {"n_pairs", p.n_pairs}, {"n_blocks", p.n_blocks}});
  nlohmann::json j{{"mode", profile.mode == ProfileMode::Levels ? "levels" : "increments"},
                   {"block_averaged", profile.block_averaged},
                   {"points", pts},
                   {"warnings", profile.warnings}};
  if (profile.mode == ProfileMode::Increments) j["delta"] = profile.delta;
  if (profile.block_len) j["block_len"] = *profile.block_len;
  return j;
}

void AnalysisConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParameter, "config: " + what); };
  for (auto d : delta_list)
    if (d == 0) fail("delta_list entries must be >= 1");
  if (k_max == 0) fail("k_max must be >= 1");
  if (block_len < 20) fail("block_len must be >= 20");
  for (double f : tail_fractions)
    if (!(f > 0.0 && f < 1.0)) fail("tail_fractions must lie in (0, 1)");
  if (gof_stride == 0) fail("gof_stride must be >= 1");
  if (gof_offset == 0) fail("gof_offset must be >= 1");
  if (n_bootstrap < 100) fail("n_bootstrap must be >= 100");
  if (!(r2_threshold > 0.0 && r2_threshold <= 1.0)) fail("r2_threshold must lie in (0, 1]");
}

nlohmann::json AnalysisConfig::to_json() const {
  return {{"delta_list", delta_list},   {"k_max", k_max},         {"block_len", block_len},
          {"tail_fractions", tail_fractions}, {"gof_stride", gof_stride}, {"gof_offset", gof_offset},
          {"n_bootstrap", n_bootstrap}, {"r2_threshold", r2_threshold}, {"seed", seed.seed},
          {"stream_id", seed.stream_id}};
}

AnalysisConfig AnalysisConfig::from_json(const nlohmann::json& j) {
  AnalysisConfig c;
  if (!j.is_object()) throw Error(ErrorKind::InvalidParameter, "config: expected a JSON object");
  try {
    if (j.contains("delta_list")) c.delta_list = j.at("delta_list").get<std::vector<std::size_t>>();
    if (j.contains("k_max")) c.k_max = j.at("k_max").get<std::size_t>();
    if (j.contains("block_len")) c.block_len = j.at("block_len").get<std::size_t>();
    if (j.contains("tail_fractions")) c.tail_fractions = j.at("tail_fractions").get<std::vector<double>>();
    if (j.contains("gof_stride")) c.gof_stride = j.at("gof_stride").get<std::size_t>();
    if (j.contains("gof_offset")) c.gof_offset = j.at("gof_offset").get<std::size_t>();
    if (j.contains("n_bootstrap")) c.n_bootstrap = j.at("n_bootstrap").get<std::size_t>();
    if (j.contains("r2_threshold")) c.r2_threshold = j.at("r2_threshold").get<double>();
    if (j.contains("seed")) c.seed.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("stream_id")) c.seed.stream_id = j.at("stream_id").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidParameter, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

template <typename F>
TailCell tail_cell(F&& estimate) {
  TailCell cell;
  try {
    const TailEstimate e = estimate();
    cell.value = e.index;
    cell.k_used = e.k_used;
    cell.r_squared = e.r_squared;
  } catch (const Error& e) {
    cell.error = to_string(e.kind());
  }
  return cell;
}

nlohmann::json cell_json(const TailCell& c) {
  nlohmann::json j{{"value", c.value ? nlohmann::json(*c.value) : nlohmann::json(nullptr)}, {"k", c.k_used}};
  if (c.r_squared) {
    j["r_squared"] = *c.r_squared;
    j["poor_fit"] = c.poor_fit;
  }
  if (c.error) j["error"] = *c.error;
  return j;
}

}  // namespace

TailReport run_tail_report(const SamplePath& log_levels, const AnalysisConfig& config) {
  config.validate();
  TailReport report;
  report.r2_threshold = config.r2_threshold;
  for (std::size_t delta : config.delta_list) {
    std::optional<SamplePath> inc;
    std::string failure;
    try {
      inc = log_returns(log_levels, delta);
    } catch (const Error& e) {
      failure = to_string(e.kind());
    }
    for (Side side : {Side::Left, Side::Right}) {
      TailRow row;
      row.delta = delta;
      row.side = side;
      if (!inc) {
        TailCell bad;
        bad.error = failure;
        for (double f : config.tail_fractions) row.loglog.emplace_back(f, bad);
        row.hill2 = row.hill5 = bad;
        report.rows.push_back(std::move(row));
        continue;
      }
      const auto& data = inc->values();
      row.n = data.size();
      for (double f : config.tail_fractions) {
        TailCell cell = tail_cell([&] { return loglog_tail_fit(data, side, f); });
        if (cell.r_squared) cell.poor_fit = *cell.r_squared < config.r2_threshold;
        row.loglog.emplace_back(f, cell);
      }
      row.hill2 = tail_cell([&] { return hill_estimator(data, side, 2.0); });
      row.hill5 = tail_cell([&] { return hill_estimator(data, side, 5.0); });
      row.plot = tail_plot_points(data, side);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

nlohmann::json to_json(const TailReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json ll = nlohmann::json::array();
    for (const auto& [f, c] : r.loglog) {
      auto cj = cell_json(c);
      cj["fraction"] = f;
      ll.push_back(cj);
    }
    rows.push_back({{"delta", r.delta},
                    {"side", to_string(r.side)},
                    {"n", r.n},
                    {"loglog", ll},
                    {"hill_2pct", cell_json(r.hill2)},
                    {"hill_5pct", cell_json(r.hill5)}});
  }
  return {{"r2_threshold", report.r2_threshold}, {"rows", rows}};
}

SimulatedDataset simulate_dataset(const OUParams& params, const TransformSpec& h, std::size_t n, double dt,
                                  RngSeed seed) {
  SamplePath x = simulate_stationary(params, n, dt, seed);
  std::vector<double> y(x.size());
  std::vector<std::size_t> saturated;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto a = h.apply(x.values()[i]);
    y[i] = a.value;
    if (a.saturated) saturated.push_back(i);
  }
  nlohmann::json meta{{"alpha", params.alpha()},
                      {"tau", params.tau()},
                      {"n", n},
                      {"dt", dt},
                      {"t0", x.t0()},
                      {"seed", seed.seed},
                      {"stream_id", seed.stream_id},
                      {"rng", Rng::kAlgorithm},
                      {"transform", h.to_json()},
                      {"saturated_count", saturated.size()}};
  SamplePath ypath(x.t0(), x.dt(), std::move(y));
  return {std::move(x), std::move(ypath), std::move(saturated), std::move(meta)};
}

PriceSeries synthetic_prices(const SamplePath& y, Date start) {
  using std::chrono::sys_days;
  using std::chrono::weekday;
  if (!start.ok()) throw Error(ErrorKind::InvalidParameter, "synthetic_prices: invalid start date");
  std::vector<Date> dates;
  std::vector<double> prices;
  sys_days day{start};
  for (double v : y.values()) {
    while (weekday{day} == std::chrono::Saturday || weekday{day} == std::chrono::Sunday) day += std::chrono::days{1};
    dates.emplace_back(day);
    prices.push_back(std::exp(v));
    day += std::chrono::days{1};
  }
  return PriceSeries(std::move(dates), std::move(prices));
}

}  // namespace tou
