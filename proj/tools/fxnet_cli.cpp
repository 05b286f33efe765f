// fxnet: batch pipeline from hourly FX quotes to community statistics.
//
// Every stage reads the artifacts of the stages before it from --out and writes
// its own there, so stages can be run one at a time or chained with `run`.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fxnet/fxnet.hpp"

using namespace fxnet;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitMissingInput = 66;

const std::vector<std::string> kStages{"ingest", "networks", "sweep", "detect", "events",
                                       "roles",  "mst",      "shuffle-test", "carry"};

// Sub-seed streams, one per stage, all derived from --seed.
enum Stream : std::uint64_t { kSweepStream = 1, kDetectStream, kShuffleStream, kSynthStream };

struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string input;
  std::string rates;
  std::string out = "fxnet_out";
  std::size_t T = 200;
  std::size_t dt = 20;
  std::optional<double> gamma;
  std::string grid;
  std::string heuristic = "greedy";
  std::string null_model = "ng";
  std::uint64_t seed = 1;
  unsigned threads = default_threads();
  std::string stage = "carry";
  std::string hours = "7:18";
  int utc_offset = 0;
  bool exclude_weekends = false;
  bool self_edges = false;
  std::size_t realizations = 100;
  std::string numeraire = "USD";
  // synth only
  std::vector<std::string> currencies{"AUD", "CAD", "CHF", "EUR", "GBP", "JPY", "NOK", "NZD", "SEK", "USD", "XAU"};
  std::size_t steps = 1000;
  std::string groups;
  double gaps = 0.0;
};

void note(const std::string& stage, const std::string& msg) { std::cerr << "fxnet: " << stage << ": " << msg << '\n'; }

std::string artifact(const Settings& s, const std::string& name) { return (fs::path(s.out) / name).string(); }

const std::string& require(const std::string& path, const std::string& what) {
  if (path.empty()) throw MissingInput("no " + what + " given");
  if (!fs::is_regular_file(path)) throw MissingInput(what + " not found: " + path);
  return path;
}

std::string numbered(const std::string& stem, std::size_t w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.csv", stem.c_str(), w);
  return buf;
}

std::vector<double> parse_fields(const std::string& text, std::size_t count, const std::string& flag) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ':')) v.push_back(io::parse_double(part, flag));
  if (v.size() != count) throw Error(ErrorKind::Configuration, flag + " expects " + std::to_string(count) + " ':'-separated numbers");
  return v;
}

std::vector<double> grid_of(const Settings& s) {
  if (s.grid.empty()) return default_grid();
  const auto g = parse_fields(s.grid, 3, "--gamma-grid");
  return make_grid_range(g[0], g[1], g[2]);
}

HourlyConfig hourly_of(const Settings& s) {
  const auto h = parse_fields(s.hours, 2, "--hours");
  HourlyConfig cfg;
  cfg.liquid_lo = static_cast<int>(h[0]);
  cfg.liquid_hi = static_cast<int>(h[1]);
  if (cfg.liquid_lo < 0 || cfg.liquid_hi > 23 || cfg.liquid_lo > cfg.liquid_hi) {
    throw Error(ErrorKind::Configuration, "--hours must satisfy 0 <= lo <= hi <= 23");
  }
  cfg.utc_offset_minutes = s.utc_offset;
  cfg.exclude_weekends = s.exclude_weekends;
  return cfg;
}

NullModel null_of(const Settings& s) {
  if (s.null_model == "ng") return NullModel::NewmanGirvan;
  if (s.null_model == "uniform") return NullModel::Uniform;
  throw Error(ErrorKind::Configuration, "unknown null model " + s.null_model);
}

ReturnPanel load_panel(const Settings& s) { return io::read_panel(require(artifact(s, "panel.csv"), "panel (run ingest)")); }

NetworkSequence load_sequence(const Settings& s) {
  return build_sequence(load_panel(s), s.T, s.dt, s.self_edges, s.threads);
}

// Explicit --gamma wins; otherwise the resolution chosen by the sweep stage.
double resolution_of(const Settings& s) {
  if (s.gamma) return *s.gamma;
  return io::read_plateaus(require(artifact(s, "plateaus.csv"), "plateau report (run sweep or pass --gamma)")).fixed_gamma;
}

// --- stages -------------------------------------------------------------------------

void ingest(const Settings& s) {
  const auto quotes = io::read_quotes(require(s.input, "quote file (--input)"));
  const auto cfg = hourly_of(s);
  RatePanel rates;
  rates.base = bucket_hourly(quotes, cfg);
  io::Derivation derivation;
  derivation.numeraire = s.numeraire;
  std::set<std::string> quoted;
  for (const auto& [name, q] : rates.base) {
    derivation.base.push_back(name);
    quoted.insert(name);
    quoted.insert(inverse_label(name));
  }
  // Crosses through the numeraire, except pairs that were quoted directly.
  for (const auto& rule : numeraire_cross_rules(derivation.base, s.numeraire)) {
    if (!quoted.count(rule.target)) derivation.rules.push_back(rule);
  }
  rates.rules = derivation.rules;
  const auto panel = expand_inverses(build_return_panel(rates.derive_all(), hourly_axis(rates.base, cfg)));
  io::write_panel(artifact(s, "panel.csv"), panel, s.seed);
  io::write_derivation(artifact(s, "derivation.csv"), derivation);
  note("ingest", std::to_string(panel.size()) + " rates over " + std::to_string(panel.length()) + " hours, " +
                     std::to_string(panel.dropped) + " hours dropped");
}

void networks(const Settings& s) {
  const auto seq = load_sequence(s);
  io::write_network_stats(artifact(s, "networks.csv"), seq, s.seed);
  note("networks", std::to_string(seq.networks.size()) + " windows");
}

void sweep_stage(const Settings& s) {
  const auto seq = load_sequence(s);
  const auto grid = grid_of(s);
  const auto heuristic = parse_heuristic(s.heuristic);
  const auto null = null_of(s);
  fs::create_directories(artifact(s, "sweeps"));
  std::vector<std::optional<Plateau>> mains(seq.networks.size());
  parallel_for(seq.networks.size(), s.threads, [&](std::size_t w) {
    SweepOptions opt;
    opt.heuristic = heuristic;
    opt.seed = mix_seed(mix_seed(s.seed, kSweepStream), w);
    opt.null = null;
    const auto& net = seq.networks[w];
    const auto sw = sweep(net, grid, opt);
    io::write_sweep(artifact(s, "sweeps/" + numbered("window", w)), sw, w, s.seed);
    mains[w] = main_plateau(find_plateaus(sw), net.n());
  });
  std::vector<io::PlateauRow> rows;
  for (std::size_t w = 0; w < mains.size(); ++w) rows.push_back({w, seq.networks[w].start_time, mains[w]});
  const double fixed = s.gamma ? *s.gamma : fixed_resolution(mains, grid);
  io::write_plateaus(artifact(s, "plateaus.csv"), rows, fixed, s.seed);
  note("sweep", std::to_string(grid.size()) + " resolutions per window, fixed gamma " + io::format_double(fixed));
}

void detect(const Settings& s) {
  const auto seq = load_sequence(s);
  const double gamma = resolution_of(s);
  const auto heuristic = parse_heuristic(s.heuristic);
  const auto null = null_of(s);
  io::PartitionSequence out;
  out.gamma = gamma;
  out.method = to_string(heuristic);
  out.labels = seq.networks.front().labels;
  out.partitions.resize(seq.networks.size());
  out.scaled_energies.resize(seq.networks.size());
  parallel_for(seq.networks.size(), s.threads, [&](std::size_t w) {
    const auto model = EnergyModel::from_network(seq.networks[w], gamma, null);
    out.partitions[w] = minimize(model, heuristic, mix_seed(mix_seed(s.seed, kDetectStream), w));
    out.scaled_energies[w] = scaled_energy(model, out.partitions[w]);
  });
  for (const auto& net : seq.networks) out.start_times.push_back(net.start_time);
  io::write_partitions(artifact(s, "partitions.csv"), out, s.seed);
  note("detect", std::to_string(out.partitions.size()) + " partitions at gamma " + io::format_double(gamma));
}

io::PartitionSequence load_partitions(const Settings& s) {
  return io::read_partitions(require(artifact(s, "partitions.csv"), "partitions (run detect)"));
}

void events(const Settings& s) {
  const auto seq = load_partitions(s);
  const auto ev = detect_events(seq.partitions);
  io::write_events(artifact(s, "events.csv"), ev, seq.start_times, s.seed);
  auto out = io::open_out(artifact(s, "autocorrelation.csv"));
  out << io::header_line({"autocorrelation", io::kFormatVersion, {{"seed", std::to_string(s.seed)}}}) << '\n';
  out << "window,start_time,node,a\n";
  for (std::size_t w = 1; w < seq.partitions.size(); ++w) {
    const auto a = node_autocorrelations(seq.partitions[w - 1], seq.partitions[w]);
    for (std::size_t i = 0; i < a.size(); ++i) {
      out << w << ',' << seq.start_times[w] << ',' << seq.labels[i] << ',' << io::format_double(a[i]) << '\n';
    }
  }
  note("events", std::to_string(ev.flagged[3].size()) + " windows above 4 sigma");
}

void roles(const Settings& s) {
  const auto parts = load_partitions(s);
  const auto seq = load_sequence(s);
  if (parts.partitions.size() != seq.networks.size() || parts.labels != seq.networks.front().labels) {
    throw Error(ErrorKind::Schema, "partitions do not match the current panel and window settings");
  }
  const auto null = null_of(s);
  std::vector<std::vector<RoleRecord>> per_window(seq.networks.size());
  parallel_for(seq.networks.size(), s.threads, [&](std::size_t w) {
    const auto model = EnergyModel::from_network(seq.networks[w], parts.gamma, null);
    per_window[w] = compute_roles(seq.networks[w], model, parts.partitions[w], w);
  });
  std::vector<RoleRecord> records;
  for (auto& v : per_window) records.insert(records.end(), v.begin(), v.end());
  io::write_roles(artifact(s, "roles.csv"), records, parts.labels, parts.gamma, s.seed);
  io::write_role_aggregates(artifact(s, "role_aggregates.csv"), aggregate_roles(records, Bucketing{}), parts.labels, s.seed);
  note("roles", std::to_string(records.size()) + " node records");
}

void mst_stage(const Settings& s) {
  const auto seq = load_sequence(s);
  fs::create_directories(artifact(s, "mst"));
  parallel_for(seq.networks.size(), s.threads, [&](std::size_t w) {
    const auto& net = seq.networks[w];
    const Matrix d = ultrametric_distance(net.rho);
    io::write_tree(artifact(s, "mst/" + numbered("tree", w)), mst(d), net.labels, w);
    io::write_dendrogram(artifact(s, "mst/" + numbered("single", w)), linkage(d, LinkageMode::Single), "single", w);
    io::write_dendrogram(artifact(s, "mst/" + numbered("average", w)), linkage(d, LinkageMode::Average), "average", w);
  });
  note("mst", std::to_string(seq.networks.size()) + " trees and dendrograms");
}

void shuffle_test(const Settings& s) {
  const auto panel = load_panel(s);
  const auto derivation = io::read_derivation(require(artifact(s, "derivation.csv"), "derivation (run ingest)"));
  const double gamma = resolution_of(s);
  PermutationOptions opt;
  opt.T = s.T;
  opt.step = s.dt;
  opt.heuristic = parse_heuristic(s.heuristic);
  opt.null = null_of(s);
  opt.self_edges = s.self_edges;
  opt.threads = s.threads;
  const ShuffleSpec spec{derivation.base, derivation.rules, s.realizations, mix_seed(s.seed, kShuffleStream)};
  const auto rep = permutation_test(panel, spec, gamma, opt);
  io::write_significance(artifact(s, "significance.csv"), rep);
  note("shuffle-test", "p = " + io::format_double(rep.p_value) + " over " + std::to_string(rep.realizations) + " realizations");
}

void carry(const Settings& s) {
  const auto panel = load_panel(s);
  const auto table = io::read_rates(require(s.rates, "interest rate file (--rates)"));
  const auto index = carry_trade_index(panel, table.as_of(panel.times), s.numeraire);
  io::write_carry(artifact(s, "carry.csv"), index, panel.times);
  note("carry", "final index " + io::format_double(index.upsilon.back()));
}

void run_stage(const std::string& name, const Settings& s) {
  fs::create_directories(s.out);
  if (name == "ingest") ingest(s);
  else if (name == "networks") networks(s);
  else if (name == "sweep") sweep_stage(s);
  else if (name == "detect") detect(s);
  else if (name == "events") events(s);
  else if (name == "roles") roles(s);
  else if (name == "mst") mst_stage(s);
  else if (name == "shuffle-test") shuffle_test(s);
  else if (name == "carry") carry(s);
  else throw Error(ErrorKind::Configuration, "unknown stage " + name);
}

// --- synthetic inputs -------------------------------------------------------------------

std::vector<FactorGroup> synth_groups(const Settings& s) {
  std::vector<FactorGroup> out;
  if (s.groups.empty()) {
    // Blocks of three with loadings falling from 0.85.
    for (std::size_t left = s.currencies.size(), k = 0; left > 0; ++k) {
      const std::size_t m = std::min<std::size_t>(3, left);
      out.push_back({m, std::max(0.0, 0.85 - 0.1 * static_cast<double>(k)), {}, {}, 0.0});
      left -= m;
    }
    return out;
  }
  std::stringstream in(s.groups);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto f = parse_fields(part, 2, "--groups");
    if (f[0] < 1) throw Error(ErrorKind::Configuration, "--groups sizes must be positive");
    out.push_back({static_cast<std::size_t>(f[0]), f[1], {}, {}, 0.0});
  }
  return out;
}

// Quotes for every currency against the numeraire, one per liquid hour, plus daily
// interest rates and a config file that points `run` at both.
void synth(const Settings& s) {
  const auto& ccy = s.currencies;
  if (std::find(ccy.begin(), ccy.end(), s.numeraire) == ccy.end()) {
    throw Error(ErrorKind::Configuration, "numeraire " + s.numeraire + " is not among --currencies");
  }
  FactorModelSpec spec;
  spec.groups = synth_groups(s);
  spec.T = s.steps;
  spec.seed = mix_seed(s.seed, kSynthStream);
  spec.scale = 1e-3;
  if (spec.size() != ccy.size()) throw Error(ErrorKind::Configuration, "--groups must cover every currency");
  const Matrix u = factor_model_matrix(spec);
  const auto cfg = hourly_of(s);

  std::vector<std::int64_t> hours;
  for (std::int64_t h = calendar::days_from_civil(2000, 1, 3) * 24; hours.size() < s.steps + 1; ++h) {
    if (cfg.keeps(h)) hours.push_back(h);
  }
  Rng rng(mix_seed(spec.seed, 1));
  std::vector<Quote> quotes;
  const auto num = static_cast<std::size_t>(std::find(ccy.begin(), ccy.end(), s.numeraire) - ccy.begin());
  for (std::size_t c = 0; c < ccy.size(); ++c) {
    if (c == num) continue;
    const std::string label = ccy[c] + "/" + s.numeraire;
    double log_price = std::log(0.5 + 0.25 * static_cast<double>(c));
    for (std::size_t t = 0; t <= s.steps; ++t) {
      if (t > 0) log_price += u(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t - 1)) -
                              u(static_cast<Eigen::Index>(num), static_cast<Eigen::Index>(t - 1));
      if (s.gaps > 0.0 && uniform_real(rng) < s.gaps) continue;
      const double mid = std::exp(log_price);
      // Posted half past the hour before the label hour, in UTC.
      const std::int64_t seconds = (hours[t] - 1) * 3600 + 1800 - 60LL * s.utc_offset;
      quotes.push_back({seconds, label, mid * (1 - 1e-4), mid * (1 + 1e-4)});
    }
  }
  std::stable_sort(quotes.begin(), quotes.end(), [](const Quote& a, const Quote& b) { return a.epoch_seconds < b.epoch_seconds; });

  io::RateTable rates;
  std::normal_distribution<double> step(0.0, 2e-4);
  const std::int64_t first_day = calendar::floor_div(hours.front(), 24), last_day = calendar::floor_div(hours.back(), 24);
  for (std::size_t c = 0; c < ccy.size(); ++c) {
    double r = 0.005 + 0.0075 * static_cast<double>(c);
    for (std::int64_t d = first_day; d <= last_day; ++d) {
      rates.series[ccy[c]].emplace_back(d * 24, r);
      r = std::max(0.0, r + step(rng));
    }
  }
  fs::create_directories(s.out);
  const auto quotes_path = fs::absolute(artifact(s, "quotes.csv")).string();
  const auto rates_path = fs::absolute(artifact(s, "rates.csv")).string();
  io::write_quotes(quotes_path, quotes);
  io::write_rates(rates_path, rates);
  auto conf = io::open_out(artifact(s, "fxnet.ini"));
  conf << "# fxnet run configuration\n";
  conf << "input = \"" << quotes_path << "\"\n";
  conf << "rates = \"" << rates_path << "\"\n";
  conf << "seed = " << s.seed << "\n";
  conf << "hours = \"" << s.hours << "\"\n";
  conf << "utc-offset = " << s.utc_offset << "\n";
  note("synth", std::to_string(quotes.size()) + " quotes for " + std::to_string(ccy.size() - 1) + " base rates");
}

int guarded(const std::string& stage, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const MissingInput& e) {
    note(stage, e.what());
    return kExitMissingInput;
  } catch (const std::exception& e) {
    note(stage, e.what());
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlation networks and Potts communities for FX return panels"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  Settings s;
  std::optional<double> gamma;
  app.add_option("--input", s.input, "raw quotes: timestamp,instrument,bid,ask");
  app.add_option("--rates", s.rates, "interest rates: date,currency,rate");
  app.add_option("--out", s.out, "artifact directory")->capture_default_str();
  app.add_option("--T", s.T, "window length in returns")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--dt", s.dt, "window step in returns")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--gamma", gamma, "fixed resolution; overrides the sweep's choice");
  app.add_option("--gamma-grid", s.grid, "resolution grid lo:step:hi (default 100 points from 0.6 by 0.015)");
  app.add_option("--heuristic", s.heuristic, "greedy, anneal, spectral or brute")->capture_default_str();
  app.add_option("--null", s.null_model, "null model: ng or uniform")->capture_default_str();
  app.add_option("--seed", s.seed, "master seed")->capture_default_str();
  app.add_option("--threads", s.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--hours", s.hours, "liquid local hours lo:hi, inclusive")->capture_default_str();
  app.add_option("--utc-offset", s.utc_offset, "local time offset from UTC in minutes")->capture_default_str();
  app.add_flag("--exclude-weekends", s.exclude_weekends, "drop Saturday and Sunday hours");
  app.add_flag("--self-edges", s.self_edges, "keep unit self-edges in every network");
  app.add_option("--realizations", s.realizations, "shuffled panels for the significance test")->capture_default_str();
  app.add_option("--numeraire", s.numeraire, "currency the crosses are derived through")->capture_default_str();

  auto* run = app.add_subcommand("run", "run the stages in order, stopping after --stage")->fallthrough();
  run->add_option("--stage", s.stage, "last stage to run")->capture_default_str()->check(CLI::IsMember(kStages));
  std::vector<CLI::App*> singles;
  const std::vector<std::string> help{"hourly panel with inverse rates from raw quotes",
                                      "per-window network summary",
                                      "resolution sweep and plateau report per window",
                                      "partitions at the fixed resolution",
                                      "partition changes between windows and node autocorrelation",
                                      "betweenness, community centrality and z-scores",
                                      "spanning trees and linkage dendrograms per window",
                                      "significance against shuffled panels",
                                      "carry trade index from interest rates"};
  for (std::size_t k = 0; k < kStages.size(); ++k) singles.push_back(app.add_subcommand(kStages[k], help[k])->fallthrough());
  auto* synth_cmd = app.add_subcommand("synth", "write synthetic quotes, rates and a run config")->fallthrough();
  synth_cmd->add_option("--currencies", s.currencies, "currency codes")->delimiter(',');
  synth_cmd->add_option("--steps", s.steps, "hourly returns to generate")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--groups", s.groups, "factor groups size:loading,... in currency order");
  synth_cmd->add_option("--gaps", s.gaps, "probability that a quote is missing")->check(CLI::Range(0.0, 0.5));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  s.gamma = gamma;

  if (synth_cmd->parsed()) return guarded("synth", [&] { synth(s); });
  if (run->parsed()) {
    const auto last = std::find(kStages.begin(), kStages.end(), s.stage);
    for (auto it = kStages.begin(); it != last + 1; ++it) {
      if (*it == "carry" && s.rates.empty()) {
        note("carry", "skipped, no --rates given");
        continue;
      }
      if (const int code = guarded(*it, [&] { run_stage(*it, s); })) return code;
    }
    return 0;
  }
  for (std::size_t k = 0; k < kStages.size(); ++k) {
    if (singles[k]->parsed()) return guarded(kStages[k], [&] { run_stage(kStages[k], s); });
  }
  return kExitFailure;
}
