#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fxnet/centrality.hpp"
#include "fxnet/common.hpp"
#include "fxnet/mstree.hpp"
#include "fxnet/panel.hpp"
#include "fxnet/partcmp.hpp"
#include "fxnet/potts.hpp"
#include "fxnet/resolution.hpp"
#include "fxnet/sigtest.hpp"

namespace fxnet::io {

inline constexpr int kFormatVersion = 1;

// First line of every artifact: "# fxnet-<kind> v<version> key=value ...".
struct Header {
  std::string kind;
  int version = kFormatVersion;
  std::map<std::string, std::string> fields;

  const std::string& at(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorKind::Schema, kind + " header lacks " + key);
    return it->second;
  }
};

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string header_line(const Header& h) {
  std::string line = "# fxnet-" + h.kind + " v" + std::to_string(h.version);
  for (const auto& [k, v] : h.fields) line += " " + k + "=" + v;
  return line;
}

inline Header parse_header(const std::string& line, const std::string& expected_kind) {
  std::istringstream in(line);
  std::string hash, tag, version;
  in >> hash >> tag >> version;
  if (hash != "#" || tag.rfind("fxnet-", 0) != 0) throw Error(ErrorKind::Schema, "missing format header");
  Header h;
  h.kind = tag.substr(6);
  if (h.kind != expected_kind) throw Error(ErrorKind::Schema, "expected a " + expected_kind + " file, found " + h.kind);
  if (version.size() < 2 || version[0] != 'v') throw Error(ErrorKind::Schema, "malformed version in header");
  h.version = std::stoi(version.substr(1));
  if (h.version != kFormatVersion) throw Error(ErrorKind::Schema, "unsupported " + h.kind + " version " + version);
  std::string kv;
  while (in >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Schema, "malformed header field " + kv);
    h.fields[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return h;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    std::string_view cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    out.emplace_back(cell);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error(ErrorKind::Schema, where + ": not a number: '" + s + "'");
  return v;
}

inline std::int64_t parse_int(const std::string& s, const std::string& where) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error(ErrorKind::Schema, where + ": not an integer: '" + s + "'");
  return v;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  return out;
}

// Reads the header line plus data lines (blank and further '#' lines skipped).
struct Table {
  Header header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline Table read_table(const std::string& path, const std::string& kind) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Schema, path + " is empty");
  Table t;
  t.header = parse_header(line, kind);
  bool have_columns = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto cells = split(line);
    if (!have_columns) {
      t.columns = std::move(cells);
      have_columns = true;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw Error(ErrorKind::Schema, path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) + " fields");
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_columns) throw Error(ErrorKind::Schema, path + " has no column header");
  return t;
}

inline void expect_columns(const Table& t, const std::vector<std::string>& expected, const std::string& path) {
  if (t.columns.size() < expected.size() || !std::equal(expected.begin(), expected.end(), t.columns.begin())) {
    std::string want;
    for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
    throw Error(ErrorKind::Schema, path + ": columns must start with " + want);
  }
}

// "2004-03-01T13:05:00Z", "2004-03-01 13:05:00" or integer epoch seconds.
inline std::int64_t parse_timestamp(const std::string& s) {
  if (!s.empty() && s.find_first_not_of("0123456789-") == std::string::npos && s.find('-', 1) == std::string::npos) {
    return parse_int(s, "timestamp");
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  char sep = 0;
  const int got = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &sec);
  if (got < 3 || (got > 3 && got < 6) || (got >= 4 && sep != 'T' && sep != ' ')) {
    throw Error(ErrorKind::Schema, "unrecognised timestamp '" + s + "'");
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60) {
    throw Error(ErrorKind::Schema, "timestamp out of range '" + s + "'");
  }
  return calendar::days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 + h * 3600 + mi * 60 + sec;
}

// Raw quotes: timestamp,instrument,bid,ask (a header row is required; '#' lines ignored).
inline std::vector<Quote> read_quotes(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<Quote> out;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto cells = split(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (!header) {
      if (cells.size() != 4 || cells[0] != "timestamp" || cells[1] != "instrument" || cells[2] != "bid" || cells[3] != "ask") {
        throw Error(ErrorKind::Schema, where + ": expected header timestamp,instrument,bid,ask");
      }
      header = true;
      continue;
    }
    if (cells.size() != 4) throw Error(ErrorKind::Schema, where + ": expected 4 fields");
    out.push_back({parse_timestamp(cells[0]), cells[1], parse_double(cells[2], where), parse_double(cells[3], where)});
  }
  if (!header) throw Error(ErrorKind::Schema, path + ": no header row");
  return out;
}

inline void write_quotes(const std::string& path, const std::vector<Quote>& quotes) {
  auto out = open_out(path);
  out << "timestamp,instrument,bid,ask\n";
  for (const auto& q : quotes) out << q.epoch_seconds << ',' << q.instrument << ',' << format_double(q.bid) << ',' << format_double(q.ask) << '\n';
}

// Interest rates in long format: date,currency,rate with annualized decimal rates.
// Dates may carry a time of day; each row holds from its hour until the next row.
struct RateTable {
  std::map<std::string, std::vector<std::pair<std::int64_t, double>>> series;  // epoch hour, rate

  // Most recent rate at or before each requested hour, per currency.
  std::map<std::string, std::vector<double>> as_of(const std::vector<std::int64_t>& times) const {
    std::map<std::string, std::vector<double>> out;
    for (const auto& [ccy, points] : series) {
      auto& v = out[ccy];
      std::size_t k = 0;
      for (auto t : times) {
        while (k + 1 < points.size() && points[k + 1].first <= t) ++k;
        if (points.empty() || points[k].first > t) {
          throw Error(ErrorKind::Alignment, ccy + ": no interest rate at or before hour " + std::to_string(t));
        }
        v.push_back(points[k].second);
      }
    }
    return out;
  }
};

inline RateTable read_rates(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  RateTable t;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto cells = split(line);
    const std::string where = path + ":" + std::to_string(lineno);
    if (!header) {
      if (cells.size() != 3 || cells[0] != "date" || cells[1] != "currency" || cells[2] != "rate") {
        throw Error(ErrorKind::Schema, where + ": expected header date,currency,rate");
      }
      header = true;
      continue;
    }
    if (cells.size() != 3) throw Error(ErrorKind::Schema, where + ": expected 3 fields");
    const auto hour = calendar::floor_div(parse_timestamp(cells[0]), 3600);
    t.series[cells[1]].emplace_back(hour, parse_double(cells[2], where));
  }
  if (!header) throw Error(ErrorKind::Schema, path + ": no header row");
  for (auto& [ccy, points] : t.series) {
    std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return t;
}

inline void write_rates(const std::string& path, const RateTable& table) {
  auto out = open_out(path);
  out << "date,currency,rate\n";
  for (const auto& [ccy, points] : table.series) {
    for (const auto& [hour, rate] : points) out << hour * 3600 << ',' << ccy << ',' << format_double(rate) << '\n';
  }
}

// Which panel rates are quoted data and how the crosses were built from them.
struct Derivation {
  std::string numeraire = "USD";
  std::vector<std::string> base;
  std::vector<DerivationRule> rules;
};

inline void write_derivation(const std::string& path, const Derivation& d) {
  auto out = open_out(path);
  out << header_line({"derivation", kFormatVersion, {{"numeraire", d.numeraire}}}) << '\n';
  out << "kind,target,numerator,denominator\n";
  for (const auto& b : d.base) out << "base," << b << ",,\n";
  for (const auto& r : d.rules) out << "cross," << r.target << ',' << r.numerator << ',' << r.denominator << '\n';
}

inline Derivation read_derivation(const std::string& path) {
  const auto t = read_table(path, "derivation");
  expect_columns(t, {"kind", "target", "numerator", "denominator"}, path);
  Derivation d;
  d.numeraire = t.header.at("numeraire");
  for (const auto& r : t.rows) {
    if (r[0] == "base") d.base.push_back(r[1]);
    else if (r[0] == "cross") d.rules.push_back({r[1], r[2], r[3]});
    else throw Error(ErrorKind::Schema, path + ": unknown row kind " + r[0]);
  }
  if (d.base.empty()) throw Error(ErrorKind::Schema, path + ": no base rates");
  return d;
}

inline void write_panel(const std::string& path, const ReturnPanel& panel, std::uint64_t seed) {
  auto out = open_out(path);
  out << header_line({"panel", kFormatVersion, {{"dropped", std::to_string(panel.dropped)}, {"seed", std::to_string(seed)}}}) << '\n';
  out << "time";
  for (const auto& name : panel.instruments) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < panel.length(); ++t) {
    out << panel.times[t];
    for (std::size_t i = 0; i < panel.size(); ++i) {
      out << ',' << format_double(panel.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)));
    }
    out << '\n';
  }
}

inline ReturnPanel read_panel(const std::string& path) {
  const auto t = read_table(path, "panel");
  expect_columns(t, {"time"}, path);
  if (t.columns.size() < 2) throw Error(ErrorKind::Schema, path + ": panel has no instruments");
  ReturnPanel panel;
  panel.instruments.assign(t.columns.begin() + 1, t.columns.end());
  panel.dropped = static_cast<std::size_t>(parse_int(t.header.at("dropped"), path));
  panel.returns.resize(static_cast<Eigen::Index>(panel.instruments.size()), static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    panel.times.push_back(parse_int(t.rows[r][0], path));
    if (r > 0 && panel.times[r] <= panel.times[r - 1]) throw Error(ErrorKind::Schema, path + ": times must increase");
    for (std::size_t i = 0; i < panel.instruments.size(); ++i) {
      panel.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = parse_double(t.rows[r][i + 1], path);
    }
  }
  if (panel.times.empty()) throw Error(ErrorKind::EmptyPanel, path + ": no rows");
  return panel;
}

// Network sequence summary: one row per window.
inline void write_network_stats(const std::string& path, const NetworkSequence& seq, std::uint64_t seed) {
  auto out = open_out(path);
  out << header_line({"networks", kFormatVersion,
                      {{"T", std::to_string(seq.T)}, {"step", std::to_string(seq.step)}, {"seed", std::to_string(seed)}}})
      << '\n';
  out << "window,start_time,two_m,mean_weight,std_weight\n";
  for (std::size_t w = 0; w < seq.networks.size(); ++w) {
    const auto& net = seq.networks[w];
    const auto st = edge_weight_stats(net);
    out << w << ',' << net.start_time << ',' << format_double(net.two_m) << ',' << format_double(st.mean) << ','
        << format_double(st.stddev) << '\n';
  }
}

inline void write_sweep(const std::string& path, const ResolutionSweep& sw, std::size_t window, std::uint64_t seed) {
  auto out = open_out(path);
  out << header_line({"sweep", kFormatVersion, {{"window", std::to_string(window)}, {"seed", std::to_string(seed)}}}) << '\n';
  out << "gamma,n_communities,entropy,modularity,energy,dH_dgamma,vhat_prev\n";
  for (const auto& s : sw.stats) {
    out << format_double(s.gamma) << ',' << s.n_communities << ',' << format_double(s.entropy) << ','
        << format_double(s.modularity) << ',' << format_double(s.energy) << ',' << format_double(s.dH_dgamma) << ','
        << format_double(s.vhat_prev) << '\n';
  }
}

inline std::vector<SweepPoint> read_sweep(const std::string& path) {
  const auto t = read_table(path, "sweep");
  expect_columns(t, {"gamma", "n_communities", "entropy", "modularity", "energy", "dH_dgamma", "vhat_prev"}, path);
  std::vector<SweepPoint> out;
  for (const auto& r : t.rows) {
    out.push_back({parse_double(r[0], path), static_cast<std::size_t>(parse_int(r[1], path)), parse_double(r[2], path),
                   parse_double(r[3], path), parse_double(r[4], path), parse_double(r[5], path), parse_double(r[6], path)});
  }
  return out;
}

// Main plateau per window (empty fields when a window has none).
struct PlateauRow {
  std::size_t window = 0;
  std::int64_t start_time = 0;
  std::optional<Plateau> main;
};

inline void write_plateaus(const std::string& path, const std::vector<PlateauRow>& rows, double fixed_gamma,
                           std::uint64_t seed) {
  auto out = open_out(path);
  out << header_line({"plateaus", kFormatVersion, {{"fixed_gamma", format_double(fixed_gamma)}, {"seed", std::to_string(seed)}}})
      << '\n';
  out << "window,start_time,gamma_lo,gamma_hi,n_communities\n";
  for (const auto& r : rows) {
    out << r.window << ',' << r.start_time << ',';
    if (r.main) {
      out << format_double(r.main->gamma_lo) << ',' << format_double(r.main->gamma_hi) << ',' << r.main->n_communities;
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

struct PlateauReport {
  double fixed_gamma = 0.0;
  std::vector<PlateauRow> rows;
};

inline PlateauReport read_plateaus(const std::string& path) {
  const auto t = read_table(path, "plateaus");
  expect_columns(t, {"window", "start_time", "gamma_lo", "gamma_hi", "n_communities"}, path);
  PlateauReport rep;
  rep.fixed_gamma = parse_double(t.header.at("fixed_gamma"), path);
  for (const auto& r : t.rows) {
    PlateauRow row;
    row.window = static_cast<std::size_t>(parse_int(r[0], path));
    row.start_time = parse_int(r[1], path);
    if (!r[2].empty()) {
      Plateau p;
      p.gamma_lo = parse_double(r[2], path);
      p.gamma_hi = parse_double(r[3], path);
      p.n_communities = static_cast<std::size_t>(parse_int(r[4], path));
      row.main = p;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

// Partition sequence at a fixed resolution: window,start_time,node,community,
// with per-window energies in a trailing summary table.
struct PartitionSequence {
  double gamma = 0.0;
  std::string method;
  std::vector<std::string> labels;
  std::vector<std::int64_t> start_times;
  std::vector<Partition> partitions;
  std::vector<double> scaled_energies;
};

inline void write_partitions(const std::string& path, const PartitionSequence& seq, std::uint64_t seed) {
  auto out = open_out(path);
  out << header_line({"partitions", kFormatVersion,
                      {{"gamma", format_double(seq.gamma)}, {"method", seq.method}, {"seed", std::to_string(seed)},
                       {"windows", std::to_string(seq.partitions.size())}}})
      << '\n';
  out << "window,start_time,node,community,energy,scaled_energy\n";
  for (std::size_t w = 0; w < seq.partitions.size(); ++w) {
    const auto& p = seq.partitions[w];
    for (std::size_t i = 0; i < p.n(); ++i) {
      out << w << ',' << seq.start_times[w] << ',' << seq.labels[i] << ',' << p.assignment[i] << ','
          << format_double(p.energy) << ',' << format_double(seq.scaled_energies[w]) << '\n';
    }
  }
}

inline PartitionSequence read_partitions(const std::string& path) {
  const auto t = read_table(path, "partitions");
  expect_columns(t, {"window", "start_time", "node", "community", "energy", "scaled_energy"}, path);
  PartitionSequence seq;
  seq.gamma = parse_double(t.header.at("gamma"), path);
  seq.method = t.header.at("method");
  const auto windows = static_cast<std::size_t>(parse_int(t.header.at("windows"), path));
  std::vector<std::vector<int>> assignments(windows);
  std::vector<double> energies(windows, 0.0);
  seq.start_times.assign(windows, 0);
  seq.scaled_energies.assign(windows, 0.0);
  for (const auto& r : t.rows) {
    const auto w = static_cast<std::size_t>(parse_int(r[0], path));
    if (w >= windows) throw Error(ErrorKind::Schema, path + ": window index out of range");
    if (w == 0) seq.labels.push_back(r[2]);
    else if (assignments[w].size() >= seq.labels.size() || seq.labels[assignments[w].size()] != r[2]) {
      throw Error(ErrorKind::Schema, path + ": node order differs between windows");
    }
    seq.start_times[w] = parse_int(r[1], path);
    assignments[w].push_back(static_cast<int>(parse_int(r[3], path)));
    energies[w] = parse_double(r[4], path);
    seq.scaled_energies[w] = parse_double(r[5], path);
  }
  for (std::size_t w = 0; w < windows; ++w) {
    if (assignments[w].size() != seq.labels.size()) throw Error(ErrorKind::Schema, path + ": incomplete window " + std::to_string(w));
    auto p = Partition::from_assignment(assignments[w], seq.method);
    if (p.assignment != assignments[w]) throw Error(ErrorKind::Schema, path + ": community ids are not canonical");
    p.gamma = seq.gamma;
    p.energy = energies[w];
    seq.partitions.push_back(std::move(p));
  }
  return seq;
}

inline void write_events(const std::string& path, const EventSeries& ev, const std::vector<std::int64_t>& start_times,
                         std::uint64_t seed) {
  auto out = open_out(path);
  out << header_line({"events", kFormatVersion,
                      {{"mean", format_double(ev.mean)}, {"stddev", format_double(ev.stddev)}, {"seed", std::to_string(seed)}}})
      << '\n';
  out << "window,start_time,vhat,level\n";
  for (std::size_t k = 0; k < ev.vhat.size(); ++k) {
    out << ev.windows[k] << ',' << start_times.at(ev.windows[k]) << ',' << format_double(ev.vhat[k]) << ',' << ev.level(k) << '\n';
  }
}

inline void write_roles(const std::string& path, const std::vector<RoleRecord>& records,
                        const std::vector<std::string>& labels, double gamma, std::uint64_t seed) {
  auto out = open_out(path);
  out << header_line({"roles", kFormatVersion, {{"gamma", format_double(gamma)}, {"seed", std::to_string(seed)}}}) << '\n';
  out << "window,start_time,node,community,community_size,b,x_norm,y,cos_theta,zb,zy\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : records) {
    out << r.window << ',' << r.time << ',' << labels.at(r.node) << ',' << r.community << ',' << r.community_size << ','
        << format_double(r.b) << ',' << format_double(r.x_norm) << ',' << format_double(r.y) << ','
        << format_double(r.cos_theta) << ',' << opt(r.zb) << ',' << opt(r.zy) << '\n';
  }
}

inline void write_role_aggregates(const std::string& path, const std::vector<RoleAggregate>& rows,
                                  const std::vector<std::string>& labels, std::uint64_t seed) {
  auto out = open_out(path);
  out << header_line({"role-aggregates", kFormatVersion, {{"seed", std::to_string(seed)}}}) << '\n';
  out << "node,bucket,count_zb,mean_zb,sd_zb,count_zy,mean_zy,sd_zy\n";
  for (const auto& r : rows) {
    out << labels.at(r.node) << ',' << r.bucket << ',' << r.zb.count << ',' << format_double(r.zb.mean) << ','
        << format_double(r.zb.stddev) << ',' << r.zy.count << ',' << format_double(r.zy.mean) << ','
        << format_double(r.zy.stddev) << '\n';
  }
}

inline void write_tree(const std::string& path, const SpanningTree& tree, const std::vector<std::string>& labels,
                       std::size_t window) {
  auto out = open_out(path);
  out << header_line({"tree", kFormatVersion,
                      {{"window", std::to_string(window)}, {"total_weight", format_double(tree.total_weight)}}})
      << '\n';
  out << "from,to,distance\n";
  for (const auto& e : tree.edges) out << labels.at(e.i) << ',' << labels.at(e.j) << ',' << format_double(e.d) << '\n';
}

inline void write_dendrogram(const std::string& path, const Dendrogram& dendrogram, std::string_view mode,
                             std::size_t window) {
  auto out = open_out(path);
  out << header_line({"dendrogram", kFormatVersion, {{"mode", std::string(mode)}, {"window", std::to_string(window)}}}) << '\n';
  out << "step,cluster_a,cluster_b,distance,size\n";
  for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
    const auto& m = dendrogram.merges[k];
    out << k << ',' << m.a << ',' << m.b << ',' << format_double(m.distance) << ',' << m.size << '\n';
  }
}

inline void write_significance(const std::string& path, const SignificanceReport& rep) {
  auto out = open_out(path);
  out << header_line({"significance", kFormatVersion, {}}) << '\n';
  out << "key,value\n";
  out << "gamma," << format_double(rep.gamma) << '\n';
  out << "windows," << rep.windows << '\n';
  out << "realizations," << rep.realizations << '\n';
  out << "seed," << rep.seed << '\n';
  out << "observed_mean," << format_double(rep.observed_mean) << '\n';
  out << "observed_stddev," << format_double(rep.observed_stddev) << '\n';
  out << "shuffled_mean," << format_double(rep.shuffled_mean) << '\n';
  out << "shuffled_stddev," << format_double(rep.shuffled_stddev) << '\n';
  out << "p_value," << format_double(rep.p_value) << '\n';
}

inline std::map<std::string, std::string> read_key_values(const std::string& path, const std::string& kind) {
  const auto t = read_table(path, kind);
  expect_columns(t, {"key", "value"}, path);
  std::map<std::string, std::string> out;
  for (const auto& r : t.rows) out[r[0]] = r[1];
  return out;
}

inline void write_carry(const std::string& path, const CarryIndex& carry, const std::vector<std::int64_t>& times) {
  auto out = open_out(path);
  out << header_line({"carry", kFormatVersion, {}}) << '\n';
  out << "time,upsilon,longs,shorts\n";
  out << "start," << format_double(carry.upsilon[0]) << ",,\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
    return s;
  };
  for (std::size_t t = 0; t < times.size(); ++t) {
    out << times[t] << ',' << format_double(carry.upsilon[t + 1]) << ',' << join(carry.longs[t]) << ','
        << join(carry.shorts[t]) << '\n';
  }
}

}  // namespace fxnet::io
