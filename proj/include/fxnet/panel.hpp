#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fxnet/calendar.hpp"
#include "fxnet/common.hpp"

namespace fxnet {

// Bid/ask quotes for one instrument on an epoch-hour axis.
struct QuoteSeries {
  std::string instrument;  // "XXX/YYY"
  std::vector<std::int64_t> timestamps;
  std::vector<double> bid;
  std::vector<double> ask;

  std::size_t size() const { return timestamps.size(); }

  void validate() const {
    if (bid.size() != timestamps.size() || ask.size() != timestamps.size()) {
      throw Error(ErrorKind::InvalidInput, instrument + ": bid/ask/timestamp lengths differ");
    }
    for (std::size_t t = 0; t < size(); ++t) {
      if (t > 0 && timestamps[t] <= timestamps[t - 1]) {
        throw Error(ErrorKind::InvalidInput, instrument + ": timestamps not strictly increasing");
      }
      if (!(bid[t] > 0.0) || !(ask[t] > 0.0)) {
        throw Error(ErrorKind::InvalidInput, instrument + ": non-positive price");
      }
      if (bid[t] > ask[t]) {
        throw Error(ErrorKind::InvalidInput, instrument + ": bid above ask");
      }
    }
  }
};

inline std::vector<double> mid_price(const QuoteSeries& q) {
  std::vector<double> mid(q.size());
  for (std::size_t t = 0; t < q.size(); ++t) mid[t] = 0.5 * (q.bid[t] + q.ask[t]);
  return mid;
}

// Return at t is defined iff the price is present at both t and t-1.
inline std::vector<std::optional<double>> log_returns(std::span<const std::optional<double>> prices) {
  std::vector<std::optional<double>> out(prices.size());
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (prices[t] && !(*prices[t] > 0.0)) {
      throw Error(ErrorKind::InvalidInput, "non-positive price at step " + std::to_string(t));
    }
    if (t > 0 && prices[t] && prices[t - 1]) out[t] = std::log(*prices[t] / *prices[t - 1]);
  }
  return out;
}

inline std::vector<std::optional<double>> log_returns(std::span<const double> prices) {
  std::vector<std::optional<double>> present(prices.begin(), prices.end());
  return log_returns(std::span<const std::optional<double>>(present));
}

// --- instrument labels -------------------------------------------------------

inline std::pair<std::string, std::string> split_label(std::string_view label) {
  const auto slash = label.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == label.size() ||
      label.find('/', slash + 1) != std::string_view::npos) {
    throw Error(ErrorKind::InvalidInput, "instrument label must be XXX/YYY: " + std::string(label));
  }
  return {std::string(label.substr(0, slash)), std::string(label.substr(slash + 1))};
}

inline std::string inverse_label(std::string_view label) {
  auto [base, quote] = split_label(label);
  return quote + "/" + base;
}

// For labels forming complete inverse pairs, maps each node to its inverse node.
inline std::vector<std::size_t> inverse_involution(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  std::vector<std::size_t> inv(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = index.find(inverse_label(labels[i]));
    if (it == index.end()) throw Error(ErrorKind::InvalidInput, "no inverse for " + labels[i]);
    inv[i] = it->second;
  }
  return inv;
}

// --- cross rates -------------------------------------------------------------

inline QuoteSeries derive_cross(const QuoteSeries& numerator, const QuoteSeries& denominator,
                                std::string target) {
  const auto num_mid = mid_price(numerator);
  const auto den_mid = mid_price(denominator);
  QuoteSeries out;
  out.instrument = std::move(target);
  std::size_t a = 0, b = 0;
  while (a < numerator.size() && b < denominator.size()) {
    if (numerator.timestamps[a] < denominator.timestamps[b]) {
      ++a;
    } else if (denominator.timestamps[b] < numerator.timestamps[a]) {
      ++b;
    } else {
      const double mid = num_mid[a] / den_mid[b];
      out.timestamps.push_back(numerator.timestamps[a]);
      out.bid.push_back(mid);
      out.ask.push_back(mid);
      ++a;
      ++b;
    }
  }
  if (out.timestamps.empty()) {
    throw Error(ErrorKind::Alignment, out.instrument + ": no shared timestamps between " +
                                          numerator.instrument + " and " + denominator.instrument);
  }
  return out;
}

// target = numerator / denominator in price space; in return space
// R_target = R_numerator - R_denominator.
struct DerivationRule {
  std::string target;
  std::string numerator;
  std::string denominator;
};

// Returns the rules ordered so each rule's inputs are available before it runs.
// Inputs may be known base instruments or targets of other rules.
inline std::vector<DerivationRule> order_rules(const std::set<std::string>& base,
                                               const std::vector<DerivationRule>& rules) {
  std::map<std::string, const DerivationRule*> by_target;
  for (const auto& rule : rules) {
    if (base.count(rule.target)) {
      throw Error(ErrorKind::Configuration, rule.target + " is both a base rate and a derivation target");
    }
    if (!by_target.emplace(rule.target, &rule).second) {
      throw Error(ErrorKind::Configuration, rule.target + " has more than one derivation rule");
    }
  }
  std::vector<DerivationRule> ordered;
  std::map<std::string, int> state;  // 1 = visiting, 2 = done
  std::vector<std::string> stack;
  auto visit = [&](auto&& self, const std::string& name) -> void {
    if (base.count(name)) return;
    auto it = by_target.find(name);
    if (it == by_target.end()) throw Error(ErrorKind::Configuration, "no source for " + name);
    int& s = state[name];
    if (s == 2) return;
    if (s == 1) throw Error(ErrorKind::Configuration, "cyclic derivation involving " + name);
    s = 1;
    self(self, it->second->numerator);
    self(self, it->second->denominator);
    state[name] = 2;
    ordered.push_back(*it->second);
  };
  for (const auto& rule : rules) visit(visit, rule.target);
  return ordered;
}

// YYY/XXX quotes from XXX/YYY: bid' = 1/ask, ask' = 1/bid.
inline QuoteSeries invert_quotes(const QuoteSeries& q) {
  QuoteSeries out;
  out.instrument = inverse_label(q.instrument);
  out.timestamps = q.timestamps;
  for (std::size_t t = 0; t < q.size(); ++t) {
    out.bid.push_back(1.0 / q.ask[t]);
    out.ask.push_back(1.0 / q.bid[t]);
  }
  return out;
}

// Crosses X/Y (X < Y, neither the numeraire) as (X/NUM) / (Y/NUM) for every
// currency quoted against the numeraire in `base`.
inline std::vector<DerivationRule> numeraire_cross_rules(const std::vector<std::string>& base,
                                                         const std::string& numeraire = "USD") {
  std::set<std::string> currencies;
  for (const auto& label : base) {
    auto [a, b] = split_label(label);
    if (a == numeraire) currencies.insert(b);
    else if (b == numeraire) currencies.insert(a);
  }
  std::vector<DerivationRule> rules;
  for (const auto& x : currencies) {
    for (const auto& y : currencies) {
      if (x < y) rules.push_back({x + "/" + y, x + "/" + numeraire, y + "/" + numeraire});
    }
  }
  return rules;
}

struct RatePanel {
  std::map<std::string, QuoteSeries> base;
  std::vector<DerivationRule> rules;

  // Base series plus every derived cross rate. Rule inputs may name the inverse
  // of an available series.
  std::map<std::string, QuoteSeries> derive_all() const {
    std::set<std::string> names;
    for (const auto& [name, q] : base) {
      names.insert(name);
      names.insert(inverse_label(name));
    }
    for (const auto& rule : rules) names.erase(rule.target);
    auto all = base;
    auto source = [&](const std::string& name) -> QuoteSeries {
      if (auto it = all.find(name); it != all.end()) return it->second;
      if (auto it = all.find(inverse_label(name)); it != all.end()) return invert_quotes(it->second);
      throw Error(ErrorKind::Configuration, "no source for " + name);
    };
    for (const auto& rule : order_rules(names, rules)) {
      all.emplace(rule.target, derive_cross(source(rule.numerator), source(rule.denominator), rule.target));
    }
    return all;
  }
};

// --- aligned return panel ----------------------------------------------------

struct ReturnPanel {
  std::vector<std::string> instruments;
  std::vector<std::int64_t> times;
  Matrix returns;  // instruments x times
  std::size_t dropped = 0;

  std::size_t size() const { return instruments.size(); }
  std::size_t length() const { return times.size(); }

  std::optional<std::size_t> find(std::string_view label) const {
    for (std::size_t i = 0; i < instruments.size(); ++i) {
      if (instruments[i] == label) return i;
    }
    return std::nullopt;
  }
};

using NamedReturns = std::vector<std::pair<std::string, std::vector<std::optional<double>>>>;

// Keeps exactly the steps where every series has a defined return.
inline ReturnPanel align_panel(const std::vector<std::int64_t>& times, const NamedReturns& series) {
  for (const auto& [name, values] : series) {
    if (values.size() != times.size()) {
      throw Error(ErrorKind::Alignment, name + ": series length differs from the time axis");
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t t = 0; t < times.size(); ++t) {
    bool all = true;
    for (const auto& s : series) all = all && s.second[t].has_value();
    if (all) keep.push_back(t);
  }
  if (keep.empty() || series.empty()) throw Error(ErrorKind::EmptyPanel, "no time step has every return defined");
  ReturnPanel panel;
  panel.dropped = times.size() - keep.size();
  panel.returns.resize(static_cast<Eigen::Index>(series.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < series.size(); ++i) {
    panel.instruments.push_back(series[i].first);
    for (std::size_t c = 0; c < keep.size(); ++c) {
      panel.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = *series[i].second[keep[c]];
    }
  }
  for (auto t : keep) panel.times.push_back(times[t]);
  return panel;
}

inline NamedReturns to_named_returns(const ReturnPanel& panel) {
  NamedReturns out;
  for (std::size_t i = 0; i < panel.size(); ++i) {
    std::vector<std::optional<double>> row(panel.length());
    for (std::size_t t = 0; t < panel.length(); ++t) {
      row[t] = panel.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
    }
    out.emplace_back(panel.instruments[i], std::move(row));
  }
  return out;
}

// Appends YYY/XXX with negated returns for every XXX/YYY.
inline ReturnPanel expand_inverses(const ReturnPanel& panel) {
  std::set<std::string> present(panel.instruments.begin(), panel.instruments.end());
  for (const auto& label : panel.instruments) {
    if (present.count(inverse_label(label))) {
      throw Error(ErrorKind::InvalidInput, label + " already present together with its inverse");
    }
  }
  ReturnPanel out;
  out.times = panel.times;
  out.dropped = panel.dropped;
  out.instruments = panel.instruments;
  for (const auto& label : panel.instruments) out.instruments.push_back(inverse_label(label));
  const auto n = static_cast<Eigen::Index>(panel.size());
  out.returns.resize(2 * n, panel.returns.cols());
  out.returns.topRows(n) = panel.returns;
  out.returns.bottomRows(n) = -panel.returns;
  return out;
}

// --- ingestion of raw quotes ---------------------------------------------------

struct Quote {
  std::int64_t epoch_seconds;
  std::string instrument;
  double bid;
  double ask;
};

struct HourlyConfig {
  int utc_offset_minutes = 0;
  int liquid_lo = 7;   // inclusive local hour
  int liquid_hi = 18;  // inclusive local hour
  bool exclude_weekends = false;

  bool keeps(std::int64_t local_hour) const {
    const int h = calendar::hour_of_day(local_hour);
    if (h < liquid_lo || h > liquid_hi) return false;
    return !(exclude_weekends && calendar::is_weekend_hour(local_hour));
  }
};

// Last posted quote within each local hour, labelled with the following hour
// (the price it represents). Hours outside the liquid window are discarded.
inline std::map<std::string, QuoteSeries> bucket_hourly(std::vector<Quote> quotes, const HourlyConfig& cfg) {
  std::stable_sort(quotes.begin(), quotes.end(),
                   [](const Quote& a, const Quote& b) { return a.epoch_seconds < b.epoch_seconds; });
  std::map<std::string, std::map<std::int64_t, const Quote*>> last;
  for (const auto& q : quotes) {
    const std::int64_t local_seconds = q.epoch_seconds + 60LL * cfg.utc_offset_minutes;
    const std::int64_t label_hour = calendar::floor_div(local_seconds, 3600) + 1;
    if (!cfg.keeps(label_hour)) continue;
    last[q.instrument][label_hour] = &q;
  }
  std::map<std::string, QuoteSeries> out;
  for (const auto& [name, hours] : last) {
    QuoteSeries s;
    s.instrument = name;
    for (const auto& [hour, q] : hours) {
      s.timestamps.push_back(hour);
      s.bid.push_back(q->bid);
      s.ask.push_back(q->ask);
    }
    s.validate();
    out.emplace(name, std::move(s));
  }
  return out;
}

// Every filtered hour between the earliest and latest sampled hour.
inline std::vector<std::int64_t> hourly_axis(const std::map<std::string, QuoteSeries>& series,
                                             const HourlyConfig& cfg) {
  std::int64_t lo = INT64_MAX, hi = INT64_MIN;
  for (const auto& [name, s] : series) {
    if (s.size() == 0) continue;
    lo = std::min(lo, s.timestamps.front());
    hi = std::max(hi, s.timestamps.back());
  }
  std::vector<std::int64_t> axis;
  if (lo > hi) return axis;
  for (std::int64_t h = lo; h <= hi; ++h) {
    if (cfg.keeps(h)) axis.push_back(h);
  }
  return axis;
}

// Mid-price log-returns on the common axis followed by the missing-data rule.
inline ReturnPanel build_return_panel(const std::map<std::string, QuoteSeries>& series,
                                      const std::vector<std::int64_t>& axis) {
  NamedReturns named;
  for (const auto& [name, s] : series) {
    const auto mid = mid_price(s);
    std::vector<std::optional<double>> prices(axis.size());
    std::size_t k = 0;
    for (std::size_t t = 0; t < axis.size(); ++t) {
      while (k < s.size() && s.timestamps[k] < axis[t]) ++k;
      if (k < s.size() && s.timestamps[k] == axis[t]) prices[t] = mid[k];
    }
    named.emplace_back(name, log_returns(std::span<const std::optional<double>>(prices)));
  }
  return align_panel(axis, named);
}

// --- carry trade index ------------------------------------------------------------

struct CarryIndex {
  std::vector<double> upsilon;                 // length times+1, upsilon[0] = 1
  std::vector<std::vector<std::string>> longs;   // per step
  std::vector<std::vector<std::string>> shorts;  // per step
};

// Return of currency vs the numeraire at every panel step, from C/NUM or NUM/C.
inline std::vector<double> currency_log_returns(const ReturnPanel& panel, const std::string& currency,
                                                const std::string& numeraire) {
  std::vector<double> out(panel.length(), 0.0);
  if (currency == numeraire) return out;
  double sign = 1.0;
  auto row = panel.find(currency + "/" + numeraire);
  if (!row) {
    row = panel.find(numeraire + "/" + currency);
    sign = -1.0;
  }
  if (!row) throw Error(ErrorKind::Configuration, "no rate between " + currency + " and " + numeraire);
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = sign * panel.returns(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(t));
  }
  return out;
}

// Long the three highest-rate currencies and short the three lowest, 1/3 each,
// re-ranked at every step from that step's interest rates (ties by name).
inline CarryIndex carry_trade_index(const ReturnPanel& panel,
                                    const std::map<std::string, std::vector<double>>& interest_rates,
                                    const std::string& numeraire = "USD") {
  if (interest_rates.size() < 6) {
    throw Error(ErrorKind::Configuration, "carry index needs at least 6 currencies");
  }
  std::vector<std::string> currencies;
  std::vector<std::vector<double>> returns;
  for (const auto& [ccy, rates] : interest_rates) {
    if (rates.size() != panel.length()) {
      throw Error(ErrorKind::Configuration, ccy + ": interest rates not aligned to panel times");
    }
    currencies.push_back(ccy);
    returns.push_back(currency_log_returns(panel, ccy, numeraire));
  }
  CarryIndex out;
  out.upsilon.assign(panel.length() + 1, 1.0);
  std::vector<std::size_t> order(currencies.size());
  for (std::size_t t = 0; t < panel.length(); ++t) {
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ra = interest_rates.at(currencies[a])[t];
      const double rb = interest_rates.at(currencies[b])[t];
      return ra != rb ? ra > rb : currencies[a] < currencies[b];
    });
    double step = 0.0;
    std::vector<std::string> longs, shorts;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t lo = order[k];
      const std::size_t sh = order[order.size() - 1 - k];
      step += (std::expm1(returns[lo][t]) - std::expm1(returns[sh][t])) / 3.0;
      longs.push_back(currencies[lo]);
      shorts.push_back(currencies[sh]);
    }
    out.upsilon[t + 1] = out.upsilon[t] * (1.0 + step);
    out.longs.push_back(std::move(longs));
    out.shorts.push_back(std::move(shorts));
  }
  return out;
}

}  // namespace fxnet
