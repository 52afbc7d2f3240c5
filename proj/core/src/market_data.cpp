#include "ops_ftrl/market_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "ops_ftrl/errors.hpp"

namespace ops_ftrl {

MarketHistory::MarketHistory(std::vector<PriceVector> rounds)
    : rounds_(std::move(rounds)) {
  if (rounds_.empty()) throw InputError("MarketHistory: no rounds");
  d_ = rounds_.front().size();
  for (std::size_t t = 0; t < rounds_.size(); ++t) {
    if (rounds_[t].size() != d_) {
      throw InputError("MarketHistory: round " + std::to_string(t + 1) +
                       " has dimension " + std::to_string(rounds_[t].size()) +
                       ", expected " + std::to_string(d_));
    }
  }
}

MarketHistory MarketHistory::prefix(std::size_t length) const {
  if (length == 0 || length > rounds_.size()) {
    throw InputError("MarketHistory::prefix: length " + std::to_string(length) +
                     " outside [1, " + std::to_string(rounds_.size()) + "]");
  }
  return MarketHistory(
      std::vector<PriceVector>(rounds_.begin(), rounds_.begin() + length));
}

bool MarketHistory::has_zero_relatives() const noexcept {
  for (const auto& a : rounds_) {
    for (double v : a.entries()) {
      if (v == 0.0) return true;
    }
  }
  return false;
}

std::string_view to_string(MarketKind kind) noexcept {
  switch (kind) {
    case MarketKind::kConstant:
      return "constant";
    case MarketKind::kSingleWinner:
      return "single_winner";
    case MarketKind::kIidUniform:
      return "iid_uniform";
    case MarketKind::kTwoAssetAlternating:
      return "two_asset_alternating";
    case MarketKind::kAdversarialKelly:
      return "adversarial_kelly";
  }
  return "unknown";
}

MarketKind parse_market_kind(std::string_view name) {
  for (MarketKind k : {MarketKind::kConstant, MarketKind::kSingleWinner,
                       MarketKind::kIidUniform, MarketKind::kTwoAssetAlternating,
                       MarketKind::kAdversarialKelly}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown generator '" + std::string(name) +
                    "' (expected constant, single_winner, iid_uniform, "
                    "two_asset_alternating or adversarial_kelly)");
}

double unit_interval_open_closed(std::mt19937_64& rng) noexcept {
  const std::uint64_t u = rng();
  return static_cast<double>((u >> 11) + 1) * 0x1p-53;
}

MarketHistory generate(const GeneratorSpec& spec) {
  if (spec.d < 2) throw ConfigError("generate: d must be at least 2");
  if (spec.T < 1) throw ConfigError("generate: T must be at least 1");

  std::mt19937_64 rng(spec.seed);
  std::vector<PriceVector> rounds;
  rounds.reserve(spec.T);
  Vector raw(spec.d);

  switch (spec.kind) {
    case MarketKind::kConstant: {
      Vector base = spec.base;
      if (base.empty()) {
        base.assign(spec.d, 0.5);
        base[0] = 1.0;
      }
      if (base.size() != spec.d) {
        throw ConfigError("generate: constant base has dimension " +
                          std::to_string(base.size()) + ", expected " +
                          std::to_string(spec.d));
      }
      const PriceVector a = normalize_market(base);
      rounds.assign(spec.T, a);
      break;
    }
    case MarketKind::kSingleWinner: {
      if (spec.winner >= spec.d) {
        throw ConfigError("generate: winner index " + std::to_string(spec.winner) +
                          " out of range for d = " + std::to_string(spec.d));
      }
      for (std::size_t t = 0; t < spec.T; ++t) {
        for (std::size_t i = 0; i < spec.d; ++i) {
          raw[i] = i == spec.winner ? 1.0 : unit_interval_open_closed(rng);
        }
        rounds.push_back(normalize_market(raw));
      }
      break;
    }
    case MarketKind::kIidUniform: {
      for (std::size_t t = 0; t < spec.T; ++t) {
        for (double& v : raw) v = unit_interval_open_closed(rng);
        rounds.push_back(normalize_market(raw));
      }
      break;
    }
    case MarketKind::kTwoAssetAlternating: {
      if (!(spec.epsilon > 0.0 && spec.epsilon <= 1.0)) {
        throw ConfigError("generate: epsilon must lie in (0, 1]");
      }
      for (std::size_t t = 0; t < spec.T; ++t) {
        raw.assign(spec.d, spec.epsilon);
        raw[t % 2] = 1.0;
        rounds.push_back(normalize_market(raw));
      }
      break;
    }
    case MarketKind::kAdversarialKelly: {
      if (!(spec.kelly_ratio > 1.0) || !std::isfinite(spec.kelly_ratio)) {
        throw ConfigError("generate: kelly_ratio must be finite and > 1");
      }
      std::vector<std::uint64_t> phase(spec.d, 0);
      for (std::size_t i = 1; i < spec.d; ++i) phase[i] = rng() & 1u;
      for (std::size_t t = 0; t < spec.T; ++t) {
        raw[0] = 1.0;
        for (std::size_t i = 1; i < spec.d; ++i) {
          raw[i] = ((t + phase[i]) % 2 == 0) ? spec.kelly_ratio
                                             : 1.0 / spec.kelly_ratio;
        }
        rounds.push_back(normalize_market(raw));
      }
      break;
    }
  }
  return MarketHistory(std::move(rounds));
}

// ---------------------------------------------------------------------------
// CSV

std::string_view to_string(CsvMode mode) noexcept {
  return mode == CsvMode::kRelatives ? "relatives" : "raw_prices";
}

CsvMode parse_csv_mode(std::string_view name) {
  if (name == "relatives") return CsvMode::kRelatives;
  if (name == "raw_prices") return CsvMode::kRawPrices;
  throw ConfigError("unknown CSV mode '" + std::string(name) +
                    "' (expected relatives or raw_prices)");
}

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void csv_error(std::string_view source, std::size_t line,
                            std::size_t column, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line;
  if (column > 0) msg << ":" << column;
  msg << ": " << what;
  throw InputError(msg.str());
}

double parse_cell(std::string_view cell, std::string_view source,
                  std::size_t line, std::size_t column) {
  const std::string_view s = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    csv_error(source, line, column,
              "cell '" + std::string(cell) + "' is not a number");
  }
  if (!std::isfinite(value)) {
    csv_error(source, line, column, "cell '" + std::string(cell) + "' is not finite");
  }
  return value;
}

}  // namespace

MarketHistory parse_csv(std::istream& in, CsvMode mode, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t d = 0;
  bool have_header = false;
  std::vector<PriceVector> rounds;
  Vector previous;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);

    if (!have_header) {
      d = cells.size();
      if (d < 2) {
        csv_error(source, line_no, 0,
                  "header lists " + std::to_string(d) +
                      " asset(s); at least 2 are required");
      }
      have_header = true;
      continue;
    }
    if (cells.size() != d) {
      csv_error(source, line_no, 0,
                "row has " + std::to_string(cells.size()) + " cells, header has " +
                    std::to_string(d));
    }
    Vector values(d);
    for (std::size_t j = 0; j < d; ++j) {
      values[j] = parse_cell(cells[j], source, line_no, j + 1);
    }

    if (mode == CsvMode::kRelatives) {
      bool any_positive = false;
      for (std::size_t j = 0; j < d; ++j) {
        if (values[j] < 0.0) {
          csv_error(source, line_no, j + 1, "negative price relative");
        }
        any_positive = any_positive || values[j] > 0.0;
      }
      if (!any_positive) {
        csv_error(source, line_no, 0, "all-zero price relative row");
      }
      rounds.push_back(normalize_market(values));
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        if (!(values[j] > 0.0)) {
          csv_error(source, line_no, j + 1, "raw price must be strictly positive");
        }
      }
      if (!previous.empty()) {
        Vector relatives(d);
        for (std::size_t j = 0; j < d; ++j) relatives[j] = values[j] / previous[j];
        rounds.push_back(normalize_market(relatives));
      }
      previous = std::move(values);
    }
  }

  if (!have_header) csv_error(source, line_no, 0, "missing header row");
  if (rounds.empty()) {
    csv_error(source, line_no, 0,
              mode == CsvMode::kRawPrices
                  ? "raw_prices mode needs at least two price rows"
                  : "no data rows");
  }
  return MarketHistory(std::move(rounds));
}

MarketHistory load_csv(const std::filesystem::path& path, CsvMode mode) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return parse_csv(in, mode, path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InputError("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const MarketHistory& history) {
  for (std::size_t i = 0; i < history.dimension(); ++i) {
    if (i > 0) out << ',';
    out << "asset_" << i;
  }
  out << '\n';
  for (const auto& a : history.rounds()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(a[i]);
    }
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const MarketHistory& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_csv(out, history);
  if (!out) throw InputError("write to '" + path.string() + "' failed");
}

}  // namespace ops_ftrl
