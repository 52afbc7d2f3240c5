#pragma once

// Market histories: synthetic generators and CSV ingestion.
//
// CSV layout: a header row of asset names (written as asset_0,...,asset_{d-1}),
// then one row per round, comma separated, LF line endings. Doubles are
// written in shortest round-trip form so that load(save(h)) == h exactly.
//
// Random generators draw from std::mt19937_64 seeded with the spec's seed and
// map each 64-bit output u to ((u >> 11) + 1) * 2^-53, a uniform draw on
// (0, 1]. Both steps are fully specified by the C++ standard, so traces
// reproduce bit-for-bit across platforms.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ops_ftrl/simplex.hpp"

namespace ops_ftrl {

class MarketHistory {
 public:
  MarketHistory() = default;
  // InputError on empty input or inconsistent dimensions.
  explicit MarketHistory(std::vector<PriceVector> rounds);

  std::size_t dimension() const noexcept { return d_; }
  std::size_t horizon() const noexcept { return rounds_.size(); }
  const std::vector<PriceVector>& rounds() const noexcept { return rounds_; }
  const PriceVector& operator[](std::size_t t) const noexcept { return rounds_[t]; }

  MarketHistory prefix(std::size_t length) const;
  // True when some asset has a zero price relative in some round, so part of
  // the simplex lies outside the comparator's domain.
  bool has_zero_relatives() const noexcept;

  bool operator==(const MarketHistory&) const = default;

 private:
  std::size_t d_ = 0;
  std::vector<PriceVector> rounds_;
};

enum class MarketKind {
  kConstant,
  kSingleWinner,
  kIidUniform,
  kTwoAssetAlternating,
  kAdversarialKelly,
};

std::string_view to_string(MarketKind kind) noexcept;
// ConfigError on unknown names.
MarketKind parse_market_kind(std::string_view name);

struct GeneratorSpec {
  MarketKind kind = MarketKind::kIidUniform;
  std::size_t d = 2;
  std::size_t T = 1;
  std::uint64_t seed = 0;

  // constant: the repeated raw vector. Empty means (1, 0.5, ..., 0.5).
  Vector base;
  // single_winner: the asset whose relative is 1 every round.
  std::size_t winner = 0;
  // two_asset_alternating: the losing relative, in (0, 1].
  double epsilon = 0.1;
  // adversarial_kelly: swing factor r > 1 of the volatile assets.
  double kelly_ratio = 2.0;
};

// constant          every round is normalize(base).
// single_winner     a(winner) = 1, other entries iid on (0, 1].
// iid_uniform       every entry iid on (0, 1], then normalized.
// two_asset_alternating
//                   odd rounds (1, eps, ..., eps), even rounds
//                   (eps, 1, eps, ..., eps); the seed is unused.
// adversarial_kelly asset 0 is cash; each other asset's raw relative
//                   alternates between r and 1/r with a seed-chosen phase.
//                   No single asset grows, yet a rebalanced mix does.
//
// ConfigError for d < 2, T < 1 or out-of-range kind parameters.
MarketHistory generate(const GeneratorSpec& spec);

// Uniform draw on (0, 1] from one generator output.
double unit_interval_open_closed(std::mt19937_64& rng) noexcept;

enum class CsvMode { kRelatives, kRawPrices };

std::string_view to_string(CsvMode mode) noexcept;
CsvMode parse_csv_mode(std::string_view name);

// InputError with 1-based line/column coordinates for ragged rows,
// non-numeric cells, fewer than two assets, non-positive raw prices and
// all-zero relative rows.
MarketHistory parse_csv(std::istream& in, CsvMode mode,
                        std::string_view source = "<stream>");
MarketHistory load_csv(const std::filesystem::path& path, CsvMode mode);

void write_csv(std::ostream& out, const MarketHistory& history);
void save_csv(const std::filesystem::path& path, const MarketHistory& history);

// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);

}  // namespace ops_ftrl
