#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "ops_ftrl/errors.hpp"
#include "ops_ftrl/market_data.hpp"

namespace ops_ftrl {
namespace {

std::string expect_input_error(const std::string& csv, CsvMode mode) {
  std::istringstream in(csv);
  try {
    parse_csv(in, mode, "prices.csv");
  } catch (const InputError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << csv;
  return {};
}

TEST(Generate, Constant) {
  const auto h = generate({MarketKind::kConstant, 2, 3, 0, {1, 0.5}});
  ASSERT_EQ(h.horizon(), 3u);
  for (const auto& a : h.rounds()) {
    EXPECT_EQ(a[0], 1.0);
    EXPECT_EQ(a[1], 0.5);
  }
  EXPECT_EQ(generate({MarketKind::kConstant, 2, 3, 99}), h);
  EXPECT_THROW(generate({MarketKind::kConstant, 3, 3, 0, {1, 0.5}}), ConfigError);
}

TEST(Generate, SingleWinner) {
  GeneratorSpec spec{MarketKind::kSingleWinner, 5, 100, 4};
  spec.winner = 3;
  const auto h = generate(spec);
  for (const auto& a : h.rounds()) {
    EXPECT_EQ(a[3], 1.0);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_GT(a[i], 0.0);
      EXPECT_LE(a[i], 1.0);
    }
  }
  spec.winner = 5;
  EXPECT_THROW(generate(spec), ConfigError);
}

TEST(Generate, TwoAssetAlternating) {
  const auto h = generate({MarketKind::kTwoAssetAlternating, 2, 2, 0});
  EXPECT_EQ(h[0][0], 1.0);
  EXPECT_EQ(h[0][1], 0.1);
  EXPECT_EQ(h[1][0], 0.1);
  EXPECT_EQ(h[1][1], 1.0);
  GeneratorSpec bad{MarketKind::kTwoAssetAlternating, 2, 2, 0};
  bad.epsilon = 0.0;
  EXPECT_THROW(generate(bad), ConfigError);
}

TEST(Generate, AdversarialKellyKeepsCashAsset) {
  const auto h = generate({MarketKind::kAdversarialKelly, 4, 50, 8});
  for (const auto& a : h.rounds()) {
    EXPECT_EQ(*std::max_element(a.entries().begin(), a.entries().end()), 1.0);
    EXPECT_GT(a[0], 0.0);
  }
  GeneratorSpec bad{MarketKind::kAdversarialKelly, 4, 50, 8};
  bad.kelly_ratio = 1.0;
  EXPECT_THROW(generate(bad), ConfigError);
}

TEST(Generate, EveryRoundIsNormalizedAndSeedDeterministic) {
  for (auto kind : {MarketKind::kConstant, MarketKind::kSingleWinner, MarketKind::kIidUniform,
                    MarketKind::kTwoAssetAlternating, MarketKind::kAdversarialKelly}) {
    const GeneratorSpec spec{kind, 6, 80, 42};
    const auto h = generate(spec);
    EXPECT_EQ(h, generate(spec));
    for (const auto& a : h.rounds()) {
      EXPECT_EQ(*std::max_element(a.entries().begin(), a.entries().end()), 1.0);
    }
    EXPECT_EQ(parse_market_kind(to_string(kind)), kind);
  }
  EXPECT_NE(generate({MarketKind::kIidUniform, 3, 10, 1}),
            generate({MarketKind::kIidUniform, 3, 10, 2}));
  EXPECT_THROW(generate({MarketKind::kIidUniform, 1, 10, 1}), ConfigError);
  EXPECT_THROW(generate({MarketKind::kIidUniform, 2, 0, 1}), ConfigError);
  EXPECT_THROW(parse_market_kind("brownian"), ConfigError);
}

TEST(UnitInterval, NeverZero) {
  std::mt19937_64 rng(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = unit_interval_open_closed(rng);
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(Csv, RawPricesBecomeNormalizedRatios) {
  std::istringstream in("asset_0,asset_1\n100,50\n110,50\n");
  const auto h = parse_csv(in, CsvMode::kRawPrices);
  ASSERT_EQ(h.horizon(), 1u);
  EXPECT_EQ(h[0][0], 1.0);
  EXPECT_NEAR(h[0][1], 1.0 / 1.1, 1e-15);
}

TEST(Csv, RelativesAreNormalized) {
  std::istringstream in("a,b\r\n0.5,1\r\n2,1\r\n");
  const auto h = parse_csv(in, CsvMode::kRelatives);
  ASSERT_EQ(h.horizon(), 2u);
  EXPECT_EQ(h[0][0], 0.5);
  EXPECT_EQ(h[0][1], 1.0);
  EXPECT_EQ(h[1][1], 0.5);
}

TEST(Csv, ErrorsCarryCoordinates) {
  EXPECT_NE(expect_input_error("a,b\n0,0\n", CsvMode::kRelatives).find("prices.csv:2"),
            std::string::npos);
  EXPECT_NE(expect_input_error("a,b\n1,2\n1,2,3\n", CsvMode::kRelatives).find("prices.csv:3"),
            std::string::npos);
  const auto msg = expect_input_error("a,b\n1,x\n", CsvMode::kRelatives);
  EXPECT_NE(msg.find("prices.csv:2:"), std::string::npos) << msg;
  expect_input_error("a\n1\n", CsvMode::kRelatives);
  expect_input_error("a,b\n100,0\n110,5\n", CsvMode::kRawPrices);
  expect_input_error("a,b\n100,5\n", CsvMode::kRawPrices);
  expect_input_error("a,b\n", CsvMode::kRelatives);
  expect_input_error("a,b\n-1,1\n", CsvMode::kRelatives);
  EXPECT_THROW(parse_csv_mode("log_returns"), ConfigError);
  EXPECT_THROW(load_csv("/nonexistent/prices.csv", CsvMode::kRelatives), InputError);
}

TEST(Csv, RoundTripIsBitExact) {
  for (auto kind : {MarketKind::kIidUniform, MarketKind::kSingleWinner,
                    MarketKind::kAdversarialKelly}) {
    const auto h = generate({kind, 7, 120, 31});
    std::stringstream buf;
    write_csv(buf, h);
    EXPECT_EQ(buf.str().rfind("asset_0,asset_1,", 0), 0u);
    EXPECT_EQ(parse_csv(buf, CsvMode::kRelatives), h);
  }

  const auto path = std::filesystem::temp_directory_path() / "ops_ftrl_roundtrip.csv";
  const auto h = generate({MarketKind::kIidUniform, 3, 10, 5});
  save_csv(path, h);
  EXPECT_EQ(load_csv(path, CsvMode::kRelatives), h);
  std::filesystem::remove(path);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(MarketHistory, PrefixAndZeroRelatives) {
  const auto h = generate({MarketKind::kTwoAssetAlternating, 2, 10, 0});
  EXPECT_EQ(h.prefix(4).horizon(), 4u);
  EXPECT_EQ(h.prefix(4)[3], h[3]);
  EXPECT_THROW(h.prefix(11), InputError);
  EXPECT_FALSE(h.has_zero_relatives());
  std::istringstream in("a,b\n1,0\n");
  EXPECT_TRUE(parse_csv(in, CsvMode::kRelatives).has_zero_relatives());
}

}  // namespace
}  // namespace ops_ftrl
