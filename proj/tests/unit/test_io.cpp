#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "crj_tools/io.hpp"

namespace crj::tools {
namespace {

auto parse_error_where(std::string_view text, bool csv) -> std::string {
  try {
    if (csv) {
      parse_trace_csv(text, "in.csv");
    } else {
      parse_json(text, "in.json");
    }
  } catch (const Parse_error& e) {
    return e.where();
  }
  return "";
}

TEST(TraceCsv, ParsesSecondsIntoMicroseconds) {
  auto t = parse_trace_csv("frame,time,intensity\n0,0.00001,5\n1,0.00003,7.5\n2,0.00005,-1\n", "a.csv");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t.times()[0], 10.0);
  EXPECT_DOUBLE_EQ(t.times()[2], 50.0);
  EXPECT_DOUBLE_EQ(t.intensities()[1], 7.5);
  EXPECT_DOUBLE_EQ(t.length(), 60.0);
}

TEST(TraceCsv, RoundTrip) {
  auto rng = Rng{1};
  auto noise = std::normal_distribution<double>{0.0, 300.0};
  auto y = std::vector<double>(257);
  for (auto& v : y) {
    v = noise(rng);
  }
  auto t = Trace::uniform(y);
  auto back = parse_trace_csv(format_trace_csv(t), "rt.csv");
  ASSERT_EQ(back.size(), t.size());
  EXPECT_TRUE(std::ranges::equal(back.times(), t.times()));
  EXPECT_TRUE(std::ranges::equal(back.intensities(), t.intensities()));
  EXPECT_DOUBLE_EQ(back.length(), t.length());
}

TEST(TraceCsv, ErrorsCarryLineAndColumn) {
  EXPECT_EQ(parse_error_where("frame,time,intensity\n0,0.00001,5\n1,0.00003,abc\n", true), "in.csv:3:11");
  EXPECT_EQ(parse_error_where("frame,time\n", true), "in.csv:1:1");
  EXPECT_EQ(parse_error_where("frame,time,intensity\n0,0.00001\n", true).substr(0, 9), "in.csv:2:");
  EXPECT_FALSE(parse_error_where("frame,time,intensity\n", true).empty());
}

TEST(TraceCsv, NonIncreasingTimesRejected) {
  EXPECT_FALSE(parse_error_where("frame,time,intensity\n0,0.00003,5\n1,0.00001,6\n", true).empty());
}

TEST(Json, SyntaxErrorsCarryLineAndColumn) {
  EXPECT_EQ(parse_error_where("{\n  \"a\": ,\n}", false).substr(0, 10), "in.json:2:");
  EXPECT_EQ(parse_error_where("{\"a\": 1", false).substr(0, 10), "in.json:1:");
}

TEST(Json, LineCol) {
  EXPECT_EQ(line_col("ab\ncd", 0), (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_EQ(line_col("ab\ncd", 4), (std::pair<std::size_t, std::size_t>{2, 2}));
  EXPECT_EQ(key_location("{\n  \"lambda\": 1\n}", "lambda", "h.json"), "h.json:2:3");
}

TEST(Json, HyperparamsRoundTripAndUnknownKey) {
  auto h = Hyperparams{};
  h.eta_f = 1234.5;
  h.k_max = 7;
  EXPECT_EQ(hyperparams_from_json(to_json(h)), h);
  auto partial = hyperparams_from_json(json{{"lambda", 3.0}});
  EXPECT_EQ(partial.lambda, 3.0);
  EXPECT_EQ(partial.k_max, Hyperparams{}.k_max);
  EXPECT_THROW(hyperparams_from_json(json{{"lamda", 3.0}}), Key_error);
  EXPECT_THROW(hyperparams_from_json(json{{"lambda", "x"}}), Key_error);
}

TEST(Json, ChainConfigRoundTrip) {
  auto c = Chain_config{};
  c.seed = 99;
  c.max_iter = 12345;
  auto back = chain_config_from_json(to_json(c));
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.max_iter, 12345);
}

TEST(Ids, GroupLabelAndTraceId) {
  EXPECT_EQ(group_label("f2_mu1000_snr0.1_r3"), "mu1000_snr0.1");
  EXPECT_EQ(group_label("mu500_snr1"), "mu500_snr1");
  EXPECT_EQ(group_label("trace_7"), "");
  EXPECT_EQ(trace_id("dir/f1_mu500_snr1_r0.csv"), "f1_mu500_snr1_r0");
}

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1000.0), "1000");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Files, WriteReadAndGlob) {
  auto dir = fs::temp_directory_path() / "crj_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_text(dir / "b.csv", "x");
  write_text(dir / "a.csv", "y");
  write_text(dir / "c.txt", "z");
  EXPECT_EQ(read_text(dir / "a.csv"), "y");
  auto files = expand_inputs({(dir / "*.csv").string(), (dir / "a.csv").string()});
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "a.csv");
  EXPECT_EQ(files[1].filename(), "b.csv");
  EXPECT_THROW(read_text(dir / "missing.csv"), Error);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace crj::tools
