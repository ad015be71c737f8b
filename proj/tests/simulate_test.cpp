#include <gtest/gtest.h>

#include "support.hpp"
#include "vibemoji/error.hpp"
#include "vibemoji/simulate.hpp"

using namespace vibemoji;
using namespace vibemoji::testing;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(HistoryScript, CountsEveryTokenAndSkipsComments) {
  std::mt19937 rng(1);
  const Catalog c = random_catalog(rng, 3, 3, 3);
  const auto counts = replay_history_script("# warm-up\n[[VE1:s0:v0:-]] and [[VE1:s0:v0:a1]]\r\n\nplain\n", c);
  EXPECT_EQ(counts.count({Modality::Sticker, "s0"}, {Modality::Vibration, "v0"}), 2u);
  EXPECT_EQ(counts.count({Modality::Vibration, "v0"}, {Modality::Animation, "a1"}), 1u);
}

TEST(HistoryScript, UnknownIdNamesTheLine) {
  std::mt19937 rng(1);
  const Catalog c = random_catalog(rng, 3, 3, 3);
  try {
    replay_history_script("[[VE1:s0:-:-]]\n[[VE1:s9:-:-]]\n", c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("history line 2"), std::string::npos);
  }
}

TEST(Simulate, OneSelectionRanksBothOtherModalities) {
  std::mt19937 rng(2);
  const Catalog c = random_catalog(rng, 4, 5, 6);
  const auto sim = simulate(c, PairCounts{}, {{Modality::Sticker, "s2"}}, Weights{});
  EXPECT_EQ(sim.rows.size(), 11u);
  const auto text = format_simulation(sim);
  const auto lines = lines_of(text);
  EXPECT_EQ(lines[0], "weights alpha=0.6 beta=0.4");
  EXPECT_EQ(lines[1], "select sticker=s2");
  EXPECT_NE(text.find("target animation\nrank id via P TF IDF TF-IDF R score\n1 "), std::string::npos);
  EXPECT_NE(text.find("target vibration"), std::string::npos);
  EXPECT_EQ(text.find("target sticker"), std::string::npos);
}

TEST(Simulate, RowsAgreeWithRankModality) {
  std::mt19937 rng(3);
  for (int round = 0; round < 50; ++round) {
    const Catalog c = random_catalog(rng, 5, 5, 5);
    const PairCounts h = counts_of(random_sends(rng, c, 50));
    const std::vector<ElementRef> sel{{Modality::Sticker, pick(rng, c, Modality::Sticker).id},
                                      {Modality::Animation, pick(rng, c, Modality::Animation).id}};
    const auto sim = simulate(c, h, sel, Weights{});
    ASSERT_EQ(sim.rows.size(), 10u);
    std::vector<std::string> order;
    for (std::size_t i = 0; i < sim.rows.size(); i += 2) {
      EXPECT_EQ(sim.rows[i].candidate, sim.rows[i + 1].candidate);
      EXPECT_EQ(sim.rows[i].via->modality, Modality::Sticker);
      EXPECT_EQ(sim.rows[i + 1].via->modality, Modality::Animation);
      EXPECT_DOUBLE_EQ(sim.rows[i].final_score, (sim.rows[i].score.r + sim.rows[i + 1].score.r) / 2);
      order.push_back(sim.rows[i].candidate->id);
    }
    EXPECT_EQ(order, rank_modality(make_selection(c, sel), Modality::Vibration, h, c, Weights{}));
  }
}

TEST(Simulate, NumbersReadBack) {
  for (double x : {0.1, 0.32, 1e6, 3.9957322735539909, 0.0, 2.0 / 3.0}) {
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(0.6), "0.6");
}
