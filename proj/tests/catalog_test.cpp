#include <gtest/gtest.h>

#include <json.hpp>

#include "support.hpp"
#include "vibemoji/error.hpp"

using namespace vibemoji;
using namespace vibemoji::testing;
using nlohmann::json;

namespace {

json minimal_document() {
  return json::parse(R"({
    "version": 1,
    "behaviors": ["bounce"],
    "stickers": [{"id": "s1", "label": "grin", "valence": 6, "arousal": 5,
                  "asset": {"codepoints": [128512]}}],
    "animations": [{"id": "a1", "label": "bounce", "valence": 5, "arousal": 6,
                    "asset": {"behavior": "bounce", "period_ms": 800, "amplitude": 0.5}}],
    "vibrations": [{"id": "v1", "label": "tap", "valence": 4, "arousal": 4,
                    "asset": {"events": [{"offset_ms": 0, "duration_ms": 100,
                                          "intensity": 0.8, "sharpness": 0.3}]}}]
  })");
}

bool mentions(const std::vector<std::string>& lines, const std::string& needle) {
  for (const auto& l : lines) {
    if (l.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Catalog, MinimalDocumentHasOneElementPerModality) {
  const Catalog c = parse_catalog(minimal_document().dump());
  EXPECT_EQ(c.size(Modality::Sticker), 1u);
  EXPECT_EQ(c.size(Modality::Animation), 1u);
  EXPECT_EQ(c.size(Modality::Vibration), 1u);
  const Element* v = c.find(Modality::Vibration, "v1");
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(std::get<VibrationAsset>(v->asset).extent_ms(), 100);
  EXPECT_EQ(c.find(Modality::Sticker, "v1"), nullptr);
}

TEST(Catalog, DuplicateIdIsNamed) {
  json doc = minimal_document();
  doc["stickers"].push_back(doc["stickers"][0]);
  try {
    parse_catalog(doc.dump());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(mentions(e.violations(), "\"s1\": duplicate id"));
  }
}

TEST(Catalog, SameIdAcrossModalitiesIsAllowed) {
  json doc = minimal_document();
  doc["animations"][0]["id"] = "s1";
  EXPECT_NO_THROW(parse_catalog(doc.dump()));
}

TEST(Catalog, EveryViolationIsReported) {
  json doc = minimal_document();
  doc["stickers"][0]["valence"] = 7.5;
  doc["animations"][0]["id"] = "a:1";
  doc["animations"][0]["asset"]["behavior"] = "teleport";
  doc["vibrations"][0]["asset"]["events"][0]["duration_ms"] = 10'001;
  doc["vibrations"][0]["asset"]["events"][0]["intensity"] = 1.5;
  const auto problems = validate_catalog_document(doc.dump());
  EXPECT_TRUE(mentions(problems, "sticker \"s1\": valence/arousal outside [1, 7]"));
  EXPECT_TRUE(mentions(problems, "animation \"a:1\": id must be"));
  EXPECT_TRUE(mentions(problems, "behavior \"teleport\" is not declared"));
  EXPECT_TRUE(mentions(problems, "longer than 10000 ms"));
  EXPECT_TRUE(mentions(problems, "intensity outside [0, 1]"));
}

TEST(Catalog, VibrationAtExactlyTenSecondsIsAccepted) {
  json doc = minimal_document();
  doc["vibrations"][0]["asset"]["events"][0]["duration_ms"] = 10'000;
  EXPECT_TRUE(validate_catalog_document(doc.dump()).empty());
}

TEST(Catalog, UnsortedEventsRejected) {
  json doc = minimal_document();
  auto& events = doc["vibrations"][0]["asset"]["events"];
  events.push_back({{"offset_ms", 50}, {"duration_ms", 10}, {"intensity", 0.1}, {"sharpness", 0.1}});
  events.push_back({{"offset_ms", 20}, {"duration_ms", 10}, {"intensity", 0.1}, {"sharpness", 0.1}});
  EXPECT_TRUE(mentions(validate_catalog_document(doc.dump()), "not sorted by offset_ms"));
}

TEST(Catalog, EmptyModalityRejected) {
  json doc = minimal_document();
  doc["animations"] = json::array();
  EXPECT_TRUE(mentions(validate_catalog_document(doc.dump()), "animations: at least one element"));
}

TEST(Catalog, WrongVersionRejected) {
  json doc = minimal_document();
  doc["version"] = 2;
  EXPECT_FALSE(validate_catalog_document(doc.dump()).empty());
  EXPECT_THROW(parse_catalog(doc.dump()), ValidationError);
}

TEST(Catalog, SyntaxErrorIsParseError) {
  EXPECT_THROW(parse_catalog("{\"version\": 1,"), ParseError);
  EXPECT_EQ(validate_catalog_document("[").size(), 1u);
}

TEST(Catalog, UnreadableFileIsIoError) {
  TempDir dir;
  EXPECT_THROW(load_catalog(dir / "missing.json"), IoError);
}

TEST(Catalog, ElementIdRules) {
  EXPECT_TRUE(is_valid_element_id("s_joy"));
  EXPECT_TRUE(is_valid_element_id("v-12"));
  EXPECT_FALSE(is_valid_element_id(""));
  EXPECT_FALSE(is_valid_element_id("-"));
  EXPECT_FALSE(is_valid_element_id("a:b"));
  EXPECT_FALSE(is_valid_element_id("a]b"));
  EXPECT_FALSE(is_valid_element_id("a[b"));
  EXPECT_FALSE(is_valid_element_id("a\tb"));
  EXPECT_FALSE(is_valid_element_id("a\nb"));
}

TEST(Catalog, SerializeRoundtrip) {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Catalog c = random_catalog(rng, uniform_int(rng, 1, 8), uniform_int(rng, 1, 8),
                                     uniform_int(rng, 1, 8));
    const std::string text = serialize_catalog(c);
    const Catalog back = parse_catalog(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize_catalog(back), text);
  }
}

TEST(Catalog, SampleCatalogCounts) {
  const Catalog c = load_catalog(source_dir() / "data" / "sample_catalog.json");
  EXPECT_EQ(c.size(Modality::Sticker), 50u);
  EXPECT_EQ(c.size(Modality::Animation), 15u);
  EXPECT_EQ(c.size(Modality::Vibration), 60u);
  EXPECT_EQ(c.behaviors().size(), 15u);
  EXPECT_EQ(parse_catalog(serialize_catalog(c)), c);
}

TEST(Catalog, SampleRatingsReproduceEmotionPoints) {
  const Catalog c = load_catalog(source_dir() / "data" / "sample_catalog.json");
  const auto records = parse_ratings(read_text(source_dir() / "data" / "sample_ratings.jsonl"));
  const auto points = aggregate_ratings(records);
  std::map<std::string, int> respondents;
  for (const auto& r : records) ++respondents[r.element_id];
  for (Modality m : {Modality::Animation, Modality::Vibration}) {
    for (const auto& e : c.elements(m)) {
      ASSERT_TRUE(points.contains(e.id)) << e.id;
      EXPECT_NEAR(points.at(e.id).valence, e.emotion.valence, 1e-12) << e.id;
      EXPECT_NEAR(points.at(e.id).arousal, e.emotion.arousal, 1e-12) << e.id;
      EXPECT_EQ(respondents[e.id], m == Modality::Animation ? 52 : 26) << e.id;
    }
  }
}

TEST(Catalog, SampleVibrationsAreTheFilteredCandidatePool) {
  const Catalog c = load_catalog(source_dir() / "data" / "sample_catalog.json");
  const json pool = json::parse(read_text(source_dir() / "data" / "vibration_candidates.json"));
  std::vector<Element> short_enough;
  for (const auto& cand : pool) {
    if (cand["extent_ms"].get<std::int64_t>() > kMaxVibrationExtentMs) continue;
    short_enough.push_back(make_vibration(cand["id"], {cand["valence"], cand["arousal"]}));
  }
  const auto stickers = c.elements(Modality::Sticker);
  const auto kept = mark_frequency_filter(stickers, short_enough, 5);
  std::vector<std::string> shipped;
  for (const auto& v : c.elements(Modality::Vibration)) shipped.push_back(v.id);
  EXPECT_EQ(pool.size(), 120u);
  EXPECT_EQ(kept, shipped);
  EXPECT_EQ(kept, oracle_mark_filter(stickers, short_enough, 5));
}

TEST(Ratings, MeanOfValences) {
  const std::vector<RatingRecord> r{{"a", "p1", 3, 1}, {"a", "p2", 4, 2}, {"a", "p3", 5, 6}};
  const auto pts = aggregate_ratings(r);
  EXPECT_DOUBLE_EQ(pts.at("a").valence, 4.0);
  EXPECT_DOUBLE_EQ(pts.at("a").arousal, 3.0);
}

TEST(Ratings, SingleRecordIsIdentity) {
  const std::vector<RatingRecord> r{{"a", "p1", 7, 1}};
  const auto pts = aggregate_ratings(r);
  EXPECT_EQ(pts.at("a").valence, 7.0);
  EXPECT_EQ(pts.at("a").arousal, 1.0);
}

TEST(Ratings, MissingRequiredElementFails) {
  const std::vector<RatingRecord> r{{"a", "p1", 7, 1}};
  const std::vector<std::string> required{"a", "b"};
  EXPECT_THROW(aggregate_ratings(r, required), Error);
}

TEST(Ratings, OutOfScaleScoreRejected) {
  EXPECT_THROW(parse_ratings(R"({"element_id":"a","respondent_id":"p","valence":8,"arousal":1})"),
               Error);
  EXPECT_THROW(parse_ratings(R"({"element_id":"a","respondent_id":"p","valence":2.5,"arousal":1})"),
               Error);
}

TEST(Ratings, MeanMatchesReverseSummationAndIsPermutationInvariant) {
  std::mt19937 rng(5);
  for (int round = 0; round < 200; ++round) {
    std::vector<RatingRecord> recs;
    for (int i = 0; i < 52; ++i) {
      recs.push_back({"e", "p" + std::to_string(i), uniform_int(rng, 1, 7), uniform_int(rng, 1, 7)});
    }
    double v = 0, a = 0;
    for (auto it = recs.rbegin(); it != recs.rend(); ++it) {
      v += it->valence;
      a += it->arousal;
    }
    const auto pts = aggregate_ratings(recs);
    EXPECT_NEAR(pts.at("e").valence, v / 52.0, 1e-12);
    EXPECT_NEAR(pts.at("e").arousal, a / 52.0, 1e-12);
    std::shuffle(recs.begin(), recs.end(), rng);
    const auto shuffled = aggregate_ratings(recs);
    EXPECT_EQ(shuffled.at("e").valence, pts.at("e").valence);
    EXPECT_EQ(shuffled.at("e").arousal, pts.at("e").arousal);
  }
}

TEST(Nearest, OrderedConstruction) {
  const Element s = make_sticker("s", {4, 4});
  std::vector<Element> vibs;
  for (int d = 6; d >= 1; --d) vibs.push_back(make_vibration("d" + std::to_string(d), {4.0 + d * 0.5, 4}));
  EXPECT_EQ(nearest_vibrations(s, vibs, 5), (std::vector<std::string>{"d1", "d2", "d3", "d4", "d5"}));
}

TEST(Nearest, EquidistantKeepsCatalogOrder) {
  const Element s = make_sticker("s", {4, 4});
  const std::vector<Element> vibs{make_vibration("far", {7, 7}), make_vibration("east", {5, 4}),
                                  make_vibration("west", {3, 4})};
  EXPECT_EQ(nearest_vibrations(s, vibs, 2), (std::vector<std::string>{"east", "west"}));
}

TEST(Nearest, PreconditionsEnforced) {
  const Element s = make_sticker("s", {4, 4});
  const std::vector<Element> vibs{make_vibration("v", {5, 4})};
  EXPECT_THROW(nearest_vibrations(s, vibs, 2), Error);
  EXPECT_THROW(nearest_vibrations(s, vibs, 0), Error);
  EXPECT_THROW(nearest_vibrations(vibs[0], vibs, 1), Error);
}

TEST(Nearest, MatchesExhaustiveSort) {
  std::mt19937 rng(21);
  for (int round = 0; round < 300; ++round) {
    const bool grid = round % 2 == 0;
    std::vector<Element> vibs;
    for (int i = 0; i < 60; ++i) vibs.push_back(make_vibration(numbered('v', i), random_point(rng, grid)));
    const Element s = make_sticker("s", random_point(rng, grid));
    const auto got = nearest_vibrations(s, vibs, 5);
    ASSERT_EQ(got, oracle_nearest(s, vibs, 5));
    double prev = -1;
    for (const auto& id : got) {
      const auto& v = *std::find_if(vibs.begin(), vibs.end(), [&](const Element& e) { return e.id == id; });
      const double d = distance(s.emotion, v.emotion);
      EXPECT_GE(d, prev);
      prev = d;
    }
  }
}

TEST(MarkFilter, SingleStickerKeepsNothing) {
  const std::vector<Element> stickers{make_sticker("s", {4, 4})};
  std::vector<Element> vibs;
  for (int i = 0; i < 8; ++i) vibs.push_back(make_vibration(numbered('v', i), {1.0 + i * 0.5, 2}));
  EXPECT_TRUE(mark_frequency_filter(stickers, vibs, 5).empty());
}

TEST(MarkFilter, IdenticalStickersKeepTheirSharedNearest) {
  const std::vector<Element> stickers{make_sticker("s1", {4, 4}), make_sticker("s2", {4, 4})};
  std::vector<Element> vibs;
  for (int i = 0; i < 8; ++i) vibs.push_back(make_vibration(numbered('v', i), {4.0 + i * 0.25, 4}));
  EXPECT_EQ(mark_frequency_filter(stickers, vibs, 5),
            (std::vector<std::string>{"v0", "v1", "v2", "v3", "v4"}));
}

TEST(MarkFilter, MatchesDoubleLoopOracle) {
  std::mt19937 rng(33);
  for (int round = 0; round < 200; ++round) {
    const bool grid = round % 3 == 0;
    std::vector<Element> stickers, vibs;
    for (int i = 0; i < 10; ++i) stickers.push_back(make_sticker(numbered('s', i), random_point(rng, grid)));
    for (int i = 0; i < 30; ++i) vibs.push_back(make_vibration(numbered('v', i), random_point(rng, grid)));
    ASSERT_EQ(mark_frequency_filter(stickers, vibs, 5), oracle_mark_filter(stickers, vibs, 5));
  }
}

TEST(MarkFilter, RemovingAStickerNeverAddsMarks) {
  std::mt19937 rng(34);
  for (int round = 0; round < 100; ++round) {
    std::vector<Element> stickers, vibs;
    for (int i = 0; i < 10; ++i) stickers.push_back(make_sticker(numbered('s', i), random_point(rng)));
    for (int i = 0; i < 20; ++i) vibs.push_back(make_vibration(numbered('v', i), random_point(rng)));
    const auto full = mark_frequency_filter(stickers, vibs, 5);
    stickers.erase(stickers.begin() + uniform_int(rng, 0, 9));
    for (const auto& id : mark_frequency_filter(stickers, vibs, 5)) {
      EXPECT_NE(std::find(full.begin(), full.end(), id), full.end());
    }
  }
}
