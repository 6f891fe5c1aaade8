#include <gtest/gtest.h>

#include <random>

#include "lodcov/langcodes.hpp"
#include "test_support.hpp"

using namespace lodcov;
using testing_support::fixture;
using testing_support::ScratchDir;
using testing_support::spit;

namespace {

WalsIndex sample_wals() { return load_wals(fixture("wals.csv"), true, fixture("written.csv")); }
CodeBridge sample_bridge() { return load_bridge(fixture("iso_bridge.csv"), fixture("edition_overrides.csv")); }

}  // namespace

TEST(LanguageTag, Normalization) {
  auto t = normalize_tag("EN-gb");
  EXPECT_EQ(t.canonical, "en-gb");
  EXPECT_EQ(t.primary_subtag, "en");
  EXPECT_EQ(normalize_tag("fr").primary_subtag, "fr");
  EXPECT_EQ(normalize_tag("zh-Hant-TW").primary_subtag, "zh");
  EXPECT_EQ(normalize_tag("  de ").canonical, "de");
  EXPECT_THROW(normalize_tag(""), std::invalid_argument);
  EXPECT_THROW(normalize_tag("  "), std::invalid_argument);
}

TEST(LanguageTag, NonstandardIsFlaggedNotRejected) {
  EXPECT_TRUE(normalize_tag("x-klingon").nonstandard());
  EXPECT_TRUE(normalize_tag("i-navajo").nonstandard());
  EXPECT_TRUE(normalize_tag("abcd").nonstandard());
  EXPECT_TRUE(normalize_tag("e1").nonstandard());
  EXPECT_FALSE(normalize_tag("yue").nonstandard());
  EXPECT_FALSE(normalize_tag("pt-BR").nonstandard());
}

TEST(Wals, WrittenFilterFromCompanionFile) {
  auto idx = sample_wals();
  EXPECT_EQ(idx.all.size(), 5u);
  EXPECT_TRUE(idx.warnings.empty());
  EXPECT_EQ(idx.find("pir"), nullptr);
  ASSERT_NE(idx.find("fre"), nullptr);
  EXPECT_EQ(idx.find("fre")->iso639_3, "fra");
  EXPECT_TRUE(std::is_sorted(idx.all.begin(), idx.all.end(),
                             [](const Languoid& a, const Languoid& b) { return a.wals_code < b.wals_code; }));
}

TEST(Wals, NoWrittennessInfoWarnsAndKeepsAll) {
  auto idx = load_wals(fixture("wals.csv"), true);
  EXPECT_EQ(idx.all.size(), 6u);
  ASSERT_EQ(idx.warnings.size(), 1u);
}

TEST(Wals, FilterOffKeepsUnwritten) {
  auto idx = load_wals(fixture("wals.csv"), false);
  EXPECT_EQ(idx.all.size(), 6u);
  EXPECT_TRUE(idx.warnings.empty());
}

TEST(Wals, WrittenColumn) {
  auto idx = load_wals(fixture("corpus/wals.csv"), true);
  EXPECT_EQ(idx.find("pir"), nullptr);
  EXPECT_EQ(idx.find("kay"), nullptr);
  EXPECT_NE(idx.find("nav"), nullptr);
}

TEST(Wals, IsoCollisionPrefersSmallestCode) {
  ScratchDir d;
  spit(d.file("w.csv"), "wals_code,name,iso639_3\nzzz,Late,abc\naaa,Early,abc\nmmm,NoIso,\n");
  auto idx = load_wals(d.file("w.csv"), false);
  EXPECT_EQ(idx.by_iso.at("abc").wals_code, "aaa");
  EXPECT_EQ(idx.by_iso.size(), 1u);
  EXPECT_EQ(idx.all.size(), 3u);
}

TEST(Wals, MalformedInputs) {
  ScratchDir d;
  spit(d.file("dup.csv"), "wals_code,name,iso639_3\naaa,A,abc\naaa,B,abd\n");
  EXPECT_THROW(load_wals(d.file("dup.csv"), false), DataError);
  spit(d.file("iso.csv"), "wals_code,name,iso639_3\naaa,A,ab1\n");
  EXPECT_THROW(load_wals(d.file("iso.csv"), false), DataError);
  spit(d.file("cols.csv"), "code,label\naaa,A\n");
  EXPECT_THROW(load_wals(d.file("cols.csv"), false), DataError);
}

TEST(Mapping, TwoAndThreeLetterTags) {
  auto idx = sample_wals();
  auto br = sample_bridge();
  EXPECT_EQ(map_tag_to_languoid(normalize_tag("en"), idx, br)->wals_code, "eng");
  EXPECT_EQ(map_tag_to_languoid(normalize_tag("fra"), idx, br)->wals_code, "fre");
  EXPECT_EQ(map_tag_to_languoid(normalize_tag("eu"), idx, br)->wals_code, "bsq");
  EXPECT_FALSE(map_tag_to_languoid(normalize_tag("tlh"), idx, br));
  EXPECT_FALSE(map_tag_to_languoid(normalize_tag("x-private"), idx, br));
  EXPECT_FALSE(map_tag_to_languoid(normalize_tag("it"), idx, br));
}

TEST(Mapping, RegionVariantsFoldOntoPrimarySubtag) {
  auto idx = sample_wals();
  auto br = sample_bridge();
  EXPECT_EQ(map_tag_to_languoid(normalize_tag("en-gb"), idx, br), map_tag_to_languoid(normalize_tag("en"), idx, br));
  EXPECT_EQ(map_tag_to_languoid(normalize_tag("de-AT-1996"), idx, br)->wals_code, "ger");
}

TEST(Mapping, EditionOverrides) {
  auto idx = sample_wals();
  auto br = sample_bridge();
  EXPECT_EQ(map_tag_to_languoid(normalize_tag("simple"), idx, br)->wals_code, "eng");
}

TEST(Mapping, FoldSumsAndKeepsUnmapped) {
  auto idx = sample_wals();
  auto br = sample_bridge();
  std::map<std::string, std::uint64_t> in = {{"en", 10}, {"en-GB", 5}, {"EN", 1}, {"fr", 7}, {"tlh", 3}, {"x-a", 2}};
  auto f = fold_counts_by_languoid(in, idx, br);
  EXPECT_EQ(f.mapped.at("eng"), 16u);
  EXPECT_EQ(f.mapped.at("fre"), 7u);
  EXPECT_EQ(f.unmapped.at("tlh"), 3u);
  EXPECT_EQ(f.unmapped.at("x-a"), 2u);
}

TEST(Mapping, CountConservationOnRandomMaps) {
  auto idx = sample_wals();
  auto br = sample_bridge();
  const std::vector<std::string> pool = {"en", "en-gb", "En-US", "fr", "fra", "de", "deu-ch", "es", "eu",
                                         "tlh", "x-foo", "it", "simple", "zz", "spa", "eus"};
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, std::uint64_t> in;
    std::uint64_t total = 0;
    for (const auto& t : pool)
      if (rng() % 2) {
        auto n = rng() % 1000000;
        in[t] = n;
        total += n;
      }
    auto f = fold_counts_by_languoid(in, idx, br);
    std::uint64_t out = 0;
    for (const auto& [k, v] : f.mapped) out += v;
    for (const auto& [k, v] : f.unmapped) out += v;
    EXPECT_EQ(out, total);
  }
}

TEST(Bridge, RejectsBadRows) {
  ScratchDir d;
  spit(d.file("b.csv"), "iso1,iso3\nen,eng\nen,enm\n");
  EXPECT_THROW(load_bridge(d.file("b.csv")), DataError);
  spit(d.file("c.csv"), "iso1,iso3\nen,english\n");
  EXPECT_THROW(load_bridge(d.file("c.csv")), DataError);
  spit(d.file("h.csv"), "two,three\nen,eng\n");
  EXPECT_THROW(load_bridge(d.file("h.csv")), DataError);
}
