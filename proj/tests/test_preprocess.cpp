#include <doctest.h>

#include <filesystem>
#include <random>

#include "bitext/core.hpp"
#include "bitext/errors.hpp"
#include "bitext/io.hpp"
#include "bitext/preprocess.hpp"
#include "bitext/utf8.hpp"

using namespace bitext;
using namespace bitext::prep;

namespace {

NormalizationTable shipped_table() {
  return NormalizationTable::load(BITEXT_DATA_DIR "/normalization.tsv");
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

SentencePair mk(const std::string& s, const std::string& t) {
  return make_sentence_pair(s, t);
}

}  // namespace

TEST_CASE("normalize_text with the shipped table") {
  const NormalizationTable table = shipped_table();

  SUBCASE("curly quotes unify") {
    CHECK(normalize_text("“x”", table) == "\"x\"");
    CHECK(normalize_text("‘y’", table) == "'y'");
  }
  SUBCASE("dashes and ellipsis unify") {
    CHECK(normalize_text("a—b", table) == "a-b");
    CHECK(normalize_text("wait…", table) == "wait...");
  }
  SUBCASE("already-normalized text is unchanged") {
    const std::string plain = "plain \"text\" with - dashes...";
    CHECK(normalize_text(plain, table) == plain);
    CHECK(normalize_text("", table) == "");
  }
  SUBCASE("nukta sequences compose") {
    const std::string decomposed = "য়";  // য + nukta
    CHECK(normalize_text(decomposed, table) == "য়");  // য়
  }
  SUBCASE("zero-width characters strip outside conjunct context") {
    CHECK(normalize_text("a​b", table) == "ab");
    CHECK(normalize_text("x‍y", table) == "xy");
    // ZWJ directly after a virama is a conjunct request and survives
    const std::string conjunct = "ক্‍ষ";
    CHECK(normalize_text(conjunct, table) == conjunct);
  }
  SUBCASE("idempotent on random strings") {
    const std::vector<char32_t> alphabet = {
        U'a', U'Z', U'ক', U'য', U'়', U'্', U'‍',
        U'​', U'“', U'”', U'‘', U'—', U'…',
        U' ', U'.', U'"', U'-', U' ', U'1', U'১'};
    std::mt19937 rng(31);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 60);
    for (int trial = 0; trial < 500; ++trial) {
      std::string text;
      const int n = len(rng);
      for (int i = 0; i < n; ++i) utf8::append(text, alphabet[pick(rng)]);
      const std::string once = normalize_text(text, table);
      CHECK(normalize_text(once, table) == once);
    }
  }
}

TEST_CASE("normalization table load rejects unstable tables") {
  const std::string path = temp_path("bitext_norm_test.tsv");
  SUBCASE("cycle") {
    io::write_file(path, "a\tb\nb\ta\n");
    CHECK_THROWS_AS(NormalizationTable::load(path), ValidationError);
  }
  SUBCASE("chain") {
    io::write_file(path, "a\tb\nb\tc\n");
    CHECK_THROWS_AS(NormalizationTable::load(path), ValidationError);
  }
  SUBCASE("strip char inside a target") {
    io::write_file(path, std::string("x\ty​\n​\t\n"));
    CHECK_THROWS_AS(NormalizationTable::load(path), ValidationError);
  }
  SUBCASE("stable table loads") {
    io::write_file(path, "a\tb\nc\tb\n");
    const NormalizationTable t = NormalizationTable::load(path);
    CHECK(normalize_text("aca", t) == "bbb");
  }
  std::filesystem::remove(path);
}

TEST_CASE("remove_shared_foreign") {
  SUBCASE("identical Cyrillic run removed from both sides") {
    const SentencePair p = mk("আগে Привет, мир! পরে", "before Привет, мир! after");
    const auto out = remove_shared_foreign(p);
    REQUIRE(out.has_value());
    CHECK(out->src_text == "আগে পরে");
    CHECK(out->tgt_text == "before after");
  }
  SUBCASE("no shared run leaves the pair unchanged") {
    const SentencePair p = mk("আগে Привет পরে", "before Мир after");
    const auto out = remove_shared_foreign(p);
    REQUIRE(out.has_value());
    CHECK(out->src_text == p.src_text);
    CHECK(out->tgt_text == p.tgt_text);
  }
  SUBCASE("short shared run is below the threshold") {
    const SentencePair p = mk("আগে Мир পরে", "before Мир after");
    const auto out = remove_shared_foreign(p, 10);
    CHECK(out->src_text == p.src_text);
    // explicit lower threshold removes it
    const auto tight = remove_shared_foreign(p, 3);
    CHECK(tight->src_text == "আগে পরে");
  }
  SUBCASE("emptied pair is dropped with a diagnostic") {
    const SentencePair p = mk("Привет, мир!", "Привет, мир!");
    std::string diag;
    CHECK_FALSE(remove_shared_foreign(p, 5, &diag).has_value());
    CHECK(diag.find("emptied") != std::string::npos);
  }
  SUBCASE("digit runs are not foreign") {
    const SentencePair p = mk("ফোন 0123456789 নম্বর", "phone 0123456789 number");
    const auto out = remove_shared_foreign(p);
    CHECK(out->src_text == p.src_text);
  }
}

TEST_CASE("transliterate_dangling") {
  const std::map<char32_t, char32_t> letter_map = {{U'a', U'ক'},
                                                   {U'b', U'খ'}};
  SUBCASE("standalone digit tokens map digit-wise") {
    CHECK(transliterate_dangling("1971") == "১৯৭১");
    CHECK(transliterate_dangling("সালে 1971 ছিল") ==
          "সালে ১৯৭১ ছিল");
  }
  SUBCASE("embedded alphanumerics untouched") {
    CHECK(transliterate_dangling("COVID-19") == "COVID-19");
    CHECK(transliterate_dangling("x86 path") == "x86 path");
  }
  SUBCASE("bullet letters map through the configured table") {
    CHECK(transliterate_dangling("(a)", letter_map) == "(ক)");
    CHECK(transliterate_dangling("(A)", letter_map) == "(ক)");
    CHECK(transliterate_dangling("b)", letter_map) == "খ)");
    CHECK(transliterate_dangling("a.", letter_map) == "ক.");
    // letter without map entry stays
    CHECK(transliterate_dangling("(z)", letter_map) == "(z)");
  }
  SUBCASE("bullet digits map too") {
    CHECK(transliterate_dangling("(1)") == "(১)");
    CHECK(transliterate_dangling("2.") == "২.");
  }
  SUBCASE("token count is preserved and only dangling tokens change") {
    const std::string text = "ধারা 12 এবং (a) COVID-19 দেখুন 3.";
    const std::string out = transliterate_dangling(text, letter_map);
    auto count = [](const std::string& s) {
      std::size_t n = 0;
      bool in_tok = false;
      for (char32_t cp : utf8::decode(s).cps) {
        const bool sp = utf8::is_space(cp);
        if (!sp && !in_tok) ++n;
        in_tok = !sp;
      }
      return n;
    };
    CHECK(count(out) == count(text));
    CHECK(out.find("COVID-19") != std::string::npos);
  }
}

TEST_CASE("remove_leakage") {
  const std::vector<SentencePair> train = {
      mk("s1", "t1"), mk("s2", "t2"), mk("s3", "t-shared")};
  const std::vector<std::vector<SentencePair>> eval_sets = {
      {mk("s1", "t1"), mk("other", "t-shared")}};

  SUBCASE("both-sides mode drops exact pair matches only") {
    std::size_t dropped = 0;
    const auto kept =
        remove_leakage(train, eval_sets, LeakMode::both_sides, &dropped);
    CHECK(dropped == 1);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].src_text == "s2");
    CHECK(kept[1].src_text == "s3");  // tgt matches an eval tgt, still kept
  }
  SUBCASE("either-side mode drops any side collision") {
    std::size_t dropped = 0;
    const auto kept =
        remove_leakage(train, eval_sets, LeakMode::either_side, &dropped);
    CHECK(dropped == 2);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].src_text == "s2");
  }
  SUBCASE("disjoint eval leaves training unchanged") {
    const std::vector<std::vector<SentencePair>> other = {{mk("x", "y")}};
    CHECK(remove_leakage(train, other, LeakMode::both_sides).size() == 3);
  }
  SUBCASE("matching is whitespace-normalized") {
    const std::vector<SentencePair> padded = {mk("s1  ", " t1")};
    CHECK(remove_leakage(padded, eval_sets, LeakMode::both_sides).empty());
  }
}

TEST_CASE("dedup") {
  const SentencePair p = mk("a", "b"), q = mk("c", "d");
  SUBCASE("first occurrence wins") {
    const auto out = dedup({p, p, q});
    REQUIRE(out.size() == 2);
    CHECK(out[0].src_text == "a");
    CHECK(out[1].src_text == "c");
  }
  SUBCASE("distinct input unchanged, idempotent") {
    const auto once = dedup({p, q});
    CHECK(once.size() == 2);
    CHECK(dedup(once).size() == 2);
  }
  SUBCASE("3,400 pairs with 17 duplicate occurrences leave 3,383") {
    std::vector<SentencePair> pairs;
    for (int i = 0; i < 3383; ++i)
      pairs.push_back(mk("u" + std::to_string(i), "v" + std::to_string(i)));
    std::mt19937 rng(3383);
    std::uniform_int_distribution<int> pick(0, 3382);
    for (int k = 0; k < 17; ++k) {
      const auto& dup = pairs[static_cast<std::size_t>(pick(rng))];
      pairs.push_back(mk(dup.src_text, dup.tgt_text));
    }
    REQUIRE(pairs.size() == 3400);
    CHECK(dedup(pairs).size() == 3383);
  }
}

TEST_CASE("quality_filter_eval") {
  EvalFilterRules rules;
  for (const char* w : {"the", "cat", "sat", "on", "mat", "and", "dog",
                        "ran", "far", "away", "বিড়াল"})
    rules.vocab.insert(w);
  rules.translit_lexicon = {"dhaka", "padma", "meghna"};

  const std::string good_side =
      "the cat sat on the mat and the dog ran far away and sat";  // 56 chars

  SUBCASE("length rule") {
    const auto [kept, rejected] = quality_filter_eval(
        {mk(std::string(49, 'x'), good_side),
         mk(good_side, std::string(251, 'y')), mk(good_side, good_side)},
        rules);
    CHECK(kept.size() == 1);
    REQUIRE(rejected.size() == 2);
    CHECK(rejected[0].rule == 1);
    CHECK(rejected[1].rule == 1);
  }
  SUBCASE("transliteration rule") {
    // 6 of 12 tokens flagged, above the 1/3 threshold
    const std::string heavy =
        "dhaka padma meghna dhaka padma meghna the cat sat on mat and";
    const auto [kept, rejected] =
        quality_filter_eval({mk(heavy, good_side)}, rules);
    CHECK(kept.empty());
    REQUIRE(rejected.size() == 1);
    CHECK(rejected[0].rule == 2);
  }
  SUBCASE("OOV count rule") {
    const std::string six_oov =
        "the cat sat on the mat zz1 zz2 zz3 zz4 zz5 zz6 and the dog ran";
    const auto [kept, rejected] =
        quality_filter_eval({mk(good_side, six_oov)}, rules);
    CHECK(kept.empty());
    REQUIRE(rejected.size() == 1);
    CHECK(rejected[0].rule == 3);
  }
  SUBCASE("OOV fraction rule") {
    // 5 OOV of 9 tokens (> 50%) but not more than 5
    const std::string side =
        "zzz100 zzz200 zzz300 zzz400 zzz500 the cat sat mat";
    const auto [kept, rejected] =
        quality_filter_eval({mk(good_side, side)}, rules);
    CHECK(kept.empty());
    REQUIRE(rejected.size() == 1);
    CHECK(rejected[0].rule == 3);
  }
  SUBCASE("first failing rule is reported") {
    const std::string short_and_oov = "zz1 zz2 zz3 zz4 zz5 zz6";
    const auto [kept, rejected] =
        quality_filter_eval({mk(short_and_oov, good_side)}, rules);
    REQUIRE(rejected.size() == 1);
    CHECK(rejected[0].rule == 1);
  }
  SUBCASE("partition invariant") {
    std::vector<SentencePair> pairs = {
        mk(good_side, good_side), mk(std::string(10, 'x'), good_side),
        mk(good_side, good_side + " zz1 zz2 zz3 zz4 zz5 zz6")};
    const auto [kept, rejected] = quality_filter_eval(pairs, rules);
    CHECK(kept.size() + rejected.size() == pairs.size());
  }
  SUBCASE("empty vocabulary is a configuration error") {
    EvalFilterRules empty = rules;
    empty.vocab.clear();
    CHECK_THROWS_AS(quality_filter_eval({mk(good_side, good_side)}, empty),
                    ValidationError);
  }
}
