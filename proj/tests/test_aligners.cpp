#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "bitext/aligners.hpp"
#include "bitext/core.hpp"
#include "bitext/errors.hpp"
#include "bitext/io.hpp"
#include "bitext/metrics.hpp"
#include "bitext/utf8.hpp"
#include "oracles.hpp"

using namespace bitext;
using namespace bitext::align;

namespace {

using oracles::Shape;
using oracles::kShapes;
using oracles::bead_cost;
using oracles::brute_force_cost;
using oracles::links_cost;

void check_partition(const std::vector<AlignmentLink>& links, std::size_t n,
                     std::size_t m) {
  std::vector<int> src_seen, tgt_seen;
  for (const AlignmentLink& link : links) {
    for (int v : link.src_idx) src_seen.push_back(v);
    for (int v : link.tgt_idx) tgt_seen.push_back(v);
  }
  std::vector<int> want_src(n), want_tgt(m);
  for (std::size_t i = 0; i < n; ++i) want_src[i] = static_cast<int>(i);
  for (std::size_t j = 0; j < m; ++j) want_tgt[j] = static_cast<int>(j);
  CHECK(src_seen == want_src);  // monotone links cover indices in order
  CHECK(tgt_seen == want_tgt);
}

std::string run_of(char c, int len) { return std::string(len, c); }

}  // namespace

TEST_CASE("gale_church_cost") {
  LengthAlignParams params;

  SUBCASE("delta zero leaves only the prior term") {
    // -log(0.89) = 0.11653...
    CHECK(gale_church_cost(100, 100, Bead::OneOne, params) ==
          doctest::Approx(-std::log(0.89)).epsilon(1e-12));
    CHECK(gale_church_cost(7, 7, Bead::OneOne, params) ==
          doctest::Approx(-std::log(0.89)).epsilon(1e-12));
  }
  SUBCASE("priors order costs at delta zero") {
    CHECK(gale_church_cost(100, 100, Bead::OneOne, params) <
          gale_church_cost(100, 100, Bead::TwoTwo, params));
    CHECK(gale_church_cost(100, 100, Bead::TwoOne, params) <
          gale_church_cost(100, 100, Bead::TwoTwo, params));
  }
  SUBCASE("cost grows with length mismatch") {
    const double even = gale_church_cost(100, 100, Bead::OneOne, params);
    const double skew = gale_church_cost(100, 160, Bead::OneOne, params);
    CHECK(skew > even);
  }
  SUBCASE("empty sides use the symmetric form and stay finite") {
    const double c01 = gale_church_cost(0, 40, Bead::ZeroOne, params);
    const double c10 = gale_church_cost(40, 0, Bead::OneZero, params);
    CHECK(std::isfinite(c01));
    CHECK(std::isfinite(c10));
    CHECK(c01 == doctest::Approx(c10));  // same priors, mirrored deltas
  }
  SUBCASE("extreme mismatch stays finite (log-tail)") {
    const double c = gale_church_cost(1, 100000, Bead::OneOne, params);
    CHECK(std::isfinite(c));
    CHECK(c > 1000);
  }
  SUBCASE("contract violations") {
    CHECK_THROWS_AS(gale_church_cost(0, 0, Bead::OneOne, params),
                    std::invalid_argument);
    LengthAlignParams bad = params;
    bad.variance = 0;
    CHECK_THROWS_AS(gale_church_cost(10, 10, Bead::OneOne, bad),
                    std::invalid_argument);
    bad = params;
    bad.priors.one_one = 1.19;
    CHECK_THROWS_AS(gale_church_cost(10, 10, Bead::OneOne, bad),
                    std::invalid_argument);
  }
}

TEST_CASE("align_length basics") {
  LengthAlignParams params;

  SUBCASE("single sentences give the identity bead") {
    const auto links = align_length({"hello"}, {"world"}, params);
    REQUIRE(links.size() == 1);
    CHECK(links[0] == make_link({0}, {0}));
  }
  SUBCASE("identical equal-length documents align diagonally") {
    for (int n = 1; n <= 5; ++n) {
      std::vector<std::string> doc;
      for (int i = 0; i < n; ++i) doc.push_back(run_of('x', 40));
      const auto links = align_length(doc, doc, params);
      REQUIRE(links.size() == static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) CHECK(links[i] == make_link({i}, {i}));
      // exhaustive: the DP cost equals the brute-force minimum
      CHECK(links_cost(links, doc, doc, params) ==
            doctest::Approx(brute_force_cost(doc, doc, params)));
    }
  }
  SUBCASE("empty side is a contract violation") {
    CHECK_THROWS_AS(align_length({}, {"a"}, params), std::invalid_argument);
    CHECK_THROWS_AS(align_length({"a"}, {}, params), std::invalid_argument);
  }
}

TEST_CASE("align_length DP equals brute force on random configurations") {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> size_dist(1, 8), len_dist(1, 120);
  LengthAlignParams params;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size_dist(rng), m = size_dist(rng);
    std::vector<std::string> src, tgt;
    for (int i = 0; i < n; ++i) src.push_back(run_of('a', len_dist(rng)));
    for (int j = 0; j < m; ++j) tgt.push_back(run_of('b', len_dist(rng)));
    const auto links = align_length(src, tgt, params);
    check_partition(links, src.size(), tgt.size());
    CHECK(links_cost(links, src, tgt, params) ==
          doctest::Approx(brute_force_cost(src, tgt, params)).epsilon(1e-10));
  }
}

TEST_CASE("align_length DP equals brute force with a dictionary boost") {
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> size_dist(1, 6), words(1, 8),
      vocab(0, 9), coin(0, 1);
  BilingualLexicon lex;
  for (int v = 0; v < 10; ++v)
    lex.entries["s" + std::to_string(v)].insert("t" + std::to_string(v));
  LengthAlignParams params;
  params.dictionary = &lex;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = size_dist(rng), m = size_dist(rng);
    auto sentence = [&](const char* prefix) {
      std::string s;
      const int w = words(rng);
      for (int k = 0; k < w; ++k) {
        if (!s.empty()) s.push_back(' ');
        s += prefix + std::to_string(vocab(rng));
      }
      return s;
    };
    std::vector<std::string> src, tgt;
    for (int i = 0; i < n; ++i) src.push_back(sentence("s"));
    for (int j = 0; j < m; ++j)
      tgt.push_back(sentence(coin(rng) ? "t" : "u"));
    const auto links = align_length(src, tgt, params);
    check_partition(links, src.size(), tgt.size());
    CHECK(links_cost(links, src, tgt, params) ==
          doctest::Approx(brute_force_cost(src, tgt, params)).epsilon(1e-10));
  }
}

TEST_CASE("align_length recovers a generated bead sequence") {
  std::mt19937 rng(97);
  std::uniform_int_distribution<int> base_len(40, 90), kind_dist(0, 9);
  LengthAlignParams params;
  std::size_t total_gen = 0, total_rec = 0, matches = 0;
  for (int doc = 0; doc < 20; ++doc) {
    std::vector<std::string> src, tgt;
    std::vector<AlignmentLink> truth;
    while (src.size() < 20) {
      const int kind = kind_dist(rng);
      const int s0 = static_cast<int>(src.size());
      const int t0 = static_cast<int>(tgt.size());
      if (kind < 7) {  // 1-1, lengths equal so delta is exactly 0
        const int len = base_len(rng);
        src.push_back(run_of('x', len));
        tgt.push_back(run_of('y', len));
        truth.push_back(make_link({s0}, {t0}));
      } else if (kind == 7) {  // 2-1
        const int l1 = base_len(rng), l2 = base_len(rng);
        src.push_back(run_of('x', l1));
        src.push_back(run_of('x', l2));
        tgt.push_back(run_of('y', l1 + l2));
        truth.push_back(make_link({s0, s0 + 1}, {t0}));
      } else if (kind == 8) {  // 1-2
        const int l1 = base_len(rng), l2 = base_len(rng);
        src.push_back(run_of('x', l1 + l2));
        tgt.push_back(run_of('y', l1));
        tgt.push_back(run_of('y', l2));
        truth.push_back(make_link({s0}, {t0, t0 + 1}));
      } else {  // 2-2: skewed within, so the two 1-1 readings stay costly
        const int l1 = 40 + kind_dist(rng);
        const int l2 = l1 + 50 + kind_dist(rng);
        src.push_back(run_of('x', l1));
        src.push_back(run_of('x', l2));
        tgt.push_back(run_of('y', l2));
        tgt.push_back(run_of('y', l1));
        truth.push_back(make_link({s0, s0 + 1}, {t0, t0 + 1}));
      }
    }
    const auto links = align_length(src, tgt, params);
    check_partition(links, src.size(), tgt.size());
    const std::set<AlignmentLink> truth_set(truth.begin(), truth.end());
    for (const AlignmentLink& link : links)
      if (truth_set.count(link)) ++matches;
    total_gen += truth.size();
    total_rec += links.size();
  }
  const double precision = static_cast<double>(matches) / total_rec;
  const double recall = static_cast<double>(matches) / total_gen;
  CHECK(f1_score(precision, recall) >= 0.95);
}

TEST_CASE("align_length sees only lengths when no dictionary is set") {
  LengthAlignParams params;
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> size_dist(2, 7), len_dist(5, 90);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = size_dist(rng), m = size_dist(rng);
    std::vector<std::string> src_a, src_b, tgt_a, tgt_b;
    for (int i = 0; i < n; ++i) {
      const int len = len_dist(rng);
      src_a.push_back(run_of('a', len));
      src_b.push_back(run_of('q', len));
    }
    for (int j = 0; j < m; ++j) {
      const int len = len_dist(rng);
      tgt_a.push_back(run_of('b', len));
      tgt_b.push_back(run_of('z', len));
    }
    CHECK(align_length(src_a, tgt_a, params) ==
          align_length(src_b, tgt_b, params));
  }
}

namespace {

// Same similarity the aligner computes, re-derived through public APIs.
std::vector<std::vector<double>> sim_matrix(
    const std::vector<std::string>& src_translated,
    const std::vector<std::string>& tgt, const BleuAlignParams& params) {
  metrics::BleuParams bleu;
  bleu.max_ngram = params.max_ngram;
  std::vector<std::vector<double>> sim(src_translated.size(),
                                       std::vector<double>(tgt.size()));
  for (std::size_t i = 0; i < src_translated.size(); ++i)
    for (std::size_t j = 0; j < tgt.size(); ++j)
      sim[i][j] = metrics::sentence_bleu(
          metrics::tokenize_13a(src_translated[i], true),
          {metrics::tokenize_13a(tgt[j], true)}, bleu);
  return sim;
}

// Exhaustive best monotone anchor set.
double brute_best_total(const std::vector<std::vector<double>>& sim,
                        double threshold) {
  const std::size_t n = sim.size(), m = sim.empty() ? 0 : sim[0].size();
  double best = 0;
  auto rec = [&](auto&& self, std::size_t i, std::size_t j, double acc) -> void {
    best = std::max(best, acc);
    for (std::size_t a = i; a < n; ++a)
      for (std::size_t b = j; b < m; ++b)
        if (sim[a][b] >= threshold && sim[a][b] > 0)
          self(self, a + 1, b + 1, acc + sim[a][b]);
  };
  rec(rec, 0, 0, 0.0);
  return best;
}

double anchors_total(const std::vector<AlignmentLink>& links,
                     const std::vector<std::vector<double>>& sim) {
  double total = 0;
  for (const AlignmentLink& link : links)
    total += sim[static_cast<std::size_t>(link.src_idx[0])]
                [static_cast<std::size_t>(link.tgt_idx[0])];
  return total;
}

}  // namespace

TEST_CASE("align_bleu") {
  BleuAlignParams params;

  const std::vector<std::string> sentences = {
      "the cat sat on the mat", "a quick brown fox jumps",
      "rain falls on the plain", "the train was very late",
      "children play in the park"};

  SUBCASE("identical texts anchor the diagonal") {
    const auto links = align_bleu(sentences, sentences, params);
    REQUIRE(links.size() == sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i)
      CHECK(links[i] == make_link({static_cast<int>(i)},
                                  {static_cast<int>(i)}));
  }

  SUBCASE("swapped middle sentences keep four monotone anchors") {
    std::vector<std::string> swapped = sentences;
    std::swap(swapped[1], swapped[2]);
    const auto links = align_bleu(sentences, swapped, params);
    CHECK(links.size() == 4);
    // strictly monotone, all above threshold
    const auto sim = sim_matrix(sentences, swapped, params);
    int prev_s = -1, prev_t = -1;
    for (const AlignmentLink& link : links) {
      CHECK(link.src_idx.size() == 1);
      CHECK(link.tgt_idx.size() == 1);
      CHECK(link.src_idx[0] > prev_s);
      CHECK(link.tgt_idx[0] > prev_t);
      prev_s = link.src_idx[0];
      prev_t = link.tgt_idx[0];
      CHECK(sim[prev_s][prev_t] >= params.anchor_threshold);
    }
    // and optimal in total similarity
    CHECK(anchors_total(links, sim) ==
          doctest::Approx(brute_best_total(sim, params.anchor_threshold)));
  }

  SUBCASE("no similarity above threshold gives no links") {
    const std::vector<std::string> other = {"zonk blip", "wug flurp",
                                            "quux zarf", "grue bleen",
                                            "mimsy borogove"};
    CHECK(align_bleu(sentences, other, params).empty());
  }

  SUBCASE("gap fill aligns equal-size interior gaps") {
    const std::vector<std::string> src = {
        "the cat sat on the mat", "zonk blip zorp", "wug flurp nix",
        "children play in the park"};
    const std::vector<std::string> tgt = {
        "the cat sat on the mat", "grue bleen foo", "mimsy borogove bar",
        "children play in the park"};
    const auto filled = align_bleu(src, tgt, params);
    REQUIRE(filled.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(filled[i] == make_link({i}, {i}));

    BleuAlignParams no_fill = params;
    no_fill.gap_fill = false;
    const auto anchors = align_bleu(src, tgt, no_fill);
    CHECK(anchors.size() == 2);
    CHECK(anchors[0] == make_link({0}, {0}));
    CHECK(anchors[1] == make_link({3}, {3}));
  }

  SUBCASE("unequal gaps stay unaligned") {
    const std::vector<std::string> src = {
        "the cat sat on the mat", "zonk blip zorp",
        "children play in the park"};
    const std::vector<std::string> tgt = {
        "the cat sat on the mat", "grue bleen foo", "mimsy borogove bar",
        "children play in the park"};
    const auto links = align_bleu(src, tgt, params);
    REQUIRE(links.size() == 2);
    CHECK(links[0] == make_link({0}, {0}));
    CHECK(links[1] == make_link({2}, {3}));
  }

  SUBCASE("empty inputs give no links") {
    CHECK(align_bleu({}, sentences, params).empty());
    CHECK(align_bleu(sentences, {}, params).empty());
  }
}

TEST_CASE("align_bleu DP total equals brute force on random similarity") {
  // Random sentences from a tiny vocabulary create dense, noisy similarity.
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> words(2, 6), vocab(0, 5);
  const std::vector<std::string> pool = {"alpha", "beta",  "gamma",
                                         "delta", "omega", "sigma"};
  BleuAlignParams params;
  for (int trial = 0; trial < 30; ++trial) {
    auto sentence = [&] {
      std::string s;
      const int w = words(rng);
      for (int k = 0; k < w; ++k) {
        if (!s.empty()) s.push_back(' ');
        s += pool[static_cast<std::size_t>(vocab(rng))];
      }
      return s;
    };
    std::vector<std::string> src, tgt;
    for (int i = 0; i < 5; ++i) src.push_back(sentence());
    for (int j = 0; j < 5; ++j) tgt.push_back(sentence());
    BleuAlignParams no_fill = params;
    no_fill.gap_fill = false;
    const auto links = align_bleu(src, tgt, no_fill);
    const auto sim = sim_matrix(src, tgt, params);
    CHECK(anchors_total(links, sim) ==
          doctest::Approx(brute_best_total(sim, params.anchor_threshold)));
  }
}

TEST_CASE("align_bullets") {
  SUBCASE("equal clause counts align positionally") {
    const std::string src = "প্রথম ধারা;\nদ্বিতীয় ধারা;\nতৃতীয় ধারা।\n";
    const std::string tgt = "first clause;\nsecond clause;\nthird clause.\n";
    const auto result = align_bullets(src, tgt);
    REQUIRE(result.links.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(result.links[i] == make_link({i}, {i}));
    CHECK(result.src_units.size() == 3);
    CHECK(result.tgt_units.size() == 3);
    CHECK(result.diagnostics.empty());
  }
  SUBCASE("unequal counts are skipped with a diagnostic") {
    const std::string src = "এক;\nদুই;\nতিন;\n";
    const std::string tgt = "one;\ntwo;\nthree;\nfour;\n";
    const auto result = align_bullets(src, tgt);
    CHECK(result.links.empty());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].find("3 vs 4") != std::string::npos);
  }
  SUBCASE("empty documents") {
    const auto result = align_bullets("", "");
    CHECK(result.links.empty());
    CHECK(result.src_units.empty());
  }
  SUBCASE("sections pair positionally with global unit indices") {
    const std::string src = "ক দফা;\nখ দফা;\n\nগ দফা;\nঘ দফা;\nঙ দফা;\n";
    const std::string tgt = "a clause;\nb clause;\n\nc clause;\nd clause;\n";
    // section 0: 2 vs 2 aligned; section 1: 3 vs 2 skipped
    const auto result = align_bullets(src, tgt);
    REQUIRE(result.links.size() == 2);
    CHECK(result.links[0] == make_link({0}, {0}));
    CHECK(result.links[1] == make_link({1}, {1}));
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].find("section 1") != std::string::npos);
  }
  SUBCASE("bullet markers open units; continuation lines merge") {
    const std::string src = "১। প্রথম দফা চলছে\nএখনো চলছে;\n২। দ্বিতীয়;\n";
    const std::string tgt = "1. first item continues\nstill going;\n2. second;\n";
    const auto result = align_bullets(src, tgt);
    REQUIRE(result.src_units.size() == 2);
    CHECK(result.src_units[0] == "১। প্রথম দফা চলছে এখনো চলছে;");
    REQUIRE(result.links.size() == 2);
  }
  SUBCASE("never emits many-to-one links") {
    const std::string src = "a;\nb;\n\nc;\n";
    const std::string tgt = "x;\ny;\n\nz;\n";
    for (const AlignmentLink& link : align_bullets(src, tgt).links) {
      CHECK(link.src_idx.size() == 1);
      CHECK(link.tgt_idx.size() == 1);
    }
  }
}

TEST_CASE("bilingual lexicon load") {
  namespace fs = std::filesystem;
  const std::string path =
      (fs::temp_directory_path() / "bitext_lexicon_test.tsv").string();
  bitext::io::write_file(path, "Cat\tবিড়াল\ncat\tমার্জার\ndog\tকুকুর\n");
  const BilingualLexicon lex = BilingualLexicon::load(path);
  REQUIRE(lex.entries.count("cat"));
  CHECK(lex.entries.at("cat").size() == 2);  // duplicates merge into the set
  CHECK(lex.entries.at("dog").count("কুকুর"));
  bitext::io::write_file(path, "no tab\n");
  CHECK_THROWS_AS(BilingualLexicon::load(path), bitext::ParseError);
  fs::remove(path);
}
