#include <stdexcept>
#include <vector>

#include "bitext/aligners.hpp"
#include "bitext/metrics.hpp"

namespace bitext::align {

std::vector<AlignmentLink> align_bleu(
    const std::vector<std::string>& src_translated,
    const std::vector<std::string>& tgt, const BleuAlignParams& params) {
  if (params.max_ngram < 1 || params.max_ngram > 4)
    throw std::invalid_argument("align_bleu: max_ngram must be in 1..4");
  if (params.anchor_threshold < 0 || params.anchor_threshold > 1)
    throw std::invalid_argument("align_bleu: anchor_threshold must be in [0,1]");
  const std::size_t n = src_translated.size(), m = tgt.size();
  if (n == 0 || m == 0) return {};

  metrics::BleuParams bleu;
  bleu.max_ngram = params.max_ngram;
  bleu.smooth = true;

  std::vector<std::vector<std::string>> hyp_toks(n), ref_toks(m);
  for (std::size_t i = 0; i < n; ++i)
    hyp_toks[i] = metrics::tokenize_13a(src_translated[i], /*case_fold=*/true);
  for (std::size_t j = 0; j < m; ++j)
    ref_toks[j] = metrics::tokenize_13a(tgt[j], /*case_fold=*/true);

  std::vector<std::vector<double>> sim(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      sim[i][j] = metrics::sentence_bleu(hyp_toks[i], {ref_toks[j]}, bleu);

  // Monotone 1-1 anchor selection maximizing total similarity.
  // Zero-similarity pairs never anchor, whatever the threshold.
  auto eligible = [&](std::size_t i, std::size_t j) {
    return sim[i][j] >= params.anchor_threshold && sim[i][j] > 0.0;
  };
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double v = std::max(best[i - 1][j], best[i][j - 1]);
      if (eligible(i - 1, j - 1))
        v = std::max(v, best[i - 1][j - 1] + sim[i - 1][j - 1]);
      best[i][j] = v;
    }
  }

  std::vector<std::pair<int, int>> anchors;
  std::size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (eligible(i - 1, j - 1) &&
        best[i][j] == best[i - 1][j - 1] + sim[i - 1][j - 1]) {
      anchors.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
      --i;
      --j;
    } else if (best[i][j] == best[i - 1][j]) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(anchors.begin(), anchors.end());

  std::vector<AlignmentLink> links;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    if (params.gap_fill && a > 0) {
      const auto [ps, pt] = anchors[a - 1];
      const auto [cs, ct] = anchors[a];
      const int gap_s = cs - ps - 1, gap_t = ct - pt - 1;
      if (gap_s > 0 && gap_s == gap_t)
        for (int r = 1; r <= gap_s; ++r)
          links.push_back(make_link({ps + r}, {pt + r}));
    }
    links.push_back(make_link({anchors[a].first}, {anchors[a].second}));
  }
  return links;
}

}  // namespace bitext::align
