#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bitext/core.hpp"

namespace bitext::filt {

// Dense row-major embedding matrix. Rows must be finite and have positive
// L2 norm; loaders enforce this.
struct EmbeddingMatrix {
  std::size_t dim = 0;
  std::vector<float> data;

  std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
  // Validates dimension and finiteness/norm.
  void add_row(std::span<const float> values);
};

// Text format: one vector per line, space-separated decimal floats.
EmbeddingMatrix load_embeddings_text(const std::string& path);
void write_embeddings_text(const std::string& path, const EmbeddingMatrix& m);

// Binary format: little-endian IEEE-754 binary32, row-major, with a
// one-line sidecar "<path>.meta" containing "dim=<d> rows=<n>".
EmbeddingMatrix load_embeddings_binary(const std::string& path);
void write_embeddings_binary(const std::string& path, const EmbeddingMatrix& m);

// dot(x,y)/(|x||y|); throws std::invalid_argument on dimension mismatch or
// a zero vector.
double cosine(std::span<const float> x, std::span<const float> y);

// Exact k nearest rows to pool[query_index] by cosine, excluding the query
// itself, ties broken by lower index. When the pool has fewer than k+1 rows
// all other rows are returned (degenerate pool).
std::vector<std::size_t> knn(const EmbeddingMatrix& pool,
                             std::size_t query_index, std::size_t k);

// Ratio margin: cos(x,y) / (sum(nn_x)/(2k) + sum(nn_y)/(2k)) with
// k = |nn_x| = |nn_y|. Throws std::invalid_argument on size mismatch.
double margin_score(double cos_xy, std::span<const double> nn_x,
                    std::span<const double> nn_y);

enum class Mode { document, batch, global };

struct FilterParams {
  int k = 4;
  double margin = 0.96;
  Mode mode = Mode::batch;
  std::size_t batch_size = 1000;
  std::uint64_t seed = 0;
};

struct FilterReport {
  std::size_t n_in = 0;
  std::size_t n_kept = 0;
  double pct_filtered = 0.0;
  std::size_t n_degenerate = 0;  // pairs scored against fewer than k neighbors
  std::vector<std::pair<std::size_t, std::size_t>> batches;  // (in, kept)
  std::vector<std::string> notes;
};

struct FilterResult {
  std::vector<SentencePair> kept;
  std::vector<char> kept_mask;   // input order
  std::vector<double> scores;    // input order; -inf marks rejected-by-rule
  FilterReport report;
};

// Margin scores per pair under the given neighborhood mode. Neighbor pools
// for a pair's source side are the unit's target embeddings and vice versa.
// In document mode units are origin_doc groups (origins required); batch
// mode shuffles with the seeded generator and scores within fixed batches;
// global mode uses one pool. Report (optional) collects degeneracy counts,
// batch sizes and per-pair diagnostics.
std::vector<double> margin_scores(const std::vector<SentencePair>& pairs,
                                  const EmbeddingMatrix& src_emb,
                                  const EmbeddingMatrix& tgt_emb,
                                  const FilterParams& params,
                                  FilterReport* report = nullptr);

// Document / global neighborhoods.
FilterResult filter_pool(const std::vector<SentencePair>& pairs,
                         const EmbeddingMatrix& src_emb,
                         const EmbeddingMatrix& tgt_emb,
                         const FilterParams& params);

// Batch neighborhoods: Fisher-Yates shuffle with mt19937_64(seed), split
// into ceil(n/B) consecutive batches, score per batch, keep input order.
FilterResult batch_filter(const std::vector<SentencePair>& pairs,
                          const EmbeddingMatrix& src_emb,
                          const EmbeddingMatrix& tgt_emb,
                          const FilterParams& params);

// Dispatch on params.mode.
FilterResult filter_pairs(const std::vector<SentencePair>& pairs,
                          const EmbeddingMatrix& src_emb,
                          const EmbeddingMatrix& tgt_emb,
                          const FilterParams& params);

// The documented shuffle: mt19937_64(seed), Fisher-Yates from the top,
// j = next() % (i+1).
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace bitext::filt
