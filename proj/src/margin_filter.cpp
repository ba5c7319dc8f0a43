#include "bitext/margin_filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "bitext/errors.hpp"
#include "bitext/io.hpp"

namespace bitext::filt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double row_norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

double dot(std::span<const float> x, std::span<const float> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += static_cast<double>(x[i]) * y[i];
  return s;
}

}  // namespace

void EmbeddingMatrix::add_row(std::span<const float> values) {
  if (dim == 0) dim = values.size();
  if (values.size() != dim)
    throw ValidationError("embedding row has dimension " +
                          std::to_string(values.size()) + ", expected " +
                          std::to_string(dim));
  for (float v : values)
    if (!std::isfinite(v))
      throw ValidationError("embedding row " + std::to_string(rows()) +
                            " contains a non-finite component");
  if (row_norm(values) <= 0.0)
    throw ValidationError("embedding row " + std::to_string(rows()) +
                          " has zero norm");
  data.insert(data.end(), values.begin(), values.end());
}

EmbeddingMatrix load_embeddings_text(const std::string& path) {
  EmbeddingMatrix m;
  const std::vector<std::string> lines = io::read_lines(path);
  std::vector<float> row;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    row.clear();
    const char* p = lines[i].c_str();
    char* end = nullptr;
    while (*p) {
      while (*p == ' ' || *p == '\t') ++p;
      if (!*p) break;
      const float v = std::strtof(p, &end);
      if (end == p)
        throw ParseError(path + ":" + std::to_string(i + 1) +
                         ": malformed float near '" + std::string(p).substr(0, 8) +
                         "'");
      row.push_back(v);
      p = end;
    }
    if (row.empty())
      throw ParseError(path + ":" + std::to_string(i + 1) + ": empty vector");
    try {
      m.add_row(row);
    } catch (const ValidationError& e) {
      throw ParseError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return m;
}

void write_embeddings_text(const std::string& path, const EmbeddingMatrix& m) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, j ? " %.8g" : "%.8g",
                    static_cast<double>(row[j]));
      out += buf;
    }
    out.push_back('\n');
  }
  io::write_file(path, out);
}

EmbeddingMatrix load_embeddings_binary(const std::string& path) {
  const std::string meta = io::read_file(path + ".meta");
  std::size_t dim = 0, rows = 0;
  if (std::sscanf(meta.c_str(), "dim=%zu rows=%zu", &dim, &rows) != 2)
    throw ParseError(path + ".meta: expected 'dim=<d> rows=<n>'");
  if (dim == 0) throw ParseError(path + ".meta: dim must be positive");
  const std::string raw = io::read_file(path);
  if (raw.size() != dim * rows * 4)
    throw ParseError(path + ": size " + std::to_string(raw.size()) +
                     " does not match dim*rows*4 = " +
                     std::to_string(dim * rows * 4));
  EmbeddingMatrix m;
  std::vector<float> row(dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const unsigned char* b = reinterpret_cast<const unsigned char*>(
          raw.data() + (i * dim + j) * 4);
      std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                           (static_cast<std::uint32_t>(b[1]) << 8) |
                           (static_cast<std::uint32_t>(b[2]) << 16) |
                           (static_cast<std::uint32_t>(b[3]) << 24);
      float v;
      std::memcpy(&v, &bits, 4);
      row[j] = v;
    }
    try {
      m.add_row(row);
    } catch (const ValidationError& e) {
      throw ParseError(path + ": row " + std::to_string(i) + ": " + e.what());
    }
  }
  return m;
}

void write_embeddings_binary(const std::string& path, const EmbeddingMatrix& m) {
  std::string raw;
  raw.reserve(m.data.size() * 4);
  for (float v : m.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    raw.push_back(static_cast<char>(bits & 0xFF));
    raw.push_back(static_cast<char>((bits >> 8) & 0xFF));
    raw.push_back(static_cast<char>((bits >> 16) & 0xFF));
    raw.push_back(static_cast<char>((bits >> 24) & 0xFF));
  }
  io::write_file(path, raw);
  io::write_file(path + ".meta", "dim=" + std::to_string(m.dim) +
                                     " rows=" + std::to_string(m.rows()) + "\n");
}

double cosine(std::span<const float> x, std::span<const float> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("cosine: dimension mismatch");
  const double nx = row_norm(x), ny = row_norm(y);
  if (nx <= 0.0 || ny <= 0.0)
    throw std::invalid_argument("cosine: zero vector");
  return dot(x, y) / (nx * ny);
}

std::vector<std::size_t> knn(const EmbeddingMatrix& pool,
                             std::size_t query_index, std::size_t k) {
  if (query_index >= pool.rows())
    throw std::invalid_argument("knn: query index out of range");
  if (k == 0) throw std::invalid_argument("knn: k must be positive");
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(pool.rows() - 1);
  const auto q = pool.row(query_index);
  for (std::size_t i = 0; i < pool.rows(); ++i) {
    if (i == query_index) continue;
    scored.emplace_back(cosine(q, pool.row(i)), i);
  }
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  std::vector<std::size_t> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].second);
  return out;
}

double margin_score(double cos_xy, std::span<const double> nn_x,
                    std::span<const double> nn_y) {
  if (nn_x.size() != nn_y.size() || nn_x.empty())
    throw std::invalid_argument("margin_score: neighbor lists must be equal-sized and non-empty");
  const double k2 = 2.0 * static_cast<double>(nn_x.size());
  double sum_x = 0.0, sum_y = 0.0;
  for (double v : nn_x) sum_x += v;
  for (double v : nn_y) sum_y += v;
  const double denom = sum_x / k2 + sum_y / k2;
  if (denom <= 0.0)
    throw std::invalid_argument("margin_score: nonpositive denominator");
  return cos_xy / denom;
}

namespace {

void check_inputs(const std::vector<SentencePair>& pairs,
                  const EmbeddingMatrix& src_emb, const EmbeddingMatrix& tgt_emb,
                  const FilterParams& params) {
  if (src_emb.rows() != pairs.size() || tgt_emb.rows() != pairs.size())
    throw ValidationError(
        "filter: embedding row count does not match pair count (" +
        std::to_string(src_emb.rows()) + "/" + std::to_string(tgt_emb.rows()) +
        " vs " + std::to_string(pairs.size()) + ")");
  if (params.k < 1) throw ValidationError("filter: k must be >= 1");
  if (params.batch_size < 1)
    throw ValidationError("filter: batch_size must be >= 1");
  if (params.margin <= 0.0) throw ValidationError("filter: margin must be > 0");
}

// Sum of the top-k values, summed in descending order so the result depends
// only on the multiset of cosines, not on candidate order.
double top_k_sum(std::vector<double>& values, std::size_t k) {
  const std::size_t take = std::min(k, values.size());
  std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(take),
                    values.end(), std::greater<double>());
  double s = 0.0;
  for (std::size_t i = 0; i < take; ++i) s += values[i];
  return s;
}

// Scores the pairs whose indices form one neighborhood unit.
void score_unit(const std::vector<std::size_t>& unit,
                const EmbeddingMatrix& src_emb, const EmbeddingMatrix& tgt_emb,
                const FilterParams& params, std::vector<double>& scores,
                FilterReport* report) {
  const std::size_t k =
      std::min<std::size_t>(static_cast<std::size_t>(params.k), unit.size());
  std::vector<double> cos_x(unit.size()), cos_y(unit.size());
  std::vector<double> norm_src(unit.size()), norm_tgt(unit.size());
  for (std::size_t a = 0; a < unit.size(); ++a) {
    norm_src[a] = row_norm(src_emb.row(unit[a]));
    norm_tgt[a] = row_norm(tgt_emb.row(unit[a]));
  }
  for (std::size_t a = 0; a < unit.size(); ++a) {
    const std::size_t i = unit[a];
    const auto x = src_emb.row(i);
    const auto y = tgt_emb.row(i);
    for (std::size_t b = 0; b < unit.size(); ++b) {
      const std::size_t j = unit[b];
      cos_x[b] = dot(x, tgt_emb.row(j)) / (norm_src[a] * norm_tgt[b]);
      cos_y[b] = dot(y, src_emb.row(j)) / (norm_tgt[a] * norm_src[b]);
    }
    const double cos_xy = cos_x[a];
    const double denom =
        top_k_sum(cos_x, k) / (2.0 * static_cast<double>(k)) +
        top_k_sum(cos_y, k) / (2.0 * static_cast<double>(k));
    if (report && k < static_cast<std::size_t>(params.k)) ++report->n_degenerate;
    if (denom <= 0.0) {
      scores[i] = kNegInf;
      if (report)
        report->notes.push_back("pair " + std::to_string(i) +
                                " rejected: nonpositive margin denominator");
      continue;
    }
    scores[i] = cos_xy / denom;
  }
}

std::vector<std::vector<std::size_t>> make_units(
    const std::vector<SentencePair>& pairs, const FilterParams& params) {
  std::vector<std::vector<std::size_t>> units;
  switch (params.mode) {
    case Mode::global: {
      std::vector<std::size_t> all(pairs.size());
      for (std::size_t i = 0; i < pairs.size(); ++i) all[i] = i;
      if (!all.empty()) units.push_back(std::move(all));
      break;
    }
    case Mode::document: {
      std::map<std::string, std::size_t> order;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].origin_doc.empty())
          throw ValidationError(
              "filter: document mode requires an origin doc id on every pair "
              "(pair " + std::to_string(i) + " has none)");
        const auto [it, fresh] =
            order.emplace(pairs[i].origin_doc, units.size());
        if (fresh) units.emplace_back();
        units[it->second].push_back(i);
      }
      break;
    }
    case Mode::batch: {
      const std::vector<std::size_t> perm =
          shuffled_indices(pairs.size(), params.seed);
      for (std::size_t start = 0; start < perm.size();
           start += params.batch_size) {
        const std::size_t stop = std::min(perm.size(), start + params.batch_size);
        units.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                           perm.begin() + static_cast<std::ptrdiff_t>(stop));
      }
      break;
    }
  }
  return units;
}

}  // namespace

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<double> margin_scores(const std::vector<SentencePair>& pairs,
                                  const EmbeddingMatrix& src_emb,
                                  const EmbeddingMatrix& tgt_emb,
                                  const FilterParams& params,
                                  FilterReport* report) {
  check_inputs(pairs, src_emb, tgt_emb, params);
  std::vector<double> scores(pairs.size(), kNegInf);
  const auto units = make_units(pairs, params);
  for (const auto& unit : units)
    score_unit(unit, src_emb, tgt_emb, params, scores, report);
  if (report && params.mode == Mode::batch) {
    report->batches.clear();
    for (const auto& unit : units) report->batches.emplace_back(unit.size(), 0);
  }
  return scores;
}

namespace {

FilterResult apply_threshold(const std::vector<SentencePair>& pairs,
                             std::vector<double> scores, FilterReport report,
                             const FilterParams& params,
                             const std::vector<std::vector<std::size_t>>* units) {
  FilterResult result;
  result.scores = std::move(scores);
  result.report = std::move(report);
  result.kept_mask.assign(pairs.size(), 0);
  result.report.n_in = pairs.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (result.scores[i] >= params.margin) {
      result.kept_mask[i] = 1;
      result.kept.push_back(pairs[i]);
    }
  }
  result.report.n_kept = result.kept.size();
  result.report.pct_filtered =
      pairs.empty() ? 0.0
                    : 100.0 *
                          static_cast<double>(pairs.size() - result.kept.size()) /
                          static_cast<double>(pairs.size());
  if (units && params.mode == Mode::batch) {
    result.report.batches.clear();
    for (const auto& unit : *units) {
      std::size_t kept = 0;
      for (std::size_t i : unit) kept += result.kept_mask[i];
      result.report.batches.emplace_back(unit.size(), kept);
    }
  }
  return result;
}

FilterResult run_filter(const std::vector<SentencePair>& pairs,
                        const EmbeddingMatrix& src_emb,
                        const EmbeddingMatrix& tgt_emb,
                        const FilterParams& params) {
  check_inputs(pairs, src_emb, tgt_emb, params);
  FilterReport report;
  std::vector<double> scores(pairs.size(), kNegInf);
  const auto units = make_units(pairs, params);
  for (const auto& unit : units)
    score_unit(unit, src_emb, tgt_emb, params, scores, &report);
  return apply_threshold(pairs, std::move(scores), std::move(report), params,
                         &units);
}

}  // namespace

FilterResult filter_pool(const std::vector<SentencePair>& pairs,
                         const EmbeddingMatrix& src_emb,
                         const EmbeddingMatrix& tgt_emb,
                         const FilterParams& params) {
  if (params.mode == Mode::batch)
    throw ValidationError("filter_pool: use batch_filter for batch mode");
  return run_filter(pairs, src_emb, tgt_emb, params);
}

FilterResult batch_filter(const std::vector<SentencePair>& pairs,
                          const EmbeddingMatrix& src_emb,
                          const EmbeddingMatrix& tgt_emb,
                          const FilterParams& params) {
  if (params.mode != Mode::batch)
    throw ValidationError("batch_filter: params.mode must be batch");
  return run_filter(pairs, src_emb, tgt_emb, params);
}

FilterResult filter_pairs(const std::vector<SentencePair>& pairs,
                          const EmbeddingMatrix& src_emb,
                          const EmbeddingMatrix& tgt_emb,
                          const FilterParams& params) {
  return run_filter(pairs, src_emb, tgt_emb, params);
}

}  // namespace bitext::filt
