#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bitext/aligners.hpp"
#include "bitext/core.hpp"
#include "bitext/margin_filter.hpp"
#include "bitext/metrics.hpp"
#include "bitext/preprocess.hpp"
#include "bitext/segmenter.hpp"

namespace bitext::pipe {

struct DocEntry {
  std::string pair_id;
  std::string src_path;
  std::string tgt_path;
  std::string src_translated_path;  // required when a bleu aligner is configured
};

struct AlignerSpec {
  std::string name;
  std::string method;  // "length" | "bleu" | "bullets"
  std::string dict_path;
  align::LengthAlignParams length_params;
  align::BleuAlignParams bleu_params;
};

struct EmbeddingLexicon {
  std::string sentences_path;
  std::string vectors_path;  // *.bin selects the binary reader
};

struct FilterConfig {
  bool enabled = false;
  filt::FilterParams params;
  EmbeddingLexicon src;
  EmbeddingLexicon tgt;
};

struct PreprocessConfig {
  std::vector<std::string> steps;  // of: normalize, foreign, translit, dedup
  std::string table_path;
  std::string translit_side = "src";
  std::string letter_map_path;
};

struct LeakageConfig {
  std::vector<std::string> eval_paths;
  prep::LeakMode mode = prep::LeakMode::both_sides;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::string output_dir;
  int jobs = 1;
  std::string src_lang = "bn";
  std::string tgt_lang = "en";
  std::vector<DocEntry> documents;
  std::string abbrev_path;  // empty selects the built-in segmenter defaults
  std::vector<AlignerSpec> aligners;
  std::vector<std::string> ensemble_members;
  FilterConfig filter;
  PreprocessConfig preprocess;
  LeakageConfig leakage;
  std::string raw_config;  // bytes the config hash covers
};

// Parses the JSON config, resolves paths relative to the config file and
// validates everything up front (files exist, members are configured
// aligners, ...). Throws ValidationError before any work is done.
PipelineConfig load_config(const std::string& path);

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::size_t documents = 0;
  std::size_t src_sentences = 0;
  std::size_t tgt_sentences = 0;
  // aligner name -> (links, expanded pairs)
  std::map<std::string, std::pair<std::size_t, std::size_t>> aligner_stats;
  std::size_t ensemble_in = 0;   // sum over member aligners
  std::size_t ensemble_out = 0;
  bool filter_ran = false;
  std::size_t filter_in = 0;
  std::size_t filter_out = 0;
  filt::FilterReport filter_report;
  std::size_t preprocess_in = 0;
  std::size_t preprocess_out = 0;
  std::map<std::string, std::size_t> preprocess_drops;  // step -> dropped
  std::size_t leakage_in = 0;
  std::size_t leakage_out = 0;
  std::size_t leakage_dropped = 0;
  std::size_t final_pairs = 0;
  std::map<std::string, double> timings_ms;  // excluded from determinism

  std::string to_json(bool include_timings = true) const;
};

// Runs segment -> align -> ensemble -> filter -> preprocess -> leakage and
// writes every artifact under output_dir. Deterministic given the seed.
// Failures raise StageError naming the stage and document; the output
// directory keeps a ".incomplete" sentinel until the run finishes.
RunReport run_pipeline(const PipelineConfig& config);

struct SweepRow {
  bool unfiltered = false;  // the no-filter baseline row
  double margin = 0.0;
  std::size_t n_kept = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Margin sweep over the ensemble output. Embeddings and neighbor sums are
// computed once and thresholds applied per row; row i of the result equals
// a standalone filter run at margins[i]. A leading baseline row reports the
// unfiltered ensemble.
std::vector<SweepRow> sweep_margin(const PipelineConfig& config,
                                   const std::vector<double>& margins,
                                   const metrics::GoldSet& gold);

// The paper's sweep grid: 0.90 to 1.10 inclusive, 0.01 steps.
std::vector<double> default_margin_grid();

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct SectionMatch {
  std::size_t src_index = 0;
  std::size_t tgt_index = 0;
  double score = 0.0;
};

// Greedy one-to-one section matching by corpus BLEU (each section joined
// into a single segment). A source section is matched to its best-scoring
// target iff the score exceeds threshold and that target is still free;
// the result is an injective partial matching on both sides.
std::vector<SectionMatch> match_wiki_sections(
    const std::vector<std::vector<std::string>>& src_sections_translated,
    const std::vector<std::vector<std::string>>& tgt_sections,
    double threshold = 20.0, bool case_fold = true);

// Sections file: sentences one per line, blank line between sections.
std::vector<std::vector<std::string>> read_sections_file(const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace bitext::pipe
