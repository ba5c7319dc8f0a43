#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "bitext/aligners.hpp"
#include "bitext/core.hpp"
#include "bitext/ensemble.hpp"
#include "bitext/errors.hpp"
#include "bitext/io.hpp"
#include "bitext/margin_filter.hpp"
#include "bitext/metrics.hpp"
#include "bitext/pipeline.hpp"
#include "bitext/preprocess.hpp"
#include "bitext/segmenter.hpp"
#include "bitext/utf8.hpp"

namespace {

using namespace bitext;

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    if (comma > pos) out.push_back(csv.substr(pos, comma - pos));
    if (comma == csv.size()) break;
    pos = comma + 1;
  }
  return out;
}

filt::EmbeddingMatrix load_vectors(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
    return filt::load_embeddings_binary(path);
  return filt::load_embeddings_text(path);
}

std::unordered_set<std::string> load_token_set(const std::string& path) {
  std::unordered_set<std::string> out;
  for (const std::string& line : io::read_lines(path)) {
    const std::string tok = collapse_ws(line);
    if (!tok.empty() && tok.front() != '#') out.insert(tok);
  }
  return out;
}

std::map<char32_t, char32_t> load_letter_map(const std::string& path) {
  std::map<char32_t, char32_t> map;
  for (const std::string& line : io::read_lines(path)) {
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ": expected letter<TAB>replacement");
    const auto from = utf8::decode(line.substr(0, tab)).cps;
    const auto to = utf8::decode(line.substr(tab + 1)).cps;
    if (from.size() != 1 || to.size() != 1)
      throw ParseError(path + ": one character per field");
    map[utf8::to_lower(from[0])] = to[0];
  }
  return map;
}

void cmd_segment(const std::string& rules_path, const std::string& in,
                 const std::string& out) {
  const seg::SegmenterRules rules =
      rules_path.empty() ? seg::default_rules() : seg::load_rules(rules_path);
  io::write_sentence_file(out,
                          seg::segment_to_sentences(io::read_file(in), rules));
}

struct AlignOpts {
  std::string method, src, tgt, dict, translation, out;
  std::string src_units_out, tgt_units_out;
  double mean_ratio = 1.0, variance = 6.8, dict_weight = 0.35;
  int max_ngram = 2;
  double anchor_threshold = 0.10;
  bool no_gap_fill = false;
};

void cmd_align(const AlignOpts& opt) {
  std::vector<AlignmentLink> links;
  if (opt.method == "length") {
    align::LengthAlignParams params;
    params.mean_ratio = opt.mean_ratio;
    params.variance = opt.variance;
    params.dict_weight = opt.dict_weight;
    align::BilingualLexicon lexicon;
    if (!opt.dict.empty()) {
      lexicon = align::BilingualLexicon::load(opt.dict);
      params.dictionary = &lexicon;
    }
    links = align::align_length(io::read_sentence_file(opt.src),
                                io::read_sentence_file(opt.tgt), params);
  } else if (opt.method == "bleu") {
    if (opt.translation.empty())
      throw ValidationError("align --method bleu requires --translation");
    const auto src = io::read_sentence_file(opt.src);
    const auto translation = io::read_sentence_file(opt.translation);
    if (translation.size() != src.size())
      throw ValidationError("translation has " +
                            std::to_string(translation.size()) +
                            " lines but source has " +
                            std::to_string(src.size()));
    align::BleuAlignParams params;
    params.max_ngram = opt.max_ngram;
    params.anchor_threshold = opt.anchor_threshold;
    params.gap_fill = !opt.no_gap_fill;
    links = align::align_bleu(translation, io::read_sentence_file(opt.tgt),
                              params);
  } else if (opt.method == "bullets") {
    const align::BulletAlignResult result =
        align::align_bullets(io::read_file(opt.src), io::read_file(opt.tgt));
    for (const std::string& d : result.diagnostics)
      std::cerr << "bullets: " << d << "\n";
    if (!opt.src_units_out.empty())
      io::write_sentence_file(opt.src_units_out, result.src_units);
    if (!opt.tgt_units_out.empty())
      io::write_sentence_file(opt.tgt_units_out, result.tgt_units);
    links = result.links;
  } else {
    throw ValidationError("unknown align method '" + opt.method + "'");
  }
  io::write_link_file(opt.out, links);
  std::cout << links.size() << " links\n";
}

void cmd_ensemble(const std::string& members_csv, const std::string& in_dir,
                  const std::string& out) {
  namespace fs = std::filesystem;
  const std::vector<std::string> members = split_csv(members_csv);
  if (members.empty()) throw ValidationError("ensemble: no members given");
  ens::PerAligner input;
  for (const std::string& member : members) {
    const fs::path dir = fs::path(in_dir) / member;
    if (!fs::is_directory(dir))
      throw ValidationError("ensemble: no directory for member '" + member +
                            "' under " + in_dir);
    ens::DocPairs docs;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files)
      docs[file.stem().string()] = io::read_pair_file(file.string());
    input[member] = std::move(docs);
  }
  const ens::DocPairs merged = ens::ensemble_union(input, members);
  std::vector<SentencePair> flat;
  for (const auto& [doc_id, pairs] : merged)
    flat.insert(flat.end(), pairs.begin(), pairs.end());
  io::write_pair_file(out, flat);
  std::cout << ens::name_ensemble(members) << ": " << flat.size()
            << " pairs\n";
}

struct FilterOpts {
  std::string pairs, src_emb, tgt_emb, out, report, mode = "batch";
  double margin = 0.96;
  int k = 4;
  std::size_t batch_size = 1000;
  std::uint64_t seed = 0;
  bool with_origin = false;
};

nlohmann::json filter_report_json(const filt::FilterReport& r) {
  nlohmann::json j;
  j["n_in"] = r.n_in;
  j["n_kept"] = r.n_kept;
  j["pct_filtered"] = r.pct_filtered;
  j["n_degenerate"] = r.n_degenerate;
  nlohmann::json batches = nlohmann::json::array();
  for (const auto& [in, kept] : r.batches)
    batches.push_back({{"in", in}, {"kept", kept}});
  j["batches"] = batches;
  j["notes"] = r.notes;
  return j;
}

void cmd_filter(const FilterOpts& opt) {
  filt::FilterParams params;
  params.margin = opt.margin;
  params.k = opt.k;
  params.batch_size = opt.batch_size;
  params.seed = opt.seed;
  if (opt.mode == "document")
    params.mode = filt::Mode::document;
  else if (opt.mode == "batch")
    params.mode = filt::Mode::batch;
  else if (opt.mode == "global")
    params.mode = filt::Mode::global;
  else
    throw ValidationError("unknown filter mode '" + opt.mode + "'");
  if (params.mode == filt::Mode::document && !opt.with_origin)
    throw ValidationError(
        "document mode needs --with-origin (three-column pairs file)");

  const auto pairs = io::read_pair_file(opt.pairs, opt.with_origin);
  const filt::EmbeddingMatrix src = load_vectors(opt.src_emb);
  const filt::EmbeddingMatrix tgt = load_vectors(opt.tgt_emb);
  const filt::FilterResult result = filt::filter_pairs(pairs, src, tgt, params);
  io::write_pair_file(opt.out, result.kept, opt.with_origin);
  if (!opt.report.empty())
    io::write_file(opt.report,
                   filter_report_json(result.report).dump(2) + "\n");
  std::printf("kept %zu of %zu (%.2f%% filtered)\n", result.report.n_kept,
              result.report.n_in, result.report.pct_filtered);
}

void cmd_eval(const std::string& pred, const std::string& gold, bool lc,
              const std::string& out) {
  const metrics::GoldSet gold_set =
      metrics::GoldSet::from_pairs(io::read_pair_file(gold), lc);
  const AlignReport r =
      metrics::precision_recall_f1(io::read_pair_file(pred), gold_set);
  std::printf(
      "precision=%.4f recall=%.4f f1=%.4f n_pred=%zu n_gold=%zu n_correct=%zu\n",
      r.precision, r.recall, r.f1, r.n_pred, r.n_gold, r.n_correct);
  if (!out.empty()) {
    nlohmann::json j;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["n_pred"] = r.n_pred;
    j["n_gold"] = r.n_gold;
    j["n_correct"] = r.n_correct;
    io::write_file(out, j.dump(2) + "\n");
  }
}

void cmd_bleu(const std::string& hyp_path,
              const std::vector<std::string>& ref_paths, bool lc,
              int max_ngram) {
  const auto hyp_lines = io::read_lines(hyp_path);
  std::vector<std::vector<std::string>> hyps;
  for (const auto& line : hyp_lines)
    hyps.push_back(metrics::tokenize_13a(line, lc));
  std::vector<std::vector<std::vector<std::string>>> refs_list(hyps.size());
  for (const std::string& ref_path : ref_paths) {
    const auto ref_lines = io::read_lines(ref_path);
    if (ref_lines.size() != hyps.size())
      throw ValidationError("reference '" + ref_path + "' has " +
                            std::to_string(ref_lines.size()) +
                            " lines, hypothesis has " +
                            std::to_string(hyps.size()));
    for (std::size_t i = 0; i < ref_lines.size(); ++i)
      refs_list[i].push_back(metrics::tokenize_13a(ref_lines[i], lc));
  }
  metrics::BleuParams params;
  params.max_ngram = max_ngram;
  params.case_fold = lc;
  std::printf("BLEU = %.2f\n", metrics::corpus_bleu(hyps, refs_list, params));
}

struct PreprocessOpts {
  std::string steps, table, in, out, letter_map;
  std::string translit_side = "src";
  std::size_t min_foreign_len = 10;
};

void cmd_preprocess(const PreprocessOpts& opt) {
  std::vector<SentencePair> pairs = io::read_pair_file(opt.in);
  prep::NormalizationTable table;
  if (!opt.table.empty()) table = prep::NormalizationTable::load(opt.table);
  std::map<char32_t, char32_t> letter_map;
  if (!opt.letter_map.empty()) letter_map = load_letter_map(opt.letter_map);
  for (const std::string& step : split_csv(opt.steps)) {
    std::vector<SentencePair> next;
    next.reserve(pairs.size());
    std::size_t dropped = 0;
    if (step == "normalize") {
      if (opt.table.empty())
        throw ValidationError("step 'normalize' needs --table");
      for (SentencePair& p : pairs) {
        std::string s = collapse_ws(prep::normalize_text(p.src_text, table));
        std::string t = collapse_ws(prep::normalize_text(p.tgt_text, table));
        if (s.empty() || t.empty()) {
          ++dropped;
          continue;
        }
        p.src_text = std::move(s);
        p.tgt_text = std::move(t);
        next.push_back(std::move(p));
      }
    } else if (step == "foreign") {
      for (const SentencePair& p : pairs) {
        std::string diag;
        auto kept = prep::remove_shared_foreign(p, opt.min_foreign_len, &diag);
        if (kept) {
          next.push_back(std::move(*kept));
        } else {
          ++dropped;
          std::cerr << "foreign: " << diag << "\n";
        }
      }
    } else if (step == "translit") {
      const bool on_src = opt.translit_side == "src";
      for (SentencePair& p : pairs) {
        std::string& side = on_src ? p.src_text : p.tgt_text;
        side = prep::transliterate_dangling(side, letter_map);
        next.push_back(std::move(p));
      }
    } else if (step == "dedup") {
      next = prep::dedup(pairs);
      dropped = pairs.size() - next.size();
    } else {
      throw ValidationError("unknown preprocess step '" + step + "'");
    }
    std::cerr << step << ": dropped " << dropped << "\n";
    pairs = std::move(next);
  }
  io::write_pair_file(opt.out, pairs);
  std::cout << pairs.size() << " pairs\n";
}

void cmd_leak(const std::string& train, const std::vector<std::string>& evals,
              const std::string& mode, const std::string& out) {
  prep::LeakMode leak_mode;
  if (mode == "both")
    leak_mode = prep::LeakMode::both_sides;
  else if (mode == "either")
    leak_mode = prep::LeakMode::either_side;
  else
    throw ValidationError("leak mode must be 'both' or 'either'");
  std::vector<std::vector<SentencePair>> eval_sets;
  for (const std::string& path : evals)
    eval_sets.push_back(io::read_pair_file(path));
  std::size_t dropped = 0;
  const auto kept = prep::remove_leakage(io::read_pair_file(train), eval_sets,
                                         leak_mode, &dropped);
  io::write_pair_file(out, kept);
  std::cout << "dropped " << dropped << ", kept " << kept.size() << "\n";
}

struct EvalFilterOpts {
  std::string vocab, translit_lexicon, rules, in, out, rejected;
};

void cmd_evalfilter(const EvalFilterOpts& opt) {
  prep::EvalFilterRules rules;
  if (!opt.rules.empty()) {
    const nlohmann::json j = nlohmann::json::parse(io::read_file(opt.rules));
    rules.min_chars = j.value("min_chars", rules.min_chars);
    rules.max_chars = j.value("max_chars", rules.max_chars);
    rules.max_translit_frac =
        j.value("max_translit_frac", rules.max_translit_frac);
    rules.max_oov_frac = j.value("max_oov_frac", rules.max_oov_frac);
    rules.max_oov_count = j.value("max_oov_count", rules.max_oov_count);
  }
  rules.vocab = load_token_set(opt.vocab);
  if (!opt.translit_lexicon.empty())
    rules.translit_lexicon = load_token_set(opt.translit_lexicon);
  const auto [kept, rejected] =
      prep::quality_filter_eval(io::read_pair_file(opt.in), rules);
  io::write_pair_file(opt.out, kept);
  if (!opt.rejected.empty()) {
    std::string text;
    for (const prep::Rejection& r : rejected)
      text += r.pair.src_text + "\t" + r.pair.tgt_text + "\trule" +
              std::to_string(r.rule) + "\n";
    io::write_file(opt.rejected, text);
  }
  std::cout << "kept " << kept.size() << ", rejected " << rejected.size()
            << "\n";
}

void cmd_sweep(const std::string& config_path, const std::string& gold_path,
               double from, double to, double step, bool lc,
               const std::string& out) {
  const pipe::PipelineConfig config = pipe::load_config(config_path);
  const metrics::GoldSet gold =
      metrics::GoldSet::from_pairs(io::read_pair_file(gold_path), lc);
  std::vector<double> margins;
  const int n_steps = static_cast<int>(std::llround((to - from) / step));
  for (int i = 0; i <= n_steps; ++i) margins.push_back(from + i * step);
  const auto rows = pipe::sweep_margin(config, margins, gold);
  io::write_file(out, pipe::sweep_csv(rows));
  std::cout << rows.size() << " rows\n";
}

void cmd_wiki_match(const std::string& src_path, const std::string& tgt_path,
                    double threshold, bool mixed_case, const std::string& out) {
  const auto matches = pipe::match_wiki_sections(
      pipe::read_sections_file(src_path), pipe::read_sections_file(tgt_path),
      threshold, /*case_fold=*/!mixed_case);
  std::string text;
  char buf[80];
  for (const pipe::SectionMatch& m : matches) {
    std::snprintf(buf, sizeof buf, "%zu\t%zu\t%.4f\n", m.src_index,
                  m.tgt_index, m.score);
    text += buf;
  }
  io::write_file(out, text);
  std::cout << matches.size() << " matched sections\n";
}

void cmd_pipeline(const std::string& config_path, const std::string& out_dir) {
  pipe::PipelineConfig config = pipe::load_config(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  const pipe::RunReport report = pipe::run_pipeline(config);
  std::printf("documents            %zu\n", report.documents);
  std::printf("sentences            %zu / %zu\n", report.src_sentences,
              report.tgt_sentences);
  for (const auto& [name, stats] : report.aligner_stats)
    std::printf("aligner %-12s %zu links, %zu pairs\n", name.c_str(),
                stats.first, stats.second);
  std::printf("ensemble             %zu -> %zu\n", report.ensemble_in,
              report.ensemble_out);
  if (report.filter_ran)
    std::printf("filter               %zu -> %zu (%.2f%% filtered)\n",
                report.filter_in, report.filter_out,
                report.filter_report.pct_filtered);
  std::printf("preprocess           %zu -> %zu\n", report.preprocess_in,
              report.preprocess_out);
  std::printf("leakage              %zu -> %zu (dropped %zu)\n",
              report.leakage_in, report.leakage_out, report.leakage_dropped);
  std::printf("final pairs          %zu\n", report.final_pairs);
  std::printf("outputs in           %s\n", config.output_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bitext: turn document-aligned bilingual text into a filtered "
      "sentence-aligned parallel corpus"};
  app.require_subcommand(1);

  std::string seg_rules, seg_in, seg_out;
  auto* seg_cmd = app.add_subcommand("segment", "Split raw text into sentences");
  seg_cmd->add_option("--rules", seg_rules, "abbreviation lexicon");
  seg_cmd->add_option("--in", seg_in, "raw text file")->required();
  seg_cmd->add_option("--out", seg_out, "sentence-per-line output")->required();
  seg_cmd->callback([&] { cmd_segment(seg_rules, seg_in, seg_out); });

  AlignOpts al;
  auto* al_cmd = app.add_subcommand("align", "Align two documents");
  al_cmd->add_option("--method", al.method, "length|bleu|bullets")->required();
  al_cmd->add_option("--src", al.src, "source file")->required();
  al_cmd->add_option("--tgt", al.tgt, "target file")->required();
  al_cmd->add_option("--dict", al.dict, "bilingual lexicon (length)");
  al_cmd->add_option("--translation", al.translation,
                     "line-aligned source translation (bleu)");
  al_cmd->add_option("--out", al.out, "links output")->required();
  al_cmd->add_option("--src-units-out", al.src_units_out, "units (bullets)");
  al_cmd->add_option("--tgt-units-out", al.tgt_units_out, "units (bullets)");
  al_cmd->add_option("--mean-ratio", al.mean_ratio, "target/source char ratio");
  al_cmd->add_option("--variance", al.variance, "length model variance");
  al_cmd->add_option("--dict-weight", al.dict_weight, "lexicon boost weight");
  al_cmd->add_option("--max-ngram", al.max_ngram, "BLEU order (bleu)");
  al_cmd->add_option("--anchor-threshold", al.anchor_threshold,
                     "minimum anchor similarity (bleu)");
  al_cmd->add_flag("--no-gap-fill", al.no_gap_fill, "anchors only (bleu)");
  al_cmd->callback([&] { cmd_align(al); });

  std::string ens_members, ens_in, ens_out;
  auto* ens_cmd = app.add_subcommand("ensemble", "Union per-aligner pair sets");
  ens_cmd->add_option("--members", ens_members, "comma-separated aligner names")
      ->required();
  ens_cmd->add_option("--in", ens_in, "directory with <member>/<doc>.tsv")
      ->required();
  ens_cmd->add_option("--out", ens_out, "pairs TSV")->required();
  ens_cmd->callback([&] { cmd_ensemble(ens_members, ens_in, ens_out); });

  FilterOpts fo;
  auto* f_cmd = app.add_subcommand("filter", "Margin-filter sentence pairs");
  f_cmd->add_option("--mode", fo.mode, "document|batch|global");
  f_cmd->add_option("--margin", fo.margin, "margin threshold");
  f_cmd->add_option("--k", fo.k, "neighbor count");
  f_cmd->add_option("--batch-size", fo.batch_size);
  f_cmd->add_option("--seed", fo.seed, "shuffle seed (batch mode)");
  f_cmd->add_option("--pairs", fo.pairs, "pairs TSV")->required();
  f_cmd->add_flag("--with-origin", fo.with_origin,
                  "pairs file carries a third doc-id column");
  f_cmd->add_option("--src-emb", fo.src_emb, "row-aligned embeddings")
      ->required();
  f_cmd->add_option("--tgt-emb", fo.tgt_emb, "row-aligned embeddings")
      ->required();
  f_cmd->add_option("--out", fo.out, "kept pairs TSV")->required();
  f_cmd->add_option("--report", fo.report, "report JSON");
  f_cmd->callback([&] { cmd_filter(fo); });

  std::string ev_pred, ev_gold, ev_out;
  bool ev_lc = false;
  auto* ev_cmd = app.add_subcommand("eval", "Precision/recall/F1 against gold");
  ev_cmd->add_option("--pred", ev_pred)->required();
  ev_cmd->add_option("--gold", ev_gold)->required();
  ev_cmd->add_flag("--lc", ev_lc, "case-fold before comparing");
  ev_cmd->add_option("--out", ev_out, "report JSON");
  ev_cmd->callback([&] { cmd_eval(ev_pred, ev_gold, ev_lc, ev_out); });

  std::string bl_hyp;
  std::vector<std::string> bl_refs;
  bool bl_lc = false;
  int bl_ngram = 4;
  auto* bl_cmd = app.add_subcommand("bleu", "Corpus BLEU (13a tokenization)");
  bl_cmd->add_option("--hyp", bl_hyp)->required();
  bl_cmd->add_option("--ref", bl_refs, "reference file (repeatable)")
      ->required();
  bl_cmd->add_flag("--lc", bl_lc, "lowercase");
  bl_cmd->add_option("--max-ngram", bl_ngram);
  bl_cmd->callback([&] { cmd_bleu(bl_hyp, bl_refs, bl_lc, bl_ngram); });

  PreprocessOpts po;
  auto* pp_cmd = app.add_subcommand("preprocess", "Normalize and clean pairs");
  pp_cmd->add_option("--steps", po.steps, "of: normalize,foreign,translit,dedup")
      ->required();
  pp_cmd->add_option("--table", po.table, "normalization table TSV");
  pp_cmd->add_option("--in", po.in)->required();
  pp_cmd->add_option("--out", po.out)->required();
  pp_cmd->add_option("--translit-side", po.translit_side, "src|tgt");
  pp_cmd->add_option("--letter-map", po.letter_map, "bullet letter map TSV");
  pp_cmd->add_option("--min-foreign-len", po.min_foreign_len);
  pp_cmd->callback([&] { cmd_preprocess(po); });

  std::string lk_train, lk_mode = "both", lk_out;
  std::vector<std::string> lk_evals;
  auto* lk_cmd =
      app.add_subcommand("leak", "Remove evaluation pairs from training data");
  lk_cmd->add_option("--train", lk_train)->required();
  lk_cmd->add_option("--eval", lk_evals, "eval TSV (repeatable)")->required();
  lk_cmd->add_option("--mode", lk_mode, "both|either");
  lk_cmd->add_option("--out", lk_out)->required();
  lk_cmd->callback([&] { cmd_leak(lk_train, lk_evals, lk_mode, lk_out); });

  EvalFilterOpts eo;
  auto* ef_cmd =
      app.add_subcommand("evalfilter", "Quality-filter an evaluation set");
  ef_cmd->add_option("--vocab", eo.vocab, "training token set")->required();
  ef_cmd->add_option("--translit-lexicon", eo.translit_lexicon,
                     "flagged transliteration tokens");
  ef_cmd->add_option("--rules", eo.rules, "thresholds JSON");
  ef_cmd->add_option("--in", eo.in)->required();
  ef_cmd->add_option("--out", eo.out)->required();
  ef_cmd->add_option("--rejected", eo.rejected, "rejected pairs + rule ids");
  ef_cmd->callback([&] { cmd_evalfilter(eo); });

  std::string sw_config, sw_gold, sw_out;
  double sw_from = 0.90, sw_to = 1.10, sw_step = 0.01;
  bool sw_lc = false;
  auto* sw_cmd =
      app.add_subcommand("sweep", "Margin sweep with P/R/F1 per threshold");
  sw_cmd->add_option("--config", sw_config)->required();
  sw_cmd->add_option("--gold", sw_gold)->required();
  sw_cmd->add_option("--from", sw_from);
  sw_cmd->add_option("--to", sw_to);
  sw_cmd->add_option("--step", sw_step);
  sw_cmd->add_flag("--lc", sw_lc);
  sw_cmd->add_option("--out", sw_out, "CSV output")->required();
  sw_cmd->callback([&] {
    cmd_sweep(sw_config, sw_gold, sw_from, sw_to, sw_step, sw_lc, sw_out);
  });

  std::string wm_src, wm_tgt, wm_out;
  double wm_threshold = 20.0;
  bool wm_mixed = false;
  auto* wm_cmd =
      app.add_subcommand("wiki-match", "Match article sections by BLEU");
  wm_cmd->add_option("--src-translated", wm_src, "translated source sections")
      ->required();
  wm_cmd->add_option("--tgt", wm_tgt, "target sections")->required();
  wm_cmd->add_option("--threshold", wm_threshold, "minimum BLEU, exclusive");
  wm_cmd->add_flag("--mixed-case", wm_mixed, "score without lowercasing");
  wm_cmd->add_option("--out", wm_out)->required();
  wm_cmd->callback(
      [&] { cmd_wiki_match(wm_src, wm_tgt, wm_threshold, wm_mixed, wm_out); });

  std::string pl_config, pl_out;
  auto* pl_cmd =
      app.add_subcommand("pipeline", "Run the full pipeline from a config");
  pl_cmd->add_option("--config", pl_config)->required();
  pl_cmd->add_option("--out", pl_out, "override output directory");
  pl_cmd->callback([&] { cmd_pipeline(pl_config, pl_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
