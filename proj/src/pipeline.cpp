#include "bitext/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <set>
#include <thread>
#include <unordered_map>

#include "bitext/ensemble.hpp"
#include "bitext/errors.hpp"
#include "bitext/io.hpp"
#include "bitext/utf8.hpp"

namespace bitext::pipe {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_absolute()) return path.lexically_normal().string();
  return (base / path).lexically_normal().string();
}

void require_file(const std::string& path, const std::string& what) {
  if (!fs::exists(path))
    throw ValidationError(what + " does not exist: '" + path + "'");
}

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> workers;
  const std::size_t w =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t t = 0; t < w; ++t)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : workers) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  if (!fs::exists(path))
    throw ValidationError("config does not exist: '" + path + "'");
  PipelineConfig config;
  config.raw_config = io::read_file(path);
  json j;
  try {
    j = json::parse(config.raw_config);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();

  try {
    config.seed = j.value("seed", std::uint64_t{0});
    config.jobs = j.value("jobs", 1);
    config.src_lang = j.value("src_lang", std::string("bn"));
    config.tgt_lang = j.value("tgt_lang", std::string("en"));
    config.output_dir = resolve(base, j.value("output_dir", std::string("out")));

    if (!j.contains("documents") || !j["documents"].is_array() ||
        j["documents"].empty())
      throw ValidationError("config: 'documents' must be a non-empty array");
    for (const auto& d : j["documents"]) {
      DocEntry e;
      e.pair_id = d.at("pair_id").get<std::string>();
      e.src_path = resolve(base, d.at("src").get<std::string>());
      e.tgt_path = resolve(base, d.at("tgt").get<std::string>());
      e.src_translated_path =
          resolve(base, d.value("src_translated", std::string()));
      config.documents.push_back(std::move(e));
    }
    if (j.contains("segmenter"))
      config.abbrev_path =
          resolve(base, j["segmenter"].value("abbreviations", std::string()));

    if (!j.contains("aligners") || !j["aligners"].is_array() ||
        j["aligners"].empty())
      throw ValidationError("config: 'aligners' must be a non-empty array");
    for (const auto& a : j["aligners"]) {
      AlignerSpec spec;
      spec.name = a.at("name").get<std::string>();
      spec.method = a.at("method").get<std::string>();
      spec.dict_path = resolve(base, a.value("dict", std::string()));
      spec.length_params.mean_ratio =
          a.value("mean_ratio", spec.length_params.mean_ratio);
      spec.length_params.variance =
          a.value("variance", spec.length_params.variance);
      spec.length_params.dict_weight =
          a.value("dict_weight", spec.length_params.dict_weight);
      spec.bleu_params.max_ngram =
          a.value("max_ngram", spec.bleu_params.max_ngram);
      spec.bleu_params.anchor_threshold =
          a.value("anchor_threshold", spec.bleu_params.anchor_threshold);
      spec.bleu_params.gap_fill = a.value("gap_fill", spec.bleu_params.gap_fill);
      config.aligners.push_back(std::move(spec));
    }

    if (j.contains("ensemble"))
      config.ensemble_members = j["ensemble"].get<std::vector<std::string>>();
    if (config.ensemble_members.empty())
      for (const auto& a : config.aligners)
        config.ensemble_members.push_back(a.name);

    if (j.contains("filter")) {
      const auto& f = j["filter"];
      config.filter.enabled = f.value("enabled", true);
      config.filter.params.k = f.value("k", 4);
      config.filter.params.margin = f.value("margin", 0.96);
      config.filter.params.batch_size = f.value("batch_size", std::size_t{1000});
      config.filter.params.seed = f.value("seed", config.seed);
      const std::string mode = f.value("mode", std::string("batch"));
      if (mode == "document")
        config.filter.params.mode = filt::Mode::document;
      else if (mode == "batch")
        config.filter.params.mode = filt::Mode::batch;
      else if (mode == "global")
        config.filter.params.mode = filt::Mode::global;
      else
        throw ValidationError("config: unknown filter mode '" + mode + "'");
      if (config.filter.enabled) {
        config.filter.src.sentences_path =
            resolve(base, f.at("src_embeddings").at("sentences").get<std::string>());
        config.filter.src.vectors_path =
            resolve(base, f.at("src_embeddings").at("vectors").get<std::string>());
        config.filter.tgt.sentences_path =
            resolve(base, f.at("tgt_embeddings").at("sentences").get<std::string>());
        config.filter.tgt.vectors_path =
            resolve(base, f.at("tgt_embeddings").at("vectors").get<std::string>());
      }
    }

    if (j.contains("preprocess")) {
      const auto& p = j["preprocess"];
      if (p.contains("steps"))
        config.preprocess.steps = p["steps"].get<std::vector<std::string>>();
      config.preprocess.table_path =
          resolve(base, p.value("table", std::string()));
      config.preprocess.translit_side = p.value("translit_side", std::string("src"));
      config.preprocess.letter_map_path =
          resolve(base, p.value("letter_map", std::string()));
    }

    if (j.contains("leakage")) {
      const auto& l = j["leakage"];
      for (const auto& e : l.at("eval_sets"))
        config.leakage.eval_paths.push_back(resolve(base, e.get<std::string>()));
      const std::string mode = l.value("mode", std::string("both"));
      if (mode == "both")
        config.leakage.mode = prep::LeakMode::both_sides;
      else if (mode == "either")
        config.leakage.mode = prep::LeakMode::either_side;
      else
        throw ValidationError("config: unknown leakage mode '" + mode + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }

  // Upfront validation: referenced files, aligner specs, member names.
  if (config.src_lang == config.tgt_lang)
    throw ValidationError("config: src_lang equals tgt_lang");
  std::set<std::string> ids, names;
  bool has_bleu = false;
  for (const auto& a : config.aligners) {
    if (!names.insert(a.name).second)
      throw ValidationError("config: duplicate aligner name '" + a.name + "'");
    if (a.method != "length" && a.method != "bleu" && a.method != "bullets")
      throw ValidationError("config: unknown aligner method '" + a.method + "'");
    if (a.method == "bleu") has_bleu = true;
    if (!a.dict_path.empty()) require_file(a.dict_path, "lexicon");
  }
  for (const auto& m : config.ensemble_members)
    if (!names.count(m))
      throw ValidationError("config: ensemble member '" + m +
                            "' is not a configured aligner");
  for (const auto& d : config.documents) {
    if (!ids.insert(d.pair_id).second)
      throw ValidationError("config: duplicate pair_id '" + d.pair_id + "'");
    require_file(d.src_path, "source document");
    require_file(d.tgt_path, "target document");
    if (has_bleu) {
      if (d.src_translated_path.empty())
        throw ValidationError("config: document '" + d.pair_id +
                              "' lacks src_translated required by a bleu aligner");
      require_file(d.src_translated_path, "translation");
    }
  }
  if (!config.abbrev_path.empty())
    require_file(config.abbrev_path, "abbreviation lexicon");
  if (config.filter.enabled) {
    require_file(config.filter.src.sentences_path, "embedding sentences");
    require_file(config.filter.src.vectors_path, "embedding vectors");
    require_file(config.filter.tgt.sentences_path, "embedding sentences");
    require_file(config.filter.tgt.vectors_path, "embedding vectors");
  }
  for (const auto& s : config.preprocess.steps) {
    if (s != "normalize" && s != "foreign" && s != "translit" && s != "dedup")
      throw ValidationError("config: unknown preprocess step '" + s + "'");
    if (s == "normalize" && config.preprocess.table_path.empty())
      throw ValidationError("config: preprocess step 'normalize' needs a table");
  }
  if (!config.preprocess.table_path.empty())
    require_file(config.preprocess.table_path, "normalization table");
  if (!config.preprocess.letter_map_path.empty())
    require_file(config.preprocess.letter_map_path, "letter map");
  if (config.preprocess.translit_side != "src" &&
      config.preprocess.translit_side != "tgt")
    throw ValidationError("config: translit_side must be 'src' or 'tgt'");
  for (const auto& e : config.leakage.eval_paths) require_file(e, "eval set");
  if (config.jobs < 1) throw ValidationError("config: jobs must be >= 1");
  return config;
}

namespace {

struct DocData {
  std::string raw_src;
  std::string raw_tgt;
  DocumentPair seg_pair;
  std::vector<std::string> translation;
};

struct Artifacts {
  seg::SegmenterRules rules;
  std::vector<DocData> docs;
  std::map<std::string, align::BilingualLexicon> dicts;
  // aligner name -> per-doc links / bullet results
  std::map<std::string, std::vector<std::vector<AlignmentLink>>> links;
  std::map<std::string, std::vector<align::BulletAlignResult>> bullets;
  ens::PerAligner per_aligner;
  std::map<std::string, std::pair<std::size_t, std::size_t>> aligner_stats;
  std::size_t ensemble_in = 0;
  std::vector<SentencePair> ensemble;
};

filt::EmbeddingMatrix load_vectors(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
    return filt::load_embeddings_binary(path);
  return filt::load_embeddings_text(path);
}

struct TextIndex {
  filt::EmbeddingMatrix vectors;
  std::unordered_map<std::string, std::size_t> rows;

  static TextIndex load(const EmbeddingLexicon& lex) {
    TextIndex idx;
    idx.vectors = load_vectors(lex.vectors_path);
    const auto sentences = io::read_sentence_file(lex.sentences_path);
    if (sentences.size() != idx.vectors.rows())
      throw StageError("filter: '" + lex.sentences_path + "' has " +
                       std::to_string(sentences.size()) + " sentences but '" +
                       lex.vectors_path + "' has " +
                       std::to_string(idx.vectors.rows()) + " rows");
    for (std::size_t i = 0; i < sentences.size(); ++i)
      idx.rows.emplace(collapse_ws(sentences[i]), i);
    return idx;
  }

  std::size_t lookup(const std::string& text, const char* side) const {
    const auto it = rows.find(text);
    if (it == rows.end())
      throw StageError(std::string("filter: no ") + side +
                       " embedding for sentence '" + text + "'");
    return it->second;
  }
};

std::map<char32_t, char32_t> load_letter_map(const std::string& path) {
  std::map<char32_t, char32_t> map;
  const auto lines = io::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(i + 1) +
                       ": expected letter<TAB>replacement");
    const auto from = utf8::decode(line.substr(0, tab)).cps;
    const auto to = utf8::decode(line.substr(tab + 1)).cps;
    if (from.size() != 1 || to.size() != 1)
      throw ParseError(path + ":" + std::to_string(i + 1) +
                       ": both fields must be single characters");
    map[utf8::to_lower(from[0])] = to[0];
  }
  return map;
}

Artifacts build_through_ensemble(const PipelineConfig& config,
                                 RunReport& report) {
  Artifacts art;
  art.rules = config.abbrev_path.empty() ? seg::default_rules()
                                         : seg::load_rules(config.abbrev_path);
  const std::size_t n_docs = config.documents.size();
  art.docs.resize(n_docs);

  const bool need_translation = std::any_of(
      config.aligners.begin(), config.aligners.end(),
      [](const AlignerSpec& a) { return a.method == "bleu"; });

  parallel_for(n_docs, config.jobs, [&](std::size_t i) {
    const DocEntry& entry = config.documents[i];
    try {
      DocData& d = art.docs[i];
      d.raw_src = io::read_file(entry.src_path);
      d.raw_tgt = io::read_file(entry.tgt_path);
      auto src_sents = seg::segment_to_sentences(d.raw_src, art.rules);
      auto tgt_sents = seg::segment_to_sentences(d.raw_tgt, art.rules);
      if (src_sents.empty() || tgt_sents.empty())
        throw StageError("segmentation produced an empty side");
      d.seg_pair = make_document_pair(
          make_document(config.src_lang, entry.pair_id + "/src",
                        std::move(src_sents)),
          make_document(config.tgt_lang, entry.pair_id + "/tgt",
                        std::move(tgt_sents)),
          entry.pair_id);
      if (need_translation) {
        d.translation = io::read_sentence_file(entry.src_translated_path);
        if (d.translation.size() != d.seg_pair.src.sentences.size())
          throw StageError("translation has " +
                           std::to_string(d.translation.size()) +
                           " lines, source segmented into " +
                           std::to_string(d.seg_pair.src.sentences.size()) +
                           " sentences");
      }
    } catch (const std::exception& e) {
      throw StageError("segment: document '" + entry.pair_id + "': " + e.what());
    }
  });

  report.documents = n_docs;
  for (const DocData& d : art.docs) {
    report.src_sentences += d.seg_pair.src.sentences.size();
    report.tgt_sentences += d.seg_pair.tgt.sentences.size();
  }

  for (const AlignerSpec& spec : config.aligners) {
    if (!spec.dict_path.empty())
      art.dicts.emplace(spec.name, align::BilingualLexicon::load(spec.dict_path));
    art.links[spec.name].resize(n_docs);
    if (spec.method == "bullets") art.bullets[spec.name].resize(n_docs);
  }

  for (const AlignerSpec& spec : config.aligners) {
    align::LengthAlignParams length_params = spec.length_params;
    const auto dict_it = art.dicts.find(spec.name);
    if (dict_it != art.dicts.end()) length_params.dictionary = &dict_it->second;

    auto& doc_links = art.links[spec.name];
    parallel_for(n_docs, config.jobs, [&](std::size_t i) {
      const DocData& d = art.docs[i];
      const std::string& pair_id = config.documents[i].pair_id;
      try {
        if (spec.method == "length") {
          doc_links[i] = align::align_length(d.seg_pair.src.sentences,
                                             d.seg_pair.tgt.sentences,
                                             length_params);
        } else if (spec.method == "bleu") {
          doc_links[i] = align::align_bleu(d.translation,
                                           d.seg_pair.tgt.sentences,
                                           spec.bleu_params);
        } else {
          auto result = align::align_bullets(d.raw_src, d.raw_tgt);
          doc_links[i] = result.links;
          art.bullets[spec.name][i] = std::move(result);
        }
      } catch (const std::exception& e) {
        throw StageError("align: aligner '" + spec.name + "', document '" +
                         pair_id + "': " + e.what());
      }
    });
  }

  // Expand links into per-document pair lists.
  for (const AlignerSpec& spec : config.aligners) {
    ens::DocPairs per_doc;
    std::size_t n_links = 0, n_pairs = 0;
    for (std::size_t i = 0; i < n_docs; ++i) {
      const DocData& d = art.docs[i];
      const std::string& pair_id = config.documents[i].pair_id;
      std::vector<SentencePair> pairs;
      try {
        if (spec.method == "bullets") {
          const auto& b = art.bullets[spec.name][i];
          DocumentPair unit_pair = make_document_pair(
              make_document(config.src_lang, pair_id + "/src-units",
                            b.src_units),
              make_document(config.tgt_lang, pair_id + "/tgt-units",
                            b.tgt_units),
              pair_id);
          pairs = expand_links(b.links, unit_pair);
        } else {
          pairs = expand_links(art.links[spec.name][i], d.seg_pair);
        }
      } catch (const std::exception& e) {
        throw StageError("align: aligner '" + spec.name + "', document '" +
                         pair_id + "': " + e.what());
      }
      n_links += art.links[spec.name][i].size();
      n_pairs += pairs.size();
      per_doc.emplace(pair_id, std::move(pairs));
    }
    art.aligner_stats[spec.name] = {n_links, n_pairs};
    art.per_aligner.emplace(spec.name, std::move(per_doc));
  }

  for (const std::string& member : config.ensemble_members)
    art.ensemble_in += art.aligner_stats.at(member).second;

  ens::DocPairs merged = ens::ensemble_union(art.per_aligner,
                                             config.ensemble_members);
  for (const DocEntry& entry : config.documents) {
    auto it = merged.find(entry.pair_id);
    if (it == merged.end()) continue;
    for (SentencePair& p : it->second) art.ensemble.push_back(std::move(p));
  }
  return art;
}

json filter_report_json(const filt::FilterReport& r) {
  json j;
  j["n_in"] = r.n_in;
  j["n_kept"] = r.n_kept;
  j["pct_filtered"] = r.pct_filtered;
  j["n_degenerate"] = r.n_degenerate;
  json batches = json::array();
  for (const auto& [in, kept] : r.batches)
    batches.push_back(json{{"in", in}, {"kept", kept}});
  j["batches"] = batches;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

std::string RunReport::to_json(bool include_timings) const {
  json j;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  json stages;
  stages["segment"] = {{"documents", documents},
                       {"src_sentences", src_sentences},
                       {"tgt_sentences", tgt_sentences}};
  json align = json::object();
  for (const auto& [name, stats] : aligner_stats)
    align[name] = {{"links", stats.first}, {"pairs", stats.second}};
  stages["align"] = align;
  stages["ensemble"] = {{"pairs_in", ensemble_in}, {"pairs_out", ensemble_out}};
  json filter;
  filter["ran"] = filter_ran;
  if (filter_ran) {
    filter["pairs_in"] = filter_in;
    filter["pairs_out"] = filter_out;
    filter["detail"] = filter_report_json(filter_report);
  }
  stages["filter"] = filter;
  stages["preprocess"] = {{"pairs_in", preprocess_in},
                          {"pairs_out", preprocess_out},
                          {"drops", preprocess_drops}};
  stages["leakage"] = {{"pairs_in", leakage_in},
                       {"pairs_out", leakage_out},
                       {"dropped", leakage_dropped}};
  j["stages"] = stages;
  j["final_pairs"] = final_pairs;
  if (include_timings) j["timings_ms"] = timings_ms;
  return j.dump(2) + "\n";
}

RunReport run_pipeline(const PipelineConfig& config) {
  RunReport report;
  report.seed = config.seed;
  report.config_hash = hex64(fnv1a64(config.raw_config));

  fs::create_directories(config.output_dir);
  const std::string sentinel = config.output_dir + "/.incomplete";
  io::write_file(sentinel, "run in progress\n");

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [](auto since) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - since)
        .count();
  };

  auto t_stage = std::chrono::steady_clock::now();
  Artifacts art = build_through_ensemble(config, report);
  report.ensemble_out = art.ensemble.size();
  report.timings_ms["segment_align_ensemble"] = elapsed_ms(t_stage);

  // Persist intermediates: segmented docs, per-aligner links and pairs.
  fs::create_directories(config.output_dir + "/segmented");
  for (std::size_t i = 0; i < art.docs.size(); ++i) {
    const std::string& id = config.documents[i].pair_id;
    io::write_sentence_file(config.output_dir + "/segmented/" + id + ".src.txt",
                            art.docs[i].seg_pair.src.sentences);
    io::write_sentence_file(config.output_dir + "/segmented/" + id + ".tgt.txt",
                            art.docs[i].seg_pair.tgt.sentences);
  }
  for (const AlignerSpec& spec : config.aligners) {
    const std::string dir = config.output_dir + "/links/" + spec.name;
    fs::create_directories(dir);
    std::vector<SentencePair> aligner_pairs;
    for (std::size_t i = 0; i < art.docs.size(); ++i) {
      const std::string& id = config.documents[i].pair_id;
      io::write_link_file(dir + "/" + id + ".links", art.links[spec.name][i]);
      if (spec.method == "bullets") {
        const auto& b = art.bullets[spec.name][i];
        io::write_sentence_file(dir + "/" + id + ".src_units.txt", b.src_units);
        io::write_sentence_file(dir + "/" + id + ".tgt_units.txt", b.tgt_units);
      }
      const auto& per_doc = art.per_aligner.at(spec.name).at(id);
      aligner_pairs.insert(aligner_pairs.end(), per_doc.begin(), per_doc.end());
    }
    fs::create_directories(config.output_dir + "/pairs");
    io::write_pair_file(config.output_dir + "/pairs/" + spec.name + ".tsv",
                        aligner_pairs);
  }
  io::write_pair_file(config.output_dir + "/ensemble.tsv", art.ensemble);

  std::vector<SentencePair> current = std::move(art.ensemble);

  if (config.filter.enabled) {
    t_stage = std::chrono::steady_clock::now();
    report.filter_ran = true;
    report.filter_in = current.size();
    const TextIndex src_idx = TextIndex::load(config.filter.src);
    const TextIndex tgt_idx = TextIndex::load(config.filter.tgt);
    filt::EmbeddingMatrix src_m, tgt_m;
    src_m.dim = src_idx.vectors.dim;
    tgt_m.dim = tgt_idx.vectors.dim;
    for (const SentencePair& p : current) {
      src_m.add_row(src_idx.vectors.row(src_idx.lookup(p.src_text, "source")));
      tgt_m.add_row(tgt_idx.vectors.row(tgt_idx.lookup(p.tgt_text, "target")));
    }
    filt::FilterResult result =
        filt::filter_pairs(current, src_m, tgt_m, config.filter.params);
    report.filter_out = result.kept.size();
    report.filter_report = result.report;
    io::write_pair_file(config.output_dir + "/filtered.tsv", result.kept);
    io::write_file(config.output_dir + "/filter_report.json",
                   filter_report_json(result.report).dump(2) + "\n");
    current = std::move(result.kept);
    report.timings_ms["filter"] = elapsed_ms(t_stage);
  }

  t_stage = std::chrono::steady_clock::now();
  report.preprocess_in = current.size();
  if (!config.preprocess.steps.empty()) {
    prep::NormalizationTable table;
    if (!config.preprocess.table_path.empty())
      table = prep::NormalizationTable::load(config.preprocess.table_path);
    std::map<char32_t, char32_t> letter_map;
    if (!config.preprocess.letter_map_path.empty())
      letter_map = load_letter_map(config.preprocess.letter_map_path);

    for (const std::string& step : config.preprocess.steps) {
      std::vector<SentencePair> next;
      next.reserve(current.size());
      std::size_t dropped = 0;
      if (step == "normalize") {
        for (SentencePair& p : current) {
          std::string src = collapse_ws(prep::normalize_text(p.src_text, table));
          std::string tgt = collapse_ws(prep::normalize_text(p.tgt_text, table));
          if (src.empty() || tgt.empty()) {
            ++dropped;
            continue;
          }
          p.src_text = std::move(src);
          p.tgt_text = std::move(tgt);
          next.push_back(std::move(p));
        }
      } else if (step == "foreign") {
        for (SentencePair& p : current) {
          auto kept = prep::remove_shared_foreign(p);
          if (kept)
            next.push_back(std::move(*kept));
          else
            ++dropped;
        }
      } else if (step == "translit") {
        const bool on_src = config.preprocess.translit_side == "src";
        for (SentencePair& p : current) {
          std::string& side = on_src ? p.src_text : p.tgt_text;
          side = prep::transliterate_dangling(side, letter_map);
          next.push_back(std::move(p));
        }
      } else {  // dedup
        next = prep::dedup(current);
        dropped = current.size() - next.size();
      }
      report.preprocess_drops[step] = dropped;
      current = std::move(next);
    }
  }
  report.preprocess_out = current.size();
  report.timings_ms["preprocess"] = elapsed_ms(t_stage);

  t_stage = std::chrono::steady_clock::now();
  report.leakage_in = current.size();
  if (!config.leakage.eval_paths.empty()) {
    std::vector<std::vector<SentencePair>> eval_sets;
    for (const std::string& path : config.leakage.eval_paths)
      eval_sets.push_back(io::read_pair_file(path));
    std::size_t dropped = 0;
    current = prep::remove_leakage(current, eval_sets, config.leakage.mode,
                                   &dropped);
    report.leakage_dropped = dropped;
  }
  report.leakage_out = current.size();
  report.timings_ms["leakage"] = elapsed_ms(t_stage);

  io::write_pair_file(config.output_dir + "/pairs.tsv", current);
  report.final_pairs = current.size();

  // Stage boundaries must telescope.
  if (report.filter_ran && report.filter_in != report.ensemble_out)
    throw StageError("report: ensemble/filter count mismatch");
  if (report.preprocess_in !=
      (report.filter_ran ? report.filter_out : report.ensemble_out))
    throw StageError("report: filter/preprocess count mismatch");
  if (report.leakage_in != report.preprocess_out)
    throw StageError("report: preprocess/leakage count mismatch");
  if (report.final_pairs != report.leakage_out)
    throw StageError("report: leakage/final count mismatch");

  report.timings_ms["total"] = elapsed_ms(t_start);
  io::write_file(config.output_dir + "/run_report.json", report.to_json());
  fs::remove(sentinel);
  return report;
}

std::vector<double> default_margin_grid() {
  std::vector<double> grid;
  for (int cents = 90; cents <= 110; ++cents)
    grid.push_back(static_cast<double>(cents) / 100.0);
  return grid;
}

std::vector<SweepRow> sweep_margin(const PipelineConfig& config,
                                   const std::vector<double>& margins,
                                   const metrics::GoldSet& gold) {
  RunReport scratch;
  Artifacts art = build_through_ensemble(config, scratch);
  const std::vector<SentencePair>& pairs = art.ensemble;

  if (!config.filter.enabled)
    throw ValidationError("sweep_margin: config has no enabled filter");
  const TextIndex src_idx = TextIndex::load(config.filter.src);
  const TextIndex tgt_idx = TextIndex::load(config.filter.tgt);
  filt::EmbeddingMatrix src_m, tgt_m;
  src_m.dim = src_idx.vectors.dim;
  tgt_m.dim = tgt_idx.vectors.dim;
  for (const SentencePair& p : pairs) {
    src_m.add_row(src_idx.vectors.row(src_idx.lookup(p.src_text, "source")));
    tgt_m.add_row(tgt_idx.vectors.row(tgt_idx.lookup(p.tgt_text, "target")));
  }
  const std::vector<double> scores =
      filt::margin_scores(pairs, src_m, tgt_m, config.filter.params);

  std::vector<SweepRow> rows;
  {
    SweepRow base;
    base.unfiltered = true;
    base.margin = -std::numeric_limits<double>::infinity();
    base.n_kept = pairs.size();
    const AlignReport r = metrics::precision_recall_f1(pairs, gold);
    base.precision = r.precision;
    base.recall = r.recall;
    base.f1 = r.f1;
    rows.push_back(base);
  }
  for (double m : margins) {
    SweepRow row;
    row.margin = m;
    std::vector<SentencePair> kept;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (scores[i] >= m) kept.push_back(pairs[i]);
    row.n_kept = kept.size();
    const AlignReport r = kept.empty()
                              ? make_align_report(0, gold.pairs.size(), 0)
                              : metrics::precision_recall_f1(kept, gold);
    row.precision = r.precision;
    row.recall = r.recall;
    row.f1 = r.f1;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "margin,n_kept,precision,recall,f1\n";
  char buf[128];
  for (const SweepRow& row : rows) {
    if (row.unfiltered)
      std::snprintf(buf, sizeof buf, "unfiltered,%zu,%.6f,%.6f,%.6f\n",
                    row.n_kept, row.precision, row.recall, row.f1);
    else
      std::snprintf(buf, sizeof buf, "%.2f,%zu,%.6f,%.6f,%.6f\n", row.margin,
                    row.n_kept, row.precision, row.recall, row.f1);
    out += buf;
  }
  return out;
}

std::vector<std::vector<std::string>> read_sections_file(
    const std::string& path) {
  std::vector<std::vector<std::string>> sections;
  std::vector<std::string> current;
  for (const std::string& line : io::read_lines(path)) {
    if (collapse_ws(line).empty()) {
      if (!current.empty()) sections.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(line);
    }
  }
  if (!current.empty()) sections.push_back(std::move(current));
  return sections;
}

std::vector<SectionMatch> match_wiki_sections(
    const std::vector<std::vector<std::string>>& src_sections_translated,
    const std::vector<std::vector<std::string>>& tgt_sections,
    double threshold, bool case_fold) {
  if (src_sections_translated.empty() || tgt_sections.empty()) return {};

  metrics::BleuParams params;
  params.case_fold = case_fold;
  auto join_tokens = [&](const std::vector<std::string>& sentences) {
    std::vector<std::string> tokens;
    for (const std::string& s : sentences) {
      auto toks = metrics::tokenize_13a(s, case_fold);
      tokens.insert(tokens.end(), toks.begin(), toks.end());
    }
    return tokens;
  };

  std::vector<std::vector<std::string>> hyp(src_sections_translated.size());
  std::vector<std::vector<std::string>> ref(tgt_sections.size());
  for (std::size_t i = 0; i < hyp.size(); ++i)
    hyp[i] = join_tokens(src_sections_translated[i]);
  for (std::size_t j = 0; j < ref.size(); ++j)
    ref[j] = join_tokens(tgt_sections[j]);

  struct Candidate {
    std::size_t i, j;
    double score;
  };
  std::vector<Candidate> best;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    Candidate c{i, 0, -1.0};
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const double s = metrics::corpus_bleu({hyp[i]}, {{ref[j]}}, params);
      if (s > c.score) {
        c.score = s;
        c.j = j;
      }
    }
    best.push_back(c);
  }
  std::stable_sort(best.begin(), best.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.i < b.i;
                   });
  std::vector<char> tgt_used(ref.size(), 0);
  std::vector<SectionMatch> matches;
  for (const Candidate& c : best) {
    if (c.score <= threshold) continue;
    if (tgt_used[c.j]) continue;
    tgt_used[c.j] = 1;
    matches.push_back(SectionMatch{c.i, c.j, c.score});
  }
  std::sort(matches.begin(), matches.end(),
            [](const SectionMatch& a, const SectionMatch& b) {
              return a.src_index < b.src_index;
            });
  return matches;
}

}  // namespace bitext::pipe
