#include "bitext/core.hpp"

#include <algorithm>
#include <charconv>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext {

std::string collapse_ws(std::string_view text) {
  const auto dec = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  bool seen_content = false;
  for (std::size_t i = 0; i < dec.cps.size(); ++i) {
    const char32_t cp = dec.cps[i];
    if (utf8::is_space(cp)) {
      pending_space = seen_content;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    seen_content = true;
    utf8::append(out, cp);
  }
  return out;
}

Document make_document(std::string lang, std::string doc_id,
                       std::vector<std::string> sentences) {
  Document doc;
  doc.lang = std::move(lang);
  doc.doc_id = std::move(doc_id);
  doc.sentences.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::string s = collapse_ws(sentences[i]);
    if (s.empty())
      throw ValidationError("document '" + doc.doc_id + "': sentence " +
                            std::to_string(i) + " is empty after trimming");
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

DocumentPair make_document_pair(Document src, Document tgt,
                                std::string pair_id) {
  if (src.doc_id == tgt.doc_id)
    throw ValidationError("document pair '" + pair_id +
                          "': src and tgt share doc_id '" + src.doc_id + "'");
  if (src.lang == tgt.lang)
    throw ValidationError("document pair '" + pair_id +
                          "': src and tgt share language '" + src.lang + "'");
  return DocumentPair{std::move(src), std::move(tgt), std::move(pair_id)};
}

namespace {

void normalize_side(std::vector<int>& idx) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
}

}  // namespace

AlignmentLink make_link(std::vector<int> src_idx, std::vector<int> tgt_idx) {
  normalize_side(src_idx);
  normalize_side(tgt_idx);
  if (src_idx.empty() && tgt_idx.empty())
    throw ValidationError("alignment link with both sides empty");
  for (int v : src_idx)
    if (v < 0) throw ValidationError("negative source index in link");
  for (int v : tgt_idx)
    if (v < 0) throw ValidationError("negative target index in link");
  return AlignmentLink{std::move(src_idx), std::move(tgt_idx)};
}

SentencePair make_sentence_pair(std::string src_text, std::string tgt_text,
                                std::string origin_doc,
                                std::optional<AlignmentLink> link) {
  for (const std::string* t : {&src_text, &tgt_text}) {
    if (t->empty()) throw ValidationError("sentence pair with an empty side");
    if (t->find('\t') != std::string::npos ||
        t->find('\n') != std::string::npos)
      throw ValidationError("sentence pair text contains TAB or newline: '" +
                            *t + "'");
  }
  SentencePair p;
  p.src_text = std::move(src_text);
  p.tgt_text = std::move(tgt_text);
  p.origin_doc = std::move(origin_doc);
  p.origin_link = std::move(link);
  return p;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  if (s <= 0.0) return 0.0;
  return 2.0 * precision * recall / s;
}

AlignReport make_align_report(std::size_t n_pred, std::size_t n_gold,
                              std::size_t n_correct) {
  if (n_correct > std::min(n_pred, n_gold))
    throw ValidationError("n_correct exceeds min(n_pred, n_gold)");
  AlignReport r;
  r.n_pred = n_pred;
  r.n_gold = n_gold;
  r.n_correct = n_correct;
  r.precision = n_pred == 0 ? 0.0
                            : static_cast<double>(n_correct) /
                                  static_cast<double>(n_pred);
  r.recall = n_gold == 0 ? 0.0
                         : static_cast<double>(n_correct) /
                               static_cast<double>(n_gold);
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

namespace {

std::vector<int> parse_index_list(std::string_view part, std::string_view line) {
  std::vector<int> out;
  if (part.empty()) return out;
  std::size_t pos = 0;
  while (pos <= part.size()) {
    const std::size_t comma = std::min(part.find(',', pos), part.size());
    const std::string_view field = part.substr(pos, comma - pos);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || value < 0)
      throw ParseError("malformed link line '" + std::string(line) + "'");
    out.push_back(value);
    if (comma == part.size()) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

AlignmentLink parse_link_line(std::string_view line) {
  const std::size_t colon = line.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("malformed link line '" + std::string(line) +
                     "': missing ':'");
  if (line.find(':', colon + 1) != std::string_view::npos)
    throw ParseError("malformed link line '" + std::string(line) +
                     "': more than one ':'");
  std::vector<int> src = parse_index_list(line.substr(0, colon), line);
  std::vector<int> tgt = parse_index_list(line.substr(colon + 1), line);
  if (src.empty() && tgt.empty())
    throw ParseError("malformed link line '" + std::string(line) +
                     "': both sides empty");
  return make_link(std::move(src), std::move(tgt));
}

std::string serialize_link(const AlignmentLink& link) {
  std::string out;
  for (std::size_t i = 0; i < link.src_idx.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(link.src_idx[i]);
  }
  out.push_back(':');
  for (std::size_t i = 0; i < link.tgt_idx.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(link.tgt_idx[i]);
  }
  return out;
}

std::vector<SentencePair> expand_links(const std::vector<AlignmentLink>& links,
                                       const DocumentPair& pair) {
  std::vector<SentencePair> out;
  out.reserve(links.size());
  auto join = [](const Document& doc, const std::vector<int>& idx) {
    std::string text;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0 || static_cast<std::size_t>(idx[i]) >= doc.sentences.size())
        throw ValidationError("index " + std::to_string(idx[i]) +
                              " out of range for document '" + doc.doc_id +
                              "' (" + std::to_string(doc.sentences.size()) +
                              " sentences)");
      if (i) text.push_back(' ');
      text += doc.sentences[static_cast<std::size_t>(idx[i])];
    }
    return text;
  };
  for (const AlignmentLink& link : links) {
    // Validate both sides even when the link yields no pair.
    std::string src_text = join(pair.src, link.src_idx);
    std::string tgt_text = join(pair.tgt, link.tgt_idx);
    if (link.src_idx.empty() || link.tgt_idx.empty()) continue;
    out.push_back(make_sentence_pair(std::move(src_text), std::move(tgt_text),
                                     pair.pair_id, link));
  }
  return out;
}

}  // namespace bitext
