#include "bitext/ensemble.hpp"

#include <set>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext::ens {

DocPairs ensemble_union(const PerAligner& input,
                        const std::vector<std::string>& members) {
  if (members.empty())
    throw ValidationError("ensemble_union: empty member list");
  for (const std::string& member : members)
    if (!input.count(member))
      throw ValidationError("ensemble_union: unknown aligner '" + member + "'");

  std::set<std::string> doc_ids;
  for (const std::string& member : members)
    for (const auto& [doc_id, pairs] : input.at(member)) doc_ids.insert(doc_id);

  DocPairs out;
  for (const std::string& doc_id : doc_ids) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const std::string& member : members) {
      const DocPairs& per_doc = input.at(member);
      const auto it = per_doc.find(doc_id);
      if (it == per_doc.end()) continue;
      for (const SentencePair& p : it->second)
        seen.emplace(collapse_ws(p.src_text), collapse_ws(p.tgt_text));
    }
    std::vector<SentencePair>& merged = out[doc_id];
    for (const auto& [src, tgt] : seen)
      merged.push_back(make_sentence_pair(src, tgt, doc_id));
  }
  return out;
}

std::string name_ensemble(const std::vector<std::string>& members) {
  if (members.empty())
    throw ValidationError("name_ensemble: empty member list");
  std::string name;
  for (const std::string& member : members) {
    if (member.empty())
      throw ValidationError("name_ensemble: empty member name");
    const auto dec = utf8::decode(member);
    char32_t first = dec.cps[0];
    if (first >= U'a' && first <= U'z') first -= 32;
    utf8::append(name, first);
  }
  return name;
}

}  // namespace bitext::ens
