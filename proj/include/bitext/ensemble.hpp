#pragma once

#include <map>
#include <string>
#include <vector>

#include "bitext/core.hpp"

namespace bitext::ens {

// doc_id -> pairs extracted from that document.
using DocPairs = std::map<std::string, std::vector<SentencePair>>;
// aligner name -> per-document pairs.
using PerAligner = std::map<std::string, DocPairs>;

// Per-document set union of the member aligners' pairs under
// whitespace-normalized (src, tgt) equality. Output is deterministic:
// per document, sorted by (src_text, tgt_text).
// Throws ValidationError on an unknown or empty member list.
DocPairs ensemble_union(const PerAligner& input,
                        const std::vector<std::string>& members);

// First letters of the member names, uppercased, in the given order.
std::string name_ensemble(const std::vector<std::string>& members);

}  // namespace bitext::ens
