#pragma once

#include <string>
#include <vector>

#include "bitext/core.hpp"

namespace bitext::io {

// Whole-file read; throws IoError on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Lines split on LF; a trailing '\r' is rejected (files are LF-terminated
// UTF-8 by contract). Non-UTF-8 content raises ParseError with file, line
// and byte position.
std::vector<std::string> read_lines(const std::string& path);

// Segmented-document format: one sentence per line. Blank lines are format
// errors (they would silently break line alignment with sibling files).
std::vector<std::string> read_sentence_file(const std::string& path);
void write_sentence_file(const std::string& path,
                         const std::vector<std::string>& sentences);

// Link file: one link per line in the colon grammar.
std::vector<AlignmentLink> read_link_file(const std::string& path);
void write_link_file(const std::string& path,
                     const std::vector<AlignmentLink>& links);

// Sentence-pair TSV: src<TAB>tgt, optionally a third doc-id column when
// with_origin is set. No other TABs permitted.
std::vector<SentencePair> read_pair_file(const std::string& path,
                                         bool with_origin = false);
void write_pair_file(const std::string& path,
                     const std::vector<SentencePair>& pairs,
                     bool with_origin = false);

}  // namespace bitext::io
