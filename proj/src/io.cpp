#include "bitext/io.hpp"

#include <fstream>
#include <sstream>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failure on '" + path + "'");
}

std::vector<std::string> read_lines(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  std::size_t line_no = 1;
  while (pos <= content.size()) {
    if (pos == content.size()) {
      // No trailing newline: accept unless the file is empty.
      break;
    }
    std::size_t nl = content.find('\n', pos);
    const bool last = nl == std::string::npos;
    if (last) nl = content.size();
    std::string_view line(content.data() + pos, nl - pos);
    if (!line.empty() && line.back() == '\r')
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": CR line ending (files must be LF-terminated)");
    if (auto bad = utf8::find_invalid(line))
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": invalid UTF-8 at byte " + std::to_string(*bad) +
                       " of line");
    lines.emplace_back(line);
    if (last) break;
    pos = nl + 1;
    ++line_no;
  }
  return lines;
}

std::vector<std::string> read_sentence_file(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (collapse_ws(lines[i]).empty())
      throw ParseError(path + ":" + std::to_string(i + 1) +
                       ": blank line in sentence file");
  return lines;
}

void write_sentence_file(const std::string& path,
                         const std::vector<std::string>& sentences) {
  std::string out;
  for (const std::string& s : sentences) {
    out += s;
    out.push_back('\n');
  }
  write_file(path, out);
}

std::vector<AlignmentLink> read_link_file(const std::string& path) {
  std::vector<AlignmentLink> links;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      links.push_back(parse_link_line(lines[i]));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return links;
}

void write_link_file(const std::string& path,
                     const std::vector<AlignmentLink>& links) {
  std::string out;
  for (const AlignmentLink& link : links) {
    out += serialize_link(link);
    out.push_back('\n');
  }
  write_file(path, out);
}

std::vector<SentencePair> read_pair_file(const std::string& path,
                                         bool with_origin) {
  std::vector<SentencePair> pairs;
  const std::vector<std::string> lines = read_lines(path);
  const std::size_t want_tabs = with_origin ? 2 : 1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    std::vector<std::size_t> tabs;
    for (std::size_t p = line.find('\t'); p != std::string::npos;
         p = line.find('\t', p + 1))
      tabs.push_back(p);
    if (tabs.size() != want_tabs)
      throw ParseError(path + ":" + std::to_string(i + 1) + ": expected " +
                       std::to_string(want_tabs) + " TAB(s), found " +
                       std::to_string(tabs.size()));
    std::string src = line.substr(0, tabs[0]);
    std::string tgt = with_origin
                          ? line.substr(tabs[0] + 1, tabs[1] - tabs[0] - 1)
                          : line.substr(tabs[0] + 1);
    std::string origin = with_origin ? line.substr(tabs[1] + 1) : std::string();
    try {
      pairs.push_back(make_sentence_pair(std::move(src), std::move(tgt),
                                         std::move(origin)));
    } catch (const ValidationError& e) {
      throw ParseError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return pairs;
}

void write_pair_file(const std::string& path,
                     const std::vector<SentencePair>& pairs,
                     bool with_origin) {
  std::string out;
  for (const SentencePair& p : pairs) {
    out += p.src_text;
    out.push_back('\t');
    out += p.tgt_text;
    if (with_origin) {
      out.push_back('\t');
      out += p.origin_doc;
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

}  // namespace bitext::io
