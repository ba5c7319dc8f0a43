#include <string>
#include <vector>

#include "bitext/aligners.hpp"
#include "bitext/core.hpp"
#include "bitext/utf8.hpp"

namespace bitext::align {

namespace {

namespace u8 = bitext::utf8;

bool ends_unit(const std::string& trimmed) {
  if (trimmed.empty()) return false;
  const auto dec = u8::decode(trimmed);
  const char32_t last = dec.cps.back();
  return last == U';' || last == U'.' || last == U'।' || last == U'?' ||
         last == U'!';
}

// Law-document list markers: "১।", "12.", "(ক)", "(3)", "ক)", bullet chars.
bool starts_with_marker(const std::string& trimmed) {
  if (trimmed.empty()) return false;
  const auto dec = u8::decode(trimmed);
  const std::u32string& cps = dec.cps;
  const std::size_t n = cps.size();
  if (cps[0] == U'•' || cps[0] == U'▪' || cps[0] == U'‣')
    return true;
  std::size_t p = 0;
  bool paren = false;
  if (cps[p] == U'(') {
    paren = true;
    ++p;
  }
  std::size_t q = p;
  while (q < n && u8::is_digit(cps[q]) && q - p < 5) ++q;
  if (q > p) {
    if (paren) return q < n && cps[q] == U')';
    return q < n &&
           (cps[q] == U'.' || cps[q] == U'।' || cps[q] == U')') &&
           !(cps[q] == U'.' && q + 1 < n && u8::is_digit(cps[q + 1]));
  }
  if (q < n && u8::is_letter(cps[q]) && !u8::is_combining_mark(cps[q])) {
    ++q;
    while (q < n && u8::is_combining_mark(cps[q])) ++q;
    if (paren) return q < n && cps[q] == U')';
    return q < n && cps[q] == U')';
  }
  return false;
}

}  // namespace

std::vector<std::vector<std::string>> bullet_sections(std::string_view text) {
  std::vector<std::vector<std::string>> sections;
  std::vector<std::string> units;
  std::string current;

  auto close_unit = [&] {
    if (!current.empty()) units.push_back(std::move(current));
    current.clear();
  };
  auto close_section = [&] {
    close_unit();
    if (!units.empty()) sections.push_back(std::move(units));
    units.clear();
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string trimmed = collapse_ws(text.substr(pos, nl - pos));
    if (trimmed.empty()) {
      close_section();
    } else {
      if (starts_with_marker(trimmed)) close_unit();
      if (!current.empty()) current.push_back(' ');
      current += trimmed;
      if (ends_unit(trimmed)) close_unit();
    }
    if (nl == text.size()) break;
    pos = nl + 1;
  }
  close_section();
  return sections;
}

BulletAlignResult align_bullets(std::string_view src_doc,
                                std::string_view tgt_doc) {
  BulletAlignResult result;
  const auto src_secs = bullet_sections(src_doc);
  const auto tgt_secs = bullet_sections(tgt_doc);

  for (const auto& sec : src_secs)
    result.src_units.insert(result.src_units.end(), sec.begin(), sec.end());
  for (const auto& sec : tgt_secs)
    result.tgt_units.insert(result.tgt_units.end(), sec.begin(), sec.end());

  const std::size_t n_secs = std::min(src_secs.size(), tgt_secs.size());
  if (src_secs.size() != tgt_secs.size())
    result.diagnostics.push_back(
        "section count mismatch: " + std::to_string(src_secs.size()) + " vs " +
        std::to_string(tgt_secs.size()) + "; trailing sections skipped");

  std::size_t src_base = 0, tgt_base = 0;
  for (std::size_t k = 0; k < n_secs; ++k) {
    const std::size_t ns = src_secs[k].size(), nt = tgt_secs[k].size();
    if (ns == nt) {
      for (std::size_t u = 0; u < ns; ++u)
        result.links.push_back(
            make_link({static_cast<int>(src_base + u)},
                      {static_cast<int>(tgt_base + u)}));
    } else {
      result.diagnostics.push_back("section " + std::to_string(k) +
                                   " skipped: " + std::to_string(ns) + " vs " +
                                   std::to_string(nt) + " units");
    }
    src_base += ns;
    tgt_base += nt;
  }
  return result;
}

}  // namespace bitext::align
