#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bitext/aligners.hpp"
#include "bitext/errors.hpp"
#include "bitext/io.hpp"
#include "bitext/utf8.hpp"

namespace bitext::align {

double BeadPriors::get(Bead b) const {
  switch (b) {
    case Bead::OneOne: return one_one;
    case Bead::OneZero: return one_zero;
    case Bead::ZeroOne: return zero_one;
    case Bead::TwoOne: return two_one;
    case Bead::OneTwo: return one_two;
    case Bead::TwoTwo: return two_two;
  }
  throw std::invalid_argument("unknown bead type");
}

BilingualLexicon BilingualLexicon::load(const std::string& path) {
  BilingualLexicon lex;
  const std::vector<std::string> lines = io::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(path + ":" + std::to_string(i + 1) +
                       ": lexicon line needs exactly one TAB");
    auto lower = [](std::string_view s) {
      std::string out;
      for (char32_t cp : utf8::decode(s).cps)
        utf8::append(out, utf8::to_lower(cp));
      return out;
    };
    std::string src = lower(collapse_ws(line.substr(0, tab)));
    std::string tgt = lower(collapse_ws(line.substr(tab + 1)));
    if (src.empty() || tgt.empty())
      throw ParseError(path + ":" + std::to_string(i + 1) +
                       ": empty lexicon field");
    lex.entries[src].insert(tgt);
  }
  return lex;
}

namespace {

void check_params(const LengthAlignParams& p) {
  if (p.variance <= 0) throw std::invalid_argument("variance must be positive");
  if (p.mean_ratio <= 0)
    throw std::invalid_argument("mean_ratio must be positive");
  const double sum = p.priors.one_one + p.priors.one_zero + p.priors.zero_one +
                     p.priors.two_one + p.priors.one_two + p.priors.two_two;
  for (double v : {p.priors.one_one, p.priors.one_zero, p.priors.zero_one,
                   p.priors.two_one, p.priors.one_two, p.priors.two_two})
    if (v <= 0) throw std::invalid_argument("bead priors must be positive");
  if (sum > 1.2) throw std::invalid_argument("bead priors sum above 1.2");
}

// log(erfc(y)) for y >= 0 without underflow.
double log_erfc(double y) {
  if (y < 20.0) return std::log(std::erfc(y));
  // Asymptotic: erfc(y) ~ exp(-y^2)/(y*sqrt(pi)) * (1 - 1/(2y^2) + ...)
  return -y * y - std::log(y * std::sqrt(std::numbers::pi)) +
         std::log1p(-0.5 / (y * y));
}

}  // namespace

double gale_church_cost(double l1, double l2, Bead bead,
                        const LengthAlignParams& params) {
  check_params(params);
  if (l1 < 0 || l2 < 0 || (l1 == 0 && l2 == 0))
    throw std::invalid_argument("gale_church_cost: bad lengths");
  const double c = params.mean_ratio;
  const double s2 = params.variance;
  double delta;
  if (l1 > 0) {
    delta = (l2 - l1 * c) / std::sqrt(l1 * s2);
  } else {
    // Role-swapped form for empty source side.
    delta = (l1 - l2 / c) / std::sqrt(l2 * s2);
  }
  // 2*(1 - Phi(|delta|)) == erfc(|delta|/sqrt(2))
  const double log_match = log_erfc(std::fabs(delta) / std::numbers::sqrt2);
  return -std::log(params.priors.get(bead)) - log_match;
}

namespace {

struct BeadShape {
  Bead bead;
  int ns, nt;
};

constexpr BeadShape kBeads[] = {
    {Bead::OneOne, 1, 1}, {Bead::OneZero, 1, 0}, {Bead::ZeroOne, 0, 1},
    {Bead::TwoOne, 2, 1}, {Bead::OneTwo, 1, 2}, {Bead::TwoTwo, 2, 2},
};

std::vector<std::string> lower_tokens(const std::string& text) {
  std::vector<std::string> toks;
  std::string current;
  for (char32_t cp : utf8::decode(text).cps) {
    if (utf8::is_space(cp)) {
      if (!current.empty()) toks.push_back(std::move(current));
      current.clear();
    } else {
      utf8::append(current, utf8::to_lower(cp));
    }
  }
  if (!current.empty()) toks.push_back(std::move(current));
  return toks;
}

}  // namespace

std::vector<AlignmentLink> align_length(const std::vector<std::string>& src,
                                        const std::vector<std::string>& tgt,
                                        const LengthAlignParams& params) {
  check_params(params);
  if (src.empty() || tgt.empty())
    throw std::invalid_argument("align_length: empty document side");
  const std::size_t n = src.size(), m = tgt.size();

  auto char_len = [](const std::string& s) {
    return static_cast<double>(utf8::decode(s).cps.size());
  };
  std::vector<double> ps(n + 1, 0.0), pt(m + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) ps[i + 1] = ps[i] + char_len(src[i]);
  for (std::size_t j = 0; j < m; ++j) pt[j + 1] = pt[j] + char_len(tgt[j]);

  const bool use_dict = params.dictionary && !params.dictionary->empty();
  std::vector<std::vector<std::string>> src_toks, tgt_toks;
  if (use_dict) {
    src_toks.reserve(n);
    tgt_toks.reserve(m);
    for (const auto& s : src) src_toks.push_back(lower_tokens(s));
    for (const auto& t : tgt) tgt_toks.push_back(lower_tokens(t));
  }

  // Fraction of bead source tokens with a lexicon translation in the bead's
  // target side.
  auto overlap = [&](std::size_t i, int ns, std::size_t j, int nt) {
    std::unordered_set<std::string> tset;
    for (int b = 0; b < nt; ++b)
      for (const auto& t : tgt_toks[j - 1 - static_cast<std::size_t>(b)])
        tset.insert(t);
    std::size_t total = 0, hits = 0;
    for (int a = 0; a < ns; ++a)
      for (const auto& s : src_toks[i - 1 - static_cast<std::size_t>(a)]) {
        ++total;
        const auto it = params.dictionary->entries.find(s);
        if (it == params.dictionary->entries.end()) continue;
        for (const auto& t : it->second)
          if (tset.count(t)) {
            ++hits;
            break;
          }
      }
    return total == 0 ? 0.0
                      : static_cast<double>(hits) / static_cast<double>(total);
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost((n + 1) * (m + 1), kInf);
  std::vector<signed char> back((n + 1) * (m + 1), -1);
  auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  cost[at(0, 0)] = 0.0;

  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      double best = kInf;
      signed char best_bead = -1;
      for (std::size_t b = 0; b < std::size(kBeads); ++b) {
        const auto& shape = kBeads[b];
        if (i < static_cast<std::size_t>(shape.ns) ||
            j < static_cast<std::size_t>(shape.nt))
          continue;
        const double prev =
            cost[at(i - static_cast<std::size_t>(shape.ns),
                    j - static_cast<std::size_t>(shape.nt))];
        if (prev == kInf) continue;
        const double l1 = ps[i] - ps[i - static_cast<std::size_t>(shape.ns)];
        const double l2 = pt[j] - pt[j - static_cast<std::size_t>(shape.nt)];
        if (l1 == 0 && l2 == 0) continue;
        double c = gale_church_cost(l1, l2, shape.bead, params);
        if (use_dict && shape.ns > 0 && shape.nt > 0)
          c -= params.dict_weight * overlap(i, shape.ns, j, shape.nt);
        if (prev + c < best) {
          best = prev + c;
          best_bead = static_cast<signed char>(b);
        }
      }
      cost[at(i, j)] = best;
      back[at(i, j)] = best_bead;
    }
  }

  if (cost[at(n, m)] == kInf)
    throw std::runtime_error("align_length: no covering bead sequence");

  std::vector<AlignmentLink> links;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const auto& shape = kBeads[static_cast<std::size_t>(back[at(i, j)])];
    std::vector<int> si, ti;
    for (int a = shape.ns; a > 0; --a)
      si.push_back(static_cast<int>(i) - a);
    for (int b = shape.nt; b > 0; --b)
      ti.push_back(static_cast<int>(j) - b);
    links.push_back(make_link(std::move(si), std::move(ti)));
    i -= static_cast<std::size_t>(shape.ns);
    j -= static_cast<std::size_t>(shape.nt);
  }
  std::reverse(links.begin(), links.end());
  return links;
}

}  // namespace bitext::align
