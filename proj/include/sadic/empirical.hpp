#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "sadic/directive.hpp"
#include "sadic/rational_angle.hpp"

namespace sadic {

struct GeneratedPrefix {
  Word prefix;
  bool certified = false;  // deeper expansions agree on this prefix
  long long depth_used = 0;
  bool partial = false;  // memory cap hit
  std::string note;
};

namespace detail {

inline Word expand_prefix(const System& sys, int letter, size_t want, long long depth) {
  // Required prefix lengths level by level; one extra symbol absorbs rounding.
  std::vector<size_t> need(static_cast<size_t>(depth) + 1);
  need[0] = want;
  for (long long k = 0; k < depth; ++k) {
    size_t m = sys.sub_at(k).min_image_length();
    need[static_cast<size_t>(k) + 1] = need[static_cast<size_t>(k)] / std::max<size_t>(m, 1) + 1;
  }
  Word w{letter};
  for (long long k = depth - 1; k >= 0; --k) {
    const Substitution& s = sys.sub_at(k);
    Word next;
    next.reserve(need[static_cast<size_t>(k)] + s.max_image_length());
    for (int x : w) {
      const Word& im = s.image(x);
      next.insert(next.end(), im.begin(), im.end());
      if (next.size() >= need[static_cast<size_t>(k)]) break;
    }
    if (next.size() > need[static_cast<size_t>(k)]) next.resize(need[static_cast<size_t>(k)]);
    w = std::move(next);
  }
  if (w.size() > want) w.resize(want);
  return w;
}

}  // namespace detail

/// Length-n prefix of the right-infinite limit word generated by `letter`.
/// The prefix is certified by agreement of three successive expansion depths;
/// on disagreement the longest common certified prefix is returned flagged.
inline GeneratedPrefix generate_prefix(const System& sys, int letter, size_t n,
                                       size_t cap = 10'000'000) {
  GeneratedPrefix out;
  if (n > cap) {
    out.partial = true;
    out.note = "requested length exceeds memory cap";
    n = cap;
  }
  long long depth = 0;
  BigInt minh = 1;
  while (minh < BigInt(n) && depth + 1 <= sys.spec().resolvable()) {
    ++depth;
    HeightVector hv = sys.heights(depth);
    minh = hv.h.front();
    for (const BigInt& x : hv.h) minh = std::min(minh, x);
  }
  out.depth_used = depth;

  Word a = detail::expand_prefix(sys, letter, n, depth);
  if (depth + 2 <= sys.spec().resolvable()) {
    Word b = detail::expand_prefix(sys, letter, n, depth + 1);
    Word c = detail::expand_prefix(sys, letter, n, depth + 2);
    if (a == b && b == c) {
      out.certified = true;
      out.prefix = std::move(a);
      return out;
    }
    size_t k = 0;
    while (k < a.size() && k < b.size() && k < c.size() && a[k] == b[k] && b[k] == c[k]) ++k;
    out.prefix = Word(a.begin(), a.begin() + static_cast<long>(k));
    out.note = "expansion depths disagree beyond " + std::to_string(k) + " symbols";
    return out;
  }
  out.prefix = std::move(a);
  out.note = "depth bound reached before certification";
  return out;
}

enum class Trend { Persistent, Decaying, Inconclusive };

inline const char* to_string(Trend t) {
  switch (t) {
    case Trend::Persistent: return "persistent";
    case Trend::Decaying: return "decaying";
    case Trend::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct WeylThresholds {
  double persist_ratio = 0.5;  // score(4N) >= ratio * score(N)
  double persist_floor = 0.02;
  double decay_ratio = 0.25;
};

struct SpectralScore {
  // |(1/N) sum_{n<N} e^{2 pi i t n} 1_[a](x_n)| at N/4, N/2 and N symbols.
  std::vector<std::array<double, 3>> per_letter;
  std::array<double, 3> max_over_letters{0, 0, 0};
  std::array<size_t, 3> sample_sizes{0, 0, 0};
  Trend trend = Trend::Inconclusive;
};

namespace detail {

inline SpectralScore finish_score(std::vector<std::array<std::complex<double>, 3>>& acc,
                                  const std::array<size_t, 3>& marks,
                                  const WeylThresholds& th) {
  SpectralScore s;
  s.sample_sizes = marks;
  s.per_letter.resize(acc.size());
  for (size_t a = 0; a < acc.size(); ++a)
    for (int j = 0; j < 3; ++j) {
      double v = marks[static_cast<size_t>(j)] == 0
                     ? 0.0
                     : std::abs(acc[a][static_cast<size_t>(j)]) /
                           static_cast<double>(marks[static_cast<size_t>(j)]);
      s.per_letter[a][static_cast<size_t>(j)] = v;
      s.max_over_letters[static_cast<size_t>(j)] =
          std::max(s.max_over_letters[static_cast<size_t>(j)], v);
    }
  double early = s.max_over_letters[0], late = s.max_over_letters[2];
  if (late >= th.persist_ratio * early && late >= th.persist_floor)
    s.trend = Trend::Persistent;
  else if (late <= th.decay_ratio * early)
    s.trend = Trend::Decaying;
  else
    s.trend = Trend::Inconclusive;
  return s;
}

}  // namespace detail

/// Empirical spectral oracle: correlation of e^{2 pi i t n} with the letter
/// cylinder indicators along x, sampled at a quarter, half and the full
/// length so trends over doubling N are visible.
inline SpectralScore weyl_score(const Word& x, const RationalAngle& t, int alphabet_size,
                                const WeylThresholds& th = {}) {
  if (x.size() < 1000) throw std::invalid_argument("weyl_score needs at least 10^3 symbols");
  size_t n_total = x.size();
  std::array<size_t, 3> marks{n_total / 4, n_total / 2, n_total};
  std::vector<std::array<std::complex<double>, 3>> acc(static_cast<size_t>(alphabet_size));

  // Rational phases cycle through q exact values.
  BigInt q = t.denominator(), p = t.numerator();
  size_t ql = q.convert_to<size_t>();
  size_t pl = p.convert_to<size_t>();
  std::vector<std::complex<double>> table(ql);
  for (size_t k = 0; k < ql; ++k)
    table[k] = std::polar(1.0, 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(ql));

  size_t r = 0;
  std::vector<std::complex<double>> run(static_cast<size_t>(alphabet_size));
  size_t next_mark = 0;
  for (size_t n = 0; n < n_total; ++n) {
    run[static_cast<size_t>(x[n])] += table[r];
    r += pl;
    if (r >= ql) r -= ql;
    if (next_mark < 3 && n + 1 == marks[next_mark]) {
      for (size_t a = 0; a < run.size(); ++a) acc[a][next_mark] = run[a];
      ++next_mark;
    }
  }
  return detail::finish_score(acc, marks, th);
}

/// Same oracle for a real (not necessarily rational) candidate t.
inline SpectralScore weyl_score_real(const Word& x, double t, int alphabet_size,
                                     const WeylThresholds& th = {}) {
  if (x.size() < 1000) throw std::invalid_argument("weyl_score needs at least 10^3 symbols");
  size_t n_total = x.size();
  std::array<size_t, 3> marks{n_total / 4, n_total / 2, n_total};
  std::vector<std::array<std::complex<double>, 3>> acc(static_cast<size_t>(alphabet_size));
  std::vector<std::complex<double>> run(static_cast<size_t>(alphabet_size));
  double phase = 0.0;
  size_t next_mark = 0;
  for (size_t n = 0; n < n_total; ++n) {
    run[static_cast<size_t>(x[n])] += std::polar(1.0, 2.0 * M_PI * phase);
    phase += t;
    phase -= std::floor(phase);
    if (next_mark < 3 && n + 1 == marks[next_mark]) {
      for (size_t a = 0; a < run.size(); ++a) acc[a][next_mark] = run[a];
      ++next_mark;
    }
  }
  return detail::finish_score(acc, marks, th);
}

}  // namespace sadic
