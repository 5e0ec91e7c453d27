#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sadic/directive.hpp"

namespace sadic {

inline std::set<Word> subwords_up_to(const Word& w, int max_len) {
  std::set<Word> out;
  for (size_t i = 0; i < w.size(); ++i)
    for (size_t len = 1; len <= static_cast<size_t>(max_len) && i + len <= w.size(); ++len)
      out.insert(Word(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i + len)));
  return out;
}

namespace detail {

// Level-language recursion on bounded-length word sets:
//   V_n = seed(sigma_n) u step(sigma_n, V_{n+1})
// where seed collects the short subwords of all letter images and step pushes
// the successor level's short words through the substitution. A window of
// length <= L in an image spans at most L letters of the preimage, so these
// sets close the recursion exactly.
inline std::set<Word> lang_seed(const Substitution& s, int max_len) {
  std::set<Word> out;
  for (int a = 0; a < s.degree(); ++a) {
    auto sw = subwords_up_to(s.image(a), max_len);
    out.insert(sw.begin(), sw.end());
  }
  return out;
}

inline std::set<Word> lang_step(const Substitution& s, const std::set<Word>& next, int max_len) {
  std::set<Word> out;
  for (const Word& v : next) {
    auto sw = subwords_up_to(apply(s, v), max_len);
    out.insert(sw.begin(), sw.end());
  }
  return out;
}

inline std::set<Word> lang_full(const Substitution& s, const std::set<Word>& next, int max_len) {
  std::set<Word> out = lang_seed(s, max_len);
  auto st = lang_step(s, next, max_len);
  out.insert(st.begin(), st.end());
  return out;
}

}  // namespace detail

/// Exact (or depth-qualified) level-language values for a directive sequence,
/// organized by level class. For eventually periodic specs the values are the
/// least fixed point of the recursion on the cyclic position graph. For
/// increasing-runs specs the separator levels share one deep value and base
/// levels depend only on the distance to the next separator; the solved class
/// values are certified against a truncated simulation before being reported
/// exact.
class LevelAnalysis {
 public:
  static LevelAnalysis compute(const System& sys, int max_len, long long depth = 96) {
    switch (sys.spec().form()) {
      case DirectiveSpec::Form::EventuallyPeriodic:
        return compute_periodic(sys, max_len);
      case DirectiveSpec::Form::IncreasingRuns:
        return compute_runs(sys, max_len, depth);
      case DirectiveSpec::Form::ExplicitPrefix:
        return compute_prefix(sys, max_len, depth);
    }
    throw std::logic_error("unreachable");
  }

  bool exact() const { return exact_; }
  long long depth() const { return depth_; }
  int max_len() const { return max_len_; }
  const std::string& evidence() const { return evidence_; }

  /// Level language value at a given level (words of length <= max_len).
  const std::set<Word>& value_at(long long level) const {
    if (level < 0) throw std::out_of_range("negative level");
    if (level < static_cast<long long>(initial_.size()))
      return initial_[static_cast<size_t>(level)];
    if (!exact_) throw std::out_of_range("level beyond computed depth for inexact analysis");
    return recurring_values_.at(recurring_class_of(level));
  }

  long long available_levels() const {
    return exact_ ? std::numeric_limits<long long>::max()
                  : static_cast<long long>(initial_.size());
  }

  /// Class id of a deep level; valid for exact analyses at levels >= stable_from().
  size_t recurring_class_of(long long level) const {
    const DirectiveSpec& sp = spec_;
    if (sp.form() == DirectiveSpec::Form::EventuallyPeriodic) {
      long long pre = static_cast<long long>(sp.preperiod().size());
      long long per = static_cast<long long>(sp.period().size());
      if (level < pre) throw std::out_of_range("preperiod level has no recurring class");
      return static_cast<size_t>((level - pre) % per);
    }
    if (sp.form() == DirectiveSpec::Form::IncreasingRuns) {
      if (sp.index_at(level) == sp.separator()) return 0;
      long long m = 1;
      while (sp.index_at(level + m) != sp.separator()) ++m;  // distance to next separator
      return static_cast<size_t>(std::min<long long>(m, static_cast<long long>(orbit_len_)));
    }
    throw std::out_of_range("explicit prefixes have no recurring classes");
  }

  long long stable_from() const { return stable_from_; }

  /// Distinct values occurring at infinitely many levels, with labels.
  const std::vector<std::pair<std::string, std::set<Word>>>& recurring_classes() const {
    return recurring_labeled_;
  }

  std::set<Word> essential_union() const {
    std::set<Word> u;
    for (const auto& [label, v] : recurring_labeled_) u.insert(v.begin(), v.end());
    return u;
  }

  std::set<Word> all_levels_intersection() const {
    bool first = true;
    std::set<Word> acc;
    auto meet = [&](const std::set<Word>& v) {
      if (first) { acc = v; first = false; return; }
      std::set<Word> m;
      for (const Word& w : acc)
        if (v.count(w)) m.insert(w);
      acc = std::move(m);
    };
    for (long long n = 0; n < static_cast<long long>(initial_.size()); ++n) meet(initial_[static_cast<size_t>(n)]);
    for (const auto& [label, v] : recurring_labeled_) meet(v);
    return acc;
  }

  std::set<Word> union_of_initial() const {
    std::set<Word> u;
    for (const auto& v : initial_) u.insert(v.begin(), v.end());
    return u;
  }

 private:
  static LevelAnalysis compute_periodic(const System& sys, int max_len) {
    const DirectiveSpec& sp = sys.spec();
    long long pre = static_cast<long long>(sp.preperiod().size());
    long long per = static_cast<long long>(sp.period().size());
    long long total = pre + per;
    std::vector<std::set<Word>> v(static_cast<size_t>(total));
    auto succ = [&](long long i) { return i + 1 < total ? i + 1 : pre; };
    bool changed = true;
    while (changed) {
      changed = false;
      for (long long i = total - 1; i >= 0; --i) {
        auto next = detail::lang_full(sys.sub_at(i), v[static_cast<size_t>(succ(i))], max_len);
        if (next != v[static_cast<size_t>(i)]) {
          v[static_cast<size_t>(i)] = std::move(next);
          changed = true;
        }
      }
    }
    LevelAnalysis la;
    la.spec_ = sp;
    la.max_len_ = max_len;
    la.exact_ = true;
    la.depth_ = total;
    la.stable_from_ = pre;
    la.initial_.assign(v.begin(), v.begin() + static_cast<long>(pre));
    for (long long i = pre; i < total; ++i) {
      la.recurring_values_.push_back(v[static_cast<size_t>(i)]);
      la.recurring_labeled_.emplace_back(
          "period position " + std::to_string(i - pre) + " (" + sys.sub_at(i).name() + ")",
          v[static_cast<size_t>(i)]);
    }
    la.evidence_ = "least fixed point on the cyclic position graph";
    return la;
  }

  static LevelAnalysis compute_runs(const System& sys, int max_len, long long depth) {
    const DirectiveSpec& sp = sys.spec();
    const Substitution& base = sys.sub(sp.base());
    const Substitution& sep = sys.sub(sp.separator());

    // Monotone outer iteration for the separator-level value W and the deep
    // in-run value A* = lim_m S^m(W); bail out if the in-run orbit cycles.
    std::set<Word> w;
    std::vector<std::set<Word>> orbit;
    bool solved = false;
    for (int outer = 0; outer < 512 && !solved; ++outer) {
      orbit.clear();
      std::set<Word> cur = detail::lang_full(base, w, max_len);
      for (int m = 0; m < 4096; ++m) {
        orbit.push_back(cur);
        std::set<Word> nxt = detail::lang_full(base, cur, max_len);
        if (nxt == cur) break;
        cur = std::move(nxt);
        if (m == 4095) return compute_prefix(sys, max_len, depth);  // cycle, fall back
      }
      std::set<Word> w_next = detail::lang_full(sep, orbit.back(), max_len);
      if (w_next == w) solved = true;
      w = std::move(w_next);
    }
    if (!solved) return compute_prefix(sys, max_len, depth);

    size_t m_star = orbit.size();  // A_m = A* for m >= m_star

    // First position from which every later run has length >= m_star.
    long long k0 = 0;
    while (sp.run_length(k0) < static_cast<long long>(m_star)) ++k0;
    long long t_pos = 0;
    for (long long k = 0; k < k0; ++k) t_pos += sp.run_length(k) + 1;

    LevelAnalysis la;
    la.spec_ = sp;
    la.max_len_ = max_len;
    la.depth_ = depth;
    la.stable_from_ = t_pos;
    la.orbit_len_ = m_star;
    la.recurring_values_.push_back(w);  // class 0 = separator levels
    for (size_t m = 1; m <= m_star; ++m) la.recurring_values_.push_back(orbit[m - 1]);
    la.recurring_labeled_.emplace_back("separator levels (" + sep.name() + ")", w);
    for (size_t m = 1; m < m_star; ++m)
      la.recurring_labeled_.emplace_back(
          "base levels " + std::to_string(m) + " before a separator", orbit[m - 1]);
    la.recurring_labeled_.emplace_back("deep base levels (" + base.name() + ")",
                                       orbit[m_star - 1]);

    // Backward induction below t_pos from the certified class value.
    la.initial_.assign(static_cast<size_t>(t_pos), {});
    std::set<Word> cur = la.recurring_values_.at(la.recurring_class_of(t_pos));
    for (long long n = t_pos - 1; n >= 0; --n) {
      cur = detail::lang_full(sys.sub_at(n), cur, max_len);
      la.initial_[static_cast<size_t>(n)] = cur;
    }

    // Certification: a truncated simulation (empty tail) must reproduce the
    // candidate on a deep window; the candidate solves the recursion and the
    // truncation bounds the least solution from below, so equality pins it.
    long long guard = static_cast<long long>(2 * m_star) + 16;
    long long d2 = t_pos + guard;
    long long k = k0;
    for (int runs = 0; runs < 3; ++runs) { d2 += sp.run_length(k) + 1; ++k; }
    std::vector<std::set<Word>> trunc(static_cast<size_t>(d2 + 1));
    for (long long n = d2 - 1; n >= 0; --n)
      trunc[static_cast<size_t>(n)] =
          detail::lang_full(sys.sub_at(n), trunc[static_cast<size_t>(n + 1)], max_len);
    la.exact_ = true;
    for (long long n = 0; n + guard <= d2 && la.exact_; ++n) {
      const std::set<Word>& cand = n < t_pos
                                       ? la.initial_[static_cast<size_t>(n)]
                                       : la.recurring_values_.at(la.recurring_class_of(n));
      if (trunc[static_cast<size_t>(n)] != cand) la.exact_ = false;
    }
    if (!la.exact_) return compute_prefix(sys, max_len, depth);
    la.evidence_ = "class fixed point certified against depth-" + std::to_string(d2) +
                   " truncation; in-run values stabilize after " + std::to_string(m_star) +
                   " steps";
    return la;
  }

  static LevelAnalysis compute_prefix(const System& sys, int max_len, long long depth) {
    long long d = std::min<long long>(depth, sys.spec().resolvable());
    std::vector<std::set<Word>> v(static_cast<size_t>(d + 1));
    for (long long n = d - 1; n >= 0; --n)
      v[static_cast<size_t>(n)] =
          detail::lang_full(sys.sub_at(n), v[static_cast<size_t>(n + 1)], max_len);
    LevelAnalysis la;
    la.spec_ = sys.spec();
    la.max_len_ = max_len;
    la.exact_ = false;
    la.depth_ = d;
    la.stable_from_ = d;
    // Report only levels whose truncated value has had room to saturate.
    long long keep = std::max(std::min<long long>(d, 8), d - 32);
    la.initial_.assign(v.begin(), v.begin() + static_cast<long>(keep));
    la.evidence_ = "depth-" + std::to_string(d) + " truncation (tail unknown)";
    return la;
  }

  DirectiveSpec spec_ = DirectiveSpec::explicit_prefix({0});
  int max_len_ = 2;
  bool exact_ = false;
  long long depth_ = 0;
  long long stable_from_ = 0;
  size_t orbit_len_ = 0;
  std::vector<std::set<Word>> initial_;
  std::vector<std::set<Word>> recurring_values_;
  std::vector<std::pair<std::string, std::set<Word>>> recurring_labeled_;
  std::string evidence_;
};

struct LevelLanguage {
  long long level = 0;
  int max_len = 0;
  std::set<Word> words;
  bool exact = false;
  long long depth = 0;
};

inline LevelLanguage level_language(const System& sys, long long level, int max_len,
                                    long long depth = 96) {
  LevelAnalysis la = LevelAnalysis::compute(sys, max_len, std::max(depth, level + 48));
  LevelLanguage out;
  out.level = level;
  out.max_len = max_len;
  out.exact = la.exact();
  out.depth = la.depth();
  out.words = la.value_at(level);
  return out;
}

enum class EssentialStatus { FullyEssential, Essential, Transient, Absent };

inline const char* to_string(EssentialStatus s) {
  switch (s) {
    case EssentialStatus::FullyEssential: return "fully_essential";
    case EssentialStatus::Essential: return "essential";
    case EssentialStatus::Transient: return "transient";
    case EssentialStatus::Absent: return "absent";
  }
  return "?";
}

struct EssentialClassification {
  int max_len = 0;
  bool exact = false;
  long long depth = 0;
  std::map<Word, EssentialStatus> status;  // every word of length <= max_len
  std::map<Word, std::string> evidence;
  std::set<Word> fully_essential, essential, transient, absent;
};

inline EssentialClassification essential_words(const System& sys, int max_len,
                                               long long depth = 96) {
  LevelAnalysis la = LevelAnalysis::compute(sys, max_len, depth);
  EssentialClassification ec;
  ec.max_len = max_len;
  ec.exact = la.exact();
  ec.depth = la.depth();

  std::set<Word> ess = la.essential_union();
  std::set<Word> fully = la.all_levels_intersection();
  std::set<Word> seen = la.union_of_initial();
  seen.insert(ess.begin(), ess.end());

  // Enumerate all candidate words of length <= max_len.
  std::vector<Word> all;
  Word cur;
  auto rec = [&](auto&& self, int remaining) -> void {
    if (!cur.empty()) all.push_back(cur);
    if (remaining == 0) return;
    for (int a = 0; a < sys.alphabet().size(); ++a) {
      cur.push_back(a);
      self(self, remaining - 1);
      cur.pop_back();
    }
  };
  rec(rec, max_len);

  for (const Word& w : all) {
    EssentialStatus st;
    if (!la.exact()) {
      // Depth-qualified: statuses relative to the computed window.
      st = !seen.count(w) ? EssentialStatus::Absent
           : ess.count(w) ? EssentialStatus::Essential
                          : EssentialStatus::Transient;
      if (seen.count(w) && fully.count(w)) st = EssentialStatus::FullyEssential;
    } else if (fully.count(w)) {
      st = EssentialStatus::FullyEssential;
    } else if (ess.count(w)) {
      st = EssentialStatus::Essential;
    } else if (seen.count(w)) {
      st = EssentialStatus::Transient;
    } else {
      st = EssentialStatus::Absent;
    }
    ec.status[w] = st;
    switch (st) {
      case EssentialStatus::FullyEssential: ec.fully_essential.insert(w); break;
      case EssentialStatus::Essential: ec.essential.insert(w); break;
      case EssentialStatus::Transient: ec.transient.insert(w); break;
      case EssentialStatus::Absent: ec.absent.insert(w); break;
    }
    if (st == EssentialStatus::Essential) {
      std::string ev;
      for (const auto& [label, v] : la.recurring_classes())
        if (v.count(w)) ev += (ev.empty() ? "" : "; ") + label;
      ec.evidence[w] = ev;
    }
  }
  return ec;
}

/// All occurrence start positions of `pattern` in `text` (overlaps included).
inline std::vector<size_t> occurrences(const Word& text, const Word& pattern) {
  std::vector<size_t> pos;
  if (pattern.empty() || pattern.size() > text.size()) return pos;
  for (size_t i = 0; i + pattern.size() <= text.size(); ++i)
    if (std::equal(pattern.begin(), pattern.end(), text.begin() + static_cast<long>(i)))
      pos.push_back(i);
  return pos;
}

struct ReturnWordSet {
  std::set<Word> words;
  bool enough_occurrences = false;
};

/// Words between consecutive occurrences of `target` in `corpus`.
inline ReturnWordSet return_words(const Word& corpus, const Word& target) {
  ReturnWordSet out;
  auto pos = occurrences(corpus, target);
  if (pos.size() < 2) return out;
  out.enough_occurrences = true;
  for (size_t i = 0; i + 1 < pos.size(); ++i)
    out.words.insert(Word(corpus.begin() + static_cast<long>(pos[i]),
                          corpus.begin() + static_cast<long>(pos[i + 1])));
  return out;
}

/// Transition words from u to the next occurrence of v. Unshifted words start
/// with u and run up to (excluding) v; the shifted two-letter variant starts
/// at the second letter of u and ends at the first letter of v.
inline std::set<Word> transition_words(const Word& corpus, const Word& u, const Word& v,
                                       bool shifted = false) {
  std::set<Word> out;
  auto pu = occurrences(corpus, u);
  auto pv = occurrences(corpus, v);
  auto count_in = [](const Word& text, const Word& pat) {
    return occurrences(text, pat).size();
  };
  for (size_t p : pu) {
    size_t q = std::string::npos;
    for (size_t c : pv)
      if (c >= p + (shifted ? 1 : u.size())) { q = c; break; }
    if (q == std::string::npos) continue;
    if (!shifted) {
      if (q + v.size() > corpus.size()) continue;
      Word w(corpus.begin() + static_cast<long>(p), corpus.begin() + static_cast<long>(q));
      Word wv = w;
      wv.insert(wv.end(), v.begin(), v.end());
      size_t cu = count_in(wv, u), cv = count_in(wv, v);
      bool ok = (u == v) ? cu == 2 : (cu == 1 && cv == 1);
      if (ok) out.insert(std::move(w));
    } else {
      if (u.size() != 2 || v.size() != 2)
        throw std::invalid_argument("shifted transition words need two-letter anchors");
      if (q + 2 > corpus.size()) continue;
      Word w(corpus.begin() + static_cast<long>(p + 1), corpus.begin() + static_cast<long>(q + 1));
      Word awb(corpus.begin() + static_cast<long>(p), corpus.begin() + static_cast<long>(q + 2));
      size_t cu = count_in(awb, u), cv = count_in(awb, v);
      bool ok = (u == v) ? cu == 2 : (cu == 1 && cv == 1);
      if (ok) out.insert(std::move(w));
    }
  }
  return out;
}

}  // namespace sadic
