#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sadic/language.hpp"

namespace sadic {

/// Prefix of sigma_{[0,n)}(a) of length min(max_len, h_n(a)). Truncating at
/// every level is sound: a prefix of the image is the image of a prefix.
inline Word level_word_prefix(const System& sys, int letter, int max_len, long long n) {
  Word w{letter};
  for (long long k = n - 1; k >= 0; --k) {
    w = apply(sys.sub_at(k), w);
    if (static_cast<int>(w.size()) > max_len) w.resize(static_cast<size_t>(max_len));
  }
  return w;
}

inline Substitution reverse_substitution(const Substitution& s) {
  std::vector<Word> images;
  for (int a = 0; a < s.degree(); ++a) {
    Word im = s.image(a);
    std::reverse(im.begin(), im.end());
    images.push_back(std::move(im));
  }
  return Substitution(s.alphabet(), std::move(images), s.name() + "~rev");
}

inline System reverse_system(const System& sys) {
  std::vector<Substitution> table;
  for (const auto& s : sys.table()) table.push_back(reverse_substitution(s));
  return System(sys.alphabet(), std::move(table), sys.spec());
}

/// Suffix of sigma_{[0,n)}(a) via the letter-reversed system.
inline Word level_word_suffix(const System& sys, const System& reversed, int letter, int max_len,
                              long long n) {
  Word w = level_word_prefix(reversed, letter, max_len, n);
  std::reverse(w.begin(), w.end());
  return w;
}

struct LimitPrefixReport {
  int letter = 0;
  int requested_len = 0;
  Word prefix;                // longest certified common prefix (or deepest value)
  bool full_length = false;   // prefix reached requested_len
  bool single_limit = false;  // all tail values agree
  int distinct_limit_count = 0;
  std::vector<Word> distinct_limits;
  std::vector<long long> nesting_levels;  // n where value at n is a prefix of value at n+1
  long long depth = 0;
};

namespace detail {

inline bool is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

/// Distinct values seen in the tail window of a sequence of words.
inline std::vector<Word> tail_values(const std::vector<Word>& vals) {
  if (vals.empty()) return {};
  size_t start = vals.size() > 16 ? vals.size() - vals.size() / 2 : 0;
  std::set<Word> s(vals.begin() + static_cast<long>(start), vals.end());
  return std::vector<Word>(s.begin(), s.end());
}

}  // namespace detail

inline LimitPrefixReport limit_prefix_report(const System& sys, int letter, int max_len,
                                             long long depth) {
  LimitPrefixReport rep;
  rep.letter = letter;
  rep.requested_len = max_len;
  rep.depth = depth;
  std::vector<Word> vals;
  std::vector<Word> full;
  for (long long n = 0; n <= depth; ++n) {
    Word p = level_word_prefix(sys, letter, max_len, n);
    if (n > 0 && detail::is_prefix(vals.back(), p) && p.size() >= vals.back().size())
      rep.nesting_levels.push_back(n - 1);
    if (static_cast<int>(p.size()) == max_len) full.push_back(p);
    vals.push_back(std::move(p));
  }
  rep.distinct_limits = detail::tail_values(full);
  rep.distinct_limit_count = static_cast<int>(rep.distinct_limits.size());
  rep.single_limit = rep.distinct_limit_count == 1;
  if (rep.single_limit) {
    rep.prefix = rep.distinct_limits.front();
    rep.full_length = true;
  } else if (!vals.empty()) {
    // Longest common prefix of the tail values, as the certified part.
    Word common = full.empty() ? vals.back() : full.back();
    for (const Word& v : rep.distinct_limits) {
      size_t k = 0;
      while (k < common.size() && k < v.size() && common[k] == v[k]) ++k;
      common.resize(k);
    }
    rep.prefix = common;
    rep.full_length = static_cast<int>(common.size()) == max_len;
  }
  return rep;
}

struct StraightnessReport {
  long long depth = 0;
  int window_len = 0;
  std::map<int, int> prefix_limit_counts;  // letter -> distinct right-limit count
  std::map<int, int> suffix_limit_counts;  // letter -> distinct left-limit count
  bool prefix_straight_to_depth = false;
  bool suffix_straight_to_depth = false;
  std::map<Word, int> pair_limit_counts;  // essential pair -> distinct two-sided limits
  bool straight_to_depth = false;
  bool strongly_prefix_straight = false;
  bool strongly_exact = false;  // local condition covers the whole sequence
  // Letters with provably equal right-infinite limit words (to depth).
  std::vector<std::set<int>> equal_prefix_classes;
};

inline bool strongly_prefix_straight_local(const System& sys) {
  auto [pairs, exact] = sys.spec().adjacent_pairs();
  (void)exact;
  for (auto [i, j] : pairs) {
    const Substitution& si = sys.sub(i);
    const Substitution& sj = sys.sub(j);
    for (int a = 0; a < sys.alphabet().size(); ++a) {
      int a_next = sj.image(a).front();
      if (si.image(a_next).front() != si.image(a).front()) return false;
    }
  }
  return true;
}

inline StraightnessReport straightness(const System& sys, long long depth = 40,
                                       int window_len = 48) {
  StraightnessReport rep;
  rep.depth = depth;
  rep.window_len = window_len;

  System rev = reverse_system(sys);
  std::map<int, LimitPrefixReport> pre, suf;
  for (int a = 0; a < sys.alphabet().size(); ++a) {
    pre[a] = limit_prefix_report(sys, a, window_len, depth);
    suf[a] = limit_prefix_report(rev, a, window_len, depth);
    rep.prefix_limit_counts[a] = pre[a].distinct_limit_count;
    rep.suffix_limit_counts[a] = suf[a].distinct_limit_count;
  }
  auto count_ok = [](const std::map<int, int>& m) {
    for (auto& [k, v] : m)
      if (v != 1) return false;
    return true;
  };
  rep.prefix_straight_to_depth = count_ok(rep.prefix_limit_counts);
  rep.suffix_straight_to_depth = count_ok(rep.suffix_limit_counts);

  // Two-sided limits per essential pair ab: joint (suffix of a, prefix of b)
  // over tail levels at which ab is present.
  LevelAnalysis la = LevelAnalysis::compute(sys, 2, depth + 16);
  std::set<Word> ess = la.essential_union();
  long long lo = std::max<long long>(la.stable_from(), depth / 2);
  bool all_single = true;
  for (const Word& w : ess) {
    if (w.size() != 2) continue;
    std::set<std::pair<Word, Word>> joint;
    for (long long n = lo; n <= depth; ++n) {
      if (!la.exact() && n >= la.available_levels()) break;
      if (!la.value_at(n).count(w)) continue;
      joint.emplace(level_word_suffix(sys, rev, w[0], window_len, n),
                    level_word_prefix(sys, w[1], window_len, n));
    }
    rep.pair_limit_counts[w] = static_cast<int>(joint.size());
    if (joint.size() != 1) all_single = false;
  }
  rep.straight_to_depth = all_single && !rep.pair_limit_counts.empty();

  rep.strongly_prefix_straight = strongly_prefix_straight_local(sys);
  rep.strongly_exact = sys.spec().adjacent_pairs().second;

  // Equal right-limit classes (used as eigenfunction-value constraints).
  std::vector<std::set<int>> classes;
  std::vector<int> assigned(static_cast<size_t>(sys.alphabet().size()), -1);
  for (int a = 0; a < sys.alphabet().size(); ++a) {
    if (assigned[static_cast<size_t>(a)] >= 0) continue;
    std::set<int> cls{a};
    assigned[static_cast<size_t>(a)] = static_cast<int>(classes.size());
    for (int b = a + 1; b < sys.alphabet().size(); ++b) {
      if (assigned[static_cast<size_t>(b)] >= 0) continue;
      if (pre[a].single_limit && pre[b].single_limit &&
          pre[a].distinct_limits == pre[b].distinct_limits) {
        cls.insert(b);
        assigned[static_cast<size_t>(b)] = static_cast<int>(classes.size());
      }
    }
    classes.push_back(std::move(cls));
  }
  rep.equal_prefix_classes = std::move(classes);
  return rep;
}

struct RecognizabilityEvidence {
  std::string name;
  bool rank_full = false;
  bool two_letter = false;
  bool permutative = false;  // self or a rotational conjugate, either side
  std::string detail;
  bool passes = false;  // two-sided sufficient condition
  bool one_sided_local = false;  // injective on letters + right-permutative + constant length
};

struct RecognizabilityReport {
  std::vector<RecognizabilityEvidence> per_substitution;
  bool all_pass = false;
  bool one_sided_all = false;
};

inline RecognizabilityReport recognizability_sufficient(const System& sys) {
  RecognizabilityReport rep;
  rep.all_pass = true;
  rep.one_sided_all = true;
  for (int i : sys.spec().occurring_indices()) {
    const Substitution& s = sys.sub(i);
    PredicateRecord pr = classify(s);
    RecognizabilityEvidence e;
    e.name = s.name();
    e.rank_full = incidence_matrix(s).rank() == s.degree();
    e.two_letter = s.degree() == 2;
    e.permutative = pr.left_permutative || pr.right_permutative ||
                    pr.conjugate_left_permutative || pr.conjugate_right_permutative;
    if (pr.left_permutative) e.detail = "left-permutative";
    else if (pr.right_permutative) e.detail = "right-permutative";
    else if (pr.conjugate_left_permutative) e.detail = "rotational conjugate left-permutative";
    else if (pr.conjugate_right_permutative) e.detail = "rotational conjugate right-permutative";
    e.passes = e.rank_full || e.two_letter || e.permutative;
    e.one_sided_local =
        pr.injective_on_letters && pr.right_permutative && pr.constant_length.has_value();
    rep.all_pass = rep.all_pass && e.passes;
    rep.one_sided_all = rep.one_sided_all && e.one_sided_local;
    rep.per_substitution.push_back(std::move(e));
  }
  return rep;
}

struct Representation {
  int offset = 0;   // k with 0 <= k < |sigma(v_0)|
  Word preimage;    // letters whose images tile the enforced window
  size_t covered = 0;
};

struct DesubstitutionResult {
  std::vector<Representation> representations;
  bool unique = false;
  bool truncated = false;  // enumeration cap hit
  size_t margin = 0;
};

/// All ways to read w as T^k sigma(v), matching w from position 0 up to
/// |w| - margin; the ragged right border is left unconstrained. A unique
/// representation is finite-scale recognizability evidence, several
/// representations witness the failure of one-sided recognizability.
inline DesubstitutionResult desubstitution_representations(
    const Word& w, const Substitution& s, std::optional<size_t> interior_margin = {},
    size_t cap = 64) {
  size_t margin = interior_margin.value_or(s.max_image_length());
  if (w.size() < 2 * s.max_image_length())
    throw std::invalid_argument("word too short to desubstitute at this scale");
  size_t enforced_end = w.size() > margin ? w.size() - margin : 0;

  DesubstitutionResult out;
  out.margin = margin;
  auto matches_at = [&](const Word& im, size_t im_from, size_t pos) {
    for (size_t i = im_from; i < im.size(); ++i) {
      size_t p = pos + (i - im_from);
      if (p >= enforced_end) return true;
      if (p >= w.size() || w[p] != im[i]) return false;
    }
    return true;
  };

  Word pre;
  int cur_offset = 0;
  auto dfs = [&](auto&& self, size_t pos) -> void {
    if (out.representations.size() >= cap) { out.truncated = true; return; }
    if (pos >= enforced_end) {
      out.representations.push_back({cur_offset, pre, pos});
      return;
    }
    for (int c = 0; c < s.degree(); ++c) {
      const Word& im = s.image(c);
      if (!matches_at(im, 0, pos)) continue;
      pre.push_back(c);
      self(self, pos + im.size());
      pre.pop_back();
    }
  };

  for (int v0 = 0; v0 < s.degree(); ++v0) {
    const Word& im = s.image(v0);
    for (size_t k = 0; k < im.size(); ++k) {
      if (!matches_at(im, k, 0)) continue;
      pre.assign(1, v0);
      cur_offset = static_cast<int>(k);
      dfs(dfs, im.size() - k);
    }
  }
  out.unique = out.representations.size() == 1;
  return out;
}

}  // namespace sadic
