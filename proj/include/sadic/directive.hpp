#pragma once

#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <vector>

#include "sadic/core.hpp"

namespace sadic {

/// Finitely described infinite sequence of substitution indices.
///
/// Three forms:
///  - EventuallyPeriodic: explicit preperiod then a repeating period.
///  - IncreasingRuns: base^{r_0} sep base^{r_1} sep ... with
///    r_k = max(min_run, k + run_offset); runs grow without bound.
///  - ExplicitPrefix: a finite prefix; every analysis of such a spec is
///    depth-bounded and must say so.
class DirectiveSpec {
 public:
  enum class Form { EventuallyPeriodic, IncreasingRuns, ExplicitPrefix };

  static DirectiveSpec eventually_periodic(std::vector<int> preperiod, std::vector<int> period) {
    if (period.empty()) throw std::invalid_argument("period must be non-empty");
    DirectiveSpec s;
    s.form_ = Form::EventuallyPeriodic;
    s.preperiod_ = std::move(preperiod);
    s.period_ = std::move(period);
    return s;
  }

  static DirectiveSpec increasing_runs(int base, int separator, long long run_offset = 1,
                                       long long min_run = 1) {
    if (min_run < 1) throw std::invalid_argument("min_run must be >= 1");
    DirectiveSpec s;
    s.form_ = Form::IncreasingRuns;
    s.base_ = base;
    s.separator_ = separator;
    s.run_offset_ = run_offset;
    s.min_run_ = min_run;
    return s;
  }

  static DirectiveSpec explicit_prefix(std::vector<int> indices) {
    if (indices.empty()) throw std::invalid_argument("explicit prefix must be non-empty");
    DirectiveSpec s;
    s.form_ = Form::ExplicitPrefix;
    s.prefix_ = std::move(indices);
    return s;
  }

  Form form() const { return form_; }
  const std::vector<int>& preperiod() const { return preperiod_; }
  const std::vector<int>& period() const { return period_; }
  int base() const { return base_; }
  int separator() const { return separator_; }
  long long run_offset() const { return run_offset_; }
  long long min_run() const { return min_run_; }
  const std::vector<int>& prefix() const { return prefix_; }

  long long run_length(long long k) const { return std::max(min_run_, k + run_offset_); }

  /// Largest resolvable level (exclusive); unbounded except for prefixes.
  long long resolvable() const {
    return form_ == Form::ExplicitPrefix ? static_cast<long long>(prefix_.size())
                                         : std::numeric_limits<long long>::max();
  }

  int index_at(long long n) const {
    if (n < 0) throw std::out_of_range("negative level");
    switch (form_) {
      case Form::EventuallyPeriodic: {
        long long pre = static_cast<long long>(preperiod_.size());
        if (n < pre) return preperiod_[static_cast<size_t>(n)];
        return period_[static_cast<size_t>((n - pre) % static_cast<long long>(period_.size()))];
      }
      case Form::IncreasingRuns: {
        long long pos = n;
        for (long long k = 0;; ++k) {
          long long r = run_length(k);
          if (pos < r) return base_;
          pos -= r;
          if (pos == 0) return separator_;
          pos -= 1;
        }
      }
      case Form::ExplicitPrefix:
        if (n >= static_cast<long long>(prefix_.size()))
          throw std::out_of_range("level exceeds explicit prefix");
        return prefix_[static_cast<size_t>(n)];
    }
    throw std::logic_error("unreachable");
  }

  /// Substitution indices that occur at infinitely many levels.
  std::set<int> recurring_indices() const {
    switch (form_) {
      case Form::EventuallyPeriodic:
        return std::set<int>(period_.begin(), period_.end());
      case Form::IncreasingRuns:
        return {base_, separator_};
      case Form::ExplicitPrefix:
        return {};  // unknowable from a finite prefix
    }
    return {};
  }

  std::set<int> occurring_indices(long long probe_depth = 64) const {
    switch (form_) {
      case Form::EventuallyPeriodic: {
        std::set<int> s(preperiod_.begin(), preperiod_.end());
        s.insert(period_.begin(), period_.end());
        return s;
      }
      case Form::IncreasingRuns:
        return {base_, separator_};
      case Form::ExplicitPrefix:
        return std::set<int>(prefix_.begin(), prefix_.end());
    }
    (void)probe_depth;
    return {};
  }

  /// Adjacent index pairs (sigma_n, sigma_{n+1}) realized by the sequence,
  /// with an exactness flag (false for explicit prefixes, where the tail is
  /// unknown).
  std::pair<std::set<std::pair<int, int>>, bool> adjacent_pairs() const {
    std::set<std::pair<int, int>> out;
    switch (form_) {
      case Form::EventuallyPeriodic: {
        long long pre = static_cast<long long>(preperiod_.size());
        long long per = static_cast<long long>(period_.size());
        for (long long i = 0; i + 1 < pre + 2 * per; ++i)
          out.emplace(index_at(i), index_at(i + 1));
        return {out, true};
      }
      case Form::IncreasingRuns: {
        out.emplace(base_, separator_);
        out.emplace(separator_, base_);
        out.emplace(base_, base_);  // runs are unbounded
        return {out, true};
      }
      case Form::ExplicitPrefix: {
        for (size_t i = 0; i + 1 < prefix_.size(); ++i)
          out.emplace(prefix_[i], prefix_[i + 1]);
        return {out, false};
      }
    }
    return {out, false};
  }

  /// All distinct index windows of length len realized by the sequence, and
  /// the subset realized at infinitely many levels. Exact for the two
  /// infinite forms; prefix-bounded otherwise.
  struct WindowSet {
    std::set<std::vector<int>> all;
    std::set<std::vector<int>> recurring;
    bool exact = false;
  };

  WindowSet windows(int len) const {
    WindowSet ws;
    auto harvest = [&](long long from, long long to, std::set<std::vector<int>>& dst) {
      for (long long i = from; i + len <= to; ++i) {
        std::vector<int> w;
        for (int j = 0; j < len; ++j) w.push_back(index_at(i + j));
        dst.insert(std::move(w));
      }
    };
    switch (form_) {
      case Form::EventuallyPeriodic: {
        long long pre = static_cast<long long>(preperiod_.size());
        long long per = static_cast<long long>(period_.size());
        harvest(0, pre + 2 * per + len, ws.all);
        harvest(pre, pre + 2 * per + len, ws.recurring);
        ws.exact = true;
        return ws;
      }
      case Form::IncreasingRuns: {
        // Beyond the first run longer than len, every window is either all
        // base or crosses exactly one separator; both kinds recur.
        long long k = 0, start = 0;
        while (run_length(k) <= len) { start += run_length(k) + 1; ++k; }
        harvest(0, start + 3 * (len + run_length(k) + 1), ws.all);
        for (int i = 0; i <= len; ++i) {
          std::vector<int> w;
          for (int j = 0; j < len; ++j) w.push_back(j == i ? separator_ : base_);
          ws.recurring.insert(w);  // i == len gives the all-base window
          ws.all.insert(w);
        }
        ws.exact = true;
        return ws;
      }
      case Form::ExplicitPrefix: {
        harvest(0, static_cast<long long>(prefix_.size()), ws.all);
        ws.exact = false;
        return ws;
      }
    }
    return ws;
  }

 private:
  DirectiveSpec() = default;
  Form form_ = Form::ExplicitPrefix;
  std::vector<int> preperiod_, period_;
  int base_ = -1, separator_ = -1;
  long long run_offset_ = 1, min_run_ = 1;
  std::vector<int> prefix_;
};

struct HeightVector {
  long long level = 0;
  std::vector<BigInt> h;  // per letter, h_0(a) = 1
};

/// A directive sequence over a fixed table of named substitutions, with
/// internally synchronized caches for finite products and cumulative
/// incidence matrices. The spec itself is immutable; queries are pure.
class System {
 public:
  System(Alphabet alphabet, std::vector<Substitution> table, DirectiveSpec spec)
      : alphabet_(std::move(alphabet)), table_(std::move(table)), spec_(std::move(spec)) {
    if (table_.empty()) throw std::invalid_argument("substitution table must be non-empty");
    for (const auto& s : table_)
      if (s.alphabet() != alphabet_)
        throw std::invalid_argument("all substitutions must share the system alphabet");
    cumulative_.push_back(IntMatrix::identity(alphabet_.size()));
  }

  System(const System& o) : alphabet_(o.alphabet_), table_(o.table_), spec_(o.spec_) {
    cumulative_.push_back(IntMatrix::identity(alphabet_.size()));
  }
  System& operator=(const System&) = delete;

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<Substitution>& table() const { return table_; }
  const DirectiveSpec& spec() const { return spec_; }

  const Substitution& sub(int index) const { return table_.at(static_cast<size_t>(index)); }
  const Substitution& sub_at(long long n) const { return sub(spec_.index_at(n)); }

  std::vector<int> resolve_indices(long long n_terms) const {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(n_terms));
    for (long long i = 0; i < n_terms; ++i) out.push_back(spec_.index_at(i));
    return out;
  }

  /// sigma_{[n,N)} = sigma_n o sigma_{n+1} o ... o sigma_{N-1}, cached.
  Substitution product(long long n, long long N) const {
    if (!(0 <= n && n < N)) throw std::invalid_argument("need 0 <= n < N");
    if (N > spec_.resolvable()) throw std::out_of_range("range not resolvable");
    {
      std::shared_lock lock(mutex_);
      auto it = products_.find({n, N});
      if (it != products_.end()) return it->second;
    }
    Substitution result = sub_at(n);
    for (long long k = n + 1; k < N; ++k) result = compose(result, sub_at(k));
    std::unique_lock lock(mutex_);
    return products_.emplace(std::make_pair(n, N), std::move(result)).first->second;
  }

  /// Cumulative incidence matrix M_{[0,n)}; M_{[0,0)} is the identity.
  IntMatrix cumulative_matrix(long long n) const {
    if (n < 0) throw std::out_of_range("negative level");
    if (n > spec_.resolvable()) throw std::out_of_range("level exceeds explicit prefix");
    std::unique_lock lock(mutex_);
    while (static_cast<long long>(cumulative_.size()) <= n) {
      long long k = static_cast<long long>(cumulative_.size()) - 1;
      cumulative_.push_back(cumulative_.back() * incidence_of(spec_.index_at(k)));
    }
    return cumulative_[static_cast<size_t>(n)];
  }

  /// M_{[n,N)}.
  IntMatrix window_matrix(long long n, long long N) const {
    IntMatrix m = IntMatrix::identity(alphabet_.size());
    for (long long k = n; k < N; ++k) m = m * incidence_of(spec_.index_at(k));
    return m;
  }

  /// h_n(a) = |sigma_{[0,n)}(a)| = column sums of M_{[0,n)}.
  HeightVector heights(long long n) const {
    IntMatrix m = cumulative_matrix(n);
    HeightVector hv;
    hv.level = n;
    for (int a = 0; a < alphabet_.size(); ++a) hv.h.push_back(m.column_sum(a));
    return hv;
  }

  BigInt height_of_word(long long n, const Word& w) const {
    HeightVector hv = heights(n);
    BigInt s = 0;
    for (int x : w) s += hv.h.at(static_cast<size_t>(x));
    return s;
  }

  const IntMatrix& incidence_of(int index) const {
    std::call_once(inc_once_, [this] {
      incidences_.reserve(table_.size());
      for (const auto& s : table_) incidences_.push_back(incidence_matrix(s));
    });
    return incidences_.at(static_cast<size_t>(index));
  }

  /// True when every occurring substitution has constant length.
  bool constant_length() const {
    for (int i : spec_.occurring_indices())
      if (!classify(sub(i)).constant_length) return false;
    return true;
  }

  /// Image length of sigma_n (the tower growth factor q_n).
  long long length_at(long long n) const { return length_of(spec_.index_at(n)); }

  long long length_of(int index) const {
    const Substitution& s = sub(index);
    auto c = classify(s).constant_length;
    if (!c) throw std::invalid_argument("substitution " + s.name() + " is not constant-length");
    return static_cast<long long>(*c);
  }

  struct LengthProfile {
    bool constant_length = false;
    // distinct image lengths of occurring substitutions, with a flag telling
    // whether the length occurs at infinitely many levels
    std::vector<std::pair<long long, bool>> lengths;
    bool exact = true;  // false for explicit prefixes
  };

  LengthProfile length_profile() const {
    LengthProfile p;
    p.constant_length = constant_length();
    if (!p.constant_length) return p;
    p.exact = spec_.form() != DirectiveSpec::Form::ExplicitPrefix;
    std::set<int> rec = spec_.recurring_indices();
    std::map<long long, bool> seen;
    for (int i : spec_.occurring_indices()) {
      long long q = static_cast<long long>(*classify(sub(i)).constant_length);
      seen[q] = seen[q] || rec.count(i) != 0;
    }
    for (auto& [q, r] : seen) p.lengths.emplace_back(q, r);
    return p;
  }

 private:
  Alphabet alphabet_;
  std::vector<Substitution> table_;
  DirectiveSpec spec_;

  mutable std::shared_mutex mutex_;
  mutable std::map<std::pair<long long, long long>, Substitution> products_;
  mutable std::vector<IntMatrix> cumulative_;
  mutable std::once_flag inc_once_;
  mutable std::vector<IntMatrix> incidences_;
};

/// Telescoping with explicit cut points 0 < n_1 < n_2 < ... produces the
/// finite prefix sigma_{[0,n_1)}, sigma_{[n_1,n_2)}, ...
inline System telescope(const System& sys, const std::vector<long long>& cuts,
                        bool require_bounded = false, long long bound = 0) {
  if (cuts.empty()) throw std::invalid_argument("need at least one cut point");
  long long prev = 0;
  std::vector<Substitution> table;
  std::vector<int> indices;
  for (long long c : cuts) {
    if (c <= prev) throw std::invalid_argument("cut points must be strictly increasing from 0");
    if (require_bounded && c - prev > bound)
      throw std::invalid_argument("telescoping gap exceeds requested bound");
    Substitution s = sys.product(prev, c);
    int idx = -1;
    for (size_t i = 0; i < table.size(); ++i)
      if (table[i] == s) { idx = static_cast<int>(i); break; }
    if (idx < 0) { table.push_back(s); idx = static_cast<int>(table.size()) - 1; }
    indices.push_back(idx);
    prev = c;
  }
  return System(sys.alphabet(), std::move(table), DirectiveSpec::explicit_prefix(indices));
}

/// Telescoping an eventually periodic spec by grouping every m levels keeps
/// the form eventually periodic.
inline System telescope_every(const System& sys, long long m) {
  if (m < 1) throw std::invalid_argument("group size must be >= 1");
  const DirectiveSpec& sp = sys.spec();
  if (sp.form() != DirectiveSpec::Form::EventuallyPeriodic)
    throw std::invalid_argument("telescope_every applies to eventually periodic specs");
  long long pre = static_cast<long long>(sp.preperiod().size());
  long long per = static_cast<long long>(sp.period().size());
  long long pre_blocks = (pre + m - 1) / m;
  long long g = std::gcd(m, per);
  long long per_blocks = per / g;

  std::vector<Substitution> table;
  auto intern = [&](const Substitution& s) {
    for (size_t i = 0; i < table.size(); ++i)
      if (table[i] == s) return static_cast<int>(i);
    table.push_back(s);
    return static_cast<int>(table.size()) - 1;
  };
  std::vector<int> newpre, newper;
  for (long long b = 0; b < pre_blocks; ++b)
    newpre.push_back(intern(sys.product(b * m, (b + 1) * m)));
  for (long long b = 0; b < per_blocks; ++b)
    newper.push_back(intern(sys.product(pre_blocks * m + b * m, pre_blocks * m + (b + 1) * m)));
  return System(sys.alphabet(), std::move(table),
                DirectiveSpec::eventually_periodic(std::move(newpre), std::move(newper)));
}

/// Canonical bounded telescoping of an increasing-runs spec: merge every
/// separator with the first base substitution of the following run. The
/// level-0 shift is unchanged and the result is again increasing-runs.
inline System telescope_merge_separator(const System& sys) {
  const DirectiveSpec& sp = sys.spec();
  if (sp.form() != DirectiveSpec::Form::IncreasingRuns)
    throw std::invalid_argument("telescope_merge_separator applies to increasing-runs specs");
  if (sp.run_offset() != 1 || sp.min_run() != 1)
    throw std::invalid_argument("only the canonical run profile is supported");
  Substitution merged = compose(sys.sub(sp.separator()), sys.sub(sp.base()));
  std::vector<Substitution> table = {sys.sub(sp.base()), merged};
  // runs 1, 2, 3, ... become 1, 1, 2, 3, ... with the merged block between.
  return System(sys.alphabet(), std::move(table), DirectiveSpec::increasing_runs(0, 1, 0, 1));
}

struct PrimitivityReport {
  bool primitive_at_checked = false;
  std::optional<int> strongly_primitive_r;  // uniform window certified on all windows
  bool exact = false;                       // verdict covers the infinite tail
  std::vector<std::pair<long long, int>> first_positive_window;  // (level, width); -1 if none
  long long checked_levels = 0;
  int max_window = 0;
};

inline PrimitivityReport primitivity(const System& sys, int max_window = 16,
                                     long long check_levels = 32) {
  PrimitivityReport rep;
  rep.max_window = max_window;
  long long limit = std::min<long long>(check_levels, sys.spec().resolvable());
  rep.checked_levels = limit;
  rep.primitive_at_checked = true;
  for (long long n = 0; n < limit; ++n) {
    int found = -1;
    IntMatrix m = IntMatrix::identity(sys.alphabet().size());
    for (int w = 1; w <= max_window && n + w <= sys.spec().resolvable(); ++w) {
      m = m * sys.incidence_of(sys.spec().index_at(n + w - 1));
      if (m.positive()) { found = w; break; }
    }
    rep.first_positive_window.emplace_back(n, found);
    if (found < 0) rep.primitive_at_checked = false;
  }
  // Uniform r: every realized window of length r has a positive matrix.
  for (int r = 1; r <= max_window; ++r) {
    auto ws = sys.spec().windows(r);
    if (ws.all.empty()) break;
    bool all_positive = true;
    for (const auto& w : ws.all) {
      IntMatrix m = IntMatrix::identity(sys.alphabet().size());
      for (int idx : w) m = m * sys.incidence_of(idx);
      if (!m.positive()) { all_positive = false; break; }
    }
    if (all_positive) {
      rep.strongly_primitive_r = r;
      rep.exact = ws.exact;
      break;
    }
  }
  return rep;
}

}  // namespace sadic
