#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sadic/empirical.hpp"
#include "sadic/language.hpp"
#include "sadic/limits.hpp"
#include "sadic/rational_angle.hpp"
#include "sadic/snf.hpp"

namespace sadic {

/// Raised when two independent certification routes disagree; callers treat
/// this as a hard failure (exit code 3 in the CLI).
struct CertificateConflictError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Coboundary groups from two-letter language data
// ---------------------------------------------------------------------------

struct CoboundarySolution {
  std::vector<RationalAngle> h;     // per letter
  std::vector<RationalAngle> fbar;  // per letter, normalized at the root
  BigInt order = 1;                 // order of this solution as a group element
};

struct CoboundaryGroupResult {
  bool connected = true;
  std::vector<std::string> warnings;
  long long free_rank = 0;               // directions admitting solutions of every order
  std::vector<BigInt> invariant_factors; // torsion invariants > 1
  std::vector<CoboundarySolution> generators;
  BigInt order = 1;  // order of the group generated by the reported generators
};

/// Solutions (h, fbar) of fbar(b) = fbar(a) h(a) over all pairs ab in the
/// two-letter language, as characters of the letter lattice modulo the
/// cycle relations of the pair graph (plus any limit-word equalities).
/// Free directions admit solutions of every finite order; the half-turn
/// solution is reported as their canonical generator.
inline CoboundaryGroupResult substitutive_coboundary_group(
    const Alphabet& alpha, const std::set<Word>& two_letter_words,
    const std::vector<std::set<int>>& limit_equalities = {}) {
  int d = alpha.size();
  CoboundaryGroupResult res;

  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<size_t>(d));  // (nbr, +-1 dir via edge src)
  std::set<std::pair<int, int>> edges;
  std::vector<bool> touched(static_cast<size_t>(d), false);
  for (const Word& w : two_letter_words) {
    if (w.size() != 2) continue;
    edges.emplace(w[0], w[1]);
    touched[static_cast<size_t>(w[0])] = touched[static_cast<size_t>(w[1])] = true;
  }
  if (edges.empty()) throw std::invalid_argument("two-letter language is empty");
  for (bool t : touched)
    if (!t) res.warnings.push_back("a letter occurs in no pair");
  for (auto [a, b] : edges) {
    adj[static_cast<size_t>(a)].emplace_back(b, +1);
    adj[static_cast<size_t>(b)].emplace_back(a, -1);
  }

  // Tree potentials pi(x) express fbar(x) - fbar(root) as a letter vector
  // applied to h: traversing edge a->b adds e_a.
  std::vector<std::vector<BigInt>> pot(static_cast<size_t>(d),
                                       std::vector<BigInt>(static_cast<size_t>(d), 0));
  std::vector<int> comp(static_cast<size_t>(d), -1);
  std::set<std::pair<int, int>> tree;
  int ncomp = 0;
  for (int root = 0; root < d; ++root) {
    if (comp[static_cast<size_t>(root)] >= 0) continue;
    comp[static_cast<size_t>(root)] = ncomp;
    std::vector<int> stack{root};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (auto [y, dir] : adj[static_cast<size_t>(x)]) {
        if (comp[static_cast<size_t>(y)] >= 0) continue;
        comp[static_cast<size_t>(y)] = ncomp;
        pot[static_cast<size_t>(y)] = pot[static_cast<size_t>(x)];
        if (dir > 0) {
          pot[static_cast<size_t>(y)][static_cast<size_t>(x)] += 1;  // edge x->y
          tree.emplace(x, y);
        } else {
          pot[static_cast<size_t>(y)][static_cast<size_t>(y)] -= 1;  // edge y->x
          tree.emplace(y, x);
        }
        stack.push_back(y);
      }
    }
    ++ncomp;
  }
  res.connected = ncomp == 1;
  if (!res.connected)
    res.warnings.push_back("pair graph is disconnected (non-minimality at this scale)");

  // One relation per non-tree edge; equalities identify potentials.
  std::vector<std::vector<BigInt>> rel;
  for (auto [a, b] : edges) {
    if (tree.count({a, b})) continue;
    std::vector<BigInt> r = pot[static_cast<size_t>(a)];
    r[static_cast<size_t>(a)] += 1;
    for (int i = 0; i < d; ++i) r[static_cast<size_t>(i)] -= pot[static_cast<size_t>(b)][static_cast<size_t>(i)];
    rel.push_back(std::move(r));
  }
  for (const auto& cls : limit_equalities) {
    if (cls.size() < 2) continue;
    int first = *cls.begin();
    for (int x : cls) {
      if (x == first) continue;
      if (comp[static_cast<size_t>(x)] != comp[static_cast<size_t>(first)]) continue;
      std::vector<BigInt> r = pot[static_cast<size_t>(x)];
      for (int i = 0; i < d; ++i) r[static_cast<size_t>(i)] -= pot[static_cast<size_t>(first)][static_cast<size_t>(i)];
      rel.push_back(std::move(r));
    }
  }

  SmithForm sf = smith_normal_form(rel, d);
  res.free_rank = d - sf.rank;

  auto make_solution = [&](const std::vector<BigInt>& column, const BigInt& den) {
    CoboundarySolution sol;
    sol.order = den;
    for (int i = 0; i < d; ++i) sol.h.emplace_back(column[static_cast<size_t>(i)], den);
    for (int x = 0; x < d; ++x) {
      RationalAngle f;
      for (int i = 0; i < d; ++i)
        f = f + sol.h[static_cast<size_t>(i)] * pot[static_cast<size_t>(x)][static_cast<size_t>(i)];
      sol.fbar.push_back(f);
    }
    return sol;
  };

  res.order = 1;
  for (int i = 0; i < sf.rank; ++i) {
    const BigInt& di = sf.invariants[static_cast<size_t>(i)];
    if (di <= 1) continue;
    res.invariant_factors.push_back(di);
    res.generators.push_back(make_solution(sf.v[static_cast<size_t>(i)], di));
    res.order *= di;
  }
  for (int j = sf.rank; j < d; ++j) {
    res.generators.push_back(make_solution(sf.v[static_cast<size_t>(j)], 2));
    res.order *= 2;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Rational limit test: existence of lim lambda^{q_0...q_n}
// ---------------------------------------------------------------------------

struct LengthSequence {
  std::vector<long long> preperiod;
  std::vector<long long> period;  // non-empty
};

struct RationalLimitResult {
  bool converges = false;
  std::optional<RationalAngle> limit;
  std::vector<BigInt> residue_cycle;  // residues of p q_0...q_n mod q in the eventual cycle
  long long cycle_start = 0;
};

/// Exact decision via the residue recursion r_{n+1} = r_n q_{n+1} mod q: the
/// residue sequence is eventually periodic and the limit exists iff the
/// eventual cycle is a fixed point.
inline RationalLimitResult rational_limit_test(const LengthSequence& lengths,
                                               const RationalAngle& t) {
  for (long long q : lengths.preperiod)
    if (q < 2) throw std::invalid_argument("lengths must be >= 2");
  for (long long q : lengths.period)
    if (q < 2) throw std::invalid_argument("lengths must be >= 2");
  if (lengths.period.empty()) throw std::invalid_argument("period must be non-empty");

  const BigInt q = t.denominator();
  BigInt r = t.numerator() % q;
  long long n = 0;
  for (long long len : lengths.preperiod) { r = (r * len) % q; ++n; }

  std::map<std::pair<BigInt, size_t>, long long> seen;
  std::vector<BigInt> residues;
  size_t pos = 0;
  RationalLimitResult out;
  for (;;) {
    auto key = std::make_pair(r, pos);
    auto it = seen.find(key);
    if (it != seen.end()) {
      long long start = it->second;
      out.cycle_start = n - static_cast<long long>(residues.size()) + start;
      out.residue_cycle.assign(residues.begin() + start, residues.end());
      bool constant = true;
      for (const BigInt& x : out.residue_cycle) constant = constant && x == out.residue_cycle.front();
      out.converges = constant;
      if (constant) out.limit = RationalAngle(out.residue_cycle.front(), q);
      return out;
    }
    seen[key] = static_cast<long long>(residues.size());
    r = (r * lengths.period[pos]) % q;
    residues.push_back(r);
    pos = (pos + 1) % lengths.period.size();
    ++n;
  }
}

// ---------------------------------------------------------------------------
// S-adic coboundary consistency for constant-length directive sequences
// ---------------------------------------------------------------------------

struct CoboundaryConstraint {
  Word pair;           // ab: fbar(b) - fbar(a) = theta
  RationalAngle theta;
  std::string source;  // class label and residue
};

struct SadicCoboundaryCheck {
  RationalAngle t;
  bool h_exists = false;
  std::optional<RationalAngle> h;
  std::vector<BigInt> divergence_cycle;
  bool consistent = false;
  std::vector<RationalAngle> fbar;
  std::vector<CoboundaryConstraint> constraints;
  std::vector<std::string> conflicts;  // witness descriptions, empty when consistent
  bool exact = true;
  long long depth = 0;
};

namespace detail {

struct ResidueClasses {
  // recurring (level-class id, residue of q_0...q_{n-1} mod q) combinations
  std::set<std::pair<size_t, BigInt>> recurring;
  bool h_exists = false;
  std::optional<BigInt> h_residue;
  std::vector<BigInt> divergence_cycle;
  bool exact = true;
};

/// Joint recurrence of level class and height residue. Exact for eventually
/// periodic specs (state cycle) and for increasing-runs specs via absorption
/// or in-run oscillation of the residue dynamics.
inline ResidueClasses residue_classes(const System& sys, const LevelAnalysis& la,
                                      const RationalAngle& t, long long depth) {
  ResidueClasses rc;
  const BigInt q = t.denominator();
  const DirectiveSpec& sp = sys.spec();

  if (sp.form() == DirectiveSpec::Form::EventuallyPeriodic) {
    long long pre = static_cast<long long>(sp.preperiod().size());
    long long per = static_cast<long long>(sp.period().size());
    BigInt r = t.numerator() % q;
    long long n = 0;
    while (n < pre) { r = (r * sys.length_at(n)) % q; ++n; }
    std::map<std::pair<BigInt, long long>, long long> seen;
    std::vector<std::pair<long long, BigInt>> trace;  // (position class, residue at level)
    for (;;) {
      long long posc = (n - pre) % per;
      auto key = std::make_pair(r, posc);
      auto it = seen.find(key);
      if (it != seen.end()) {
        for (long long i = it->second; i < static_cast<long long>(trace.size()); ++i)
          rc.recurring.emplace(static_cast<size_t>(trace[static_cast<size_t>(i)].first),
                               trace[static_cast<size_t>(i)].second);
        std::set<BigInt> cyc;
        for (long long i = it->second; i < static_cast<long long>(trace.size()); ++i)
          cyc.insert(trace[static_cast<size_t>(i)].second);
        rc.h_exists = cyc.size() == 1;
        if (rc.h_exists) rc.h_residue = *cyc.begin();
        else rc.divergence_cycle.assign(cyc.begin(), cyc.end());
        return rc;
      }
      seen[key] = static_cast<long long>(trace.size());
      trace.emplace_back(posc, r);
      r = (r * sys.length_at(n)) % q;
      ++n;
    }
  }

  if (sp.form() == DirectiveSpec::Form::IncreasingRuns) {
    BigInt qb(sys.length_of(sp.base()));
    BigInt qs(sys.length_of(sp.separator()));
    // Track (class, residue) along the actual sequence far enough that every
    // class has met the eventual residue behaviour.
    BigInt r = t.numerator() % q;
    std::map<std::pair<size_t, BigInt>, int> counts;
    long long stable = la.stable_from();
    long long d = std::max(depth, stable + 64);
    for (long long n = 0; n < d; ++n) {
      if (n >= stable && la.exact()) {
        auto key = std::make_pair(la.recurring_class_of(n), r);
        if (++counts[key] >= 2) rc.recurring.insert(key);
      }
      r = (r * BigInt(sys.length_at(n))) % q;
    }
    // Residues are eventually constant iff the run-boundary dynamics absorb:
    // inside ever-longer runs the residue must settle on a fixed point of
    // multiplication by the base length (a longer base cycle recurs at every
    // late run and forces oscillation), and the separator must fix it too.
    auto base_entry = [&](BigInt x, bool* cycle_is_fixed) {
      std::set<BigInt> orbit;
      while (!orbit.count(x)) { orbit.insert(x); x = (x * qb) % q; }
      *cycle_is_fixed = (x * qb) % q == x;
      return x;  // entry point of the base-multiplication cycle
    };
    bool fixed_ok = true;
    BigInt f = base_entry(r, &fixed_ok);
    std::set<BigInt> f_seen;
    bool absorbed = false;
    while (fixed_ok) {
      if ((f * qs) % q == f) { absorbed = true; break; }
      if (f_seen.count(f)) break;  // boundary cycle without absorption
      f_seen.insert(f);
      f = base_entry((f * qs) % q, &fixed_ok);
    }
    if (absorbed) {
      rc.h_exists = true;
      rc.h_residue = f;
    } else {
      rc.h_exists = false;
      std::set<BigInt> cyc{f, (f * qs) % q};
      BigInt x = (f * qb) % q;
      while (x != f && cyc.size() < 16) { cyc.insert(x); x = (x * qb) % q; }
      rc.divergence_cycle.assign(cyc.begin(), cyc.end());
    }
    return rc;
  }

  // Explicit prefix: depth-bounded observation only.
  rc.exact = false;
  BigInt r = t.numerator() % q;
  long long d = std::min(depth, sp.resolvable());
  std::vector<BigInt> tail;
  for (long long n = 0; n < d; ++n) {
    r = (r * BigInt(sys.length_at(n))) % q;
    if (n >= d - 8) tail.push_back(r);
  }
  std::set<BigInt> tailset(tail.begin(), tail.end());
  rc.h_exists = tailset.size() == 1;
  if (rc.h_exists) rc.h_residue = *tailset.begin();
  else rc.divergence_cycle.assign(tailset.begin(), tailset.end());
  return rc;
}

}  // namespace detail

/// Consistency of the coboundary candidate for e^{2 pi i t} on a
/// constant-length directive sequence: h is decided by the exact residue
/// dynamics and the transition-word constraints are harvested from pairs at
/// recurring (level class, residue) combinations, together with limit-word
/// equalities. Conflicts carry combinatorial witnesses.
inline SadicCoboundaryCheck sadic_coboundary_check(const System& sys, const RationalAngle& t,
                                                   long long depth = 300) {
  if (!sys.constant_length())
    throw std::invalid_argument("sadic_coboundary_check requires a constant-length spec");
  SadicCoboundaryCheck out;
  out.t = t;
  out.depth = depth;
  if (t.is_zero()) {
    out.h_exists = true;
    out.h = RationalAngle::zero();
    out.consistent = true;
    out.fbar.assign(static_cast<size_t>(sys.alphabet().size()), RationalAngle::zero());
    return out;
  }

  LevelAnalysis la = LevelAnalysis::compute(sys, 2, depth);
  detail::ResidueClasses rc = detail::residue_classes(sys, la, t, depth);
  out.exact = la.exact() && rc.exact;
  out.h_exists = rc.h_exists;
  if (rc.h_residue) out.h = RationalAngle(*rc.h_residue, t.denominator());
  out.divergence_cycle = rc.divergence_cycle;
  if (!out.h_exists) {
    std::string w = "lim lambda^{q_0...q_n} does not exist; residues cycle through {";
    for (size_t i = 0; i < out.divergence_cycle.size(); ++i)
      w += (i ? "," : "") + out.divergence_cycle[i].str();
    out.conflicts.push_back(w + "}/" + t.denominator().str());
  }

  // Pair constraints at recurring classes: for ab present at a level with
  // height residue rho, the single-letter transition word from a to b forces
  // fbar(b) - fbar(a) = rho/q.
  const auto& classes = la.recurring_classes();
  for (const auto& [cls, rho] : rc.recurring) {
    if (cls >= classes.size()) continue;
    RationalAngle theta(rho, t.denominator());
    for (const Word& w : classes[cls].second) {
      if (w.size() != 2) continue;
      out.constraints.push_back({w, theta, classes[cls].first + ", residue " + rho.str()});
    }
  }

  // Limit-word equalities contribute zero-difference constraints.
  StraightnessReport st = straightness(sys, std::min<long long>(depth / 4 + 16, 48));
  for (const auto& cls : st.equal_prefix_classes) {
    if (cls.size() < 2) continue;
    int first = *cls.begin();
    for (int x : cls) {
      if (x == first) continue;
      out.constraints.push_back(
          {Word{first, x}, RationalAngle::zero(), "equal limit words"});
    }
  }

  // Solve the difference system over Q/Z by breadth-first assignment.
  int d = sys.alphabet().size();
  std::vector<std::optional<RationalAngle>> f(static_cast<size_t>(d));
  std::vector<std::vector<std::pair<int, const CoboundaryConstraint*>>> edges(
      static_cast<size_t>(d));
  for (const auto& c : out.constraints) {
    edges[static_cast<size_t>(c.pair[0])].emplace_back(c.pair[1], &c);
    edges[static_cast<size_t>(c.pair[1])].emplace_back(c.pair[0], &c);
  }
  bool ok = out.h_exists;
  auto letter_name = [&](int x) { return sys.alphabet().letter(x); };
  for (int root = 0; root < d && ok; ++root) {
    if (f[static_cast<size_t>(root)]) continue;
    f[static_cast<size_t>(root)] = RationalAngle::zero();
    std::vector<int> stack{root};
    while (!stack.empty() && ok) {
      int x = stack.back();
      stack.pop_back();
      for (auto [y, c] : edges[static_cast<size_t>(x)]) {
        RationalAngle want = c->pair[0] == x ? *f[static_cast<size_t>(x)] + c->theta
                                             : *f[static_cast<size_t>(x)] - c->theta;
        if (!f[static_cast<size_t>(y)]) {
          f[static_cast<size_t>(y)] = want;
          stack.push_back(y);
        } else if (*f[static_cast<size_t>(y)] != want) {
          ok = false;
          // A length-2 cycle through a pair and its reverse is the classic
          // witness; name both rotations of the cycle word.
          std::string w;
          if (c->pair.size() == 2) {
            int a = c->pair[0], b = c->pair[1];
            w = letter_name(a) + letter_name(b) + letter_name(a) + "/" + letter_name(b) +
                letter_name(a) + letter_name(b);
          }
          out.conflicts.push_back("constraint " + letter_name(c->pair[0]) +
                                  letter_name(c->pair[1]) + " -> theta=" + c->theta.str() +
                                  " conflicts with assignment (witness cycle " + w +
                                  ", source: " + c->source + ")");
          break;
        }
      }
    }
  }
  out.consistent = ok;
  if (ok) {
    for (auto& v : f) out.fbar.push_back(v.value_or(RationalAngle::zero()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Height, eigenvalue membership and the maximal equicontinuous factor
// ---------------------------------------------------------------------------

struct HeightCertificate {
  BigInt height = 1;
  std::vector<std::pair<BigInt, std::string>> divisor_trail;
  std::optional<SadicCoboundaryCheck> accepted;
  bool oracle_checked = false;
  BigInt oracle_gcd = 0;
  std::string oracle_note;
  bool exact = true;
  long long depth = 0;
};

namespace detail {

inline std::vector<BigInt> divisors_of(const BigInt& n) {
  std::vector<BigInt> small, large;
  for (BigInt i = 1; i * i <= n; ++i) {
    if (n % i != 0) continue;
    small.push_back(i);
    if (i * i != n) large.push_back(n / i);
  }
  for (auto it = large.rbegin(); it != large.rend(); ++it) small.push_back(*it);
  return small;  // ascending
}

}  // namespace detail

/// Height of a finitary constant-length directive sequence: the largest
/// divisor of prod (q-1) coprime to every length whose coboundary candidate
/// 1/d is consistent; cross-checked against the gcd of coprime return-word
/// lengths on a generated prefix.
inline HeightCertificate compute_height(const System& sys, long long depth = 300,
                                        size_t oracle_prefix = 200000) {
  auto profile = sys.length_profile();
  if (!profile.constant_length)
    throw std::invalid_argument("height requires a constant-length spec");
  PrimitivityReport prim = primitivity(sys);
  if (!prim.primitive_at_checked)
    throw std::invalid_argument("height requires primitivity evidence");

  HeightCertificate cert;
  cert.depth = depth;
  BigInt p = 1;
  for (auto [q, rec] : profile.lengths) p *= BigInt(q - 1);
  auto coprime_to_all = [&](const BigInt& x) {
    for (auto [q, rec] : profile.lengths)
      if (boost::multiprecision::gcd(x, BigInt(q)) != 1) return false;
    return true;
  };

  std::vector<BigInt> divs = detail::divisors_of(p);
  for (auto it = divs.rbegin(); it != divs.rend(); ++it) {
    const BigInt& d = *it;
    if (!coprime_to_all(d)) {
      cert.divisor_trail.emplace_back(d, "skipped: shares a factor with a length");
      continue;
    }
    if (d == 1) {
      cert.height = 1;
      cert.divisor_trail.emplace_back(d, "accepted (trivial)");
      break;
    }
    SadicCoboundaryCheck chk = sadic_coboundary_check(sys, RationalAngle(1, d), depth);
    cert.exact = cert.exact && chk.exact;
    if (chk.consistent) {
      cert.height = d;
      cert.divisor_trail.emplace_back(d, "accepted");
      cert.accepted = std::move(chk);
      break;
    }
    cert.divisor_trail.emplace_back(
        d, "rejected: " + (chk.conflicts.empty() ? std::string("inconsistent")
                                                 : chk.conflicts.front()));
  }

  // Independent oracle: gcd of return-word lengths coprime to every length,
  // measured on a generated limit-word prefix.
  GeneratedPrefix gp = generate_prefix(sys, 0, oracle_prefix);
  for (int a = 1; a < sys.alphabet().size() && !gp.certified; ++a)
    gp = generate_prefix(sys, a, oracle_prefix);
  if (gp.certified && gp.prefix.size() >= 64) {
    Word target{gp.prefix[0]};
    auto pos = occurrences(gp.prefix, target);
    BigInt g = 0;
    for (size_t i = 0; i + 1 < pos.size(); ++i) {
      BigInt gap(pos[i + 1] - pos[i]);
      if (coprime_to_all(gap)) g = boost::multiprecision::gcd(g, gap);
    }
    if (g > 0) {
      cert.oracle_checked = true;
      cert.oracle_gcd = g;
      if (g != cert.height)
        throw CertificateConflictError(
            "height mismatch: constraint method " + cert.height.str() +
            " vs return-word gcd " + g.str() + " (bug or insufficient depth)");
    } else {
      cert.oracle_note = "no coprime return-word lengths in the generated prefix";
    }
  } else {
    cert.oracle_note = "prefix generation not certified; oracle skipped";
  }
  return cert;
}

struct MembershipVerdict {
  RationalAngle t;
  bool accept = false;
  bool qualified = false;  // verdict depends on lengths not known to recur
  std::string reason;
};

/// t = p/q is an additive eigenvalue of a constant-length system iff q
/// divides height * q_0...q_n for some n; decided exactly by divisibility
/// against the recurring lengths (arbitrarily high powers) and the finite
/// preperiod contribution.
inline MembershipVerdict eigenvalue_membership(const System& sys, const RationalAngle& t,
                                               const HeightCertificate& height) {
  MembershipVerdict v;
  v.t = t;
  if (t.is_zero()) {
    v.accept = true;
    v.reason = "constant eigenfunction";
    return v;
  }
  auto profile = sys.length_profile();
  if (!profile.constant_length)
    throw std::invalid_argument("eigenvalue_membership requires a constant-length spec");

  BigInt den = t.denominator();
  BigInt rec_prod = 1, all_prod = 1;
  for (auto [q, rec] : profile.lengths) {
    all_prod *= BigInt(q);
    if (rec) rec_prod *= BigInt(q);
  }
  // den | height * (recurring product)^K decides the recurring part exactly.
  long long bits = static_cast<long long>(boost::multiprecision::msb(den)) + 1;
  BigInt budget = height.height;
  for (long long i = 0; i < bits; ++i) budget *= rec_prod;
  if (den == 1 || budget % den == 0) {
    v.accept = true;
    v.reason = "denominator divides height * (recurring lengths)^k";
    return v;
  }
  // Preperiod lengths occur finitely often; using them qualifies the verdict.
  if (sys.spec().form() == DirectiveSpec::Form::EventuallyPeriodic) {
    BigInt pre_prod = 1;
    for (size_t i = 0; i < sys.spec().preperiod().size(); ++i)
      pre_prod *= BigInt(sys.length_at(static_cast<long long>(i)));
    BigInt b2 = budget * pre_prod;
    if (b2 % den == 0) {
      v.accept = true;
      v.qualified = true;
      v.reason = "accepted only via preperiod lengths (finitely many towers)";
      return v;
    }
  }
  v.accept = false;
  v.qualified = !profile.exact;
  v.reason = "denominator has a prime power dividing neither the height nor any recurring length";
  return v;
}

struct OdometerDescriptor {
  BigInt height = 1;
  std::vector<std::pair<long long, bool>> lengths;  // distinct value, recurs
  std::string display;
  std::vector<std::pair<std::string, bool>> hypotheses;
  bool certified = false;
};

/// Names the odometer Z_{h,(q_n)} together with the hypothesis checklist the
/// maximal-equicontinuous-factor claim rests on.
inline OdometerDescriptor mef(const System& sys, const HeightCertificate& height,
                              long long depth = 96) {
  OdometerDescriptor od;
  auto profile = sys.length_profile();
  if (!profile.constant_length)
    throw std::invalid_argument("mef requires a constant-length spec");
  od.height = height.height;
  od.lengths = profile.lengths;

  PrimitivityReport prim = primitivity(sys);
  EssentialClassification ec = essential_words(sys, 2, depth);
  bool fully_pair = false;
  for (const Word& w : ec.fully_essential)
    if (w.size() == 2) fully_pair = true;
  StraightnessReport st = straightness(sys);
  RecognizabilityReport rec = recognizability_sufficient(sys);

  od.hypotheses.emplace_back("finitary", true);
  od.hypotheses.emplace_back("primitive", prim.primitive_at_checked &&
                                              prim.strongly_primitive_r.has_value());
  od.hypotheses.emplace_back("fully essential length-2 word", fully_pair && ec.exact);
  od.hypotheses.emplace_back(
      "straightness evidence",
      st.strongly_prefix_straight || st.prefix_straight_to_depth || st.straight_to_depth);
  od.hypotheses.emplace_back("recognizability sufficient", rec.all_pass);
  od.certified = true;
  for (auto& [k, v] : od.hypotheses) od.certified = od.certified && v;
  od.certified = od.certified && height.exact && prim.exact;

  // When every length is a power of one prime p the odometer is the p-adic
  // group, whatever the mix of lengths.
  std::set<long long> primes;
  for (auto [q, r] : od.lengths) {
    long long x = q;
    for (long long p = 2; p * p <= x; ++p)
      while (x % p == 0) { primes.insert(p); x /= p; }
    if (x > 1) primes.insert(x);
  }
  if (od.height == 1 && primes.size() == 1) {
    od.display = "Z_" + std::to_string(*primes.begin());
  } else {
    std::string qs;
    for (auto [q, r] : od.lengths) qs += (qs.empty() ? "" : ",") + std::to_string(q);
    od.display = od.height == 1 ? "Z_(" + qs + ")" : "Z_{" + od.height.str() + ",(" + qs + ")}";
  }
  return od;
}

struct CobhamComparison {
  bool incompatible_lengths = false;  // some prime of a recurring length of A divides no recurring length of B
  bool qualified = false;             // a non-recurring length is present
  bool same_mef = false;
  std::string note;
};

inline CobhamComparison cobham_compare(const System& a, const HeightCertificate& ha,
                                       const System& b, const HeightCertificate& hb) {
  CobhamComparison out;
  auto pa = a.length_profile(), pb = b.length_profile();
  if (!pa.constant_length || !pb.constant_length)
    throw std::invalid_argument("cobham_compare requires constant-length specs");

  auto primes_of = [](long long q) {
    std::set<long long> ps;
    for (long long p = 2; p * p <= q; ++p)
      while (q % p == 0) { ps.insert(p); q /= p; }
    if (q > 1) ps.insert(q);
    return ps;
  };
  std::set<long long> prime_a, prime_b;
  bool nonrec = false;
  for (auto [q, rec] : pa.lengths) {
    if (!rec) { nonrec = true; continue; }
    auto ps = primes_of(q);
    prime_a.insert(ps.begin(), ps.end());
  }
  for (auto [q, rec] : pb.lengths) {
    if (!rec) { nonrec = true; continue; }
    auto ps = primes_of(q);
    prime_b.insert(ps.begin(), ps.end());
  }
  out.qualified = nonrec;
  for (long long p : prime_a)
    if (!prime_b.count(p)) out.incompatible_lengths = true;
  for (long long p : prime_b)
    if (!prime_a.count(p)) out.incompatible_lengths = true;
  out.same_mef = prime_a == prime_b && ha.height == hb.height && !nonrec;
  if (out.incompatible_lengths)
    out.note = "equal maximal equicontinuous factors would force both systems finite";
  else if (out.qualified)
    out.note = "a length is not known to recur; odometers compared on recurring data only";
  return out;
}

// ---------------------------------------------------------------------------
// Summability probe
// ---------------------------------------------------------------------------

struct SummabilityProbe {
  bool h_exists = false;
  std::vector<RationalAngle> h_per_letter;
  std::vector<double> partial_sums;    // per letter
  std::vector<long long> vanish_from;  // -1 when terms never die out
  double square_sum = 0;               // return-word variant
  long long square_vanish_from = -1;
  bool candidate_checked = false;
  bool candidate_realizable = true;
  std::string candidate_obstruction;
};

/// Exact per-term evaluation of |lambda^{h_n(a)} - h(a)| with zero detection,
/// plus the squared return-word variant over letters with equal limit words.
/// A candidate h table is refuted when two letters share tower heights at
/// every checked level but the candidate separates them.
inline SummabilityProbe summability_probe(const System& sys, const RationalAngle& t,
                                          long long n_max = 60,
                                          const std::vector<RationalAngle>* candidate_h = nullptr,
                                          long long exact_height_levels = 20) {
  SummabilityProbe out;
  int d = sys.alphabet().size();
  const BigInt q = t.denominator();

  // heights mod q, iterated exactly
  std::vector<std::vector<BigInt>> hmod(static_cast<size_t>(n_max) + 1,
                                        std::vector<BigInt>(static_cast<size_t>(d), 1));
  for (long long n = 0; n < n_max; ++n) {
    const Substitution& s = sys.sub_at(n);
    for (int a = 0; a < d; ++a) {
      BigInt acc = 0;
      for (int b : s.image(a)) acc += hmod[static_cast<size_t>(n)][static_cast<size_t>(b)];
      hmod[static_cast<size_t>(n) + 1][static_cast<size_t>(a)] = acc % q;
    }
  }

  // per-letter limits from the tail residues
  out.h_per_letter.resize(static_cast<size_t>(d));
  out.h_exists = true;
  for (int a = 0; a < d; ++a) {
    std::set<BigInt> tail;
    for (long long n = std::max<long long>(1, n_max - 8); n <= n_max; ++n)
      tail.insert((t.numerator() * hmod[static_cast<size_t>(n)][static_cast<size_t>(a)]) % q);
    if (tail.size() == 1)
      out.h_per_letter[static_cast<size_t>(a)] = RationalAngle(*tail.begin(), q);
    else
      out.h_exists = false;
  }

  out.partial_sums.assign(static_cast<size_t>(d), 0.0);
  out.vanish_from.assign(static_cast<size_t>(d), -1);
  for (int a = 0; a < d; ++a) {
    long long last_nonzero = 0;
    for (long long n = 1; n <= n_max; ++n) {
      RationalAngle term(t.numerator() * hmod[static_cast<size_t>(n)][static_cast<size_t>(a)], q);
      RationalAngle diff = term - (out.h_exists ? out.h_per_letter[static_cast<size_t>(a)]
                                                : RationalAngle::zero());
      double val = diff.is_zero() ? 0.0 : 2.0 * std::abs(std::sin(M_PI * diff.to_double()));
      out.partial_sums[static_cast<size_t>(a)] += val;
      if (val != 0.0) last_nonzero = n;
    }
    if (last_nonzero < n_max) out.vanish_from[static_cast<size_t>(a)] = last_nonzero + 1;
  }

  // squared return-word variant over letters with equal limit words
  StraightnessReport st = straightness(sys, std::min<long long>(n_max, 40));
  LevelAnalysis la = LevelAnalysis::compute(sys, 2, n_max);
  long long last_sq = 0;
  for (long long n = 1; n <= n_max; ++n) {
    double worst = 0;
    long long lvl = std::min<long long>(n, la.exact() ? n : la.available_levels() - 1);
    const std::set<Word>* words = nullptr;
    if (la.exact() || lvl < la.available_levels()) words = &la.value_at(lvl);
    if (words)
      for (const Word& w : *words) {
        if (w.size() != 2) continue;
        bool equal_limits = false;
        for (const auto& cls : st.equal_prefix_classes)
          if (cls.count(w[0]) && cls.count(w[1])) equal_limits = true;
        if (!equal_limits) continue;
        RationalAngle term(t.numerator() * hmod[static_cast<size_t>(n)][static_cast<size_t>(w[0])],
                           q);
        double val = term.is_zero() ? 0.0 : 2.0 * std::abs(std::sin(M_PI * term.to_double()));
        worst = std::max(worst, val * val);
      }
    out.square_sum += worst;
    if (worst != 0.0) last_sq = n;
  }
  if (last_sq < n_max) out.square_vanish_from = last_sq + 1;

  if (candidate_h) {
    out.candidate_checked = true;
    std::vector<HeightVector> hv;
    for (long long n = 0; n <= exact_height_levels; ++n) hv.push_back(sys.heights(n));
    for (int a = 0; a < d && out.candidate_realizable; ++a)
      for (int b = a + 1; b < d && out.candidate_realizable; ++b) {
        bool equal_all = true;
        for (const auto& h : hv)
          equal_all = equal_all && h.h[static_cast<size_t>(a)] == h.h[static_cast<size_t>(b)];
        if (equal_all && (*candidate_h)[static_cast<size_t>(a)] != (*candidate_h)[static_cast<size_t>(b)]) {
          out.candidate_realizable = false;
          out.candidate_obstruction =
              "letters " + sys.alphabet().letter(a) + " and " + sys.alphabet().letter(b) +
              " have equal tower heights at every level <= " + std::to_string(exact_height_levels) +
              " but the candidate h separates them; no lambda realizes it";
        }
      }
  }
  return out;
}

}  // namespace sadic
