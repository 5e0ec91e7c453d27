#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sadic/coboundary.hpp"
#include "sadic/empirical.hpp"
#include "sadic/spectra.hpp"
#include "sadic/specfile.hpp"
#include "sadic/toeplitz.hpp"

namespace sadic {

using json = nlohmann::ordered_json;

inline const char* kReportSchemaVersion = "1";

namespace reportdetail {

inline std::string word_str(const Alphabet& alpha, const Word& w) {
  return word_to_string(alpha, w);
}

inline json words_json(const Alphabet& alpha, const std::set<Word>& ws) {
  json arr = json::array();
  for (const Word& w : ws) arr.push_back(word_str(alpha, w));
  return arr;
}

inline json classify_json(const System& sys) {
  json out = json::object();
  for (int i : sys.spec().occurring_indices()) {
    const Substitution& s = sys.sub(i);
    PredicateRecord pr = classify(s);
    json j;
    j["constant_length"] = pr.constant_length ? json(*pr.constant_length) : json(nullptr);
    j["left_proper"] = pr.left_proper;
    j["right_proper"] = pr.right_proper;
    j["proper"] = pr.proper;
    j["left_permutative"] = pr.left_permutative;
    j["right_permutative"] = pr.right_permutative;
    j["injective_on_letters"] = pr.injective_on_letters;
    j["rotational_conjugates"] = json::array();
    for (const auto& c : pr.rotational_conjugates) {
      json images = json::array();
      for (int a = 0; a < c.degree(); ++a)
        images.push_back(word_str(sys.alphabet(), c.image(a)));
      j["rotational_conjugates"].push_back(images);
    }
    j["conjugate_left_permutative"] = pr.conjugate_left_permutative;
    j["conjugate_right_permutative"] = pr.conjugate_right_permutative;
    out[s.name()] = std::move(j);
  }
  return out;
}

inline json primitivity_json(const PrimitivityReport& p) {
  json j;
  j["primitive_at_checked"] = p.primitive_at_checked;
  j["strongly_primitive_r"] = p.strongly_primitive_r ? json(*p.strongly_primitive_r) : json(nullptr);
  j["exact"] = p.exact;
  j["checked_levels"] = p.checked_levels;
  j["max_window"] = p.max_window;
  return j;
}

inline json essential_json(const System& sys, const EssentialClassification& ec) {
  json j;
  j["max_len"] = ec.max_len;
  j["exact"] = ec.exact;
  j["depth"] = ec.depth;
  j["fully_essential"] = words_json(sys.alphabet(), ec.fully_essential);
  j["essential"] = words_json(sys.alphabet(), ec.essential);
  j["transient"] = words_json(sys.alphabet(), ec.transient);
  j["absent"] = words_json(sys.alphabet(), ec.absent);
  json ev = json::object();
  for (const auto& [w, e] : ec.evidence) ev[word_str(sys.alphabet(), w)] = e;
  j["evidence"] = std::move(ev);
  return j;
}

inline json straightness_json(const System& sys, const StraightnessReport& st) {
  json j;
  j["depth"] = st.depth;
  j["window_len"] = st.window_len;
  json pc = json::object(), sc = json::object();
  for (auto [a, c] : st.prefix_limit_counts) pc[sys.alphabet().letter(a)] = c;
  for (auto [a, c] : st.suffix_limit_counts) sc[sys.alphabet().letter(a)] = c;
  j["prefix_limit_counts"] = std::move(pc);
  j["suffix_limit_counts"] = std::move(sc);
  j["prefix_straight_to_depth"] = st.prefix_straight_to_depth;
  j["suffix_straight_to_depth"] = st.suffix_straight_to_depth;
  json pairs = json::object();
  for (const auto& [w, c] : st.pair_limit_counts) pairs[word_str(sys.alphabet(), w)] = c;
  j["pair_limit_counts"] = std::move(pairs);
  j["straight_to_depth"] = st.straight_to_depth;
  j["strongly_prefix_straight"] = st.strongly_prefix_straight;
  j["strongly_exact"] = st.strongly_exact;
  json cls = json::array();
  for (const auto& c : st.equal_prefix_classes) {
    json grp = json::array();
    for (int a : c) grp.push_back(sys.alphabet().letter(a));
    cls.push_back(std::move(grp));
  }
  j["equal_prefix_classes"] = std::move(cls);
  return j;
}

inline json recognizability_json(const RecognizabilityReport& r) {
  json j;
  j["all_pass"] = r.all_pass;
  j["one_sided_all"] = r.one_sided_all;
  json per = json::array();
  for (const auto& e : r.per_substitution) {
    json x;
    x["name"] = e.name;
    x["rank_full"] = e.rank_full;
    x["two_letter"] = e.two_letter;
    x["permutative"] = e.permutative;
    x["detail"] = e.detail;
    x["passes"] = e.passes;
    x["one_sided_local"] = e.one_sided_local;
    per.push_back(std::move(x));
  }
  j["per_substitution"] = std::move(per);
  return j;
}

inline json coboundary_group_json(const System& sys, const CoboundaryGroupResult& g) {
  json j;
  j["connected"] = g.connected;
  j["warnings"] = g.warnings;
  j["free_rank"] = g.free_rank;
  json inv = json::array();
  for (const auto& d : g.invariant_factors) inv.push_back(d.str());
  j["invariant_factors"] = std::move(inv);
  j["order"] = g.order.str();
  json gens = json::array();
  for (const auto& gen : g.generators) {
    json x;
    x["order"] = gen.order.str();
    json h = json::object(), f = json::object();
    for (int a = 0; a < sys.alphabet().size(); ++a) {
      h[sys.alphabet().letter(a)] = gen.h[static_cast<size_t>(a)].str();
      f[sys.alphabet().letter(a)] = gen.fbar[static_cast<size_t>(a)].str();
    }
    x["h"] = std::move(h);
    x["fbar"] = std::move(f);
    gens.push_back(std::move(x));
  }
  j["generators"] = std::move(gens);
  return j;
}

inline json coboundary_check_json(const System& sys, const SadicCoboundaryCheck& c) {
  json j;
  j["t"] = c.t.str();
  j["h_exists"] = c.h_exists;
  j["h"] = c.h ? json(c.h->str()) : json(nullptr);
  json cyc = json::array();
  for (const auto& r : c.divergence_cycle) cyc.push_back(r.str());
  j["divergence_cycle"] = std::move(cyc);
  j["consistent"] = c.consistent;
  if (c.consistent) {
    json f = json::object();
    for (int a = 0; a < sys.alphabet().size(); ++a)
      f[sys.alphabet().letter(a)] = c.fbar[static_cast<size_t>(a)].str();
    j["fbar"] = std::move(f);
  } else {
    j["fbar"] = nullptr;
  }
  j["constraints"] = json::array();
  for (const auto& k : c.constraints) {
    json x;
    x["pair"] = word_str(sys.alphabet(), k.pair);
    x["theta"] = k.theta.str();
    x["source"] = k.source;
    j["constraints"].push_back(std::move(x));
  }
  j["conflicts"] = c.conflicts;
  j["exact"] = c.exact;
  j["depth"] = c.depth;
  return j;
}

inline json height_json(const HeightCertificate& h) {
  json j;
  j["height"] = h.height.str();
  json trail = json::array();
  for (const auto& [d, note] : h.divisor_trail) {
    json x;
    x["divisor"] = d.str();
    x["outcome"] = note;
    trail.push_back(std::move(x));
  }
  j["divisor_trail"] = std::move(trail);
  j["oracle_checked"] = h.oracle_checked;
  j["oracle_gcd"] = h.oracle_gcd.str();
  j["oracle_note"] = h.oracle_note;
  j["exact"] = h.exact;
  return j;
}

inline json mef_json(const OdometerDescriptor& od) {
  json j;
  j["height"] = od.height.str();
  json lens = json::array();
  for (auto [q, rec] : od.lengths) {
    json x;
    x["length"] = q;
    x["recurring"] = rec;
    lens.push_back(std::move(x));
  }
  j["lengths"] = std::move(lens);
  j["display"] = od.display;
  json hyp = json::object();
  for (const auto& [k, v] : od.hypotheses) hyp[k] = v;
  j["hypotheses"] = std::move(hyp);
  j["certified"] = od.certified;
  j["verdict"] = od.certified ? "certified" : "conditional";
  return j;
}

inline json toeplitz_json(const System& sys, const DiscreteSpectrumVerdict& v,
                          const CoincidenceReport& co) {
  json j;
  json ch = json::object();
  for (const auto& [k, ok] : v.checklist) ch[k] = ok;
  j["checklist"] = std::move(ch);
  j["failing"] = v.failing;
  j["toeplitz"] = v.toeplitz;
  j["discrete_spectrum"] = v.discrete_spectrum;
  j["mef"] = v.mef_display;
  j["certified"] = v.certified;
  json per = json::object();
  for (const auto& [name, cols] : co.per_substitution) per[name] = cols;
  j["coincidences"] = std::move(per);
  j["infinitely_many_coincidences"] = co.infinitely_many;
  (void)sys;
  return j;
}

inline json weyl_json(const std::string& t_label, const SpectralScore& s, const Alphabet& alpha) {
  json j;
  j["t"] = t_label;
  j["sample_sizes"] = {s.sample_sizes[0], s.sample_sizes[1], s.sample_sizes[2]};
  json per = json::object();
  for (size_t a = 0; a < s.per_letter.size(); ++a)
    per[alpha.letter(static_cast<int>(a))] = {s.per_letter[a][0], s.per_letter[a][1],
                                              s.per_letter[a][2]};
  j["per_letter"] = std::move(per);
  j["max_scores"] = {s.max_over_letters[0], s.max_over_letters[1], s.max_over_letters[2]};
  j["trend"] = to_string(s.trend);
  return j;
}

}  // namespace reportdetail

/// Natural ordered Bratteli diagram of the directive sequence: one vertex row
/// per level, one edge per image position, edges ordered by the position of
/// the source letter inside the image of the range letter.
inline std::string bratteli_dot(const System& sys, long long levels = 4) {
  std::ostringstream os;
  const Alphabet& alpha = sys.alphabet();
  os << "digraph bratteli {\n  rankdir=BT;\n  node [shape=circle];\n";
  os << "  v0 [label=\"\", shape=point];\n";
  for (long long n = 1; n <= levels + 1; ++n) {
    os << "  { rank=same;";
    for (int a = 0; a < alpha.size(); ++a)
      os << " v" << n << "_" << a << " [label=\"" << alpha.letter(a) << "\"];";
    os << " }\n";
  }
  for (int a = 0; a < alpha.size(); ++a) os << "  v0 -> v1_" << a << ";\n";
  for (long long n = 1; n <= levels; ++n) {
    const Substitution& s = sys.sub_at(n - 1);
    for (int a = 0; a < alpha.size(); ++a) {
      const Word& im = s.image(a);
      for (size_t pos = 0; pos < im.size(); ++pos)
        os << "  v" << n << "_" << im[pos] << " -> v" << n + 1 << "_" << a << " [label=\"" << pos
           << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

struct AnalysisArtifacts {
  json report;
  std::string spectra_csv;  // n,letter,distance,dist_t_h_int
  std::string weyl_csv;     // t,letter,N,score,trend
};

/// Full analysis pipeline; every depth-bounded result carries its depth and
/// exactness flags. Randomness-free: the recorded seed documents the run.
inline AnalysisArtifacts analyze(const ParsedSpec& ps) {
  const SpecOptions& opt = ps.options;
  System sys = ps.system();
  AnalysisArtifacts art;
  json& rep = art.report;

  rep["schema_version"] = kReportSchemaVersion;
  {
    json spec;
    spec["name"] = ps.name;
    json letters = json::array();
    for (int a = 0; a < sys.alphabet().size(); ++a) letters.push_back(sys.alphabet().letter(a));
    spec["alphabet"] = std::move(letters);
    json subs = json::object();
    for (const auto& s : sys.table()) {
      json imgs = json::object();
      for (int a = 0; a < s.degree(); ++a)
        imgs[sys.alphabet().letter(a)] = reportdetail::word_str(sys.alphabet(), s.image(a));
      subs[s.name()] = std::move(imgs);
    }
    spec["substitutions"] = std::move(subs);
    json dir;
    switch (sys.spec().form()) {
      case DirectiveSpec::Form::EventuallyPeriodic: {
        dir["form"] = "eventually-periodic";
        json pre = json::array(), per = json::array();
        for (int i : sys.spec().preperiod()) pre.push_back(sys.sub(i).name());
        for (int i : sys.spec().period()) per.push_back(sys.sub(i).name());
        dir["preperiod"] = std::move(pre);
        dir["period"] = std::move(per);
        break;
      }
      case DirectiveSpec::Form::IncreasingRuns:
        dir["form"] = "increasing-runs";
        dir["base"] = sys.sub(sys.spec().base()).name();
        dir["separator"] = sys.sub(sys.spec().separator()).name();
        break;
      case DirectiveSpec::Form::ExplicitPrefix: {
        dir["form"] = "explicit";
        json seq = json::array();
        for (int i : sys.spec().prefix()) seq.push_back(sys.sub(i).name());
        dir["sequence"] = std::move(seq);
        break;
      }
    }
    spec["directive"] = std::move(dir);
    rep["spec"] = std::move(spec);
  }
  {
    json o;
    o["seed"] = opt.seed;
    o["depth"] = opt.depth;
    o["coboundary_depth"] = opt.coboundary_depth;
    o["spectra_levels"] = opt.spectra_levels;
    o["weyl_length"] = opt.weyl_length;
    rep["options"] = std::move(o);
  }

  rep["classify"] = reportdetail::classify_json(sys);

  PrimitivityReport prim = primitivity(sys);
  rep["primitivity"] = reportdetail::primitivity_json(prim);

  LevelAnalysis la = LevelAnalysis::compute(sys, 2, opt.depth);
  {
    json j;
    j["max_len"] = 2;
    j["exact"] = la.exact();
    j["evidence"] = la.evidence();
    j["level_0"] = reportdetail::words_json(sys.alphabet(), la.value_at(0));
    json classes = json::array();
    for (const auto& [label, v] : la.recurring_classes()) {
      json x;
      x["label"] = label;
      x["words"] = reportdetail::words_json(sys.alphabet(), v);
      classes.push_back(std::move(x));
    }
    j["recurring_classes"] = std::move(classes);
    rep["languages"] = std::move(j);
  }

  EssentialClassification ec = essential_words(sys, 2, opt.depth);
  rep["essential"] = reportdetail::essential_json(sys, ec);

  StraightnessReport st = straightness(sys);
  rep["straightness"] = reportdetail::straightness_json(sys, st);

  RecognizabilityReport rec = recognizability_sufficient(sys);
  rep["recognizability"] = reportdetail::recognizability_json(rec);

  {
    json cob;
    std::set<Word> pairs;
    for (const Word& w : la.value_at(0))
      if (w.size() == 2) pairs.insert(w);
    CoboundaryGroupResult grp = substitutive_coboundary_group(sys.alphabet(), pairs);
    cob["group"] = reportdetail::coboundary_group_json(sys, grp);
    cob["checks"] = json::array();
    if (sys.constant_length()) {
      for (const std::string& cand : opt.eigen_candidates) {
        RationalAngle t = RationalAngle::parse(cand);
        SadicCoboundaryCheck chk = sadic_coboundary_check(sys, t, opt.coboundary_depth);
        cob["checks"].push_back(reportdetail::coboundary_check_json(sys, chk));
      }
    }
    rep["coboundary"] = std::move(cob);
  }

  bool cl = sys.constant_length();
  std::optional<HeightCertificate> height;
  if (cl) {
    height = compute_height(sys, opt.coboundary_depth);
    rep["height"] = reportdetail::height_json(*height);
    json eig = json::array();
    for (const std::string& cand : opt.eigen_candidates) {
      RationalAngle t = RationalAngle::parse(cand);
      MembershipVerdict v = eigenvalue_membership(sys, t, *height);
      json x;
      x["t"] = t.str();
      x["accept"] = v.accept;
      x["qualified"] = v.qualified;
      x["reason"] = v.reason;
      eig.push_back(std::move(x));
    }
    rep["eigenvalues"] = std::move(eig);
    rep["mef"] = reportdetail::mef_json(mef(sys, *height, opt.depth));
  } else {
    rep["height"] = nullptr;
    rep["eigenvalues"] = nullptr;
    rep["mef"] = nullptr;
  }

  {
    FrequencyVector fv = letter_frequencies(sys, opt.spectra_levels);
    ConvergenceDiagnostics cd = convergence_diagnostics(sys, opt.spectra_levels);
    json j;
    json freq = json::object();
    for (int a = 0; a < sys.alphabet().size(); ++a)
      freq[sys.alphabet().letter(a)] = fv.freq[static_cast<size_t>(a)];
    j["frequencies"] = std::move(freq);
    j["residual"] = fv.residual;
    j["converged"] = fv.converged;
    j["fitted_rate"] = cd.fitted_rate;
    j["partial_sum"] = cd.partial_sum;
    j["summable_estimate"] = cd.summable_estimate;
    j["divergence_flag"] = cd.divergence_flag;
    j["exact_rank_pass"] = cd.exact_rank_pass;
    j["exact_rank_ratio"] = cd.exact_rank_ratio;
    j["window_r"] = cd.window_r ? json(*cd.window_r) : json(nullptr);
    rep["spectra_diagnostics"] = std::move(j);

    std::ostringstream csv;
    csv << "n,letter,distance\n";
    for (size_t i = 0; i < cd.levels.size(); ++i)
      for (int a = 0; a < sys.alphabet().size(); ++a)
        csv << cd.levels[i] << "," << sys.alphabet().letter(a) << ","
            << cd.distance[i][static_cast<size_t>(a)] << "\n";
    art.spectra_csv = csv.str();
  }

  if (cl) {
    CoincidenceReport co = coincidence_report(sys);
    DiscreteSpectrumVerdict v = discrete_spectrum_verdict(sys, *height, opt.depth);
    json j = reportdetail::toeplitz_json(sys, v, co);
    // The canonical bounded telescoping can restore straightness evidence the
    // raw writing of the sequence lacks.
    if (!v.toeplitz && sys.spec().form() == DirectiveSpec::Form::IncreasingRuns &&
        sys.spec().run_offset() == 1 && sys.spec().min_run() == 1) {
      System tele = telescope_merge_separator(sys);
      HeightCertificate th = compute_height(tele, opt.coboundary_depth);
      DiscreteSpectrumVerdict tv = discrete_spectrum_verdict(tele, th, opt.depth);
      CoincidenceReport tco = coincidence_report(tele);
      j["after_telescoping"] = reportdetail::toeplitz_json(tele, tv, tco);
    }
    rep["toeplitz"] = std::move(j);
  } else {
    rep["toeplitz"] = nullptr;
  }

  {
    WeylThresholds th{opt.persist_ratio, opt.persist_floor, opt.decay_ratio};
    GeneratedPrefix gp = generate_prefix(sys, 0, opt.weyl_length, opt.corpus_cap);
    json j = json::array();
    std::ostringstream csv;
    csv << "t,letter,N,score,trend\n";
    if (gp.prefix.size() >= 1000) {
      for (const std::string& cand : opt.eigen_candidates) {
        RationalAngle t = RationalAngle::parse(cand);
        SpectralScore sc = weyl_score(gp.prefix, t, sys.alphabet().size(), th);
        j.push_back(reportdetail::weyl_json(t.str(), sc, sys.alphabet()));
        for (size_t a = 0; a < sc.per_letter.size(); ++a)
          for (int m = 0; m < 3; ++m)
            csv << t.str() << "," << sys.alphabet().letter(static_cast<int>(a)) << ","
                << sc.sample_sizes[static_cast<size_t>(m)] << ","
                << sc.per_letter[a][static_cast<size_t>(m)] << "," << to_string(sc.trend)
                << "\n";
      }
    }
    json w;
    w["prefix_certified"] = gp.certified;
    w["prefix_length"] = gp.prefix.size();
    w["scores"] = std::move(j);
    rep["weyl"] = std::move(w);
    art.weyl_csv = csv.str();
  }

  return art;
}

// ---------------------------------------------------------------------------
// Minimal JSON-schema checking (type / required / properties / items)
// ---------------------------------------------------------------------------

inline bool schema_validate(const json& value, const json& schema, std::string* err = nullptr,
                            const std::string& path = "$") {
  auto fail = [&](const std::string& msg) {
    if (err) *err = path + ": " + msg;
    return false;
  };
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    auto matches = [&](const std::string& ty) {
      if (ty == "object") return value.is_object();
      if (ty == "array") return value.is_array();
      if (ty == "string") return value.is_string();
      if (ty == "number") return value.is_number();
      if (ty == "integer") return value.is_number_integer();
      if (ty == "boolean") return value.is_boolean();
      if (ty == "null") return value.is_null();
      return false;
    };
    bool ok = false;
    if (t.is_string()) ok = matches(t.get<std::string>());
    else if (t.is_array())
      for (const auto& ty : t) ok = ok || matches(ty.get<std::string>());
    if (!ok) return fail("type mismatch");
  }
  if (schema.contains("required") && value.is_object()) {
    for (const auto& k : schema["required"])
      if (!value.contains(k.get<std::string>()))
        return fail("missing required key " + k.get<std::string>());
  }
  if (schema.contains("properties") && value.is_object()) {
    for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
      if (!value.contains(it.key())) continue;
      if (!schema_validate(value[it.key()], it.value(), err, path + "." + it.key()))
        return false;
    }
  }
  if (schema.contains("items") && value.is_array()) {
    size_t i = 0;
    for (const auto& item : value) {
      if (!schema_validate(item, schema["items"], err, path + "[" + std::to_string(i) + "]"))
        return false;
      ++i;
    }
  }
  return true;
}

}  // namespace sadic
