#pragma once

#include <map>
#include <string>
#include <vector>

#include "sadic/coboundary.hpp"

namespace sadic {

/// Column indices i at which all letters agree: |sigma_{.,i}(A)| = 1.
inline std::vector<int> coincidence(const Substitution& s) {
  auto q = classify(s).constant_length;
  if (!q) throw std::invalid_argument("coincidence needs a constant-length substitution");
  std::vector<int> out;
  for (size_t i = 0; i < *q; ++i) {
    int v = s.image(0)[i];
    bool same = true;
    for (int a = 1; a < s.degree(); ++a) same = same && s.image(a)[i] == v;
    if (same) out.push_back(static_cast<int>(i));
  }
  return out;
}

struct CoincidenceReport {
  std::map<std::string, std::vector<int>> per_substitution;
  bool infinitely_many = false;  // a recurring substitution has a coincidence
  bool exact = false;
};

inline CoincidenceReport coincidence_report(const System& sys) {
  CoincidenceReport rep;
  rep.exact = sys.spec().form() != DirectiveSpec::Form::ExplicitPrefix;
  auto recurring = sys.spec().recurring_indices();
  for (int i : sys.spec().occurring_indices()) {
    auto c = coincidence(sys.sub(i));
    if (!c.empty() && recurring.count(i)) rep.infinitely_many = true;
    rep.per_substitution[sys.sub(i).name()] = std::move(c);
  }
  return rep;
}

struct DiscreteSpectrumVerdict {
  std::vector<std::pair<std::string, bool>> checklist;
  bool toeplitz = false;
  bool discrete_spectrum = false;
  std::string mef_display;
  bool certified = false;
  std::vector<std::string> failing;
};

/// Checklist-driven verdict: when a finitary, primitive constant-length
/// directive sequence has a fully essential length-2 word, straightness
/// backed by the matching recognizability evidence, and coincidences at
/// infinitely many levels, the shift is Toeplitz with metric discrete
/// spectrum and its maximal equicontinuous factor is the named odometer.
inline DiscreteSpectrumVerdict discrete_spectrum_verdict(const System& sys,
                                                         const HeightCertificate& height,
                                                         long long depth = 96) {
  DiscreteSpectrumVerdict v;
  auto profile = sys.length_profile();
  if (!profile.constant_length)
    throw std::invalid_argument("discrete_spectrum_verdict requires a constant-length spec");

  PrimitivityReport prim = primitivity(sys);
  EssentialClassification ec = essential_words(sys, 2, depth);
  bool fully_pair = false;
  for (const Word& w : ec.fully_essential)
    if (w.size() == 2) fully_pair = true;
  StraightnessReport st = straightness(sys);
  RecognizabilityReport rec = recognizability_sufficient(sys);
  CoincidenceReport co = coincidence_report(sys);

  bool one_sided_route = st.prefix_straight_to_depth && rec.one_sided_all && rec.all_pass;
  bool two_sided_route = st.straight_to_depth && rec.all_pass;

  v.checklist.emplace_back("finitary", true);
  v.checklist.emplace_back("primitivity", prim.primitive_at_checked &&
                                              prim.strongly_primitive_r.has_value());
  v.checklist.emplace_back("fully essential length-2 word", fully_pair);
  v.checklist.emplace_back("straightness evidence", one_sided_route || two_sided_route);
  v.checklist.emplace_back("recognizability sufficient", rec.all_pass);
  v.checklist.emplace_back("infinitely many coincidences", co.infinitely_many);

  bool all = true;
  for (auto& [name, ok] : v.checklist) {
    if (!ok) v.failing.push_back(name);
    all = all && ok;
  }
  v.toeplitz = all;
  v.discrete_spectrum = all;
  v.certified = all && ec.exact && prim.exact && co.exact && height.exact;
  OdometerDescriptor od = mef(sys, height, depth);
  v.mef_display = od.display;
  return v;
}

}  // namespace sadic
