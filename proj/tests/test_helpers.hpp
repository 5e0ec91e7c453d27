#pragma once

#include <string>

#include "sadic/directive.hpp"
#include "sadic/specfile.hpp"

namespace sadic::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(SADIC_FIXTURE_DIR) + "/" + name;
}

inline ParsedSpec load_fixture(const std::string& name) {
  return parse_spec_file(fixture_path(name));
}

// --- common fixtures built in code ---------------------------------------

inline Alphabet abc() { return Alphabet({"a", "b", "c"}); }
inline Alphabet ab() { return Alphabet({"a", "b"}); }

inline Substitution sigma_run() {
  return Substitution::from_strings(abc(), {"acb", "bab", "cbc"}, "sigma");
}
inline Substitution tau_run() {
  return Substitution::from_strings(abc(), {"abc", "acb", "aac"}, "tau");
}
inline System running_system() {
  return System(abc(), {sigma_run(), tau_run()}, DirectiveSpec::increasing_runs(0, 1));
}

inline Substitution thue_morse() {
  return Substitution::from_strings(ab(), {"ab", "ba"}, "tm");
}
inline System thue_morse_system() {
  return System(ab(), {thue_morse()}, DirectiveSpec::eventually_periodic({}, {0}));
}

inline Substitution fibonacci() {
  return Substitution::from_strings(ab(), {"ab", "a"}, "fib");
}
inline System fibonacci_system() {
  return System(ab(), {fibonacci()}, DirectiveSpec::eventually_periodic({}, {0}));
}

inline Substitution perrin() {  // injective on letters but not one-sided recognizable
  return Substitution::from_strings(ab(), {"ba", "aa"}, "perrin");
}

inline Word w(const Alphabet& alpha, const std::string& s) { return word_from_string(alpha, s); }

}  // namespace sadic::testing
