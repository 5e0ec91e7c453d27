#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sadic/directive.hpp"

namespace sadic {

struct SpecParseError : std::runtime_error {
  int line;
  SpecParseError(int ln, const std::string& msg)
      : std::runtime_error("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

struct SpecOptions {
  long long depth = 96;             // level-language / straightness depth
  long long coboundary_depth = 300; // residue and constraint harvesting depth
  long long spectra_levels = 40;    // convergence diagnostics levels
  size_t weyl_length = 531441;      // 3^12 symbols
  size_t corpus_cap = 10'000'000;
  unsigned long long seed = 0;      // recorded in reports; analyses are deterministic
  double persist_ratio = 0.5;
  double persist_floor = 0.02;
  double decay_ratio = 0.25;
  std::vector<std::string> eigen_candidates = {"0", "1/2", "1/3", "1/4", "1/5", "1/9"};
};

struct ParsedSpec {
  std::string name;
  Alphabet alphabet;
  std::vector<Substitution> table;
  std::map<std::string, int> sub_index;
  DirectiveSpec directive = DirectiveSpec::explicit_prefix({0});
  SpecOptions options;

  System system() const { return System(alphabet, table, directive); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

/// Plain key/value system-spec format:
///
///   alphabet = a b c
///   [substitution sigma]
///   a = acb
///   b = bab
///   c = cbc
///   [directive]
///   form = increasing-runs       # or eventually-periodic, explicit
///   base = sigma
///   separator = tau
///   [options]
///   depth = 96
///
/// Letters are single UTF-8 code points. The eventually-periodic form takes
/// `preperiod` (optional) and `period` name lists; the explicit form takes
/// `sequence`.
inline ParsedSpec parse_spec_text(const std::string& text, const std::string& origin = "<text>") {
  ParsedSpec ps;
  ps.name = origin;

  enum class Section { Top, Substitution, Directive, Options };
  Section section = Section::Top;
  std::string cur_sub_name;
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>> sub_images;
  std::vector<std::string> sub_order;
  std::map<std::string, std::pair<std::string, int>> directive_kv, options_kv;
  std::vector<std::string> alphabet_letters;
  int alphabet_line = 0;

  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw SpecParseError(ln, "unterminated section header");
      std::string head = detail::trim(line.substr(1, line.size() - 2));
      auto toks = detail::split_ws(head);
      if (toks.size() == 2 && toks[0] == "substitution") {
        section = Section::Substitution;
        cur_sub_name = toks[1];
        if (sub_images.count(cur_sub_name))
          throw SpecParseError(ln, "duplicate substitution " + cur_sub_name);
        sub_images[cur_sub_name] = {};
        sub_order.push_back(cur_sub_name);
      } else if (toks.size() == 1 && toks[0] == "directive") {
        section = Section::Directive;
      } else if (toks.size() == 1 && toks[0] == "options") {
        section = Section::Options;
      } else {
        throw SpecParseError(ln, "unknown section [" + head + "]");
      }
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) throw SpecParseError(ln, "expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) throw SpecParseError(ln, "empty key");

    switch (section) {
      case Section::Top:
        if (key == "alphabet") {
          alphabet_letters = detail::split_ws(value);
          alphabet_line = ln;
        } else if (key == "name") {
          ps.name = value;
        } else {
          throw SpecParseError(ln, "unknown top-level key " + key);
        }
        break;
      case Section::Substitution:
        if (sub_images[cur_sub_name].count(key))
          throw SpecParseError(ln, "duplicate image for letter " + key);
        sub_images[cur_sub_name][key] = {value, ln};
        break;
      case Section::Directive:
        directive_kv[key] = {value, ln};
        break;
      case Section::Options:
        options_kv[key] = {value, ln};
        break;
    }
  }

  if (alphabet_letters.empty()) throw SpecParseError(1, "missing alphabet");
  try {
    ps.alphabet = Alphabet(alphabet_letters);
  } catch (const std::exception& e) {
    throw SpecParseError(alphabet_line, e.what());
  }

  if (sub_order.empty()) throw SpecParseError(1, "no substitutions defined");
  for (const std::string& name : sub_order) {
    std::vector<Word> images(static_cast<size_t>(ps.alphabet.size()));
    std::vector<bool> have(static_cast<size_t>(ps.alphabet.size()), false);
    for (const auto& [letter, val] : sub_images[name]) {
      int idx;
      try {
        idx = ps.alphabet.index(letter);
      } catch (const std::exception& e) {
        throw SpecParseError(val.second, e.what());
      }
      try {
        images[static_cast<size_t>(idx)] = word_from_string(ps.alphabet, val.first);
      } catch (const std::exception& e) {
        throw SpecParseError(val.second, std::string(e.what()) + " in image of " + letter);
      }
      if (images[static_cast<size_t>(idx)].empty())
        throw SpecParseError(val.second, "image of " + letter + " must be non-empty");
      have[static_cast<size_t>(idx)] = true;
    }
    for (int a = 0; a < ps.alphabet.size(); ++a)
      if (!have[static_cast<size_t>(a)])
        throw SpecParseError(1, "substitution " + name + " misses an image for " +
                                    ps.alphabet.letter(a));
    ps.sub_index[name] = static_cast<int>(ps.table.size());
    ps.table.emplace_back(ps.alphabet, std::move(images), name);
  }

  auto want = [&](const char* key) -> std::pair<std::string, int> {
    auto it = directive_kv.find(key);
    if (it == directive_kv.end())
      throw SpecParseError(1, std::string("directive needs key ") + key);
    return it->second;
  };
  auto name_to_index = [&](const std::string& nm, int line) {
    auto it = ps.sub_index.find(nm);
    if (it == ps.sub_index.end())
      throw SpecParseError(line, "unknown substitution " + nm);
    return it->second;
  };
  auto name_list = [&](const std::string& v, int line) {
    std::vector<int> out;
    for (const auto& nm : detail::split_ws(v)) out.push_back(name_to_index(nm, line));
    return out;
  };

  if (directive_kv.empty()) throw SpecParseError(1, "missing [directive] section");
  auto [form, form_line] = want("form");
  try {
    if (form == "increasing-runs") {
      auto [b, bl] = want("base");
      auto [s, sl] = want("separator");
      long long offset = 1;
      if (directive_kv.count("first-run"))
        offset = std::stoll(directive_kv["first-run"].first);
      ps.directive = DirectiveSpec::increasing_runs(name_to_index(b, bl), name_to_index(s, sl),
                                                    offset, 1);
    } else if (form == "eventually-periodic") {
      std::vector<int> pre;
      if (directive_kv.count("preperiod"))
        pre = name_list(directive_kv["preperiod"].first, directive_kv["preperiod"].second);
      auto [p, pl] = want("period");
      ps.directive = DirectiveSpec::eventually_periodic(pre, name_list(p, pl));
    } else if (form == "explicit") {
      auto [s, sl] = want("sequence");
      ps.directive = DirectiveSpec::explicit_prefix(name_list(s, sl));
    } else {
      throw SpecParseError(form_line, "unknown directive form " + form);
    }
  } catch (const SpecParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw SpecParseError(form_line, e.what());
  }

  for (const auto& [key, val] : options_kv) {
    try {
      if (key == "depth") ps.options.depth = std::stoll(val.first);
      else if (key == "coboundary-depth") ps.options.coboundary_depth = std::stoll(val.first);
      else if (key == "spectra-levels") ps.options.spectra_levels = std::stoll(val.first);
      else if (key == "weyl-length") ps.options.weyl_length = static_cast<size_t>(std::stoull(val.first));
      else if (key == "corpus-cap") ps.options.corpus_cap = static_cast<size_t>(std::stoull(val.first));
      else if (key == "seed") ps.options.seed = std::stoull(val.first);
      else if (key == "persist-ratio") ps.options.persist_ratio = std::stod(val.first);
      else if (key == "persist-floor") ps.options.persist_floor = std::stod(val.first);
      else if (key == "decay-ratio") ps.options.decay_ratio = std::stod(val.first);
      else if (key == "eigen-candidates") ps.options.eigen_candidates = detail::split_ws(val.first);
      else throw SpecParseError(val.second, "unknown option " + key);
    } catch (const SpecParseError&) {
      throw;
    } catch (const std::exception&) {
      throw SpecParseError(val.second, "bad value for option " + key);
    }
  }
  return ps;
}

inline ParsedSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError(0, "cannot open spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ParsedSpec ps = parse_spec_text(ss.str(), path);
  return ps;
}

}  // namespace sadic
