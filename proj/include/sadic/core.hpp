#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sadic {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Ordered alphabet of distinct symbols. Letters are interned to small
/// indices in declaration order; all matrices and words index by that order.
/// Symbols may be multi-byte (single UTF-8 code point each).
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> letters) : letters_(std::move(letters)) {
    if (letters_.empty()) throw std::invalid_argument("alphabet must be non-empty");
    for (int i = 0; i < static_cast<int>(letters_.size()); ++i) {
      if (!index_.emplace(letters_[i], i).second)
        throw std::invalid_argument("duplicate symbol in alphabet: " + letters_[i]);
    }
  }

  int size() const { return static_cast<int>(letters_.size()); }
  const std::string& letter(int i) const { return letters_.at(static_cast<size_t>(i)); }
  bool contains(const std::string& s) const { return index_.count(s) != 0; }
  int index(const std::string& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) throw std::invalid_argument("symbol outside alphabet: " + s);
    return it->second;
  }

  bool operator==(const Alphabet& o) const { return letters_ == o.letters_; }
  bool operator!=(const Alphabet& o) const { return !(*this == o); }

 private:
  std::vector<std::string> letters_;
  std::map<std::string, int> index_;
};

/// A finite word is a sequence of letter indices over some alphabet.
using Word = std::vector<int>;

inline Word word_from_string(const Alphabet& alpha, const std::string& s) {
  // Splits s into single UTF-8 code points and interns each.
  Word w;
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    size_t len = (c < 0x80) ? 1 : (c < 0xE0) ? 2 : (c < 0xF0) ? 3 : 4;
    if (i + len > s.size()) throw std::invalid_argument("truncated UTF-8 sequence");
    w.push_back(alpha.index(s.substr(i, len)));
    i += len;
  }
  return w;
}

inline std::string word_to_string(const Alphabet& alpha, const Word& w) {
  std::string s;
  for (int x : w) s += alpha.letter(x);
  return s;
}

/// Substitution: maps each letter to a non-empty word over the same alphabet.
class Substitution {
 public:
  Substitution() = default;
  Substitution(Alphabet alphabet, std::vector<Word> images, std::string name = "")
      : alphabet_(std::move(alphabet)), images_(std::move(images)), name_(std::move(name)) {
    if (static_cast<int>(images_.size()) != alphabet_.size())
      throw std::invalid_argument("substitution needs one image per letter");
    for (const Word& im : images_) {
      if (im.empty()) throw std::invalid_argument("substitution image must be non-empty");
      for (int x : im)
        if (x < 0 || x >= alphabet_.size())
          throw std::invalid_argument("image symbol outside alphabet");
    }
  }

  static Substitution from_strings(const Alphabet& alpha,
                                   const std::vector<std::string>& images,
                                   std::string name = "") {
    std::vector<Word> ws;
    ws.reserve(images.size());
    for (const auto& s : images) ws.push_back(word_from_string(alpha, s));
    return Substitution(alpha, std::move(ws), std::move(name));
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  const Word& image(int letter) const { return images_.at(static_cast<size_t>(letter)); }
  const std::vector<Word>& images() const { return images_; }
  int degree() const { return alphabet_.size(); }

  size_t max_image_length() const {
    size_t m = 0;
    for (const auto& im : images_) m = std::max(m, im.size());
    return m;
  }
  size_t min_image_length() const {
    size_t m = images_.front().size();
    for (const auto& im : images_) m = std::min(m, im.size());
    return m;
  }

  /// Image of a word, letter images concatenated in order.
  Word apply(const Word& w) const {
    Word out;
    for (int x : w) {
      if (x < 0 || x >= degree()) throw std::invalid_argument("symbol outside alphabet");
      const Word& im = image(x);
      out.insert(out.end(), im.begin(), im.end());
    }
    return out;
  }
  Word operator()(const Word& w) const { return apply(w); }

  bool operator==(const Substitution& o) const {
    return alphabet_ == o.alphabet_ && images_ == o.images_;
  }

 private:
  Alphabet alphabet_;
  std::vector<Word> images_;
  std::string name_;
};

/// Composition (s o t)(a) = s.apply(t(a)).
inline Substitution compose(const Substitution& s, const Substitution& t) {
  if (s.alphabet() != t.alphabet()) throw std::invalid_argument("alphabet mismatch in compose");
  std::vector<Word> images;
  images.reserve(static_cast<size_t>(t.degree()));
  for (int a = 0; a < t.degree(); ++a) images.push_back(s.apply(t.image(a)));
  std::string name;
  if (!s.name().empty() || !t.name().empty()) name = s.name() + "." + t.name();
  return Substitution(s.alphabet(), std::move(images), std::move(name));
}

inline Substitution identity_substitution(const Alphabet& alpha) {
  std::vector<Word> images;
  for (int a = 0; a < alpha.size(); ++a) images.push_back(Word{a});
  return Substitution(alpha, std::move(images), "id");
}

/// Dense square matrix with arbitrary-precision integer entries.
class IntMatrix {
 public:
  IntMatrix() : n_(0) {}
  explicit IntMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}

  static IntMatrix identity(int n) {
    IntMatrix m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  int size() const { return n_; }
  BigInt& at(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  const BigInt& at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  IntMatrix operator*(const IntMatrix& o) const {
    if (n_ != o.n_) throw std::invalid_argument("matrix size mismatch");
    IntMatrix r(n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        const BigInt& x = at(i, k);
        if (x == 0) continue;
        for (int j = 0; j < n_; ++j) r.at(i, j) += x * o.at(k, j);
      }
    return r;
  }

  bool operator==(const IntMatrix& o) const { return n_ == o.n_ && a_ == o.a_; }

  bool positive() const {
    for (const BigInt& x : a_)
      if (x <= 0) return false;
    return true;
  }

  BigInt column_sum(int j) const {
    BigInt s = 0;
    for (int i = 0; i < n_; ++i) s += at(i, j);
    return s;
  }

  std::vector<BigInt> column(int j) const {
    std::vector<BigInt> c(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) c[static_cast<size_t>(i)] = at(i, j);
    return c;
  }

  BigInt min_entry() const { return *std::min_element(a_.begin(), a_.end()); }
  BigInt max_entry() const { return *std::max_element(a_.begin(), a_.end()); }

  /// Exact determinant by fraction-free (Bareiss) elimination.
  BigInt determinant() const {
    if (n_ == 0) return 1;
    std::vector<std::vector<BigInt>> m(static_cast<size_t>(n_),
                                       std::vector<BigInt>(static_cast<size_t>(n_)));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m[i][j] = at(i, j);
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k < n_ - 1; ++k) {
      if (m[k][k] == 0) {
        int p = -1;
        for (int i = k + 1; i < n_; ++i)
          if (m[i][k] != 0) { p = i; break; }
        if (p < 0) return 0;
        std::swap(m[k], m[p]);
        sign = -sign;
      }
      for (int i = k + 1; i < n_; ++i)
        for (int j = k + 1; j < n_; ++j)
          m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      prev = m[k][k];
    }
    return sign * m[static_cast<size_t>(n_ - 1)][static_cast<size_t>(n_ - 1)];
  }

  /// Exact rank over the rationals (fraction-free elimination).
  int rank() const {
    std::vector<std::vector<BigInt>> m(static_cast<size_t>(n_),
                                       std::vector<BigInt>(static_cast<size_t>(n_)));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m[i][j] = at(i, j);
    int r = 0;
    for (int col = 0; col < n_ && r < n_; ++col) {
      int p = -1;
      for (int i = r; i < n_; ++i)
        if (m[i][col] != 0) { p = i; break; }
      if (p < 0) continue;
      std::swap(m[r], m[p]);
      for (int i = r + 1; i < n_; ++i) {
        if (m[i][col] == 0) continue;
        BigInt f = m[i][col], g = m[r][col];
        for (int j = col; j < n_; ++j) m[i][j] = m[i][j] * g - m[r][j] * f;
      }
      ++r;
    }
    return r;
  }

 private:
  int n_;
  std::vector<BigInt> a_;
};

/// Entry (i,j) counts occurrences of letter i in the image of letter j.
inline IntMatrix incidence_matrix(const Substitution& s) {
  IntMatrix m(s.degree());
  for (int j = 0; j < s.degree(); ++j)
    for (int x : s.image(j)) m.at(x, j) += 1;
  return m;
}

/// Structural predicates of a substitution plus its rotational conjugates.
struct PredicateRecord {
  std::optional<size_t> constant_length;  // q when all images have length q
  bool left_proper = false;               // all images share a first letter
  bool right_proper = false;              // all images share a last letter
  bool proper = false;
  bool left_permutative = false;   // first letters pairwise distinct
  bool right_permutative = false;  // last letters pairwise distinct
  bool injective_on_letters = false;
  // Conjugates reached by repeatedly moving a shared first letter to the
  // ends of all images (and symmetrically from the right), bounded by the
  // minimum image length. The substitution itself is not included.
  std::vector<Substitution> rotational_conjugates;
  bool conjugate_left_permutative = false;   // true if self or a conjugate is
  bool conjugate_right_permutative = false;
};

namespace detail {

inline bool all_images_share_first(const Substitution& s, int* letter = nullptr) {
  int f = s.image(0).front();
  for (int a = 1; a < s.degree(); ++a)
    if (s.image(a).front() != f) return false;
  if (letter) *letter = f;
  return true;
}

inline bool all_images_share_last(const Substitution& s, int* letter = nullptr) {
  int f = s.image(0).back();
  for (int a = 1; a < s.degree(); ++a)
    if (s.image(a).back() != f) return false;
  if (letter) *letter = f;
  return true;
}

inline bool is_left_permutative(const Substitution& s) {
  std::set<int> firsts;
  for (int a = 0; a < s.degree(); ++a) firsts.insert(s.image(a).front());
  return static_cast<int>(firsts.size()) == s.degree();
}

inline bool is_right_permutative(const Substitution& s) {
  std::set<int> lasts;
  for (int a = 0; a < s.degree(); ++a) lasts.insert(s.image(a).back());
  return static_cast<int>(lasts.size()) == s.degree();
}

}  // namespace detail

inline PredicateRecord classify(const Substitution& s) {
  PredicateRecord r;
  size_t len0 = s.image(0).size();
  bool constant = true;
  for (int a = 0; a < s.degree(); ++a) constant = constant && s.image(a).size() == len0;
  if (constant) r.constant_length = len0;

  r.left_proper = detail::all_images_share_first(s);
  r.right_proper = detail::all_images_share_last(s);
  r.proper = r.left_proper && r.right_proper;
  r.left_permutative = detail::is_left_permutative(s);
  r.right_permutative = detail::is_right_permutative(s);

  std::set<Word> distinct(s.images().begin(), s.images().end());
  r.injective_on_letters = static_cast<int>(distinct.size()) == s.degree();

  r.conjugate_left_permutative = r.left_permutative;
  r.conjugate_right_permutative = r.right_permutative;

  // Rotate shared first letters to the end.
  {
    Substitution cur = s;
    size_t budget = s.min_image_length();
    int shared;
    while (budget-- > 0 && detail::all_images_share_first(cur, &shared)) {
      std::vector<Word> imgs;
      for (int a = 0; a < cur.degree(); ++a) {
        Word im(cur.image(a).begin() + 1, cur.image(a).end());
        im.push_back(shared);
        imgs.push_back(std::move(im));
      }
      cur = Substitution(s.alphabet(), std::move(imgs), s.name() + "~L");
      r.rotational_conjugates.push_back(cur);
      r.conjugate_left_permutative |= detail::is_left_permutative(cur);
      r.conjugate_right_permutative |= detail::is_right_permutative(cur);
    }
  }
  // Rotate shared last letters to the front.
  {
    Substitution cur = s;
    size_t budget = s.min_image_length();
    int shared;
    while (budget-- > 0 && detail::all_images_share_last(cur, &shared)) {
      std::vector<Word> imgs;
      for (int a = 0; a < cur.degree(); ++a) {
        Word im;
        im.push_back(shared);
        im.insert(im.end(), cur.image(a).begin(), cur.image(a).end() - 1);
        imgs.push_back(std::move(im));
      }
      cur = Substitution(s.alphabet(), std::move(imgs), s.name() + "~R");
      r.rotational_conjugates.push_back(cur);
      r.conjugate_left_permutative |= detail::is_left_permutative(cur);
      r.conjugate_right_permutative |= detail::is_right_permutative(cur);
    }
  }
  return r;
}

}  // namespace sadic
