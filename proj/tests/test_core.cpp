#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sadic/core.hpp"
#include "test_helpers.hpp"

using namespace sadic;
using namespace sadic::testing;

namespace {

// independent oracle: count occurrences of letter i in the image of j
IntMatrix counting_oracle(const Substitution& s) {
  IntMatrix m(s.degree());
  for (int j = 0; j < s.degree(); ++j)
    for (int i = 0; i < s.degree(); ++i) {
      int count = 0;
      for (int x : s.image(j))
        if (x == i) ++count;
      m.at(i, j) = count;
    }
  return m;
}

Substitution random_substitution(std::mt19937_64& rng, const Alphabet& alpha, int max_len) {
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<int> letter(0, alpha.size() - 1);
  std::vector<Word> images;
  for (int a = 0; a < alpha.size(); ++a) {
    Word im(static_cast<size_t>(len(rng)));
    for (int& x : im) x = letter(rng);
    images.push_back(std::move(im));
  }
  return Substitution(alpha, std::move(images), "rnd");
}

}  // namespace

TEST_CASE("apply expands images in order") {
  Alphabet A = abc();
  CHECK(word_to_string(A, apply(sigma_run(), w(A, "ab"))) == "acbbab");
  CHECK(word_to_string(A, apply(tau_run(), w(A, "acb"))) == "abcaacacb");
  Substitution id = identity_substitution(A);
  Word any = w(A, "cabbac");
  CHECK(apply(id, any) == any);
  CHECK(apply(sigma_run(), w(A, "ab")).size() == 6);
}

TEST_CASE("apply rejects symbols outside the alphabet") {
  CHECK_THROWS_AS(apply(sigma_run(), Word{0, 7}), std::invalid_argument);
}

TEST_CASE("compose matches direct expansion") {
  Alphabet A = abc();
  Substitution ts = compose(tau_run(), sigma_run());
  CHECK(word_to_string(A, ts.image(A.index("a"))) == "abcaacacb");

  Substitution ss = compose(sigma_run(), sigma_run());
  // oracle: sigma(acb) = sigma(a) sigma(c) sigma(b)
  CHECK(word_to_string(A, ss.image(0)) == "acbcbcbab");

  Substitution id = identity_substitution(A);
  CHECK(compose(id, sigma_run()) == sigma_run());
  CHECK(compose(sigma_run(), id) == sigma_run());
}

TEST_CASE("incidence matrix counts letters") {
  IntMatrix m = incidence_matrix(sigma_run());
  // columns a:(1,1,1), b:(1,2,0), c:(0,1,2) in order a,b,c
  CHECK(m.at(0, 0) == 1);
  CHECK(m.at(1, 0) == 1);
  CHECK(m.at(2, 0) == 1);
  CHECK(m.at(0, 1) == 1);
  CHECK(m.at(1, 1) == 2);
  CHECK(m.at(2, 1) == 0);
  CHECK(m.at(0, 2) == 0);
  CHECK(m.at(1, 2) == 1);
  CHECK(m.at(2, 2) == 2);

  CHECK(incidence_matrix(identity_substitution(abc())) == IntMatrix::identity(3));

  IntMatrix tm = incidence_matrix(thue_morse());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(tm.at(i, j) == 1);
}

TEST_CASE("homomorphism and column-sum laws on random substitutions") {
  std::mt19937_64 rng(20240817);
  for (int iter = 0; iter < 200; ++iter) {
    Alphabet A = iter % 2 ? abc() : ab();
    Substitution s = random_substitution(rng, A, 4);
    Substitution t = random_substitution(rng, A, 4);
    CHECK(incidence_matrix(compose(s, t)) == incidence_matrix(s) * incidence_matrix(t));
    CHECK(incidence_matrix(s) == counting_oracle(s));
    for (int a = 0; a < A.size(); ++a)
      CHECK(incidence_matrix(s).column_sum(a) == BigInt(s.image(a).size()));
  }
}

TEST_CASE("classify predicates") {
  PredicateRecord ps = classify(sigma_run());
  CHECK(ps.constant_length == size_t{3});
  CHECK(ps.left_permutative);
  CHECK_FALSE(ps.left_proper);

  PredicateRecord pt = classify(tau_run());
  CHECK(pt.constant_length == size_t{3});
  CHECK_FALSE(pt.left_permutative);
  CHECK(pt.left_proper);  // all images start with a
  CHECK(pt.conjugate_left_permutative);

  PredicateRecord pp = classify(perrin());
  CHECK(pp.injective_on_letters);
  CHECK_FALSE(pp.left_permutative);
  CHECK_FALSE(pp.right_permutative);

  PredicateRecord pf = classify(fibonacci());
  CHECK_FALSE(pf.constant_length.has_value());
  CHECK(pf.left_proper);
}

TEST_CASE("rotational conjugation preserves the incidence matrix") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 100; ++iter) {
    Alphabet A = abc();
    Substitution s = random_substitution(rng, A, 4);
    PredicateRecord pr = classify(s);
    for (const Substitution& c : pr.rotational_conjugates)
      CHECK(incidence_matrix(c) == incidence_matrix(s));
  }
  // tau is rotationally conjugate to a left-permutative substitution
  PredicateRecord pt = classify(tau_run());
  REQUIRE_FALSE(pt.rotational_conjugates.empty());
  bool found = false;
  for (const Substitution& c : pt.rotational_conjugates) {
    std::set<int> firsts;
    for (int a = 0; a < c.degree(); ++a) firsts.insert(c.image(a).front());
    found = found || firsts.size() == 3;
  }
  CHECK(found);
}

TEST_CASE("constant length iff all images share a length") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 100; ++iter) {
    Substitution s = random_substitution(rng, abc(), 4);
    bool all_same = true;
    for (int a = 1; a < s.degree(); ++a)
      all_same = all_same && s.image(a).size() == s.image(0).size();
    CHECK(classify(s).constant_length.has_value() == all_same);
  }
}

TEST_CASE("substitution construction validates images") {
  CHECK_THROWS_AS(Substitution(abc(), {Word{0}, Word{}, Word{2}}), std::invalid_argument);
  CHECK_THROWS_AS(Substitution(abc(), {Word{0}, Word{5}, Word{2}}), std::invalid_argument);
  CHECK_THROWS_AS(Alphabet({"a", "a"}), std::invalid_argument);
}

TEST_CASE("exact rank and determinant") {
  CHECK(incidence_matrix(thue_morse()).rank() == 1);
  CHECK(incidence_matrix(fibonacci()).rank() == 2);
  CHECK(incidence_matrix(fibonacci()).determinant() == -1);
  CHECK(incidence_matrix(sigma_run()).rank() == 3);
  CHECK(incidence_matrix(perrin()).determinant() == -2);
}
