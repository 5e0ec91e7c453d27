#pragma once

#include <vector>

#include "sadic/core.hpp"

namespace sadic {

/// Smith normal form of an integer relation matrix. Only the column
/// transform V is tracked: with U M V = D diagonal, the solutions of
/// M h = 0 (mod 1) are h = V y where d_i y_i is an integer on the torsion
/// coordinates and y is unconstrained on the kernel coordinates.
struct SmithForm {
  std::vector<std::vector<BigInt>> d;  // rows x cols, diagonalized
  std::vector<std::vector<BigInt>> v;  // cols x cols unimodular
  std::vector<BigInt> invariants;      // nonzero diagonal entries d_1 | d_2 | ...
  int rank = 0;
};

inline SmithForm smith_normal_form(std::vector<std::vector<BigInt>> m, int cols) {
  SmithForm sf;
  int rows = static_cast<int>(m.size());
  sf.v.assign(static_cast<size_t>(cols), std::vector<BigInt>(static_cast<size_t>(cols), 0));
  for (int i = 0; i < cols; ++i) sf.v[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
  if (rows == 0) {
    sf.d = std::move(m);
    return sf;
  }

  auto swap_rows = [&](int i, int j) { std::swap(m[static_cast<size_t>(i)], m[static_cast<size_t>(j)]); };
  auto swap_cols = [&](int i, int j) {
    for (int r = 0; r < rows; ++r) std::swap(m[static_cast<size_t>(r)][static_cast<size_t>(i)], m[static_cast<size_t>(r)][static_cast<size_t>(j)]);
    std::swap(sf.v[static_cast<size_t>(i)], sf.v[static_cast<size_t>(j)]);
  };
  auto add_row = [&](int dst, int src, const BigInt& f) {
    for (int c = 0; c < cols; ++c) m[static_cast<size_t>(dst)][static_cast<size_t>(c)] += f * m[static_cast<size_t>(src)][static_cast<size_t>(c)];
  };
  auto add_col = [&](int dst, int src, const BigInt& f) {
    for (int r = 0; r < rows; ++r) m[static_cast<size_t>(r)][static_cast<size_t>(dst)] += f * m[static_cast<size_t>(r)][static_cast<size_t>(src)];
    for (int r = 0; r < cols; ++r) sf.v[static_cast<size_t>(dst)][static_cast<size_t>(r)] += f * sf.v[static_cast<size_t>(src)][static_cast<size_t>(r)];
  };
  auto negate_col = [&](int c) {
    for (int r = 0; r < rows; ++r) m[static_cast<size_t>(r)][static_cast<size_t>(c)] = -m[static_cast<size_t>(r)][static_cast<size_t>(c)];
    for (int r = 0; r < cols; ++r) sf.v[static_cast<size_t>(c)][static_cast<size_t>(r)] = -sf.v[static_cast<size_t>(c)][static_cast<size_t>(r)];
  };

  int t = 0;
  int lim = std::min(rows, cols);
  while (t < lim) {
    // pivot: smallest nonzero absolute value in the remaining block
    int pi = -1, pj = -1;
    BigInt best = 0;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j) {
        BigInt a = m[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (a < 0) a = -a;
        if (a != 0 && (pi < 0 || a < best)) { best = a; pi = i; pj = j; }
      }
    if (pi < 0) break;
    if (pi != t) swap_rows(t, pi);
    if (pj != t) swap_cols(t, pj);

    bool clean = true;
    for (int i = t + 1; i < rows; ++i) {
      BigInt q = m[static_cast<size_t>(i)][static_cast<size_t>(t)] / m[static_cast<size_t>(t)][static_cast<size_t>(t)];
      if (q != 0) add_row(i, t, -q);
      if (m[static_cast<size_t>(i)][static_cast<size_t>(t)] != 0) clean = false;
    }
    for (int j = t + 1; j < cols; ++j) {
      BigInt q = m[static_cast<size_t>(t)][static_cast<size_t>(j)] / m[static_cast<size_t>(t)][static_cast<size_t>(t)];
      if (q != 0) add_col(j, t, -q);
      if (m[static_cast<size_t>(t)][static_cast<size_t>(j)] != 0) clean = false;
    }
    if (!clean) continue;  // rerun with a smaller pivot

    // divisibility fix-up so invariants form a chain
    bool redo = false;
    for (int i = t + 1; i < rows && !redo; ++i)
      for (int j = t + 1; j < cols && !redo; ++j)
        if (m[static_cast<size_t>(i)][static_cast<size_t>(j)] % m[static_cast<size_t>(t)][static_cast<size_t>(t)] != 0) {
          add_row(t, i, 1);
          redo = true;
        }
    if (redo) continue;

    if (m[static_cast<size_t>(t)][static_cast<size_t>(t)] < 0) negate_col(t);
    ++t;
  }
  sf.rank = t;
  for (int i = 0; i < t; ++i) sf.invariants.push_back(m[static_cast<size_t>(i)][static_cast<size_t>(i)]);
  sf.d = std::move(m);
  return sf;
}

}  // namespace sadic
