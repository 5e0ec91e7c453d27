#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sadic/directive.hpp"
#include "sadic/rational_angle.hpp"

namespace sadic {

struct FrequencyVector {
  std::vector<double> freq;  // per letter, sums to 1
  double residual = 1.0;     // max pairwise spread of normalized columns
  long long level = 0;
  bool converged = false;  // spread shrank along the way
};

namespace detail {

inline std::vector<double> column_as_double(const IntMatrix& m, int j) {
  std::vector<double> c(static_cast<size_t>(m.size()));
  for (int i = 0; i < m.size(); ++i) c[static_cast<size_t>(i)] = m.at(i, j).convert_to<double>();
  return c;
}

inline double column_spread(const IntMatrix& m) {
  int d = m.size();
  double spread = 0;
  for (int j = 0; j < d; ++j) {
    auto cj = column_as_double(m, j);
    double sj = 0;
    for (double x : cj) sj += x;
    for (int k = j + 1; k < d; ++k) {
      auto ck = column_as_double(m, k);
      double sk = 0;
      for (double x : ck) sk += x;
      for (int i = 0; i < d; ++i)
        spread = std::max(spread, std::abs(cj[static_cast<size_t>(i)] / sj -
                                           ck[static_cast<size_t>(i)] / sk));
    }
  }
  return spread;
}

}  // namespace detail

/// Normalized limit direction of the columns of M_{[0,n)}; under primitivity
/// all columns align with the generalized right eigenvector, whose entries
/// are the letter-cylinder measures.
inline FrequencyVector letter_frequencies(const System& sys, long long n_max = 40) {
  FrequencyVector fv;
  fv.level = n_max;
  IntMatrix m = sys.cumulative_matrix(n_max);
  int d = m.size();

  double spread_mid = detail::column_spread(sys.cumulative_matrix(std::max<long long>(1, n_max / 2)));
  fv.residual = detail::column_spread(m);
  fv.converged = fv.residual <= spread_mid;

  // average of L1-normalized columns
  std::vector<double> acc(static_cast<size_t>(d), 0.0);
  for (int j = 0; j < d; ++j) {
    auto c = detail::column_as_double(m, j);
    double s = 0;
    for (double x : c) s += x;
    for (int i = 0; i < d; ++i) acc[static_cast<size_t>(i)] += c[static_cast<size_t>(i)] / s;
  }
  double tot = 0;
  for (double x : acc) tot += x;
  for (double& x : acc) x /= tot;
  fv.freq = std::move(acc);
  return fv;
}

struct ConvergenceDiagnostics {
  std::vector<long long> levels;
  std::vector<std::vector<double>> distance;  // [level][letter]: d(M_{[0,n)} e_a, R u)
  std::vector<double> max_distance;           // per level
  double fitted_rate = 0.0;                   // alpha in d ~ C e^{-alpha n} (tail fit)
  double partial_sum = 0.0;                   // sum_n max_a d
  bool summable_estimate = false;
  bool divergence_flag = false;
  bool overflow = false;
  // exact finite rank data on the positive-window telescoping
  std::optional<int> window_r;
  double exact_rank_ratio = 0.0;  // min over windows of min/max entry
  bool exact_rank_pass = false;
};

inline ConvergenceDiagnostics convergence_diagnostics(const System& sys, long long n_max = 40) {
  ConvergenceDiagnostics cd;
  FrequencyVector fv = letter_frequencies(sys, n_max);
  int d = sys.alphabet().size();

  // unit vector along the frequency direction
  std::vector<double> u = fv.freq;
  double un = 0;
  for (double x : u) un += x * x;
  un = std::sqrt(un);
  for (double& x : u) x /= un;

  for (long long n = 1; n <= n_max; ++n) {
    IntMatrix m = sys.cumulative_matrix(n);
    if (m.max_entry() > BigInt(1) << 512) { cd.overflow = true; break; }
    std::vector<double> row;
    double worst = 0;
    for (int a = 0; a < d; ++a) {
      auto c = detail::column_as_double(m, a);
      double dot = 0, norm2 = 0;
      for (int i = 0; i < d; ++i) { dot += c[static_cast<size_t>(i)] * u[static_cast<size_t>(i)]; norm2 += c[static_cast<size_t>(i)] * c[static_cast<size_t>(i)]; }
      double dist2 = std::max(0.0, norm2 - dot * dot);
      double dist = std::sqrt(dist2);
      row.push_back(dist);
      worst = std::max(worst, dist);
    }
    cd.levels.push_back(n);
    cd.distance.push_back(std::move(row));
    cd.max_distance.push_back(worst);
    cd.partial_sum += worst;
  }

  // log-linear tail fit of max_a d
  size_t k = cd.max_distance.size();
  if (k >= 6) {
    size_t from = k / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t cnt = 0;
    for (size_t i = from; i < k; ++i) {
      if (cd.max_distance[i] <= 0) continue;
      double x = static_cast<double>(cd.levels[i]);
      double y = std::log(cd.max_distance[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++cnt;
    }
    if (cnt >= 3) {
      double slope = (static_cast<double>(cnt) * sxy - sx * sy) /
                     (static_cast<double>(cnt) * sxx - sx * sx);
      cd.fitted_rate = -slope;
    } else {
      cd.fitted_rate = std::numeric_limits<double>::infinity();  // distances hit exact zero
    }
    cd.summable_estimate = cd.fitted_rate > 1e-3;
    double tail_avg = 0;
    for (size_t i = from; i < k; ++i) tail_avg += cd.max_distance[i];
    tail_avg /= static_cast<double>(k - from);
    double head_avg = 0;
    for (size_t i = 0; i < from; ++i) head_avg += cd.max_distance[i];
    head_avg /= static_cast<double>(from);
    cd.divergence_flag = tail_avg > head_avg && tail_avg > 1.0;
  }

  // exact finite rank: uniform entry ratio over the recurring positive windows
  PrimitivityReport prim = primitivity(sys);
  if (prim.strongly_primitive_r) {
    cd.window_r = prim.strongly_primitive_r;
    auto ws = sys.spec().windows(*prim.strongly_primitive_r);
    double ratio = 1.0;
    const auto& pool = ws.recurring.empty() ? ws.all : ws.recurring;
    for (const auto& w : pool) {
      IntMatrix m = IntMatrix::identity(d);
      for (int idx : w) m = m * sys.incidence_of(idx);
      double r = m.min_entry().convert_to<double>() / m.max_entry().convert_to<double>();
      ratio = std::min(ratio, r);
    }
    cd.exact_rank_ratio = ratio;
    cd.exact_rank_pass = ratio > 0;
  }
  return cd;
}

struct CylinderRelation {
  std::vector<long long> levels;
  std::vector<double> max_dist_to_int;  // max_a dist(t h_n(a), Z)
  bool exact_zero_tail = false;
  long long zero_from = -1;
  bool z_checked = false;
  double z_error = 0.0;  // |t - <z, mu>|
  bool z_within_residual = false;
  bool precision_capped = false;
};

/// Distance of t * h_n(a) to the integers, exactly for rational t and in
/// extended precision for real t, optionally checking the integer-combination
/// identity t = <z, mu> against the measured letter frequencies.
inline CylinderRelation trivial_coboundary_relation(
    const System& sys, std::optional<RationalAngle> t_rational, std::optional<double> t_real,
    const std::vector<long long>* z = nullptr, long long n_max = 40) {
  CylinderRelation cr;
  int d = sys.alphabet().size();
  long long zero_run_start = -1;
  for (long long n = 0; n <= n_max; ++n) {
    HeightVector hv = sys.heights(n);
    double worst = 0;
    bool all_zero = true;
    for (int a = 0; a < d; ++a) {
      double dist;
      if (t_rational) {
        RationalAngle x = *t_rational * hv.h[static_cast<size_t>(a)];
        BigRat dr = integer_distance(x);
        dist = dr.convert_to<double>();
        if (!x.is_zero()) all_zero = false;
        else dist = 0.0;
      } else {
        if (hv.h[static_cast<size_t>(a)] > (BigInt(1) << 62)) {
          cr.precision_capped = true;
          dist = 0;
        } else {
          long double x = static_cast<long double>(hv.h[static_cast<size_t>(a)].convert_to<double>()) *
                          static_cast<long double>(*t_real);
          long double f = x - std::floor(x);
          dist = static_cast<double>(std::min(f, static_cast<long double>(1.0) - f));
          all_zero = false;
        }
      }
      worst = std::max(worst, dist);
    }
    cr.levels.push_back(n);
    cr.max_dist_to_int.push_back(worst);
    if (t_rational) {
      if (all_zero && zero_run_start < 0) zero_run_start = n;
      if (!all_zero) zero_run_start = -1;
    }
  }
  if (zero_run_start >= 0) {
    cr.exact_zero_tail = true;
    cr.zero_from = zero_run_start;
  }
  if (z) {
    FrequencyVector fv = letter_frequencies(sys, n_max);
    double dot = 0;
    for (int a = 0; a < d; ++a) dot += static_cast<double>((*z)[static_cast<size_t>(a)]) * fv.freq[static_cast<size_t>(a)];
    double t = t_rational ? t_rational->to_double() : *t_real;
    cr.z_checked = true;
    cr.z_error = std::abs(t - dot);
    cr.z_within_residual = cr.z_error <= std::max(fv.residual, 1e-9);
  }
  return cr;
}

}  // namespace sadic
