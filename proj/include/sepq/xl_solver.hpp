#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepq/config.hpp"
#include "sepq/errors.hpp"
#include "sepq/quantum_state.hpp"

namespace sepq {

// ---------------------------------------------------------------------------
// Degree planning
// ---------------------------------------------------------------------------

inline long long binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long res = 1;
  for (long long i = 1; i <= k; ++i) res = res * (n - k + i) / i;
  return res;
}

inline int delta(int r, int n_eff) { return n_eff - r + 1; }

struct XLParameters {
  int r = 0;
  int n_eff = 0;
  int delta = 0;
  int D = 0;
  long long n_vars = 0;  // binom(r+D-1, D)
  long long n_eqs = 0;   // n_eff * binom(r+D-3, D-2)
};

// Smallest D >= 2 with binom(r+D-1, D) - D <= n_eff * binom(r+D-3, D-2).
inline XLParameters select_degree(int r, int n_eff, int d_max) {
  XLParameters p;
  p.r = r;
  p.n_eff = n_eff;
  p.delta = delta(r, n_eff);
  for (int d = 2; d <= d_max; ++d) {
    const long long vars = binom(r + d - 1, d);
    const long long eqs = static_cast<long long>(n_eff) * binom(r + d - 3, d - 2);
    if (vars - d <= eqs) {
      p.D = d;
      p.n_vars = vars;
      p.n_eqs = eqs;
      return p;
    }
  }
  throw DegreeOverflow("no admissible expansion degree <= " + std::to_string(d_max) +
                       " for r=" + std::to_string(r) + ", N=" + std::to_string(n_eff));
}

// Planning estimate only, per the reported empirical regimes.
inline int estimate_degree_heuristic(int r, int n_eff) {
  const int dl = delta(r, n_eff);
  if (dl == 0) return 1 << (r - 1);
  if (dl == 1) return r;
  if (dl == 2) return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(r))));
  if (dl > 2) {
    const double eps = static_cast<double>(n_eff) / (static_cast<double>(r) * r);
    return static_cast<int>(std::ceil(1.0 / std::sqrt(eps)));
  }
  return 1 << (r - 1);  // underdetermined: worst-case regime
}

// ---------------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------------

struct QuadraticSystem {
  std::vector<Matrix> matrices;  // symmetric r x r
  int r = 0;
};

struct Monomial {
  std::vector<int> exponents;  // length = variable count, sum = degree
};

struct ExpandedSystem {
  Matrix a;                       // n_eqs x n_vars
  std::vector<Monomial> columns;  // trailing u1^{D-t} u2^t block last
  int k = 0;
  int D = 0;
  int n_trailing = 0;
};

namespace detail {

inline void enumerate_exponents(int k, int degree, std::vector<int>& cur,
                                std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k - 1) {
    cur.push_back(degree);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur.push_back(e);
    enumerate_exponents(k, degree - e, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> all_exponents(int k, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate_exponents(k, degree, cur, out);
  return out;
}

}  // namespace detail

// One linear row per (equation, degree-(D-2) multiplier monomial) pair over
// degree-D monomial variables. Columns involving variables beyond the first
// two come first; the trailing block is u1^D, u1^{D-1} u2, ..., u2^D.
inline ExpandedSystem expand_system(const QuadraticSystem& q, int D,
                                    long long budget = 200'000'000) {
  const int k = q.r;
  const int n_eff = static_cast<int>(q.matrices.size());
  const long long rows = static_cast<long long>(n_eff) * binom(k + D - 3, D - 2);
  const long long cols = binom(k + D - 1, D);
  if (rows * cols > budget)
    throw SizeOverflow("expanded system of " + std::to_string(rows) + " x " +
                       std::to_string(cols) + " exceeds the memory budget");

  ExpandedSystem es;
  es.k = k;
  es.D = D;
  auto exps = detail::all_exponents(k, D);
  std::vector<std::vector<int>> leading, trailing;
  for (auto& e : exps) {
    bool pure12 = true;
    for (int i = 2; i < k; ++i)
      if (e[i] > 0) pure12 = false;
    (pure12 ? trailing : leading).push_back(e);
  }
  // trailing in order u1^D, u1^{D-1} u2, ..., u2^D
  std::sort(trailing.begin(), trailing.end(),
            [](const auto& a, const auto& b) { return a[0] > b[0]; });
  es.n_trailing = static_cast<int>(trailing.size());

  std::map<std::vector<int>, int> index;
  es.columns.reserve(exps.size());
  for (auto& e : leading) {
    index[e] = static_cast<int>(es.columns.size());
    es.columns.push_back({e});
  }
  for (auto& e : trailing) {
    index[e] = static_cast<int>(es.columns.size());
    es.columns.push_back({e});
  }

  const auto multipliers = detail::all_exponents(k, D - 2);
  es.a = Matrix::Zero(rows, cols);
  long long row = 0;
  for (int s = 0; s < n_eff; ++s) {
    const Matrix& t = q.matrices[s];
    for (const auto& p : multipliers) {
      for (int al = 0; al < k; ++al) {
        for (int be = al; be < k; ++be) {
          const Complex coeff = (al == be) ? t(al, al) : t(al, be) + t(be, al);
          if (coeff == Complex(0.0, 0.0)) continue;
          std::vector<int> mon = p;
          mon[al] += 1;
          mon[be] += 1;
          es.a(row, index.at(mon)) += coeff;
        }
      }
      ++row;
    }
  }
  return es;
}

// ---------------------------------------------------------------------------
// Elimination and univariate reduction
// ---------------------------------------------------------------------------

struct Elimination {
  int rank = 0;
  Matrix relations;  // rows x (D+1), trailing coefficients only
  long long n_rows = 0;
  long long n_cols = 0;
};

// Deterministic Gaussian elimination: leading columns first, then the
// trailing block is row-reduced separately for the rank count. Rows left
// without a leading pivot become relations on the trailing D+1 monomials.
inline Elimination eliminate(const ExpandedSystem& es, double tol_pivot = 1e-10) {
  Matrix a = es.a;
  const long long rows = a.rows();
  const long long cols = a.cols();
  const long long lead = cols - es.n_trailing;

  double max_row_norm = 0.0;
  for (long long i = 0; i < rows; ++i) max_row_norm = std::max(max_row_norm, a.row(i).norm());
  const double thresh = tol_pivot * std::max(max_row_norm, 1e-300);

  std::vector<bool> used(rows, false);
  Elimination el;
  el.n_rows = rows;
  el.n_cols = cols;

  auto reduce_column = [&](long long c) {
    long long piv = -1;
    double best = thresh;
    for (long long i = 0; i < rows; ++i) {
      if (used[i]) continue;
      const double v = std::abs(a(i, c));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv < 0) return false;
    used[piv] = true;
    const Vector prow = a.row(piv).transpose();
    for (long long i = 0; i < rows; ++i) {
      if (used[i]) continue;
      const Complex f = a(i, c) / prow(c);
      if (f != Complex(0.0, 0.0)) a.row(i) -= f * prow.transpose();
    }
    return true;
  };

  for (long long c = 0; c < lead; ++c)
    if (reduce_column(c)) ++el.rank;

  std::vector<long long> rel_rows;
  for (long long i = 0; i < rows; ++i)
    if (!used[i] && a.row(i).tail(es.n_trailing).norm() > thresh) rel_rows.push_back(i);
  el.relations = Matrix(rel_rows.size(), es.n_trailing);
  for (size_t i = 0; i < rel_rows.size(); ++i)
    el.relations.row(i) = a.row(rel_rows[i]).tail(es.n_trailing);

  for (long long c = lead; c < cols; ++c)
    if (reduce_column(c)) ++el.rank;
  return el;
}

using Poly = std::vector<Complex>;  // ascending coefficients

// With u1 = 1 the trailing relations are polynomials in t = u2 of degree <= D;
// a second elimination over the coefficient vectors yields the lowest-degree
// nonzero combination. nullopt marks a positive-dimensional chart.
inline std::optional<Poly> to_univariate(const Elimination& el, int D, double tol_pivot = 1e-10) {
  const long long rows = el.relations.rows();
  if (rows == 0) return std::nullopt;
  Matrix a = el.relations;
  double max_row_norm = 0.0;
  for (long long i = 0; i < rows; ++i) max_row_norm = std::max(max_row_norm, a.row(i).norm());
  const double thresh = tol_pivot * std::max(max_row_norm, 1e-300);

  std::vector<bool> used(rows, false);
  int best_deg = -1;
  long long best_row = -1;
  for (int deg = D; deg >= 0; --deg) {  // column for t^deg
    long long piv = -1;
    double best = thresh;
    for (long long i = 0; i < rows; ++i) {
      if (used[i]) continue;
      const double v = std::abs(a(i, deg));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv < 0) continue;
    used[piv] = true;
    for (long long i = 0; i < rows; ++i) {
      if (used[i]) continue;
      const Complex f = a(i, deg) / a(piv, deg);
      if (f != Complex(0.0, 0.0)) a.row(i) -= f * a.row(piv);
    }
    best_deg = deg;  // monotonically decreasing over the loop
    best_row = piv;
  }
  if (best_row < 0) return std::nullopt;

  Poly p(best_deg + 1);
  double maxc = 0.0;
  for (int j = 0; j <= best_deg; ++j) maxc = std::max(maxc, std::abs(a(best_row, j)));
  for (int j = 0; j <= best_deg; ++j) p[j] = a(best_row, j) / maxc;
  return p;
}

// ---------------------------------------------------------------------------
// Root extraction
// ---------------------------------------------------------------------------

struct RootWithMultiplicity {
  Complex value;
  int multiplicity;
};

inline std::vector<RootWithMultiplicity> find_roots(const Poly& p, double tol_merge = 1e-6) {
  double maxc = 0.0;
  for (const auto& c : p) maxc = std::max(maxc, std::abs(c));
  if (p.empty() || maxc == 0.0) throw ZeroPolynomial("polynomial is identically zero");

  const double trim = 1e-12 * maxc;
  int hi = static_cast<int>(p.size()) - 1;
  while (hi > 0 && std::abs(p[hi]) <= trim) --hi;
  int lo = 0;
  while (lo < hi && std::abs(p[lo]) <= trim) ++lo;  // roots at zero

  std::vector<RootWithMultiplicity> roots;
  if (lo > 0) roots.push_back({Complex(0.0, 0.0), lo});
  const int deg = hi - lo;
  if (deg > 0) {
    Matrix comp = Matrix::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -p[lo + i] / p[hi];
    Eigen::ComplexEigenSolver<Matrix> es(comp);
    for (int i = 0; i < deg; ++i) {
      const Complex z = es.eigenvalues()(i);
      bool merged = false;
      for (auto& rm : roots) {
        if (std::abs(rm.value - z) <= tol_merge * (1.0 + std::abs(z))) {
          rm.value = (rm.value * static_cast<double>(rm.multiplicity) + z) /
                     static_cast<double>(rm.multiplicity + 1);
          ++rm.multiplicity;
          merged = true;
          break;
        }
      }
      if (!merged) roots.push_back({z, 1});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return roots;
}

// ---------------------------------------------------------------------------
// Full projective solve
// ---------------------------------------------------------------------------

enum class SolutionKind { Empty, Finite, PositiveDimensional };

struct ProjectiveSolutionSet {
  SolutionKind kind = SolutionKind::Empty;
  std::vector<Vector> points;  // first nonzero coordinate normalized to 1
  std::string diagnostic;
  int max_degree_used = 0;
};

struct XLConfig {
  int d_max = 10;
  long long expand_budget = 200'000'000;
  double tol_sym = 1e-10;
  double tol_pivot = 1e-10;
  double tol_root = 1e-7;
  double tol_proj = 1e-6;
};

namespace detail {

// Substitute v2 = t * v1; variables (v1, v3, ..., vk) remain.
inline std::vector<Matrix> substitute_ratio(const std::vector<Matrix>& ts, Complex t) {
  std::vector<Matrix> out;
  out.reserve(ts.size());
  const int k = static_cast<int>(ts[0].rows());
  for (const auto& m : ts) {
    Matrix s(k - 1, k - 1);
    s(0, 0) = m(0, 0) + 2.0 * t * m(0, 1) + t * t * m(1, 1);
    for (int j = 2; j < k; ++j) {
      s(0, j - 1) = m(0, j) + t * m(1, j);
      s(j - 1, 0) = s(0, j - 1);
    }
    for (int i = 2; i < k; ++i)
      for (int j = 2; j < k; ++j) s(i - 1, j - 1) = m(i, j);
    out.push_back(std::move(s));
  }
  return out;
}

// Drop degenerate equations and renormalize the rest to unit Frobenius norm.
inline std::vector<Matrix> normalize_system(const std::vector<Matrix>& ts, double drop_tol) {
  std::vector<Matrix> out;
  double maxn = 0.0;
  for (const auto& m : ts) maxn = std::max(maxn, m.norm());
  for (const auto& m : ts) {
    const double nn = m.norm();
    if (nn > drop_tol * std::max(maxn, 1.0)) out.push_back(m / nn);
  }
  return out;
}

// Newton refinement of a chart-s candidate: the pinned coordinate stays at 1,
// the rest are free. The equations are holomorphic in u, so the complex
// Jacobian is exact.
inline Vector newton_polish(const std::vector<Matrix>& ms, Vector u, int pin, int iters) {
  const int r = static_cast<int>(u.size());
  const int n_eq = static_cast<int>(ms.size());
  const int n_free = r - 1;
  if (n_free < 1 || n_eq < 1) return u;
  auto worst_residual = [&](const Vector& w) {
    double worst = 0.0;
    for (const auto& m : ms) {
      const Vector mw = m * w;
      worst = std::max(worst, std::abs((w.array() * mw.array()).sum()));
    }
    return worst;
  };
  double best = worst_residual(u);
  for (int it = 0; it < iters && best > 1e-15 * std::max(1.0, u.squaredNorm()); ++it) {
    Vector f(n_eq);
    Matrix jac(n_eq, n_free);
    for (int s = 0; s < n_eq; ++s) {
      const Vector mu = ms[s] * u;
      f(s) = (u.array() * mu.array()).sum();
      int c = 0;
      for (int a = 0; a < r; ++a)
        if (a != pin) jac(s, c++) = 2.0 * mu(a);
    }
    const Vector step = jac.completeOrthogonalDecomposition().solve(f);
    Vector un = u;
    int c = 0;
    for (int a = 0; a < r; ++a)
      if (a != pin) un(a) -= step(c++);
    const double cand = worst_residual(un);
    if (cand >= best) break;
    best = cand;
    u = un;
  }
  return u;
}

struct ChartState {
  const XLConfig* cfg;
  bool positive_dimensional = false;
  int max_degree_used = 0;
  std::string note;
};

// Solutions over variables (v1, ..., vk) with v1 fixed to 1.
inline std::vector<Vector> solve_inner(std::vector<Matrix> ts, int k, ChartState& st) {
  if (k == 1) {
    // candidate accepted here; the caller verifies against the original
    // equations, where substitution round-off has not accumulated
    Vector v(1);
    v(0) = 1.0;
    return {v};
  }
  ts = normalize_system(ts, 1e-12);
  if (ts.empty()) {
    st.positive_dimensional = true;
    st.note = "all equations vanished with " + std::to_string(k) + " free variables";
    return {};
  }

  const int n_eff = static_cast<int>(ts.size());
  QuadraticSystem sub{ts, k};
  std::optional<Poly> poly;
  int d_start;
  try {
    d_start = select_degree(k, n_eff, st.cfg->d_max).D;
  } catch (const DegreeOverflow& e) {
    st.positive_dimensional = true;
    st.note = e.what();
    return {};
  }
  for (int d = d_start; d <= st.cfg->d_max; ++d) {
    const auto es = expand_system(sub, d, st.cfg->expand_budget);
    const auto el = eliminate(es, st.cfg->tol_pivot);
    poly = to_univariate(el, d, st.cfg->tol_pivot);
    st.max_degree_used = std::max(st.max_degree_used, d);
    if (poly) break;
  }
  if (!poly) {
    st.positive_dimensional = true;
    st.note = "no univariate relation up to degree " + std::to_string(st.cfg->d_max);
    return {};
  }

  std::vector<Vector> out;
  if (poly->size() <= 1) return out;  // nonzero constant: no root in this chart
  for (const auto& rm : find_roots(*poly, st.cfg->tol_proj)) {
    const auto tails = solve_inner(substitute_ratio(ts, rm.value), k - 1, st);
    for (const auto& tail : tails) {
      Vector v(k);
      v(0) = 1.0;
      v(1) = rm.value;
      for (int i = 1; i < k - 1; ++i) v(i + 1) = tail(i);
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace detail

// Full pipeline: chart enumeration (chart s pins u_s = 1 with the variables
// reordered so u_s leads; every solution is then found in the chart of its
// largest coordinate, where all values stay O(1) and the elimination is well
// conditioned), XL reduction with degree escalation per chart, Newton polish
// and residual verification against the original equations, projective dedup.
inline ProjectiveSolutionSet solve(const QuadraticSystem& q, const XLConfig& cfg = {}) {
  for (const auto& m : q.matrices)
    if ((m - m.transpose()).norm() > cfg.tol_sym * std::max(1.0, m.norm()))
      throw DimensionMismatch("system matrix is not symmetric within tol_sym");

  const int r = q.r;
  const auto normalized = detail::normalize_system(q.matrices, 1e-12);
  ProjectiveSolutionSet out;
  if (normalized.empty()) {
    if (r == 1) {
      Vector v(1);
      v(0) = 1.0;
      out.kind = SolutionKind::Finite;
      out.points.push_back(v);
    } else {
      out.kind = SolutionKind::PositiveDimensional;
      out.diagnostic = "zero system";
    }
    return out;
  }

  auto residual = [&](const Vector& u) {
    const Vector un = u / u.norm();
    double worst = 0.0;
    for (const auto& m : normalized) {
      const Vector mu = m * un;
      worst = std::max(worst, std::abs((un.array() * mu.array()).sum()));
    }
    return worst;
  };

  detail::ChartState st{&cfg};
  std::vector<Vector> points;
  for (int s = 0; s < r; ++s) {
    // variable order: u_s first, the rest ascending
    std::vector<int> perm{s};
    for (int i = 0; i < r; ++i)
      if (i != s) perm.push_back(i);
    std::vector<Matrix> sub;
    sub.reserve(normalized.size());
    for (const auto& m : normalized) {
      Matrix p(r, r);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) p(a, b) = m(perm[a], perm[b]);
      sub.push_back(std::move(p));
    }
    for (const auto& tail : detail::solve_inner(sub, r, st)) {
      Vector u(r);
      for (int i = 0; i < r; ++i) u(perm[i]) = tail(i);
      u = detail::newton_polish(normalized, u, s, 20);
      if (residual(u) > cfg.tol_root) continue;
      points.push_back(std::move(u));
    }
  }

  // projective dedup by principal angle, first occurrence kept; then the
  // representative is scaled so its first significant coordinate is 1
  auto proj_equal = [&](const Vector& u, const Vector& v) {
    const double c = std::abs(u.dot(v)) / (u.norm() * v.norm());
    return std::sqrt(std::max(0.0, 1.0 - c * c)) <= cfg.tol_proj;
  };
  for (const auto& u : points) {
    bool dup = false;
    for (const auto& v : out.points)
      if (proj_equal(u, v)) dup = true;
    if (!dup) out.points.push_back(u);
  }
  for (auto& u : out.points) {
    const double top = u.cwiseAbs().maxCoeff();
    for (int i = 0; i < r; ++i) {
      if (std::abs(u(i)) > cfg.tol_proj * top) {
        u /= u(i);
        break;
      }
    }
  }
  out.max_degree_used = st.max_degree_used;
  if (st.positive_dimensional) {
    out.kind = SolutionKind::PositiveDimensional;
    out.points.clear();
    out.diagnostic = st.note;
  } else {
    out.kind = out.points.empty() ? SolutionKind::Empty : SolutionKind::Finite;
  }
  return out;
}

}  // namespace sepq
