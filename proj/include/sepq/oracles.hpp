#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sepq/concurrence.hpp"
#include "sepq/quantum_state.hpp"

namespace sepq {

enum class OracleOutcome { SeparableCertified, EntangledCertified, Inconclusive };

struct OracleVerdict {
  std::string name;
  OracleOutcome outcome = OracleOutcome::Inconclusive;
  double witness_value = 0.0;  // signed margin
};

// Partial transpose on subsystem B. PPT is necessary and sufficient for
// m*n <= 6, so a nonnegative spectrum certifies separability there.
inline OracleVerdict ppt_test(const DensityMatrix& state, const Tolerances& tol = {}) {
  const int m = state.dims.m, n = state.dims.n;
  Matrix pt(m * n, m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be)
          pt(i * n + be, j * n + al) = state.entries(i * n + al, j * n + be);
  Eigen::SelfAdjointEigenSolver<Matrix> es((pt + pt.adjoint()) / 2.0);
  const double lambda_min = es.eigenvalues()(0);

  OracleVerdict v;
  v.name = "ppt";
  v.witness_value = lambda_min;
  if (lambda_min < -tol.psd)
    v.outcome = OracleOutcome::EntangledCertified;
  else if (m * n <= 6)
    v.outcome = OracleOutcome::SeparableCertified;
  else
    v.outcome = OracleOutcome::Inconclusive;
  return v;
}

// Realigned matrix R_{(i,j),(alpha,beta)} = <i j|rho|alpha beta>, of shape
// m^2 x n^2; trace norm above 1 certifies entanglement.
inline OracleVerdict realignment_test(const DensityMatrix& state, const Tolerances& tol = {}) {
  const int m = state.dims.m, n = state.dims.n;
  Matrix r(m * m, n * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be)
          r(i * m + j, al * n + be) = state.entries(i * n + al, j * n + be);
  Eigen::JacobiSVD<Matrix> svd(r);
  const double sum = svd.singularValues().sum();

  OracleVerdict v;
  v.name = "realignment";
  v.witness_value = sum - 1.0;
  v.outcome = v.witness_value > tol.feas ? OracleOutcome::EntangledCertified
                                         : OracleOutcome::Inconclusive;
  return v;
}

// Rank-1 states: separable iff the single component has zero concurrence.
inline OracleVerdict pure_separability(const DensityMatrix& state, const Tolerances& tol = {}) {
  if (state.rank != 1) throw NotPure("state has rank " + std::to_string(state.rank));
  const auto d = eigen_components(state);
  const double c = pure_concurrence(d.components[0]);
  OracleVerdict v;
  v.name = "pure";
  v.witness_value = c;
  v.outcome =
      c <= tol.sep ? OracleOutcome::SeparableCertified : OracleOutcome::EntangledCertified;
  return v;
}

// ---------------------------------------------------------------------------
// Seeded generators
// ---------------------------------------------------------------------------

// mt19937_64 driven through explicit bit manipulation so sequences do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(unsigned long long seed) : eng_(seed) {}

  double uniform() {  // (0, 1]
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  double gauss() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    cached_ = rad * std::sin(ang);
    have_ = true;
    return rad * std::cos(ang);
  }

  Complex gauss_c() {
    const double re = gauss();
    const double im = gauss();
    return {re, im};
  }

  Vector gauss_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss_c();
    return v;
  }

 private:
  std::mt19937_64 eng_;
  bool have_ = false;
  double cached_ = 0.0;
};

// Convex mixture of Haar-random product projectors; separable by construction.
inline DensityMatrix gen_product_mixture(BipartiteDims dims, int terms, unsigned long long seed,
                                         const Tolerances& tol = {}) {
  Rng rng(seed);
  std::vector<double> p(terms);
  double total = 0.0;
  for (int t = 0; t < terms; ++t) {  // Dirichlet(1,...,1)
    p[t] = -std::log(rng.uniform());
    total += p[t];
  }
  const int d = dims.total();
  Matrix rho = Matrix::Zero(d, d);
  for (int t = 0; t < terms; ++t) {
    Vector f = rng.gauss_vector(dims.m);
    Vector g = rng.gauss_vector(dims.n);
    f /= f.norm();
    g /= g.norm();
    Vector fg(d);
    for (int i = 0; i < dims.m; ++i)
      for (int j = 0; j < dims.n; ++j) fg(i * dims.n + j) = f(i) * g(j);
    rho += (p[t] / total) * (fg * fg.adjoint());
  }
  return validate_state(rho, dims, tol);
}

// Normalized G G^dag with G an (mn) x rank standard complex Gaussian.
inline DensityMatrix gen_random_state(BipartiteDims dims, int rank, unsigned long long seed,
                                      const Tolerances& tol = {}) {
  const int d = dims.total();
  if (rank < 1 || rank > d)
    throw RankOutOfRange("rank " + std::to_string(rank) + " not in [1, " + std::to_string(d) + "]");
  Rng rng(seed);
  Matrix g(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = rng.gauss_c();
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return validate_state(rho, dims, tol);
}

}  // namespace sepq
