#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "sepq/concurrence.hpp"
#include "sepq/quantum_state.hpp"

namespace sepq {

struct CandidateRows {
  std::vector<Vector> rows;  // projectively normalized, pairwise distinct
  int r = 0;
};

// r^2 real equations (real and imaginary parts of the Hermitian Gram
// constraints) in K nonnegative unknowns w_k = |lambda_k|^2.
struct GramSystem {
  RealMatrix a;
  RealVector b;
  int r = 0;
  int K = 0;
};

inline GramSystem build_gram_constraints(const CandidateRows& c) {
  const int r = c.r;
  const int K = static_cast<int>(c.rows.size());
  GramSystem sys;
  sys.r = r;
  sys.K = K;
  sys.a = RealMatrix::Zero(r * r, K);
  sys.b = RealVector::Zero(r * r);
  int row = 0;
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j) {
      for (int k = 0; k < K; ++k)
        sys.a(row, k) = (c.rows[k](i) * std::conj(c.rows[k](j))).real();
      sys.b(row) = (i == j) ? 1.0 : 0.0;
      ++row;
      if (i != j) {
        for (int k = 0; k < K; ++k)
          sys.a(row, k) = (c.rows[k](i) * std::conj(c.rows[k](j))).imag();
        sys.b(row) = 0.0;
        ++row;
      }
    }
  }
  return sys;
}

namespace detail {

// Lawson-Hanson active-set nonnegative least squares. Deterministic: the
// entering index is the first maximizer of the dual.
inline RealVector nnls(const RealMatrix& a, const RealVector& b) {
  const int n = static_cast<int>(a.cols());
  RealVector x = RealVector::Zero(n);
  std::vector<bool> passive(n, false);
  RealVector resid = b;
  const double tol = 1e-12 * std::max(1.0, (a.transpose() * b).cwiseAbs().maxCoeff());

  auto solve_passive = [&](const std::vector<int>& idx) {
    RealMatrix ap(a.rows(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i) ap.col(i) = a.col(idx[i]);
    return RealVector(ap.colPivHouseholderQr().solve(b));
  };

  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const RealVector w = a.transpose() * resid;
    int enter = -1;
    double best = tol;
    for (int i = 0; i < n; ++i)
      if (!passive[i] && w(i) > best) {
        best = w(i);
        enter = i;
      }
    if (enter < 0) break;
    passive[enter] = true;

    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (passive[i]) idx.push_back(i);
      const RealVector z = solve_passive(idx);
      bool ok = true;
      for (size_t i = 0; i < idx.size(); ++i)
        if (z(i) <= 0.0) ok = false;
      if (ok) {
        x.setZero();
        for (size_t i = 0; i < idx.size(); ++i) x(idx[i]) = z(i);
        break;
      }
      double alpha = 1.0;
      for (size_t i = 0; i < idx.size(); ++i)
        if (z(i) <= 0.0) alpha = std::min(alpha, x(idx[i]) / (x(idx[i]) - z(i)));
      for (size_t i = 0; i < idx.size(); ++i) {
        x(idx[i]) += alpha * (z(i) - x(idx[i]));
        if (x(idx[i]) <= 1e-14) {
          x(idx[i]) = 0.0;
          passive[idx[i]] = false;
        }
      }
    }
    resid = b - a * x;
  }
  return x;
}

}  // namespace detail

struct WeightVector {
  RealVector weights;
  double residual = 0.0;  // Frobenius norm of sum_k w_k u_k u_k^dag - I
  bool feasible = false;
};

inline WeightVector solve_nonnegative(const GramSystem& sys, const CandidateRows& c,
                                      double tol_feas = 1e-8) {
  WeightVector wv;
  wv.weights = detail::nnls(sys.a, sys.b);
  Matrix gram = Matrix::Zero(sys.r, sys.r);
  for (int k = 0; k < sys.K; ++k)
    gram += wv.weights(k) * (c.rows[k] * c.rows[k].adjoint());
  wv.residual = (gram - Matrix::Identity(sys.r, sys.r)).norm();
  wv.feasible = wv.residual <= tol_feas;
  return wv;
}

// Explicit product-state decomposition certificate.
struct SeparableCertificate {
  Matrix isometry;  // K' x r, rows sqrt(w_k) u_k with w_k > 0
  std::vector<PureComponent> components;
  RealVector weights;
  std::vector<Vector> rows_kept;
  double reconstruction_error = 0.0;
  double max_component_concurrence = 0.0;
};

// Build and verify a certificate from an explicit isometry acting on the
// eigendecomposition. Throws CertificateCheckFailed if any invariant fails.
inline SeparableCertificate certificate_from_isometry(const Matrix& u, const Decomposition& d,
                                                      const Matrix& rho,
                                                      const Tolerances& tol = {}) {
  if (!is_isometry(u, tol.iso))
    throw CertificateCheckFailed("certificate matrix is not an isometry");
  SeparableCertificate cert;
  cert.isometry = u;
  Decomposition prod = apply_decomposition_change(d, u, tol);
  cert.components = prod.components;
  cert.weights = RealVector(u.rows());
  cert.rows_kept.reserve(u.rows());
  for (int k = 0; k < u.rows(); ++k) {
    const double w = u.row(k).squaredNorm();
    cert.weights(k) = w;
    Vector row = u.row(k).transpose();
    if (w > 0) row /= std::sqrt(w);
    cert.rows_kept.push_back(row);
    cert.max_component_concurrence =
        std::max(cert.max_component_concurrence, pure_concurrence(prod.components[k]));
  }
  cert.reconstruction_error = (reconstruct_density(prod) - rho).norm();
  if (cert.reconstruction_error > tol.recon)
    throw CertificateCheckFailed("certificate reconstruction error " +
                                 std::to_string(cert.reconstruction_error));
  if (cert.max_component_concurrence > tol.sep)
    throw CertificateCheckFailed("certificate component concurrence " +
                                 std::to_string(cert.max_component_concurrence));
  return cert;
}

inline SeparableCertificate assemble_certificate(const CandidateRows& c, const WeightVector& w,
                                                 const Decomposition& d,
                                                 const Tolerances& tol = {}) {
  std::vector<int> kept;
  for (int k = 0; k < w.weights.size(); ++k)
    if (w.weights(k) > tol.weight) kept.push_back(k);
  if (kept.empty()) throw CertificateCheckFailed("no positive-weight rows");
  Matrix u(kept.size(), c.r);
  for (size_t k = 0; k < kept.size(); ++k)
    u.row(k) = std::sqrt(w.weights(kept[k])) * c.rows[kept[k]].transpose();
  auto cert = certificate_from_isometry(u, d, reconstruct_density(d), tol);
  // keep the projective rows as supplied
  for (size_t k = 0; k < kept.size(); ++k) cert.rows_kept[k] = c.rows[kept[k]];
  RealVector wk(kept.size());
  for (size_t k = 0; k < kept.size(); ++k) wk(k) = w.weights(kept[k]);
  cert.weights = wk;
  return cert;
}

}  // namespace sepq
