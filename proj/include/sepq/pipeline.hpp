#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepq/concurrence.hpp"
#include "sepq/isometry_feasibility.hpp"
#include "sepq/oracles.hpp"
#include "sepq/xl_solver.hpp"

namespace sepq {

enum class Outcome { Separable, Entangled, Indeterminate };

enum class EntangledReason { EmptyVariety, InfeasibleWeights, PureEntangled };

enum class IndeterminateReason {
  PositiveDimensionalVariety,
  DegreeOverflow,
  SizeOverflow,
  CertificateCheckFailed
};

struct Verdict {
  Outcome outcome = Outcome::Indeterminate;
  std::optional<EntangledReason> entangled_reason;
  std::optional<IndeterminateReason> indeterminate_reason;
  double witness = 0.0;
  std::optional<SeparableCertificate> certificate;
  std::vector<OracleVerdict> oracle_reports;
  std::optional<XLParameters> xl_params;
  std::map<std::string, double> timings_ms;
  std::string diagnostics;
};

struct FallbackResult {
  bool found = false;
  Matrix isometry;
  double best_g0 = 0.0;
};

namespace detail {

inline Matrix orthonormalize_columns(const Matrix& u) {
  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q = qr.householderQ() * Matrix::Identity(u.rows(), u.cols());
  const Matrix rmat = q.adjoint() * u;
  for (int j = 0; j < q.cols(); ++j) {
    const Complex d = rmat(j, j);
    const double a = std::abs(d);
    if (a > 0) q.col(j) *= d / a;
  }
  return q;
}

inline double diag_objective(const std::vector<Matrix>& ts, const Matrix& u) {
  double g = 0.0;
  for (int i = 0; i < u.rows(); ++i) {
    const Vector row = u.row(i).transpose();
    for (const auto& t : ts) {
      const Vector tu = t * row;
      g += std::norm((row.array() * tu.array()).sum());
    }
  }
  return g;
}

// Gauss-Newton polish of [diagonal residuals; isometry residuals] over the
// real and imaginary parts of U, with a numerical Jacobian.
inline Matrix polish_isometry(const std::vector<Matrix>& ts, Matrix u, int iters) {
  const int K = static_cast<int>(u.rows());
  const int r = static_cast<int>(u.cols());
  const int n_eq = static_cast<int>(ts.size());
  const int n_res = 2 * K * n_eq + 2 * r * r;
  const int n_par = 2 * K * r;

  auto residuals = [&](const Matrix& m) {
    RealVector f(n_res);
    int p = 0;
    for (int i = 0; i < K; ++i) {
      const Vector row = m.row(i).transpose();
      for (const auto& t : ts) {
        const Vector tu = t * row;
        const Complex d = (row.array() * tu.array()).sum();
        f(p++) = d.real();
        f(p++) = d.imag();
      }
    }
    const Matrix g = m.adjoint() * m - Matrix::Identity(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        f(p++) = g(i, j).real();
        f(p++) = g(i, j).imag();
      }
    return f;
  };

  const double h = 1e-7;
  for (int it = 0; it < iters; ++it) {
    const RealVector f0 = residuals(u);
    if (f0.norm() < 1e-15) break;
    RealMatrix jac(n_res, n_par);
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < r; ++j) {
        Matrix up = u;
        up(i, j) += h;
        jac.col(2 * (i * r + j)) = (residuals(up) - f0) / h;
        up = u;
        up(i, j) += Complex(0.0, h);
        jac.col(2 * (i * r + j) + 1) = (residuals(up) - f0) / h;
      }
    const RealVector step =
        (jac.transpose() * jac + 1e-12 * RealMatrix::Identity(n_par, n_par))
            .ldlt()
            .solve(jac.transpose() * f0);
    Matrix un = u;
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < r; ++j)
        un(i, j) -= Complex(step(2 * (i * r + j)), step(2 * (i * r + j) + 1));
    if (residuals(un).norm() >= f0.norm()) break;
    u = un;
  }
  return u;
}

}  // namespace detail

// Best-effort search for an isometry zeroing all concurrence diagonals when
// the XL variety is positive-dimensional. Never certifies entanglement.
inline FallbackResult fallback_minimize_g0(const Biconcurrence& b, const Decomposition& d,
                                           const RunConfig& cfg = {}) {
  const int r = static_cast<int>(d.components.size());
  const auto family = extract_T(b, r, cfg.tol);
  FallbackResult res;
  res.best_g0 = std::numeric_limits<double>::infinity();
  if (family.matrices.empty()) {  // B = 0: eigendecomposition already separable
    res.found = true;
    res.isometry = Matrix::Identity(r, r);
    res.best_g0 = 0.0;
    return res;
  }
  const int k_cap = cfg.k_max > 0 ? cfg.k_max : d.dims.total() * d.dims.total();
  std::vector<int> ks;
  for (int k : {r, r + 1, r + 2, 2 * r, 4 * r, k_cap})
    if (k >= r && k <= k_cap && (ks.empty() || k > ks.back())) ks.push_back(k);
  const int restarts = std::max(1, cfg.fallback_restarts / static_cast<int>(ks.size()));
  const double target = cfg.tol.sep * cfg.tol.sep;

  for (int k : ks) {
    for (int attempt = 0; attempt < restarts; ++attempt) {
      Matrix u(k, r);
      if (k == r && attempt == 0) {
        u = Matrix::Identity(r, r);  // eigendecomposition itself as first try
      } else {
        Rng rng(cfg.seed + 7919ULL * k + attempt);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < r; ++j) u(i, j) = rng.gauss_c();
        u = detail::orthonormalize_columns(u);
      }
      double g = detail::diag_objective(family.matrices, u);
      double eta = 0.05;
      for (int step = 0; step < cfg.fallback_steps && g > 1e-18; ++step) {
        // Wirtinger gradient of sum |u_i^T T u_i|^2
        Matrix grad = Matrix::Zero(k, r);
        for (int i = 0; i < k; ++i) {
          const Vector row = u.row(i).transpose();
          for (const auto& t : family.matrices) {
            const Vector tu = t * row;
            const Complex di = (row.array() * tu.array()).sum();
            grad.row(i) += 4.0 * di * tu.conjugate().transpose();
          }
        }
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
          const Matrix cand = detail::orthonormalize_columns(u - eta * grad);
          const double gc = detail::diag_objective(family.matrices, cand);
          if (gc < g) {
            u = cand;
            g = gc;
            eta *= 1.5;
            moved = true;
            break;
          }
          eta *= 0.5;
        }
        if (!moved) break;
      }
      if (g < 1e-4) {
        u = detail::polish_isometry(family.matrices, u, 25);
        u = detail::orthonormalize_columns(u);
        g = detail::diag_objective(family.matrices, u);
      }
      res.best_g0 = std::min(res.best_g0, g);
      if (g <= target) {
        res.found = true;
        res.isometry = u;
        return res;
      }
    }
  }
  return res;
}

namespace detail {

inline double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace detail

// Full decision procedure: eigendecomposition -> concurrence family ->
// biconcurrence -> T family -> XL solve -> weight feasibility, with the
// G0 minimization fallback and oracle cross-checks.
inline Verdict decide(const DensityMatrix& state, const RunConfig& cfg = {}) {
  Verdict v;
  const double t0 = detail::now_ms();
  auto stamp = [&](const char* name, double since) {
    v.timings_ms[name] = detail::now_ms() - since;
  };

  double ts = detail::now_ms();
  const auto ppt = ppt_test(state, cfg.tol);
  const auto realign = realignment_test(state, cfg.tol);
  v.oracle_reports = {ppt, realign};
  stamp("oracles", ts);

  auto finish = [&](Verdict out) {
    // non-contradiction invariant against the certifying oracles
    const bool small = state.dims.m * state.dims.n <= 6;
    const bool contradiction =
        (out.outcome == Outcome::Separable && ppt.outcome == OracleOutcome::EntangledCertified) ||
        (out.outcome == Outcome::Entangled && small &&
         ppt.outcome == OracleOutcome::SeparableCertified);
    if (contradiction) {
      out.outcome = Outcome::Indeterminate;
      out.entangled_reason.reset();
      out.certificate.reset();
      out.indeterminate_reason = IndeterminateReason::CertificateCheckFailed;
      out.diagnostics += "; verdict contradicted the ppt oracle";
    }
    out.timings_ms["total"] = detail::now_ms() - t0;
    return out;
  };

  ts = detail::now_ms();
  const auto d = eigen_components(state);
  stamp("eigen", ts);

  if (state.rank == 1) {  // pure-state shortcut
    const double c = pure_concurrence(d.components[0]);
    if (c <= cfg.tol.sep) {
      try {
        v.certificate = certificate_from_isometry(Matrix::Identity(1, 1), d, state.entries, cfg.tol);
        v.outcome = Outcome::Separable;
      } catch (const CertificateCheckFailed& e) {
        v.outcome = Outcome::Indeterminate;
        v.indeterminate_reason = IndeterminateReason::CertificateCheckFailed;
        v.diagnostics = e.what();
      }
    } else {
      v.outcome = Outcome::Entangled;
      v.entangled_reason = EntangledReason::PureEntangled;
      v.witness = c;
    }
    return finish(v);
  }

  ts = detail::now_ms();
  const auto c_family = build_family(d);
  const auto b = build_biconcurrence(c_family);
  const auto t_family = extract_T(b, c_family.r, cfg.tol);
  stamp("family", ts);

  const auto& solve_family = cfg.use_c_family ? c_family : t_family;
  const int n_eff = static_cast<int>(solve_family.matrices.size());
  {
    XLParameters p;
    p.r = c_family.r;
    p.n_eff = n_eff;
    p.delta = delta(p.r, std::max(n_eff, 1));
    try {
      p = select_degree(p.r, std::max(n_eff, 1), cfg.d_max);
    } catch (const DegreeOverflow&) {
    }
    v.xl_params = p;
  }

  if (t_family.matrices.empty()) {  // B = 0: eigencomponents are all product
    try {
      v.certificate = certificate_from_isometry(Matrix::Identity(c_family.r, c_family.r), d,
                                                state.entries, cfg.tol);
      v.outcome = Outcome::Separable;
    } catch (const CertificateCheckFailed& e) {
      v.outcome = Outcome::Indeterminate;
      v.indeterminate_reason = IndeterminateReason::CertificateCheckFailed;
      v.diagnostics = e.what();
    }
    return finish(v);
  }

  auto run_fallback = [&](IndeterminateReason reason, const std::string& note) {
    const double tf = detail::now_ms();
    const auto fb = fallback_minimize_g0(b, d, cfg);
    stamp("fallback", tf);
    if (fb.found) {
      try {
        v.certificate = certificate_from_isometry(fb.isometry, d, state.entries, cfg.tol);
        v.outcome = Outcome::Separable;
        v.diagnostics = note + "; fallback G0 = " + std::to_string(fb.best_g0);
        return;
      } catch (const CertificateCheckFailed& e) {
        v.diagnostics = note + "; fallback certificate rejected: " + e.what();
        v.outcome = Outcome::Indeterminate;
        v.indeterminate_reason = IndeterminateReason::CertificateCheckFailed;
        return;
      }
    }
    v.outcome = Outcome::Indeterminate;
    v.indeterminate_reason = reason;
    v.diagnostics = note + "; best fallback G0 = " + std::to_string(fb.best_g0);
  };

  ts = detail::now_ms();
  QuadraticSystem qs{solve_family.matrices, solve_family.r};
  XLConfig xl_cfg;
  xl_cfg.d_max = cfg.d_max;
  xl_cfg.expand_budget = cfg.expand_budget;
  xl_cfg.tol_sym = cfg.tol.sym;
  xl_cfg.tol_pivot = cfg.tol.pivot;
  xl_cfg.tol_root = cfg.tol.root;
  xl_cfg.tol_proj = cfg.tol.proj;

  ProjectiveSolutionSet sols;
  try {
    sols = solve(qs, xl_cfg);
    stamp("xl_solve", ts);
  } catch (const DegreeOverflow& e) {
    stamp("xl_solve", ts);
    run_fallback(IndeterminateReason::DegreeOverflow, e.what());
    return finish(v);
  } catch (const SizeOverflow& e) {
    stamp("xl_solve", ts);
    run_fallback(IndeterminateReason::SizeOverflow, e.what());
    return finish(v);
  }
  if (v.xl_params) v.xl_params->D = std::max(v.xl_params->D, sols.max_degree_used);

  if (sols.kind == SolutionKind::PositiveDimensional) {
    run_fallback(IndeterminateReason::PositiveDimensionalVariety, sols.diagnostic);
    return finish(v);
  }
  if (sols.kind == SolutionKind::Empty) {
    v.outcome = Outcome::Entangled;
    v.entangled_reason = EntangledReason::EmptyVariety;
    v.witness = 0.0;
    return finish(v);
  }

  ts = detail::now_ms();
  CandidateRows rows{sols.points, solve_family.r};
  const auto gram = build_gram_constraints(rows);
  const auto w = solve_nonnegative(gram, rows, cfg.tol.feas);
  stamp("feasibility", ts);
  if (!w.feasible) {
    v.outcome = Outcome::Entangled;
    v.entangled_reason = EntangledReason::InfeasibleWeights;
    v.witness = w.residual;
    return finish(v);
  }
  try {
    v.certificate = assemble_certificate(rows, w, d, cfg.tol);
    v.outcome = Outcome::Separable;
  } catch (const CertificateCheckFailed& e) {
    v.outcome = Outcome::Indeterminate;
    v.indeterminate_reason = IndeterminateReason::CertificateCheckFailed;
    v.diagnostics = e.what();
  }
  return finish(v);
}

}  // namespace sepq
