#pragma once

namespace sepq {

// Numerical tolerances shared across the library. Defaults leave one order
// of headroom over what double-precision eigensolvers deliver (~1e-12).
struct Tolerances {
  double herm = 1e-9;    // relative Hermiticity deviation
  double trace = 1e-9;   // |tr - 1|
  double psd = 1e-10;    // eigenvalues >= -psd
  double rank = 1e-10;   // relative to largest eigenvalue
  double recon = 1e-9;   // Frobenius reconstruction error
  double sym = 1e-10;    // plain-transpose symmetry deviation
  double iso = 1e-9;     // ||V^dag V - I||_F
  double pivot = 1e-10;  // relative to largest row norm
  double root = 1e-7;    // residual of unit-Frobenius-normalized equations
  double proj = 1e-6;    // projective dedup / root merge
  double feas = 1e-8;    // Gram feasibility residual against identity
  double weight = 1e-10; // weights below this are dropped
  double sep = 1e-7;     // max pure concurrence of a product component
};

struct RunConfig {
  Tolerances tol;
  int d_max = 10;                          // XL degree escalation cap
  long long expand_budget = 200'000'000;   // complex entries in the expanded matrix
  int k_max = 0;                           // 0: (m*n)^2
  int fallback_restarts = 64;
  int fallback_steps = 2000;
  unsigned long long seed = 0;
  bool use_c_family = false;               // cross-validation switch
};

}  // namespace sepq
