#include <catch2/catch_amalgamated.hpp>

#include "sepq/pipeline.hpp"
#include "test_util.hpp"

using namespace sepq;

namespace {

DensityMatrix bell_state() {
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = 0.5;
  return validate_state(rho, {2, 2});
}

DensityMatrix diagonal_product_state() {
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = rho(3, 3) = 0.5;
  return validate_state(rho, {2, 2});
}

DensityMatrix werner(double p) {
  Matrix rho = Matrix::Identity(4, 4) * ((1.0 - p) / 4.0);
  rho(0, 0) += p / 2.0;
  rho(0, 3) += p / 2.0;
  rho(3, 0) += p / 2.0;
  rho(3, 3) += p / 2.0;
  return validate_state(rho, {2, 2});
}

bool ppt_entangled(const Verdict& v) {
  for (const auto& o : v.oracle_reports)
    if (o.name == "ppt" && o.outcome == OracleOutcome::EntangledCertified) return true;
  return false;
}

bool ppt_separable(const Verdict& v) {
  for (const auto& o : v.oracle_reports)
    if (o.name == "ppt" && o.outcome == OracleOutcome::SeparableCertified) return true;
  return false;
}

}  // namespace

TEST_CASE("decide on pure states") {
  SECTION("product projector is separable with a trivial certificate") {
    Matrix rho = Matrix::Zero(4, 4);
    rho(0, 0) = 1.0;
    const auto v = decide(validate_state(rho, {2, 2}));
    REQUIRE(v.outcome == Outcome::Separable);
    REQUIRE(v.certificate.has_value());
    REQUIRE(v.certificate->components.size() == 1);
    REQUIRE(v.certificate->reconstruction_error <= 1e-10);
  }

  SECTION("Bell projector is entangled with witness 1") {
    const auto v = decide(bell_state());
    REQUIRE(v.outcome == Outcome::Entangled);
    REQUIRE(v.entangled_reason == EntangledReason::PureEntangled);
    REQUIRE(v.witness == Catch::Approx(1.0));
    REQUIRE(ppt_entangled(v));
  }
}

TEST_CASE("decide on the diagonal product mixture") {
  const auto v = decide(diagonal_product_state());
  REQUIRE(v.outcome == Outcome::Separable);
  REQUIRE(v.certificate.has_value());
  REQUIRE(v.certificate->reconstruction_error <= 1e-9);
  REQUIRE(v.certificate->max_component_concurrence <= 1e-7);
  REQUIRE(v.xl_params.has_value());
  REQUIRE(v.xl_params->r == 2);
}

TEST_CASE("decide handles the maximally mixed state") {
  const auto v = decide(validate_state(Matrix::Identity(4, 4) / 4.0, {2, 2}));
  // full-rank states reach the fallback; it must never claim entanglement
  REQUIRE(v.outcome != Outcome::Entangled);
  if (v.outcome == Outcome::Separable) {
    REQUIRE(v.certificate.has_value());
    REQUIRE(v.certificate->reconstruction_error <= 1e-9);
  }
}

TEST_CASE("decide on product mixtures never claims entanglement") {
  int separable = 0, total = 0;
  for (unsigned long long seed = 0; seed < 40; ++seed) {
    const auto s = gen_product_mixture({2, 2}, 2 + static_cast<int>(seed % 2), seed);
    const auto v = decide(s);
    REQUIRE(v.outcome != Outcome::Entangled);
    if (v.outcome == Outcome::Separable) {
      REQUIRE(v.certificate.has_value());
      REQUIRE(v.certificate->reconstruction_error <= 1e-8);
      REQUIRE(v.certificate->max_component_concurrence <= 1e-7);
      ++separable;
    }
    ++total;
  }
  REQUIRE(separable >= total * 3 / 4);  // most instances should certify
}

TEST_CASE("decide agrees with the ppt oracle on random two-qubit states") {
  int indeterminate = 0;
  for (unsigned long long seed = 0; seed < 60; ++seed) {
    const auto s = gen_random_state({2, 2}, 2, seed);
    const auto v = decide(s);
    // non-contradiction against the decisive oracle
    if (v.outcome == Outcome::Separable) REQUIRE(!ppt_entangled(v));
    if (v.outcome == Outcome::Entangled) REQUIRE(!ppt_separable(v));
    if (v.outcome == Outcome::Indeterminate) ++indeterminate;
  }
  REQUIRE(indeterminate <= 12);  // <= 20%
}

TEST_CASE("decide detects rank-2 entangled states via the variety") {
  // Bell mixed with a tiny orthogonal piece remains NPT entangled
  Matrix rho = bell_state().entries * 0.9;
  rho(1, 1) += 0.1;
  const auto v = decide(validate_state(rho, {2, 2}));
  REQUIRE(v.outcome == Outcome::Entangled);
  REQUIRE(v.entangled_reason.has_value());
  REQUIRE(ppt_entangled(v));
}

TEST_CASE("Werner sweep transitions with the known threshold") {
  for (double p : {0.0, 0.1, 0.2, 0.3}) {
    const auto v = decide(werner(p));
    const bool flagged = v.outcome == Outcome::Entangled || ppt_entangled(v);
    REQUIRE(!flagged);
  }
  for (double p : {0.4, 0.6, 0.8, 0.9}) {
    const auto v = decide(werner(p));
    const bool flagged = v.outcome == Outcome::Entangled || ppt_entangled(v);
    REQUIRE(flagged);
    REQUIRE(v.outcome != Outcome::Separable);
  }
}

TEST_CASE("decide is deterministic") {
  const auto s = gen_random_state({2, 2}, 3, 77);
  const auto v1 = decide(s);
  const auto v2 = decide(s);
  REQUIRE(v1.outcome == v2.outcome);
  REQUIRE(v1.witness == v2.witness);
  REQUIRE(v1.certificate.has_value() == v2.certificate.has_value());
  if (v1.certificate)
    REQUIRE((v1.certificate->isometry - v2.certificate->isometry).norm() == 0.0);
}

TEST_CASE("decide fills the planning parameters") {
  const auto s = gen_random_state({2, 3}, 3, 5);
  const auto v = decide(s);
  REQUIRE(v.xl_params.has_value());
  REQUIRE(v.xl_params->r == 3);
  REQUIRE(v.xl_params->n_eff >= 0);
  REQUIRE(!v.timings_ms.empty());
  REQUIRE(v.timings_ms.count("total") == 1);
  REQUIRE(v.oracle_reports.size() == 2);
}

TEST_CASE("use_c_family path yields consistent verdicts") {
  RunConfig cfg;
  cfg.use_c_family = true;
  const auto vt = decide(diagonal_product_state());
  const auto vc = decide(diagonal_product_state(), cfg);
  REQUIRE(vt.outcome == Outcome::Separable);
  REQUIRE(vc.outcome == Outcome::Separable);

  const auto ve = decide(bell_state(), cfg);
  REQUIRE(ve.outcome == Outcome::Entangled);
}

TEST_CASE("fallback_minimize_g0") {
  SECTION("zero biconcurrence returns the identity immediately") {
    const auto d = eigen_components(diagonal_product_state());
    Biconcurrence b{Matrix::Zero(3, 3), 2};
    const auto fb = fallback_minimize_g0(b, d);
    REQUIRE(fb.found);
    REQUIRE(fb.best_g0 == 0.0);
    REQUIRE((fb.isometry - Matrix::Identity(2, 2)).norm() == 0.0);
  }

  SECTION("separable two-qubit mixtures admit a zero of the quartic form") {
    for (unsigned long long seed = 0; seed < 5; ++seed) {
      const auto s = gen_product_mixture({2, 2}, 2, seed + 50);
      const auto d = eigen_components(s);
      const auto b = build_biconcurrence(build_family(d));
      RunConfig cfg;
      cfg.fallback_restarts = 16;
      const auto fb = fallback_minimize_g0(b, d, cfg);
      REQUIRE(fb.found);
      REQUIRE(fb.best_g0 <= 1e-14);
      // the isometry it returns certifies the state
      const auto cert = certificate_from_isometry(fb.isometry, d, s.entries);
      REQUIRE(cert.reconstruction_error <= 1e-9);
    }
  }

  SECTION("never reports success on the Bell state") {
    const auto d = eigen_components(bell_state());
    const auto b = build_biconcurrence(build_family(d));
    RunConfig cfg;
    cfg.fallback_restarts = 8;
    cfg.fallback_steps = 300;
    const auto fb = fallback_minimize_g0(b, d, cfg);
    REQUIRE(!fb.found);
    REQUIRE(fb.best_g0 > 1e-3);  // bounded away from zero for any isometry
  }

  SECTION("deterministic in the seed") {
    const auto s = gen_random_state({2, 2}, 4, 9);
    const auto d = eigen_components(s);
    const auto b = build_biconcurrence(build_family(d));
    RunConfig cfg;
    cfg.fallback_restarts = 4;
    cfg.fallback_steps = 100;
    const auto f1 = fallback_minimize_g0(b, d, cfg);
    const auto f2 = fallback_minimize_g0(b, d, cfg);
    REQUIRE(f1.found == f2.found);
    REQUIRE(f1.best_g0 == f2.best_g0);
  }
}

TEST_CASE("decide on larger systems stays sound") {
  for (unsigned long long seed = 0; seed < 10; ++seed) {
    const auto s = gen_product_mixture({3, 3}, 2, seed + 300);
    RunConfig cfg;
    cfg.fallback_restarts = 16;
    const auto v = decide(s, cfg);
    REQUIRE(v.outcome != Outcome::Entangled);
    if (v.certificate) {
      REQUIRE(v.certificate->reconstruction_error <= 1e-8);
      REQUIRE(v.certificate->max_component_concurrence <= 1e-7);
    }
  }
}

TEST_CASE("pure entangled states in larger dimensions are caught") {
  Rng rng(123);
  Vector psi = rng.gauss_vector(9);
  psi /= psi.norm();
  const Matrix rho = psi * psi.adjoint();
  const auto v = decide(validate_state(rho, {3, 3}));
  REQUIRE(v.outcome == Outcome::Entangled);
  REQUIRE(v.entangled_reason == EntangledReason::PureEntangled);
  REQUIRE(v.witness > 0.1);  // generic pure states are far from product
}
