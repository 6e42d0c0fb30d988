#include <catch2/catch_amalgamated.hpp>

#include "sepq/quantum_state.hpp"
#include "sepq/oracles.hpp"
#include "test_util.hpp"

using namespace sepq;
using testutil::random_isometry;

namespace {

Matrix bell_projector() {
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = 0.5;
  return rho;
}

}  // namespace

TEST_CASE("validate_state accepts the maximally mixed state") {
  const auto s = validate_state(Matrix::Identity(4, 4) / 4.0, {2, 2});
  REQUIRE(s.rank == 4);
  for (int i = 0; i < 4; ++i) REQUIRE(s.eigenvalues(i) == Catch::Approx(0.25));
}

TEST_CASE("validate_state accepts a pure projector with rank 1") {
  const auto s = validate_state(bell_projector(), {2, 2});
  REQUIRE(s.rank == 1);
  REQUIRE(s.eigenvalues(0) == Catch::Approx(1.0));
}

TEST_CASE("validate_state rejects bad inputs") {
  REQUIRE_THROWS_AS(validate_state(Matrix::Identity(4, 4) * 0.225, {2, 2}), TraceNotOne);
  REQUIRE_THROWS_AS(validate_state(Matrix::Identity(4, 4) / 4.0, {2, 3}), DimensionMismatch);

  Matrix nh = Matrix::Identity(4, 4) / 4.0;
  nh(0, 1) = Complex(0.1, 0.0);  // asymmetric
  REQUIRE_THROWS_AS(validate_state(nh, {2, 2}), NotHermitian);

  Matrix npsd = Matrix::Zero(4, 4);
  npsd(0, 0) = 1.2;
  npsd(1, 1) = -0.2;
  REQUIRE_THROWS_AS(validate_state(npsd, {2, 2}), NotPSD);
}

TEST_CASE("eigen_components of the two-term diagonal state") {
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = rho(3, 3) = 0.5;
  const auto d = eigen_components(validate_state(rho, {2, 2}));
  REQUIRE(d.components.size() == 2);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  // one component on |00>, one on |11>, up to order and phase
  double c00 = 0, c11 = 0;
  for (const auto& c : d.components) {
    c00 = std::max(c00, std::abs(c.coeffs(0, 0)));
    c11 = std::max(c11, std::abs(c.coeffs(1, 1)));
  }
  REQUIRE(c00 == Catch::Approx(inv_rt2));
  REQUIRE(c11 == Catch::Approx(inv_rt2));
}

TEST_CASE("eigen_components of a pure product state") {
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = 1.0;
  const auto d = eigen_components(validate_state(rho, {2, 2}));
  REQUIRE(d.components.size() == 1);
  REQUIRE(std::abs(d.components[0].coeffs(0, 0)) == Catch::Approx(1.0));
}

TEST_CASE("eigen_components reconstructs a random rank-3 state") {
  const auto s = gen_random_state({3, 3}, 3, 11);
  const auto d = eigen_components(s);
  REQUIRE(d.components.size() == 3);
  REQUIRE((reconstruct_density(d) - s.entries).norm() <= 1e-10);
}

TEST_CASE("reconstruct_density basics") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  Decomposition d{{2, 2}, {PureComponent(a)}};
  const Matrix rho = reconstruct_density(d);
  REQUIRE(rho(0, 0) == Complex(1.0, 0.0));
  REQUIRE(rho.norm() == Catch::Approx(1.0));

  Decomposition two{{2, 2}, {PureComponent(a), PureComponent(a)}};
  REQUIRE((reconstruct_density(two) - 2.0 * rho).norm() <= 1e-15);

  REQUIRE_THROWS_AS(reconstruct_density(Decomposition{{2, 2}, {}}), EmptyDecomposition);
}

TEST_CASE("apply_decomposition_change preserves the state") {
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = rho(3, 3) = 0.5;
  const auto d = eigen_components(validate_state(rho, {2, 2}));

  SECTION("identity") {
    const auto d2 = apply_decomposition_change(d, Matrix::Identity(2, 2));
    for (size_t i = 0; i < d.components.size(); ++i)
      REQUIRE((d2.components[i].coeffs - d.components[i].coeffs).norm() <= 1e-15);
  }

  SECTION("Hadamard mixing") {
    Matrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    const auto d2 = apply_decomposition_change(d, h);
    REQUIRE((reconstruct_density(d2) - rho).norm() <= 1e-10);
    const Matrix mixed = (d.components[0].coeffs + d.components[1].coeffs) / std::sqrt(2.0);
    REQUIRE((d2.components[0].coeffs - mixed).norm() <= 1e-12);
  }

  SECTION("random isometry with two extra rows") {
    Rng rng(5);
    const Matrix v = random_isometry(rng, 4, 2);
    const auto d2 = apply_decomposition_change(d, v);
    REQUIRE(d2.components.size() == 4);
    REQUIRE((reconstruct_density(d2) - rho).norm() <= 1e-10);
  }

  SECTION("rejects a non-isometry") {
    Matrix bad = Matrix::Identity(2, 2) * 1.5;
    REQUIRE_THROWS_AS(apply_decomposition_change(d, bad), NotIsometry);
  }
}

TEST_CASE("round trip and ensemble freedom over random states") {
  for (unsigned long long seed = 0; seed < 100; ++seed) {
    const int m = 2 + static_cast<int>(seed % 2);
    const int n = 2 + static_cast<int>((seed / 2) % 2);
    const int rank = 1 + static_cast<int>(seed % static_cast<unsigned long long>(m * n));
    const auto s = gen_random_state({m, n}, rank, seed);
    const auto d = eigen_components(s);

    REQUIRE(static_cast<int>(d.components.size()) == s.rank);
    REQUIRE(s.rank <= m * n);
    REQUIRE((reconstruct_density(d) - s.entries).norm() <= 1e-9);

    Rng rng(seed + 1000);
    const int k = static_cast<int>(d.components.size());
    const Matrix v = random_isometry(rng, k + 1, k);
    const auto d2 = apply_decomposition_change(d, v);
    REQUIRE((reconstruct_density(d2) - s.entries).norm() <= 1e-9);

    for (const auto& c : d.components)
      REQUIRE(c.weight == Catch::Approx(c.coeffs.squaredNorm()));
  }
}
