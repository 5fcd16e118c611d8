#include <doctest.h>

#include "csas/geometry.hpp"

using namespace csas;

TEST_CASE("full-size grid pitch and corner") {
  const SceneGrid g = build_grid(400, 0.8, 0.0);
  CHECK(g.pitch() == doctest::Approx(0.8 / 399));
  CHECK(g.coord(0) == doctest::Approx(-0.4));
  CHECK(g.coord(399) == doctest::Approx(0.4));
}

TEST_CASE("small grids") {
  const SceneGrid two = build_grid(2, 2.0, 0.0);
  CHECK(two.coord(0) == -1.0);
  CHECK(two.coord(1) == 1.0);
  const SceneGrid three = build_grid(3, 1.0, 0.5);
  CHECK(three.coord(1) == 0.0);
  CHECK(three.position(1, 1) == Eigen::Vector3d(0, 0, 0.5));
}

TEST_CASE("grid coordinates are symmetric") {
  for (int n : {2, 7, 64, 65}) {
    const Eigen::VectorXd c = build_grid(n, 0.3, 0.0).coords();
    for (int i = 0; i < n; ++i) CHECK(c(i) == doctest::Approx(-c(n - 1 - i)));
  }
}

TEST_CASE("grid rejects bad dimensions") {
  CHECK_THROWS_AS(build_grid(1, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(build_grid(8, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("kernel grid puts pixel n/2 at the origin") {
  for (int n : {32, 33, 64}) {
    const SceneGrid k = kernel_grid(build_grid(n, 0.1, 0.0));
    CHECK(std::abs(k.coord(n / 2)) < 1e-15);
    CHECK(k.pitch() == doctest::Approx(0.1 / (n - 1)));
  }
  const SceneGrid odd = build_grid(33, 0.1, 0.0);
  CHECK(kernel_grid(odd) == odd);
}

TEST_CASE("ring geometry") {
  const TransducerRing r360 = build_ring(1.0, 1.0, 360);
  CHECK(r360.spacing() == doctest::Approx(M_PI / 180));
  for (std::size_t i = 0; i < r360.size(); ++i) {
    const Eigen::Vector3d p = r360.position(i);
    CHECK(std::hypot(p.x(), p.y()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.z() == 1.0);
    if (i > 0) CHECK(r360.angles[i] > r360.angles[i - 1]);
  }

  const TransducerRing one = build_ring(2.0, 0.5, 1);
  CHECK(one.position(0).isApprox(Eigen::Vector3d(2.0, 0.0, 0.5)));

  const TransducerRing four = build_ring(1.5, 0.0, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(four.angles[i] == doctest::Approx(i * M_PI / 2));
    CHECK((four.position(i) - four.position((i + 1) % 4)).norm() == doctest::Approx(std::sqrt(2.0) * 1.5));
  }
  CHECK_THROWS_AS(build_ring(0.0, 1.0, 4), InvalidArgument);
  CHECK_THROWS_AS(build_ring(1.0, 1.0, 0), InvalidArgument);
}

TEST_CASE("angular sampling bound") {
  const SamplingCheck a = check_sampling(build_ring(1.0, 1.0, 360), 0.02, 0.25);
  CHECK(a.max_dtheta == doctest::Approx(0.02));
  CHECK(a.satisfied);  // 1 degree = 0.01745 rad <= 0.02

  // Boundary: a ring whose spacing equals the threshold.
  const TransducerRing ring = build_ring(1.0, 1.0, 8);
  const double lambda = 4.0 * 0.5 * ring.spacing();
  CHECK(check_sampling(ring, lambda, 0.5).satisfied);

  // 1 m ring at 30 kHz, threshold computed independently.
  const double threshold = (343.0 / 30000.0) / (4.0 * 0.2);
  const SamplingCheck c = check_sampling(build_ring(1.0, 1.0, 360), 343.0 / 30000.0, 0.2);
  CHECK(c.max_dtheta == doctest::Approx(threshold));
  CHECK(c.satisfied == (2.0 * M_PI / 360.0 <= threshold));
}
