// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isac/model.hpp"
#include "test_util.hpp"

using namespace isac;

TEST_CASE("steering vectors") {
  SUBCASE("broadside is all ones") {
    const cvec a = steering_tx(0.0, 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a(i) - cdouble(1.0, 0.0)) < 1e-15);
    const cvec b = steering_rx(0.0, 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(b(i) - cdouble(1.0, 0.0)) < 1e-15);
  }
  SUBCASE("endfire with two elements") {
    const cvec a = steering_tx(kPi / 2, 2);
    CHECK(std::abs(a(0) - cdouble(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(a(1) - cdouble(0.0, -1.0)) < 1e-15);
    const cvec b = steering_rx(kPi / 2, 2);
    CHECK(std::abs(std::abs(b(0)) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(std::arg(b(0))) - kPi / 2) < 1e-15);
    CHECK(std::abs(std::abs(std::arg(b(1))) - kPi / 2) < 1e-15);
  }
  SUBCASE("norms and derivative orthogonality at random angles") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
    for (int t = 0; t < 1000; ++t) {
      const double th = u(rng);
      CHECK(std::abs(steering_tx(th, 8).squaredNorm() - 8.0) < 1e-12);
      CHECK(std::abs(steering_rx(th, 10).squaredNorm() - 10.0) < 1e-12);
      CHECK(std::abs(steering_tx(th, 8).dot(steering_derivative(th, 8, ArrayKind::tx))) < 1e-10);
      CHECK(std::abs(steering_rx(th, 10).dot(steering_derivative(th, 10, ArrayKind::rx))) < 1e-10);
    }
  }
  SUBCASE("derivative at broadside with two elements") {
    const cvec d = steering_derivative(0.0, 2, ArrayKind::tx);
    CHECK(std::abs(d(0) - cdouble(0.0, kPi / 2)) < 1e-15);
    CHECK(std::abs(d(1) - cdouble(0.0, -kPi / 2)) < 1e-15);
  }
  SUBCASE("derivative matches central differences") {
    const double th = 0.3, h = 1e-6;
    const cvec fd = (steering_tx(th + h, 8) - steering_tx(th - h, 8)) / (2 * h);
    const cvec d = steering_derivative(th, 8, ArrayKind::tx);
    CHECK((fd - d).norm() <= 1e-6 * d.norm());
  }
  SUBCASE("receive derivative energy") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    double sum = 0.0;
    for (int n = 1; n <= 10; ++n) sum += (11.0 - 2 * n) * (11.0 - 2 * n);
    for (int t = 0; t < 50; ++t) {
      const double th = u(rng), h = 1e-6;
      const cvec fd = (steering_rx(th + h, 10) - steering_rx(th - h, 10)) / (2 * h);
      const double expected = std::cos(th) * std::cos(th) * kPi * kPi / 4.0 * sum;
      CHECK(test::rel_diff(fd.squaredNorm(), expected) < 1e-5);
      CHECK(test::rel_diff(std::cos(th) * std::cos(th) * derivative_weight_energy(10), expected) < 1e-12);
    }
  }
}

TEST_CASE("geometry") {
  CHECK(angle_from_geometry(0.7, 10.0, 10.0, 50.0) == 0.0);
  CHECK(angle_from_geometry(0.0, 25.0, 1.0, 50.0) == 0.0);
  CHECK(std::abs(angle_from_geometry(kPi / 6, 5.0, 0.0, 10.0) - 0.252680) < 1e-6);
  CHECK_THROWS_AS(angle_from_geometry(kPi / 2, 30.0, 0.0, 10.0), ModelError);
  CHECK_THROWS_AS(angle_from_geometry(0.1, 1.0, 0.0, 0.0), ModelError);
}

TEST_CASE("eavesdropper channel") {
  Scenario s = test::reference_scenario();
  CHECK(std::abs(eavesdropper_channel(0.4, s).squaredNorm() - 8e-4) < 1e-15);
  const cvec h0 = eavesdropper_channel(0.0, s);
  for (int i = 0; i < s.n_tx; ++i) CHECK(std::abs(h0(i) - cdouble(std::sqrt(1e-4), 0.0)) < 1e-15);
  s.path_gain = 1.0;
  CHECK((eavesdropper_channel(-0.9, s) - steering_tx(-0.9, s.n_tx)).norm() < 1e-15);
}

TEST_CASE("mixture density") {
  Scenario s = test::reference_scenario();
  SUBCASE("single component peak") {
    s.angles = {0.2};
    s.probs = {1.0};
    CHECK(test::rel_diff(mixture_pdf(0.2, s), 1.0 / std::sqrt(2 * kPi * s.sigma_theta_sq)) < 1e-14);
  }
  SUBCASE("two equal components, midpoint") {
    s.angles = {0.0, 0.1};
    s.probs = {0.5, 0.5};
    s.sigma_theta_sq = 1e-4;
    const double tail = std::exp(-0.05 * 0.05 / 2e-4) / std::sqrt(2 * kPi * 1e-4);
    CHECK(test::rel_diff(mixture_pdf(0.05, s), tail) < 1e-13);
  }
  SUBCASE("integrates to one") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.4, 1.4), var(1e-5, 1e-2);
    for (int t = 0; t < 20; ++t) {
      Scenario r = s;
      r.angles = {u(rng), u(rng), u(rng)};
      r.probs = {0.5, 0.3, 0.2};
      r.sigma_theta_sq = var(rng);
      double total = 0.0;
      const double sd = std::sqrt(r.sigma_theta_sq);
      auto f = [&](double x) { return mixture_pdf(x, r); };
      const double lo = *std::min_element(r.angles.begin(), r.angles.end()) - 12 * sd;
      const double hi = *std::max_element(r.angles.begin(), r.angles.end()) + 12 * sd;
      // Split at the component centres so the adaptive rule sees every peak.
      std::vector<double> cuts{lo, hi};
      for (double c : r.angles) cuts.push_back(c);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 20, 1e-13);
      CHECK(std::abs(total - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("rayleigh user channel") {
  CHECK((rayleigh_user_channel(42, 1e-8, 8) - rayleigh_user_channel(42, 1e-8, 8)).norm() == 0.0);
  CHECK((rayleigh_user_channel(42, 1e-8, 8) - rayleigh_user_channel(43, 1e-8, 8)).norm() > 0.0);
  CHECK(rayleigh_user_channel(5, 0.0, 8).norm() == 0.0);
  const int n = 100000;
  const cvec h = rayleigh_user_channel(9, 2.5, n);
  const double var = h.squaredNorm() / n;
  CHECK(std::abs(var - 2.5) < 0.03 * 2.5);
}

TEST_CASE("scenario validation") {
  const Scenario good = test::reference_scenario();
  CHECK_NOTHROW(good.validate());
  auto expect_bad = [](Scenario s) { CHECK_THROWS_AS(s.validate(), ModelError); };
  Scenario s = good;
  s.probs = {0.2, 0.1, 0.4, 0.2};
  expect_bad(s);
  s = good;
  s.angles[0] = kPi / 2;
  expect_bad(s);
  s = good;
  s.angles[1] = s.angles[0];
  expect_bad(s);
  s = good;
  s.sigma_theta_sq = 0.0;
  expect_bad(s);
  s = good;
  s.n_an = s.n_tx + 1;
  expect_bad(s);
  s = good;
  s.noise_eve = -1.0;
  expect_bad(s);
  s = good;
  s.user_channel = 1e-4 * steering_tx(s.angles[2], s.n_tx);
  expect_bad(s);
  s = good;
  s.user_channel = cvec::Zero(3);
  expect_bad(s);
}

TEST_CASE("beamformer covariances") {
  std::mt19937_64 rng(2);
  Beamformer b;
  b.w = test::random_cvec(rng, 4);
  b.an_beams = {test::random_cvec(rng, 4), test::random_cvec(rng, 4)};
  const cmat r = b.covariance();
  CHECK(std::abs(r.trace().real() - b.total_power()) < 1e-12 * b.total_power());
  CHECK(is_psd(b.an_covariance()));
}
