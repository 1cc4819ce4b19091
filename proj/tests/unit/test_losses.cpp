#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "sparsedual/losses.hpp"

namespace sd = sparsedual;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Central finite difference of the loss value in u.
double fd_derivative(const sd::LossModel& loss, double u, double y, double h = 1e-6) {
  return (loss.value(u + h, y) - loss.value(u - h, y)) / (2.0 * h);
}

// Grid maximization of alpha*u - l*(alpha) over the feasible interval.
double conjugate_recover(const sd::LossModel& loss, double u, double y, double lo, double hi,
                         int steps) {
  double best = -kInf;
  for (int i = 0; i <= steps; ++i) {
    const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
    const double c = loss.conjugate(a, y);
    if (c == kInf) continue;
    best = std::max(best, a * u - c);
  }
  return best;
}

}  // namespace

TEST_CASE("squared loss values and derivatives") {
  const sd::LossModel sq = sd::LossModel::squared();
  CHECK(sq.value(1.0, 3.0) == 4.0);
  CHECK(sq.value(3.0, 3.0) == 0.0);
  CHECK(sq.derivative(1.0, 3.0) == -4.0);
  CHECK(sq.mu() == 0.5);
  CHECK_FALSE(sq.classification());
  CHECK(sq.id() == "squared");
}

TEST_CASE("huber loss branches on the margin") {
  const sd::LossModel hb = sd::LossModel::huber(0.25);
  CHECK(hb.value(2.0, 1.0) == 0.0);                             // z >= 1
  CHECK(hb.value(0.8, 1.0) == doctest::Approx(0.08));           // quadratic band
  CHECK(hb.value(0.5, 1.0) == doctest::Approx(0.375));          // linear tail
  CHECK(hb.value(-0.8, -1.0) == doctest::Approx(0.08));         // symmetric in z
  CHECK(hb.value(0.9, 1.0) == doctest::Approx(0.02));
  CHECK(hb.conjugate(-1.0, 1.0) == doctest::Approx(-0.875));
  CHECK(hb.conjugate_derivative(-1.0, 1.0) == doctest::Approx(0.75));
  CHECK(hb.mu() == 0.25);
  CHECK(hb.gamma() == 0.25);
  CHECK(hb.classification());
}

TEST_CASE("hinge loss values") {
  const sd::LossModel hg = sd::LossModel::hinge();
  CHECK(hg.value(0.5, 1.0) == 0.5);
  CHECK(hg.value(2.0, 1.0) == 0.0);
  CHECK(hg.value(-1.0, -1.0) == 0.0);
  CHECK(hg.value(0.5, -1.0) == 1.5);
  CHECK(hg.value(0.0, 1.0) == 1.0);
  CHECK(hg.mu() == 0.0);
}

TEST_CASE("loss derivatives match finite differences away from kinks") {
  const sd::LossModel sq = sd::LossModel::squared();
  const sd::LossModel hb = sd::LossModel::huber(0.25);
  const sd::LossModel hg = sd::LossModel::hinge();
  for (double u = -3.0; u <= 3.0; u += 0.137) {
    for (double y : {-1.0, 1.0}) {
      CHECK(sq.derivative(u, y) == doctest::Approx(fd_derivative(sq, u, y)).epsilon(1e-6));
      const double z = y * u;
      if (std::fabs(z - 1.0) > 1e-2 && std::fabs(z - 0.75) > 1e-2) {
        CHECK(hb.derivative(u, y) == doctest::Approx(fd_derivative(hb, u, y)).epsilon(1e-6));
      }
      if (std::fabs(z - 1.0) > 1e-2) {
        CHECK(hg.derivative(u, y) ==
              doctest::Approx(fd_derivative(hg, u, y)).epsilon(1e-6).scale(1.0));
      }
    }
    CHECK(sq.derivative(u, 0.37) == doctest::Approx(fd_derivative(sq, u, 0.37)).epsilon(1e-6));
  }
}

TEST_CASE("feasible intervals and projection") {
  const sd::LossModel sq = sd::LossModel::squared();
  CHECK(sq.feasible_interval(2.5).lo == -kInf);
  CHECK(sq.feasible_interval(2.5).hi == kInf);
  CHECK(sq.project(123.0, 2.5) == 123.0);

  for (const sd::LossModel& loss : {sd::LossModel::huber(0.25), sd::LossModel::hinge()}) {
    CHECK(loss.feasible_interval(1.0).lo == -1.0);
    CHECK(loss.feasible_interval(1.0).hi == 0.0);
    CHECK(loss.feasible_interval(-1.0).lo == 0.0);
    CHECK(loss.feasible_interval(-1.0).hi == 1.0);
    CHECK(loss.project(0.5, 1.0) == 0.0);
    CHECK(loss.project(-2.0, 1.0) == -1.0);
    CHECK(loss.project(-0.25, 1.0) == -0.25);
  }
}

TEST_CASE("conjugate is +inf off the feasible interval and finite inside") {
  const sd::LossModel hg = sd::LossModel::hinge();
  CHECK(hg.conjugate(0.5, 1.0) == kInf);
  CHECK(hg.conjugate(-1.5, 1.0) == kInf);
  CHECK(hg.conjugate(-0.5, 1.0) == -0.5);  // y*alpha
  CHECK(hg.conjugate(0.0, 1.0) == 0.0);
  const sd::LossModel hb = sd::LossModel::huber(0.25);
  CHECK(hb.conjugate(0.5, 1.0) == kInf);
  CHECK(hb.conjugate(-0.4, 1.0) == doctest::Approx(-0.4 + 0.125 * 0.16));
  const sd::LossModel sq = sd::LossModel::squared();
  CHECK(sq.conjugate(2.0, 3.0) == doctest::Approx(1.0 + 6.0));  // a^2/4 + y a
}

TEST_CASE("conjugate recovers the loss by grid maximization") {
  const sd::LossModel sq = sd::LossModel::squared();
  const sd::LossModel hb = sd::LossModel::huber(0.25);
  const sd::LossModel hg = sd::LossModel::hinge();
  for (double u = -4.0; u <= 4.0; u += 0.377) {
    for (double y : {-1.0, 1.0}) {
      CHECK(sq.value(u, y) ==
            doctest::Approx(conjugate_recover(sq, u, y, -20.0, 20.0, 40000)).epsilon(1e-3));
      const double lo = std::min(0.0, -y);
      const double hi = std::max(0.0, -y);
      CHECK(hb.value(u, y) ==
            doctest::Approx(conjugate_recover(hb, u, y, lo, hi, 20000)).epsilon(1e-3));
      CHECK(hg.value(u, y) ==
            doctest::Approx(conjugate_recover(hg, u, y, lo, hi, 20000)).epsilon(1e-3));
    }
  }
}

TEST_CASE("Fenchel-Young holds with equality at alpha = l'(u)") {
  const sd::LossModel sq = sd::LossModel::squared();
  const sd::LossModel hb = sd::LossModel::huber(0.25);
  for (double u = -3.0; u <= 3.0; u += 0.119) {
    for (double y : {-1.0, 1.0}) {
      const double a_sq = sq.derivative(u, y);
      CHECK(sq.value(u, y) + sq.conjugate(a_sq, y) == doctest::Approx(a_sq * u).epsilon(1e-10));
      const double z = y * u;
      if (std::fabs(z - 1.0) > 1e-2 && std::fabs(z - 0.75) > 1e-2) {
        const double a_hb = hb.derivative(u, y);
        CHECK(hb.value(u, y) + hb.conjugate(a_hb, y) == doctest::Approx(a_hb * u).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("conjugate_derivative matches finite differences inside the interval") {
  const sd::LossModel sq = sd::LossModel::squared();
  for (double a = -5.0; a <= 5.0; a += 0.3) {
    const double fd = (sq.conjugate(a + 1e-6, 1.0) - sq.conjugate(a - 1e-6, 1.0)) / 2e-6;
    CHECK(sq.conjugate_derivative(a, 1.0) == doctest::Approx(fd).epsilon(1e-6));
  }
  const sd::LossModel hb = sd::LossModel::huber(0.25);
  for (double a = -0.9; a <= -0.1; a += 0.1) {
    const double fd = (hb.conjugate(a + 1e-7, 1.0) - hb.conjugate(a - 1e-7, 1.0)) / 2e-7;
    CHECK(hb.conjugate_derivative(a, 1.0) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("conjugate_derivative throws off the closed interval; hinge uses y on it") {
  const sd::LossModel hg = sd::LossModel::hinge();
  CHECK_THROWS_AS(hg.conjugate_derivative(0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(hg.conjugate_derivative(-1.1, 1.0), std::domain_error);
  CHECK(hg.conjugate_derivative(-0.5, 1.0) == 1.0);
  CHECK(hg.conjugate_derivative(0.0, 1.0) == 1.0);
  CHECK(hg.conjugate_derivative(0.5, -1.0) == -1.0);
  const sd::LossModel hb = sd::LossModel::huber(0.25);
  CHECK_THROWS_AS(hb.conjugate_derivative(0.1, 1.0), std::domain_error);
}

TEST_CASE("conjugates are mu-strongly convex for the smooth losses") {
  const sd::LossModel sq = sd::LossModel::squared();
  const sd::LossModel hb = sd::LossModel::huber(0.25);
  for (double a1 = -0.95; a1 <= -0.05; a1 += 0.1) {
    for (double a2 = -0.95; a2 <= -0.05; a2 += 0.17) {
      const double gap_sq = sq.conjugate(a2, 1.0) - sq.conjugate(a1, 1.0) -
                            sq.conjugate_derivative(a1, 1.0) * (a2 - a1);
      CHECK(gap_sq >= 0.5 / 2.0 * (a2 - a1) * (a2 - a1) - 1e-12);
      const double gap_hb = hb.conjugate(a2, 1.0) - hb.conjugate(a1, 1.0) -
                            hb.conjugate_derivative(a1, 1.0) * (a2 - a1);
      CHECK(gap_hb >= 0.25 / 2.0 * (a2 - a1) * (a2 - a1) - 1e-12);
    }
  }
}

TEST_CASE("loss ids round-trip and labels are validated") {
  CHECK(sd::LossModel::from_id("squared").kind() == sd::LossKind::squared);
  CHECK(sd::LossModel::from_id("huber", 0.5).gamma() == 0.5);
  CHECK(sd::LossModel::from_id("hinge").kind() == sd::LossKind::hinge);
  CHECK_THROWS_AS(sd::LossModel::from_id("logistic"), std::invalid_argument);
  CHECK_THROWS_AS(sd::LossModel::huber(0.0), std::invalid_argument);
  CHECK_THROWS_AS(sd::LossModel::huber(-0.25), std::invalid_argument);
  const sd::LossModel hg = sd::LossModel::hinge();
  CHECK_THROWS_AS(hg.value(0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(hg.feasible_interval(2.0), std::invalid_argument);
}
