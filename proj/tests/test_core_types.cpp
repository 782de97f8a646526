#include "linbandit/types.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace linbandit;

TEST_SUITE("core_types") {

TEST_CASE("check_context rejects bad dimensions and non-finite values") {
  CHECK_NOTHROW(check_context(Vector::Zero(3), 3));
  CHECK_THROWS_AS(check_context(Vector::Zero(2), 3), DimensionError);
  CHECK_THROWS_AS(check_context(Vector::Zero(0), 0), DimensionError);
  Vector v = Vector::Zero(2);
  v(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(check_context(v, 2), DimensionError);
  v(1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(check_context(v, 2), DimensionError);
}

TEST_CASE("last_batch_end") {
  CHECK(last_batch_end(150, 100) == 100);
  CHECK(last_batch_end(100, 100) == 0);
  CHECK(last_batch_end(201, 100) == 200);
  CHECK(last_batch_end(1, 100) == 0);
  CHECK(last_batch_end(7, 1) == 6);
}

TEST_CASE("batch_slice") {
  History h(1, 2);
  for (int i = 1; i <= 5; ++i) h.append(Vector::Constant(1, i), 10.0 * i);
  CHECK(h.num_batches() == 3);

  auto b2 = h.batch_slice(2);
  REQUIRE(b2.contexts.rows() == 2);
  CHECK(b2.first_round == 3);
  CHECK(b2.contexts(0, 0) == 3.0);
  CHECK(b2.contexts(1, 0) == 4.0);
  CHECK(b2.rewards(1) == 40.0);

  auto b3 = h.batch_slice(3);
  REQUIRE(b3.contexts.rows() == 1);
  CHECK(b3.contexts(0, 0) == 5.0);

  CHECK_THROWS_AS(h.batch_slice(4), EmptyBatchError);
  CHECK_THROWS_AS(h.batch_slice(0), EmptyBatchError);
}

TEST_CASE("history append checks dimension") {
  History h(2, 10);
  CHECK_THROWS_AS(h.append(Vector::Zero(3), 0.0), DimensionError);
  h.append(Vector::Ones(2), 1.5);
  CHECK(h.size() == 1);
  CHECK(h.context(1)(1) == 1.0);
  CHECK(h.reward(1) == 1.5);
}

TEST_CASE("context round slots") {
  ContextRound r(2, 3);
  CHECK(r.num_available() == 0);
  CHECK_THROWS(r.validate());
  r.set(1, Vector::Ones(2));
  CHECK(r.available(1));
  CHECK_FALSE(r.available(0));
  CHECK_FALSE(r.slot(0).has_value());
  CHECK(r.slot(1)->isApprox(Vector::Ones(2)));
  CHECK_THROWS_AS(r.context(0), InvalidActionError);
  CHECK_NOTHROW(r.validate());
  CHECK_THROWS_AS(r.set(0, Vector::Ones(3)), DimensionError);
  r.clear(1);
  CHECK(r.num_available() == 0);
}

TEST_CASE("two-bridge pattern validation") {
  ContextRound r(2, 2);
  r.kind = RoundKind::C;
  r.set(1, Vector::Unit(2, 1));
  CHECK_NOTHROW(r.validate());
  r.set(0, Vector::Unit(2, 0));
  CHECK_THROWS(r.validate());
}

TEST_CASE("last_batch_end invariants") {
  for (std::int64_t y = 1; y <= 17; ++y) {
    for (std::int64_t t = 1; t <= 200; ++t) {
      const auto e = last_batch_end(t, y);
      REQUIRE(e < t);
      REQUIRE(e % y == 0);
      REQUIRE(t - e <= y);
    }
  }
}

TEST_CASE("concatenated batch slices reproduce the history") {
  for (std::int64_t y : {1, 3, 7, 50}) {
    History h(2, y);
    for (int i = 1; i <= 47; ++i) {
      Vector x(2);
      x << i, -i;
      h.append(x, 0.5 * i);
      std::int64_t round = 1;
      for (std::int64_t b = 1; b <= (h.size() + y - 1) / y; ++b) {
        const auto slice = h.batch_slice(b);
        REQUIRE(slice.first_round == round);
        for (Eigen::Index j = 0; j < slice.contexts.rows(); ++j, ++round) {
          REQUIRE(slice.contexts.row(j).transpose() == h.context(round));
          REQUIRE(slice.rewards(j) == h.reward(round));
        }
      }
      REQUIRE(round == h.size() + 1);
    }
  }
}

}  // TEST_SUITE
