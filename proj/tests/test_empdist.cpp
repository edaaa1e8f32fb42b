#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "pauc/empdist.hpp"

using pauc::ExtendedReal;
using pauc::PairedSample;
using pauc::Sample;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("ecdf counts observations at or below u", "[empdist]") {
  const Sample s({1.0, 2.0, 3.0});
  CHECK(pauc::ecdf_eval(s, 2.0) == Catch::Approx(2.0 / 3.0).epsilon(0));
  CHECK(pauc::ecdf_eval(s, 0.5) == 0.0);
  CHECK(pauc::ecdf_eval(s, kInf) == 1.0);
  CHECK(pauc::ecdf_eval(s, -kInf) == 0.0);

  const Sample ties({5.0, 5.0, 5.0, 7.0});
  CHECK(pauc::ecdf_eval(ties, 5.0) == 0.75);
  CHECK(ties.count_below(5.0) == 0);
  CHECK(ties.count_at_most(5.0) == 3);
}

TEST_CASE("quantile is the generalized inverse", "[empdist]") {
  const Sample s({3.0, 1.0, 2.0});
  CHECK(pauc::quantile(s, 1.0) == ExtendedReal::finite(3.0));
  CHECK(pauc::quantile(s, 0.0).is_neg_inf());

  const Sample t({10.0, 20.0, 30.0, 40.0, 50.0});
  CHECK(pauc::quantile(t, 0.4) == ExtendedReal::finite(20.0));
  // 5 * (1 - 0.6) is 1.9999999999999998 in binary; the ceiling must still be 2.
  CHECK(pauc::quantile(t, 1.0 - 0.6) == ExtendedReal::finite(20.0));
  CHECK(pauc::quantile(t, 0.41) == ExtendedReal::finite(30.0));
  CHECK_THROWS_AS(pauc::quantile(t, 1.5), std::invalid_argument);
}

TEST_CASE("quantile agrees with a scan of the inf definition", "[empdist]") {
  oracle::Generator gen(11);
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<double> v(gen.size(1, 40));
    for (auto& x : v) x = std::round(gen.normal() * 3.0);
    const Sample s(v);
    const double prob = rep % 5 == 0 ? static_cast<double>(gen.size(0, 10)) / 10.0 : gen.uniform(0, 1);
    const ExtendedReal q = pauc::quantile(s, prob);
    CHECK(q.to_double() == oracle::quantile(v, prob));
  }
}

TEST_CASE("sample rejects empty and non-finite input", "[empdist]") {
  CHECK_THROWS_WITH(Sample(std::vector<double>{}), "empty sample");
  CHECK_THROWS_AS(Sample({1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(Sample({1.0, kInf}), std::invalid_argument);
  CHECK_THROWS_AS(PairedSample::from_rows({{1.0, 2.0}, {3.0}}), std::invalid_argument);
}

TEST_CASE("sort permutation is consistent with the stored values", "[empdist]") {
  const Sample s({4.0, 1.0, 3.0, 1.0, 2.0});
  const auto order = s.order();
  const auto sorted = s.sorted();
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(s.values()[order[k]] == sorted[k]);
  // Stable for ties.
  CHECK(order[0] == 1);
  CHECK(order[1] == 3);
}

TEST_CASE("joint ecdf", "[empdist]") {
  const auto paired = PairedSample::from_rows({{1.0, 10.0}, {2.0, 20.0}, {3.0, 30.0}});
  CHECK(pauc::joint_ecdf_eval(paired, 0, 1, 2.0, 25.0) == Catch::Approx(2.0 / 3.0).epsilon(0));
  CHECK(pauc::joint_ecdf_eval(paired, 0, 1, kInf, kInf) == 1.0);
  CHECK(pauc::joint_ecdf_eval(paired, 0, 0, 2.0, 3.0) == Catch::Approx(2.0 / 3.0).epsilon(0));
}

TEST_CASE("empirical distribution properties on random samples", "[empdist][property]") {
  oracle::Generator gen(5);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = gen.size(1, 30);
    std::vector<std::vector<double>> rows(n, std::vector<double>(2));
    for (auto& r : rows) {
      r[0] = gen.normal();
      r[1] = rep % 2 ? std::round(gen.normal() * 2) : gen.normal();
    }
    const auto paired = PairedSample::from_rows(rows);
    const Sample& s0 = paired.column(0);
    const Sample& s1 = paired.column(1);

    // Monotone ecdf and quantile.
    double last = -1.0;
    for (double u = -3.0; u <= 3.0; u += 0.25) {
      const double f = pauc::ecdf_eval(s0, u);
      CHECK(f >= last);
      last = f;
    }
    double last_q = -kInf;
    for (double prob = 0.0; prob <= 1.0; prob += 0.05) {
      const double q = pauc::quantile(s1, prob).to_double();
      CHECK(q >= last_q);
      last_q = q;
    }

    // Galois relation on the tie-free column.
    for (double x : s0.sorted()) {
      CHECK(pauc::quantile(s0, pauc::ecdf_eval(s0, x)) == ExtendedReal::finite(x));
    }

    const double x = gen.normal();
    const double y = gen.normal();
    CHECK(pauc::joint_ecdf_eval(paired, 1, 1, x, y) == pauc::ecdf_eval(s1, std::min(x, y)));
    CHECK(pauc::joint_ecdf_eval(paired, 0, 1, x, y) <=
          std::min(pauc::ecdf_eval(s0, x), pauc::ecdf_eval(s1, y)));
  }
}

TEST_CASE("extended reals branch on kind", "[empdist]") {
  const auto lo = ExtendedReal::neg_inf();
  const auto hi = ExtendedReal::pos_inf();
  const auto one = ExtendedReal::finite(1.0);
  CHECK(lo.less_than(-1e300));
  CHECK_FALSE(hi.less_than(1e300));
  CHECK(hi.at_least(1e300));
  CHECK(one.at_least(1.0));
  CHECK_FALSE(one.less_than(1.0));
  CHECK_THROWS_AS(lo.value(), std::logic_error);
  CHECK(lo.to_double() == -kInf);
}

TEST_CASE("ceil_count snaps near-integer products", "[empdist]") {
  CHECK(pauc::ceil_count(5, 1.0 - 0.6) == 2);
  CHECK(pauc::ceil_count(5, 0.4) == 2);
  CHECK(pauc::ceil_count(10, 1.0 - 0.7) == 3);
  CHECK(pauc::ceil_count(5, 0.41) == 3);
  CHECK(pauc::ceil_count(7, 0.0) == 0);
  CHECK(pauc::ceil_count(1000, 0.95) == 950);
}
