#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "kreinlab/symbol.hpp"

using namespace kreinlab;

TEST_CASE("boundary symbols store one value per non-negative mode") {
  const auto c = BoundarySymbol::constant(2.5, 4);
  CHECK(c.max_mode() == 4);
  CHECK(c.at(3) == 2.5);
  CHECK_THROWS_AS(c.at(5), std::out_of_range);
  const auto g = BoundarySymbol::generate(3, [](int m) { return m * m + 1.0; }, 2);
  CHECK(g.at(3) == 10.0);
  CHECK(g.order_hint == 2);
  CHECK(g.contains(0));
  CHECK_FALSE(g.contains(4));
}

TEST_CASE("symbol validation") {
  auto s = BoundarySymbol::constant(1.0, 2);
  CHECK_NOTHROW(s.validate());
  s.values[1] = NAN;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  auto z = BoundarySymbol::constant(0.0, 2);
  CHECK_NOTHROW(z.validate());
  z.invertible = true;
  CHECK_THROWS_AS(z.validate(), std::invalid_argument);
  CHECK_THROWS_AS(require_same_modes(BoundarySymbol::constant(1, 2), BoundarySymbol::constant(1, 3), "t"),
                  std::invalid_argument);
}

TEST_CASE("T specifications and their essential spectrum") {
  const auto t = TSpec::constant(0.5);
  CHECK(t.value(17) == 0.5);
  REQUIRE(t.essential_spectrum().size() == 1);
  CHECK(t.essential_spectrum()[0] == 0.5);
  CHECK_THROWS_AS(TSpec::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(TSpec::constant(INFINITY), std::invalid_argument);

  const auto p = TSpec::periodic({0.4, 0.6});
  CHECK(p.value(0) == 0.4);
  CHECK(p.value(3) == 0.6);
  const auto ess = p.essential_spectrum();
  REQUIRE(ess.size() == 2);
  CHECK(ess[0] == 0.4);
  CHECK(ess[1] == 0.6);
  CHECK_THROWS(TSpec::periodic({}));
  CHECK_THROWS(TSpec::periodic({1.0, 0.0}));

  std::map<int, double> tab{{0, 2.0}, {1, 2.0}, {2, 2.0}, {3, 5.0}};
  const auto tt = TSpec::table(tab);
  CHECK(tt.value(3) == 5.0);
  CHECK_THROWS_AS(tt.value(4), std::out_of_range);
  REQUIRE(tt.essential_spectrum(3).size() == 1);
  CHECK(tt.essential_spectrum(3)[0] == 2.0);
}

TEST_CASE("tables accumulating at zero are rejected") {
  std::map<int, double> tab;
  for (int m = 0; m < 64; ++m) tab[m] = std::pow(0.5, m);
  CHECK_THROWS_AS(TSpec::table(tab), std::invalid_argument);
  CHECK_THROWS_AS(TSpec::table({{0, 1.0}, {1, 0.0}}), std::invalid_argument);
}
