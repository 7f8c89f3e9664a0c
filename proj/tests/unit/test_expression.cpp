#include <doctest.h>

#include <cmath>
#include <string>

#include "hqc/errors.hpp"
#include "hqc/expression.hpp"

using hqc::Expression;

TEST_CASE("expression evaluation") {
  CHECK(Expression::parse("R^2 + 2*P")(3.0, 0.5) == 10.0);
  CHECK(Expression::parse("-R^2")(2.0, 0.0) == -4.0);
  CHECK(Expression::parse("2^3^2")(0.0, 0.0) == 512.0);
  CHECK(Expression::parse("(1 + 2) * 3 - 4 / 2")(0.0, 0.0) == 7.0);
  CHECK(Expression::parse("sin(R) + cos(P)")(0.3, 0.7) == doctest::Approx(std::sin(0.3) + std::cos(0.7)));
  CHECK(Expression::parse("atan(R*R + P*P)")(1.0, 0.0) == doctest::Approx(M_PI / 4));
  CHECK(Expression::parse("exp(-(R^2+P^2)/2)/(2*pi)")(0.0, 0.0) == doctest::Approx(1.0 / (2 * M_PI)));
  CHECK(Expression::parse("1.5e-1")(0.0, 0.0) == doctest::Approx(0.15));
}

TEST_CASE("expression syntax errors name the column") {
  auto message = [](const char* text) {
    try {
      Expression::parse(text);
    } catch (const hqc::InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("R + * P").find("column") != std::string::npos);
  CHECK(!message("sin(R").empty());
  CHECK(!message("Q").empty());
  CHECK(!message("").empty());
  CHECK(!message("1 2").empty());
}
