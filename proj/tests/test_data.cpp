#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "cat/data.hpp"
#include "cat/error.hpp"
#include "helpers.hpp"

using namespace cat;
using namespace cat::data;

TEST_SUITE_BEGIN("data");

TEST_CASE("parse with header") {
  const auto d = parse_csv("a,b\n1,2\n3,4\n5,6\n", true);
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(d.names() == std::vector<std::string>{"a", "b"});
  CHECK(d.at(2, 1) == 6.0);
  CHECK(d.index_of("b") == 1u);
  CHECK_FALSE(d.index_of("c"));
}

TEST_CASE("parse without header") {
  const auto d = parse_csv("1,2\n3,4\n", false);
  CHECK(d.names() == std::vector<std::string>{"X1", "X2"});
  CHECK(d.at(1, 0) == 3.0);
}

TEST_CASE("parse errors carry a location") {
  try {
    parse_csv("a,b\n1,2\n3,NaN\n", true);
    FAIL("expected an error");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("", true), DataError);
  CHECK_THROWS_AS(parse_csv("a\n1\n2\n", true), DataError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2\n3\n", true), DataError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,x\n3,4\n", true), DataError);
  CHECK_THROWS_AS(parse_csv("a,a\n1,2\n3,4\n", true), DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", true), DataError);
}

TEST_CASE("split partitions rows") {
  std::vector<double> a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = i;
    b[i] = -i;
  }
  const Dataset d({"a", "b"}, {a, b});
  const auto s = split(d, 0.5, 7);
  CHECK(s.main.n() == 50);
  CHECK(s.auxiliary.n() == 50);
  std::vector<double> rows;
  for (const auto* part : {&s.main, &s.auxiliary})
    for (std::size_t r = 0; r < part->n(); ++r) {
      rows.push_back(part->at(r, 0));
      CHECK(part->at(r, 1) == -part->at(r, 0));
    }
  std::sort(rows.begin(), rows.end());
  CHECK(rows == a);

  const auto again = split(d, 0.5, 7);
  CHECK(std::equal(again.main.column(0).begin(), again.main.column(0).end(),
                   s.main.column(0).begin()));
}

TEST_CASE("split rounds the auxiliary half down") {
  const Dataset d({"a", "b"}, {{1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}});
  const auto s = split(d, 0.5, 1);
  CHECK(s.auxiliary.n() == 2);
  CHECK(s.main.n() == 3);
  CHECK_THROWS_AS(split(d, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(split(d, 0.0, 1), ConfigError);
}

TEST_CASE("column variance") {
  const Dataset d({"a", "b", "c"}, {{1, 1, 1}, {0, 2, 5}, {-1, 0, 1}});
  const auto c0 = column_variance(d, 0);
  CHECK(c0.value == 0.0);
  CHECK(c0.degenerate);
  const Dataset d2({"a", "b"}, {{0, 2}, {1, 1}});
  CHECK(column_variance(d2, 0).value == 1.0);
  CHECK_FALSE(column_variance(d2, 0).degenerate);
  CHECK(column_variance(d, 2).value == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("save and load round trip") {
  const auto x = testing::normals(50, 3);
  const auto y = testing::normals(50, 4, 1e-7);
  const Dataset d({"x", "y"}, {x, y});
  const auto path = std::filesystem::temp_directory_path() / "cat_roundtrip.csv";
  save_csv(d, path);
  const auto back = load_csv(path, true);
  std::filesystem::remove(path);
  CHECK(back.names() == d.names());
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t r = 0; r < 50; ++r) CHECK(back.at(r, c) == d.at(r, c));
}

TEST_CASE("invariants are enforced") {
  CHECK_THROWS_AS(Dataset({"a"}, {{1, 2}}), DataError);
  CHECK_THROWS_AS(Dataset({"a", "b"}, {{1}, {2}}), DataError);
  CHECK_THROWS_AS(Dataset({"a", "b"}, {{1, INFINITY}, {2, 3}}), DataError);
}

TEST_CASE("standardize") {
  const Dataset d({"a", "b"}, {{1, 2, 3, 4}, {10, 0, 10, 0}});
  const auto s = standardize(d);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(std::abs(mean(s.column(c))) < 1e-15);
    CHECK(variance(s.column(c)) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(standardize(Dataset({"a", "b"}, {{1, 1}, {1, 2}})), DegenerateError);
}

TEST_SUITE_END();
