#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bets/csv.hpp"

using namespace bets;

TEST_CASE("formatted doubles parse back to the same bits") {
  const std::vector<double> values{0.0,    -0.0,   0.1,     1.0 / 3.0, -2.5e-7,
                                   1e308,  5e-324, 123456.0, 0.16666666666666666};
  for (double v : values) {
    REQUIRE(parse_double(format_double(v)) == v);
  }
  REQUIRE(format_u64(0) == "0");
  REQUIRE(format_u64(18446744073709551615ULL) == "18446744073709551615");
}

TEST_CASE("formatting is stable across calls") {
  const double v = 1.0 / 6.0;
  REQUIRE(format_double(v) == format_double(v));
}

TEST_CASE("parse_double rejects malformed numbers") {
  REQUIRE_THROWS_AS(parse_double("abc"), Error);
  REQUIRE_THROWS_AS(parse_double("1.5x"), Error);
  REQUIRE_THROWS_AS(parse_double(""), Error);
}

TEST_CASE("split and join are inverses on comma-free cells") {
  const std::vector<std::string> cells{"a", "2.5", "", "last"};
  REQUIRE(split_csv_line(join_csv_line(cells)) == cells);
  REQUIRE(split_csv_line("a,,b").size() == 3);
  REQUIRE(split_csv_line("single") == std::vector<std::string>{"single"});
}

TEST_CASE("read_csv parses header plus rows and strips CR") {
  std::istringstream in("x,y\r\n1,2\r\n3,4\n");
  const CsvTable t = read_csv(in);
  REQUIRE(t.header == std::vector<std::string>{"x", "y"});
  REQUIRE(t.rows.size() == 2);
  REQUIRE(t.rows[1] == std::vector<std::string>{"3", "4"});
}

TEST_CASE("read_csv rejects ragged rows and empty input") {
  std::istringstream ragged("x,y\n1,2,3\n");
  REQUIRE_THROWS_AS(read_csv(ragged), Error);
  std::istringstream empty("");
  REQUIRE_THROWS_AS(read_csv(empty), Error);
}

TEST_CASE("column lookup distinguishes missing from present") {
  CsvTable t;
  t.header = {"alpha", "beta"};
  REQUIRE(t.column("beta") == 1);
  REQUIRE(t.column("gamma") == -1);
  REQUIRE(t.require_column("alpha") == 0);
  REQUIRE_THROWS_AS(t.require_column("gamma"), Error);
}

TEST_CASE("read_csv_file reports unknown paths") {
  REQUIRE_THROWS_AS(read_csv_file("/nonexistent/path/file.csv"), Error);
}
