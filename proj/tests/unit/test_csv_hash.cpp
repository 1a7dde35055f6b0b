#include <sstream>

#include "doctest.h"
#include "litclass/csv.hpp"
#include "litclass/error.hpp"
#include "litclass/hash.hpp"

using namespace litclass;

TEST_SUITE("csv") {
  TEST_CASE("escape quotes only when needed") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv::escape("two\nlines") == "\"two\nlines\"");
  }

  TEST_CASE("reader handles quoted newlines and CRLF") {
    std::istringstream in("a,b\r\n\"x\ny\",\"q\"\"\"\r\nlast,\n");
    csv::Reader r(in);
    std::vector<std::string> row;
    REQUIRE(r.next(row));
    CHECK(row == std::vector<std::string>{"a", "b"});
    REQUIRE(r.next(row));
    CHECK(row == std::vector<std::string>{"x\ny", "q\""});
    CHECK(r.line() == 2);
    REQUIRE(r.next(row));
    CHECK(row == std::vector<std::string>{"last", ""});
    CHECK(r.line() == 4);
    CHECK_FALSE(r.next(row));
  }

  TEST_CASE("unterminated quote is a parse error") {
    std::istringstream in("\"open,field\n");
    csv::Reader r(in);
    std::vector<std::string> row;
    CHECK_THROWS_AS(r.next(row), ParseError);
  }

  TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    Sha256 inc;
    inc.update("a").update("bc");
    CHECK(inc.hex() == sha256_hex("abc"));
  }

  TEST_CASE("field hashing separates boundaries") {
    Sha256 x, y;
    x.field("ab").field("c");
    y.field("a").field("bc");
    CHECK(x.hex() != y.hex());
  }
}
