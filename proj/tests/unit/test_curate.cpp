#include "doctest.h"
#include "fixtures.hpp"
#include "litclass/curate.hpp"
#include "litclass/error.hpp"

using namespace litclass;

namespace {

DocumentRecord rec(std::string pmid, std::optional<std::string> lang, std::string title = "Child study",
                   std::optional<std::string> abstract = std::nullopt) {
  DocumentRecord r;
  r.pmid = std::move(pmid);
  r.title = std::move(title);
  r.language = std::move(lang);
  r.abstract = std::move(abstract);
  return r;
}

std::vector<std::string> pmids(const std::vector<DocumentRecord>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.pmid);
  return out;
}

}  // namespace

TEST_SUITE("curate") {
  TEST_CASE("language filter keeps English and unknown") {
    auto out = filter_language({rec("1", "eng"), rec("2", "fre"), rec("3", "eng")});
    CHECK(out.kept.size() == 2);
    CHECK(out.removed == 1);
    auto unknown = filter_language({rec("4", std::nullopt)});
    CHECK(unknown.kept.size() == 1);
    CHECK(unknown.removed == 0);
  }

  TEST_CASE("child relevance is a case-insensitive word prefix") {
    ChildKeywordSet kw;
    CHECK(mentions_stem("Outcomes in CHILDREN with apraxia", kw));
    CHECK_FALSE(mentions_stem("Adult stuttering therapy", kw));
    CHECK_FALSE(mentions_stem("grandchildren", kw));
    CHECK(mentions_stem("pre-adolescents", kw));
    auto out = filter_child_relevance(
        {rec("1", "eng", "Outcomes in CHILDREN with apraxia"),
         rec("2", "eng", "Adult stuttering therapy", "Participants were adults only.")},
        kw);
    CHECK(pmids(out.kept) == std::vector<std::string>{"1"});
    CHECK(out.removed == 1);
  }

  TEST_CASE("empty keyword stems are rejected") {
    ChildKeywordSet kw;
    kw.stems.clear();
    CHECK_THROWS_AS(kw.validate(), InvalidArgument);
    kw.stems = {""};
    CHECK_THROWS_AS(kw.validate(), InvalidArgument);
  }

  TEST_CASE("ten record fixture keeps five") {
    auto raw = read_corpus_csv(testing::fixture("curation_fixture.csv"));
    REQUIRE(raw.size() == 10);
    auto res = curate(raw);
    CHECK(pmids(res.records) == std::vector<std::string>{"101", "104", "108", "109", "110"});
    REQUIRE(res.report.steps.size() == 3);
    CHECK(res.report.steps[0] == CurationStep{"Initial retrieval", 0, 10});
    CHECK(res.report.steps[1] == CurationStep{"Non-English articles removed", 3, 7});
    CHECK(res.report.steps[2] == CurationStep{"Non-child-related articles removed", 2, 5});
    CHECK(res.report.telescopes());
  }

  TEST_CASE("curation is idempotent") {
    auto raw = read_corpus_csv(testing::fixture("curation_fixture.csv"));
    auto once = curate(raw);
    auto twice = curate(once.records);
    CHECK(twice.records == once.records);
    CHECK(twice.report.steps[1].removed == 0);
    CHECK(twice.report.steps[2].removed == 0);
  }

  TEST_CASE("empty input gives an empty report") {
    auto res = curate({});
    CHECK(res.records.empty());
    CHECK(res.report.steps[0].remaining == 0);
    CHECK(res.report.telescopes());
  }

  TEST_CASE("report csv round trip") {
    auto res = curate(read_corpus_csv(testing::fixture("curation_fixture.csv")));
    testing::TempDir dir("curate");
    res.report.write_csv(dir / "r.csv");
    CHECK(CurationReport::read_csv(dir / "r.csv").steps == res.report.steps);
    CurationReport broken{{{"a", 0, 10}, {"b", 3, 8}}};
    CHECK_FALSE(broken.telescopes());
  }
}
