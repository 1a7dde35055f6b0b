#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "litclass/error.hpp"
#include "litclass/textprep.hpp"

using namespace litclass;

using Tokens = std::vector<std::string>;

TEST_SUITE("textprep") {
  TEST_CASE("tokenize splits on non-letters") {
    CHECK(tokenize("Speech-sound disorders in 8-year-olds.") ==
          Tokens{"speech", "sound", "disorders", "year", "olds"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("A an of").empty());
    TokenizerConfig keep_case;
    keep_case.lowercase = false;
    CHECK(tokenize("Speech Therapy", keep_case) == Tokens{"Speech", "Therapy"});
  }

  TEST_CASE("stop words include the domain list") {
    auto stops = StopList::defaults();
    CHECK(remove_stopwords({"the", "patient", "showed", "result"}, stops) == Tokens{"showed"});
    CHECK(remove_stopwords({}, stops).empty());
    CHECK(remove_stopwords({"stuttering", "children"}, stops) == Tokens{"stuttering", "children"});
  }

  TEST_CASE("extra word list file") {
    testing::TempDir dir("stop");
    {
      std::ofstream out(dir / "extra.txt");
      out << "# comment\n\nfoo\n  bar  \n";
    }
    auto words = StopList::read_word_list(dir / "extra.txt");
    CHECK(words.count("foo") == 1);
    CHECK(words.count("bar") == 1);
    CHECK(words.size() == 2);
  }

  TEST_CASE("document frequency pruning bounds") {
    TokenDocs docs(6, Tokens{"common"});
    docs[0].push_back("rare");
    auto v = build_vocabulary(docs, 2, 1.0);
    CHECK_FALSE(v.id("rare").has_value());
    CHECK(v.id("common").has_value());

    auto with_df = [](std::size_t df) {
      TokenDocs d(100, Tokens{"base"});
      for (std::size_t i = 0; i < df; ++i) d[i].push_back("probe");
      return build_vocabulary(d, 1, 0.95).id("probe").has_value();
    };
    CHECK_FALSE(with_df(96));
    CHECK(with_df(95));
  }

  TEST_CASE("vocabulary errors") {
    CHECK_THROWS_AS(build_vocabulary({}, 1, 0.95), InvalidArgument);
    CHECK_THROWS_AS(build_vocabulary({{"a"}}, 1, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_vocabulary({{"a"}}, 1, 1.5), InvalidArgument);
    CHECK_THROWS_AS(Vocabulary({"a", "a"}, {1, 1}, 1), InvalidArgument);
  }

  TEST_CASE("vocabulary ids follow first appearance and serialize") {
    auto v = build_vocabulary({{"b", "a"}, {"a", "c"}}, 1, 1.0);
    CHECK(v.tokens() == Tokens{"b", "a", "c"});
    CHECK(v.doc_freq(*v.id("a")) == 2);
    testing::TempDir dir("vocab");
    v.write(dir / "v.tsv");
    CHECK(Vocabulary::read(dir / "v.tsv", 2) == v);
    CHECK(v.content_hash() == Vocabulary::read(dir / "v.tsv", 2).content_hash());
  }

  TEST_CASE("bag of words") {
    auto v = build_vocabulary({{"speech", "disorder"}}, 1, 1.0);
    auto bow = to_bow(Tokens{"speech", "disorder", "speech"}, v);
    CHECK(bow == SparseDoc{{*v.id("speech"), 2}, {*v.id("disorder"), 1}});
    CHECK(to_bow(Tokens{"unknown", "words"}, v).empty());

    BowCorpus corpus = to_bow(TokenDocs{{"speech"}, {}, {"disorder", "speech"}}, v);
    CHECK(corpus.total_tokens() == 3);
    CHECK(corpus.doc_length(1) == 0);
    testing::TempDir dir("bow");
    corpus.write(dir / "b.txt");
    CHECK(BowCorpus::read(dir / "b.txt", v.size()) == corpus);
  }

  TEST_CASE("bigram in five documents survives") {
    TokenDocs docs;
    for (int i = 0; i < 5; ++i) docs.push_back({"speech", "disorder", "filler" + std::string(1, char('a' + i))});
    NgramConfig cfg;
    cfg.lo = 1;
    cfg.hi = 3;
    cfg.min_df = 5;
    cfg.max_df = 1.0;
    auto ng = ngram_counts(docs, cfg);
    REQUIRE(ng.vocab.id("speech disorder").has_value());
    CHECK_FALSE(ng.vocab.id("disorder fillera").has_value());
    const int id = *ng.vocab.id("speech disorder");
    for (const auto& d : ng.counts.docs) {
      CHECK(std::any_of(d.begin(), d.end(), [&](const TermCount& t) { return t.id == id && t.count == 1; }));
    }
    NgramConfig bad;
    bad.lo = 2;
    bad.hi = 1;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  }

  TEST_CASE("token docs round trip") {
    TokenDocs docs{{"a", "b"}, {}, {"c"}};
    testing::TempDir dir("tok");
    write_token_docs(docs, dir / "t.txt");
    CHECK(read_token_docs(dir / "t.txt") == docs);
  }
}
