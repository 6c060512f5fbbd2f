#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "idepnn/conllu.hpp"
#include "idepnn/corpus.hpp"
#include "idepnn/errors.hpp"
#include "idepnn/jsonl.hpp"
#include "idepnn/standoff.hpp"
#include "test_helpers.hpp"

using namespace idepnn;

namespace {

const char* kTwoTokenConllu =
    "1\tPaul\tpaul\tPROPN\tNNP\t_\t2\tnsubj\t_\t_\n"
    "2\truns\trun\tVERB\tVBZ\t_\t0\troot\t_\t_\n";

Document simple_doc(const std::string& id, int n_sentences) {
  Document doc;
  doc.id = id;
  for (int s = 0; s < n_sentences; ++s) {
    doc.sentences.push_back(test::make_sentence(
        s, {{"a", "NOUN", 2, "nsubj"}, {"b", "VERB", 0, "root"}, {"c", "NOUN", 2, "obj"}}));
  }
  return doc;
}

}  // namespace

TEST_CASE("parse_conllu: empty input yields no sentences") {
  CHECK(parse_conllu("").empty());
  CHECK(parse_conllu("\n\n# comment only\n").empty());
}

TEST_CASE("parse_conllu: two-token block") {
  const auto sentences = parse_conllu(kTwoTokenConllu);
  REQUIRE(sentences.size() == 1);
  REQUIRE(sentences[0].size() == 2);
  CHECK(sentences[0].root_index() == 2);
  CHECK(sentences[0].tokens[0].surface == "Paul");
  CHECK(sentences[0].tokens[0].pos == "PROPN");
  CHECK(sentences[0].tokens[0].head == 2);
  CHECK(sentences[0].tokens[0].deprel == "nsubj");
}

TEST_CASE("parse_conllu: TokenRange fills character spans") {
  const auto sentences = parse_conllu(
      "1\tPaul\t_\tPROPN\t_\t_\t2\tnsubj\t_\tTokenRange=0-4\n"
      "2\truns\t_\tVERB\t_\t_\t0\troot\t_\tTokenRange=5-9|SpaceAfter=No\n");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].tokens[0].char_start == 0);
  CHECK(sentences[0].tokens[0].char_end == 4);
  CHECK(sentences[0].tokens[1].char_start == 5);
  CHECK(sentences[0].tokens[1].char_end == 9);
}

TEST_CASE("parse_conllu: self-loop head is rejected") {
  const std::string bad =
      "1\ta\t_\tX\t_\t_\t2\tdep\t_\t_\n"
      "2\tb\t_\tX\t_\t_\t2\tdep\t_\t_\n";
  CHECK_THROWS_WITH_AS(static_cast<void>(parse_conllu(bad)),
                       doctest::Contains("self-loop"), DataError);
}

TEST_CASE("parse_conllu: malformed blocks carry line diagnostics") {
  CHECK_THROWS_WITH_AS(static_cast<void>(parse_conllu("1\ta\t_\tX\t_\t_\tx\tdep\t_\t_\n")),
                       doctest::Contains("non-integer HEAD"), DataError);
  CHECK_THROWS_AS(static_cast<void>(parse_conllu("1\ta\t_\tX\t_\t_\t9\tdep\t_\t_\n")), DataError);
  // Zero roots and multiple roots.
  CHECK_THROWS_AS(static_cast<void>(parse_conllu("1\ta\t_\tX\t_\t_\t2\tdep\t_\t_\n"
                                                 "2\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n")),
                  DataError);
  CHECK_THROWS_AS(static_cast<void>(parse_conllu("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n"
                                                 "2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n")),
                  DataError);
  // Cycle between non-root tokens.
  CHECK_THROWS_WITH_AS(static_cast<void>(parse_conllu("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n"
                                                      "2\tb\t_\tX\t_\t_\t3\tdep\t_\t_\n"
                                                      "3\tc\t_\tX\t_\t_\t2\tdep\t_\t_\n")),
                       doctest::Contains("cyclic"), DataError);
  // Ten columns are mandatory.
  CHECK_THROWS_AS(static_cast<void>(parse_conllu("1\ta\tb\n")), DataError);
}

TEST_CASE("parse_conllu: multiword ranges and empty nodes are skipped") {
  const auto sentences = parse_conllu(
      "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tde\t_\tADP\t_\t_\t2\tcase\t_\t_\n"
      "2\tel\t_\tDET\t_\t_\t0\troot\t_\t_\n"
      "2.1\tghost\t_\t_\t_\t_\t_\t_\t_\t_\n");
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].size() == 2);
}

TEST_CASE("import_standoff: exact and multi-token alignment") {
  // text: "Paul Allen Group runs" with per-token offsets
  Sentence s = test::make_sentence(0, {{"Paul", "PROPN", 3, "compound"},
                                       {"Allen", "PROPN", 3, "compound"},
                                       {"Group", "PROPN", 4, "nsubj"},
                                       {"runs", "VERB", 0, "root"}});
  const long offsets[4][2] = {{0, 4}, {5, 10}, {11, 16}, {17, 21}};
  for (int i = 0; i < 4; ++i) {
    s.tokens[i].char_start = offsets[i][0];
    s.tokens[i].char_end = offsets[i][1];
  }

  SUBCASE("exact single-token alignment") {
    const Document doc = import_standoff("d1", "Paul Allen Group runs", "T1\tPer 0 4\tPaul\n",
                                         "", {s});
    REQUIRE(doc.mentions.size() == 1);
    CHECK(doc.mentions[0].first == 1);
    CHECK(doc.mentions[0].last == 1);
    CHECK(doc.mentions[0].etype == "Per");
  }

  SUBCASE("minimal cover over several tokens") {
    // Brute-force oracle: smallest [first, last] whose char range covers [0, 16).
    int best_first = -1, best_last = -1;
    for (int first = 1; first <= 4; ++first) {
      for (int last = first; last <= 4; ++last) {
        const bool covers = s.tokens[first - 1].char_start <= 0 && s.tokens[last - 1].char_end >= 16;
        bool overlaps_all = true;
        for (int i = first; i <= last; ++i) {
          if (s.tokens[i - 1].char_end <= 0 || s.tokens[i - 1].char_start >= 16) {
            overlaps_all = false;
          }
        }
        if (covers && overlaps_all && best_first < 0) {
          best_first = first;
          best_last = last;
        }
      }
    }
    REQUIRE(best_first == 1);
    REQUIRE(best_last == 3);

    const Document doc =
        import_standoff("d1", "Paul Allen Group runs", "T1\tOrg 0 16\tPaul Allen Group\n", "", {s});
    REQUIRE(doc.mentions.size() == 1);
    CHECK(doc.mentions[0].first == best_first);
    CHECK(doc.mentions[0].last == best_last);
  }

  SUBCASE("relation with dangling argument is an error") {
    CHECK_THROWS_WITH_AS(
        static_cast<void>(import_standoff("d1", "", "T1\tPer 0 4\tPaul\n",
                                          "R1\tWorks Agent:T1 Org:T9\n", {s})),
        doctest::Contains("T9"), DataError);
  }

  SUBCASE("relations resolve role-tagged arguments in order") {
    const Document doc = import_standoff("d1", "", "T1\tPer 0 4\tPaul\nT2\tOrg 11 16\tGroup\n",
                                         "R1\tWorks Agent:T1 Org:T2\n", {s});
    REQUIRE(doc.gold_relations.size() == 1);
    CHECK(doc.gold_relations[0].e1 == "T1");
    CHECK(doc.gold_relations[0].e2 == "T2");
    CHECK(doc.gold_relations[0].label == "Works");
  }

  SUBCASE("offsets not coverable by tokens") {
    CHECK_THROWS_WITH_AS(
        static_cast<void>(import_standoff("d1", "", "T1\tPer 4 5\tx\n", "", {s})),
        doctest::Contains("not coverable"), DataError);
  }

  SUBCASE("tokens without spans are rejected") {
    Sentence bare = test::make_sentence(0, {{"a", "X", 0, "root"}});
    CHECK_THROWS_AS(static_cast<void>(import_standoff("d1", "", "T1\tPer 0 1\ta\n", "", {bare})),
                    DataError);
  }
}

TEST_CASE("load_jsonl: empty, valid and invalid records") {
  CHECK(load_jsonl_text("").docs.empty());

  const std::string valid =
      R"({"id":"d1","sentences":[{"tokens":[{"form":"a","pos":"N","head":2,"deprel":"nsubj"},)"
      R"({"form":"b","pos":"V","head":0,"deprel":"root"}]},)"
      R"({"tokens":[{"form":"c","pos":"N","head":0,"deprel":"root"}]}],)"
      R"("mentions":[{"id":"T1","sentence":0,"first":1,"last":1,"etype":"Per"}],"relations":[]})";
  const Corpus corpus = load_jsonl_text(valid);
  REQUIRE(corpus.docs.size() == 1);
  CHECK(corpus.docs[0].sentences.size() == 2);
  CHECK(corpus.docs[0].mentions.size() == 1);

  const std::string bad_sentence_index =
      R"({"id":"d1","sentences":[{"tokens":[{"form":"b","pos":"V","head":0,"deprel":"root"}]}],)"
      R"("mentions":[{"id":"T1","sentence":5,"first":1,"last":1,"etype":"Per"}],"relations":[]})";
  CHECK_THROWS_WITH_AS(static_cast<void>(load_jsonl_text(bad_sentence_index)),
                       doctest::Contains("d1"), DataError);

  CHECK_THROWS_WITH_AS(static_cast<void>(load_jsonl_text("{not json")),
                       doctest::Contains("line 1"), DataError);
}

TEST_CASE("jsonl round trip preserves documents") {
  const Document doc = test::make_cross_sentence_doc();
  Corpus corpus;
  corpus.docs.push_back(doc);
  std::ostringstream out;
  save_jsonl(corpus, out);
  const Corpus back = load_jsonl_text(out.str());
  REQUIRE(back.docs.size() == 1);
  CHECK(back.docs[0].id == doc.id);
  REQUIRE(back.docs[0].sentences.size() == 2);
  CHECK(back.docs[0].sentences[1].tokens[0].surface == "group");
  CHECK(back.docs[0].gold_relations[0].label == "Per-Org");
}

TEST_CASE("generate_candidates: distance filter and ordering") {
  Document doc;
  doc.id = "d1";
  for (int s = 0; s < 4; ++s) {
    doc.sentences.push_back(test::make_sentence(s, {{"w", "N", 0, "root"}}));
  }
  doc.mentions.push_back({"e1", 0, 1, 1, "A"});
  doc.mentions.push_back({"e2", 1, 1, 1, "A"});
  doc.mentions.push_back({"e3", 3, 1, 1, "A"});
  RelationSchema schema;
  schema.entries.push_back({"LINK", "A", "A"});

  SUBCASE("k_max=0 with mentions in different sentences only") {
    CHECK(generate_candidates(doc, 0, schema).empty());
  }

  SUBCASE("k_max=2 keeps d=1 and d=2, drops d=3") {
    const auto cands = generate_candidates(doc, 2, schema);
    // Ordered pairs: (e1,e2) d=1, (e2,e1) d=1, (e2,e3) d=2, (e3,e2) d=2.
    REQUIRE(cands.size() == 4);
    CHECK(cands[0].e1 == "e1");
    CHECK(cands[0].e2 == "e2");
    CHECK(cands[0].sentence_distance == 1);
    CHECK(cands[2].e1 == "e2");
    CHECK(cands[2].e2 == "e3");
    CHECK(cands[2].sentence_distance == 2);
    for (const auto& c : cands) CHECK(c.sentence_distance <= 2);
  }

  SUBCASE("candidate monotonicity in k") {
    auto key_set = [](const std::vector<CandidatePair>& cs) {
      std::set<std::string> keys;
      for (const auto& c : cs) keys.insert(c.doc_id + "|" + c.e1 + "|" + c.e2);
      return keys;
    };
    const auto k1 = key_set(generate_candidates(doc, 1, schema));
    const auto k2 = key_set(generate_candidates(doc, 2, schema));
    const auto k3 = key_set(generate_candidates(doc, 3, schema));
    CHECK(std::includes(k2.begin(), k2.end(), k1.begin(), k1.end()));
    CHECK(std::includes(k3.begin(), k3.end(), k2.begin(), k2.end()));
  }
}

TEST_CASE("generate_candidates: gold labels and schema roles") {
  const Document doc = test::make_cross_sentence_doc();
  const RelationSchema schema = test::per_org_schema();
  const auto cands = generate_candidates(doc, 3, schema);
  // Only (M1, M2) matches the (Per, Org) role pair.
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].e1 == "M1");
  CHECK(cands[0].label == "Per-Org");
  CHECK(cands[0].sentence_distance == 1);

  // Exhaustiveness: every admissible gold relation within k appears positive.
  for (const auto& rel : doc.gold_relations) {
    const bool found = std::any_of(cands.begin(), cands.end(), [&](const CandidatePair& c) {
      return c.e1 == rel.e1 && c.e2 == rel.e2 && c.label == rel.label;
    });
    CHECK(found);
  }
}

TEST_CASE("sample_negatives: balance and determinism") {
  std::vector<CandidatePair> cands;
  for (int i = 0; i < 10; ++i) {
    cands.push_back({"d", "p" + std::to_string(i), "q", "REL", 0});
  }
  for (int i = 0; i < 50; ++i) {
    cands.push_back({"d", "n" + std::to_string(i), "q", kNoneLabel, 0});
  }

  const auto sampled = sample_negatives(cands, 7);
  const auto positives = std::count_if(sampled.begin(), sampled.end(),
                                       [](const CandidatePair& c) { return c.positive(); });
  CHECK(positives == 10);
  CHECK(sampled.size() == 20);

  const auto again = sample_negatives(cands, 7);
  REQUIRE(again.size() == sampled.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) CHECK(again[i].e1 == sampled[i].e1);

  SUBCASE("zero positives keeps zero negatives") {
    std::vector<CandidatePair> all_none(cands.begin() + 10, cands.end());
    CHECK(sample_negatives(all_none, 3).empty());
  }

  SUBCASE("deficit keeps all negatives") {
    std::vector<CandidatePair> few(cands.begin(), cands.begin() + 12);  // 10 pos + 2 neg
    CHECK(sample_negatives(few, 3).size() == 12);
  }
}

TEST_CASE("split_corpus: ratios, determinism, partition") {
  Corpus corpus;
  for (int i = 0; i < 10; ++i) corpus.docs.push_back(simple_doc("doc" + std::to_string(i), 1));

  const auto splits = split_corpus(corpus, {0.6, 0.2, 0.2}, 11);
  CHECK(splits[0].docs.size() == 6);
  CHECK(splits[1].docs.size() == 2);
  CHECK(splits[2].docs.size() == 2);

  // Disjoint union equals the input.
  std::set<std::string> seen;
  for (const Corpus& part : splits) {
    for (const Document& d : part.docs) CHECK(seen.insert(d.id).second);
  }
  CHECK(seen.size() == 10);

  const auto again = split_corpus(corpus, {0.6, 0.2, 0.2}, 11);
  for (int p = 0; p < 3; ++p) {
    REQUIRE(again[p].docs.size() == splits[p].docs.size());
    for (std::size_t i = 0; i < again[p].docs.size(); ++i) {
      CHECK(again[p].docs[i].id == splits[p].docs[i].id);
    }
  }

  SUBCASE("single document, train-only ratios") {
    Corpus one;
    one.docs.push_back(simple_doc("only", 1));
    const auto r = split_corpus(one, {1.0, 0.0, 0.0}, 1);
    CHECK(r[0].docs.size() == 1);
    CHECK(r[1].docs.empty());
    CHECK(r[2].docs.empty());
  }

  SUBCASE("fewer documents than nonzero splits") {
    Corpus one;
    one.docs.push_back(simple_doc("only", 1));
    CHECK_THROWS_AS(static_cast<void>(split_corpus(one, {0.6, 0.2, 0.2}, 1)), DataError);
  }

  SUBCASE("ratios must sum to one") {
    CHECK_THROWS_AS(static_cast<void>(split_corpus(corpus, {0.5, 0.2, 0.2}, 1)), DataError);
  }
}

TEST_CASE("validate_document rejects broken invariants") {
  Document doc = test::make_cross_sentence_doc();
  SUBCASE("valid") { CHECK_NOTHROW(validate_document(doc)); }
  SUBCASE("dangling relation") {
    doc.gold_relations.push_back({"M1", "MX", "Per-Org"});
    CHECK_THROWS_AS(validate_document(doc), DataError);
  }
  SUBCASE("span out of bounds") {
    doc.mentions[0].last = 99;
    CHECK_THROWS_AS(validate_document(doc), DataError);
  }
  SUBCASE("self relation") {
    doc.gold_relations.push_back({"M1", "M1", "Per-Org"});
    CHECK_THROWS_AS(validate_document(doc), DataError);
  }
}
