// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "qseval/engine.hpp"
#include "testutil.hpp"

using namespace qseval;

namespace {

DocumentPool tiny_pool() {
    DocumentPool pool;
    pool.add(Document{"d1", "http://a", "a b c"});
    pool.add(Document{"d2", "http://b", "c"});
    pool.add(Document{"d3", "http://c", "b a c"});
    return pool;
}

}  // namespace

TEST_CASE("index exposes corpus statistics", "[engine]") {
    DocumentPool pool = tiny_pool();
    Index index(pool);
    CHECK(index.doc_count() == 3);
    CHECK(index.avg_doc_len() == Catch::Approx(7.0 / 3.0));
    CHECK(index.term_df("c") == 3);
    CHECK(index.term_df("a") == 2);
    CHECK(index.term_df("zebra") == 0);
    CHECK(index.phrase_df({"a", "b"}) == 1);
    CHECK(index.phrase_df({"b", "a"}) == 1);  // only d3 has b directly before a
    CHECK(index.phrase_df({"a", "c"}) == 1);  // only d3 has a directly before c
}

TEST_CASE("quoted clauses demand ordered contiguous occurrences", "[engine]") {
    DocumentPool pool;
    pool.add(Document{"hit", "u1", "x a b y"});
    pool.add(Document{"swapped", "u2", "b a"});
    pool.add(Document{"gapped", "u3", "a x b"});
    Index index(pool);

    auto quoted = index.search(parse_version("\"a b\""), 10);
    REQUIRE(quoted.size() == 1);
    CHECK(quoted[0].doc_id == "hit");

    // unquoted terms reach all three documents
    auto loose = index.search(parse_version("a b"), 10);
    CHECK(loose.size() == 3);
}

TEST_CASE("scores combine coordination with per-clause weights", "[engine]") {
    DocumentPool pool = tiny_pool();
    Index index(pool);
    auto results = index.search(parse_version("\"a b\" c"), 10);
    REQUIRE(results.size() == 3);
    // d1 satisfies both clauses; d2 beats d3 on the shared clause because it
    // is much shorter
    CHECK(results[0].doc_id == "d1");
    CHECK(results[1].doc_id == "d2");
    CHECK(results[2].doc_id == "d3");

    // hand-computed score of d2: idf(c) * bm25(tf=1, len=1) * coordination 1/2
    double idf = std::log(1.0 + (3.0 - 3.0 + 0.5) / (3.0 + 0.5));
    double norm = 1.0 - kBm25B + kBm25B * (1.0 / (7.0 / 3.0));
    double bm25 = idf * (1.0 * (kBm25K1 + 1.0)) / (1.0 + kBm25K1 * norm);
    CHECK(results[1].score == Catch::Approx(0.5 * bm25).epsilon(1e-12));
}

TEST_CASE("score ties break on ascending document id", "[engine]") {
    DocumentPool pool;
    pool.add(Document{"d2", "u", "same words here"});
    pool.add(Document{"d1", "u", "same words here"});
    pool.add(Document{"d3", "u", "same words here"});
    Index index(pool);
    auto results = index.search(parse_version("same words"), 10);
    REQUIRE(results.size() == 3);
    CHECK(results[0].doc_id == "d1");
    CHECK(results[1].doc_id == "d2");
    CHECK(results[2].doc_id == "d3");
    CHECK(results[0].score == results[2].score);
}

TEST_CASE("k truncates the ranked list", "[engine]") {
    DocumentPool pool = tiny_pool();
    Index index(pool);
    auto results = index.search(parse_version("c"), 2);
    CHECK(results.size() == 2);
    auto all = index.search(parse_version("c"));
    CHECK(all.size() == 3);
    CHECK(all[0].doc_id == results[0].doc_id);
    CHECK(all[1].doc_id == results[1].doc_id);
}

TEST_CASE("unmatched queries return an empty list", "[engine]") {
    DocumentPool pool = tiny_pool();
    Index index(pool);
    CHECK(index.search(parse_version("zebra")).empty());
    CHECK(index.search(parse_version("\"c a\"")).empty());
}

TEST_CASE("quoting a clause never gains documents", "[engine]") {
    std::mt19937 rng(2024);
    DocumentPool pool = testutil::random_pool(rng, 120);
    Index index(pool);
    QuerySet qs = testutil::random_queries(rng, 100, 2, 4);
    for (const Query& q : qs) {
        QuotedVersion loose = parse_version(q.raw_text, q.qid);
        // one fully quoted clause over the same tokens
        QuotedVersion tight;
        tight.qid = q.qid;
        tight.clauses.push_back(Clause{q.tokens, true});
        tight.bitmask = 1;
        auto loose_hits = index.search(loose);
        auto tight_hits = index.search(tight);
        std::set<std::string> loose_ids;
        for (const auto& r : loose_hits) loose_ids.insert(r.doc_id);
        for (const auto& r : tight_hits) {
            CHECK(loose_ids.count(r.doc_id) == 1);
        }
    }
}

TEST_CASE("dump and reload give a byte-identical index", "[engine]") {
    std::mt19937 rng(55);
    DocumentPool pool = testutil::random_pool(rng, 40);
    pool.add(Document{"spacey id", "u", "tokens with spaces in the id"});
    Index index(pool);

    std::ostringstream first;
    index.dump(first);
    std::istringstream in(first.str());
    Index reloaded = Index::from_dump(in);
    std::ostringstream second;
    reloaded.dump(second);
    CHECK(first.str() == second.str());

    CHECK(reloaded.doc_count() == index.doc_count());
    CHECK(reloaded.avg_doc_len() == index.avg_doc_len());
    QuotedVersion probe = parse_version("tokens \"with spaces\"");
    auto a = index.search(probe, 10);
    auto b = reloaded.search(probe, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].doc_id == b[i].doc_id);
        CHECK(a[i].score == b[i].score);
    }
}

TEST_CASE("searches are deterministic", "[engine]") {
    std::mt19937 rng(77);
    DocumentPool pool = testutil::random_pool(rng, 60);
    Index index(pool);
    QuerySet qs = testutil::random_queries(rng, 30, 2, 5);
    for (const Query& q : qs) {
        QuotedVersion v = parse_version(q.raw_text, q.qid);
        auto a = index.search(v, 20);
        auto b = index.search(v, 20);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].doc_id == b[i].doc_id);
            CHECK(a[i].score == b[i].score);
        }
    }
}
