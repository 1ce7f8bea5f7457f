// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qseval/irmetrics.hpp"
#include "testutil.hpp"

using namespace qseval;

namespace {

std::vector<SearchResult> ranked(std::initializer_list<std::string> ids) {
    std::vector<SearchResult> out;
    double score = 1.0;
    for (const auto& id : ids) {
        out.push_back({id, score});
        score *= 0.5;
    }
    return out;
}

}  // namespace

TEST_CASE("dcg weights rank one and rank two equally", "[irmetrics]") {
    CHECK(dcg_at_k({2.0, 1.0, 0.0}, 3) == 3.0);
    CHECK(dcg_at_k({2.0, 1.0, 0.0}, 1) == 2.0);
    CHECK(dcg_at_k({0.0, 2.0}, 2) == 2.0);
    CHECK(dcg_at_k({1.0, 1.0, 1.0, 1.0}, 4) ==
          Catch::Approx(1.0 + 1.0 + 1.0 / std::log2(3.0) + 1.0 / std::log2(4.0)));
    CHECK(dcg_at_k({}, 5) == 0.0);
    CHECK_THROWS_AS(dcg_at_k({1.0}, 0), ValidationError);
}

TEST_CASE("dcg is nondecreasing in k", "[irmetrics]") {
    std::vector<double> gains{0.0, 2.0, 1.0, 0.5, 2.0, 0.0, 1.5};
    double prev = 0.0;
    for (std::size_t k = 1; k <= gains.size() + 2; ++k) {
        double cur = dcg_at_k(gains, k);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("ndcg is one when the ranking matches the ideal ordering",
          "[irmetrics]") {
    Query q = testutil::make_query("q1", "x");
    JudgmentSet r;
    r.add("q1", "d1", "a", 2);
    r.add("q1", "d2", "a", 1);
    r.add("q1", "d3", "a", 0);
    CHECK(ndcg_at_k(q, ranked({"d1", "d2", "d3"}), r, 3) == 1.0);
    CHECK(ndcg_at_k(q, ranked({"d3", "d2", "d1"}), r, 3) < 1.0);
}

TEST_CASE("swapping ranks one and two does not change ndcg", "[irmetrics]") {
    Query q = testutil::make_query("q1", "x");
    JudgmentSet r;
    r.add("q1", "d1", "a", 2);
    r.add("q1", "d2", "a", 0);
    // both orders score 1.0 because the first two ranks share weight 1
    CHECK(ndcg_at_k(q, ranked({"d2", "d1"}), r, 2) == 1.0);
    CHECK(ndcg_at_k(q, ranked({"d1", "d2"}), r, 2) == 1.0);
}

TEST_CASE("ndcg is zero without judged documents", "[irmetrics]") {
    Query q = testutil::make_query("q1", "x");
    JudgmentSet r;
    CHECK(ndcg_at_k(q, ranked({"d1"}), r, 5) == 0.0);
    r.add("q2", "d1", "a", 2);
    CHECK(ndcg_at_k(q, ranked({"d1"}), r, 5) == 0.0);
}

TEST_CASE("average precision follows the documented example", "[irmetrics]") {
    Query q = testutil::make_query("q1", "x");
    JudgmentSet r;
    r.add("q1", "d1", "a", 2);
    r.add("q1", "d3", "a", 1);
    r.add("q1", "d2", "a", 0);
    // relevant documents at ranks 1 and 3 out of two relevant in total
    double ap = map_at_k(q, ranked({"d1", "d2", "d3", "d4", "d5"}), r, 5);
    CHECK(ap == Catch::Approx(5.0 / 6.0));
    // cutoff above the last relevant hit
    CHECK(map_at_k(q, ranked({"d1", "d2", "d3"}), r, 2) == Catch::Approx(0.5));
    CHECK(map_at_k(q, ranked({"d2"}), r, 5) == 0.0);
}

TEST_CASE("map denominator saturates at k", "[irmetrics]") {
    Query q = testutil::make_query("q1", "x");
    JudgmentSet r;
    for (int i = 0; i < 6; ++i) r.add("q1", "d" + std::to_string(i), "a", 2);
    // perfect run: every rank up to k is relevant, so AP@k is exactly one
    CHECK(map_at_k(q, ranked({"d0", "d1", "d2"}), r, 3) == 1.0);
}

TEST_CASE("reciprocal rank finds the first highly rated document",
          "[irmetrics]") {
    Query q = testutil::make_query("q1", "x");
    JudgmentSet r;
    r.add("q1", "d2", "a", 2);
    r.add("q1", "d1", "a", 1);  // relevant but below the mrr threshold
    CHECK(mrr_at_k(q, ranked({"d1", "d2", "d3"}), r, 10) == 0.5);
    CHECK(mrr_at_k(q, ranked({"d3", "d4"}), r, 10) == 0.0);
    CHECK(mrr_at_k(q, ranked({"d1", "d2"}), r, 1) == 0.0);
    // lowering the threshold promotes d1
    CHECK(mrr_at_k(q, ranked({"d1", "d2"}), r, 10, 1.0) == 1.0);
}

TEST_CASE("fractional average ratings gate relevance exactly", "[irmetrics]") {
    Query q = testutil::make_query("q1", "x");
    JudgmentSet r;
    r.add("q1", "d1", "a", 2);
    r.add("q1", "d1", "b", 1);  // average 1.5
    CHECK(mrr_at_k(q, ranked({"d1"}), r, 5) == 0.0);
    CHECK(mrr_at_k(q, ranked({"d1"}), r, 5, 1.5) == 1.0);
    CHECK(map_at_k(q, ranked({"d1"}), r, 5, 1.5) == 1.0);
}

TEST_CASE("metric specs validate and name themselves", "[irmetrics]") {
    MetricSpec spec{MetricKind::nDCG, 10};
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.name() == "nDCG@10");
    CHECK(MetricSpec{MetricKind::MAP, 5}.name() == "MAP@5");
    CHECK(MetricSpec{MetricKind::MRR, 10}.name() == "MRR@10");
    CHECK_THROWS_AS((MetricSpec{MetricKind::nDCG, 0}).validate(), ValidationError);
    MetricSpec bad{MetricKind::MAP, 5};
    bad.map_threshold = 2.5;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("evaluate_metric dispatches on the spec", "[irmetrics]") {
    Query q = testutil::make_query("q1", "x");
    JudgmentSet r;
    r.add("q1", "d1", "a", 2);
    auto list = ranked({"d1", "d2"});
    CHECK(evaluate_metric(MetricSpec{MetricKind::nDCG, 5}, q, list, r) == 1.0);
    CHECK(evaluate_metric(MetricSpec{MetricKind::MAP, 5}, q, list, r) == 1.0);
    CHECK(evaluate_metric(MetricSpec{MetricKind::MRR, 5}, q, list, r) == 1.0);
    MetricSpec raw{MetricKind::nDCG, 5};
    raw.normalize_dcg = false;
    CHECK(evaluate_metric(raw, q, list, r) == 2.0);
}

TEST_CASE("library metrics agree with independent reimplementations",
          "[irmetrics]") {
    std::mt19937 rng(31337);
    DocumentPool pool = testutil::random_pool(rng, 80);
    QuerySet queries = testutil::random_queries(rng, 40);
    JudgmentSet judgments = testutil::synthetic_judgments(rng, queries, pool, 10);
    Index index(pool);
    for (const Query& q : queries) {
        auto list = index.search(parse_version(q.raw_text, q.qid), 10);
        std::vector<double> gains;
        std::vector<bool> rel_map, rel_mrr;
        for (const auto& res : list) {
            Rating rating = judgments.rating(q.qid, res.doc_id);
            gains.push_back(rating.value());
            rel_map.push_back(rating.at_least(1.0));
            rel_mrr.push_back(rating.at_least(2.0));
        }
        CHECK(dcg_at_k(q, list, judgments, 10) ==
              Catch::Approx(testutil::oracle_dcg(gains, 10)).margin(1e-12));
        CHECK(map_at_k(q, list, judgments, 10) ==
              Catch::Approx(testutil::oracle_ap(rel_map, judgments.relevant_count(q.qid, 1.0), 10))
                  .margin(1e-12));
        std::size_t first = 0;
        for (std::size_t j = 0; j < rel_mrr.size(); ++j)
            if (rel_mrr[j]) {
                first = j + 1;
                break;
            }
        double expect_rr = first ? 1.0 / static_cast<double>(first) : 0.0;
        CHECK(mrr_at_k(q, list, judgments, 10) == expect_rr);
    }
}
