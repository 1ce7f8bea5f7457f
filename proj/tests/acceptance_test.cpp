// SPDX-License-Identifier: Apache-2.0

// Acceptance gate for the toolkit: ten pinned checks, one PASS/FAIL line
// each, nonzero exit when anything fails. Checks 4 and 5 re-implement the
// scoring formulas locally so library regressions cannot hide behind
// self-agreement.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qseval/harness.hpp"
#include "testutil.hpp"

using namespace qseval;

namespace {

Segmentation seg_of(const std::string& qid, std::set<std::size_t> bounds,
                    const std::string& strategy = "s") {
    return Segmentation{qid, strategy, std::move(bounds)};
}

StrategySegmentations one_strategy(const std::string& id, const Segmentation& seg) {
    StrategySegmentations s{id, {}};
    s.by_qid[seg.qid] = seg;
    return s;
}

// independent metric implementations, mirroring the documented formulas
double ind_dcg(const std::vector<double>& gains, std::size_t k) {
    double total = 0.0;
    for (std::size_t rank = 1; rank <= gains.size() && rank <= k; ++rank) {
        double weight = rank == 1 ? 1.0 : 1.0 / std::log2(static_cast<double>(rank));
        total += gains[rank - 1] * weight;
    }
    return total;
}

double ind_ndcg(const Query& q, const std::vector<SearchResult>& list,
                const JudgmentSet& judgments, std::size_t k) {
    std::vector<double> gains;
    for (std::size_t i = 0; i < list.size() && i < k; ++i)
        gains.push_back(judgments.rating(q.qid, list[i].doc_id).value());
    std::vector<double> ideal;
    for (const auto& [doc_id, per_annotator] : judgments.judged_for(q.qid)) {
        (void)doc_id;
        int sum = 0;
        for (const auto& [annotator, rating] : per_annotator) {
            (void)annotator;
            sum += rating;
        }
        ideal.push_back(static_cast<double>(sum) / static_cast<double>(per_annotator.size()));
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<double>());
    double denom = ind_dcg(ideal, k);
    if (denom <= 0.0) return 0.0;
    return ind_dcg(gains, k) / denom;
}

double ind_ap(const Query& q, const std::vector<SearchResult>& list,
              const JudgmentSet& judgments, std::size_t k) {
    std::size_t total_relevant = 0;
    for (const auto& [doc_id, per_annotator] : judgments.judged_for(q.qid)) {
        (void)doc_id;
        int sum = 0, count = 0;
        for (const auto& [annotator, rating] : per_annotator) {
            (void)annotator;
            sum += rating;
            ++count;
        }
        if (count && static_cast<double>(sum) >= 1.0 * count) ++total_relevant;
    }
    std::size_t denom = std::min(total_relevant, k);
    if (denom == 0) return 0.0;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t rank = 1; rank <= list.size() && rank <= k; ++rank) {
        if (!judgments.rating(q.qid, list[rank - 1].doc_id).at_least(1.0)) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(rank);
    }
    return sum / static_cast<double>(denom);
}

// shared fixture for the dominance and equivalence checks
struct Fixture {
    DocumentPool pool;
    QuerySet queries;
    JudgmentSet judgments;
    std::vector<StrategySegmentations> strategies;

    explicit Fixture(unsigned seed) {
        std::mt19937 rng(seed);
        pool = testutil::random_pool(rng, 300);
        queries = testutil::random_queries(rng, 50, 2, 6);
        judgments = testutil::synthetic_judgments(rng, queries, pool, 12);
        for (const char* id : {"s1", "s2"}) {
            StrategySegmentations s{id, {}};
            for (const Query& q : queries)
                s.by_qid[q.qid] =
                    testutil::random_segmentation(rng, q.qid, id, q.tokens.size());
            strategies.push_back(std::move(s));
        }
    }
};

bool criterion_1(std::string& note) {
    Query q = testutil::make_query("q1", "the looney toons show cartoon network");
    QuerySet queries;
    queries.add(q);
    StrategySegmentations ref = one_strategy("ref", seg_of("q1", {4}, "ref"));
    MatchScores m1 = match_scores(one_strategy("s1", seg_of("q1", {2, 4, 5})), ref, queries);
    MatchScores m2 = match_scores(one_strategy("s2", seg_of("q1", {1, 2, 5})), ref, queries);
    bool zeros = m1.qry_acc == 0.0 && m1.seg_prec == 0.0 && m1.seg_rec == 0.0 &&
                 m1.seg_f == 0.0 && m2.qry_acc == 0.0 && m2.seg_prec == 0.0 &&
                 m2.seg_rec == 0.0 && m2.seg_f == 0.0;
    if (m1.seg_acc != 3.0 / 5.0 || m2.seg_acc != 1.0 / 5.0 || !zeros) {
        note = "seg_acc " + std::to_string(m1.seg_acc) + " / " + std::to_string(m2.seg_acc);
        return false;
    }
    return true;
}

bool criterion_2(std::string& note) {
    Query three = testutil::make_query("q1", "we are the people song lyrics");
    if (generate_versions(seg_of("q1", {2, 4}), three).size() != 8) {
        note = "three-segment query did not yield 8 versions";
        return false;
    }
    Query mixed = testutil::make_query("q2", "harry potter game");
    if (generate_versions(seg_of("q2", {2}), mixed).size() != 2) {
        note = "mixed query did not dedup to 2 versions";
        return false;
    }
    std::mt19937 rng(11);
    for (int round = 0; round < 1000; ++round) {
        auto queries = testutil::random_queries(rng, 1, 1, 8);
        const Query& q = queries.queries()[0];
        Segmentation seg = testutil::random_segmentation(rng, q.qid, "s", q.tokens.size());
        std::size_t multiword = multiword_segment_count(seg, q.tokens.size());
        std::size_t expect = std::size_t{1} << multiword;
        if (generate_versions(seg, q).size() != expect) {
            note = "count != 2^multiword on round " + std::to_string(round);
            return false;
        }
    }
    return true;
}

bool criterion_3(std::string& note) {
    Fixture fx(99);
    Index index(fx.pool);
    MetricSpec metric = parse_metric("ndcg@10");
    for (const Query& q : fx.queries) {
        OracleResult bqv = bqv_brute_force(q, index, fx.judgments, metric);
        if (bqv.min_score > bqv.best_score) {
            note = "bqv min above best for " + q.qid;
            return false;
        }
        for (const auto& strategy : fx.strategies) {
            OracleResult oracle =
                oracle_score(q, strategy.by_qid.at(q.qid), index, fx.judgments, metric);
            double unquoted = oracle.per_version_scores.front().second;
            if (!(bqv.best_score >= oracle.best_score && oracle.best_score >= unquoted &&
                  unquoted >= 0.0)) {
                note = "dominance chain broken for " + q.qid + "/" + strategy.strategy_id;
                return false;
            }
            for (const auto& [version, score] : oracle.per_version_scores) {
                (void)version;
                if (oracle.best_score < score || oracle.min_score > score) {
                    note = "best/min bounds broken for " + q.qid;
                    return false;
                }
            }
        }
    }
    return true;
}

bool criterion_4(std::string& note) {
    Fixture fx(99);
    Index index(fx.pool);
    for (const char* name : {"ndcg@5", "map@5"}) {
        MetricSpec metric = parse_metric(name);
        for (const Query& q : fx.queries) {
            for (const auto& strategy : fx.strategies) {
                const Segmentation& seg = strategy.by_qid.at(q.qid);
                double best = -1.0;
                for (const auto& version : generate_versions(seg, q)) {
                    auto list = index.search(version, metric.k);
                    double score = metric.kind == MetricKind::nDCG
                                       ? ind_ndcg(q, list, fx.judgments, metric.k)
                                       : ind_ap(q, list, fx.judgments, metric.k);
                    best = std::max(best, score);
                }
                OracleResult oracle = oracle_score(q, seg, index, fx.judgments, metric);
                if (oracle.best_score != best) {
                    note = std::string(name) + " mismatch on " + q.qid + ": oracle " +
                           std::to_string(oracle.best_score) + " vs " + std::to_string(best);
                    return false;
                }
            }
        }
    }
    return true;
}

bool criterion_5(std::string& note) {
    if (dcg_at_k({2.0, 1.0, 0.0}, 3) != 3.0) {
        note = "dcg([2,1,0]) != 3.0";
        return false;
    }
    Query q = testutil::make_query("q1", "alpha");
    JudgmentSet js;
    js.add("q1", "d1", "a", 2);
    js.add("q1", "d2", "a", 1);
    js.add("q1", "d3", "a", 0);
    std::vector<SearchResult> ideal{{"d1", 3.0}, {"d2", 2.0}, {"d3", 1.0}};
    if (ndcg_at_k(q, ideal, js, 10) != 1.0) {
        note = "ndcg on the ideal order != 1.0";
        return false;
    }
    JudgmentSet ap_js;
    ap_js.add("q1", "d1", "a", 2);
    ap_js.add("q1", "d3", "a", 2);
    std::vector<SearchResult> ap_list{{"d1", 3.0}, {"dx", 2.0}, {"d3", 1.0}};
    if (std::abs(map_at_k(q, ap_list, ap_js, 10) - 5.0 / 6.0) > 1e-12) {
        note = "ap example not 5/6";
        return false;
    }
    JudgmentSet rr_js;
    rr_js.add("q1", "d2", "a", 2);
    std::vector<SearchResult> rr_list{{"d1", 3.0}, {"d2", 2.0}};
    if (mrr_at_k(q, rr_list, rr_js, 10) != 0.5) {
        note = "reciprocal rank at position 2 != 0.5";
        return false;
    }
    std::vector<double> up{1.0, 2.0, 3.0};
    if (kendall_tau(up, {1.0, 2.0, 3.0}) != 1.0 || kendall_tau(up, {3.0, 2.0, 1.0}) != -1.0 ||
        kendall_tau(up, {1.0, 3.0, 2.0}) != 1.0 / 3.0) {
        note = "kendall tau spot values off";
        return false;
    }
    return true;
}

bool criterion_6(std::string& note) {
    DocumentPool crafted;
    crafted.add(Document{"d1", "u1", "x a b y"});
    crafted.add(Document{"d2", "u2", "b a"});
    crafted.add(Document{"d3", "u3", "a x b"});
    Index small(crafted);
    auto phrase_hits = small.search(parse_version("\"a b\""));
    if (phrase_hits.size() != 1 || phrase_hits[0].doc_id != "d1") {
        note = "phrase \"a b\" must match only 'x a b y'";
        return false;
    }
    if (small.search(parse_version("a b")).size() != 3) {
        note = "unquoted terms must reach all three docs";
        return false;
    }

    std::mt19937 rng(23);
    DocumentPool pool = testutil::random_pool(rng, 120);
    Index index(pool);
    std::size_t samples = 0;
    for (int round = 0; round < 3000 && samples < 1000; ++round) {
        auto queries = testutil::random_queries(rng, 1, 2, 6);
        const Query& q = queries.queries()[0];
        Segmentation seg = testutil::random_segmentation(rng, q.qid, "s", q.tokens.size());
        auto versions = generate_versions(seg, q).versions;
        const QuotedVersion& version =
            versions[std::uniform_int_distribution<std::size_t>(0, versions.size() - 1)(rng)];
        std::set<std::string> unquoted;
        for (const auto& r : index.search(versions.front())) unquoted.insert(r.doc_id);
        for (const auto& r : index.search(version)) {
            ++samples;
            if (!unquoted.count(r.doc_id)) {
                note = "doc " + r.doc_id + " matched quoted but not unquoted";
                return false;
            }
        }
    }
    if (samples < 1000) {
        note = "only " + std::to_string(samples) + " samples collected";
        return false;
    }
    return true;
}

bool criterion_7(std::string& note) {
    std::mt19937 rng(31);
    const std::vector<std::string> letters{"a", "b", "c", "d", "e", "f", "g", "h"};
    const double score_choices[] = {0.5, 1.0, 2.0};
    for (int round = 0; round < 10000; ++round) {
        std::size_t m = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        std::vector<std::string> tokens;
        for (std::size_t i = 0; i < m; ++i) tokens.push_back(letters[rng() % letters.size()]);

        WikiScoreTable table;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                double keep = j == i ? 0.25 : 0.6;
                if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= keep) continue;
                std::vector<std::string> key(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                             tokens.begin() + static_cast<std::ptrdiff_t>(j + 1));
                table.scores[key] = score_choices[rng() % 3];
            }
        }

        // exhaustive argmax: product, then fewer groups, then longest
        // groups from the left
        bool found = false;
        double best_product = 0.0;
        std::size_t best_groups = 0;
        std::vector<std::size_t> best_ends;
        std::set<std::size_t> best_bounds;
        for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
            std::set<std::size_t> bounds;
            for (std::size_t p = 1; p < m; ++p)
                if (mask & (1u << (p - 1))) bounds.insert(p);
            std::vector<std::pair<std::size_t, std::size_t>> groups;
            std::size_t start = 0;
            for (std::size_t p : bounds) {
                groups.emplace_back(start, p);
                start = p;
            }
            groups.emplace_back(start, m);
            bool valid = true;
            std::vector<double> scores;
            for (const auto& [lo, hi] : groups) {
                std::vector<std::string> key(tokens.begin() + static_cast<std::ptrdiff_t>(lo),
                                             tokens.begin() + static_cast<std::ptrdiff_t>(hi));
                auto it = table.scores.find(key);
                if (it != table.scores.end())
                    scores.push_back(it->second);
                else if (hi - lo == 1)
                    scores.push_back(1.0);
                else {
                    valid = false;
                    break;
                }
            }
            if (!valid) continue;
            double product = 1.0;
            for (std::size_t i = scores.size(); i-- > 0;) product = scores[i] * product;
            std::vector<std::size_t> ends;
            for (const auto& [lo, hi] : groups) {
                (void)lo;
                ends.push_back(hi);
            }
            bool better = !found;
            if (found && product != best_product)
                better = product > best_product;
            else if (found && groups.size() != best_groups)
                better = groups.size() < best_groups;
            else if (found)
                better = ends > best_ends;  // longer groups first means later ends
            if (better) {
                found = true;
                best_product = product;
                best_groups = groups.size();
                best_ends = ends;
                best_bounds = bounds;
            }
        }

        std::set<std::size_t> all_bounds;
        for (std::size_t p = 1; p < m; ++p) all_bounds.insert(p);
        Segmentation refined =
            seg_phase2(Segmentation{"q", "s", all_bounds}, tokens, table);
        if (refined.boundaries != best_bounds) {
            note = "dp/exhaustive mismatch on round " + std::to_string(round);
            return false;
        }
    }
    return true;
}

bool criterion_8(std::string& note) {
    std::mt19937 rng(47);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
    for (int round = 0; round < 1000; ++round) {
        std::vector<std::vector<std::string>> corpus;
        std::size_t streams = std::uniform_int_distribution<std::size_t>(3, 8)(rng);
        for (std::size_t s = 0; s < streams; ++s) {
            std::vector<std::string> stream;
            std::size_t len = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
            for (std::size_t i = 0; i < len; ++i) stream.push_back(vocab[rng() % vocab.size()]);
            corpus.push_back(std::move(stream));
        }
        PmiModel model = train_pmi(corpus);
        std::vector<std::string> probe;
        std::size_t len = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
        for (std::size_t i = 0; i < len; ++i) probe.push_back(vocab[rng() % vocab.size()]);
        std::uniform_real_distribution<double> spread(-5.0, 10.0);
        double t1 = spread(rng), t2 = spread(rng);
        if (t1 > t2) std::swap(t1, t2);
        PmiModel lo = model, hi = model;
        lo.threshold = t1;
        hi.threshold = t2;
        auto b1 = pmi_boundaries(lo, probe);
        auto b2 = pmi_boundaries(hi, probe);
        if (!std::includes(b2.begin(), b2.end(), b1.begin(), b1.end())) {
            note = "boundaries shrank as the threshold grew, round " + std::to_string(round);
            return false;
        }
    }

    // planted threshold: joining exactly the rarest-but-tightest pair
    PmiModel model = train_pmi({{"a", "b"}, {"a", "b"}, {"c", "d"},
                                {"x", "y"}, {"x", "y"}, {"x", "y"}, {"x", "y"}});
    QuerySet dev;
    dev.add(testutil::make_query("q1", "a b"));
    dev.add(testutil::make_query("q2", "c d"));
    dev.add(testutil::make_query("q3", "x y"));
    StrategySegmentations ref{"ref", {}};
    ref.by_qid["q1"] = seg_of("q1", {1}, "ref");
    ref.by_qid["q2"] = seg_of("q2", {}, "ref");
    ref.by_qid["q3"] = seg_of("q3", {1}, "ref");
    double tuned = tune_pmi_threshold(model, dev, ref);
    if (tuned != model.pmi("c", "d")) {
        note = "tuned threshold is not the planted pmi value";
        return false;
    }
    PmiModel at = model;
    at.threshold = tuned;
    StrategySegmentations out{"pmi", {}};
    for (const Query& q : dev)
        out.by_qid[q.qid] = Segmentation{q.qid, "pmi", pmi_boundaries(at, q.tokens)};
    MatchScores scores = match_scores(out, ref, dev);
    if (scores.seg_f != 1.0 || scores.qry_acc != 1.0) {
        note = "optimum threshold does not reach seg-f 1.0";
        return false;
    }
    return true;
}

bool criterion_9(std::string& note) {
    JudgmentSet js;
    const int pairs[4][2] = {{0, 2}, {1, 2}, {2, 2}, {0, 0}};
    for (int i = 0; i < 4; ++i) {
        js.add("q1", "d" + std::to_string(i), "a", pairs[i][0]);
        js.add("q1", "d" + std::to_string(i), "b", pairs[i][1]);
    }
    auto rows = iaa_judgments(js);
    if (rows.size() != 1 || rows[0].co_judged != 4 || rows[0].disagreements != 1 ||
        rows[0].agreement != 0.75) {
        note = "canonical fixture did not score 0.75";
        return false;
    }

    std::mt19937 rng(61);
    JudgmentSet close;
    for (int i = 0; i < 1000; ++i) {
        int r = static_cast<int>(rng() % 3);
        int other = r == 0 ? 1 : (r == 2 ? 1 : (rng() % 2 ? 0 : 2));
        close.add("q1", "d" + std::to_string(i), "a", r);
        close.add("q1", "d" + std::to_string(i), "b", other);
    }
    auto close_rows = iaa_judgments(close);
    if (close_rows.size() != 1 || close_rows[0].disagreements != 0 ||
        close_rows[0].agreement != 1.0) {
        note = "one-grade gaps were counted as disagreements";
        return false;
    }
    return true;
}

bool criterion_10(std::string& note) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / ("qseval-accept-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::vector<std::string> vocab = testutil::small_vocab();
    for (int i = 0; vocab.size() < 40; ++i) vocab.push_back("term" + std::to_string(i));

    std::mt19937 rng(2024);
    auto pick = [&]() {  // mildly skewed so terms share documents
        std::size_t a = rng() % vocab.size(), b = rng() % vocab.size();
        return vocab[std::min(a, b)];
    };

    std::ostringstream corpus;
    for (int i = 0; i < 14000; ++i) {
        std::string body = pick();
        int len = 15 + i % 30;
        for (int t = 1; t < len; ++t) body += " " + pick();
        corpus << R"({"doc_id":"d)" << i << R"(","url":"http://e/)" << i
               << R"(","title":"","body":")" << body << "\"}\n";
    }
    std::ofstream(dir / "corpus.jsonl") << corpus.str();

    std::ostringstream queries, segs, judgments;
    for (int i = 0; i < 500; ++i) {
        std::string qid = "q" + std::to_string(i);
        std::size_t len = i % 3 == 0 ? 8 : 6;  // 16 or 8 versions per query
        std::vector<std::string> tokens;
        for (std::size_t t = 0; t < len; ++t) tokens.push_back(pick());
        std::string text = tokens[0], rendered = tokens[0];
        for (std::size_t t = 1; t < len; ++t) {
            text += " " + tokens[t];
            rendered += (t % 2 == 0 ? " | " : " ") + tokens[t];
        }
        queries << qid << "\t" << text << "\n";
        segs << qid << "\tsyn\t" << rendered << "\n";
        std::set<int> judged;
        while (judged.size() < 12) judged.insert(static_cast<int>(rng() % 14000));
        for (int doc : judged)
            judgments << qid << "\td" << doc << "\tann0\t" << rng() % 3 << "\n";
    }
    std::ofstream(dir / "queries.tsv") << queries.str();
    std::ofstream(dir / "segs.tsv") << segs.str();
    std::ofstream(dir / "judgments.tsv") << judgments.str();

    auto run = [&](const std::string& out) {
        std::string cmd = std::string(QSEVAL_CLI_PATH) + " evaluate --queries " +
                          (dir / "queries.tsv").string() + " --segmentations " +
                          (dir / "segs.tsv").string() + " --corpus " +
                          (dir / "corpus.jsonl").string() + " --judgments " +
                          (dir / "judgments.tsv").string() + " --output " +
                          (dir / out).string() + " > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    };
    bool ok = run("out1") && run("out2");
    if (!ok) {
        note = "cli run failed";
        fs::remove_all(dir);
        return false;
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    for (const char* name : {"qvrs.txt", "qvrs.tsv", "per_query.jsonl", "significance.txt",
                             "significance.tsv", "multiword.txt", "multiword.tsv"}) {
        std::string a = slurp(dir / "out1" / name), b = slurp(dir / "out2" / name);
        if (a.empty() || a != b) {
            note = std::string(name) + " differs between runs";
            fs::remove_all(dir);
            return false;
        }
    }
    fs::remove_all(dir);
    return true;
}

struct Criterion {
    int id;
    const char* what;
    std::function<bool(std::string&)> fn;
    double budget_s;  // 0 = untimed
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "matching metrics on the worked example are exact rationals", criterion_1, 1.0},
        {2, "canonical version counts equal 2^(multiword segments)", criterion_2, 5.0},
        {3, "brute force >= oracle >= unquoted >= 0 and min <= every version", criterion_3,
         30.0},
        {4, "oracle scores equal an independent exhaustive re-evaluation", criterion_4, 0.0},
        {5, "metric spot values: dcg 3, ndcg 1, ap 5/6, rr 1/2, tau 1 -1 1/3", criterion_5,
         0.0},
        {6, "phrase matching is ordered-contiguous and quoting never adds docs", criterion_6,
         0.0},
        {7, "grouping dp equals the exhaustive argmax under the tie rules", criterion_7, 60.0},
        {8, "pmi boundaries are threshold-monotone and tuning recovers the plant", criterion_8,
         0.0},
        {9, "judgment agreement fixture is 0.75 and one-grade gaps never count", criterion_9,
         0.0},
        {10, "end-to-end evaluation is byte-identical across two runs", criterion_10, 300.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        auto start = std::chrono::steady_clock::now();
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && c.budget_s > 0.0 && elapsed > c.budget_s) {
            ok = false;
            detail = "over the " + std::to_string(c.budget_s) + " s budget";
        }
        char line[256];
        std::snprintf(line, sizeof(line), "%s criterion %d: %s (%.2f s)",
                      ok ? "PASS" : "FAIL", c.id, c.what, elapsed);
        std::cout << line;
        if (!ok && !detail.empty()) std::cout << " -- " << detail;
        std::cout << "\n";
        if (!ok) ++failures;
    }
    return failures;
}
