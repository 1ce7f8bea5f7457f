// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qseval/corpus.hpp"
#include "qseval/engine.hpp"
#include "qseval/error.hpp"
#include "qseval/irmetrics.hpp"
#include "qseval/matchmetrics.hpp"
#include "qseval/oracle.hpp"
#include "qseval/quotegen.hpp"
#include "qseval/segmenters.hpp"
#include "qseval/text.hpp"

namespace qseval {

struct RunConfig {
    std::string queries_path;
    std::string segmentations_path;
    std::string corpus_path;
    std::string judgments_path;
    std::string titles_path;
    std::string ngram_corpus_path;
    std::string ngram_counts_path;
    std::string runs_path;
    std::string index_path;
    std::string dev_queries_path;
    std::string dev_segmentations_path;
    std::string output_dir = "out";
    std::vector<std::string> metric_names = {"ndcg@5", "ndcg@10", "map@5",
                                             "map@10", "mrr@5",  "mrr@10"};
    std::string reference;
    std::string strategy_id = "pmi";
    std::size_t segment_cap = kDefaultSegmentCap;
    std::size_t token_cap = kDefaultTokenCap;
    std::size_t pool_depth = 10;
    double pmi_threshold = 0.0;
    bool tune = false;
    bool use_wiki = false;
    bool include_unsegmented = true;
};

inline MetricSpec parse_metric(const std::string& name) {
    auto at = name.find('@');
    if (at == std::string::npos)
        throw ValidationError("metric must look like kind@k, got: " + name);
    std::string kind = name.substr(0, at);
    for (auto& c : kind) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    MetricSpec spec;
    if (kind == "ndcg")
        spec.kind = MetricKind::nDCG;
    else if (kind == "map")
        spec.kind = MetricKind::MAP;
    else if (kind == "mrr")
        spec.kind = MetricKind::MRR;
    else
        throw ValidationError("unknown metric kind: " + name);
    try {
        spec.k = static_cast<std::size_t>(std::stoull(name.substr(at + 1)));
    } catch (const std::exception&) {
        throw ValidationError("bad metric cutoff in: " + name);
    }
    spec.validate();
    return spec;
}

inline std::vector<MetricSpec> parse_metrics(const std::vector<std::string>& names) {
    if (names.empty()) throw ValidationError("at least one metric is required");
    std::vector<MetricSpec> out;
    for (const auto& n : names) out.push_back(parse_metric(n));
    return out;
}

namespace detail {

inline std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string metric_file_tag(const MetricSpec& spec) {
    std::string name = spec.name();
    for (auto& c : name) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (c == '@') c = '_';
    }
    return name;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write file: " + path.string());
    os << content;
}

}  // namespace detail

/// Plain aligned-column table plus a TSV twin; first column left-aligned,
/// value columns right-aligned.
class TextTable {
   public:
    explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size())
            throw ValidationError("table row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::string str() const {
        std::vector<std::size_t> width(header_.size(), 0);
        auto widen = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c)
                width[c] = std::max(width[c], row[c].size());
        };
        widen(header_);
        for (const auto& row : rows_) widen(row);
        std::string out;
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += "  ";
                std::size_t pad = width[c] - row[c].size();
                if (c == 0) {
                    out += row[c];
                    if (c + 1 < row.size()) out.append(pad, ' ');
                } else {
                    out.append(pad, ' ');
                    out += row[c];
                }
            }
            out += '\n';
        };
        emit(header_);
        for (const auto& row : rows_) emit(row);
        return out;
    }

    std::string tsv() const {
        std::string out = join_tokens(header_, "\t") + "\n";
        for (const auto& row : rows_) out += join_tokens(row, "\t") + "\n";
        return out;
    }

   private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Built-in engine behind the adapter interface: parses the rendered
/// version and searches the local index, serving documents out of the
/// source pool.
class IndexEngineAdapter final : public EngineAdapter {
   public:
    IndexEngineAdapter(const Index& index, const DocumentPool& pool) : index_(index), pool_(pool) {}

    std::vector<SearchResult> search(const std::string& rendered_version,
                                     std::size_t k) const override {
        return index_.search(parse_version(rendered_version), k);
    }

    std::vector<Document> top_documents(const std::string& rendered_version,
                                        std::size_t depth) const override {
        std::vector<Document> out;
        for (const auto& result : search(rendered_version, depth))
            out.push_back(pool_.at(result.doc_id));
        return out;
    }

   private:
    const Index& index_;
    const DocumentPool& pool_;
};

/// Replays an external engine's results from a TSV runs file:
/// `rendered_version<TAB>doc_id<TAB>url[<TAB>text]`, ranked by line order
/// within each version. Unknown versions throw, which build_pool records
/// as warnings.
class FileRunsAdapter final : public EngineAdapter {
   public:
    explicit FileRunsAdapter(const std::string& path) {
        std::size_t lineno = 0;
        for (const auto& line : detail::read_lines(path)) {
            ++lineno;
            if (line.empty()) continue;
            auto fields = detail::split_tabs(line);
            if (fields.size() < 3 || fields.size() > 4)
                throw ParseError("expected 3 or 4 tab-separated fields" +
                                 detail::at_line(path, lineno));
            Document doc{fields[1], fields[2], fields.size() == 4 ? fields[3] : ""};
            runs_[fields[0]].push_back(std::move(doc));
        }
    }

    std::vector<SearchResult> search(const std::string& rendered_version,
                                     std::size_t k) const override {
        std::vector<SearchResult> out;
        for (const auto& doc : lookup(rendered_version)) {
            if (out.size() >= k) break;
            out.push_back({doc.doc_id, 1.0 / static_cast<double>(out.size() + 1)});
        }
        return out;
    }

    std::vector<Document> top_documents(const std::string& rendered_version,
                                        std::size_t depth) const override {
        const auto& docs = lookup(rendered_version);
        return {docs.begin(),
                docs.begin() + static_cast<std::ptrdiff_t>(std::min(depth, docs.size()))};
    }

   private:
    const std::vector<Document>& lookup(const std::string& rendered_version) const {
        auto it = runs_.find(rendered_version);
        if (it == runs_.end())
            throw std::runtime_error("no run recorded for version: " + rendered_version);
        return it->second;
    }

    std::unordered_map<std::string, std::vector<Document>> runs_;
};

struct StrategyEvaluation {
    std::string strategy_id;
    std::vector<QvrsReport> by_metric;
};

/// Evaluates every strategy under every metric, searching once per
/// version at the deepest cutoff and reusing the ranked lists across
/// metrics. Equivalent to calling qvrs() per metric, only cheaper.
inline std::vector<StrategyEvaluation> evaluate_all(const QuerySet& queries,
                                                    const std::vector<StrategySegmentations>& strategies,
                                                    const Index& index,
                                                    const JudgmentSet& judgments,
                                                    const std::vector<MetricSpec>& metrics,
                                                    std::size_t segment_cap = kDefaultSegmentCap) {
    if (queries.size() == 0) throw ValidationError("no queries to evaluate");
    if (metrics.empty()) throw ValidationError("no metrics configured");
    std::size_t max_k = 1;
    for (const auto& m : metrics) max_k = std::max(max_k, m.k);

    std::vector<StrategyEvaluation> out;
    for (const auto& strategy : strategies) {
        std::string missing;
        for (const auto& q : queries)
            if (!strategy.by_qid.count(q.qid)) missing += (missing.empty() ? "" : ", ") + q.qid;
        if (!missing.empty())
            throw ValidationError("strategy '" + strategy.strategy_id +
                                  "' is missing segmentations for: " + missing);

        StrategyEvaluation eval;
        eval.strategy_id = strategy.strategy_id;
        eval.by_metric.resize(metrics.size());
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            eval.by_metric[m].strategy_id = strategy.strategy_id;
            eval.by_metric[m].metric = metrics[m];
        }
        for (const auto& q : queries) {
            auto versions = generate_versions(strategy.by_qid.at(q.qid), q, segment_cap);
            auto evals = evaluate_versions(versions, index, max_k);
            for (std::size_t m = 0; m < metrics.size(); ++m)
                eval.by_metric[m].per_query.emplace(
                    q.qid, oracle_from_evaluations(q, strategy.strategy_id, evals, judgments,
                                                   metrics[m]));
        }
        for (auto& report : eval.by_metric) {
            double sum = 0.0;
            for (const auto& [qid, result] : report.per_query) {
                (void)qid;
                sum += result.best_score;
            }
            report.qvrs = sum / static_cast<double>(report.per_query.size());
        }
        out.push_back(std::move(eval));
    }
    return out;
}

struct SignificancePair {
    std::string metric_name;
    std::string strategy_a;
    std::string strategy_b;
    TTestResult test;
};

inline std::vector<SignificancePair> significance_matrix(
    const std::vector<StrategyEvaluation>& evaluations, const std::vector<MetricSpec>& metrics) {
    std::vector<SignificancePair> out;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        for (std::size_t i = 0; i < evaluations.size(); ++i) {
            for (std::size_t j = i + 1; j < evaluations.size(); ++j) {
                std::vector<double> a, b;
                for (const auto& [qid, result] : evaluations[i].by_metric[m].per_query) {
                    a.push_back(result.best_score);
                    b.push_back(evaluations[j].by_metric[m].per_query.at(qid).best_score);
                }
                out.push_back({metrics[m].name(), evaluations[i].strategy_id,
                               evaluations[j].strategy_id, paired_t_test(a, b)});
            }
        }
    }
    return out;
}

namespace detail {

inline QuerySet load_queries_checked(const RunConfig& config) {
    if (config.queries_path.empty()) throw ValidationError("queries path is required");
    return load_queries(config.queries_path);
}

inline std::vector<StrategySegmentations> load_strategies(const RunConfig& config,
                                                          const QuerySet& queries,
                                                          bool add_unsegmented) {
    if (config.segmentations_path.empty())
        throw ValidationError("segmentations path is required");
    auto segs = load_segmentations(config.segmentations_path, queries);
    auto strategies = group_by_strategy(segs);
    if (add_unsegmented) {
        bool present = false;
        for (const auto& s : strategies) present = present || s.strategy_id == "unsegmented";
        if (!present) strategies.insert(strategies.begin(), unsegmented_strategy(queries));
    }
    return strategies;
}

inline Index load_index_from_corpus(const RunConfig& config, DocumentPool& pool_out) {
    if (config.corpus_path.empty()) throw ValidationError("corpus path is required");
    pool_out = load_corpus(config.corpus_path);
    return Index(pool_out);
}

inline JudgmentSet load_judgments_checked(const RunConfig& config) {
    if (config.judgments_path.empty()) throw ValidationError("judgments path is required");
    return load_judgments(config.judgments_path);
}

inline std::string strategies_list(const std::vector<StrategySegmentations>& strategies) {
    std::string out;
    for (const auto& s : strategies) out += (out.empty() ? "" : ", ") + s.strategy_id;
    return out;
}

}  // namespace detail

/// Builds the index artifact. Rebuilding from the same corpus writes the
/// same bytes.
inline std::string cmd_index(const RunConfig& config) {
    DocumentPool pool;
    Index index = detail::load_index_from_corpus(config, pool);
    if (config.index_path.empty()) throw ValidationError("index output path is required");
    std::ostringstream dump;
    index.dump(dump);
    std::filesystem::path path(config.index_path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write index artifact: " + config.index_path);
    os << dump.str();
    std::ostringstream summary;
    summary << "indexed " << index.doc_count() << " documents, avg length "
            << detail::fmt4(index.avg_doc_len()) << ", artifact " << config.index_path << "\n";
    return summary.str();
}

inline std::string cmd_evaluate(const RunConfig& config) {
    QuerySet queries = detail::load_queries_checked(config);
    auto strategies = detail::load_strategies(config, queries, config.include_unsegmented);
    DocumentPool pool;
    Index index = detail::load_index_from_corpus(config, pool);
    JudgmentSet judgments = detail::load_judgments_checked(config);
    auto metrics = parse_metrics(config.metric_names);

    std::size_t judged_queries = 0;
    for (const auto& q : queries)
        if (!judgments.judged_for(q.qid).empty()) ++judged_queries;

    auto evaluations = evaluate_all(queries, strategies, index, judgments, metrics,
                                    config.segment_cap);

    // strategy x metric QVRS grid
    std::vector<std::string> header{"strategy"};
    for (const auto& m : metrics) header.push_back(m.name());
    TextTable grid(header);
    for (const auto& eval : evaluations) {
        std::vector<std::string> row{eval.strategy_id};
        for (const auto& report : eval.by_metric) row.push_back(detail::fmt4(report.qvrs));
        grid.add_row(row);
    }
    std::filesystem::path out_dir(config.output_dir);
    detail::write_text_file(out_dir / "qvrs.txt", grid.str());
    detail::write_text_file(out_dir / "qvrs.tsv", grid.tsv());

    // per-query detail, one JSON record per (strategy, metric, query)
    std::string jsonl;
    for (const auto& eval : evaluations) {
        for (const auto& report : eval.by_metric) {
            for (const auto& q : queries) {
                const OracleResult& result = report.per_query.at(q.qid);
                nlohmann::ordered_json record;
                record["qid"] = q.qid;
                record["strategy"] = eval.strategy_id;
                record["metric"] = report.metric.name();
                record["best_version"] = render(result.best_version);
                record["best_score"] = result.best_score;
                record["min_score"] = result.min_score;
                nlohmann::ordered_json versions = nlohmann::ordered_json::array();
                for (const auto& [version, score] : result.per_version_scores)
                    versions.push_back({{"version", render(version)}, {"score", score}});
                record["versions"] = versions;
                jsonl += record.dump() + "\n";
            }
        }
    }
    detail::write_text_file(out_dir / "per_query.jsonl", jsonl);

    // pairwise significance per metric (needs at least two score pairs)
    TextTable sig({"metric", "strategy_a", "strategy_b", "t", "p", "significant"});
    if (queries.size() >= 2)
        for (const auto& pair : significance_matrix(evaluations, metrics))
            sig.add_row({pair.metric_name, pair.strategy_a, pair.strategy_b,
                         detail::fmt4(pair.test.t), detail::fmt4(pair.test.p),
                         pair.test.significant ? "yes" : "no"});
    detail::write_text_file(out_dir / "significance.txt", sig.str());
    detail::write_text_file(out_dir / "significance.tsv", sig.tsv());

    // multiword segment histogram per strategy
    TextTable multiword({"strategy", "multiword_segments", "fraction"});
    for (const auto& strategy : strategies) {
        std::vector<Segmentation> segs;
        for (const auto& q : queries) segs.push_back(strategy.by_qid.at(q.qid));
        for (const auto& [count, fraction] : multiword_distribution(segs, queries))
            multiword.add_row({strategy.strategy_id, std::to_string(count),
                               detail::fmt4(fraction)});
    }
    detail::write_text_file(out_dir / "multiword.txt", multiword.str());
    detail::write_text_file(out_dir / "multiword.tsv", multiword.tsv());

    // companion matching grid when a reference is configured
    std::string match_note;
    if (!config.reference.empty()) {
        const StrategySegmentations* ref = nullptr;
        for (const auto& s : strategies)
            if (s.strategy_id == config.reference) ref = &s;
        if (!ref)
            throw ValidationError("reference strategy '" + config.reference +
                                  "' not found among: " + detail::strategies_list(strategies));
        TextTable match({"strategy", "qry_acc", "seg_prec", "seg_rec", "seg_f", "seg_acc"});
        for (const auto& strategy : strategies) {
            MatchScores s = match_scores(strategy, *ref, queries);
            match.add_row({strategy.strategy_id, detail::fmt4(s.qry_acc),
                           detail::fmt4(s.seg_prec), detail::fmt4(s.seg_rec),
                           detail::fmt4(s.seg_f), detail::fmt4(s.seg_acc)});
        }
        detail::write_text_file(out_dir / "matching.txt", match.str());
        detail::write_text_file(out_dir / "matching.tsv", match.tsv());
        match_note = ", matching vs '" + config.reference + "'";
    }

    std::ostringstream summary;
    summary << "evaluated " << strategies.size() << " strategies x " << metrics.size()
            << " metrics over " << queries.size() << " queries" << match_note << "\n";
    if (judged_queries == 0)
        summary << "warning: no query has any relevance judgment; all scores are zero\n";
    summary << "reports in " << config.output_dir << "\n";
    return summary.str();
}

inline std::string cmd_bqv(const RunConfig& config) {
    QuerySet queries = detail::load_queries_checked(config);
    DocumentPool pool;
    Index index = detail::load_index_from_corpus(config, pool);
    JudgmentSet judgments = detail::load_judgments_checked(config);
    auto metrics = parse_metrics(config.metric_names);

    std::size_t skipped = 0;
    std::vector<std::string> skipped_qids;
    // per metric: per-query results in query order
    std::vector<std::vector<OracleResult>> results(metrics.size());
    std::vector<const Query*> evaluated;
    for (const auto& q : queries) {
        if (q.length() > config.token_cap) {
            ++skipped;
            skipped_qids.push_back(q.qid);
            continue;
        }
        auto versions = enumerate_all_partitions(q, config.token_cap);
        std::size_t max_k = 1;
        for (const auto& m : metrics) max_k = std::max(max_k, m.k);
        auto evals = evaluate_versions(versions, index, max_k);
        for (std::size_t m = 0; m < metrics.size(); ++m)
            results[m].push_back(
                oracle_from_evaluations(q, kBqvStrategyId, evals, judgments, metrics[m]));
        evaluated.push_back(&q);
    }
    if (evaluated.empty()) throw ValidationError("every query exceeded the token cap");

    std::filesystem::path out_dir(config.output_dir);
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> header{"metric", "qvrs"};
    TextTable grid(header);
    std::string jsonl;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
        double sum = 0.0;
        for (const auto& r : results[m]) sum += r.best_score;
        grid.add_row({metrics[m].name(),
                      detail::fmt4(sum / static_cast<double>(results[m].size()))});

        // best-version segmentations, usable as a matching reference
        std::vector<Segmentation> segs;
        for (const auto& r : results[m]) {
            Segmentation seg = boundaries_of_version(r.best_version, kBqvStrategyId);
            seg.qid = r.qid;
            segs.push_back(std::move(seg));
        }
        save_segmentations(
            segs, queries,
            (out_dir / ("bqv_" + detail::metric_file_tag(metrics[m]) + ".segments.tsv")).string());

        for (std::size_t i = 0; i < results[m].size(); ++i) {
            const OracleResult& r = results[m][i];
            nlohmann::ordered_json record;
            record["qid"] = r.qid;
            record["metric"] = metrics[m].name();
            record["best_version"] = render(r.best_version);
            record["best_score"] = r.best_score;
            record["min_score"] = r.min_score;
            record["versions"] = r.per_version_scores.size();
            jsonl += record.dump() + "\n";
        }
    }
    detail::write_text_file(out_dir / "bqv.txt", grid.str());
    detail::write_text_file(out_dir / "bqv.tsv", grid.tsv());
    detail::write_text_file(out_dir / "bqv_per_query.jsonl", jsonl);

    std::ostringstream summary;
    summary << "brute-force best versions for " << evaluated.size() << " of " << queries.size()
            << " queries (" << skipped << " skipped over the token cap)\n";
    for (const auto& qid : skipped_qids) summary << "warning: skipped " << qid << "\n";
    summary << "reports in " << config.output_dir << "\n";
    return summary.str();
}

inline std::string cmd_match(const RunConfig& config) {
    QuerySet queries = detail::load_queries_checked(config);
    auto strategies = detail::load_strategies(config, queries, config.include_unsegmented);
    if (config.reference.empty()) throw ValidationError("a reference is required");

    // the reference is either one of the loaded strategies or a
    // single-strategy segmentations file (for instance a bqv output)
    StrategySegmentations reference;
    bool found = false;
    for (const auto& s : strategies) {
        if (s.strategy_id == config.reference) {
            reference = s;
            found = true;
        }
    }
    if (!found && std::filesystem::exists(config.reference)) {
        auto ref_segs = load_segmentations(config.reference, queries);
        auto grouped = group_by_strategy(ref_segs);
        if (grouped.size() != 1)
            throw ValidationError("reference file must contain exactly one strategy: " +
                                  config.reference);
        reference = grouped[0];
        found = true;
    }
    if (!found)
        throw ValidationError("unknown reference '" + config.reference + "'; strategies are: " +
                              detail::strategies_list(strategies));

    TextTable match({"strategy", "qry_acc", "seg_prec", "seg_rec", "seg_f", "seg_acc"});
    std::map<std::string, MatchScores> match_by_strategy;
    for (const auto& strategy : strategies) {
        MatchScores s = match_scores(strategy, reference, queries);
        match_by_strategy[strategy.strategy_id] = s;
        match.add_row({strategy.strategy_id, detail::fmt4(s.qry_acc), detail::fmt4(s.seg_prec),
                       detail::fmt4(s.seg_rec), detail::fmt4(s.seg_f), detail::fmt4(s.seg_acc)});
    }
    std::filesystem::path out_dir(config.output_dir);
    detail::write_text_file(out_dir / "matching.txt", match.str());
    detail::write_text_file(out_dir / "matching.tsv", match.tsv());

    // rank correlation between the IR-based strategy ranking and each
    // matching-metric ranking, excluding the reference when it is itself
    // one of the compared strategies
    std::string kendall_note;
    DocumentPool pool;
    Index index = detail::load_index_from_corpus(config, pool);
    JudgmentSet judgments = detail::load_judgments_checked(config);
    auto metrics = parse_metrics(config.metric_names);
    auto evaluations = evaluate_all(queries, strategies, index, judgments, metrics,
                                    config.segment_cap);

    std::vector<std::string> ranked_ids;
    for (const auto& s : strategies)
        if (s.strategy_id != reference.strategy_id) ranked_ids.push_back(s.strategy_id);
    if (ranked_ids.size() >= 2) {
        auto match_value = [](const MatchScores& s, std::size_t i) {
            switch (i) {
                case 0: return s.qry_acc;
                case 1: return s.seg_prec;
                case 2: return s.seg_rec;
                case 3: return s.seg_f;
                default: return s.seg_acc;
            }
        };
        TextTable kendall({"ir_metric", "qry_acc", "seg_prec", "seg_rec", "seg_f", "seg_acc"});
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            std::map<std::string, double> ir_scores;
            for (const auto& eval : evaluations)
                if (std::find(ranked_ids.begin(), ranked_ids.end(), eval.strategy_id) !=
                    ranked_ids.end())
                    ir_scores[eval.strategy_id] = eval.by_metric[m].qvrs;
            std::vector<std::string> row{metrics[m].name()};
            for (std::size_t i = 0; i < 5; ++i) {
                std::map<std::string, double> match_ranking;
                for (const auto& id : ranked_ids)
                    match_ranking[id] = match_value(match_by_strategy.at(id), i);
                row.push_back(detail::fmt4(kendall_tau(ir_scores, match_ranking)));
            }
            kendall.add_row(row);
        }
        detail::write_text_file(out_dir / "kendall.txt", kendall.str());
        detail::write_text_file(out_dir / "kendall.tsv", kendall.tsv());
    } else {
        kendall_note = "warning: fewer than 2 non-reference strategies; kendall table skipped\n";
    }

    std::ostringstream summary;
    summary << "matched " << strategies.size() << " strategies against '"
            << reference.strategy_id << "'\n"
            << kendall_note << "reports in " << config.output_dir << "\n";
    return summary.str();
}

inline std::string cmd_iaa(const RunConfig& config) {
    if (config.segmentations_path.empty() && config.judgments_path.empty())
        throw ValidationError("agreement needs a segmentations file, a judgments file, or both");
    std::filesystem::path out_dir(config.output_dir);
    std::ostringstream summary;

    if (!config.segmentations_path.empty()) {
        QuerySet queries = detail::load_queries_checked(config);
        auto segs = load_segmentations(config.segmentations_path, queries);
        std::map<std::string, StrategySegmentations> annotators;
        for (const auto& s : group_by_strategy(segs)) annotators.emplace(s.strategy_id, s);
        auto rows = iaa_segmentation(annotators, queries);
        TextTable table({"reference", "qry_acc", "seg_prec", "seg_rec", "seg_f", "seg_acc"});
        for (const auto& row : rows)
            table.add_row({row.reference_annotator, detail::fmt4(row.mean_scores.qry_acc),
                           detail::fmt4(row.mean_scores.seg_prec),
                           detail::fmt4(row.mean_scores.seg_rec),
                           detail::fmt4(row.mean_scores.seg_f),
                           detail::fmt4(row.mean_scores.seg_acc)});
        detail::write_text_file(out_dir / "iaa_segmentation.txt", table.str());
        detail::write_text_file(out_dir / "iaa_segmentation.tsv", table.tsv());
        summary << "segmentation agreement over " << rows.size() << " annotators\n";
    }

    if (!config.judgments_path.empty()) {
        JudgmentSet judgments = load_judgments(config.judgments_path);
        auto pairs = iaa_judgments(judgments);
        TextTable table({"annotator_a", "annotator_b", "co_judged", "disagreements", "agreement"});
        for (const auto& pair : pairs)
            table.add_row({pair.annotator_a, pair.annotator_b, std::to_string(pair.co_judged),
                           std::to_string(pair.disagreements), detail::fmt4(pair.agreement)});
        detail::write_text_file(out_dir / "iaa_judgments.txt", table.str());
        detail::write_text_file(out_dir / "iaa_judgments.tsv", table.tsv());
        summary << "judgment agreement over " << pairs.size() << " annotator pairs\n";
    }

    summary << "reports in " << config.output_dir << "\n";
    return summary.str();
}

inline std::string cmd_segment(const RunConfig& config) {
    QuerySet queries = detail::load_queries_checked(config);

    // the wiki pipeline stems everything with the same rules; boundaries
    // carry back to raw tokens because stemming is token-for-token
    bool stemmed = config.use_wiki;
    auto prep = [&](const std::vector<std::string>& tokens) {
        return stemmed ? stem_all(tokens) : tokens;
    };

    PmiModel model;
    std::vector<std::vector<std::string>> corpus_streams;
    if (!config.ngram_counts_path.empty()) {
        model = load_pmi_counts(config.ngram_counts_path);
        if (config.use_wiki)
            throw ValidationError(
                "the wiki pipeline needs a raw n-gram corpus, not precomputed counts");
    } else if (!config.ngram_corpus_path.empty()) {
        for (const auto& line : detail::read_lines(config.ngram_corpus_path)) {
            auto tokens = tokenize(line);
            if (!tokens.empty()) corpus_streams.push_back(std::move(tokens));
        }
        if (corpus_streams.empty())
            throw ValidationError("empty n-gram corpus: " + config.ngram_corpus_path);
        std::vector<std::vector<std::string>> training;
        training.reserve(corpus_streams.size());
        for (const auto& s : corpus_streams) training.push_back(prep(s));
        model = train_pmi(training);
    } else {
        throw ValidationError("an n-gram corpus or counts file is required");
    }

    double threshold = config.pmi_threshold;
    std::string tuned_note;
    if (config.tune) {
        if (config.dev_segmentations_path.empty())
            throw ValidationError("tuning needs a dev segmentations file");
        QuerySet dev_queries = config.dev_queries_path.empty()
                                   ? load_queries(config.queries_path)
                                   : load_queries(config.dev_queries_path);
        auto dev_segs = load_segmentations(config.dev_segmentations_path, dev_queries);
        auto grouped = group_by_strategy(dev_segs);
        if (grouped.size() != 1)
            throw ValidationError("dev segmentations must contain exactly one strategy");
        QuerySet work_dev;
        for (const auto& q : dev_queries)
            work_dev.add(Query{q.qid, q.raw_text, prep(q.tokens)});
        threshold = tune_pmi_threshold(model, work_dev, grouped[0]);
        tuned_note = "tuned threshold " + detail::fmt4(threshold) + "\n";
    }
    model.threshold = threshold;

    WikiScoreTable table;
    if (config.use_wiki) {
        if (config.titles_path.empty()) throw ValidationError("the wiki pipeline needs titles");
        std::vector<std::vector<std::string>> titles;
        for (const auto& line : detail::read_lines(config.titles_path)) {
            auto tokens = tokenize(line);
            if (tokens.size() >= 2) titles.push_back(std::move(tokens));
        }
        SegmentedCorpus qprime;
        for (const auto& s : corpus_streams)
            qprime.push_back({s, pmi_boundaries(model, stem_all(s))});
        table = wiki_boost(qprime, titles, make_pmi_phase1(model));
    }

    std::vector<Segmentation> out_segs;
    std::size_t joined = 0;
    for (const auto& q : queries) {
        Segmentation seg{q.qid, config.strategy_id, pmi_boundaries(model, prep(q.tokens))};
        if (config.use_wiki) {
            Segmentation refined = seg_phase2(seg, q.tokens, table);
            if (refined.boundaries.size() < seg.boundaries.size()) ++joined;
            seg = std::move(refined);
        }
        out_segs.push_back(std::move(seg));
    }
    std::filesystem::path out_dir(config.output_dir);
    std::filesystem::create_directories(out_dir);
    save_segmentations(out_segs, queries, (out_dir / "segmentations.tsv").string());

    std::ostringstream summary;
    summary << tuned_note << "segmented " << queries.size() << " queries with threshold "
            << detail::fmt4(threshold);
    if (config.use_wiki)
        summary << "; wiki table " << table.scores.size() << " entries, joins on " << joined
                << " queries (skipped " << table.skipped_titles << ", dropped "
                << table.dropped_nonpositive << " titles)";
    summary << "\nsegmentations in " << (out_dir / "segmentations.tsv").string() << "\n";
    return summary.str();
}

inline std::string cmd_pool(const RunConfig& config) {
    QuerySet queries = detail::load_queries_checked(config);
    auto strategies = detail::load_strategies(config, queries, config.include_unsegmented);

    DocumentPool source;
    std::optional<Index> index;
    std::unique_ptr<EngineAdapter> adapter;
    if (!config.runs_path.empty()) {
        adapter = std::make_unique<FileRunsAdapter>(config.runs_path);
    } else if (!config.corpus_path.empty()) {
        source = load_corpus(config.corpus_path);
        index.emplace(source);
        adapter = std::make_unique<IndexEngineAdapter>(*index, source);
    } else {
        throw ValidationError("pooling needs a runs file or a corpus");
    }

    PoolResult result =
        build_pool(queries, strategies, *adapter, config.pool_depth, config.segment_cap);

    std::string jsonl;
    for (const auto& doc : result.pool.documents()) {
        nlohmann::ordered_json record;
        record["doc_id"] = doc.doc_id;
        record["url"] = doc.url;
        record["title"] = "";
        record["body"] = doc.text;
        jsonl += record.dump() + "\n";
    }
    std::filesystem::path out_dir(config.output_dir);
    detail::write_text_file(out_dir / "pool.jsonl", jsonl);
    std::string warnings;
    for (const auto& w : result.warnings) warnings += w + "\n";
    detail::write_text_file(out_dir / "pool_warnings.txt", warnings);

    std::ostringstream summary;
    summary << "pooled " << result.pool.size() << " unique documents from "
            << result.versions_queried << " versions (" << result.warnings.size()
            << " warnings)\n"
            << "pool in " << (out_dir / "pool.jsonl").string() << "\n";
    return summary.str();
}

}  // namespace qseval
