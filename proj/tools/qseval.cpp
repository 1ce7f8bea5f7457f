// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "qseval/harness.hpp"

namespace {

void add_options(CLI::App* cmd, qseval::RunConfig& config, std::string& config_file) {
    cmd->add_option("--config", config_file, "key=value config file; flags override it");
    cmd->add_option("--queries", config.queries_path, "query file: qid<TAB>text");
    cmd->add_option("--segmentations", config.segmentations_path,
                    "segmentation file: qid<TAB>strategy<TAB>seg1 | seg2");
    cmd->add_option("--corpus", config.corpus_path,
                    "document corpus, one JSON object per line");
    cmd->add_option("--judgments", config.judgments_path,
                    "judgments file: qid<TAB>doc_id<TAB>annotator<TAB>rating");
    cmd->add_option("--titles", config.titles_path, "title list, one per line");
    cmd->add_option("--ngram-corpus", config.ngram_corpus_path,
                    "raw text corpus for n-gram training, one record per line");
    cmd->add_option("--ngram-counts", config.ngram_counts_path,
                    "precomputed n-gram counts: token[<TAB>token]<TAB>count");
    cmd->add_option("--runs", config.runs_path,
                    "external engine runs: version<TAB>doc_id<TAB>url[<TAB>text]");
    cmd->add_option("--index", config.index_path, "index artifact path");
    cmd->add_option("--dev-queries", config.dev_queries_path,
                    "dev queries for threshold tuning (defaults to --queries)");
    cmd->add_option("--dev-segmentations", config.dev_segmentations_path,
                    "dev reference segmentations for threshold tuning");
    cmd->add_option("--output", config.output_dir, "report directory")
        ->capture_default_str();
    cmd->add_option("--metrics", config.metric_names, "metrics, e.g. ndcg@10,map@5")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--reference", config.reference,
                    "reference strategy id or single-strategy segmentation file");
    cmd->add_option("--strategy-id", config.strategy_id, "strategy id for emitted segmentations")
        ->capture_default_str();
    cmd->add_option("--segment-cap", config.segment_cap,
                    "most segments a query may have for version generation")
        ->capture_default_str();
    cmd->add_option("--token-cap", config.token_cap,
                    "most tokens a query may have for brute-force enumeration")
        ->capture_default_str();
    cmd->add_option("--depth", config.pool_depth, "results per version when pooling")
        ->capture_default_str();
    cmd->add_option("--threshold", config.pmi_threshold, "PMI split threshold")
        ->capture_default_str();
    cmd->add_flag("--tune", config.tune, "tune the PMI threshold on the dev reference");
    cmd->add_flag("--wiki", config.use_wiki, "refine segments with the title score table");
}

std::string trimmed(const std::string& text) {
    const char* ws = " \t\r\n";
    std::size_t begin = text.find_first_not_of(ws);
    if (begin == std::string::npos) return "";
    return text.substr(begin, text.find_last_not_of(ws) - begin + 1);
}

// Expands a key=value file into --key=value tokens for any option the command
// line leaves unset. CLI11 reads config files for the top-level app only, not
// for subcommands, so the file is applied by hand before the parse.
std::vector<std::string> config_args(const std::string& path,
                                     const std::set<std::string>& given) {
    std::ifstream in(path);
    if (!in) throw qseval::ParseError("cannot open config file: " + path);
    std::map<std::string, std::string> entries;  // later lines win
    std::string line;
    while (std::getline(in, line)) {
        std::string entry = trimmed(line);
        if (entry.empty() || entry[0] == '#') continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw qseval::ParseError("config line is not key=value: " + entry);
        std::string key = trimmed(entry.substr(0, eq));
        if (key.empty()) throw qseval::ParseError("config line has no key: " + entry);
        entries[key] = trimmed(entry.substr(eq + 1));
    }
    std::vector<std::string> extra;
    for (const auto& [key, value] : entries)
        if (given.count("--" + key) == 0) extra.push_back("--" + key + "=" + value);
    return extra;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"query segmentation retrieval evaluation toolkit", "qseval"};
    app.require_subcommand(1);

    qseval::RunConfig config;
    bool no_unsegmented = false;
    std::string config_file;

    struct Sub {
        CLI::App* cmd;
        std::function<std::string(const qseval::RunConfig&)> fn;
    };
    std::vector<Sub> subs;
    auto add = [&](const char* name, const char* desc,
                   std::function<std::string(const qseval::RunConfig&)> fn) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_options(cmd, config, config_file);
        cmd->add_flag("--no-unsegmented", no_unsegmented,
                      "do not add the all-singletons baseline strategy");
        subs.push_back({cmd, std::move(fn)});
    };
    add("index", "build and persist the positional index", qseval::cmd_index);
    add("evaluate", "oracle retrieval scores per strategy and metric", qseval::cmd_evaluate);
    add("bqv", "brute-force best quoted version per query", qseval::cmd_bqv);
    add("match", "matching metrics against a reference plus rank correlation",
        qseval::cmd_match);
    add("iaa", "inter-annotator agreement tables", qseval::cmd_iaa);
    add("segment", "run the PMI segmenter, optionally with the title table",
        qseval::cmd_segment);
    add("pool", "build a judged document pool through an engine adapter", qseval::cmd_pool);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        std::string cfg_path;
        std::set<std::string> given;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const std::string& arg = args[i];
            if (arg.rfind("--", 0) != 0) continue;
            std::string name = arg.substr(0, arg.find('='));
            given.insert(name);
            if (name != "--config") continue;
            cfg_path = arg.find('=') != std::string::npos
                           ? arg.substr(arg.find('=') + 1)
                           : (i + 1 < args.size() ? args[i + 1] : std::string());
        }
        if (!cfg_path.empty())
            for (std::string& extra : config_args(cfg_path, given))
                args.push_back(std::move(extra));
    } catch (const qseval::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::reverse(args.begin(), args.end());  // App::parse consumes back to front

    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    config.include_unsegmented = !no_unsegmented;

    try {
        for (const auto& sub : subs) {
            if (sub.cmd->parsed()) {
                std::cout << sub.fn(config);
                return 0;
            }
        }
    } catch (const qseval::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qseval::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
