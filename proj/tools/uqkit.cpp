// uqkit command-line front end.
//
// Subcommands cover the whole pipeline: synthetic data generation, corpus
// indexing, feature extraction, fusion training/prediction, and the
// evaluation protocols. stdout carries only key=value result lines;
// progress and warnings go to stderr. Exit codes: 0 ok, 1 usage error,
// 2 data error, 3 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uqkit/config.hpp"
#include "uqkit/fusion.hpp"
#include "uqkit/harness.hpp"
#include "uqkit/pipeline.hpp"

namespace fs = std::filesystem;
using namespace uqkit;

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct CliState {
    std::string config_path;
    // Ordered key overrides collected from the mirrored flags.
    std::vector<std::pair<std::string, std::string>> overrides;

    config::PipelineConfig build() const {
        config::PipelineConfig cfg;
        if (!config_path.empty()) cfg = config::load_config(config_path);
        for (const auto& [key, value] : overrides) config::set_key(cfg, key, value);
        cfg.validate();
        return cfg;
    }
};

// Every config key becomes a flag of the same name on `app`; underscores
// also get a dashed alias (--n_train / --n-train).
void add_config_flags(CLI::App& app, CliState& state) {
    app.add_option("--config", state.config_path, "key = value configuration file");
    for (const auto& key : config::keys()) {
        std::string names = "--" + key.name;
        if (key.name.find('_') != std::string::npos) {
            std::string dashed = key.name;
            for (char& c : dashed)
                if (c == '_') c = '-';
            names += ",--" + dashed;
        }
        const std::string name = key.name;
        app.add_option_function<std::string>(
               names,
               [&state, name](const std::string& v) { state.overrides.emplace_back(name, v); },
               key.description + " [" + key.default_value + "]")
            ->expected(1);
    }
}

void ensure_parent_dir(const std::string& path) {
    const auto parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

std::string default_out(const config::PipelineConfig& cfg, const std::string& file) {
    fs::create_directories(cfg.out_dir);
    return cfg.out_dir + "/" + file;
}

// Aligns a feature CSV with a record split by id.
harness::Matrices matrices_from_table(const std::vector<QERecord>& recs,
                                      const records::FeatureTable& table, bool require_gold) {
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < table.ids.size(); ++i) by_id[table.ids[i]] = i;
    harness::Matrices m;
    m.feature_names = table.names;
    m.has_gold = true;
    for (const auto& r : recs) {
        const auto it = by_id.find(r.id);
        if (it == by_id.end()) throw DataError("feature table has no row for record " + r.id);
        if (!r.embedding) throw DataError("record " + r.id + " has no embedding");
        fusion::TrainRow row;
        row.embedding = *r.embedding;
        row.features = table.rows[it->second];
        m.rows.push_back(std::move(row));
        m.ids.push_back(r.id);
        if (r.gold_score) {
            m.gold.push_back(*r.gold_score);
        } else {
            m.has_gold = false;
            if (require_gold) throw DataError("record " + r.id + " has no gold score");
        }
    }
    return m;
}

// Features from a CSV when given, extracted live otherwise.
harness::Matrices load_matrices(const config::PipelineConfig& cfg, const std::string& split,
                                const std::string& features_path, bool require_gold) {
    const auto recs = pipeline::load_split(cfg, split);
    if (!features_path.empty())
        return matrices_from_table(recs, records::read_feature_table(features_path),
                                   require_gold);
    const auto selection = features::FeatureGroupSelection::parse(cfg.groups);
    harness::Dataset ds = pipeline::extract_split(cfg, split, selection);
    features::Catalog catalog;
    catalog.ngram_ns = cfg.ngram_n;
    catalog.neighbor_ks = cfg.neighbor_k;
    return harness::assemble(ds, selection.families, catalog, require_gold);
}

features::Catalog catalog_for(const config::PipelineConfig& cfg) {
    features::Catalog c;
    c.ngram_ns = cfg.ngram_n;
    c.neighbor_ks = cfg.neighbor_k;
    return c;
}

int run(int argc, char** argv) {
    CLI::App app{"uqkit - uncertainty features for machine-translation quality estimation"};
    app.name("uqkit");  // stable usage lines regardless of argv[0]
    app.require_subcommand(1);
    CliState state;

    std::string split = "dev";
    std::string out_path;
    std::string features_path;
    std::string model_path;
    int k_max = -1;

    auto* cmd_index = app.add_subcommand("index", "build and save a corpus index snapshot");
    add_config_flags(*cmd_index, state);
    cmd_index->add_option("--out", out_path, "snapshot output path")->required();

    auto* cmd_synth =
        app.add_subcommand("synth", "generate synthetic train/dev/test splits and corpus");
    add_config_flags(*cmd_synth, state);
    cmd_synth->add_option("--out", out_path, "output directory")->required();

    auto* cmd_extract = app.add_subcommand("extract", "extract features for one split");
    add_config_flags(*cmd_extract, state);
    cmd_extract->add_option("--split", split, "split name [dev]");
    cmd_extract->add_option("--out", out_path, "feature CSV output path")->required();

    auto* cmd_train = app.add_subcommand("train", "train the ridge fusion model");
    add_config_flags(*cmd_train, state);
    cmd_train->add_option("--split", split, "training split [train]")->default_val("train");
    cmd_train->add_option("--features", features_path, "precomputed feature CSV");
    cmd_train->add_option("--out", out_path, "model output path")->required();

    auto* cmd_predict = app.add_subcommand("predict", "score a split with a trained model");
    add_config_flags(*cmd_predict, state);
    cmd_predict->add_option("--model", model_path, "model file")->required();
    cmd_predict->add_option("--split", split, "split to score [test]")->default_val("test");
    cmd_predict->add_option("--features", features_path, "precomputed feature CSV");
    cmd_predict->add_option("--out", out_path, "predictions CSV output path");

    auto* cmd_eval =
        app.add_subcommand("eval", "per-component unsupervised correlations on one split");
    add_config_flags(*cmd_eval, state);
    cmd_eval->add_option("--split", split, "split to evaluate [dev]");
    cmd_eval->add_option("--features", features_path, "precomputed feature CSV");
    cmd_eval->add_option("--out", out_path, "components CSV output path");

    auto* cmd_rank = app.add_subcommand("rank", "single-feature-enhanced family ranking");
    add_config_flags(*cmd_rank, state);
    cmd_rank->add_option("--out", out_path, "ranking CSV output path");

    auto* cmd_topk =
        app.add_subcommand("topk", "top-k fusion curve and final train/dev/test report");
    add_config_flags(*cmd_topk, state);
    cmd_topk->add_option("--k-max", k_max, "largest k to sweep [all ranked families]");
    cmd_topk->add_option("--out", out_path, "curve CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints help or the parse diagnostic
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    if (cmd_index->parsed()) {
        const auto cfg = state.build();
        std::string corpus_path = cfg.corpus_path;
        if (corpus_path.empty() && !cfg.data_dir.empty() &&
            fs::exists(pipeline::corpus_file(cfg.data_dir)))
            corpus_path = pipeline::corpus_file(cfg.data_dir);
        if (corpus_path.empty()) throw UsageError("index: set corpus_path or data_dir");
        const auto index = corpus::CorpusIndex::build(records::read_parallel_corpus(corpus_path));
        ensure_parent_dir(out_path);
        index.save(out_path);
        std::cout << "sentences=" << index.size() << "\n";
        return 0;
    }

    if (cmd_synth->parsed()) {
        const auto cfg = state.build();
        pipeline::synth_to_dir(cfg, out_path);
        std::cout << "records=" << (cfg.n_train + cfg.n_dev + cfg.n_test) << "\n";
        return 0;
    }

    if (cmd_extract->parsed()) {
        const auto cfg = state.build();
        const auto selection = features::FeatureGroupSelection::parse(cfg.groups);
        const auto ds = pipeline::extract_split(cfg, split, selection);
        std::vector<std::pair<std::string, records::NamedRow>> rows;
        for (std::size_t i = 0; i < ds.records.size(); ++i)
            rows.emplace_back(ds.records[i].id, ds.feats[i].named_row());
        ensure_parent_dir(out_path);
        records::write_feature_table(rows, out_path);
        std::cout << "rows=" << rows.size() << "\n";
        return 0;
    }

    if (cmd_train->parsed()) {
        const auto cfg = state.build();
        const auto m = load_matrices(cfg, split, features_path, /*require_gold=*/true);
        const auto model = fusion::train(m.rows, m.gold, cfg.ridge_lambda, m.feature_names,
                                         cfg.normalize_embedding);
        ensure_parent_dir(out_path);
        fusion::save_model(model, out_path);
        std::cout << "pearson=" << fmt6(harness::model_pearson(model, m)) << "\n";
        return 0;
    }

    if (cmd_predict->parsed()) {
        const auto cfg = state.build();
        const auto model = fusion::load_model(model_path);
        const auto m = load_matrices(cfg, split, features_path, /*require_gold=*/false);
        std::vector<std::pair<std::string, double>> preds;
        for (std::size_t i = 0; i < m.rows.size(); ++i)
            preds.emplace_back(m.ids[i], model.predict(m.rows[i].embedding, m.rows[i].features));
        if (!out_path.empty()) {
            ensure_parent_dir(out_path);
            harness::write_predictions_csv(preds, out_path);
        }
        if (m.has_gold && !m.rows.empty())
            std::cout << "pearson=" << fmt6(harness::model_pearson(model, m)) << "\n";
        std::cout << "predictions=" << preds.size() << "\n";
        return 0;
    }

    if (cmd_eval->parsed()) {
        const auto cfg = state.build();
        const auto recs = pipeline::load_split(cfg, split);
        records::FeatureTable table;
        if (!features_path.empty()) {
            table = records::read_feature_table(features_path);
        } else {
            const auto selection = features::FeatureGroupSelection::parse(cfg.groups);
            const auto ds = pipeline::extract_split(cfg, split, selection);
            for (std::size_t i = 0; i < ds.records.size(); ++i) {
                if (table.names.empty())
                    for (const auto& [n, _] : ds.feats[i].values) table.names.push_back(n);
                table.ids.push_back(ds.records[i].id);
                std::vector<double> row;
                for (const auto& [_, v] : ds.feats[i].values) row.push_back(v);
                table.rows.push_back(std::move(row));
            }
        }
        std::map<std::string, double> gold_by_id;
        for (const auto& r : recs) {
            if (!r.gold_score) throw DataError("record " + r.id + " has no gold score");
            gold_by_id[r.id] = *r.gold_score;
        }
        std::vector<double> gold;
        for (const auto& id : table.ids) {
            const auto it = gold_by_id.find(id);
            if (it == gold_by_id.end())
                throw DataError("feature table row has no matching record: " + id);
            gold.push_back(it->second);
        }
        const auto comps = harness::unsupervised_eval(table, gold);
        const std::string out = out_path.empty() ? default_out(cfg, "components.csv") : out_path;
        ensure_parent_dir(out);
        harness::write_component_csv(comps, out);
        double best = 0.0;
        std::string best_name;
        for (const auto& c : comps)
            if (c.abs_pearson && *c.abs_pearson > best) {
                best = *c.abs_pearson;
                best_name = c.component;
            }
        std::cout << "components=" << comps.size() << "\n";
        std::cout << "best_component=" << best_name << "\n";
        std::cout << "pearson=" << fmt6(best) << "\n";
        return 0;
    }

    if (cmd_rank->parsed() || cmd_topk->parsed()) {
        const auto cfg = state.build();
        const auto catalog = catalog_for(cfg);
        const auto selection = features::FeatureGroupSelection::parse(cfg.groups);
        const auto train_ds = pipeline::extract_split(cfg, "train", selection);
        const auto dev_ds = pipeline::extract_split(cfg, "dev", selection);
        const auto ranking = harness::single_feature_ranking(train_ds, dev_ds,
                                                             selection.families,
                                                             cfg.ridge_lambda, catalog);
        if (cmd_rank->parsed()) {
            const std::string out = out_path.empty() ? default_out(cfg, "ranking.csv") : out_path;
            ensure_parent_dir(out);
            harness::write_ranking_csv(ranking, out);
            std::cout << "baseline=" << fmt6(ranking.baseline_dev_pearson) << "\n";
            if (!ranking.entries.empty()) {
                std::cout << "best_family=" << ranking.entries[0].family << "\n";
                std::cout << "pearson=" << fmt6(ranking.entries[0].dev_pearson) << "\n";
            }
            return 0;
        }

        const int sweep = k_max < 0 ? static_cast<int>(ranking.entries.size()) : k_max;
        const auto curve =
            harness::topk_select(train_ds, dev_ds, ranking, sweep, cfg.ridge_lambda, catalog);
        const auto test_ds = pipeline::extract_split(cfg, "test", selection);
        const auto report =
            harness::final_report(train_ds, test_ds, ranking, curve, cfg.ridge_lambda, catalog);

        const std::string out = out_path.empty() ? default_out(cfg, "topk.csv") : out_path;
        ensure_parent_dir(out);
        harness::write_topk_csv(curve, out);
        {
            std::ofstream rep(default_out(cfg, "final.txt"), std::ios::binary);
            rep << report.text;
        }
        harness::write_predictions_csv(report.test_predictions,
                                       default_out(cfg, "predictions.csv"));
        std::cout << "chosen_k=" << report.chosen_k << "\n";
        std::cout << "dev_pearson=" << fmt6(report.best_multi_dev_pearson) << "\n";
        if (report.test_pearson)
            std::cout << "pearson=" << fmt6(*report.test_pearson) << "\n";
        return 0;
    }

    throw UsageError("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
