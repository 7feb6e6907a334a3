#include <cmath>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "uqkit/harness.hpp"
#include "uqkit/rng.hpp"
#include "uqkit/stats.hpp"

using namespace uqkit;
using uqkit_test::TempDir;
using uqkit_test::slurp;

namespace {

// A hand-built dataset over two families: "I.Psteps" leaks gold through its
// .E component, "II.MC-Sim" is pure noise. The embedding carries a weak
// signal so the baseline lands strictly between 0 and the leaky family.
harness::Dataset toy_dataset(std::uint64_t seed, const std::string& tag, std::size_t n,
                             bool with_gold = true) {
    const auto key = rng::make_key(seed, "harness-" + tag, 0);
    harness::Dataset ds;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t base = static_cast<std::uint64_t>(i) * 16;
        const double gold = rng::uniform(key, base);
        QERecord r;
        r.id = tag + "-" + std::to_string(i);
        r.src_tokens = {"s0"};
        r.mt_tokens = {"t0"};
        r.embedding = {gold + rng::uniform_range(key, base + 1, -0.6, 0.6),
                       rng::uniform_range(key, base + 2, -1.0, 1.0)};
        if (with_gold) r.gold_score = gold;
        ds.records.push_back(std::move(r));

        features::FeatureVector fv;
        fv.values = {{"I.Psteps.E", gold},
                     {"I.Psteps.Std", rng::uniform(key, base + 3)},
                     {"I.Psteps.Combo", rng::uniform(key, base + 4)},
                     {"II.MC-Sim.E", rng::uniform(key, base + 5)},
                     {"II.MC-Sim.Std", rng::uniform(key, base + 6)},
                     {"II.MC-Sim.Combo", rng::uniform(key, base + 7)}};
        ds.feats.push_back(std::move(fv));
    }
    return ds;
}

}  // namespace

TEST_CASE("unsupervised_eval scores components against gold") {
    records::FeatureTable table;
    table.names = {"leak", "antileak", "flat"};
    const auto key = rng::make_key(41, "unsup", 0);
    std::vector<double> gold;
    for (int i = 0; i < 50; ++i) {
        const double g = rng::uniform(key, static_cast<std::uint64_t>(i));
        gold.push_back(g);
        table.ids.push_back("r" + std::to_string(i));
        table.rows.push_back({g, -g, 3.5});
    }
    const auto rows = harness::unsupervised_eval(table, gold);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].component == "leak");
    REQUIRE(rows[0].abs_pearson);
    CHECK(*rows[0].abs_pearson == doctest::Approx(1.0));
    REQUIRE(rows[1].abs_pearson);
    CHECK(*rows[1].abs_pearson == doctest::Approx(1.0));  // sign-insensitive
    CHECK_FALSE(rows[2].abs_pearson);                     // constant column

    CHECK_THROWS_AS(harness::unsupervised_eval(table, std::vector<double>(49, 0.5)), DataError);
}

TEST_CASE("assemble joins embeddings, selected families, and gold") {
    const auto ds = toy_dataset(51, "asm", 10);
    features::Catalog catalog;
    const auto m = harness::assemble(ds, {"I.Psteps"}, catalog);
    REQUIRE(m.rows.size() == 10);
    CHECK(m.feature_names ==
          std::vector<std::string>{"I.Psteps.E", "I.Psteps.Std", "I.Psteps.Combo"});
    CHECK(m.ids[3] == "asm-3");
    CHECK(m.rows[3].embedding == *ds.records[3].embedding);
    CHECK(m.rows[3].features[0] == *ds.records[3].gold_score);
    CHECK(m.has_gold);

    // Families not present in the feature vectors are a data error.
    CHECK_THROWS_AS(harness::assemble(ds, {"III.DS-gram"}, catalog), DataError);

    // Gold handling.
    const auto nogold = toy_dataset(51, "ng", 4, /*with_gold=*/false);
    CHECK_THROWS_AS(harness::assemble(nogold, {}, catalog), DataError);
    const auto m2 = harness::assemble(nogold, {}, catalog, /*require_gold=*/false);
    CHECK_FALSE(m2.has_gold);
    CHECK(m2.rows.size() == 4);
}

TEST_CASE("single_feature_ranking puts the gold-leaking family first") {
    const auto train = toy_dataset(52, "tr", 80);
    const auto dev = toy_dataset(52, "dv", 40);
    features::Catalog catalog;
    const std::vector<std::string> fams = {"I.Psteps", "II.MC-Sim", "III.DS-gram"};
    const auto ranking = harness::single_feature_ranking(train, dev, fams, 0.1, catalog);

    CHECK(ranking.baseline_dev_pearson > 0.3);
    CHECK(ranking.baseline_dev_pearson < 0.99);
    REQUIRE(ranking.entries.size() == 2);
    CHECK(ranking.entries[0].family == "I.Psteps");
    CHECK(ranking.entries[0].dev_pearson > 0.99);
    CHECK(ranking.entries[0].increment ==
          doctest::Approx(ranking.entries[0].dev_pearson - ranking.baseline_dev_pearson));
    // Pure noise neither helps nor hurts much.
    CHECK(std::abs(ranking.entries[1].increment) < 0.05);
    // The unknown family lands in skipped with its reason.
    REQUIRE(ranking.skipped.size() == 1);
    CHECK(ranking.skipped[0].first == "III.DS-gram");
    CHECK(ranking.skipped[0].second.find("feature not present") != std::string::npos);
}

TEST_CASE("topk_select walks the ranking in order") {
    const auto train = toy_dataset(53, "tr", 80);
    const auto dev = toy_dataset(53, "dv", 40);
    features::Catalog catalog;
    const auto ranking =
        harness::single_feature_ranking(train, dev, {"I.Psteps", "II.MC-Sim"}, 0.1, catalog);
    const auto curve = harness::topk_select(train, dev, ranking, 2, 0.1, catalog);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].k == 0);
    CHECK(curve[0].added_family.empty());
    CHECK(curve[0].dev_pearson == doctest::Approx(ranking.baseline_dev_pearson));
    CHECK(curve[1].added_family == ranking.entries[0].family);
    CHECK(curve[1].dev_pearson == doctest::Approx(ranking.entries[0].dev_pearson));
    CHECK(curve[2].added_family == ranking.entries[1].family);

    // k_max beyond the ranking is clamped, not an error.
    CHECK(harness::topk_select(train, dev, ranking, 10, 0.1, catalog).size() == 3);
    CHECK_THROWS_AS(harness::topk_select(train, dev, ranking, -1, 0.1, catalog), UsageError);
}

TEST_CASE("final_report chooses best dev k and scores the test split") {
    const auto train = toy_dataset(54, "tr", 80);
    const auto dev = toy_dataset(54, "dv", 40);
    const auto test = toy_dataset(54, "te", 30);
    features::Catalog catalog;
    const auto ranking =
        harness::single_feature_ranking(train, dev, {"I.Psteps", "II.MC-Sim"}, 0.1, catalog);
    const auto curve = harness::topk_select(train, dev, ranking, 2, 0.1, catalog);
    const auto report = harness::final_report(train, test, ranking, curve, 0.1, catalog);

    CHECK(report.baseline_dev_pearson == doctest::Approx(ranking.baseline_dev_pearson));
    CHECK(report.best_single_family == "I.Psteps");
    CHECK(report.chosen_k >= 1);
    CHECK(report.best_multi_dev_pearson >=
          curve[static_cast<std::size_t>(report.chosen_k)].dev_pearson - 1e-12);
    for (const auto& p : curve) CHECK(report.best_multi_dev_pearson >= p.dev_pearson);

    // Test Pearson must equal a recomputation from the dumped predictions.
    REQUIRE(report.test_pearson);
    REQUIRE(report.test_predictions.size() == 30);
    std::vector<double> preds, gold;
    for (std::size_t i = 0; i < report.test_predictions.size(); ++i) {
        CHECK(report.test_predictions[i].first == test.records[i].id);
        preds.push_back(report.test_predictions[i].second);
        gold.push_back(*test.records[i].gold_score);
    }
    CHECK(*report.test_pearson == doctest::Approx(stats::pearson(preds, gold)).epsilon(1e-12));
    CHECK(*report.test_pearson > 0.99);

    CHECK(report.text.find("Baseline (embedding only)") != std::string::npos);
    CHECK(report.text.find("Multiple Features Enhanced") != std::string::npos);

    // No gold on test: predictions still come out, the Pearson does not.
    const auto blind = toy_dataset(54, "bl", 10, /*with_gold=*/false);
    const auto r2 = harness::final_report(train, blind, ranking, curve, 0.1, catalog);
    CHECK_FALSE(r2.test_pearson);
    CHECK(r2.test_predictions.size() == 10);
}

TEST_CASE("final_report breaks dev ties toward smaller k") {
    // Two identical curve points: the earlier k must win.
    const auto train = toy_dataset(55, "tr", 40);
    const auto dev = toy_dataset(55, "dv", 20);
    features::Catalog catalog;
    const auto ranking =
        harness::single_feature_ranking(train, dev, {"I.Psteps"}, 0.1, catalog);
    std::vector<harness::TopkPoint> curve(3);
    curve[0] = {0, 0.5, ""};
    curve[1] = {1, 0.75, "I.Psteps"};
    curve[2] = {2, 0.75, "I.Psteps"};
    const auto report = harness::final_report(train, dev, ranking, curve, 0.1, catalog);
    CHECK(report.chosen_k == 1);
}

TEST_CASE("report CSV writers") {
    TempDir dir;
    const auto train = toy_dataset(56, "tr", 40);
    const auto dev = toy_dataset(56, "dv", 20);
    features::Catalog catalog;
    const auto ranking = harness::single_feature_ranking(
        train, dev, {"I.Psteps", "II.MC-Sim", "III.DS-gram"}, 0.1, catalog);

    const auto rp = dir.file("ranking.csv");
    harness::write_ranking_csv(ranking, rp);
    const auto rtext = slurp(rp);
    CHECK(rtext.rfind("rank,family,dev_pearson,increment\n", 0) == 0);
    CHECK(rtext.find("0,BASELINE,") != std::string::npos);
    CHECK(rtext.find("1,I.Psteps,") != std::string::npos);
    CHECK(rtext.find("-,III.DS-gram,skipped: ") != std::string::npos);

    const auto curve = harness::topk_select(train, dev, ranking, 1, 0.1, catalog);
    const auto tp = dir.file("topk.csv");
    harness::write_topk_csv(curve, tp);
    const auto ttext = slurp(tp);
    CHECK(ttext.rfind("k,dev_pearson,added_family\n", 0) == 0);
    CHECK(ttext.find("\n1,") != std::string::npos);

    records::FeatureTable table;
    table.names = {"a", "b"};
    table.ids = {"r1", "r2"};
    table.rows = {{0.25, 1.0}, {0.75, 1.0}};
    const auto comps = harness::unsupervised_eval(table, {0.0, 1.0});
    const auto cp = dir.file("components.csv");
    harness::write_component_csv(comps, cp);
    const auto ctext = slurp(cp);
    CHECK(ctext == "component,abs_pearson\na,1.000000\nb,absent\n");

    const auto pp = dir.file("predictions.csv");
    harness::write_predictions_csv({{"r1", 0.123456789}, {"r2", -2.0}}, pp);
    CHECK(slurp(pp) == "id,prediction\nr1,0.123456789\nr2,-2\n");
}
