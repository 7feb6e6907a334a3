#include "uqkit/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "uqkit/stats.hpp"

namespace uqkit::harness {

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open report file for writing: " + path);
    return out;
}

}  // namespace

std::vector<ComponentCorrelation> unsupervised_eval(const records::FeatureTable& table,
                                                    const std::vector<double>& gold) {
    if (gold.size() != table.rows.size() || gold.empty())
        throw DataError("unsupervised_eval: gold scores required for every row");
    std::vector<ComponentCorrelation> out;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        std::vector<double> col;
        col.reserve(table.rows.size());
        for (const auto& row : table.rows) col.push_back(row[c]);
        ComponentCorrelation cc;
        cc.component = table.names[c];
        try {
            cc.abs_pearson = stats::abs_pearson(col, gold);
        } catch (const DataError&) {
            cc.abs_pearson = std::nullopt;  // degenerate variance
        }
        out.push_back(std::move(cc));
    }
    return out;
}

Matrices assemble(const Dataset& dataset, const std::vector<std::string>& families,
                  const features::Catalog& catalog, bool require_gold) {
    if (dataset.records.size() != dataset.feats.size())
        throw DataError("assemble: records/features misaligned");
    Matrices m;
    for (const auto& fam : families)
        for (auto& comp : catalog.family_components(fam))
            m.feature_names.push_back(std::move(comp));
    m.has_gold = true;
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const auto& r = dataset.records[i];
        if (!r.embedding) throw DataError("record " + r.id + " has no embedding");
        fusion::TrainRow row;
        row.embedding = *r.embedding;
        for (const auto& name : m.feature_names)
            row.features.push_back(dataset.feats[i].at(name));
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

double model_pearson(const fusion::FusionModel& model, const Matrices& m) {
    std::vector<double> preds;
    preds.reserve(m.rows.size());
    for (const auto& row : m.rows) preds.push_back(model.predict(row.embedding, row.features));
    return stats::pearson(preds, m.gold);
}

Ranking single_feature_ranking(const Dataset& train, const Dataset& dev,
                               const std::vector<std::string>& families, double lambda,
                               const features::Catalog& catalog) {
    Ranking ranking;
    {
        const auto mt = assemble(train, {}, catalog);
        const auto md = assemble(dev, {}, catalog);
        const auto baseline = fusion::train(mt.rows, mt.gold, lambda);
        ranking.baseline_dev_pearson = model_pearson(baseline, md);
    }
    for (const auto& fam : families) {
        try {
            const auto mt = assemble(train, {fam}, catalog);
            const auto md = assemble(dev, {fam}, catalog);
            const auto model = fusion::train(mt.rows, mt.gold, lambda, mt.feature_names);
            RankedFamily rf;
            rf.family = fam;
            rf.dev_pearson = model_pearson(model, md);
            rf.increment = rf.dev_pearson - ranking.baseline_dev_pearson;
            ranking.entries.push_back(std::move(rf));
        } catch (const DataError& e) {
            ranking.skipped.emplace_back(fam, e.what());
        }
    }
    // Descending dev Pearson; stable sort keeps canonical order on ties.
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const RankedFamily& a, const RankedFamily& b) {
                         return a.dev_pearson > b.dev_pearson;
                     });
    return ranking;
}

namespace {

// Union of the top-k families, reordered canonically for determinism.
std::vector<std::string> topk_families(const Ranking& ranking, int k,
                                       const features::Catalog& catalog) {
    std::vector<std::string> chosen;
    for (int i = 0; i < k; ++i) chosen.push_back(ranking.entries[static_cast<std::size_t>(i)].family);
    std::vector<std::string> ordered;
    for (const auto& fam : catalog.families())
        if (std::find(chosen.begin(), chosen.end(), fam) != chosen.end())
            ordered.push_back(fam);
    return ordered;
}

}  // namespace

std::vector<TopkPoint> topk_select(const Dataset& train, const Dataset& dev,
                                   const Ranking& ranking, int k_max, double lambda,
                                   const features::Catalog& catalog) {
    if (k_max < 0) throw UsageError("topk_select: k_max must be >= 0");
    if (k_max > static_cast<int>(ranking.entries.size())) {
        std::cerr << "warning: k_max " << k_max << " clamped to ranking size "
                  << ranking.entries.size() << "\n";
        k_max = static_cast<int>(ranking.entries.size());
    }
    std::vector<TopkPoint> curve;
    for (int k = 0; k <= k_max; ++k) {
        const auto fams = topk_families(ranking, k, catalog);
        const auto mt = assemble(train, fams, catalog);
        const auto md = assemble(dev, fams, catalog);
        const auto model = fusion::train(mt.rows, mt.gold, lambda, mt.feature_names);
        TopkPoint p;
        p.k = k;
        p.dev_pearson = model_pearson(model, md);
        if (k > 0) p.added_family = ranking.entries[static_cast<std::size_t>(k - 1)].family;
        curve.push_back(std::move(p));
    }
    return curve;
}

FinalReport final_report(const Dataset& train, const Dataset& test, const Ranking& ranking,
                         const std::vector<TopkPoint>& curve, double lambda,
                         const features::Catalog& catalog) {
    if (curve.empty()) throw DataError("final_report: empty top-k curve");
    FinalReport report;
    report.baseline_dev_pearson = curve[0].dev_pearson;
    if (!ranking.entries.empty()) {
        report.best_single_family = ranking.entries[0].family;
        report.best_single_dev_pearson = ranking.entries[0].dev_pearson;
    }
    // Best dev k; ties break toward smaller k.
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].dev_pearson > curve[best].dev_pearson) best = i;
    report.chosen_k = curve[best].k;
    report.best_multi_dev_pearson = curve[best].dev_pearson;
    report.chosen_families = topk_families(ranking, report.chosen_k, catalog);

    const auto mt = assemble(train, report.chosen_families, catalog);
    const auto model = fusion::train(mt.rows, mt.gold, lambda, mt.feature_names);
    const auto mtest = assemble(test, report.chosen_families, catalog, /*require_gold=*/false);
    for (std::size_t i = 0; i < mtest.rows.size(); ++i)
        report.test_predictions.emplace_back(
            mtest.ids[i], model.predict(mtest.rows[i].embedding, mtest.rows[i].features));
    if (mtest.has_gold) {
        std::vector<double> preds;
        for (const auto& [_, p] : report.test_predictions) preds.push_back(p);
        report.test_pearson = stats::pearson(preds, mtest.gold);
    }

    std::ostringstream os;
    os << "Model                               Dev Pearson   Test Pearson\n";
    os << "----------------------------------- ------------- -------------\n";
    auto row = [&os](const std::string& name, const std::string& dev, const std::string& test) {
        os << name;
        for (std::size_t i = name.size(); i < 36; ++i) os << ' ';
        os << dev;
        for (std::size_t i = dev.size(); i < 14; ++i) os << ' ';
        os << test << '\n';
    };
    row("Baseline (embedding only)", fmt6(report.baseline_dev_pearson), "-");
    row("Best Single Feature Enhanced", fmt6(report.best_single_dev_pearson),
        report.best_single_family.empty() ? "-" : "(" + report.best_single_family + ")");
    row("Multiple Features Enhanced (k=" + std::to_string(report.chosen_k) + ")",
        fmt6(report.best_multi_dev_pearson),
        report.test_pearson ? fmt6(*report.test_pearson) : std::string("-"));
    os << "\nTie-breaking among equal dev-Pearson families follows canonical family order.\n";
    report.text = os.str();
    return report;
}

void write_ranking_csv(const Ranking& ranking, const std::string& path) {
    auto out = open_out(path);
    out << "rank,family,dev_pearson,increment\n";
    out << "0,BASELINE," << fmt6(ranking.baseline_dev_pearson) << ",0.000000\n";
    int rank = 1;
    for (const auto& e : ranking.entries)
        out << rank++ << ',' << e.family << ',' << fmt6(e.dev_pearson) << ','
            << fmt6(e.increment) << '\n';
    for (const auto& [fam, reason] : ranking.skipped)
        out << "-," << fam << ",skipped: " << reason << ",\n";
}

void write_topk_csv(const std::vector<TopkPoint>& curve, const std::string& path) {
    auto out = open_out(path);
    out << "k,dev_pearson,added_family\n";
    for (const auto& p : curve)
        out << p.k << ',' << fmt6(p.dev_pearson) << ',' << p.added_family << '\n';
}

void write_component_csv(const std::vector<ComponentCorrelation>& rows,
                         const std::string& path) {
    auto out = open_out(path);
    out << "component,abs_pearson\n";
    for (const auto& cc : rows)
        out << cc.component << ',' << (cc.abs_pearson ? fmt6(*cc.abs_pearson) : "absent")
            << '\n';
}

void write_predictions_csv(const std::vector<std::pair<std::string, double>>& preds,
                           const std::string& path) {
    auto out = open_out(path);
    out << "id,prediction\n";
    char buf[32];
    for (const auto& [id, p] : preds) {
        std::snprintf(buf, sizeof(buf), "%.9g", p);
        out << id << ',' << buf << '\n';
    }
}

}  // namespace uqkit::harness
