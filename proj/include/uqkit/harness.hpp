#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uqkit/features.hpp"
#include "uqkit/fusion.hpp"
#include "uqkit/records.hpp"

namespace uqkit::harness {

// A split with full-catalog feature vectors aligned to its records.
struct Dataset {
    std::vector<QERecord> records;
    std::vector<features::FeatureVector> feats;
};

// --- Appendix-A analog: per-component unsupervised correlations -------------

struct ComponentCorrelation {
    std::string component;
    std::optional<double> abs_pearson;  // absent on degenerate variance
};

std::vector<ComponentCorrelation> unsupervised_eval(const records::FeatureTable& table,
                                                    const std::vector<double>& gold);

// --- Table 1/2 analog: single-feature-enhanced ranking ----------------------

struct RankedFamily {
    std::string family;
    double dev_pearson = 0.0;
    double increment = 0.0;  // over the embedding-only baseline
};

struct Ranking {
    double baseline_dev_pearson = 0.0;
    std::vector<RankedFamily> entries;  // descending dev Pearson, ties by canonical order
    std::vector<std::pair<std::string, std::string>> skipped;  // family -> reason
};

Ranking single_feature_ranking(const Dataset& train, const Dataset& dev,
                               const std::vector<std::string>& families, double lambda,
                               const features::Catalog& catalog);

// --- Table 3 analog: top-k multi-feature curve ------------------------------

struct TopkPoint {
    int k = 0;
    double dev_pearson = 0.0;
    std::string added_family;  // empty for k=0
};

std::vector<TopkPoint> topk_select(const Dataset& train, const Dataset& dev,
                                   const Ranking& ranking, int k_max, double lambda,
                                   const features::Catalog& catalog);

// --- Table 4 analog ----------------------------------------------------------

struct FinalReport {
    int chosen_k = 0;
    std::vector<std::string> chosen_families;
    double baseline_dev_pearson = 0.0;
    double best_single_dev_pearson = 0.0;
    std::string best_single_family;
    double best_multi_dev_pearson = 0.0;
    std::optional<double> test_pearson;  // absent without test gold
    std::vector<std::pair<std::string, double>> test_predictions;  // id -> score
    std::string text;                    // rendered fixed-width table
};

FinalReport final_report(const Dataset& train, const Dataset& test, const Ranking& ranking,
                         const std::vector<TopkPoint>& curve, double lambda,
                         const features::Catalog& catalog);

// --- Shared assembly and report files ----------------------------------------

struct Matrices {
    std::vector<fusion::TrainRow> rows;
    std::vector<double> gold;
    std::vector<std::string> feature_names;
    std::vector<std::string> ids;
    bool has_gold = false;
};

// families empty -> embedding-only design.
Matrices assemble(const Dataset& dataset, const std::vector<std::string>& families,
                  const features::Catalog& catalog, bool require_gold = true);

double model_pearson(const fusion::FusionModel& model, const Matrices& m);

void write_ranking_csv(const Ranking& ranking, const std::string& path);
void write_topk_csv(const std::vector<TopkPoint>& curve, const std::string& path);
void write_component_csv(const std::vector<ComponentCorrelation>& rows, const std::string& path);
void write_predictions_csv(const std::vector<std::pair<std::string, double>>& preds,
                           const std::string& path);

}  // namespace uqkit::harness
