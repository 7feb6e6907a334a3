#pragma once

#include <string>
#include <vector>

#include "uqkit/types.hpp"

namespace uqkit::fusion {

// Per-feature z-normalization statistics fitted on the training split.
// Constant columns normalize to 0.
struct Normalizer {
    std::vector<double> mean;
    std::vector<double> std;
    std::vector<bool> constant;

    std::size_t dims() const { return mean.size(); }
    std::vector<double> apply(const std::vector<double>& raw) const;
};

Normalizer fit_normalizer(const std::vector<std::vector<double>>& rows);

// Linear head over [embedding ++ normalized features]; ridge-regularized
// with an unpenalized bias. Embedding dims pass through un-normalized
// unless normalize_embedding was set at training time.
struct FusionModel {
    std::size_t embedding_dim = 0;
    std::vector<std::string> feature_names;
    Normalizer feature_normalizer;
    Normalizer embedding_normalizer;  // identity-sized 0 when disabled
    bool normalize_embedding = false;
    std::vector<double> weights;  // embedding_dim + feature_count
    double bias = 0.0;
    double ridge_lambda = 0.0;

    double predict(const std::vector<double>& embedding,
                   const std::vector<double>& features) const;
};

struct TrainRow {
    std::vector<double> embedding;
    std::vector<double> features;
};

FusionModel train(const std::vector<TrainRow>& rows, const std::vector<double>& labels,
                  double lambda, const std::vector<std::string>& feature_names = {},
                  bool normalize_embedding = false);

// Text format, header "UQKIT-MODEL v1", 17 significant digits.
void save_model(const FusionModel& model, const std::string& path);
FusionModel load_model(const std::string& path);

}  // namespace uqkit::fusion
