#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uqkit/backend.hpp"
#include "uqkit/corpus_index.hpp"
#include "uqkit/noiser.hpp"
#include "uqkit/records.hpp"
#include "uqkit/stats.hpp"
#include "uqkit/types.hpp"

namespace uqkit::features {

// Named features in canonical order plus the guard flags that fired.
struct FeatureVector {
    std::vector<std::pair<std::string, double>> values;
    std::set<std::string> degeneracy_flags;

    double at(const std::string& name) const;
    records::NamedRow named_row() const { return values; }
};

// The feature catalog: 24 families (the paper's Table-1 rows), expanding
// to 81 components with the default N and K lists.
struct Catalog {
    std::vector<int> ngram_ns = {1, 2, 3, 4, 5};
    std::vector<int> neighbor_ks = {1, 3, 5, 10, 30};

    static const std::vector<std::string>& families();  // 24 names, canonical order
    std::vector<std::string> family_components(const std::string& family) const;
    std::vector<std::string> all_components() const;
};

struct FeatureGroupSelection {
    // Subset of Catalog::families(), kept in canonical order.
    std::vector<std::string> families;

    static FeatureGroupSelection all();
    // Accepts "all", roman group names ("I", "IV"), family names
    // ("II.MC-Sim"), comma-separated.
    static FeatureGroupSelection parse(const std::string& spec);
    bool has(const std::string& family) const;
    bool needs_group(char roman_group) const;  // '1'..'5' as 'I'..'V' index
};

// Per-record model outputs the group extractors consume.
struct FeatureInputs {
    std::optional<SampleSet> mc;
    std::map<MaskVariant, SampleSet> noise;
    std::map<MaskVariant, MaskPrediction> masks;
};

struct ExtractionContext {
    backend::ModelBackend* model = nullptr;
    const corpus::CorpusIndex* index = nullptr;
    int mc_samples = 30;
    noiser::NoiseConfig noise;
    Catalog catalog;
};

// --- Group extractors --------------------------------------------------------

void group1(const QERecord& record, FeatureVector& out);
void group2(const QERecord& record, const SampleSet& mc, FeatureVector& out);
void group3(const QERecord& record, const corpus::CorpusIndex& index, const Catalog& catalog,
            const FeatureGroupSelection& selection, FeatureVector& out);
void group4(const QERecord& record, const std::map<MaskVariant, SampleSet>& noise,
            const FeatureGroupSelection& selection, FeatureVector& out);
void group5(const QERecord& record, const std::map<MaskVariant, MaskPrediction>& masks,
            const FeatureGroupSelection& selection, FeatureVector& out);

// --- Pipeline ----------------------------------------------------------------

// Gathers the model outputs the selection needs: stored artifacts when the
// backend carries them, generated otherwise.
FeatureInputs prepare_inputs(const QERecord& record, const ExtractionContext& ctx,
                             const FeatureGroupSelection& selection);

FeatureVector extract_from_inputs(const QERecord& record, const FeatureInputs& inputs,
                                  const ExtractionContext& ctx,
                                  const FeatureGroupSelection& selection);

FeatureVector extract(const QERecord& record, const ExtractionContext& ctx,
                      const FeatureGroupSelection& selection);

}  // namespace uqkit::features
