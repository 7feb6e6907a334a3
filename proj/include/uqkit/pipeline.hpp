#pragma once

#include <memory>
#include <string>
#include <vector>

#include "uqkit/config.hpp"
#include "uqkit/corpus_index.hpp"
#include "uqkit/features.hpp"
#include "uqkit/harness.hpp"

namespace uqkit::pipeline {

inline std::string records_file(const std::string& dir, const std::string& split) {
    return dir + "/" + split + ".records.jsonl";
}
inline std::string samples_file(const std::string& dir, const std::string& split) {
    return dir + "/" + split + ".samples.jsonl";
}
inline std::string masks_file(const std::string& dir, const std::string& split) {
    return dir + "/" + split + ".masks.jsonl";
}
inline std::string corpus_file(const std::string& dir) { return dir + "/corpus.tsv"; }

// Synthetic split generation; record ids are "<split>-<i>".
std::vector<QERecord> make_synthetic_split(const backend::SyntheticBackend& model,
                                           const std::string& split, int n);
std::vector<std::pair<Tokens, Tokens>> make_synthetic_corpus(
    const backend::SyntheticBackend& model, int n);

// Emits records, samples, masks for train/dev/test plus corpus.tsv.
void synth_to_dir(const config::PipelineConfig& cfg, const std::string& out_dir);

// Everything extraction needs, owning the backend and index.
struct Context {
    std::unique_ptr<backend::ModelBackend> model;
    std::unique_ptr<corpus::CorpusIndex> index;
    features::ExtractionContext extraction;
};

// `need_index` selects whether a corpus index is loaded/built.
Context make_context(const config::PipelineConfig& cfg, bool need_index,
                     const std::string& split = "");

std::vector<QERecord> load_split(const config::PipelineConfig& cfg, const std::string& split);

// Extracts `selection` features for every record; stderr progress counter.
harness::Dataset extract_split(const config::PipelineConfig& cfg, const std::string& split,
                               const features::FeatureGroupSelection& selection);

}  // namespace uqkit::pipeline
