#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uqkit/types.hpp"

namespace uqkit::records {

// --- JSON Lines record files -------------------------------------------------

std::vector<QERecord> read_jsonl_records(const std::string& path);
// Canonical form: fixed key order, token arrays always materialized,
// unknown keys preserved after the known ones.
void write_jsonl_records(const std::vector<QERecord>& records, const std::string& path);
std::string record_to_json_line(const QERecord& record);
QERecord record_from_json_line(const std::string& line);

// --- Sample / mask-prediction files -----------------------------------------

std::vector<SampleSet> read_jsonl_samples(const std::string& path);
void write_jsonl_samples(const std::vector<SampleSet>& sets, const std::string& path);

std::vector<MaskPrediction> read_jsonl_masks(const std::string& path);
void write_jsonl_masks(const std::vector<MaskPrediction>& preds, const std::string& path);

// --- WMT 2020 MLQE TSV adapter ----------------------------------------------

struct MlqeColumns {
    std::string id = "index";
    std::string src = "original";
    std::string mt = "translation";
    std::string score = "z_mean";
};

std::vector<QERecord> read_mlqe_tsv(const std::string& path, const MlqeColumns& cols = {});

// --- Feature tables (CSV) ----------------------------------------------------

struct FeatureTable {
    std::vector<std::string> names;  // without the leading "id" column
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
};

using NamedRow = std::vector<std::pair<std::string, double>>;

// Header "id,<names...>", one row per record, 9 significant digits.
// All rows must share the same feature-name sequence.
void write_feature_table(const std::vector<std::pair<std::string, NamedRow>>& rows,
                         const std::string& path);
void write_feature_table(const FeatureTable& table, const std::string& path);
FeatureTable read_feature_table(const std::string& path);

// --- Parallel corpus --------------------------------------------------------

// Tab-separated "src<TAB>tgt" lines, tokenized with text::tokenize.
std::vector<std::pair<Tokens, Tokens>> read_parallel_corpus(const std::string& path);
void write_parallel_corpus(const std::vector<std::pair<Tokens, Tokens>>& corpus,
                           const std::string& path);

}  // namespace uqkit::records
