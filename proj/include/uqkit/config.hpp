#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uqkit/backend.hpp"
#include "uqkit/noiser.hpp"
#include "uqkit/records.hpp"

namespace uqkit::config {

// One declarative configuration for a pipeline run. Flat `key = value`
// file; every key is mirrored by a CLI flag of the same name.
struct PipelineConfig {
    std::string backend = "synthetic";  // synthetic | file
    std::uint64_t seed = 0;

    std::string data_dir;     // split files live here ({split}.records.jsonl, ...)
    std::string out_dir = "out";
    std::string corpus_path;  // parallel corpus TSV
    std::string index_path;   // corpus index snapshot
    std::string records_path; // explicit file-backend overrides
    std::string samples_path;
    std::string masks_path;

    // Synthetic world.
    int vocab_size = 64;
    double mlm_noise = 0.1;
    double dropout_jitter = 0.05;
    double max_difficulty = 0.5;
    int min_len = 5;
    int max_len = 20;
    int embedding_dim = 16;
    double embedding_noise = 0.5;

    int mc_samples = 30;

    // Algorithm-1 noise.
    int noise_rounds = 2;
    double p_d = 0.15;
    double p_i = 0.15;
    int n_variants = 4;

    std::vector<int> neighbor_k = {1, 3, 5, 10, 30};
    std::vector<int> ngram_n = {1, 2, 3, 4, 5};

    double ridge_lambda = 1.0;
    bool normalize_embedding = false;
    std::string groups = "all";

    int n_train = 7000;
    int n_dev = 1000;
    int n_test = 1000;
    int n_corpus = 500;

    records::MlqeColumns tsv;

    backend::SyntheticConfig synthetic_config() const;
    noiser::NoiseConfig noise_config() const;

    void validate() const;  // range + path checks
};

struct KeyInfo {
    std::string name;
    std::string description;
    std::string default_value;
};

const std::vector<KeyInfo>& keys();
std::string get_key(const PipelineConfig& cfg, const std::string& key);
void set_key(PipelineConfig& cfg, const std::string& key, const std::string& value);

PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& cfg, const std::string& path);

}  // namespace uqkit::config
