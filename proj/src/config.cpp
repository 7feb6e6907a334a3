#include "uqkit/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace uqkit::config {

namespace {

struct KeyBinding {
    KeyInfo info;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const std::string&)> set;
};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw UsageError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(static_cast<int>(parse_int(key, item)));
    if (out.empty()) throw UsageError("config key '" + key + "': empty list");
    return out;
}

std::string fmt_int_list(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

#define STR_KEY(name, desc) \
    {{#name, desc, PipelineConfig{}.name}, \
     [](const PipelineConfig& c) { return c.name; }, \
     [](PipelineConfig& c, const std::string& v) { c.name = v; }}
#define INT_KEY(name, desc) \
    {{#name, desc, std::to_string(PipelineConfig{}.name)}, \
     [](const PipelineConfig& c) { return std::to_string(c.name); }, \
     [](PipelineConfig& c, const std::string& v) { c.name = static_cast<int>(parse_int(#name, v)); }}
#define DBL_KEY(name, desc) \
    {{#name, desc, fmt_double(PipelineConfig{}.name)}, \
     [](const PipelineConfig& c) { return fmt_double(c.name); }, \
     [](PipelineConfig& c, const std::string& v) { c.name = parse_double(#name, v); }}

const std::vector<KeyBinding>& bindings() {
    static const std::vector<KeyBinding> b = {
        STR_KEY(backend, "model backend: synthetic | file"),
        {{"seed", "master seed for all randomness", "0"},
         [](const PipelineConfig& c) { return std::to_string(c.seed); },
         [](PipelineConfig& c, const std::string& v) {
             c.seed = static_cast<std::uint64_t>(parse_int("seed", v));
         }},
        STR_KEY(data_dir, "directory holding split files"),
        STR_KEY(out_dir, "output directory for artifacts"),
        STR_KEY(corpus_path, "parallel corpus TSV (src<TAB>tgt)"),
        STR_KEY(index_path, "corpus index snapshot file"),
        STR_KEY(records_path, "file-backend records JSONL"),
        STR_KEY(samples_path, "file-backend samples JSONL"),
        STR_KEY(masks_path, "file-backend mask predictions JSONL"),
        INT_KEY(vocab_size, "synthetic vocabulary size"),
        DBL_KEY(mlm_noise, "synthetic MLM noise delta_mlm"),
        DBL_KEY(dropout_jitter, "synthetic MC difficulty jitter"),
        DBL_KEY(max_difficulty, "synthetic max per-record difficulty"),
        INT_KEY(min_len, "synthetic min source length"),
        INT_KEY(max_len, "synthetic max source length"),
        INT_KEY(embedding_dim, "synthetic embedding dimension"),
        DBL_KEY(embedding_noise, "noise amplitude of the weak embedding signal"),
        INT_KEY(mc_samples, "MC dropout sample count"),
        INT_KEY(noise_rounds, "post-editing noise rounds R"),
        DBL_KEY(p_d, "per-token deletion probability"),
        DBL_KEY(p_i, "per-slot mask insertion probability"),
        INT_KEY(n_variants, "noised inputs per record for PE variants"),
        {{"neighbor_k", "K list for DS-neighbors", fmt_int_list(PipelineConfig{}.neighbor_k)},
         [](const PipelineConfig& c) { return fmt_int_list(c.neighbor_k); },
         [](PipelineConfig& c, const std::string& v) {
             c.neighbor_k = parse_int_list("neighbor_k", v);
         }},
        {{"ngram_n", "N list for DS-gram", fmt_int_list(PipelineConfig{}.ngram_n)},
         [](const PipelineConfig& c) { return fmt_int_list(c.ngram_n); },
         [](PipelineConfig& c, const std::string& v) {
             c.ngram_n = parse_int_list("ngram_n", v);
         }},
        DBL_KEY(ridge_lambda, "ridge regularization strength"),
        {{"normalize_embedding", "also z-normalize embedding dims", "false"},
         [](const PipelineConfig& c) { return c.normalize_embedding ? "true" : "false"; },
         [](PipelineConfig& c, const std::string& v) {
             c.normalize_embedding = parse_bool("normalize_embedding", v);
         }},
        STR_KEY(groups, "feature selection (all, I..V, or family names)"),
        INT_KEY(n_train, "synthetic train split size"),
        INT_KEY(n_dev, "synthetic dev split size"),
        INT_KEY(n_test, "synthetic test split size"),
        INT_KEY(n_corpus, "synthetic parallel corpus size"),
        {{"tsv_id_col", "MLQE TSV id column name", records::MlqeColumns{}.id},
         [](const PipelineConfig& c) { return c.tsv.id; },
         [](PipelineConfig& c, const std::string& v) { c.tsv.id = v; }},
        {{"tsv_src_col", "MLQE TSV source column name", records::MlqeColumns{}.src},
         [](const PipelineConfig& c) { return c.tsv.src; },
         [](PipelineConfig& c, const std::string& v) { c.tsv.src = v; }},
        {{"tsv_mt_col", "MLQE TSV translation column name", records::MlqeColumns{}.mt},
         [](const PipelineConfig& c) { return c.tsv.mt; },
         [](PipelineConfig& c, const std::string& v) { c.tsv.mt = v; }},
        {{"tsv_score_col", "MLQE TSV score column name", records::MlqeColumns{}.score},
         [](const PipelineConfig& c) { return c.tsv.score; },
         [](PipelineConfig& c, const std::string& v) { c.tsv.score = v; }},
    };
    return b;
}

#undef STR_KEY
#undef INT_KEY
#undef DBL_KEY

const KeyBinding& find_binding(const std::string& key) {
    for (const auto& b : bindings())
        if (b.info.name == key) return b;
    throw UsageError("unknown config key: " + key);
}

void check_range(bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
}

}  // namespace

const std::vector<KeyInfo>& keys() {
    static const std::vector<KeyInfo> k = [] {
        std::vector<KeyInfo> out;
        for (const auto& b : bindings()) out.push_back(b.info);
        return out;
    }();
    return k;
}

std::string get_key(const PipelineConfig& cfg, const std::string& key) {
    return find_binding(key).get(cfg);
}

void set_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    find_binding(key).set(cfg, value);
}

backend::SyntheticConfig PipelineConfig::synthetic_config() const {
    backend::SyntheticConfig s;
    s.vocab_size = vocab_size;
    s.seed = seed;
    s.mlm_noise = mlm_noise;
    s.dropout_jitter = dropout_jitter;
    s.min_len = min_len;
    s.max_len = max_len;
    s.max_difficulty = max_difficulty;
    s.embedding_dim = embedding_dim;
    s.embedding_noise = embedding_noise;
    return s;
}

noiser::NoiseConfig PipelineConfig::noise_config() const {
    noiser::NoiseConfig n;
    n.rounds = noise_rounds;
    n.p_delete = p_d;
    n.p_insert = p_i;
    n.n_variants = n_variants;
    n.seed = seed;
    return n;
}

void PipelineConfig::validate() const {
    check_range(backend == "synthetic" || backend == "file",
                "backend must be 'synthetic' or 'file', got '" + backend + "'");
    check_range(vocab_size >= 2, "vocab_size must be >= 2");
    check_range(mlm_noise >= 0.0 && mlm_noise < 1.0, "mlm_noise must be in [0,1)");
    check_range(dropout_jitter >= 0.0 && dropout_jitter <= 1.0,
                "dropout_jitter must be in [0,1]");
    check_range(max_difficulty > 0.0 && max_difficulty <= 0.9,
                "max_difficulty must be in (0,0.9]");
    check_range(min_len >= 1 && max_len >= min_len, "invalid min_len/max_len range");
    check_range(embedding_dim >= 2, "embedding_dim must be >= 2");
    check_range(embedding_noise >= 0.0, "embedding_noise must be >= 0");
    check_range(mc_samples >= 2, "mc_samples must be >= 2");
    check_range(noise_rounds >= 1, "noise_rounds must be >= 1");
    check_range(p_d >= 0.0 && p_d <= 1.0, "p_d must be in [0,1]");
    check_range(p_i >= 0.0 && p_i <= 1.0, "p_i must be in [0,1]");
    check_range(n_variants >= 1, "n_variants must be >= 1");
    check_range(ridge_lambda >= 0.0, "ridge_lambda must be >= 0");
    check_range(n_train >= 0 && n_dev >= 0 && n_test >= 0, "split sizes must be >= 0");
    check_range(n_corpus >= 1, "n_corpus must be >= 1");
    check_range(!neighbor_k.empty(), "neighbor_k must be non-empty");
    for (std::size_t i = 0; i < neighbor_k.size(); ++i) {
        check_range(neighbor_k[i] >= 1, "neighbor_k entries must be >= 1");
        if (i) check_range(neighbor_k[i] > neighbor_k[i - 1], "neighbor_k must be ascending");
    }
    check_range(!ngram_n.empty(), "ngram_n must be non-empty");
    for (int n : ngram_n) check_range(n >= 1 && n <= 5, "ngram_n entries must be in 1..5");

    for (const std::string* p : {&corpus_path, &index_path, &records_path, &samples_path,
                                 &masks_path, &data_dir}) {
        if (!p->empty() && !std::filesystem::exists(*p))
            throw UsageError("configured path does not exist: " + *p);
    }
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        set_key(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open config file for writing: " + path);
    for (const auto& b : bindings())
        out << b.info.name << " = " << b.get(cfg) << '\n';
}

}  // namespace uqkit::config
