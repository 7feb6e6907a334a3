#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "uqkit/types.hpp"

namespace uqkit::backend {

enum class Capability { Translate, McSample, ForceDecode, FillMasks };

const char* capability_name(Capability c);

struct Translation {
    Tokens tokens;
    std::vector<double> step_logprobs;
};

// Every interaction with an NMT system or masked LM goes through this
// interface. Operations outside the declared capability set throw.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;

    virtual std::set<Capability> capabilities() const = 0;
    bool supports(Capability c) const { return capabilities().count(c) > 0; }

    virtual Translation translate(const std::string& record_id, const Tokens& x);
    virtual SampleSet mc_sample(const std::string& record_id, const Tokens& x, int m);
    virtual std::vector<double> force_decode(const std::string& record_id, const Tokens& x,
                                             const Tokens& y);
    // `originals`, when given, is the unmasked sequence aligned with
    // x_masked; forced log-probs are emitted only then (simple variants).
    virtual MaskPrediction fill_masks(const std::string& record_id, MaskVariant variant,
                                      const Tokens& x_masked,
                                      const std::optional<Tokens>& originals,
                                      const std::optional<Tokens>& constraint_y);

    // Precomputed artifacts, when the backend carries them (file backend).
    virtual std::optional<SampleSet> stored_samples(const std::string& record_id,
                                                    SampleKind kind) const;
    virtual std::optional<MaskPrediction> stored_masks(const std::string& record_id,
                                                       MaskVariant variant) const;
};

// Deterministic desk-scale stand-in for the NMT/MLM pair. A source token
// "s<i>" ciphers to target token "t<i>"; per-record difficulty delta sets
// the corruption rate of an explicitly normalized categorical:
// P(correct) = 1-delta, P(each wrong) = delta/(V-1).
struct SyntheticConfig {
    int vocab_size = 64;
    std::uint64_t seed = 0;
    double mlm_noise = 0.1;       // delta_mlm
    double dropout_jitter = 0.05; // sigma_j, uniform jitter on delta per MC sample
    int min_len = 5;
    int max_len = 20;
    double max_difficulty = 0.5;
    int embedding_dim = 16;
    double embedding_noise = 0.5; // amplitude of the weak-signal embedding dim
};

class SyntheticBackend : public ModelBackend {
public:
    explicit SyntheticBackend(SyntheticConfig cfg);

    std::set<Capability> capabilities() const override;
    Translation translate(const std::string& record_id, const Tokens& x) override;
    SampleSet mc_sample(const std::string& record_id, const Tokens& x, int m) override;
    std::vector<double> force_decode(const std::string& record_id, const Tokens& x,
                                     const Tokens& y) override;
    MaskPrediction fill_masks(const std::string& record_id, MaskVariant variant,
                              const Tokens& x_masked, const std::optional<Tokens>& originals,
                              const std::optional<Tokens>& constraint_y) override;
    std::optional<SampleSet> stored_samples(const std::string&, SampleKind) const override {
        return std::nullopt;
    }
    std::optional<MaskPrediction> stored_masks(const std::string&, MaskVariant) const override {
        return std::nullopt;
    }

    // Fully generated QE instance: source, greedy translation with step
    // log-probs, gold = token accuracy against the cipher, embedding.
    QERecord make_record(const std::string& record_id) const;

    double difficulty(const std::string& record_id) const;
    std::string source_token(int i) const;
    std::string target_token(int i) const;
    Tokens cipher(const Tokens& x) const;

    const SyntheticConfig& config() const { return cfg_; }

private:
    Translation translate_with_difficulty(const std::string& record_id, const Tokens& x,
                                          double delta, std::uint64_t stream) const;

    SyntheticConfig cfg_;
};

// Answers queries by record-id lookup in files produced offline.
class FileBackend : public ModelBackend {
public:
    struct Paths {
        std::optional<std::string> records;  // translate / force_decode store
        std::optional<std::string> samples;  // SampleSets of any kind
        std::optional<std::string> masks;    // MaskPredictions
    };

    static std::unique_ptr<FileBackend> load(const Paths& paths);

    std::set<Capability> capabilities() const override;
    Translation translate(const std::string& record_id, const Tokens& x) override;
    SampleSet mc_sample(const std::string& record_id, const Tokens& x, int m) override;
    std::vector<double> force_decode(const std::string& record_id, const Tokens& x,
                                     const Tokens& y) override;
    std::optional<SampleSet> stored_samples(const std::string& record_id,
                                            SampleKind kind) const override;
    std::optional<MaskPrediction> stored_masks(const std::string& record_id,
                                               MaskVariant variant) const override;

private:
    std::map<std::string, QERecord> records_;
    std::map<std::pair<std::string, SampleKind>, SampleSet> samples_;
    std::map<std::pair<std::string, MaskVariant>, MaskPrediction> masks_;
};

}  // namespace uqkit::backend
