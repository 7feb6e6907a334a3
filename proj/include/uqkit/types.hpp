#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqkit {

using Tokens = std::vector<std::string>;

// Literal mask token used by the noiser and the MLM backends.
inline constexpr const char* kMaskToken = "<mask>";

// Error taxonomy mirrored by the CLI exit codes: usage -> 1, data -> 2,
// anything else -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UsageError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};

// One (source, machine translation) pair. step_logprobs are natural-log
// per-token decoder probabilities; gold_score is the DA z-score analog.
struct QERecord {
    std::string id;
    std::string src_text;
    std::string mt_text;
    Tokens src_tokens;
    Tokens mt_tokens;
    std::optional<std::vector<double>> step_logprobs;
    std::optional<double> gold_score;
    std::optional<std::vector<double>> embedding;
    // Unknown JSON keys, preserved verbatim for round-trips.
    std::vector<std::pair<std::string, std::string>> extra;
};

enum class SampleKind { McDropout, NoiseSimple, NoiseSimpleY, NoisePe, NoisePeY };

enum class MaskVariant { Simple, SimpleY, Pe, PeY };

struct Sample {
    Tokens hyp_tokens;
    std::optional<std::vector<double>> step_logprobs;
    std::optional<Tokens> noised_src_tokens;
};

struct SampleSet {
    std::string record_id;
    SampleKind kind = SampleKind::McDropout;
    std::vector<Sample> samples;
};

struct MaskPosition {
    int index = 0;
    std::string predicted;
    double pred_logprob = 0.0;
    // Log-probability of the original token; defined only for the
    // simple masking variants.
    std::optional<double> forced_logprob;
};

struct MaskPrediction {
    std::string record_id;
    MaskVariant variant = MaskVariant::Simple;
    std::vector<MaskPosition> positions;
};

const char* sample_kind_name(SampleKind kind);
SampleKind sample_kind_from_name(const std::string& name);
const char* mask_variant_name(MaskVariant variant);
MaskVariant mask_variant_from_name(const std::string& name);

inline SampleKind sample_kind_for_variant(MaskVariant v) {
    switch (v) {
        case MaskVariant::Simple: return SampleKind::NoiseSimple;
        case MaskVariant::SimpleY: return SampleKind::NoiseSimpleY;
        case MaskVariant::Pe: return SampleKind::NoisePe;
        case MaskVariant::PeY: return SampleKind::NoisePeY;
    }
    throw Error("unreachable mask variant");
}

std::string join_tokens(const Tokens& tokens);

}  // namespace uqkit
