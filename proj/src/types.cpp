#include "uqkit/types.hpp"

namespace uqkit {

const char* sample_kind_name(SampleKind kind) {
    switch (kind) {
        case SampleKind::McDropout: return "mc_dropout";
        case SampleKind::NoiseSimple: return "noise_simple";
        case SampleKind::NoiseSimpleY: return "noise_simple_y";
        case SampleKind::NoisePe: return "noise_pe";
        case SampleKind::NoisePeY: return "noise_pe_y";
    }
    throw Error("unreachable sample kind");
}

SampleKind sample_kind_from_name(const std::string& name) {
    if (name == "mc_dropout") return SampleKind::McDropout;
    if (name == "noise_simple") return SampleKind::NoiseSimple;
    if (name == "noise_simple_y") return SampleKind::NoiseSimpleY;
    if (name == "noise_pe") return SampleKind::NoisePe;
    if (name == "noise_pe_y") return SampleKind::NoisePeY;
    throw DataError("unknown sample kind: " + name);
}

const char* mask_variant_name(MaskVariant variant) {
    switch (variant) {
        case MaskVariant::Simple: return "simple";
        case MaskVariant::SimpleY: return "simple_y";
        case MaskVariant::Pe: return "pe";
        case MaskVariant::PeY: return "pe_y";
    }
    throw Error("unreachable mask variant");
}

MaskVariant mask_variant_from_name(const std::string& name) {
    if (name == "simple") return MaskVariant::Simple;
    if (name == "simple_y") return MaskVariant::SimpleY;
    if (name == "pe") return MaskVariant::Pe;
    if (name == "pe_y") return MaskVariant::PeY;
    throw DataError("unknown mask variant: " + name);
}

std::string join_tokens(const Tokens& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace uqkit
