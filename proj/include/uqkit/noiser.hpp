#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uqkit/backend.hpp"
#include "uqkit/types.hpp"

namespace uqkit::noiser {

struct NoiseConfig {
    int rounds = 2;        // R
    double p_delete = 0.15;
    double p_insert = 0.15;
    int n_variants = 4;    // noised inputs per record for the PE variants
    std::uint64_t seed = 0;

    void validate() const;
};

// Variant t equals x with position t replaced by <mask>; exactly |x| outputs.
std::vector<Tokens> mask_each_position(const Tokens& x);

// R rounds of: independent deletion with p_delete, then independent <mask>
// insertion at each gap with p_insert. Deterministic given
// (cfg.seed, record_id, variant_index). Non-mask output tokens are a
// subsequence of x.
Tokens pe_noise(const Tokens& x, const NoiseConfig& cfg, const std::string& record_id,
                int variant_index);

struct NoisedInputs {
    std::vector<Tokens> noised_sources;         // the x-tilde set, mask-free
    std::optional<MaskPrediction> predictions;  // absent when no masks were filled
};

// Builds masked sequences (per-position for the simple variants, pe_noise
// for PE), fills them through the backend (appending y for the *_y
// variants) and substitutes the predictions. Residual masks the backend
// refused are dropped.
NoisedInputs make_noised_inputs(const Tokens& x, const NoiseConfig& cfg,
                                backend::ModelBackend& model, MaskVariant variant,
                                const std::optional<Tokens>& y, const std::string& record_id);

}  // namespace uqkit::noiser
