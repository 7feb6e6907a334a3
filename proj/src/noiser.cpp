#include "uqkit/noiser.hpp"

#include <algorithm>

#include "uqkit/rng.hpp"

namespace uqkit::noiser {

namespace {

constexpr std::uint64_t kStreamPeBase = 4000000;
constexpr std::uint64_t kRoundStride = 1 << 20;
constexpr std::uint64_t kInsertOffset = 1 << 19;

}  // namespace

void NoiseConfig::validate() const {
    if (rounds < 1) throw UsageError("noise rounds must be >= 1");
    if (p_delete < 0.0 || p_delete > 1.0) throw UsageError("p_delete must be in [0,1]");
    if (p_insert < 0.0 || p_insert > 1.0) throw UsageError("p_insert must be in [0,1]");
    if (n_variants < 1) throw UsageError("n_variants must be >= 1");
}

std::vector<Tokens> mask_each_position(const Tokens& x) {
    if (x.empty()) throw DataError("mask_each_position: empty input");
    std::vector<Tokens> out;
    out.reserve(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        Tokens variant = x;
        variant[t] = kMaskToken;
        out.push_back(std::move(variant));
    }
    return out;
}

Tokens pe_noise(const Tokens& x, const NoiseConfig& cfg, const std::string& record_id,
                int variant_index) {
    if (x.empty()) throw DataError("pe_noise: empty input");
    cfg.validate();
    const auto key = rng::make_key(cfg.seed, record_id,
                                   kStreamPeBase + static_cast<std::uint64_t>(variant_index));
    Tokens cur = x;
    for (int r = 0; r < cfg.rounds; ++r) {
        const std::uint64_t base = static_cast<std::uint64_t>(r) * kRoundStride;
        // Delete pass.
        Tokens kept;
        kept.reserve(cur.size());
        for (std::size_t i = 0; i < cur.size(); ++i)
            if (rng::uniform(key, base + i) >= cfg.p_delete) kept.push_back(std::move(cur[i]));
        // Insert pass: one slot before each token and one after the last.
        Tokens next;
        next.reserve(kept.size() + 4);
        for (std::size_t gap = 0; gap <= kept.size(); ++gap) {
            if (rng::uniform(key, base + kInsertOffset + gap) < cfg.p_insert)
                next.push_back(kMaskToken);
            if (gap < kept.size()) next.push_back(std::move(kept[gap]));
        }
        cur = std::move(next);
    }
    return cur;
}

namespace {

// Substitutes predictions into the mask slots; residual masks are removed.
Tokens substitute(const Tokens& masked, const MaskPrediction& pred) {
    Tokens out;
    out.reserve(masked.size());
    std::size_t next_pred = 0;
    for (std::size_t i = 0; i < masked.size(); ++i) {
        if (masked[i] != kMaskToken) {
            out.push_back(masked[i]);
            continue;
        }
        while (next_pred < pred.positions.size() &&
               pred.positions[next_pred].index < static_cast<int>(i))
            ++next_pred;
        if (next_pred < pred.positions.size() &&
            pred.positions[next_pred].index == static_cast<int>(i)) {
            out.push_back(pred.positions[next_pred].predicted);
            ++next_pred;
        }
        // else: refused slot, dropped
    }
    return out;
}

}  // namespace

NoisedInputs make_noised_inputs(const Tokens& x, const NoiseConfig& cfg,
                                backend::ModelBackend& model, MaskVariant variant,
                                const std::optional<Tokens>& y, const std::string& record_id) {
    const bool wants_y = variant == MaskVariant::SimpleY || variant == MaskVariant::PeY;
    if (wants_y && !y) throw DataError("variant " + std::string(mask_variant_name(variant)) +
                                       " requires the machine translation y");
    if (!model.supports(backend::Capability::FillMasks))
        throw Error("unsupported capability: fill_masks");
    const std::optional<Tokens> constraint = wants_y ? y : std::nullopt;

    NoisedInputs out;
    MaskPrediction merged;
    merged.record_id = record_id;
    merged.variant = variant;

    const bool simple = variant == MaskVariant::Simple || variant == MaskVariant::SimpleY;
    std::vector<Tokens> masked_list;
    if (simple) {
        masked_list = mask_each_position(x);
    } else {
        cfg.validate();
        for (int vi = 0; vi < cfg.n_variants; ++vi)
            masked_list.push_back(pe_noise(x, cfg, record_id, vi));
    }

    for (const auto& masked : masked_list) {
        const bool has_mask =
            std::find(masked.begin(), masked.end(), kMaskToken) != masked.end();
        if (!has_mask) {
            out.noised_sources.push_back(masked);
            continue;
        }
        const std::optional<Tokens> originals = simple ? std::optional<Tokens>(x) : std::nullopt;
        auto pred = model.fill_masks(record_id, variant, masked, originals, constraint);
        out.noised_sources.push_back(substitute(masked, pred));
        for (auto& p : pred.positions) merged.positions.push_back(std::move(p));
    }
    if (!merged.positions.empty()) {
        if (simple)
            std::sort(merged.positions.begin(), merged.positions.end(),
                      [](const MaskPosition& a, const MaskPosition& b) { return a.index < b.index; });
        out.predictions = std::move(merged);
    }
    return out;
}

}  // namespace uqkit::noiser
