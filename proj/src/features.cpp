#include "uqkit/features.hpp"

#include <algorithm>

#include "uqkit/textmetrics.hpp"

namespace uqkit::features {

namespace {

const char* variant_suffix(MaskVariant v) {
    switch (v) {
        case MaskVariant::Simple: return "Simple";
        case MaskVariant::SimpleY: return "Simple-y";
        case MaskVariant::Pe: return "PE";
        case MaskVariant::PeY: return "PE-y";
    }
    throw Error("unreachable mask variant");
}

constexpr MaskVariant kVariants[] = {MaskVariant::Simple, MaskVariant::SimpleY, MaskVariant::Pe,
                                     MaskVariant::PeY};

void push_triple(FeatureVector& out, const std::string& base, const stats::TripleStat& t) {
    out.values.emplace_back(base + ".E", t.mean);
    out.values.emplace_back(base + ".Std", t.std);
    out.values.emplace_back(base + ".Combo", t.combo);
    if (t.degenerate) out.degeneracy_flags.insert(base + ".Combo");
}

void push_zero_triple(FeatureVector& out, const std::string& base) {
    for (const char* s : {".E", ".Std", ".Combo"}) {
        out.values.emplace_back(base + s, 0.0);
        out.degeneracy_flags.insert(base + s);
    }
}

// Per-sample mean step log-prob; samples without log-probs are skipped.
std::vector<double> sample_mean_logprobs(const SampleSet& set) {
    std::vector<double> means;
    for (const auto& s : set.samples) {
        if (!s.step_logprobs || s.step_logprobs->empty()) continue;
        double sum = 0.0;
        for (double lp : *s.step_logprobs) sum += lp;
        means.push_back(sum / static_cast<double>(s.step_logprobs->size()));
    }
    return means;
}

}  // namespace

double FeatureVector::at(const std::string& name) const {
    for (const auto& [n, v] : values)
        if (n == name) return v;
    throw DataError("feature not present: " + name);
}

const std::vector<std::string>& Catalog::families() {
    static const std::vector<std::string> fams = [] {
        std::vector<std::string> f;
        f.push_back("I.Psteps");
        f.push_back("II.MC-Sim");
        f.push_back("II.MC-Sim-Inner");
        f.push_back("II.MC-Psteps");
        f.push_back("III.DS-gram");
        f.push_back("III.DS-neighbors");
        for (const char* feat : {"Noise-Sim", "Noise-Sim-Inner", "Noise-Psteps"})
            for (auto v : kVariants)
                f.push_back(std::string("IV.") + feat + "-" + variant_suffix(v));
        for (auto v : kVariants) f.push_back(std::string("V.MLM-Pmask-") + variant_suffix(v));
        f.push_back("V.MLM-FPmask");
        f.push_back("V.MLM-FPmask-y");
        return f;
    }();
    return fams;
}

std::vector<std::string> Catalog::family_components(const std::string& family) const {
    std::vector<std::string> out;
    if (family == "III.DS-gram") {
        for (int n : ngram_ns) out.push_back(family + ".N" + std::to_string(n));
    } else if (family == "III.DS-neighbors") {
        for (const char* side : {"x", "y"})
            for (int k : neighbor_ks)
                out.push_back(family + "-" + side + ".K" + std::to_string(k));
    } else {
        for (const char* s : {".E", ".Std", ".Combo"}) out.push_back(family + s);
    }
    return out;
}

std::vector<std::string> Catalog::all_components() const {
    std::vector<std::string> out;
    for (const auto& fam : families())
        for (auto& c : family_components(fam)) out.push_back(std::move(c));
    return out;
}

FeatureGroupSelection FeatureGroupSelection::all() {
    FeatureGroupSelection s;
    s.families = Catalog::families();
    return s;
}

FeatureGroupSelection FeatureGroupSelection::parse(const std::string& spec) {
    std::set<std::string> chosen;
    std::string token;
    std::vector<std::string> parts;
    for (char c : spec + ",") {
        if (c == ',') {
            if (!token.empty()) parts.push_back(token);
            token.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            token += c;
        }
    }
    const auto& fams = Catalog::families();
    for (const auto& part : parts) {
        if (part == "all") {
            for (const auto& f : fams) chosen.insert(f);
            continue;
        }
        bool matched = false;
        for (const auto& f : fams) {
            if (f == part || f.rfind(part + ".", 0) == 0) {
                chosen.insert(f);
                matched = true;
            }
        }
        if (!matched) throw UsageError("unknown feature group or family: " + part);
    }
    if (chosen.empty()) throw UsageError("empty feature selection: " + spec);
    FeatureGroupSelection s;
    for (const auto& f : fams)
        if (chosen.count(f)) s.families.push_back(f);
    return s;
}

bool FeatureGroupSelection::has(const std::string& family) const {
    return std::find(families.begin(), families.end(), family) != families.end();
}

bool FeatureGroupSelection::needs_group(char roman_group) const {
    static const std::map<char, std::string> prefix = {
        {'1', "I."}, {'2', "II."}, {'3', "III."}, {'4', "IV."}, {'5', "V."}};
    const auto& p = prefix.at(roman_group);
    for (const auto& f : families)
        if (f.rfind(p, 0) == 0) return true;
    return false;
}

// --- Group extractors --------------------------------------------------------

void group1(const QERecord& record, FeatureVector& out) {
    if (!record.step_logprobs || record.step_logprobs->empty())
        throw DataError("group I requires decoder log-probs");
    push_triple(out, "I.Psteps", stats::triple_stat(*record.step_logprobs));
}

void group2(const QERecord& record, const SampleSet& mc, FeatureVector& out) {
    if (mc.samples.size() < 2) throw DataError("group II requires at least 2 MC samples");
    std::vector<double> sims;
    std::vector<Tokens> hyps;
    for (const auto& s : mc.samples) {
        sims.push_back(text::sim(record.mt_tokens, s.hyp_tokens));
        hyps.push_back(s.hyp_tokens);
    }
    push_triple(out, "II.MC-Sim", stats::triple_stat(sims));
    push_triple(out, "II.MC-Sim-Inner", stats::triple_stat(text::pairwise_sims(hyps)));
    const auto means = sample_mean_logprobs(mc);
    if (means.size() < 2) throw DataError("group II requires per-sample step log-probs");
    push_triple(out, "II.MC-Psteps", stats::triple_stat(means));
}

void group3(const QERecord& record, const corpus::CorpusIndex& index, const Catalog& catalog,
            const FeatureGroupSelection&, FeatureVector& out) {
    for (int n : catalog.ngram_ns) {
        const auto g = index.ds_gram(record.src_tokens, n);
        const std::string name = "III.DS-gram.N" + std::to_string(n);
        out.values.emplace_back(name, g.value);
        if (g.degenerate) out.degeneracy_flags.insert(name);
    }
    for (const char* side : {"x", "y"}) {
        const bool is_src = side[0] == 'x';
        const Tokens& q = is_src ? record.src_tokens : record.mt_tokens;
        for (int k : catalog.neighbor_ks) {
            const auto nb =
                index.ds_neighbors(q, k, is_src ? corpus::Side::Src : corpus::Side::Tgt);
            const std::string name =
                std::string("III.DS-neighbors-") + side + ".K" + std::to_string(k);
            out.values.emplace_back(name, nb.value);
            if (nb.truncated) out.degeneracy_flags.insert(name);
        }
    }
}

void group4(const QERecord& record, const std::map<MaskVariant, SampleSet>& noise,
            const FeatureGroupSelection&, FeatureVector& out) {
    // Canonical order is feature-major: Noise-Sim over all variants, then
    // Inner, then Psteps.
    for (int feat = 0; feat < 3; ++feat) {
        for (auto v : kVariants) {
            const std::string base = std::string("IV.") +
                                     (feat == 0   ? "Noise-Sim"
                                      : feat == 1 ? "Noise-Sim-Inner"
                                                  : "Noise-Psteps") +
                                     "-" + variant_suffix(v);
            auto it = noise.find(v);
            if (it == noise.end() || it->second.samples.empty()) {
                push_zero_triple(out, base);
                continue;
            }
            const auto& set = it->second;
            if (feat == 0) {
                std::vector<double> sims;
                for (const auto& s : set.samples)
                    sims.push_back(text::sim(record.mt_tokens, s.hyp_tokens));
                push_triple(out, base, stats::triple_stat(sims));
            } else if (feat == 1) {
                if (set.samples.size() < 2) {
                    push_zero_triple(out, base);
                    continue;
                }
                std::vector<Tokens> hyps;
                for (const auto& s : set.samples) hyps.push_back(s.hyp_tokens);
                push_triple(out, base, stats::triple_stat(text::pairwise_sims(hyps)));
            } else {
                const auto means = sample_mean_logprobs(set);
                if (means.empty()) {
                    push_zero_triple(out, base);
                    continue;
                }
                push_triple(out, base, stats::triple_stat(means));
            }
        }
    }
}

void group5(const QERecord&, const std::map<MaskVariant, MaskPrediction>& masks,
            const FeatureGroupSelection&, FeatureVector& out) {
    for (auto v : kVariants) {
        const std::string base = std::string("V.MLM-Pmask-") + variant_suffix(v);
        auto it = masks.find(v);
        if (it == masks.end() || it->second.positions.empty()) {
            push_zero_triple(out, base);
            continue;
        }
        std::vector<double> lps;
        for (const auto& p : it->second.positions) lps.push_back(p.pred_logprob);
        push_triple(out, base, stats::triple_stat(lps));
    }
    for (auto v : {MaskVariant::Simple, MaskVariant::SimpleY}) {
        const std::string base =
            v == MaskVariant::Simple ? "V.MLM-FPmask" : "V.MLM-FPmask-y";
        auto it = masks.find(v);
        std::vector<double> lps;
        if (it != masks.end())
            for (const auto& p : it->second.positions)
                if (p.forced_logprob) lps.push_back(*p.forced_logprob);
        if (lps.empty()) {
            push_zero_triple(out, base);
            continue;
        }
        push_triple(out, base, stats::triple_stat(lps));
    }
}

// --- Pipeline ----------------------------------------------------------------

namespace {

bool variant_needed_for_group4(const FeatureGroupSelection& sel, MaskVariant v) {
    for (const char* feat : {"Noise-Sim", "Noise-Sim-Inner", "Noise-Psteps"})
        if (sel.has(std::string("IV.") + feat + "-" + variant_suffix(v))) return true;
    return false;
}

bool variant_needed_for_group5(const FeatureGroupSelection& sel, MaskVariant v) {
    if (sel.has(std::string("V.MLM-Pmask-") + variant_suffix(v))) return true;
    if (v == MaskVariant::Simple && sel.has("V.MLM-FPmask")) return true;
    if (v == MaskVariant::SimpleY && sel.has("V.MLM-FPmask-y")) return true;
    return false;
}

}  // namespace

FeatureInputs prepare_inputs(const QERecord& record, const ExtractionContext& ctx,
                             const FeatureGroupSelection& selection) {
    FeatureInputs inputs;
    if (selection.needs_group('2')) {
        if (!ctx.model) throw DataError("group II: no model backend in context");
        if (auto stored = ctx.model->stored_samples(record.id, SampleKind::McDropout)) {
            inputs.mc = std::move(stored);
        } else {
            inputs.mc = ctx.model->mc_sample(record.id, record.src_tokens, ctx.mc_samples);
        }
    }
    for (auto v : kVariants) {
        const bool for4 = selection.needs_group('4') && variant_needed_for_group4(selection, v);
        const bool for5 = selection.needs_group('5') && variant_needed_for_group5(selection, v);
        if (!for4 && !for5) continue;
        if (!ctx.model) throw DataError("groups IV/V: no model backend in context");

        auto stored_set = ctx.model->stored_samples(record.id, sample_kind_for_variant(v));
        auto stored_mask = ctx.model->stored_masks(record.id, v);
        const bool have_stored = (!for4 || stored_set) && (!for5 || stored_mask);
        const bool can_generate = ctx.model->supports(backend::Capability::FillMasks) &&
                                  !record.src_tokens.empty();
        // A stored set without a stored mask is legal (a PE round may
        // produce no masks at all), so fall back to whatever artifacts
        // exist before regenerating; a full miss without FillMasks is
        // flagged downstream.
        if (have_stored || !can_generate) {
            if (stored_set) inputs.noise.emplace(v, std::move(*stored_set));
            if (stored_mask) inputs.masks.emplace(v, std::move(*stored_mask));
            continue;
        }

        auto noised = noiser::make_noised_inputs(record.src_tokens, ctx.noise, *ctx.model, v,
                                                 record.mt_tokens, record.id);
        if (noised.predictions) inputs.masks.emplace(v, std::move(*noised.predictions));
        SampleSet set;
        set.record_id = record.id;
        set.kind = sample_kind_for_variant(v);
        for (const auto& xt : noised.noised_sources) {
            Sample s;
            s.noised_src_tokens = xt;
            if (!xt.empty()) {
                auto tr = ctx.model->translate(record.id, xt);
                s.step_logprobs = ctx.model->force_decode(record.id, xt, tr.tokens);
                s.hyp_tokens = std::move(tr.tokens);
            }
            set.samples.push_back(std::move(s));
        }
        inputs.noise.emplace(v, std::move(set));
    }
    return inputs;
}

FeatureVector extract_from_inputs(const QERecord& record, const FeatureInputs& inputs,
                                  const ExtractionContext& ctx,
                                  const FeatureGroupSelection& selection) {
    FeatureVector computed;
    try {
        if (selection.needs_group('1')) group1(record, computed);
        if (selection.needs_group('2')) {
            if (!inputs.mc) throw DataError("group II: no MC sample set available");
            group2(record, *inputs.mc, computed);
        }
        if (selection.needs_group('3')) {
            if (!ctx.index) throw DataError("group III: no corpus index in context");
            group3(record, *ctx.index, ctx.catalog, selection, computed);
        }
        if (selection.needs_group('4')) {
            if (inputs.noise.empty())
                throw DataError("group IV: no noised sample sets available");
            group4(record, inputs.noise, selection, computed);
        }
        if (selection.needs_group('5')) {
            if (inputs.masks.empty()) throw DataError("group V: no mask predictions available");
            group5(record, inputs.masks, selection, computed);
        }
    } catch (const DataError& e) {
        throw DataError("record " + record.id + ": " + e.what());
    }

    // Keep only the selected families' components, in canonical order.
    FeatureVector out;
    for (const auto& fam : selection.families) {
        for (const auto& comp : ctx.catalog.family_components(fam)) {
            out.values.emplace_back(comp, computed.at(comp));
            if (computed.degeneracy_flags.count(comp)) out.degeneracy_flags.insert(comp);
        }
    }
    return out;
}

FeatureVector extract(const QERecord& record, const ExtractionContext& ctx,
                      const FeatureGroupSelection& selection) {
    return extract_from_inputs(record, prepare_inputs(record, ctx, selection), ctx, selection);
}

}  // namespace uqkit::features
