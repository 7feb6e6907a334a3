#include "uqkit/backend.hpp"

#include <algorithm>
#include <cmath>

#include "uqkit/records.hpp"
#include "uqkit/rng.hpp"

namespace uqkit::backend {

namespace {

// Stream ids for the counter-based RNG; every draw is keyed by
// (seed, record id, stream, counter).
constexpr std::uint64_t kStreamRecord = 1;
constexpr std::uint64_t kStreamTranslate = 2;
constexpr std::uint64_t kStreamMcBase = 1000;     // + sample index
constexpr std::uint64_t kStreamMlmBase = 2000000; // + variant
constexpr std::uint64_t kStreamEmbedding = 3;

constexpr double kMinMismatchProb = 1e-9;

}  // namespace

const char* capability_name(Capability c) {
    switch (c) {
        case Capability::Translate: return "translate";
        case Capability::McSample: return "mc_sample";
        case Capability::ForceDecode: return "force_decode";
        case Capability::FillMasks: return "fill_masks";
    }
    throw Error("unreachable capability");
}

Translation ModelBackend::translate(const std::string&, const Tokens&) {
    throw Error("unsupported capability: translate");
}

SampleSet ModelBackend::mc_sample(const std::string&, const Tokens&, int) {
    throw Error("unsupported capability: mc_sample");
}

std::vector<double> ModelBackend::force_decode(const std::string&, const Tokens&, const Tokens&) {
    throw Error("unsupported capability: force_decode");
}

MaskPrediction ModelBackend::fill_masks(const std::string&, MaskVariant, const Tokens&,
                                        const std::optional<Tokens>&,
                                        const std::optional<Tokens>&) {
    throw Error("unsupported capability: fill_masks");
}

std::optional<SampleSet> ModelBackend::stored_samples(const std::string&, SampleKind) const {
    return std::nullopt;
}

std::optional<MaskPrediction> ModelBackend::stored_masks(const std::string&, MaskVariant) const {
    return std::nullopt;
}

// --- SyntheticBackend --------------------------------------------------------

SyntheticBackend::SyntheticBackend(SyntheticConfig cfg) : cfg_(cfg) {
    if (cfg_.vocab_size < 2) throw UsageError("synthetic vocab_size must be >= 2");
    if (cfg_.min_len < 1 || cfg_.max_len < cfg_.min_len)
        throw UsageError("synthetic length range invalid");
    if (cfg_.mlm_noise < 0.0 || cfg_.mlm_noise >= 1.0)
        throw UsageError("synthetic mlm_noise must be in [0,1)");
}

std::set<Capability> SyntheticBackend::capabilities() const {
    return {Capability::Translate, Capability::McSample, Capability::ForceDecode,
            Capability::FillMasks};
}

std::string SyntheticBackend::source_token(int i) const { return "s" + std::to_string(i); }
std::string SyntheticBackend::target_token(int i) const { return "t" + std::to_string(i); }

namespace {

// Parses "s<k>"/"t<k>"; foreign tokens map through a hash so the cipher
// stays total over arbitrary input.
int token_index(const std::string& tok, int vocab) {
    if (tok.size() >= 2 && (tok[0] == 's' || tok[0] == 't')) {
        bool digits = true;
        for (std::size_t i = 1; i < tok.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(tok[i]))) {
                digits = false;
                break;
            }
        if (digits) return static_cast<int>(std::stoul(tok.substr(1)) % vocab);
    }
    return static_cast<int>(rng::hash_str(tok) % static_cast<std::uint64_t>(vocab));
}

}  // namespace

Tokens SyntheticBackend::cipher(const Tokens& x) const {
    Tokens y;
    y.reserve(x.size());
    for (const auto& t : x) y.push_back(target_token(token_index(t, cfg_.vocab_size)));
    return y;
}

double SyntheticBackend::difficulty(const std::string& record_id) const {
    const auto key = rng::make_key(cfg_.seed, record_id, kStreamRecord);
    return rng::uniform_range(key, 0, 0.0, cfg_.max_difficulty);
}

Translation SyntheticBackend::translate_with_difficulty(const std::string& record_id,
                                                        const Tokens& x, double delta,
                                                        std::uint64_t stream) const {
    const auto key = rng::make_key(cfg_.seed, record_id, stream);
    const int v = cfg_.vocab_size;
    Translation out;
    out.tokens.reserve(x.size());
    out.step_logprobs.reserve(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        const int correct = token_index(x[t], v);
        const double u = rng::uniform(key, 2 * t);
        if (u < delta) {
            int wrong = static_cast<int>(rng::uniform_int(key, 2 * t + 1,
                                                          static_cast<std::uint64_t>(v - 1)));
            if (wrong >= correct) ++wrong;
            out.tokens.push_back(target_token(wrong));
            out.step_logprobs.push_back(std::log(delta / (v - 1)));
        } else {
            out.tokens.push_back(target_token(correct));
            out.step_logprobs.push_back(std::log1p(-delta));
        }
    }
    return out;
}

Translation SyntheticBackend::translate(const std::string& record_id, const Tokens& x) {
    return translate_with_difficulty(record_id, x, difficulty(record_id), kStreamTranslate);
}

SampleSet SyntheticBackend::mc_sample(const std::string& record_id, const Tokens& x, int m) {
    if (m < 2) throw DataError("mc_sample: need at least 2 samples");
    const double delta = difficulty(record_id);
    SampleSet set;
    set.record_id = record_id;
    set.kind = SampleKind::McDropout;
    for (int k = 0; k < m; ++k) {
        const std::uint64_t stream = kStreamMcBase + static_cast<std::uint64_t>(k);
        const auto jitter_key = rng::make_key(cfg_.seed, record_id, stream);
        const double jitter =
            rng::uniform_range(jitter_key, 0, -cfg_.dropout_jitter, cfg_.dropout_jitter);
        const double dprime = std::clamp(delta + jitter, 0.0, 0.9);
        // Counter offset keeps the jitter draw and position draws apart.
        auto tr = translate_with_difficulty(record_id, x, dprime, stream + 500000);
        Sample s;
        s.hyp_tokens = std::move(tr.tokens);
        s.step_logprobs = std::move(tr.step_logprobs);
        set.samples.push_back(std::move(s));
    }
    return set;
}

std::vector<double> SyntheticBackend::force_decode(const std::string& record_id, const Tokens& x,
                                                   const Tokens& y) {
    if (y.empty()) throw DataError("force_decode: empty hypothesis");
    const double delta = difficulty(record_id);
    const int v = cfg_.vocab_size;
    std::vector<double> out;
    out.reserve(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        const bool match =
            t < x.size() && y[t] == target_token(token_index(x[t], v));
        if (match) {
            out.push_back(std::log1p(-delta));
        } else {
            out.push_back(std::log(std::max(delta, kMinMismatchProb) / (v - 1)));
        }
    }
    return out;
}

MaskPrediction SyntheticBackend::fill_masks(const std::string& record_id, MaskVariant variant,
                                            const Tokens& x_masked,
                                            const std::optional<Tokens>& originals,
                                            const std::optional<Tokens>& constraint_y) {
    if (originals && originals->size() != x_masked.size())
        throw DataError("fill_masks: originals/masked length mismatch");
    const double dm = constraint_y ? cfg_.mlm_noise / 2.0 : cfg_.mlm_noise;
    const int v = cfg_.vocab_size;
    // The masked sequence itself keys the stream, so distinct masked
    // inputs of one record draw independent randomness while identical
    // inputs stay bit-identical.
    const std::uint64_t stream = kStreamMlmBase + static_cast<std::uint64_t>(variant) +
                                 (rng::hash_str(join_tokens(x_masked)) << 2);
    const auto key = rng::make_key(cfg_.seed, record_id, stream);

    MaskPrediction pred;
    pred.record_id = record_id;
    pred.variant = variant;
    const bool forced =
        originals && (variant == MaskVariant::Simple || variant == MaskVariant::SimpleY);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < x_masked.size(); ++i) {
        if (x_masked[i] != kMaskToken) continue;
        MaskPosition mp;
        mp.index = static_cast<int>(i);
        // Canonical fill: the original token when known, a deterministic
        // vocab token otherwise (inserted PE masks have no original).
        int canonical;
        if (originals) {
            canonical = token_index((*originals)[i], v);
        } else {
            canonical = static_cast<int>(rng::uniform_int(key, 3 * slot + 2,
                                                          static_cast<std::uint64_t>(v)));
        }
        const double u = rng::uniform(key, 3 * slot);
        if (u < dm) {
            int wrong = static_cast<int>(
                rng::uniform_int(key, 3 * slot + 1, static_cast<std::uint64_t>(v - 1)));
            if (wrong >= canonical) ++wrong;
            mp.predicted = source_token(wrong);
            mp.pred_logprob = std::log(dm / (v - 1));
        } else {
            mp.predicted = source_token(canonical);
            mp.pred_logprob = std::log1p(-dm);
        }
        if (forced) mp.forced_logprob = std::log1p(-dm);
        pred.positions.push_back(std::move(mp));
        ++slot;
    }
    if (pred.positions.empty()) throw DataError("fill_masks: no mask tokens in input");
    return pred;
}

QERecord SyntheticBackend::make_record(const std::string& record_id) const {
    const auto key = rng::make_key(cfg_.seed, record_id, kStreamRecord);
    const int len = cfg_.min_len +
                    static_cast<int>(rng::uniform_int(
                        key, 1, static_cast<std::uint64_t>(cfg_.max_len - cfg_.min_len + 1)));
    QERecord r;
    r.id = record_id;
    r.src_tokens.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
        r.src_tokens.push_back(source_token(static_cast<int>(
            rng::uniform_int(key, 2 + static_cast<std::uint64_t>(i),
                             static_cast<std::uint64_t>(cfg_.vocab_size)))));
    r.src_text = join_tokens(r.src_tokens);

    auto tr = const_cast<SyntheticBackend*>(this)->translate(record_id, r.src_tokens);
    r.mt_tokens = tr.tokens;
    r.mt_text = join_tokens(r.mt_tokens);
    r.step_logprobs = tr.step_logprobs;

    const Tokens ref = cipher(r.src_tokens);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < r.mt_tokens.size(); ++i)
        if (r.mt_tokens[i] == ref[i]) ++hits;
    const double gold = static_cast<double>(hits) / static_cast<double>(r.mt_tokens.size());
    r.gold_score = gold;

    // Hashed bag-of-tokens projections plus one weak noisy-quality dim.
    std::vector<double> emb(static_cast<std::size_t>(cfg_.embedding_dim), 0.0);
    const int proj_dims = cfg_.embedding_dim - 1;
    Tokens bag = r.src_tokens;
    bag.insert(bag.end(), r.mt_tokens.begin(), r.mt_tokens.end());
    for (const auto& tok : bag) {
        const std::uint64_t h = rng::hash_str(tok);
        for (int d = 0; d < proj_dims; ++d) {
            const std::uint64_t b = rng::mix64(h ^ static_cast<std::uint64_t>(d));
            emb[static_cast<std::size_t>(d)] +=
                (static_cast<double>(b >> 11) * 0x1.0p-53) * 2.0 - 1.0;
        }
    }
    for (int d = 0; d < proj_dims; ++d)
        emb[static_cast<std::size_t>(d)] /= static_cast<double>(bag.size());
    const auto ekey = rng::make_key(cfg_.seed, record_id, kStreamEmbedding);
    emb[static_cast<std::size_t>(proj_dims)] =
        gold + rng::uniform_range(ekey, 0, -cfg_.embedding_noise, cfg_.embedding_noise);
    r.embedding = std::move(emb);
    return r;
}

// --- FileBackend -------------------------------------------------------------

std::unique_ptr<FileBackend> FileBackend::load(const Paths& paths) {
    auto b = std::unique_ptr<FileBackend>(new FileBackend());
    if (paths.records) {
        for (auto& r : records::read_jsonl_records(*paths.records))
            b->records_.emplace(r.id, std::move(r));
    }
    if (paths.samples) {
        for (auto& s : records::read_jsonl_samples(*paths.samples)) {
            auto k = std::make_pair(s.record_id, s.kind);
            if (!b->samples_.emplace(std::move(k), std::move(s)).second)
                throw DataError("duplicate sample set in " + *paths.samples);
        }
    }
    if (paths.masks) {
        for (auto& m : records::read_jsonl_masks(*paths.masks)) {
            auto k = std::make_pair(m.record_id, m.variant);
            if (!b->masks_.emplace(std::move(k), std::move(m)).second)
                throw DataError("duplicate mask prediction in " + *paths.masks);
        }
    }
    return b;
}

std::set<Capability> FileBackend::capabilities() const {
    std::set<Capability> caps;
    if (!records_.empty()) {
        caps.insert(Capability::Translate);
        caps.insert(Capability::ForceDecode);
    }
    for (const auto& [key, _] : samples_)
        if (key.second == SampleKind::McDropout) {
            caps.insert(Capability::McSample);
            break;
        }
    return caps;
}

Translation FileBackend::translate(const std::string& record_id, const Tokens&) {
    auto it = records_.find(record_id);
    if (it == records_.end())
        throw DataError("record not covered by file backend: " + record_id);
    if (!it->second.step_logprobs)
        throw DataError("record " + record_id + " has no step log-probs in the file backend");
    return {it->second.mt_tokens, *it->second.step_logprobs};
}

SampleSet FileBackend::mc_sample(const std::string& record_id, const Tokens&, int m) {
    if (m < 2) throw DataError("mc_sample: need at least 2 samples");
    auto it = samples_.find({record_id, SampleKind::McDropout});
    if (it == samples_.end())
        throw DataError("record not covered by file backend: " + record_id);
    return it->second;
}

std::vector<double> FileBackend::force_decode(const std::string& record_id, const Tokens&,
                                              const Tokens& y) {
    // The file store only knows the scores of its own hypothesis.
    auto it = records_.find(record_id);
    if (it == records_.end())
        throw DataError("record not covered by file backend: " + record_id);
    if (y != it->second.mt_tokens || !it->second.step_logprobs)
        throw Error("unsupported capability: force_decode of an unseen hypothesis");
    return *it->second.step_logprobs;
}

std::optional<SampleSet> FileBackend::stored_samples(const std::string& record_id,
                                                     SampleKind kind) const {
    auto it = samples_.find({record_id, kind});
    if (it == samples_.end()) return std::nullopt;
    return it->second;
}

std::optional<MaskPrediction> FileBackend::stored_masks(const std::string& record_id,
                                                        MaskVariant variant) const {
    auto it = masks_.find({record_id, variant});
    if (it == masks_.end()) return std::nullopt;
    return it->second;
}

}  // namespace uqkit::backend
