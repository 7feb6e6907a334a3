#include "uqkit/pipeline.hpp"

#include <filesystem>
#include <iostream>

namespace uqkit::pipeline {

namespace fs = std::filesystem;

std::vector<QERecord> make_synthetic_split(const backend::SyntheticBackend& model,
                                           const std::string& split, int n) {
    std::vector<QERecord> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(model.make_record(split + "-" + std::to_string(i)));
    return out;
}

std::vector<std::pair<Tokens, Tokens>> make_synthetic_corpus(
    const backend::SyntheticBackend& model, int n) {
    std::vector<std::pair<Tokens, Tokens>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Reuse the record generator so corpus sentences share the
        // record distribution; targets are the exact cipher.
        const auto r = model.make_record("corpus-" + std::to_string(i));
        out.emplace_back(r.src_tokens, model.cipher(r.src_tokens));
    }
    return out;
}

void synth_to_dir(const config::PipelineConfig& cfg, const std::string& out_dir) {
    backend::SyntheticBackend model(cfg.synthetic_config());
    fs::create_directories(out_dir);

    features::ExtractionContext ctx;
    ctx.model = &model;
    ctx.mc_samples = cfg.mc_samples;
    ctx.noise = cfg.noise_config();

    // Samples and masks are generated for everything the extractors can
    // consume so a later file-backend run needs no live model.
    const auto selection = features::FeatureGroupSelection::all();

    const std::vector<std::pair<std::string, int>> splits = {
        {"train", cfg.n_train}, {"dev", cfg.n_dev}, {"test", cfg.n_test}};
    for (const auto& [split, n] : splits) {
        const auto recs = make_synthetic_split(model, split, n);
        records::write_jsonl_records(recs, records_file(out_dir, split));

        std::vector<SampleSet> sets;
        std::vector<MaskPrediction> masks;
        std::size_t done = 0;
        for (const auto& r : recs) {
            auto inputs = features::prepare_inputs(r, ctx, selection);
            if (inputs.mc) sets.push_back(std::move(*inputs.mc));
            for (auto& [variant, set] : inputs.noise) {
                (void)variant;
                sets.push_back(std::move(set));
            }
            for (auto& [variant, pred] : inputs.masks) {
                (void)variant;
                masks.push_back(std::move(pred));
            }
            if (++done % 200 == 0)
                std::cerr << "synth " << split << ": " << done << "/" << recs.size() << "\n";
        }
        records::write_jsonl_samples(sets, samples_file(out_dir, split));
        records::write_jsonl_masks(masks, masks_file(out_dir, split));
    }

    records::write_parallel_corpus(make_synthetic_corpus(model, cfg.n_corpus),
                                   corpus_file(out_dir));
}

Context make_context(const config::PipelineConfig& cfg, bool need_index,
                     const std::string& split) {
    Context ctx;
    if (cfg.backend == "synthetic") {
        ctx.model = std::make_unique<backend::SyntheticBackend>(cfg.synthetic_config());
    } else {
        backend::FileBackend::Paths paths;
        auto pick = [&](const std::string& explicit_path,
                        const std::string& split_path) -> std::optional<std::string> {
            if (!explicit_path.empty()) return explicit_path;
            if (!split.empty() && !cfg.data_dir.empty() && fs::exists(split_path))
                return split_path;
            return std::nullopt;
        };
        paths.records = pick(cfg.records_path, records_file(cfg.data_dir, split));
        paths.samples = pick(cfg.samples_path, samples_file(cfg.data_dir, split));
        paths.masks = pick(cfg.masks_path, masks_file(cfg.data_dir, split));
        if (!paths.records && !paths.samples && !paths.masks)
            throw UsageError("file backend needs records_path/samples_path/masks_path or data_dir");
        ctx.model = backend::FileBackend::load(paths);
    }

    if (need_index) {
        if (!cfg.index_path.empty()) {
            ctx.index = std::make_unique<corpus::CorpusIndex>(
                corpus::CorpusIndex::load(cfg.index_path));
        } else {
            std::string corpus_path = cfg.corpus_path;
            if (corpus_path.empty() && !cfg.data_dir.empty() &&
                fs::exists(corpus_file(cfg.data_dir)))
                corpus_path = corpus_file(cfg.data_dir);
            if (corpus_path.empty())
                throw UsageError("group III features need corpus_path or index_path");
            ctx.index = std::make_unique<corpus::CorpusIndex>(
                corpus::CorpusIndex::build(records::read_parallel_corpus(corpus_path)));
        }
    }

    ctx.extraction.model = ctx.model.get();
    ctx.extraction.index = ctx.index.get();
    ctx.extraction.mc_samples = cfg.mc_samples;
    ctx.extraction.noise = cfg.noise_config();
    ctx.extraction.catalog.ngram_ns = cfg.ngram_n;
    ctx.extraction.catalog.neighbor_ks = cfg.neighbor_k;
    return ctx;
}

std::vector<QERecord> load_split(const config::PipelineConfig& cfg, const std::string& split) {
    if (!cfg.records_path.empty()) return records::read_jsonl_records(cfg.records_path);
    if (cfg.data_dir.empty())
        throw UsageError("no records to load: set data_dir or records_path");
    return records::read_jsonl_records(records_file(cfg.data_dir, split));
}

harness::Dataset extract_split(const config::PipelineConfig& cfg, const std::string& split,
                               const features::FeatureGroupSelection& selection) {
    harness::Dataset ds;
    ds.records = load_split(cfg, split);
    auto ctx = make_context(cfg, selection.needs_group('3'), split);
    ds.feats.reserve(ds.records.size());
    std::size_t done = 0;
    for (const auto& r : ds.records) {
        ds.feats.push_back(features::extract(r, ctx.extraction, selection));
        if (++done % 200 == 0)
            std::cerr << "extract " << split << ": " << done << "/" << ds.records.size() << "\n";
    }
    return ds;
}

}  // namespace uqkit::pipeline
