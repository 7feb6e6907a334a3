// Python bindings for the uqkit core: text metrics, statistics, corpus
// index, synthetic backend, feature extraction, and the ridge fusion
// model. Thin wrappers only; all behavior lives in the C++ library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uqkit/backend.hpp"
#include "uqkit/config.hpp"
#include "uqkit/corpus_index.hpp"
#include "uqkit/features.hpp"
#include "uqkit/fusion.hpp"
#include "uqkit/pipeline.hpp"
#include "uqkit/records.hpp"
#include "uqkit/stats.hpp"
#include "uqkit/textmetrics.hpp"

namespace py = pybind11;
using namespace uqkit;

namespace {

// One-stop extraction: synthetic backend + optional corpus, returns
// [(name, value), ...] for the selected families.
std::vector<std::pair<std::string, double>> extract_features(
    const QERecord& record, const backend::SyntheticConfig& cfg, const std::string& groups,
    const std::optional<std::vector<std::pair<Tokens, Tokens>>>& corpus, int mc_samples,
    const noiser::NoiseConfig& noise) {
    backend::SyntheticBackend model(cfg);
    std::optional<corpus::CorpusIndex> index;
    features::ExtractionContext ctx;
    ctx.model = &model;
    ctx.mc_samples = mc_samples;
    ctx.noise = noise;
    if (corpus) {
        index = corpus::CorpusIndex::build(*corpus);
        ctx.index = &*index;
    }
    const auto selection = features::FeatureGroupSelection::parse(groups);
    return features::extract(record, ctx, selection).values;
}

}  // namespace

PYBIND11_MODULE(_uqkit, m) {
    m.doc() = "uncertainty features for machine-translation quality estimation";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    // --- text metrics ---------------------------------------------------------
    m.def("tokenize", &text::tokenize, py::arg("text"));
    m.def("levenshtein", &text::levenshtein, py::arg("a"), py::arg("b"),
          py::arg("cutoff") = -1);
    m.def("sim", &text::sim, py::arg("a"), py::arg("b"));

    // --- statistics -----------------------------------------------------------
    py::class_<stats::TripleStat>(m, "TripleStat")
        .def_readonly("mean", &stats::TripleStat::mean)
        .def_readonly("std", &stats::TripleStat::std)
        .def_readonly("combo", &stats::TripleStat::combo)
        .def_readonly("degenerate", &stats::TripleStat::degenerate);
    m.def(
        "triple_stat",
        [](const std::vector<double>& values) { return stats::triple_stat(values); },
        py::arg("values"));
    m.def(
        "pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            return stats::pearson(x, y);
        },
        py::arg("x"), py::arg("y"));

    // --- records --------------------------------------------------------------
    py::class_<QERecord>(m, "QERecord")
        .def(py::init<>())
        .def_readwrite("id", &QERecord::id)
        .def_readwrite("src_text", &QERecord::src_text)
        .def_readwrite("mt_text", &QERecord::mt_text)
        .def_readwrite("src_tokens", &QERecord::src_tokens)
        .def_readwrite("mt_tokens", &QERecord::mt_tokens)
        .def_readwrite("step_logprobs", &QERecord::step_logprobs)
        .def_readwrite("gold_score", &QERecord::gold_score)
        .def_readwrite("embedding", &QERecord::embedding);
    m.def("read_records", &records::read_jsonl_records, py::arg("path"));
    m.def("write_records", &records::write_jsonl_records, py::arg("records"), py::arg("path"));

    // --- corpus index ---------------------------------------------------------
    py::class_<corpus::CorpusIndex>(m, "CorpusIndex")
        .def_static("build", &corpus::CorpusIndex::build, py::arg("parallel_corpus"))
        .def_static("load", &corpus::CorpusIndex::load, py::arg("path"))
        .def("save", &corpus::CorpusIndex::save, py::arg("path"))
        .def("ds_gram",
             [](const corpus::CorpusIndex& idx, const Tokens& x, int n) {
                 const auto g = idx.ds_gram(x, n);
                 return py::make_tuple(g.value, g.degenerate);
             },
             py::arg("x"), py::arg("n"))
        .def("ds_neighbors",
             [](const corpus::CorpusIndex& idx, const Tokens& q, int k, const std::string& side) {
                 const auto nb = idx.ds_neighbors(
                     q, k, side == "src" ? corpus::Side::Src : corpus::Side::Tgt);
                 return py::make_tuple(nb.value, nb.truncated);
             },
             py::arg("q"), py::arg("k"), py::arg("side"))
        .def("__len__", &corpus::CorpusIndex::size);

    // --- synthetic backend ----------------------------------------------------
    py::class_<backend::SyntheticConfig>(m, "SyntheticConfig")
        .def(py::init<>())
        .def_readwrite("vocab_size", &backend::SyntheticConfig::vocab_size)
        .def_readwrite("seed", &backend::SyntheticConfig::seed)
        .def_readwrite("mlm_noise", &backend::SyntheticConfig::mlm_noise)
        .def_readwrite("dropout_jitter", &backend::SyntheticConfig::dropout_jitter)
        .def_readwrite("min_len", &backend::SyntheticConfig::min_len)
        .def_readwrite("max_len", &backend::SyntheticConfig::max_len)
        .def_readwrite("max_difficulty", &backend::SyntheticConfig::max_difficulty)
        .def_readwrite("embedding_dim", &backend::SyntheticConfig::embedding_dim)
        .def_readwrite("embedding_noise", &backend::SyntheticConfig::embedding_noise);

    py::class_<backend::SyntheticBackend>(m, "SyntheticBackend")
        .def(py::init<backend::SyntheticConfig>(), py::arg("config"))
        .def("make_record", &backend::SyntheticBackend::make_record, py::arg("record_id"))
        .def("difficulty", &backend::SyntheticBackend::difficulty, py::arg("record_id"))
        .def("cipher", &backend::SyntheticBackend::cipher, py::arg("tokens"))
        .def("translate",
             [](backend::SyntheticBackend& b, const std::string& id, const Tokens& x) {
                 const auto t = b.translate(id, x);
                 return py::make_tuple(t.tokens, t.step_logprobs);
             },
             py::arg("record_id"), py::arg("x"))
        .def("force_decode", &backend::SyntheticBackend::force_decode, py::arg("record_id"),
             py::arg("x"), py::arg("y"));

    // --- features -------------------------------------------------------------
    py::class_<noiser::NoiseConfig>(m, "NoiseConfig")
        .def(py::init<>())
        .def_readwrite("rounds", &noiser::NoiseConfig::rounds)
        .def_readwrite("p_delete", &noiser::NoiseConfig::p_delete)
        .def_readwrite("p_insert", &noiser::NoiseConfig::p_insert)
        .def_readwrite("n_variants", &noiser::NoiseConfig::n_variants)
        .def_readwrite("seed", &noiser::NoiseConfig::seed);

    m.def("feature_names", [] { return features::Catalog{}.all_components(); });
    m.def("extract_features", &extract_features, py::arg("record"), py::arg("config"),
          py::arg("groups") = "all", py::arg("corpus") = std::nullopt,
          py::arg("mc_samples") = 30, py::arg("noise") = noiser::NoiseConfig{});

    // --- fusion ---------------------------------------------------------------
    py::class_<fusion::FusionModel>(m, "FusionModel")
        .def_readonly("feature_names", &fusion::FusionModel::feature_names)
        .def_readonly("weights", &fusion::FusionModel::weights)
        .def_readonly("bias", &fusion::FusionModel::bias)
        .def_readonly("ridge_lambda", &fusion::FusionModel::ridge_lambda)
        .def("predict", &fusion::FusionModel::predict, py::arg("embedding"),
             py::arg("features"))
        .def("save", &fusion::save_model, py::arg("path"));
    m.def("load_model", &fusion::load_model, py::arg("path"));
    m.def(
        "train",
        [](const std::vector<std::vector<double>>& embeddings,
           const std::vector<std::vector<double>>& feats, const std::vector<double>& labels,
           double lam, const std::vector<std::string>& names, bool normalize_embedding) {
            if (embeddings.size() != feats.size())
                throw DataError("train: embeddings/features length mismatch");
            std::vector<fusion::TrainRow> rows;
            for (std::size_t i = 0; i < embeddings.size(); ++i)
                rows.push_back({embeddings[i], feats[i]});
            return fusion::train(rows, labels, lam, names, normalize_embedding);
        },
        py::arg("embeddings"), py::arg("features"), py::arg("labels"),
        py::arg("ridge_lambda") = 1.0, py::arg("feature_names") = std::vector<std::string>{},
        py::arg("normalize_embedding") = false);
}
