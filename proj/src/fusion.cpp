#include "uqkit/fusion.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

namespace uqkit::fusion {

namespace {

constexpr const char* kMagic = "UQKIT-MODEL v1";
constexpr double kConstantEps = 1e-12;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<double> Normalizer::apply(const std::vector<double>& raw) const {
    if (raw.size() != dims())
        throw DataError("normalizer dimension mismatch: expected " + std::to_string(dims()) +
                        ", got " + std::to_string(raw.size()));
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        out[i] = constant[i] ? 0.0 : (raw[i] - mean[i]) / std[i];
    return out;
}

Normalizer fit_normalizer(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) throw DataError("fit_normalizer: need at least 2 rows");
    const std::size_t dims = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != dims) throw DataError("fit_normalizer: ragged input matrix");
    Normalizer nz;
    nz.mean.assign(dims, 0.0);
    nz.std.assign(dims, 0.0);
    nz.constant.assign(dims, false);
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (std::size_t c = 0; c < dims; ++c) nz.mean[c] += r[c];
    for (std::size_t c = 0; c < dims; ++c) nz.mean[c] /= n;
    for (const auto& r : rows)
        for (std::size_t c = 0; c < dims; ++c) {
            const double d = r[c] - nz.mean[c];
            nz.std[c] += d * d;
        }
    for (std::size_t c = 0; c < dims; ++c) {
        nz.std[c] = std::sqrt(nz.std[c] / n);
        if (nz.std[c] <= kConstantEps) {
            nz.constant[c] = true;
            nz.std[c] = 1.0;
        }
    }
    return nz;
}

double FusionModel::predict(const std::vector<double>& embedding,
                            const std::vector<double>& features) const {
    if (embedding.size() != embedding_dim)
        throw DataError("predict: expected embedding dim " + std::to_string(embedding_dim) +
                        ", got " + std::to_string(embedding.size()));
    if (features.size() != feature_normalizer.dims())
        throw DataError("predict: expected " + std::to_string(feature_normalizer.dims()) +
                        " features, got " + std::to_string(features.size()));
    const auto emb =
        normalize_embedding ? embedding_normalizer.apply(embedding) : embedding;
    const auto feats = feature_normalizer.apply(features);
    double y = bias;
    for (std::size_t i = 0; i < emb.size(); ++i) y += weights[i] * emb[i];
    for (std::size_t i = 0; i < feats.size(); ++i) y += weights[embedding_dim + i] * feats[i];
    return y;
}

FusionModel train(const std::vector<TrainRow>& rows, const std::vector<double>& labels,
                  double lambda, const std::vector<std::string>& feature_names,
                  bool normalize_embedding) {
    if (rows.size() < 2) throw DataError("train: need at least 2 rows");
    if (rows.size() != labels.size()) throw DataError("train: rows/labels count mismatch");
    if (lambda < 0.0) throw UsageError("train: lambda must be >= 0");
    for (double y : labels)
        if (!std::isfinite(y)) throw DataError("train: non-finite label");
    const std::size_t ed = rows[0].embedding.size();
    const std::size_t fd = rows[0].features.size();
    for (const auto& r : rows)
        if (r.embedding.size() != ed || r.features.size() != fd)
            throw DataError("train: ragged input rows");
    if (!feature_names.empty() && feature_names.size() != fd)
        throw DataError("train: feature_names/feature dim mismatch");

    FusionModel model;
    model.embedding_dim = ed;
    model.feature_names = feature_names;
    model.ridge_lambda = lambda;
    model.normalize_embedding = normalize_embedding;
    {
        std::vector<std::vector<double>> fm;
        fm.reserve(rows.size());
        for (const auto& r : rows) fm.push_back(r.features);
        model.feature_normalizer =
            fd > 0 ? fit_normalizer(fm) : Normalizer{};
    }
    if (normalize_embedding && ed > 0) {
        std::vector<std::vector<double>> em;
        em.reserve(rows.size());
        for (const auto& r : rows) em.push_back(r.embedding);
        model.embedding_normalizer = fit_normalizer(em);
    }

    const std::size_t d = ed + fd;
    const std::size_t n = rows.size();
    Eigen::MatrixXd z(n, d + 1);  // last column: bias
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto emb = model.normalize_embedding
                             ? model.embedding_normalizer.apply(rows[i].embedding)
                             : rows[i].embedding;
        const auto feats =
            fd > 0 ? model.feature_normalizer.apply(rows[i].features) : std::vector<double>{};
        for (std::size_t c = 0; c < ed; ++c) z(i, c) = emb[c];
        for (std::size_t c = 0; c < fd; ++c) z(i, ed + c) = feats[c];
        z(i, d) = 1.0;
        y(static_cast<Eigen::Index>(i)) = labels[i];
    }

    Eigen::MatrixXd gram = z.transpose() * z;
    for (std::size_t c = 0; c < d; ++c) gram(c, c) += lambda;  // bias unpenalized
    Eigen::VectorXd rhs = z.transpose() * y;

    Eigen::VectorXd sol;
    if (lambda > 0.0) {
        sol = gram.ldlt().solve(rhs);
    } else {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        if (!lu.isInvertible())
            throw DataError("train: rank-deficient design with lambda=0; use lambda > 0");
        sol = lu.solve(rhs);
    }
    if (!sol.allFinite()) throw DataError("train: non-finite solution; use lambda > 0");

    model.weights.assign(sol.data(), sol.data() + d);
    model.bias = sol(static_cast<Eigen::Index>(d));
    return model;
}

void save_model(const FusionModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open model file for writing: " + path);
    out << kMagic << '\n';
    out << "lambda " << fmt17(model.ridge_lambda) << '\n';
    out << "dims " << model.embedding_dim << ' ' << model.feature_normalizer.dims() << '\n';
    out << "normalize_embedding " << (model.normalize_embedding ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < model.feature_normalizer.dims(); ++i) {
        out << "feature "
            << (i < model.feature_names.size() ? model.feature_names[i] : "f" + std::to_string(i))
            << ' ' << fmt17(model.feature_normalizer.mean[i]) << ' '
            << fmt17(model.feature_normalizer.std[i]) << ' '
            << (model.feature_normalizer.constant[i] ? 1 : 0) << '\n';
    }
    if (model.normalize_embedding) {
        for (std::size_t i = 0; i < model.embedding_normalizer.dims(); ++i)
            out << "embnorm " << fmt17(model.embedding_normalizer.mean[i]) << ' '
                << fmt17(model.embedding_normalizer.std[i]) << ' '
                << (model.embedding_normalizer.constant[i] ? 1 : 0) << '\n';
    }
    for (double w : model.weights) out << "w " << fmt17(w) << '\n';
    out << "bias " << fmt17(model.bias) << '\n';
}

FusionModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw DataError(path + ": bad model header (expected '" + std::string(kMagic) + "')");
    FusionModel model;
    std::size_t fd = 0;
    std::size_t total = 0;
    bool have_dims = false;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "lambda") {
            ss >> model.ridge_lambda;
        } else if (tag == "dims") {
            ss >> model.embedding_dim >> fd;
            have_dims = true;
            total = model.embedding_dim + fd;
        } else if (tag == "normalize_embedding") {
            int v = 0;
            ss >> v;
            model.normalize_embedding = v != 0;
        } else if (tag == "feature") {
            std::string name;
            double mean = 0, std = 0;
            int constant = 0;
            ss >> name >> mean >> std >> constant;
            model.feature_names.push_back(name);
            model.feature_normalizer.mean.push_back(mean);
            model.feature_normalizer.std.push_back(std);
            model.feature_normalizer.constant.push_back(constant != 0);
        } else if (tag == "embnorm") {
            double mean = 0, std = 0;
            int constant = 0;
            ss >> mean >> std >> constant;
            model.embedding_normalizer.mean.push_back(mean);
            model.embedding_normalizer.std.push_back(std);
            model.embedding_normalizer.constant.push_back(constant != 0);
        } else if (tag == "w") {
            double w = 0;
            ss >> w;
            model.weights.push_back(w);
        } else if (tag == "bias") {
            ss >> model.bias;
        } else if (!tag.empty()) {
            throw DataError(path + ": unknown model line tag '" + tag + "'");
        }
        if (ss.fail()) throw DataError(path + ": malformed model line '" + line + "'");
    }
    if (!have_dims || model.feature_normalizer.dims() != fd || model.weights.size() != total)
        throw DataError(path + ": truncated or inconsistent model file");
    return model;
}

}  // namespace uqkit::fusion
