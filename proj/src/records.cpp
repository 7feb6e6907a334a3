#include "uqkit/records.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "uqkit/textmetrics.hpp"
#include <json.hpp>

namespace uqkit::records {

namespace {

using json = nlohmann::ordered_json;

const std::set<std::string> kKnownRecordKeys = {"id",        "src",  "src_tokens", "mt",
                                                "mt_tokens", "step_logprobs", "gold",
                                                "embedding"};

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file for writing: " + path);
    return out;
}

Tokens tokens_from_json(const json& arr, const std::string& ctx) {
    if (!arr.is_array()) throw DataError(ctx + ": expected an array of strings");
    Tokens out;
    for (const auto& t : arr) {
        if (!t.is_string()) throw DataError(ctx + ": expected an array of strings");
        out.push_back(t.get<std::string>());
    }
    return out;
}

std::vector<double> doubles_from_json(const json& arr, const std::string& ctx) {
    if (!arr.is_array()) throw DataError(ctx + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) throw DataError(ctx + ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

void check_logprobs(const std::vector<double>& lps, const Tokens& toks, const std::string& id) {
    if (lps.size() != toks.size())
        throw DataError("record " + id + ": " + std::to_string(toks.size()) + " tokens but " +
                        std::to_string(lps.size()) + " step log-probs");
    for (double lp : lps)
        if (lp > 0.0) throw DataError("record " + id + ": positive step log-prob");
}

void validate_record(const QERecord& r) {
    if (r.id.empty()) throw DataError("record with empty id");
    if (r.step_logprobs) check_logprobs(*r.step_logprobs, r.mt_tokens, r.id);
}

}  // namespace

QERecord record_from_json_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw DataError("record line is not a JSON object");
    QERecord r;
    if (!j.contains("id") || !j["id"].is_string()) throw DataError("record missing string 'id'");
    r.id = j["id"].get<std::string>();
    if (j.contains("src")) r.src_text = j["src"].get<std::string>();
    if (j.contains("mt")) r.mt_text = j["mt"].get<std::string>();
    r.src_tokens = j.contains("src_tokens") ? tokens_from_json(j["src_tokens"], "src_tokens")
                                            : text::tokenize(r.src_text);
    r.mt_tokens = j.contains("mt_tokens") ? tokens_from_json(j["mt_tokens"], "mt_tokens")
                                          : text::tokenize(r.mt_text);
    if (j.contains("step_logprobs"))
        r.step_logprobs = doubles_from_json(j["step_logprobs"], "step_logprobs");
    if (j.contains("gold")) r.gold_score = j["gold"].get<double>();
    if (j.contains("embedding")) r.embedding = doubles_from_json(j["embedding"], "embedding");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kKnownRecordKeys.count(it.key())) r.extra.emplace_back(it.key(), it.value().dump());
    validate_record(r);
    return r;
}

std::string record_to_json_line(const QERecord& record) {
    json j;
    j["id"] = record.id;
    j["src"] = record.src_text.empty() ? join_tokens(record.src_tokens) : record.src_text;
    j["src_tokens"] = record.src_tokens;
    j["mt"] = record.mt_text.empty() ? join_tokens(record.mt_tokens) : record.mt_text;
    j["mt_tokens"] = record.mt_tokens;
    if (record.step_logprobs) j["step_logprobs"] = *record.step_logprobs;
    if (record.gold_score) j["gold"] = *record.gold_score;
    if (record.embedding) j["embedding"] = *record.embedding;
    for (const auto& [key, value] : record.extra) j[key] = json::parse(value);
    return j.dump();
}

std::vector<QERecord> read_jsonl_records(const std::string& path) {
    auto in = open_in(path);
    std::vector<QERecord> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        QERecord r;
        try {
            r = record_from_json_line(line);
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen.insert(r.id).second)
            throw DataError(path + ":" + std::to_string(lineno) + ": duplicate record id '" +
                            r.id + "'");
        out.push_back(std::move(r));
    }
    return out;
}

void write_jsonl_records(const std::vector<QERecord>& records, const std::string& path) {
    auto out = open_out(path);
    for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

std::vector<SampleSet> read_jsonl_samples(const std::string& path) {
    auto in = open_in(path);
    std::vector<SampleSet> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            SampleSet s;
            s.record_id = j.at("record_id").get<std::string>();
            s.kind = sample_kind_from_name(j.at("kind").get<std::string>());
            for (const auto& js : j.at("samples")) {
                Sample smp;
                smp.hyp_tokens = tokens_from_json(js.at("hyp_tokens"), "hyp_tokens");
                if (js.contains("step_logprobs")) {
                    smp.step_logprobs = doubles_from_json(js["step_logprobs"], "step_logprobs");
                    check_logprobs(*smp.step_logprobs, smp.hyp_tokens, s.record_id);
                }
                if (js.contains("noised_src_tokens"))
                    smp.noised_src_tokens =
                        tokens_from_json(js["noised_src_tokens"], "noised_src_tokens");
                s.samples.push_back(std::move(smp));
            }
            out.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_jsonl_samples(const std::vector<SampleSet>& sets, const std::string& path) {
    auto out = open_out(path);
    for (const auto& s : sets) {
        json j;
        j["record_id"] = s.record_id;
        j["kind"] = sample_kind_name(s.kind);
        j["samples"] = json::array();
        for (const auto& smp : s.samples) {
            json js;
            js["hyp_tokens"] = smp.hyp_tokens;
            if (smp.step_logprobs) js["step_logprobs"] = *smp.step_logprobs;
            if (smp.noised_src_tokens) js["noised_src_tokens"] = *smp.noised_src_tokens;
            j["samples"].push_back(std::move(js));
        }
        out << j.dump() << '\n';
    }
}

std::vector<MaskPrediction> read_jsonl_masks(const std::string& path) {
    auto in = open_in(path);
    std::vector<MaskPrediction> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            MaskPrediction p;
            p.record_id = j.at("record_id").get<std::string>();
            p.variant = mask_variant_from_name(j.at("variant").get<std::string>());
            const bool forced_expected =
                p.variant == MaskVariant::Simple || p.variant == MaskVariant::SimpleY;
            for (const auto& jp : j.at("positions")) {
                MaskPosition mp;
                mp.index = jp.at("index").get<int>();
                mp.predicted = jp.at("predicted").get<std::string>();
                mp.pred_logprob = jp.at("pred_logprob").get<double>();
                if (mp.pred_logprob > 0.0)
                    throw DataError("record " + p.record_id + ": positive pred_logprob");
                if (jp.contains("forced_logprob")) {
                    if (!forced_expected)
                        throw DataError("record " + p.record_id +
                                        ": forced_logprob on a PE variant");
                    mp.forced_logprob = jp["forced_logprob"].get<double>();
                    if (*mp.forced_logprob > 0.0)
                        throw DataError("record " + p.record_id + ": positive forced_logprob");
                } else if (forced_expected) {
                    throw DataError("record " + p.record_id +
                                    ": simple variant missing forced_logprob");
                }
                p.positions.push_back(std::move(mp));
            }
            out.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_jsonl_masks(const std::vector<MaskPrediction>& preds, const std::string& path) {
    auto out = open_out(path);
    for (const auto& p : preds) {
        json j;
        j["record_id"] = p.record_id;
        j["variant"] = mask_variant_name(p.variant);
        j["positions"] = json::array();
        for (const auto& mp : p.positions) {
            json jp;
            jp["index"] = mp.index;
            jp["predicted"] = mp.predicted;
            jp["pred_logprob"] = mp.pred_logprob;
            if (mp.forced_logprob) jp["forced_logprob"] = *mp.forced_logprob;
            j["positions"].push_back(std::move(jp));
        }
        out << j.dump() << '\n';
    }
}

std::vector<QERecord> read_mlqe_tsv(const std::string& path, const MlqeColumns& cols) {
    auto in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) throw DataError(path + ": empty TSV file");
    if (!header.empty() && header.back() == '\r') header.pop_back();

    std::vector<std::string> names;
    {
        std::stringstream ss(header);
        std::string field;
        while (std::getline(ss, field, '\t')) names.push_back(field);
    }
    auto find_col = [&](const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<long>(i);
        throw DataError(path + ": missing required column '" + name + "'");
    };
    const long id_col = find_col(cols.id);
    const long src_col = find_col(cols.src);
    const long mt_col = find_col(cols.mt);
    const long score_col = find_col(cols.score);

    std::vector<QERecord> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t rowno = 1;
    while (std::getline(in, line)) {
        ++rowno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        {
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, '\t')) fields.push_back(field);
        }
        auto cell = [&](long i) -> std::string {
            return i < static_cast<long>(fields.size()) ? fields[static_cast<std::size_t>(i)] : "";
        };
        QERecord r;
        r.id = cell(id_col);
        r.src_text = cell(src_col);
        r.mt_text = cell(mt_col);
        r.src_tokens = text::tokenize(r.src_text);
        r.mt_tokens = text::tokenize(r.mt_text);
        const std::string score = cell(score_col);
        try {
            std::size_t pos = 0;
            r.gold_score = std::stod(score, &pos);
            if (pos != score.size()) throw std::invalid_argument(score);
        } catch (const std::exception&) {
            throw DataError(path + ": row " + std::to_string(rowno) + ": non-numeric score '" +
                            score + "'");
        }
        if (r.id.empty())
            throw DataError(path + ": row " + std::to_string(rowno) + ": empty id cell");
        if (!seen.insert(r.id).second)
            throw DataError(path + ": row " + std::to_string(rowno) + ": duplicate id '" + r.id +
                            "'");
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void check_csv_token(const std::string& s) {
    if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos)
        throw DataError("CSV cell contains a separator: '" + s + "'");
}

}  // namespace

void write_feature_table(const std::vector<std::pair<std::string, NamedRow>>& rows,
                         const std::string& path) {
    FeatureTable table;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [id, named] = rows[i];
        if (i == 0) {
            for (const auto& [name, _] : named) table.names.push_back(name);
        } else {
            bool same = named.size() == table.names.size();
            for (std::size_t c = 0; same && c < named.size(); ++c)
                same = named[c].first == table.names[c];
            if (!same) {
                std::set<std::string> a(table.names.begin(), table.names.end());
                std::set<std::string> b;
                for (const auto& [name, _] : named) b.insert(name);
                std::string diff;
                for (const auto& n : a)
                    if (!b.count(n)) diff += (diff.empty() ? "" : " ") + n;
                for (const auto& n : b)
                    if (!a.count(n)) diff += (diff.empty() ? "" : " ") + n;
                throw DataError("inconsistent feature sets across records; difference: " +
                                (diff.empty() ? std::string("(ordering)") : diff));
            }
        }
        table.ids.push_back(id);
        std::vector<double> vals;
        for (const auto& [_, v] : named) vals.push_back(v);
        table.rows.push_back(std::move(vals));
    }
    write_feature_table(table, path);
}

void write_feature_table(const FeatureTable& table, const std::string& path) {
    auto out = open_out(path);
    out << "id";
    for (const auto& name : table.names) {
        check_csv_token(name);
        out << ',' << name;
    }
    out << '\n';
    if (table.ids.size() != table.rows.size())
        throw DataError("feature table: id/row count mismatch");
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
        check_csv_token(table.ids[i]);
        if (table.rows[i].size() != table.names.size())
            throw DataError("feature table: row width mismatch for id " + table.ids[i]);
        out << table.ids[i];
        for (double v : table.rows[i]) out << ',' << fmt9(v);
        out << '\n';
    }
}

FeatureTable read_feature_table(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty feature table");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    FeatureTable table;
    {
        std::stringstream ss(line);
        std::string field;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (first) {
                if (field != "id") throw DataError(path + ": first column must be 'id'");
                first = false;
            } else {
                table.names.push_back(field);
            }
        }
        if (first) throw DataError(path + ": first column must be 'id'");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> vals;
        std::string id;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (first) {
                id = field;
                first = false;
            } else {
                try {
                    std::size_t pos = 0;
                    vals.push_back(std::stod(field, &pos));
                    if (pos != field.size()) throw std::invalid_argument(field);
                } catch (const std::exception&) {
                    throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric cell '" +
                                    field + "'");
                }
            }
        }
        if (vals.size() != table.names.size())
            throw DataError(path + ":" + std::to_string(lineno) + ": row width mismatch");
        table.ids.push_back(id);
        table.rows.push_back(std::move(vals));
    }
    return table;
}

std::vector<std::pair<Tokens, Tokens>> read_parallel_corpus(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::pair<Tokens, Tokens>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(path + ": corpus line without a tab separator");
        out.emplace_back(text::tokenize(line.substr(0, tab)), text::tokenize(line.substr(tab + 1)));
    }
    return out;
}

void write_parallel_corpus(const std::vector<std::pair<Tokens, Tokens>>& corpus,
                           const std::string& path) {
    auto out = open_out(path);
    for (const auto& [src, tgt] : corpus)
        out << join_tokens(src) << '\t' << join_tokens(tgt) << '\n';
}

}  // namespace uqkit::records
