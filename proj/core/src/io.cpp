// SPDX-License-Identifier: Apache-2.0
#include "valfuse/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "valfuse/errors.hpp"

namespace valfuse::io {

using json = nlohmann::json;

namespace {

constexpr char kMatrixMagic[4] = {'V', 'F', 'S', 'M'};
constexpr unsigned char kMatrixVersion = 1;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open file: " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot open file for writing: " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw SchemaError("write failed: " + path.string());
}

json parse_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw SchemaError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void store_json(const json& j, const std::filesystem::path& path) {
    write_file(path, j.dump(2) + "\n");
}

const json& field(const json& j, const char* key, const std::filesystem::path& path) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError("missing field '" + std::string(key) + "' in " + path.string());
    }
    return *it;
}

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

SimilarityMatrix load_matrix_binary(const std::string& data, const std::filesystem::path& path) {
    if (data.size() < 21 || std::memcmp(data.data(), kMatrixMagic, 4) != 0) {
        throw SchemaError("bad similarity-matrix header in " + path.string());
    }
    if (static_cast<unsigned char>(data[4]) != kMatrixVersion) {
        throw SchemaError("unsupported similarity-matrix version in " + path.string());
    }
    const std::uint64_t n_q = get_u64_le(data.data() + 5);
    const std::uint64_t n_g = get_u64_le(data.data() + 13);
    const std::size_t expected = 21 + n_q * n_g * 4;
    if (n_q == 0 || n_g == 0 || data.size() != expected) {
        throw SchemaError("similarity-matrix size mismatch in " + path.string());
    }
    std::vector<double> scores;
    scores.reserve(n_q * n_g);
    for (std::uint64_t i = 0; i < n_q * n_g; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
            bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[21 + i * 4 + b]))
                    << (8 * b);
        }
        float f;
        std::memcpy(&f, &bits, 4);
        if (!std::isfinite(f)) {
            throw SchemaError("non-finite score at row " + std::to_string(i / n_g) + ", col " +
                              std::to_string(i % n_g) + " in " + path.string());
        }
        scores.push_back(static_cast<double>(f));
    }
    std::vector<std::string> q_ids(n_q), g_ids(n_g);
    for (std::uint64_t i = 0; i < n_q; ++i) q_ids[i] = "q" + std::to_string(i);
    for (std::uint64_t i = 0; i < n_g; ++i) g_ids[i] = "g" + std::to_string(i);
    return SimilarityMatrix(std::move(q_ids), std::move(g_ids), std::move(scores));
}

SimilarityMatrix load_matrix_json(const json& j, const std::filesystem::path& path) {
    std::vector<std::string> q_ids = field(j, "query_ids", path).get<std::vector<std::string>>();
    std::vector<std::string> g_ids = field(j, "gallery_ids", path).get<std::vector<std::string>>();
    const json& rows = field(j, "scores", path);
    if (!rows.is_array() || rows.size() != q_ids.size()) {
        throw SchemaError("scores row count does not match query_ids in " + path.string());
    }
    std::vector<double> scores;
    scores.reserve(q_ids.size() * g_ids.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const json& row = rows[r];
        if (!row.is_array() || row.size() != g_ids.size()) {
            throw SchemaError("scores row " + std::to_string(r) +
                              " does not match gallery_ids in " + path.string());
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (!row[c].is_number()) {
                throw SchemaError("non-numeric score at row " + std::to_string(r) + ", col " +
                                  std::to_string(c) + " in " + path.string());
            }
            const double v = row[c].get<double>();
            if (!std::isfinite(v)) {
                throw SchemaError("non-finite score at row " + std::to_string(r) + ", col " +
                                  std::to_string(c) + " in " + path.string());
            }
            scores.push_back(v);
        }
    }
    try {
        return SimilarityMatrix(std::move(q_ids), std::move(g_ids), std::move(scores));
    } catch (const ArgumentError& e) {
        throw SchemaError(std::string(e.what()) + " in " + path.string());
    }
}

}  // namespace

SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    if (data.size() >= 4 && std::memcmp(data.data(), kMatrixMagic, 4) == 0) {
        return load_matrix_binary(data, path);
    }
    try {
        return load_matrix_json(json::parse(data), path);
    } catch (const json::exception& e) {
        throw SchemaError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void store_similarity_matrix(const SimilarityMatrix& m, const std::filesystem::path& path) {
    if (path.extension() == ".vfsm") {
        std::string out;
        out.reserve(21 + m.scores().size() * 4);
        out.append(kMatrixMagic, 4);
        out.push_back(static_cast<char>(kMatrixVersion));
        put_u64_le(out, m.n_queries());
        put_u64_le(out, m.n_gallery());
        for (double v : m.scores()) {
            const float f = static_cast<float>(v);
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
        }
        write_file(path, out);
        return;
    }
    json rows = json::array();
    for (std::size_t q = 0; q < m.n_queries(); ++q) {
        json row = json::array();
        for (std::size_t g = 0; g < m.n_gallery(); ++g) row.push_back(m.at(q, g));
        rows.push_back(std::move(row));
    }
    store_json(json{{"query_ids", m.query_ids()},
                    {"gallery_ids", m.gallery_ids()},
                    {"scores", std::move(rows)}},
               path);
}

RetrievalGroundTruth load_ground_truth(const std::filesystem::path& path) {
    const json j = parse_json(path);
    try {
        return RetrievalGroundTruth(field(j, "targets", path).get<std::vector<std::size_t>>(),
                                    field(j, "n_gallery", path).get<std::size_t>());
    } catch (const ArgumentError& e) {
        throw SchemaError(std::string(e.what()) + " in " + path.string());
    }
}

void store_ground_truth(const RetrievalGroundTruth& gt, const std::filesystem::path& path) {
    store_json(json{{"n_gallery", gt.n_gallery()}, {"targets", gt.targets()}}, path);
}

EnsembleWeights load_weights(const std::filesystem::path& path) {
    const json j = parse_json(path);
    try {
        return EnsembleWeights(field(j, "weights", path).get<std::vector<double>>());
    } catch (const ArgumentError& e) {
        throw SchemaError(std::string(e.what()) + " in " + path.string());
    }
}

void store_weights(const EnsembleWeights& w, const std::filesystem::path& path) {
    store_json(json{{"weights", w.values()}}, path);
}

std::vector<double> load_raw_weights(const std::filesystem::path& path) {
    const json j = parse_json(path);
    auto w = field(j, "weights", path).get<std::vector<double>>();
    for (double v : w) {
        if (!std::isfinite(v)) throw SchemaError("non-finite weight in " + path.string());
    }
    if (w.empty()) throw SchemaError("empty weight vector in " + path.string());
    return w;
}

void store_raw_weights(const std::vector<double>& w, const std::filesystem::path& path) {
    store_json(json{{"weights", w}}, path);
}

QaDataset load_qa_scores(const std::filesystem::path& path) {
    const json j = parse_json(path);
    const std::size_t n_answers = field(j, "n_answers", path).get<std::size_t>();
    auto model_ids = field(j, "model_ids", path).get<std::vector<std::string>>();
    const json& examples = field(j, "examples", path);
    if (!examples.is_array() || examples.empty()) {
        throw SchemaError("QA score file needs a non-empty 'examples' array: " + path.string());
    }
    if (model_ids.empty()) throw SchemaError("QA score file lists no models: " + path.string());

    std::vector<std::string> example_ids;
    std::vector<double> scores;
    scores.reserve(examples.size() * model_ids.size() * n_answers);
    for (const json& ex : examples) {
        example_ids.push_back(field(ex, "example_id", path).get<std::string>());
        const json& per_model = field(ex, "scores", path);
        if (!per_model.is_array() || per_model.size() != model_ids.size()) {
            throw SchemaError("example '" + example_ids.back() +
                              "' score rows do not match model_ids in " + path.string());
        }
        for (const json& row : per_model) {
            if (!row.is_array() || row.size() != n_answers) {
                throw SchemaError("example '" + example_ids.back() +
                                  "' has inconsistent n_answers in " + path.string());
            }
            for (const json& v : row) {
                if (!v.is_number() || !std::isfinite(v.get<double>())) {
                    throw SchemaError("non-finite QA score for example '" + example_ids.back() +
                                      "' in " + path.string());
                }
                scores.push_back(v.get<double>());
            }
        }
    }
    try {
        return QaDataset{QaScoreTensor(example_ids.size(), model_ids.size(), n_answers,
                                       std::move(scores)),
                         std::move(model_ids), std::move(example_ids)};
    } catch (const ArgumentError& e) {
        throw SchemaError(std::string(e.what()) + " in " + path.string());
    }
}

void store_qa_scores(const QaDataset& data, const std::filesystem::path& path) {
    json examples = json::array();
    const auto& x = data.scores;
    for (std::size_t b = 0; b < x.n_examples(); ++b) {
        json per_model = json::array();
        for (std::size_t i = 0; i < x.n_models(); ++i) {
            json row = json::array();
            for (std::size_t a = 0; a < x.n_answers(); ++a) row.push_back(x.at(b, i, a));
            per_model.push_back(std::move(row));
        }
        examples.push_back(json{{"example_id", data.example_ids[b]},
                                {"scores", std::move(per_model)}});
    }
    store_json(json{{"n_answers", x.n_answers()},
                    {"model_ids", data.model_ids},
                    {"examples", std::move(examples)}},
               path);
}

QaLabels load_qa_labels(const std::filesystem::path& path) {
    const json j = parse_json(path);
    try {
        return QaLabels(field(j, "labels", path).get<std::vector<std::size_t>>(),
                        field(j, "n_answers", path).get<std::size_t>());
    } catch (const ArgumentError& e) {
        throw SchemaError(std::string(e.what()) + " in " + path.string());
    }
}

void store_qa_labels(const QaLabels& labels, const std::filesystem::path& path) {
    store_json(json{{"n_answers", labels.n_answers()}, {"labels", labels.values()}}, path);
}

std::vector<std::size_t> load_predictions(const std::filesystem::path& path) {
    const json j = parse_json(path);
    return field(j, "predictions", path).get<std::vector<std::size_t>>();
}

void store_predictions(const std::vector<std::size_t>& predicted,
                       const std::filesystem::path& path) {
    store_json(json{{"predictions", predicted}}, path);
}

std::vector<CaptionSet> load_caption_sets(const std::filesystem::path& path) {
    const json j = parse_json(path);
    const json& sets = field(j, "sets", path);
    if (!sets.is_array()) throw SchemaError("'sets' must be an array in " + path.string());
    std::vector<CaptionSet> out;
    for (const json& s : sets) {
        CaptionSet set;
        set.video_id = field(s, "video_id", path).get<std::string>();
        for (const json& c : field(s, "captions", path)) {
            set.captions.push_back(Caption{field(c, "model_id", path).get<std::string>(),
                                           field(c, "text", path).get<std::string>()});
        }
        try {
            set.validate();
        } catch (const ArgumentError& e) {
            throw SchemaError("caption set '" + set.video_id + "': " + e.what() + " in " +
                              path.string());
        }
        out.push_back(std::move(set));
    }
    return out;
}

void store_caption_sets(const std::vector<CaptionSet>& sets, const std::filesystem::path& path) {
    json arr = json::array();
    for (const auto& s : sets) {
        json caps = json::array();
        for (const auto& c : s.captions) {
            caps.push_back(json{{"model_id", c.model_id}, {"text", c.text}});
        }
        arr.push_back(json{{"video_id", s.video_id}, {"captions", std::move(caps)}});
    }
    store_json(json{{"sets", std::move(arr)}}, path);
}

EmbeddingProvider load_embedding_provider(const std::filesystem::path& path) {
    const json j = parse_json(path);
    const std::string provider_id = field(j, "provider_id", path).get<std::string>();
    const std::size_t dim = field(j, "dim", path).get<std::size_t>();
    if (dim == 0) throw SchemaError("embedding dim must be positive in " + path.string());

    auto table = std::make_shared<std::unordered_map<std::string, std::vector<double>>>();
    for (const auto& [text, vec] : field(j, "embeddings", path).items()) {
        auto v = vec.get<std::vector<double>>();
        if (v.size() != dim) {
            throw SchemaError("embedding for caption \"" + text + "\" has dimension " +
                              std::to_string(v.size()) + ", expected " + std::to_string(dim) +
                              " in " + path.string());
        }
        for (double x : v) {
            if (!std::isfinite(x)) {
                throw SchemaError("non-finite embedding for caption \"" + text + "\" in " +
                                  path.string());
            }
        }
        (*table)[text] = std::move(v);
    }
    const std::string file = path.string();
    return EmbeddingProvider{
        provider_id, [table, file](const std::string& text) {
            auto it = table->find(text);
            if (it == table->end()) {
                throw SchemaError("embedding file " + file + " has no entry for caption \"" +
                                  text + "\"");
            }
            return it->second;
        }};
}

std::vector<MomentCandidate> load_moments(const std::filesystem::path& path) {
    const json j = parse_json(path);
    const json& arr = field(j, "moments", path);
    std::vector<MomentCandidate> out;
    for (const json& m : arr) {
        MomentCandidate c{field(m, "video_id", path).get<std::string>(),
                          field(m, "t_start", path).get<double>(),
                          field(m, "t_end", path).get<double>(),
                          field(m, "score", path).get<double>()};
        try {
            c.validate();
        } catch (const ArgumentError& e) {
            throw SchemaError("moment in video '" + c.video_id + "': " + e.what() + " in " +
                              path.string());
        }
        out.push_back(std::move(c));
    }
    return out;
}

void store_moments(const std::vector<MomentCandidate>& moments,
                   const std::filesystem::path& path) {
    json arr = json::array();
    for (const auto& m : moments) {
        arr.push_back(json{{"video_id", m.video_id},
                           {"t_start", m.t_start},
                           {"t_end", m.t_end},
                           {"score", m.score}});
    }
    store_json(json{{"moments", std::move(arr)}}, path);
}

std::vector<ModelRecord> load_model_records(const std::filesystem::path& path) {
    const json j = parse_json(path);
    std::vector<ModelRecord> out;
    for (const json& r : field(j, "models", path)) {
        ModelRecord rec{field(r, "model_id", path).get<std::string>(),
                        field(r, "validation_score", path).get<double>(),
                        r.value("prediction_path", std::string{})};
        if (!std::isfinite(rec.validation_score)) {
            throw SchemaError("non-finite validation score for model '" + rec.model_id +
                              "' in " + path.string());
        }
        out.push_back(std::move(rec));
    }
    if (out.empty()) throw SchemaError("model record file lists no models: " + path.string());
    return out;
}

void store_model_records(const std::vector<ModelRecord>& records,
                         const std::filesystem::path& path) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back(json{{"model_id", r.model_id},
                           {"validation_score", r.validation_score},
                           {"prediction_path", r.prediction_path}});
    }
    store_json(json{{"models", std::move(arr)}}, path);
}

std::vector<ModelRecord> select_top_k_models(const std::vector<ModelRecord>& records,
                                             std::size_t k) {
    if (records.empty()) throw ArgumentError("select_top_k_models: empty record list");
    if (k == 0) throw ArgumentError("select_top_k_models: k must be positive");
    std::vector<ModelRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(), [](const ModelRecord& a, const ModelRecord& b) {
        if (a.validation_score != b.validation_score) return a.validation_score > b.validation_score;
        return a.model_id < b.model_id;
    });
    if (sorted.size() > k) sorted.resize(k);
    return sorted;
}

std::size_t default_top_k(const std::string& macro_task) {
    if (macro_task == "captioning") return 8;
    if (macro_task == "qa") return 16;
    if (macro_task == "retrieval") return 32;
    throw ArgumentError("unknown macro-task '" + macro_task +
                        "' (expected captioning, qa, or retrieval)");
}

std::string augment_subtitle_with_concepts(const std::string& subtitle,
                                           const std::vector<ConceptRegion>& regions) {
    if (regions.size() > kMaxRegions) {
        throw ArgumentError("at most " + std::to_string(kMaxRegions) + " regions per frame");
    }
    std::string out = subtitle;
    for (const auto& region : regions) {
        if (region.labels.empty() || region.labels.size() > kMaxLabelsPerRegion) {
            throw ArgumentError("each region must carry 1 to " +
                                std::to_string(kMaxLabelsPerRegion) + " concept labels");
        }
        out += " [SEP] ";
        for (std::size_t i = 0; i < region.labels.size(); ++i) {
            if (i) out += ", ";
            out += region.labels[i];
        }
    }
    return out;
}

std::vector<SubtitleEntry> load_subtitles(const std::filesystem::path& path) {
    const json j = parse_json(path);
    std::vector<SubtitleEntry> out;
    for (const json& e : field(j, "subtitles", path)) {
        SubtitleEntry entry;
        entry.subtitle = field(e, "subtitle", path).get<std::string>();
        if (e.contains("regions")) {
            for (const json& r : e["regions"]) {
                entry.regions.push_back(ConceptRegion{r.get<std::vector<std::string>>()});
            }
        }
        out.push_back(std::move(entry));
    }
    return out;
}

void store_augmented_subtitles(const std::vector<std::string>& lines,
                               const std::filesystem::path& path) {
    store_json(json{{"subtitles", lines}}, path);
}

}  // namespace valfuse::io
