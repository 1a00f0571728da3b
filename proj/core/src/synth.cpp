// SPDX-License-Identifier: Apache-2.0
#include "valfuse/synth.hpp"

#include <algorithm>
#include <cmath>

#include "valfuse/errors.hpp"
#include "valfuse/metrics.hpp"
#include "valfuse/rng.hpp"

namespace valfuse::synth {

namespace {

// Quantize to float32 so scores survive the binary matrix format exactly.
double q32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

void SynthConfig::validate() const {
    if (n_queries == 0 || n_gallery == 0 || n_answers == 0 || n_captions == 0) {
        throw ArgumentError("synth config counts must be >= 1");
    }
    if (qualities.empty()) throw ArgumentError("synth config needs at least one model quality");
    for (double q : qualities) {
        if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("model quality must be in [0,1]");
    }
    if (!(noise_scale > 0.0)) throw ArgumentError("noise_scale must be positive");
}

FusionProblem gen_retrieval_problem(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);

    std::vector<std::size_t> targets(config.n_queries);
    for (auto& t : targets) t = static_cast<std::size_t>(rng.uniform_index(config.n_gallery));

    std::vector<std::string> q_ids(config.n_queries), g_ids(config.n_gallery);
    for (std::size_t i = 0; i < config.n_queries; ++i) q_ids[i] = "q" + std::to_string(i);
    for (std::size_t i = 0; i < config.n_gallery; ++i) g_ids[i] = "g" + std::to_string(i);

    std::vector<SimilarityMatrix> matrices;
    matrices.reserve(config.n_models());
    for (std::size_t model = 0; model < config.n_models(); ++model) {
        std::vector<double> scores(config.n_queries * config.n_gallery);
        for (std::size_t q = 0; q < config.n_queries; ++q) {
            for (std::size_t g = 0; g < config.n_gallery; ++g) {
                scores[q * config.n_gallery + g] = q32(rng.uniform());
            }
            const bool owns = !config.complementary || (q % config.n_models() == model);
            const bool hit = owns && rng.uniform() < config.qualities[model];
            if (hit) {
                // Strictly above every distractor, which all lie in [0,1).
                scores[q * config.n_gallery + targets[q]] =
                    q32(1.0 + rng.uniform() * config.noise_scale);
            }
        }
        matrices.emplace_back(q_ids, g_ids, std::move(scores));
    }
    return FusionProblem{std::move(matrices),
                         RetrievalGroundTruth(std::move(targets), config.n_gallery)};
}

namespace {

void enumerate_lattice(std::size_t dim, std::size_t remaining, double step,
                       std::vector<std::size_t>& counts, const FusionProblem& problem,
                       std::vector<double>& best_w, double& best_obj) {
    if (counts.size() + 1 == dim) {
        counts.push_back(remaining);
        std::vector<double> w(dim);
        for (std::size_t i = 0; i < dim; ++i) w[i] = static_cast<double>(counts[i]) * step;
        const double obj = evaluate_weights(problem, normalize_to_simplex(w));
        if (obj > best_obj) {  // lex-ascending enumeration keeps the smallest tie
            best_obj = obj;
            best_w = std::move(w);
        }
        counts.pop_back();
        return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
        counts.push_back(c);
        enumerate_lattice(dim, remaining - c, step, counts, problem, best_w, best_obj);
        counts.pop_back();
    }
}

}  // namespace

std::pair<EnsembleWeights, double> grid_search_weights(const FusionProblem& problem, double step) {
    problem.validate();
    if (problem.n_models() > 4) {
        throw ArgumentError("grid_search_weights: guarded to at most 4 models");
    }
    if (!(step > 0.0 && step <= 1.0)) throw ArgumentError("grid step must be in (0,1]");
    const double slots = 1.0 / step;
    const std::size_t m = static_cast<std::size_t>(std::llround(slots));
    if (std::abs(static_cast<double>(m) * step - 1.0) > 1e-9) {
        throw ArgumentError("grid step must divide 1 evenly");
    }

    std::vector<std::size_t> counts;
    std::vector<double> best_w;
    double best_obj = -1.0;
    enumerate_lattice(problem.n_models(), m, step, counts, problem, best_w, best_obj);
    return {normalize_to_simplex(best_w), best_obj};
}

std::vector<MomentCandidate> reference_nms(const std::vector<MomentCandidate>& cands,
                                           double iou_threshold, std::size_t max_keep) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw ArgumentError("reference_nms: iou_threshold must be in (0,1]");
    }
    if (max_keep == 0) throw ArgumentError("reference_nms: max_keep must be positive");
    for (const auto& c : cands) c.validate();

    std::vector<bool> alive(cands.size(), true);
    std::vector<MomentCandidate> kept;
    while (kept.size() < max_keep) {
        // Full scan for the best unsuppressed candidate.
        std::size_t best = cands.size();
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (!alive[i]) continue;
            if (best == cands.size() || cands[i].score > cands[best].score ||
                (cands[i].score == cands[best].score && cands[i].t_start < cands[best].t_start)) {
                best = i;
            }
        }
        if (best == cands.size()) break;
        kept.push_back(cands[best]);
        alive[best] = false;
        // Full scan suppressing overlaps.
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (alive[i] && temporal_iou(cands[best], cands[i]) >= iou_threshold) {
                alive[i] = false;
            }
        }
    }
    return kept;
}

std::vector<MomentCandidate> gen_moments(std::uint64_t seed, std::size_t count,
                                         std::size_t n_videos) {
    if (n_videos == 0) throw ArgumentError("gen_moments: n_videos must be >= 1");
    Rng rng(seed);
    std::vector<MomentCandidate> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double roll = rng.uniform();
        if (roll < 0.15 && !out.empty()) {
            // Duplicate an earlier interval with a fresh score.
            const auto& base = out[static_cast<std::size_t>(rng.uniform_index(out.size()))];
            out.push_back(MomentCandidate{base.video_id, base.t_start, base.t_end, rng.uniform()});
        } else if (roll < 0.25) {
            // IoU exactly 0.7 against a partner: intervals of length 17
            // offset by 3 give intersection 14 / union 20 with integer
            // endpoints, so the ratio is exact.
            const std::string vid = "v" + std::to_string(rng.uniform_index(n_videos));
            const double s = static_cast<double>(rng.uniform_index(1000));
            out.push_back(MomentCandidate{vid, s, s + 17.0, rng.uniform()});
            if (out.size() < count) {
                out.push_back(MomentCandidate{vid, s + 3.0, s + 20.0, rng.uniform()});
                ++i;
            }
        } else {
            const std::string vid = "v" + std::to_string(rng.uniform_index(n_videos));
            const double s = rng.uniform() * 100.0;
            out.push_back(MomentCandidate{vid, s, s + 0.5 + rng.uniform() * 10.0, rng.uniform()});
        }
    }
    return out;
}

std::pair<QaScoreTensor, QaLabels> gen_qa_problem(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const std::size_t b_n = config.n_queries;  // reuse the count as batch size
    const std::size_t m_n = config.n_models();
    const std::size_t a_n = config.n_answers;

    std::vector<std::size_t> labels(b_n);
    for (auto& l : labels) l = static_cast<std::size_t>(rng.uniform_index(a_n));

    std::vector<double> scores(b_n * m_n * a_n);
    for (std::size_t b = 0; b < b_n; ++b) {
        for (std::size_t i = 0; i < m_n; ++i) {
            for (std::size_t a = 0; a < a_n; ++a) {
                scores[(b * m_n + i) * a_n + a] = q32(rng.uniform());
            }
            const bool owns = !config.complementary || (b % m_n == i);
            if (owns && rng.uniform() < config.qualities[i]) {
                scores[(b * m_n + i) * a_n + labels[b]] =
                    q32(1.0 + rng.uniform() * config.noise_scale);
            }
        }
    }
    return {QaScoreTensor(b_n, m_n, a_n, std::move(scores)), QaLabels(std::move(labels), a_n)};
}

namespace {

const char* kWords[] = {"person", "adds", "the", "pasta", "into", "boiling", "water",
                        "a",      "man",  "cuts", "red",  "onion", "on",     "wooden",
                        "board",  "woman", "stirs", "soup", "in",   "silver", "pot"};

std::string random_sentence(Rng& rng, std::size_t n_words) {
    std::string out;
    for (std::size_t i = 0; i < n_words; ++i) {
        if (i) out += ' ';
        out += kWords[rng.uniform_index(sizeof(kWords) / sizeof(kWords[0]))];
    }
    return out;
}

}  // namespace

std::vector<CaptionSet> gen_caption_sets(const SynthConfig& config, std::size_t n_sets) {
    config.validate();
    Rng rng(config.seed);
    const std::size_t n_c = config.n_captions;
    const std::size_t n_dup = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(config.qualities[0] * static_cast<double>(n_c))), 1,
        n_c);

    std::vector<CaptionSet> sets;
    sets.reserve(n_sets);
    for (std::size_t s = 0; s < n_sets; ++s) {
        CaptionSet set;
        set.video_id = "video" + std::to_string(s);
        const std::string reference = random_sentence(rng, 6 + rng.uniform_index(4));
        for (std::size_t m = 0; m < n_c; ++m) {
            std::string text;
            if (m < n_dup) {
                text = reference;
            } else {
                do {
                    text = random_sentence(rng, 4 + rng.uniform_index(5));
                } while (text == reference);
            }
            set.captions.push_back(Caption{"model" + std::to_string(m), std::move(text)});
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

}  // namespace valfuse::synth
