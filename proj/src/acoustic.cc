// Copyright 2026  The seqshift authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqshift/acoustic.hh"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace seqshift {

LabelSet::LabelSet(const std::vector<std::string>& labels) {
    for (const auto& l : labels)
        add(l);
}

LabelId LabelSet::add(const std::string& label) {
    auto it = index_.find(label);
    if (it != index_.end())
        return it->second;
    LabelId id = static_cast<LabelId>(labels_.size());
    labels_.push_back(label);
    index_.emplace(label, id);
    return id;
}

LabelId LabelSet::id(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end())
        throw ValidationError("unknown label: " + label);
    return it->second;
}

bool LabelSet::contains(const std::string& label) const {
    return index_.count(label) > 0;
}

LabelSet inventory_labels(const PhonemeInventory& inventory, bool with_blank) {
    LabelSet set(inventory.symbols());
    if (with_blank)
        set.add(LabelSet::blank_symbol());
    return set;
}

LabelSet context_labels(const PhonemeInventory& inventory) {
    LabelSet set(inventory.symbols());
    set.add(LabelSet::boundary_symbol());
    return set;
}

namespace {

constexpr double kRowTolerance = 1e-5;

void check_row(const double* row, size_t n, const char* what) {
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i)
        sum += std::exp(row[i]);
    if (std::abs(sum - 1.0) > kRowTolerance)
        throw ValidationError(std::string(what) + " not normalized (sum " +
                              std::to_string(sum) + ")");
}

void check_row_f(const float* row, size_t n, const char* what) {
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i)
        sum += std::exp(static_cast<double>(row[i]));
    if (std::abs(sum - 1.0) > kRowTolerance)
        throw ValidationError(std::string(what) + " not normalized (sum " +
                              std::to_string(sum) + ")");
}

}  // namespace

Posteriorgram make_posteriorgram(LabelSet labels,
                                 const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
        throw ValidationError("posteriorgram needs at least one frame");
    Posteriorgram pg;
    pg.labels = std::move(labels);
    pg.num_frames = static_cast<int32_t>(rows.size());
    pg.log_probs.reserve(rows.size() * pg.labels.size());
    for (const auto& row : rows) {
        if (row.size() != pg.labels.size())
            throw ValidationError("posteriorgram row width mismatch");
        check_row(row.data(), row.size(), "row");
        for (double v : row)
            pg.log_probs.push_back(static_cast<float>(v));
    }
    return pg;
}

namespace {

// Shared binary container: magic "PGRM", u32 version=1, u32 T, u32 V,
// V null-terminated UTF-8 labels, then T*V little-endian f32 values.
struct PgmRaw {
    std::vector<std::string> labels;
    uint32_t num_frames = 0;
    std::vector<float> values;
};

void write_u32(std::ostream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t read_u32(std::istream& in, const std::string& path) {
    uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), 4))
        throw ValidationError("unexpected end of posteriorgram file " + path);
    return v;
}

void write_pgm_raw(const PgmRaw& raw, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out.write("PGRM", 4);
    write_u32(out, 1);
    write_u32(out, raw.num_frames);
    write_u32(out, static_cast<uint32_t>(raw.labels.size()));
    for (const auto& l : raw.labels)
        out.write(l.c_str(), static_cast<std::streamsize>(l.size()) + 1);
    out.write(reinterpret_cast<const char*>(raw.values.data()),
              static_cast<std::streamsize>(raw.values.size() * sizeof(float)));
    if (!out)
        throw std::runtime_error("short write to " + path);
}

PgmRaw read_pgm_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open posteriorgram file " + path);
    char magic[4];
    if (!in.read(magic, 4))
        throw ValidationError("unexpected end of posteriorgram file " + path);
    if (std::memcmp(magic, "PGRM", 4) != 0)
        throw ValidationError("bad magic in posteriorgram file " + path);
    uint32_t version = read_u32(in, path);
    if (version != 1)
        throw ValidationError("unsupported posteriorgram version in " + path);
    PgmRaw raw;
    raw.num_frames = read_u32(in, path);
    uint32_t num_labels = read_u32(in, path);
    if (raw.num_frames == 0 || num_labels == 0)
        throw ValidationError("empty posteriorgram in " + path);
    uint64_t cells = static_cast<uint64_t>(raw.num_frames) * num_labels;
    if (cells > (1ull << 31))
        throw ValidationError("posteriorgram dimensions overflow in " + path);
    raw.labels.reserve(num_labels);
    for (uint32_t i = 0; i < num_labels; ++i) {
        std::string label;
        char c;
        for (;;) {
            if (!in.get(c))
                throw ValidationError("unexpected end of posteriorgram file " + path);
            if (c == '\0')
                break;
            label.push_back(c);
        }
        raw.labels.push_back(label);
    }
    raw.values.resize(cells);
    if (!in.read(reinterpret_cast<char*>(raw.values.data()),
                 static_cast<std::streamsize>(cells * sizeof(float))))
        throw ValidationError("unexpected end of posteriorgram file " + path);
    return raw;
}

}  // namespace

void save_posteriorgram(const Posteriorgram& pg, const std::string& path) {
    PgmRaw raw;
    raw.labels = pg.labels.labels();
    raw.num_frames = static_cast<uint32_t>(pg.num_frames);
    raw.values = pg.log_probs;
    write_pgm_raw(raw, path);
}

Posteriorgram load_posteriorgram(const std::string& path) {
    PgmRaw raw = read_pgm_raw(path);
    Posteriorgram pg;
    pg.labels = LabelSet(raw.labels);
    if (pg.labels.size() != raw.labels.size())
        throw ValidationError("duplicate labels in posteriorgram file " + path);
    pg.num_frames = static_cast<int32_t>(raw.num_frames);
    pg.log_probs = std::move(raw.values);
    for (int32_t t = 0; t < pg.num_frames; ++t)
        check_row_f(pg.log_probs.data() + static_cast<size_t>(t) * pg.labels.size(),
                    pg.labels.size(), "row");
    return pg;
}

void save_factored_scores(const FactoredScores& fs, const std::string& base_path) {
    size_t l_size = fs.contexts.size();
    size_t c_size = fs.centers.size();

    PgmRaw left;
    left.num_frames = static_cast<uint32_t>(fs.num_frames);
    left.labels = fs.contexts.labels();
    left.values = fs.left;
    write_pgm_raw(left, base_path + ".l.pgm");

    PgmRaw center;
    center.num_frames = static_cast<uint32_t>(fs.num_frames);
    for (size_t l = 0; l < l_size; ++l)
        for (size_t c = 0; c < c_size; ++c)
            center.labels.push_back(fs.centers.label(static_cast<LabelId>(c)) + "|" +
                                    fs.contexts.label(static_cast<LabelId>(l)));
    center.values = fs.center;
    write_pgm_raw(center, base_path + ".cl.pgm");

    PgmRaw right;
    right.num_frames = static_cast<uint32_t>(fs.num_frames);
    for (size_t l = 0; l < l_size; ++l)
        for (size_t c = 0; c < c_size; ++c)
            for (size_t r = 0; r < l_size; ++r)
                right.labels.push_back(fs.contexts.label(static_cast<LabelId>(r)) + "|" +
                                       fs.centers.label(static_cast<LabelId>(c)) + "," +
                                       fs.contexts.label(static_cast<LabelId>(l)));
    right.values = fs.right;
    write_pgm_raw(right, base_path + ".rcl.pgm");
}

FactoredScores load_factored_scores(const std::string& base_path) {
    PgmRaw left = read_pgm_raw(base_path + ".l.pgm");
    PgmRaw center = read_pgm_raw(base_path + ".cl.pgm");
    PgmRaw right = read_pgm_raw(base_path + ".rcl.pgm");

    FactoredScores fs;
    fs.contexts = LabelSet(left.labels);
    fs.num_frames = static_cast<int32_t>(left.num_frames);
    if (center.num_frames != left.num_frames || right.num_frames != left.num_frames)
        throw ValidationError("factored score files disagree on frame count");

    // Centers are recovered from the "c|l" composite labels of the first
    // block (l fixed to context 0).
    size_t l_size = fs.contexts.size();
    if (center.labels.size() % l_size != 0)
        throw ValidationError("factored center table has bad width");
    size_t c_size = center.labels.size() / l_size;
    std::vector<std::string> centers;
    for (size_t c = 0; c < c_size; ++c) {
        const std::string& composite = center.labels[c];
        auto bar = composite.find('|');
        if (bar == std::string::npos)
            throw ValidationError("bad composite label '" + composite + "'");
        centers.push_back(composite.substr(0, bar));
    }
    fs.centers = LabelSet(centers);

    if (right.labels.size() != l_size * c_size * l_size)
        throw ValidationError("factored right table has bad width");

    fs.left = std::move(left.values);
    fs.center = std::move(center.values);
    fs.right = std::move(right.values);

    // Per-block normalization checks.
    for (int32_t t = 0; t < fs.num_frames; ++t) {
        check_row_f(fs.left.data() + static_cast<size_t>(t) * l_size, l_size,
                    "left factor row");
        for (size_t l = 0; l < l_size; ++l)
            check_row_f(fs.center.data() +
                                (static_cast<size_t>(t) * l_size + l) * c_size,
                        c_size, "center factor row");
        for (size_t l = 0; l < l_size; ++l)
            for (size_t c = 0; c < c_size; ++c)
                check_row_f(fs.right.data() +
                                    ((static_cast<size_t>(t) * l_size + l) * c_size + c) *
                                            l_size,
                            l_size, "right factor row");
    }
    return fs;
}

ContextPrior::ContextPrior(LabelSet labels, int order, std::vector<double> probs,
                           double floor)
        : labels_(std::move(labels)), order_(order), probs_(std::move(probs)),
          floor_(floor) {
    size_t expect = 1;
    for (int i = 0; i < order_; ++i)
        expect *= labels_.size();
    if (probs_.size() != expect)
        throw ValidationError("context prior table size mismatch");
}

size_t ContextPrior::index(const ContextTuple& tuple) const {
    if (tuple.size() != static_cast<size_t>(order_))
        throw ValidationError("context tuple arity mismatch");
    size_t idx = 0;
    for (LabelId id : tuple) {
        if (id < 0 || static_cast<size_t>(id) >= labels_.size())
            throw ValidationError("context tuple label out of range");
        idx = idx * labels_.size() + static_cast<size_t>(id);
    }
    return idx;
}

double ContextPrior::prob(const ContextTuple& tuple) const {
    return probs_[index(tuple)];
}

double ContextPrior::log_prob(const ContextTuple& tuple) const {
    return std::log(prob(tuple));
}

double ContextPrior::total_mass() const {
    double sum = 0.0;
    for (double p : probs_)
        sum += p;
    return sum;
}

ContextPrior estimate_context_prior(
        const std::vector<std::vector<ContextTuple>>& alignments, LabelSet labels,
        int order, double floor) {
    if (alignments.empty())
        throw ValidationError("no alignments");
    size_t table = 1;
    for (int i = 0; i < order; ++i)
        table *= labels.size();

    std::vector<double> counts(table, 0.0);
    size_t frames = 0;
    for (const auto& alignment : alignments) {
        for (const auto& tuple : alignment) {
            if (tuple.size() != static_cast<size_t>(order))
                throw ValidationError("alignment tuple arity mismatch");
            size_t idx = 0;
            for (LabelId id : tuple) {
                if (id < 0 || static_cast<size_t>(id) >= labels.size())
                    throw ValidationError("alignment label out of range");
                idx = idx * labels.size() + static_cast<size_t>(id);
            }
            counts[idx] += 1.0;
            ++frames;
        }
    }
    if (frames == 0)
        throw ValidationError("no aligned frames");

    double z = 0.0;
    for (double& c : counts) {
        c = std::max(c / static_cast<double>(frames), floor);
        z += c;
    }
    for (double& c : counts)
        c /= z;
    return ContextPrior(std::move(labels), order, std::move(counts), floor);
}

namespace {

NGramCounts count_label_ngrams(const std::vector<std::vector<LabelId>>& transcripts,
                               const Vocabulary& vocab,
                               const std::vector<TokenId>& label_to_token,
                               int order) {
    // No sentence padding: the internal LM sees output labels only.
    NGramCounts counts;
    counts.order = order;
    counts.vocab = vocab;
    counts.tables.resize(static_cast<size_t>(order));
    for (const auto& t : transcripts) {
        counts.running_tokens += t.size();
        for (int k = 1; k <= order; ++k)
            for (size_t start = 0; start + static_cast<size_t>(k) <= t.size(); ++start) {
                TokenSeq gram;
                for (size_t j = start; j < start + static_cast<size_t>(k); ++j)
                    gram.push_back(label_to_token.at(static_cast<size_t>(t[j])));
                ++counts.tables[static_cast<size_t>(k - 1)][gram];
            }
    }
    return counts;
}

}  // namespace

IlmModel estimate_ilm(const std::vector<std::vector<LabelId>>& transcripts,
                      const LabelSet& labels, int context_order, Smoothing smoothing,
                      double discount, bool with_boundaries) {
    if (transcripts.empty())
        throw ValidationError("no transcripts");
    if (context_order < 0)
        throw ValidationError("negative context order");

    IlmModel ilm;
    ilm.context_order_ = context_order;
    ilm.with_boundaries_ = with_boundaries;
    ilm.labels_ = labels;

    Vocabulary vocab;
    ilm.label_to_token_.resize(labels.size());
    for (size_t i = 0; i < labels.size(); ++i)
        ilm.label_to_token_[i] = vocab.add(labels.label(static_cast<LabelId>(i)));

    int lm_order = context_order + 1;
    if (with_boundaries) {
        // Reuses the corpus path of the n-gram module, including sentence
        // symbols, so an explicit end-of-sequence event is defined.
        Corpus corpus;
        corpus.name = "ilm";
        for (const auto& t : transcripts) {
            std::vector<std::string> line;
            for (LabelId id : t)
                line.push_back(labels.label(id));
            corpus.lines.push_back(line);
        }
        ilm.lm_ = estimate_ngram(count_ngrams(corpus, vocab, lm_order), smoothing,
                                 discount);
    }
    else {
        ilm.lm_ = estimate_ngram(
                count_label_ngrams(transcripts, vocab, ilm.label_to_token_, lm_order),
                smoothing, discount);
    }
    return ilm;
}

double IlmModel::score(const std::vector<LabelId>& history, LabelId label) const {
    TokenSeq context;
    size_t ctx = std::min(history.size(), static_cast<size_t>(context_order_));
    if (with_boundaries_ && history.size() < static_cast<size_t>(context_order_))
        context.push_back(Vocabulary::kBos);
    for (size_t i = history.size() - ctx; i < history.size(); ++i)
        context.push_back(label_to_token_.at(static_cast<size_t>(history[i])));

    TokenId token;
    if (label == kEndOfSequence) {
        if (!with_boundaries_)
            throw ValidationError("end-of-sequence scored by a boundary-free ILM");
        token = Vocabulary::kEos;
    }
    else {
        if (label < 0 || static_cast<size_t>(label) >= labels_.size())
            throw ValidationError("ILM label out of range");
        token = label_to_token_.at(static_cast<size_t>(label));
    }
    return lm_.score(LmState{context}, token) * std::numbers::ln10;
}

double fh_score(const FactoredScores& factors, const ContextPrior& prior, int32_t t,
                LabelId left, LabelId center, LabelId right, double alpha) {
    if (left < 0 || static_cast<size_t>(left) >= factors.contexts.size())
        throw ValidationError("left context out of range");
    if (center < 0 || static_cast<size_t>(center) >= factors.centers.size())
        throw ValidationError("center label out of range");
    double score = factors.log_left(t, left) + factors.log_center(t, left, center);
    if (right == kNoContext) {
        if (alpha != 0.0)
            score -= alpha * prior.log_prob({left, center});
        return score;
    }
    if (right < 0 || static_cast<size_t>(right) >= factors.contexts.size())
        throw ValidationError("right context out of range");
    score += factors.log_right(t, left, center, right);
    if (alpha != 0.0)
        score -= alpha * prior.log_prob({left, center, right});
    return score;
}

double ctc_score(const Posteriorgram& pg, const ContextPrior& prior, int32_t t,
                 LabelId label, double alpha) {
    double score = pg.at(t, label);
    if (alpha != 0.0)
        score -= alpha * prior.log_prob({label});
    return score;
}

double transducer_score(const TransducerStep& step, const IlmModel& ilm,
                        LabelId label, const std::vector<LabelId>& history,
                        double alpha) {
    for (LabelId h : history)
        if (h < 0 || static_cast<size_t>(h) >= ilm.labels().size())
            throw ValidationError("history label out of range");
    if (label == kBlankLabel)
        return step.blank_log_prob;
    double score = step.label_log_probs.at(static_cast<size_t>(label));
    if (alpha != 0.0)
        score -= alpha * ilm.score(history, label);
    return score;
}

}  // namespace seqshift
