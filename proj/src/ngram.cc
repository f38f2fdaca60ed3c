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

#include "seqshift/ngram.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace seqshift {

NGramCounts count_ngrams(const Corpus& corpus, const Vocabulary& vocab, int order) {
    if (order < 1)
        throw ValidationError("n-gram order must be >= 1");
    NGramCounts counts;
    counts.order = order;
    counts.vocab = vocab;
    counts.tables.resize(static_cast<size_t>(order));

    for (const auto& line : corpus.lines) {
        TokenSeq padded;
        padded.reserve(line.size() + 2);
        padded.push_back(Vocabulary::kBos);
        for (const auto& word : line)
            padded.push_back(vocab.lookup(word));
        padded.push_back(Vocabulary::kEos);
        counts.running_tokens += line.size() + 1;

        for (int k = 1; k <= order; ++k) {
            for (size_t start = 0; start + k <= padded.size(); ++start) {
                // <s> is context only, never a predicted unigram.
                if (k == 1 && padded[start] == Vocabulary::kBos)
                    continue;
                TokenSeq gram(padded.begin() + start, padded.begin() + start + k);
                ++counts.tables[static_cast<size_t>(k - 1)][gram];
            }
        }
    }
    return counts;
}

NGramModel::NGramModel(int order, Vocabulary vocab)
        : order_(order), vocab_(std::move(vocab)) {
    probs_.resize(static_cast<size_t>(order));
    bows_.resize(static_cast<size_t>(order));
}

void NGramModel::set_prob(const TokenSeq& ngram, double log10_prob) {
    probs_.at(ngram.size() - 1)[ngram] = log10_prob;
}

void NGramModel::set_backoff(const TokenSeq& context, double log10_bow) {
    bows_.at(context.size() - 1)[context] = log10_bow;
}

bool NGramModel::has_prob(const TokenSeq& ngram) const {
    const auto& level = probs_.at(ngram.size() - 1);
    return level.find(ngram) != level.end();
}

double NGramModel::stored_prob(const TokenSeq& ngram) const {
    return probs_.at(ngram.size() - 1).at(ngram);
}

double NGramModel::stored_backoff_or_zero(const TokenSeq& context) const {
    if (context.empty() || context.size() >= static_cast<size_t>(order_))
        return 0.0;
    const auto& level = bows_.at(context.size() - 1);
    auto it = level.find(context);
    return it == level.end() ? 0.0 : it->second;
}

LmState NGramModel::advance_state(const LmState& state, TokenId token) const {
    TokenSeq next = state.context;
    next.push_back(token);
    size_t keep = static_cast<size_t>(std::max(order_ - 1, 0));
    if (next.size() > keep)
        next.erase(next.begin(), next.end() - static_cast<long>(keep));
    return LmState{next};
}

std::pair<double, LmState> NGramModel::lm_logprob(const LmState& state,
                                                  TokenId token) const {
    size_t max_ctx = std::min(state.context.size(),
                              static_cast<size_t>(std::max(order_ - 1, 0)));
    double bow_sum = 0.0;
    for (size_t len = max_ctx + 1; len-- > 0;) {
        TokenSeq gram(state.context.end() - static_cast<long>(len), state.context.end());
        gram.push_back(token);
        const auto& level = probs_.at(gram.size() - 1);
        auto it = level.find(gram);
        if (it != level.end())
            return {bow_sum + it->second, advance_state(state, token)};
        if (len > 0) {
            TokenSeq ctx(state.context.end() - static_cast<long>(len),
                         state.context.end());
            bow_sum += stored_backoff_or_zero(ctx);
        }
    }
    // Token missing even at the unigram level.
    return {bow_sum + kLog10PseudoZero, advance_state(state, token)};
}

std::vector<TokenSeq> NGramModel::sorted_level(int k) const {
    std::vector<TokenSeq> grams;
    grams.reserve(probs_.at(k - 1).size());
    for (const auto& [gram, prob] : probs_.at(k - 1)) {
        (void)prob;
        grams.push_back(gram);
    }
    std::sort(grams.begin(), grams.end());
    return grams;
}

namespace {

// Sum and distinct-continuation count per context of one count level.
struct ContextTotals {
    std::map<TokenSeq, size_t> total;
    std::map<TokenSeq, size_t> distinct;
};

ContextTotals context_totals(const std::map<TokenSeq, size_t>& level) {
    ContextTotals out;
    for (const auto& [gram, count] : level) {
        TokenSeq ctx(gram.begin(), gram.end() - 1);
        out.total[ctx] += count;
        out.distinct[ctx] += 1;
    }
    return out;
}

}  // namespace

NGramModel estimate_ngram(const NGramCounts& counts, Smoothing smoothing,
                          double discount) {
    if (smoothing == Smoothing::kAbsoluteDiscount &&
        (discount <= 0.0 || discount >= 1.0))
        throw ValidationError("absolute discount must be in (0,1)");

    NGramModel model(counts.order, counts.vocab);
    const auto& vocab = model.vocab();
    const auto predictable = vocab.predictable_ids();
    const double uniform = 1.0 / static_cast<double>(predictable.size());

    // <s> gets the ARPA pseudo-probability so every bigram has a listed
    // prefix; it is never predicted.
    model.set_prob({Vocabulary::kBos}, kLog10PseudoZero);

    for (int k = 1; k <= counts.order; ++k) {
        const auto& level = counts.level(k);
        ContextTotals totals = context_totals(level);

        if (smoothing == Smoothing::kMle) {
            for (const auto& [gram, count] : level) {
                TokenSeq ctx(gram.begin(), gram.end() - 1);
                double p = static_cast<double>(count) /
                           static_cast<double>(totals.total.at(ctx));
                model.set_prob(gram, std::log10(p));
            }
            // Zero backoff mass: anything unseen at this level is impossible.
            for (const auto& [ctx, n] : totals.total) {
                (void)n;
                if (!ctx.empty())
                    model.set_backoff(ctx, kLog10PseudoZero);
            }
            continue;
        }

        // Interpolated absolute discounting: seen mass discounted, the
        // freed mass interpolates with the next-lower distribution.
        for (const auto& [gram, count] : level) {
            TokenSeq ctx(gram.begin(), gram.end() - 1);
            double n = static_cast<double>(totals.total.at(ctx));
            double gamma = discount * static_cast<double>(totals.distinct.at(ctx)) / n;
            TokenId token = gram.back();
            double base = (static_cast<double>(count) - discount) / n;
            double lower;
            if (k == 1) {
                lower = uniform;
            }
            else {
                TokenSeq sub(ctx.begin() + 1, ctx.end());
                lower = std::pow(10.0, model.score(LmState{sub}, token));
            }
            model.set_prob(gram, std::log10(base + gamma * lower));
        }
        // The discounted mass of each context of this level is its backoff
        // weight; the empty unigram context interpolates explicitly below.
        for (const auto& [ctx, n] : totals.total) {
            if (ctx.empty())
                continue;
            model.set_backoff(
                    ctx, std::log10(discount *
                                    static_cast<double>(totals.distinct.at(ctx)) /
                                    static_cast<double>(n)));
        }

        if (k == 1) {
            // Every unseen predictable word receives its uniform share of
            // the discounted mass, so the unigram level is dense.
            double gamma1 = 0.0;
            TokenSeq empty_ctx;
            if (totals.total.count(empty_ctx) > 0)
                gamma1 = discount *
                         static_cast<double>(totals.distinct.at(empty_ctx)) /
                         static_cast<double>(totals.total.at(empty_ctx));
            for (TokenId id : predictable) {
                TokenSeq gram{id};
                if (!model.has_prob(gram)) {
                    if (gamma1 <= 0.0)
                        model.set_prob(gram, kLog10PseudoZero);
                    else
                        model.set_prob(gram, std::log10(gamma1 * uniform));
                }
            }
        }
    }

    model.train_running_words = counts.running_tokens;
    return model;
}

PerplexityResult perplexity(const NGramModel& model, const Corpus& corpus) {
    if (corpus.empty())
        throw ValidationError("empty corpus");
    PerplexityResult result;
    double sum_log10 = 0.0;
    for (const auto& line : corpus.lines) {
        LmState state = model.initial_state();
        for (const auto& word : line) {
            TokenId id = model.vocab().lookup(word);
            if (id == Vocabulary::kUnk && word != Vocabulary::unk_symbol())
                ++result.oov_tokens;
            auto [lp, next] = model.lm_logprob(state, id);
            if (lp <= kLog10ZeroThreshold)
                throw std::runtime_error("zero probability for token '" + word + "'");
            sum_log10 += lp;
            state = next;
            ++result.scored_tokens;
        }
        auto [lp, next] = model.lm_logprob(state, Vocabulary::kEos);
        (void)next;
        if (lp <= kLog10ZeroThreshold)
            throw std::runtime_error("zero probability for sentence end");
        sum_log10 += lp;
        ++result.scored_tokens;
    }
    result.ppl = std::pow(10.0, -sum_log10 / static_cast<double>(result.scored_tokens));
    return result;
}

double renormalize_subword_ppl(double subword_ppl, size_t token_count,
                               size_t word_count) {
    if (word_count == 0)
        throw ValidationError("word count must be positive");
    if (token_count == 0)
        throw ValidationError("token count must be positive");
    double ratio = static_cast<double>(token_count) / static_cast<double>(word_count);
    return std::pow(subword_ppl, ratio);
}

namespace {

std::string format_log10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    // Avoid "-0.000000" so that output bytes are stable.
    if (std::string(buf) == "-0.000000")
        return "0.000000";
    return buf;
}

}  // namespace

std::string write_arpa_string(const NGramModel& model) {
    std::ostringstream out;
    out << "\\data\\\n";
    for (int k = 1; k <= model.order(); ++k)
        out << "ngram " << k << "=" << model.level_size(k) << "\n";
    out << "\n";
    for (int k = 1; k <= model.order(); ++k) {
        out << "\\" << k << "-grams:\n";
        for (const auto& gram : model.sorted_level(k)) {
            out << format_log10(model.stored_prob(gram)) << '\t';
            for (size_t j = 0; j < gram.size(); ++j) {
                if (j > 0)
                    out << ' ';
                out << model.vocab().word(gram[j]);
            }
            if (k < model.order()) {
                double bow = model.stored_backoff_or_zero(gram);
                if (bow != 0.0)
                    out << '\t' << format_log10(bow);
            }
            out << "\n";
        }
        out << "\n";
    }
    out << "\\end\\\n";
    return out.str();
}

void write_arpa(const NGramModel& model, const std::string& path) {
    write_text_file(path, write_arpa_string(model));
}

namespace {

[[noreturn]] void arpa_error(size_t line_no, const std::string& msg) {
    throw ValidationError("ARPA parse error at line " + std::to_string(line_no + 1) +
                          ": " + msg);
}

}  // namespace

NGramModel read_arpa_string(const std::string& text) {
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            lines.push_back(line);
        }
    }

    size_t i = 0;
    while (i < lines.size() && lines[i] != "\\data\\")
        ++i;
    if (i == lines.size())
        throw ValidationError("ARPA parse error: missing \\data\\ section");
    ++i;

    std::vector<size_t> declared;  // declared[k-1] = number of k-grams
    for (; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty())
            continue;
        if (line.rfind("ngram ", 0) != 0)
            break;
        auto rest = line.substr(6);
        auto eq = rest.find('=');
        if (eq == std::string::npos)
            arpa_error(i, "malformed ngram declaration");
        int k = 0;
        size_t n = 0;
        try {
            k = std::stoi(rest.substr(0, eq));
            n = static_cast<size_t>(std::stoull(rest.substr(eq + 1)));
        } catch (const std::exception&) {
            arpa_error(i, "malformed ngram declaration");
        }
        if (k != static_cast<int>(declared.size()) + 1)
            arpa_error(i, "non-contiguous ngram orders");
        declared.push_back(n);
    }
    if (declared.empty())
        throw ValidationError("ARPA parse error: empty \\data\\ section");

    NGramModel model(static_cast<int>(declared.size()), Vocabulary());
    Vocabulary vocab;  // grown while reading the unigram section

    int expect_level = 1;
    for (; i < lines.size(); ++i) {
        const std::string& header = lines[i];
        if (header.empty())
            continue;
        if (header == "\\end\\") {
            if (expect_level <= model.order())
                arpa_error(i, "missing \\" + std::to_string(expect_level) + "-grams: section");
            // Rebuild with the final vocabulary, re-inserting all entries.
            NGramModel out(model.order(), vocab);
            for (int k = 1; k <= model.order(); ++k)
                for (const auto& gram : model.sorted_level(k)) {
                    out.set_prob(gram, model.stored_prob(gram));
                    double bow = model.stored_backoff_or_zero(gram);
                    if (bow != 0.0)
                        out.set_backoff(gram, bow);
                }
            return out;
        }
        std::string expected = "\\" + std::to_string(expect_level) + "-grams:";
        if (header != expected)
            arpa_error(i, "expected " + expected + " or \\end\\, got '" + header + "'");

        size_t listed = 0;
        ++i;
        for (; i < lines.size(); ++i) {
            const std::string& line = lines[i];
            if (line.empty())
                break;
            if (line[0] == '\\') {
                --i;
                break;
            }
            auto fields = split_whitespace(line);
            size_t k = static_cast<size_t>(expect_level);
            if (fields.size() != k + 1 && fields.size() != k + 2)
                arpa_error(i, "expected " + std::to_string(k + 1) + " or " +
                                      std::to_string(k + 2) + " fields");
            double prob = 0.0;
            try {
                prob = std::stod(fields[0]);
            } catch (const std::exception&) {
                arpa_error(i, "bad probability '" + fields[0] + "'");
            }
            if (prob > 1e-9)
                arpa_error(i, "positive log-probability");
            TokenSeq gram;
            for (size_t f = 1; f <= k; ++f) {
                if (expect_level == 1) {
                    gram.push_back(vocab.add(fields[f]));
                }
                else {
                    if (!vocab.contains(fields[f]))
                        arpa_error(i, "word '" + fields[f] + "' not in unigram section");
                    gram.push_back(vocab.lookup(fields[f]));
                }
            }
            model.set_prob(gram, prob);
            if (fields.size() == k + 2) {
                if (expect_level >= model.order())
                    arpa_error(i, "backoff weight on highest order");
                model.set_backoff(gram, std::stod(fields[k + 1]));
            }
            ++listed;
        }
        if (listed != declared[static_cast<size_t>(expect_level - 1)])
            throw ValidationError(
                    "ARPA count mismatch in \\" + std::to_string(expect_level) +
                    "-grams: declared " +
                    std::to_string(declared[static_cast<size_t>(expect_level - 1)]) +
                    ", found " + std::to_string(listed));
        ++expect_level;
    }
    throw ValidationError("ARPA parse error: missing \\end\\");
}

NGramModel read_arpa(const std::string& path) {
    return read_arpa_string(read_text_file(path));
}

}  // namespace seqshift
