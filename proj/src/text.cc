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

#include "seqshift/text.hh"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace seqshift {

std::vector<std::string> split_whitespace(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok)
        out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        }
        else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

size_t Corpus::running_words() const {
    size_t n = 0;
    for (const auto& line : lines)
        n += line.size();
    return n;
}

Corpus load_corpus(const std::string& path, const std::string& name) {
    Corpus corpus;
    corpus.name = name;
    for (const auto& line : read_lines(path))
        corpus.lines.push_back(split_whitespace(line));
    return corpus;
}

Corpus make_corpus(const std::string& name, const std::vector<std::string>& sentences) {
    Corpus corpus;
    corpus.name = name;
    for (const auto& s : sentences)
        corpus.lines.push_back(split_whitespace(s));
    return corpus;
}

Vocabulary::Vocabulary() {
    add(bos_symbol());
    add(eos_symbol());
    add(unk_symbol());
}

TokenId Vocabulary::add(const std::string& word) {
    auto it = index_.find(word);
    if (it != index_.end())
        return it->second;
    TokenId id = static_cast<TokenId>(words_.size());
    words_.push_back(word);
    index_.emplace(word, id);
    return id;
}

TokenId Vocabulary::lookup(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& word) const {
    return index_.count(word) > 0;
}

const std::string& Vocabulary::word(TokenId id) const {
    return words_.at(static_cast<size_t>(id));
}

std::vector<TokenId> Vocabulary::predictable_ids() const {
    std::vector<TokenId> ids;
    ids.reserve(words_.size() - 1);
    for (TokenId id = 0; id < static_cast<TokenId>(words_.size()); ++id)
        if (id != kBos)
            ids.push_back(id);
    return ids;
}

Vocabulary build_vocabulary(const Corpus& corpus, size_t max_size) {
    if (corpus.empty())
        throw ValidationError("empty corpus");
    std::map<std::string, size_t> counts;
    for (const auto& line : corpus.lines)
        for (const auto& word : line)
            ++counts[word];

    std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    size_t limit = max_size == 0 ? ranked.size() : std::min(max_size, ranked.size());
    for (size_t i = 0; i < limit; ++i)
        vocab.add(ranked[i].first);
    return vocab;
}

double oov_rate(const Corpus& corpus, const Vocabulary& vocab) {
    size_t total = 0;
    size_t oov = 0;
    for (const auto& line : corpus.lines) {
        for (const auto& word : line) {
            ++total;
            if (!vocab.contains(word))
                ++oov;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(oov) / static_cast<double>(total);
}

void write_vocabulary(const Vocabulary& vocab, const std::string& path) {
    std::ostringstream out;
    for (TokenId id = Vocabulary::kNumReserved; id < static_cast<TokenId>(vocab.size()); ++id)
        out << vocab.word(id) << '\n';
    write_text_file(path, out.str());
}

Vocabulary read_vocabulary(const std::string& path) {
    Vocabulary vocab;
    for (const auto& line : read_lines(path)) {
        if (line.empty())
            continue;
        vocab.add(line);
    }
    return vocab;
}

std::vector<std::string> utf8_chars(const std::string& s) {
    std::vector<std::string> chars;
    size_t i = 0;
    while (i < s.size()) {
        size_t len = 1;
        unsigned char c = static_cast<unsigned char>(s[i]);
        if ((c & 0x80u) == 0)
            len = 1;
        else if ((c & 0xe0u) == 0xc0u)
            len = 2;
        else if ((c & 0xf0u) == 0xe0u)
            len = 3;
        else if ((c & 0xf8u) == 0xf0u)
            len = 4;
        len = std::min(len, s.size() - i);
        chars.push_back(s.substr(i, len));
        i += len;
    }
    return chars;
}

namespace {

std::vector<std::string> word_to_symbols(const std::string& word) {
    std::vector<std::string> symbols = utf8_chars(word);
    if (!symbols.empty())
        symbols.back() += BpeModel::end_of_word_marker();
    return symbols;
}

void apply_merge(std::vector<std::string>& symbols,
                 const std::pair<std::string, std::string>& merge) {
    size_t write = 0;
    size_t read = 0;
    while (read < symbols.size()) {
        if (read + 1 < symbols.size() && symbols[read] == merge.first &&
            symbols[read + 1] == merge.second) {
            symbols[write++] = merge.first + merge.second;
            read += 2;
        }
        else {
            if (write != read)
                symbols[write] = std::move(symbols[read]);
            ++write;
            ++read;
        }
    }
    symbols.resize(write);
}

}  // namespace

BpeModel bpe_learn(const Corpus& corpus, size_t num_merges) {
    if (corpus.empty())
        throw ValidationError("empty corpus");

    // Word types with frequencies; ordered map keeps everything stable.
    std::map<std::string, size_t> word_freq;
    for (const auto& line : corpus.lines)
        for (const auto& word : line)
            ++word_freq[word];

    std::vector<std::vector<std::string>> segmented;
    std::vector<size_t> freq;
    for (const auto& [word, f] : word_freq) {
        segmented.push_back(word_to_symbols(word));
        freq.push_back(f);
    }

    BpeModel model;
    for (size_t step = 0; step < num_merges; ++step) {
        std::map<std::pair<std::string, std::string>, size_t> pair_counts;
        for (size_t w = 0; w < segmented.size(); ++w)
            for (size_t i = 0; i + 1 < segmented[w].size(); ++i)
                pair_counts[{segmented[w][i], segmented[w][i + 1]}] += freq[w];
        if (pair_counts.empty())
            break;
        auto best = pair_counts.begin();
        for (auto it = pair_counts.begin(); it != pair_counts.end(); ++it)
            if (it->second > best->second)
                best = it;  // map order already breaks ties lexicographically
        model.merges.push_back(best->first);
        for (auto& symbols : segmented)
            apply_merge(symbols, best->first);
    }

    // Vocabulary: base characters of the training data plus every symbol
    // surviving in a final segmentation.
    for (const auto& [word, f] : word_freq) {
        (void)f;
        for (const auto& s : word_to_symbols(word))
            model.vocab.insert(s);
    }
    for (const auto& symbols : segmented)
        for (const auto& s : symbols)
            model.vocab.insert(s);
    return model;
}

std::vector<std::string> bpe_apply_word(const BpeModel& model, const std::string& word) {
    std::vector<std::string> symbols = word_to_symbols(word);
    for (auto& s : symbols)
        if (!model.known_symbol(s))
            s = Vocabulary::unk_symbol();
    for (const auto& merge : model.merges)
        apply_merge(symbols, merge);
    return symbols;
}

std::vector<std::string> bpe_apply(const BpeModel& model,
                                   const std::vector<std::string>& words) {
    std::vector<std::string> out;
    for (const auto& word : words) {
        auto tokens = bpe_apply_word(model, word);
        out.insert(out.end(), tokens.begin(), tokens.end());
    }
    return out;
}

double token_word_ratio(const BpeModel& model, const Corpus& corpus) {
    size_t words = 0;
    size_t tokens = 0;
    for (const auto& line : corpus.lines) {
        words += line.size();
        tokens += bpe_apply(model, line).size();
    }
    if (words == 0)
        throw ValidationError("empty corpus");
    return static_cast<double>(tokens) / static_cast<double>(words);
}

std::vector<std::string> bpe_join(const std::vector<std::string>& tokens) {
    const std::string marker = BpeModel::end_of_word_marker();
    std::vector<std::string> words;
    std::string cur;
    for (const auto& tok : tokens) {
        if (tok.size() >= marker.size() &&
            tok.compare(tok.size() - marker.size(), marker.size(), marker) == 0) {
            cur += tok.substr(0, tok.size() - marker.size());
            words.push_back(cur);
            cur.clear();
        }
        else {
            cur += tok;
        }
    }
    if (!cur.empty())
        words.push_back(cur);
    return words;
}

void write_bpe_model(const BpeModel& model, const std::string& path) {
    std::ostringstream out;
    out << "#bpe v1\n";
    for (const auto& [left, right] : model.merges)
        out << left << '\t' << right << '\n';
    write_text_file(path, out.str());
}

BpeModel read_bpe_model(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "#bpe v1")
        throw ValidationError("bad BPE model header in " + path);
    BpeModel model;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        auto fields = split_on(lines[i], '\t');
        if (fields.size() != 2)
            throw ValidationError("bad BPE merge at " + path + ":" + std::to_string(i + 1));
        model.merges.emplace_back(fields[0], fields[1]);
    }
    // The file stores merges only; rebuild the known-symbol set from their
    // closure, including the base characters the merge strings decompose to.
    const std::string marker = BpeModel::end_of_word_marker();
    for (const auto& [left, right] : model.merges) {
        for (const std::string* part : {&left, &right}) {
            model.vocab.insert(*part);
            std::string stripped = *part;
            bool marked = stripped.size() >= marker.size() &&
                          stripped.compare(stripped.size() - marker.size(),
                                           marker.size(), marker) == 0;
            if (marked)
                stripped = stripped.substr(0, stripped.size() - marker.size());
            auto chars = utf8_chars(stripped);
            for (size_t c = 0; c < chars.size(); ++c) {
                model.vocab.insert(chars[c]);
                if (marked && c + 1 == chars.size())
                    model.vocab.insert(chars[c] + marker);
            }
        }
        model.vocab.insert(left + right);
    }
    return model;
}

}  // namespace seqshift
