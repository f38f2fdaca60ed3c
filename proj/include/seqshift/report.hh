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

#ifndef SEQSHIFT_REPORT_HH
#define SEQSHIFT_REPORT_HH

#include <optional>
#include <string>
#include <vector>

#include "seqshift/ngram.hh"
#include "seqshift/text.hh"

namespace seqshift {

enum class ReportFormat { kTsv, kMarkdown };

// Per-LM out-of-vocabulary and perplexity statistics across evaluation
// corpora, plus the LM's own training-data size columns.
struct DomainStatsCell {
    double oov = 0.0;  // fraction
    double ppl = 0.0;
};

struct DomainStatsRow {
    std::string lm_name;
    size_t running_words = 0;
    size_t vocab_size = 0;
    std::vector<std::optional<DomainStatsCell>> cells;  // one per corpus
};

struct DomainStats {
    std::vector<std::string> corpus_names;
    std::vector<DomainStatsRow> rows;
};

struct LmEntry {
    std::string name;
    const NGramModel* model = nullptr;
};

// Cross product of LMs and corpora; a cell is empty when the perplexity
// is undefined for the pair (propagated zero-probability errors are not
// caught here -- estimate smoothed models for cross-domain tables).
DomainStats domain_stats(const std::vector<LmEntry>& lms,
                         const std::vector<Corpus>& corpora);

// Word error rates of several systems across datasets, the shape of the
// comparative result tables: model rows (name, label unit, context) and
// one column per dataset. WER values are fractions; rendering prints one
// decimal as a percentage.
struct WerTableRow {
    std::string model;
    std::string unit;
    std::string context;
    std::vector<std::optional<double>> wer;
};

struct WerTable {
    std::string title;
    std::vector<std::string> dataset_names;
    std::vector<WerTableRow> rows;
};

std::string render_domain_stats(const DomainStats& stats, ReportFormat format);
std::string render_wer_table(const WerTable& table, ReportFormat format);

// Inverse of the TSV rendering; numeric fields come back exactly as
// printed (one decimal).
WerTable parse_wer_table_tsv(const std::string& text);

// One percentage with one decimal: 0.059 -> "5.9".
std::string format_wer_percent(double wer_fraction);

}  // namespace seqshift

#endif  // SEQSHIFT_REPORT_HH
