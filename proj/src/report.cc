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

#include "seqshift/report.hh"

#include <sstream>

namespace seqshift {

DomainStats domain_stats(const std::vector<LmEntry>& lms,
                         const std::vector<Corpus>& corpora) {
    DomainStats stats;
    for (const auto& c : corpora)
        stats.corpus_names.push_back(c.name);
    for (const auto& lm : lms) {
        DomainStatsRow row;
        row.lm_name = lm.name;
        row.running_words = lm.model->train_running_words;
        row.vocab_size = lm.model->vocab().num_regular();
        for (const auto& corpus : corpora) {
            DomainStatsCell cell;
            cell.oov = oov_rate(corpus, lm.model->vocab());
            cell.ppl = perplexity(*lm.model, corpus).ppl;
            row.cells.push_back(cell);
        }
        stats.rows.push_back(std::move(row));
    }
    return stats;
}

std::string format_wer_percent(double wer_fraction) {
    return format_fixed(wer_fraction * 100.0, 1);
}

namespace {

std::string format_ppl(double ppl) {
    return format_fixed(ppl, 0);
}

std::string format_oov_percent(double fraction) {
    return format_fixed(fraction * 100.0, 1);
}

void render_row(std::ostringstream& out, const std::vector<std::string>& fields,
                ReportFormat format) {
    if (format == ReportFormat::kMarkdown) {
        out << "|";
        for (const auto& f : fields)
            out << " " << f << " |";
        out << "\n";
    }
    else {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i > 0)
                out << '\t';
            out << fields[i];
        }
        out << '\n';
    }
}

void render_markdown_rule(std::ostringstream& out, size_t columns) {
    out << "|";
    for (size_t i = 0; i < columns; ++i)
        out << "---|";
    out << "\n";
}

}  // namespace

std::string render_domain_stats(const DomainStats& stats, ReportFormat format) {
    std::ostringstream out;
    std::vector<std::string> header = {"LM", "Running Words", "Vocab Size"};
    for (const auto& name : stats.corpus_names) {
        header.push_back(name + " OOV[%]");
        header.push_back(name + " PPL");
    }
    render_row(out, header, format);
    if (format == ReportFormat::kMarkdown)
        render_markdown_rule(out, header.size());
    for (const auto& row : stats.rows) {
        std::vector<std::string> fields = {row.lm_name,
                                           std::to_string(row.running_words),
                                           std::to_string(row.vocab_size)};
        for (const auto& cell : row.cells) {
            if (cell.has_value()) {
                fields.push_back(format_oov_percent(cell->oov));
                fields.push_back(format_ppl(cell->ppl));
            }
            else {
                fields.push_back("-");
                fields.push_back("-");
            }
        }
        render_row(out, fields, format);
    }
    return out.str();
}

std::string render_wer_table(const WerTable& table, ReportFormat format) {
    std::ostringstream out;
    if (!table.title.empty()) {
        if (format == ReportFormat::kMarkdown)
            out << "## " << table.title << "\n\n";
        else
            out << "# " << table.title << "\n";
    }
    std::vector<std::string> header = {"Model", "Unit", "Ctx"};
    for (const auto& name : table.dataset_names)
        header.push_back(name);
    render_row(out, header, format);
    if (format == ReportFormat::kMarkdown)
        render_markdown_rule(out, header.size());
    for (const auto& row : table.rows) {
        std::vector<std::string> fields = {row.model, row.unit, row.context};
        for (const auto& wer : row.wer)
            fields.push_back(wer.has_value() ? format_wer_percent(*wer) : "-");
        render_row(out, fields, format);
    }
    return out.str();
}

WerTable parse_wer_table_tsv(const std::string& text) {
    WerTable table;
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            table.title = line.size() > 2 ? line.substr(2) : "";
            continue;
        }
        auto fields = split_on(line, '\t');
        if (!saw_header) {
            if (fields.size() < 3 || fields[0] != "Model")
                throw ValidationError("bad WER table header");
            for (size_t i = 3; i < fields.size(); ++i)
                table.dataset_names.push_back(fields[i]);
            saw_header = true;
            continue;
        }
        if (fields.size() != table.dataset_names.size() + 3)
            throw ValidationError("bad WER table row: " + line);
        WerTableRow row;
        row.model = fields[0];
        row.unit = fields[1];
        row.context = fields[2];
        for (size_t i = 3; i < fields.size(); ++i) {
            if (fields[i] == "-")
                row.wer.push_back(std::nullopt);
            else
                row.wer.push_back(std::stod(fields[i]) / 100.0);
        }
        table.rows.push_back(std::move(row));
    }
    if (!saw_header)
        throw ValidationError("empty WER table");
    return table;
}

}  // namespace seqshift
