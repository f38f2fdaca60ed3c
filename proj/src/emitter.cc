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

#include "seqshift/emitter.hh"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqshift/rng.hh"

namespace seqshift {

std::vector<int32_t> sample_durations(const LabelSet& labels,
                                      const std::vector<LabelId>& sequence,
                                      const EmitterConfig& cfg) {
    if (sequence.empty())
        throw ValidationError("empty label sequence");
    std::vector<int32_t> durations;
    durations.reserve(sequence.size());
    for (LabelId id : sequence) {
        int32_t d = cfg.durations.frames_for(labels.label(id));
        if (d < 1)
            throw ValidationError("durations must be at least one frame");
        durations.push_back(d);
    }
    return durations;
}

std::vector<LabelId> expand_durations(const std::vector<LabelId>& sequence,
                                      const std::vector<int32_t>& durations) {
    std::vector<LabelId> frames;
    for (size_t i = 0; i < sequence.size(); ++i)
        for (int32_t k = 0; k < durations[i]; ++k)
            frames.push_back(sequence[i]);
    return frames;
}

namespace {

// One normalized log-probability row from logits.
std::vector<double> softmax_log(const std::vector<double>& logits) {
    double max = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits)
        z += std::exp(v - max);
    double log_z = max + std::log(z);
    std::vector<double> row(logits.size());
    for (size_t i = 0; i < logits.size(); ++i)
        row[i] = logits[i] - log_z;
    return row;
}

std::vector<double> noisy_onehot_row(size_t n, size_t hot, double gain, double tau,
                                     const std::vector<double>& noise,
                                     const std::vector<size_t>& noise_index) {
    std::vector<double> logits(n, 0.0);
    for (size_t i = 0; i < n; ++i)
        logits[i] = tau * noise[noise_index[i]];
    logits[hot] += gain;
    return softmax_log(logits);
}

}  // namespace

namespace {

Posteriorgram synth_rows(const LabelSet& labels, const std::vector<LabelId>& frames,
                         const EmitterConfig& cfg) {
    RandomStream rng(cfg.seed);
    std::vector<size_t> identity(labels.size());
    for (size_t i = 0; i < identity.size(); ++i)
        identity[i] = i;
    std::vector<std::vector<double>> rows;
    rows.reserve(frames.size());
    std::vector<double> noise(labels.size());
    for (LabelId ref : frames) {
        for (auto& v : noise)
            v = rng.next_normal();
        rows.push_back(noisy_onehot_row(labels.size(), static_cast<size_t>(ref),
                                        cfg.gain, cfg.temperature, noise, identity));
    }
    return make_posteriorgram(labels, rows);
}

}  // namespace

Posteriorgram synth_posteriorgram(const LabelSet& labels,
                                  const std::vector<LabelId>& label_sequence,
                                  const EmitterConfig& cfg) {
    auto durations = sample_durations(labels, label_sequence, cfg);
    return synth_rows(labels, expand_durations(label_sequence, durations), cfg);
}

Posteriorgram synth_transducer_posteriorgram(const LabelSet& labels,
                                             const std::vector<LabelId>& units,
                                             const EmitterConfig& cfg) {
    LabelId blank = labels.id(LabelSet::blank_symbol());
    auto durations = sample_durations(labels, units, cfg);
    std::vector<LabelId> frames;
    for (size_t i = 0; i < units.size(); ++i) {
        frames.push_back(units[i]);
        for (int32_t k = 1; k < durations[i]; ++k)
            frames.push_back(blank);
    }
    return synth_rows(labels, frames, cfg);
}

UtteranceScores synth_word_scores(const Lexicon& lexicon,
                                  const std::vector<TokenId>& words,
                                  const EmitterConfig& cfg) {
    const PhonemeInventory& inv = lexicon.inventory();
    LabelSet phones = inventory_labels(inv, true);
    LabelSet contexts = context_labels(inv);
    LabelId wb = contexts.id(LabelSet::boundary_symbol());

    // Reference alignment with word-internal contexts.
    std::vector<LabelId> centers, lefts, rights;
    for (TokenId w : words) {
        const auto& pron = lexicon.pronunciations(w).front();
        for (size_t j = 0; j < pron.size(); ++j) {
            centers.push_back(pron[j]);
            lefts.push_back(j == 0 ? wb : pron[j - 1]);
            rights.push_back(j + 1 == pron.size() ? wb : pron[j + 1]);
        }
    }
    if (centers.empty())
        throw ValidationError("empty reference");

    auto durations = sample_durations(contexts, centers, cfg);

    UtteranceScores out;
    out.frame_centers = expand_durations(centers, durations);
    out.frame_lefts = expand_durations(lefts, durations);
    out.frame_rights = expand_durations(rights, durations);

    int32_t frames = static_cast<int32_t>(out.frame_centers.size());
    size_t n_inv = inv.size();
    size_t n_ctx = contexts.size();  // inventory + wb

    // Noise universe: inventory, then wb, then blank. All derived tables
    // of a frame reuse the same draw.
    size_t universe = n_inv + 2;
    size_t wb_noise = n_inv;
    size_t blank_noise = n_inv + 1;

    std::vector<size_t> phones_index(n_inv + 1);
    for (size_t i = 0; i < n_inv; ++i)
        phones_index[i] = i;
    phones_index[n_inv] = blank_noise;  // blank is the last phones label
    std::vector<size_t> ctx_index(n_ctx);
    for (size_t i = 0; i < n_inv; ++i)
        ctx_index[i] = i;
    ctx_index[static_cast<size_t>(wb)] = wb_noise;
    std::vector<size_t> center_index(n_inv);
    for (size_t i = 0; i < n_inv; ++i)
        center_index[i] = i;

    RandomStream rng(cfg.seed);
    std::vector<double> noise(universe);
    std::vector<std::vector<double>> phone_rows;
    out.factors.centers = inventory_labels(inv, false);
    out.factors.contexts = contexts;
    out.factors.num_frames = frames;

    for (int32_t t = 0; t < frames; ++t) {
        for (auto& v : noise)
            v = rng.next_normal();
        size_t c_ref = static_cast<size_t>(out.frame_centers[static_cast<size_t>(t)]);
        size_t l_ref = static_cast<size_t>(out.frame_lefts[static_cast<size_t>(t)]);
        size_t r_ref = static_cast<size_t>(out.frame_rights[static_cast<size_t>(t)]);

        phone_rows.push_back(noisy_onehot_row(n_inv + 1, c_ref, cfg.gain,
                                              cfg.temperature, noise, phones_index));

        auto left_row = noisy_onehot_row(n_ctx, l_ref, cfg.gain, cfg.temperature,
                                         noise, ctx_index);
        for (double v : left_row)
            out.factors.left.push_back(static_cast<float>(v));

        // The center factor replicates the phoneme distribution across all
        // conditioning contexts; likewise the right factor.
        auto center_row = noisy_onehot_row(n_inv, c_ref, cfg.gain, cfg.temperature,
                                           noise, center_index);
        for (size_t l = 0; l < n_ctx; ++l)
            for (double v : center_row)
                out.factors.center.push_back(static_cast<float>(v));

        auto right_row = noisy_onehot_row(n_ctx, r_ref, cfg.gain, cfg.temperature,
                                          noise, ctx_index);
        for (size_t l = 0; l < n_ctx; ++l)
            for (size_t c = 0; c < n_inv; ++c)
                for (double v : right_row)
                    out.factors.right.push_back(static_cast<float>(v));
    }
    out.phones = make_posteriorgram(phones, phone_rows);
    return out;
}

BiasedTransducerScorer::BiasedTransducerScorer(const Posteriorgram* pg,
                                               const IlmModel* bias, double weight)
        : pg_(pg), bias_(bias), weight_(weight) {
    blank_ = pg->labels.id(LabelSet::blank_symbol());
    for (size_t i = 0; i < pg->labels.size(); ++i)
        if (static_cast<LabelId>(i) != blank_) {
            unit_to_pg_.push_back(static_cast<LabelId>(i));
            units_.add(pg->labels.label(static_cast<LabelId>(i)));
        }
}

int BiasedTransducerScorer::context_order() const {
    return bias_ == nullptr || weight_ == 0.0 ? 0 : bias_->context_order();
}

TransducerStep BiasedTransducerScorer::step(
        int32_t t, const std::vector<LabelId>& history) const {
    TransducerStep s;
    s.blank_log_prob = pg_->at(t, blank_);
    size_t n = units_.size();
    s.label_log_probs.resize(n);
    if (bias_ == nullptr || weight_ == 0.0) {
        for (size_t u = 0; u < n; ++u)
            s.label_log_probs[u] = pg_->at(t, unit_to_pg_[u]);
        return s;
    }
    // Keep the blank mass, reweight the label mass by the baked LM.
    double blank_mass = std::exp(s.blank_log_prob);
    double log_rest = std::log1p(-blank_mass);
    std::vector<double> logits(n);
    for (size_t u = 0; u < n; ++u)
        logits[u] = pg_->at(t, unit_to_pg_[u]) +
                    weight_ * bias_->score(history, static_cast<LabelId>(u));
    auto row = softmax_log(logits);
    for (size_t u = 0; u < n; ++u)
        s.label_log_probs[u] = log_rest + row[u];
    return s;
}

PositionalLabelSyncScorer::PositionalLabelSyncScorer(
        LabelSet units, std::vector<std::vector<double>> rows, const IlmModel* bias,
        double weight)
        : units_(std::move(units)), rows_(std::move(rows)), bias_(bias),
          weight_(weight) {
    for (const auto& row : rows_)
        if (row.size() != units_.size() + 1)
            throw ValidationError("label-sync row width mismatch");
}

void PositionalLabelSyncScorer::step(const std::vector<LabelId>& prefix,
                                     std::vector<double>& label_log_probs,
                                     double& eos_log_prob) const {
    const auto& row = rows_[std::min(prefix.size(), rows_.size() - 1)];
    if (bias_ == nullptr || weight_ == 0.0) {
        for (size_t u = 0; u < units_.size(); ++u)
            label_log_probs[u] = row[u];
        eos_log_prob = row.back();
        return;
    }
    std::vector<double> logits(units_.size() + 1);
    for (size_t u = 0; u < units_.size(); ++u)
        logits[u] = row[u] + weight_ * bias_->score(prefix, static_cast<LabelId>(u));
    logits.back() =
            row.back() + weight_ * bias_->score(prefix, IlmModel::kEndOfSequence);
    auto biased = softmax_log(logits);
    for (size_t u = 0; u < units_.size(); ++u)
        label_log_probs[u] = biased[u];
    eos_log_prob = biased.back();
}

std::vector<std::vector<double>> synth_label_sync_rows(
        const LabelSet& units, const std::vector<LabelId>& reference,
        const EmitterConfig& cfg) {
    if (reference.empty())
        throw ValidationError("empty reference");
    RandomStream rng(cfg.seed);
    size_t n = units.size() + 1;  // + end symbol
    std::vector<size_t> identity(n);
    for (size_t i = 0; i < n; ++i)
        identity[i] = i;
    std::vector<std::vector<double>> rows;
    std::vector<double> noise(n);
    for (size_t m = 0; m <= reference.size(); ++m) {
        for (auto& v : noise)
            v = rng.next_normal();
        size_t hot = m < reference.size() ? static_cast<size_t>(reference[m]) : n - 1;
        rows.push_back(noisy_onehot_row(n, hot, cfg.gain, cfg.temperature, noise,
                                        identity));
    }
    return rows;
}

void write_synth_manifest(const SynthSet& set, const std::string& path) {
    std::ostringstream out;
    for (const auto& utt : set.utterances) {
        out << utt.id << '\t' << utt.pgm_path << '\t';
        for (size_t i = 0; i < utt.reference.size(); ++i) {
            if (i > 0)
                out << ' ';
            out << utt.reference[i];
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

SynthSet read_synth_manifest(const std::string& path) {
    SynthSet set;
    auto lines = read_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        auto fields = split_on(lines[i], '\t');
        if (fields.size() != 3)
            throw ValidationError("bad manifest line at " + path + ":" +
                                  std::to_string(i + 1));
        SynthUtterance utt;
        utt.id = fields[0];
        utt.pgm_path = fields[1];
        utt.reference = split_whitespace(fields[2]);
        set.utterances.push_back(std::move(utt));
    }
    return set;
}

SynthSet generate_synth_set(const Lexicon& lexicon,
                            const std::vector<std::vector<std::string>>& references,
                            const EmitterConfig& cfg, const std::string& out_dir,
                            const std::string& manifest_path) {
    SynthSet set;
    set.tau = cfg.temperature;
    set.seed = cfg.seed;
    set.utterances.resize(references.size());

    LabelSet phones = inventory_labels(lexicon.inventory(), true);
    RandomStream base(cfg.seed);

    // Validate and spell out every reference before entering the parallel
    // region; exceptions must not cross it.
    std::vector<std::vector<LabelId>> unit_seqs(references.size());
    for (size_t i = 0; i < references.size(); ++i) {
        for (const auto& w : references[i]) {
            if (!lexicon.has_word(w))
                throw ValidationError("reference word '" + w + "' not in lexicon");
            const auto& pron =
                    lexicon.pronunciations(lexicon.words().lookup(w)).front();
            for (PhonemeId p : pron)
                unit_seqs[i].push_back(p);
        }
        if (unit_seqs[i].empty())
            throw ValidationError("empty reference line " + std::to_string(i + 1));
    }

    int64_t n = static_cast<int64_t>(references.size());
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < n; ++i) {
        const auto& words = references[static_cast<size_t>(i)];
        EmitterConfig utt_cfg = cfg;
        utt_cfg.seed = base.substream(static_cast<uint64_t>(i)).next_u64();
        Posteriorgram pg =
                synth_posteriorgram(phones, unit_seqs[static_cast<size_t>(i)], utt_cfg);

        char name[32];
        std::snprintf(name, sizeof(name), "utt%04lld.pgm",
                      static_cast<long long>(i));
        std::string pgm_path = out_dir + "/" + name;
        save_posteriorgram(pg, pgm_path);

        SynthUtterance utt;
        std::snprintf(name, sizeof(name), "utt%04lld", static_cast<long long>(i));
        utt.id = name;
        utt.pgm_path = pgm_path;
        utt.reference = words;
        set.utterances[static_cast<size_t>(i)] = std::move(utt);
    }
    write_synth_manifest(set, manifest_path);
    return set;
}

CalibrationResult calibrate_tau(const WerProbe& probe, double target_wer,
                                double tolerance, double tau_max,
                                const std::vector<uint64_t>& seeds,
                                int max_iterations) {
    if (target_wer < 0.0 || target_wer >= 1.0)
        throw ValidationError("target WER must be in [0,1)");
    if (seeds.empty())
        throw ValidationError("calibration needs at least one seed");

    auto evaluate = [&](double tau) {
        CalibrationResult r;
        r.tau = tau;
        double sum = 0.0;
        double lo = 1e9;
        double hi = -1e9;
        for (uint64_t seed : seeds) {
            double wer = probe(tau, seed);
            r.per_seed_wer.push_back(wer);
            sum += wer;
            lo = std::min(lo, wer);
            hi = std::max(hi, wer);
        }
        r.mean_wer = sum / static_cast<double>(seeds.size());
        r.spread = hi - lo;
        return r;
    };

    CalibrationResult at_zero = evaluate(0.0);
    if (std::abs(at_zero.mean_wer - target_wer) <= tolerance)
        return at_zero;
    if (at_zero.mean_wer > target_wer)
        throw std::runtime_error(
                "target WER unreachable: " + format_fixed(at_zero.mean_wer, 4) +
                " at tau=0 already exceeds the target");

    CalibrationResult at_max = evaluate(tau_max);
    if (std::abs(at_max.mean_wer - target_wer) <= tolerance)
        return at_max;
    if (at_max.mean_wer < target_wer)
        throw std::runtime_error("target WER unreachable: bracket [" +
                                 format_fixed(at_zero.mean_wer, 4) + ", " +
                                 format_fixed(at_max.mean_wer, 4) +
                                 "] at tau_max=" + format_fixed(tau_max, 3));

    double lo = 0.0;
    double hi = tau_max;
    for (int iter = 0; iter < max_iterations; ++iter) {
        double mid = 0.5 * (lo + hi);
        CalibrationResult r = evaluate(mid);
        if (std::abs(r.mean_wer - target_wer) <= tolerance)
            return r;
        if (r.mean_wer < target_wer)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("calibration did not reach the target tolerance");
}

}  // namespace seqshift
