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

#include "seqshift/topology.hh"

#include <algorithm>
#include <cmath>

namespace seqshift {

TransitionModel make_transition_model(double loop_prob, double beta) {
    if (loop_prob <= 0.0 || loop_prob >= 1.0)
        throw ValidationError("loop probability must be in (0,1)");
    TransitionModel tm;
    tm.loop_log = std::log(loop_prob);
    tm.forward_log = std::log1p(-loop_prob);
    tm.beta = beta;
    return tm;
}

StateGraph expand_labels(Topology topology, const std::vector<LabelId>& labels,
                         LabelId blank) {
    if (labels.empty())
        throw ValidationError("empty label sequence");
    StateGraph g;
    g.topology = topology;
    g.labels = labels;
    g.blank = blank;
    int32_t m = static_cast<int32_t>(labels.size());

    switch (topology) {
    case Topology::kHmm: {
        for (LabelId l : labels)
            g.states.push_back({l});
        for (int32_t i = 0; i < m; ++i) {
            g.transitions.push_back({i, i, TransitionKind::kLoop, -1});
            if (i + 1 < m)
                g.transitions.push_back({i, i + 1, TransitionKind::kForward, -1});
        }
        g.initial = {0};
        g.final_states = {m - 1};
        break;
    }
    case Topology::kCtc: {
        if (blank < 0)
            throw ValidationError("CTC topology needs a blank label");
        // States: blank_0, l_1, blank_1, l_2, ..., l_m, blank_m.
        for (int32_t i = 0; i <= m; ++i) {
            g.states.push_back({blank});
            if (i < m)
                g.states.push_back({labels[static_cast<size_t>(i)]});
        }
        auto blank_state = [](int32_t i) { return 2 * i; };
        auto label_state = [](int32_t i) { return 2 * i - 1; };  // 1-based label
        for (int32_t i = 0; i <= m; ++i) {
            g.transitions.push_back(
                    {blank_state(i), blank_state(i), TransitionKind::kLoop, -1});
            if (i < m)
                g.transitions.push_back({blank_state(i), label_state(i + 1),
                                         TransitionKind::kForward, -1});
        }
        for (int32_t i = 1; i <= m; ++i) {
            g.transitions.push_back(
                    {label_state(i), label_state(i), TransitionKind::kLoop, -1});
            g.transitions.push_back(
                    {label_state(i), blank_state(i), TransitionKind::kForward, -1});
            if (i < m && labels[static_cast<size_t>(i)] !=
                                 labels[static_cast<size_t>(i - 1)])
                g.transitions.push_back({label_state(i), label_state(i + 1),
                                         TransitionKind::kForward, -1});
        }
        g.initial = {blank_state(0), label_state(1)};
        g.final_states = {label_state(m), blank_state(m)};
        break;
    }
    case Topology::kTransducer: {
        if (blank < 0)
            throw ValidationError("transducer topology needs a blank label");
        g.emits_on_transitions = true;
        for (int32_t i = 0; i <= m; ++i)
            g.states.push_back({-1});  // positional states
        for (int32_t i = 0; i <= m; ++i) {
            g.transitions.push_back({i, i, TransitionKind::kBlankEmit, blank});
            if (i < m)
                g.transitions.push_back({i, i + 1, TransitionKind::kLabelEmit,
                                         labels[static_cast<size_t>(i)]});
        }
        g.initial = {0};
        g.final_states = {m};
        break;
    }
    }
    return g;
}

namespace {

double transition_weight(const StateGraph& g, const GraphTransition& t,
                         const TransitionModel& tm) {
    if (g.topology != Topology::kHmm || tm.beta == 0.0)
        return 0.0;
    return tm.beta *
           (t.kind == TransitionKind::kLoop ? tm.loop_log : tm.forward_log);
}

double exit_weight(const StateGraph& g, const TransitionModel& tm) {
    if (g.topology != Topology::kHmm || tm.beta == 0.0)
        return 0.0;
    return tm.beta * tm.forward_log;
}

void check_coverage(const StateGraph& g, const Posteriorgram& pg) {
    auto check = [&](LabelId l) {
        if (l < 0 || static_cast<size_t>(l) >= pg.labels.size())
            throw ValidationError("posteriorgram does not cover emission label");
    };
    if (g.emits_on_transitions)
        for (const auto& t : g.transitions)
            check(t.emit);
    else
        for (const auto& s : g.states)
            check(s.emission);
    if (pg.num_frames < 1)
        throw ValidationError("empty posteriorgram");
}

}  // namespace

ForwardResult forward_score(const StateGraph& graph, const Posteriorgram& pg,
                            const TransitionModel& trans) {
    check_coverage(graph, pg);
    size_t n = graph.num_states();
    std::vector<double> cur(n, kLogZero);
    std::vector<double> next(n, kLogZero);

    if (graph.emits_on_transitions) {
        for (int32_t s : graph.initial)
            cur[static_cast<size_t>(s)] = 0.0;
        for (int32_t t = 0; t < pg.num_frames; ++t) {
            std::fill(next.begin(), next.end(), kLogZero);
            for (const auto& tr : graph.transitions) {
                double base = cur[static_cast<size_t>(tr.from)];
                if (log_is_zero(base))
                    continue;
                double score = base + pg.at(t, tr.emit) +
                               transition_weight(graph, tr, trans);
                next[static_cast<size_t>(tr.to)] =
                        log_add(next[static_cast<size_t>(tr.to)], score);
            }
            std::swap(cur, next);
        }
    }
    else {
        for (int32_t t = 0; t < pg.num_frames; ++t) {
            if (t == 0) {
                for (int32_t s : graph.initial)
                    cur[static_cast<size_t>(s)] =
                            pg.at(0, graph.states[static_cast<size_t>(s)].emission);
                continue;
            }
            std::fill(next.begin(), next.end(), kLogZero);
            for (const auto& tr : graph.transitions) {
                double base = cur[static_cast<size_t>(tr.from)];
                if (log_is_zero(base))
                    continue;
                double score =
                        base + transition_weight(graph, tr, trans) +
                        pg.at(t, graph.states[static_cast<size_t>(tr.to)].emission);
                next[static_cast<size_t>(tr.to)] =
                        log_add(next[static_cast<size_t>(tr.to)], score);
            }
            std::swap(cur, next);
        }
    }

    ForwardResult result;
    for (int32_t s : graph.final_states) {
        double v = cur[static_cast<size_t>(s)];
        if (!log_is_zero(v))
            result.log_prob =
                    log_add(result.log_prob, v + exit_weight(graph, trans));
    }
    result.has_path = !log_is_zero(result.log_prob);
    return result;
}

namespace {

struct Cell {
    double score = kLogZero;
    int32_t back = -1;       // previous state
    int32_t transition = -1; // transition index taken into this cell
};

// Candidate preference: higher score, then staying, then lower source index.
bool better(double score, bool is_stay, int32_t from, const Cell& cur,
            bool cur_stay, int32_t cur_from) {
    if (score != cur.score)
        return score > cur.score;
    if (is_stay != cur_stay)
        return is_stay;
    return from < cur_from;
}

}  // namespace

ViterbiResult viterbi_align(const StateGraph& graph, const Posteriorgram& pg,
                            const TransitionModel& trans) {
    check_coverage(graph, pg);
    size_t n = graph.num_states();
    int32_t frames = pg.num_frames;
    std::vector<std::vector<Cell>> dp(static_cast<size_t>(frames) + 1,
                                      std::vector<Cell>(n));

    auto is_stay = [&](const GraphTransition& tr) {
        return tr.kind == TransitionKind::kLoop ||
               tr.kind == TransitionKind::kBlankEmit;
    };

    if (graph.emits_on_transitions) {
        for (int32_t s : graph.initial)
            dp[0][static_cast<size_t>(s)].score = 0.0;
        for (int32_t t = 0; t < frames; ++t) {
            for (size_t ti = 0; ti < graph.transitions.size(); ++ti) {
                const auto& tr = graph.transitions[ti];
                const Cell& src = dp[static_cast<size_t>(t)][static_cast<size_t>(tr.from)];
                if (log_is_zero(src.score))
                    continue;
                double score = src.score + pg.at(t, tr.emit) +
                               transition_weight(graph, tr, trans);
                Cell& dst = dp[static_cast<size_t>(t) + 1][static_cast<size_t>(tr.to)];
                bool cur_stay = dst.transition >= 0 &&
                                is_stay(graph.transitions[static_cast<size_t>(dst.transition)]);
                if (dst.transition < 0 ||
                    better(score, is_stay(tr), tr.from, dst, cur_stay, dst.back)) {
                    dst.score = score;
                    dst.back = tr.from;
                    dst.transition = static_cast<int32_t>(ti);
                }
            }
        }
    }
    else {
        for (int32_t s : graph.initial) {
            Cell& c = dp[1][static_cast<size_t>(s)];
            c.score = pg.at(0, graph.states[static_cast<size_t>(s)].emission);
            c.back = -1;
            c.transition = -2;  // entry marker
        }
        for (int32_t t = 1; t < frames; ++t) {
            for (size_t ti = 0; ti < graph.transitions.size(); ++ti) {
                const auto& tr = graph.transitions[ti];
                const Cell& src = dp[static_cast<size_t>(t)][static_cast<size_t>(tr.from)];
                if (src.transition == -1 || log_is_zero(src.score))
                    continue;
                double score =
                        src.score + transition_weight(graph, tr, trans) +
                        pg.at(t, graph.states[static_cast<size_t>(tr.to)].emission);
                Cell& dst = dp[static_cast<size_t>(t) + 1][static_cast<size_t>(tr.to)];
                bool cur_stay = dst.transition >= 0 &&
                                is_stay(graph.transitions[static_cast<size_t>(dst.transition)]);
                if (dst.transition == -1 ||
                    better(score, is_stay(tr), tr.from, dst, cur_stay, dst.back)) {
                    dst.score = score;
                    dst.back = tr.from;
                    dst.transition = static_cast<int32_t>(ti);
                }
            }
        }
    }

    ViterbiResult result;
    int32_t best_final = -1;
    for (int32_t s : graph.final_states) {
        const Cell& c = dp[static_cast<size_t>(frames)][static_cast<size_t>(s)];
        if (c.transition == -1 || log_is_zero(c.score))
            continue;
        double v = c.score + exit_weight(graph, trans);
        if (best_final < 0 || v > result.log_prob ||
            (v == result.log_prob && s < best_final)) {
            result.log_prob = v;
            best_final = s;
        }
    }
    if (best_final < 0)
        return result;
    result.has_path = true;

    // Backtrace.
    result.states.resize(static_cast<size_t>(frames));
    result.frame_labels.resize(static_cast<size_t>(frames));
    int32_t s = best_final;
    for (int32_t t = frames; t >= 1; --t) {
        const Cell& c = dp[static_cast<size_t>(t)][static_cast<size_t>(s)];
        result.states[static_cast<size_t>(t - 1)] = s;
        if (graph.emits_on_transitions)
            result.frame_labels[static_cast<size_t>(t - 1)] =
                    graph.transitions[static_cast<size_t>(c.transition)].emit;
        else
            result.frame_labels[static_cast<size_t>(t - 1)] =
                    graph.states[static_cast<size_t>(s)].emission;
        s = c.back < 0 ? s : c.back;
    }
    return result;
}

}  // namespace seqshift
