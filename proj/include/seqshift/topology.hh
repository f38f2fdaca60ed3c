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

#ifndef SEQSHIFT_TOPOLOGY_HH
#define SEQSHIFT_TOPOLOGY_HH

#include <vector>

#include "seqshift/acoustic.hh"
#include "seqshift/common.hh"

namespace seqshift {

enum class Topology { kHmm, kCtc, kTransducer };

enum class TransitionKind { kLoop, kForward, kBlankEmit, kLabelEmit };

struct GraphTransition {
    int32_t from = 0;
    int32_t to = 0;
    TransitionKind kind = TransitionKind::kForward;
    LabelId emit = -1;  // transducer transitions emit; HMM/CTC states do
};

struct GraphState {
    LabelId emission = -1;
};

// Alignment automaton for one label sequence. HMM and CTC states emit
// (one emission per occupied frame); the strictly monotonic transducer
// emits on transitions, one blank or label per frame.
struct StateGraph {
    Topology topology = Topology::kHmm;
    bool emits_on_transitions = false;
    std::vector<GraphState> states;
    std::vector<GraphTransition> transitions;
    std::vector<int32_t> initial;
    std::vector<int32_t> final_states;
    std::vector<LabelId> labels;  // the expanded sequence
    LabelId blank = -1;

    size_t num_states() const { return states.size(); }
};

// Loop and forward probabilities (natural log) with exponent beta; only
// HMM transitions are scored, CTC/transducer transitions are implicit.
struct TransitionModel {
    double loop_log = 0.0;
    double forward_log = 0.0;
    double beta = 1.0;
};

TransitionModel make_transition_model(double loop_prob, double beta);

// hmm: one state per label with loop+forward; ctc: blank-interleaved
// lattice with mandatory blank between repeated labels; transducer: at
// each frame either blank (stay) or the next label (advance), each label
// emitted exactly once.
StateGraph expand_labels(Topology topology, const std::vector<LabelId>& labels,
                         LabelId blank = -1);

struct ForwardResult {
    double log_prob = kLogZero;
    bool has_path = false;
};

// log of the total probability over all T-frame initial-to-final paths,
// emissions times beta-scaled transitions, accumulated in log space.
ForwardResult forward_score(const StateGraph& graph, const Posteriorgram& pg,
                            const TransitionModel& trans);

struct ViterbiResult {
    double log_prob = kLogZero;
    bool has_path = false;
    std::vector<int32_t> states;      // occupied state per frame
    std::vector<LabelId> frame_labels;  // emitted label per frame
};

// Best path with ties broken toward staying (loop/blank), then toward the
// lower state index.
ViterbiResult viterbi_align(const StateGraph& graph, const Posteriorgram& pg,
                            const TransitionModel& trans);

}  // namespace seqshift

#endif  // SEQSHIFT_TOPOLOGY_HH
