#ifndef MIXTIME_IO_HPP
#define MIXTIME_IO_HPP

#include <string>

#include "mixtime/bottleneck.hpp"
#include "mixtime/chain.hpp"
#include "mixtime/game.hpp"
#include "mixtime/mixing.hpp"
#include "mixtime/rough_isometry.hpp"

namespace mixtime {

// Chain files hold either {"states": [...], "matrix": [[...]]} or
// {"states": [...], "conductances": [["u","v",c], ...], "lazy": true}.
// Matrix chains are refused when non-lazy unless allow_nonlazy is set.
Chain chain_from_json_text(const std::string& text, bool allow_nonlazy = false);
Chain load_chain(const std::string& path, bool allow_nonlazy = false);
// Emits the matrix form (conductances are not retained after construction).
std::string chain_to_json_text(const Chain& chain);
void save_chain(const Chain& chain, const std::string& path);

// {"pairs": [["t_id", "g_id"], ...]} with state ids resolved against the
// two chains.
Correspondence correspondence_from_json_text(const std::string& text, const Chain& T,
                                             const Chain& G);
Correspondence load_correspondence(const std::string& path, const Chain& T, const Chain& G);
std::string correspondence_to_json_text(const Correspondence& corr, const Chain& T,
                                        const Chain& G);
void save_correspondence(const Correspondence& corr, const Chain& T, const Chain& G,
                         const std::string& path);

// {"theta": ..., "score": ..., "sets": [[state ids], ...]}; score is
// recomputed on load and ignored if absent.
BottleneckSequence sequence_from_json_text(const std::string& text, const Chain& chain);
BottleneckSequence load_sequence(const std::string& path, const Chain& chain);
std::string sequence_to_json_text(const Chain& chain, const BottleneckSequence& seq);
void save_sequence(const Chain& chain, const BottleneckSequence& seq, const std::string& path);

// Params, per-round C/D as state-id lists, per-round Phi(D), per-move
// validation verdicts with provenance, score, bound.
GameTranscript transcript_from_json_text(const std::string& text, const Chain& chain);
GameTranscript load_transcript(const std::string& path, const Chain& chain);
std::string transcript_to_json_text(const Chain& chain, const GameTranscript& t);
void save_transcript(const Chain& chain, const GameTranscript& t, const std::string& path);

// Replays a loaded transcript move by move: every rule is re-checked and the
// score, bound, and flags are recomputed from scratch.
GameTranscript revalidate_transcript(const Chain& chain, const GameTranscript& t,
                                     int adjustment_cap = 22);

std::string mixing_report_to_json_text(const MixingReport& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mixtime

#endif
