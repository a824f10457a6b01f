#pragma once

// Append-only JSONL journal of a session. One record per line:
//   {"index": n, "type": "config"|"trial"|"response"|"complete", "payload": {...}}
// Index 0 is always the config record. Replaying the journal through the
// engine rebuilds the exact session state; a torn final line is ignored.

#include <functional>
#include <istream>
#include <string>
#include <string_view>

#include "moon/experiment.hpp"
#include "moon/io.hpp"

namespace moon {

using LineSink = std::function<void(std::string_view line)>;

class JournaledSession {
 public:
  /// `meta` members are merged into the config record's payload.
  JournaledSession(SessionConfig config, LineSink sink,
                   const Json& meta = Json::object());

  /// Rebuilds a session from its journal. Records are re-derived through the
  /// engine and must match what was logged. New records go to `sink`.
  static JournaledSession replay(std::istream& journal, LineSink sink);

  const Trial& next_stimulus();
  void record_response(const Response& response);

  const SessionState& state() const { return state_; }
  int event_count() const { return next_event_; }

 private:
  JournaledSession(SessionState state, int next_event, LineSink sink);

  void emit(std::string_view type, Json payload);
  void emit_complete();

  SessionState state_;
  int next_event_ = 0;
  LineSink sink_;
};

/// Serializes one journal record, newline-terminated.
std::string journal_line(int index, std::string_view type, const Json& payload);

}  // namespace moon
