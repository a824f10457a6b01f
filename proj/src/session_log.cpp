#include "moon/session_log.hpp"

#include <optional>
#include <vector>

#include "moon/error.hpp"

namespace moon {

namespace {

[[noreturn]] void corrupt(int line, const std::string& why) {
  fail(ErrorKind::Io, "journal line " + std::to_string(line + 1) + ": " + why);
}

}  // namespace

std::string journal_line(int index, std::string_view type,
                         const Json& payload) {
  Json record = {{"index", index}, {"type", type}, {"payload", payload}};
  return record.dump() + "\n";
}

JournaledSession::JournaledSession(SessionConfig config, LineSink sink,
                                   const Json& meta)
    : state_(session_config_from_json(to_json(config))), sink_(std::move(sink)) {
  Json payload = to_json(config);
  payload.update(meta);
  emit("config", std::move(payload));
}

JournaledSession::JournaledSession(SessionState state, int next_event,
                                   LineSink sink)
    : state_(std::move(state)), next_event_(next_event), sink_(std::move(sink)) {}

void JournaledSession::emit(std::string_view type, Json payload) {
  const std::string line = journal_line(next_event_, type, payload);
  if (sink_) sink_(line);
  ++next_event_;
}

const Trial& JournaledSession::next_stimulus() {
  const Trial& trial = state_.next_stimulus();
  emit("trial", to_json(trial));
  return trial;
}

void JournaledSession::record_response(const Response& response) {
  state_.record_response(response);
  emit("response", to_json(response));
  if (state_.status() == SessionStatus::Complete) emit_complete();
}

void JournaledSession::emit_complete() {
  emit("complete", {{"pse", state_.estimate_pse()},
                    {"trial_count", state_.trials().size()},
                    {"reversals", state_.reversals()}});
}

JournaledSession JournaledSession::replay(std::istream& journal,
                                          LineSink sink) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(journal, line)) lines.push_back(line);
  // A final line without its newline was torn by a crash mid-write.
  const bool torn = !lines.empty() && journal.eof() && !line.empty();
  if (torn) lines.pop_back();

  std::optional<SessionState> state;
  std::string last_type;
  int index = 0;
  for (const std::string& text : lines) {
    if (text.empty()) continue;
    Json record;
    try {
      record = Json::parse(text);
    } catch (const Json::parse_error& e) {
      corrupt(index, e.what());
    }
    if (!record.is_object() || record.value("index", -1) != index)
      corrupt(index, "expected event index " + std::to_string(index));
    const std::string type = record.value("type", "");
    const Json& payload = record["payload"];
    try {
      if (index == 0) {
        if (type != "config") corrupt(index, "first record must be config");
        state.emplace(session_config_from_json(payload));
      } else if (type == "trial") {
        const Trial& trial = state->next_stimulus();
        if (trial != trial_from_json(payload))
          corrupt(index, "trial diverges from the engine's decision");
      } else if (type == "response") {
        state->record_response(response_from_json(payload));
      } else if (type == "complete") {
        if (state->status() != SessionStatus::Complete)
          corrupt(index, "complete record for an active session");
      } else {
        corrupt(index, "unknown record type '" + type + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Io) throw;
      corrupt(index, e.what());
    }
    last_type = type;
    ++index;
  }
  if (!state) fail(ErrorKind::Io, "journal has no config record");

  // A response that was logged but whose "complete" record was torn off.
  JournaledSession session(std::move(*state), index, std::move(sink));
  if (session.state_.status() == SessionStatus::Complete &&
      last_type != "complete")
    session.emit_complete();
  return session;
}

}  // namespace moon
