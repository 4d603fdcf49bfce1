#pragma once

// Event-log data model, JSONL codec, delta application and point-in-time
// document reconstruction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "inkflux/error.hpp"
#include "inkflux/utf8.hpp"

namespace inkflux::oplog {

/// Milliseconds since the Unix epoch.
using Timestamp = std::int64_t;

struct Retain {
  std::uint64_t count = 0;
  bool operator==(const Retain&) const = default;
};
struct Insert {
  std::string text;  // UTF-8
  bool operator==(const Insert&) const = default;
};
struct Delete {
  std::uint64_t count = 0;
  bool operator==(const Delete&) const = default;
};

using OpComponent = std::variant<Retain, Insert, Delete>;

struct Delta {
  std::vector<OpComponent> ops;

  Delta& retain(std::uint64_t n) {
    ops.emplace_back(Retain{n});
    return *this;
  }
  Delta& insert(std::string s) {
    ops.emplace_back(Insert{std::move(s)});
    return *this;
  }
  Delta& erase(std::uint64_t n) {
    ops.emplace_back(Delete{n});
    return *this;
  }

  bool operator==(const Delta&) const = default;
};

enum class TaskType { crowd, story_plot, gpt3_plot, gpt3_continuation };
enum class Horizon { near, far };

inline constexpr TaskType kAllTaskTypes[] = {
    TaskType::crowd, TaskType::story_plot, TaskType::gpt3_plot,
    TaskType::gpt3_continuation};

inline const char* to_string(TaskType t) {
  switch (t) {
    case TaskType::crowd: return "crowd";
    case TaskType::story_plot: return "story_plot";
    case TaskType::gpt3_plot: return "gpt3_plot";
    case TaskType::gpt3_continuation: return "gpt3_continuation";
  }
  return "?";
}

inline std::optional<TaskType> parse_task_type(std::string_view s) {
  for (TaskType t : kAllTaskTypes) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

inline const char* to_string(Horizon h) {
  return h == Horizon::near ? "near" : "far";
}

inline std::optional<Horizon> parse_horizon(std::string_view s) {
  if (s == "near") return Horizon::near;
  if (s == "far") return Horizon::far;
  return std::nullopt;
}

struct TextChange {
  Delta delta;
  bool operator==(const TextChange&) const = default;
};

struct TaskCreated {
  std::string task_id;
  TaskType task_type = TaskType::crowd;
  std::uint64_t snippet_start = 0;
  std::uint64_t snippet_len = 0;
  std::optional<std::string> instruction;
  std::optional<std::uint32_t> num_ideas;
  std::optional<Horizon> horizon;
  bool operator==(const TaskCreated&) const = default;
};

struct SuggestionDelivered {
  std::string task_id;
  std::string suggestion_id;
  std::uint32_t tab_index = 0;
  std::string text;
  bool operator==(const SuggestionDelivered&) const = default;
};

struct SuggestionRead {
  std::string suggestion_id;
  bool operator==(const SuggestionRead&) const = default;
};

using Payload =
    std::variant<TextChange, TaskCreated, SuggestionDelivered, SuggestionRead>;

struct Event {
  std::uint64_t seq = 0;
  Timestamp ts_ms = 0;
  std::string doc_id;
  Payload payload;

  bool is_text_change() const {
    return std::holds_alternative<TextChange>(payload);
  }
  bool operator==(const Event&) const = default;
};

inline bool event_order(const Event& a, const Event& b) {
  if (a.ts_ms != b.ts_ms) return a.ts_ms < b.ts_ms;
  return a.seq < b.seq;
}

// ---------------------------------------------------------------------------
// Delta application

/// Applies `delta` to `text` in place. Indices are code points. Retain only
/// moves the cursor, so appending at the end of a long document costs
/// O(inserted), not O(document).
inline void apply_delta_in_place(std::u32string& text, const Delta& delta) {
  std::size_t cursor = 0;
  for (const auto& op : delta.ops) {
    if (const auto* r = std::get_if<Retain>(&op)) {
      if (r->count > text.size() - cursor) {
        throw Error(ErrorKind::SpanOverflow,
                    "retain " + std::to_string(r->count) + " at offset " +
                        std::to_string(cursor) + " exceeds document length " +
                        std::to_string(text.size()));
      }
      cursor += r->count;
    } else if (const auto* ins = std::get_if<Insert>(&op)) {
      const std::u32string s = utf8::decode(ins->text);
      text.insert(cursor, s);
      cursor += s.size();
    } else {
      const auto& d = std::get<Delete>(op);
      if (d.count > text.size() - cursor) {
        throw Error(ErrorKind::SpanOverflow,
                    "delete " + std::to_string(d.count) + " at offset " +
                        std::to_string(cursor) + " exceeds document length " +
                        std::to_string(text.size()));
      }
      text.erase(cursor, d.count);
    }
  }
}

/// String-in, string-out form. `text` and the result are UTF-8.
inline std::string apply_delta(std::string_view text, const Delta& delta) {
  std::u32string buf = utf8::decode(text);
  apply_delta_in_place(buf, delta);
  return utf8::encode(buf);
}

// ---------------------------------------------------------------------------
// EventLog

class EventLog {
 public:
  struct DocIndex {
    std::vector<std::size_t> events;        // every event for the doc
    std::vector<std::size_t> text_changes;  // text_change events only
  };

  EventLog() = default;

  /// Sorts by (ts_ms, seq), stably, and checks referential integrity.
  /// Throws MalformedRecord on duplicate keys/ids and DanglingReference on
  /// unresolved task or suggestion ids.
  static EventLog from_events(std::vector<Event> events) {
    std::stable_sort(events.begin(), events.end(), event_order);
    EventLog log;
    log.events_ = std::move(events);
    log.build_index();
    return log;
  }

  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  const std::map<std::string, DocIndex>& documents() const noexcept {
    return docs_;
  }

  bool has_document(const std::string& doc_id) const {
    return docs_.count(doc_id) != 0;
  }

  const DocIndex& document(const std::string& doc_id) const {
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) {
      throw Error(ErrorKind::UnknownDocument, "no document '" + doc_id + "'");
    }
    return it->second;
  }

  /// Index of the task_created event for `task_id`, if any.
  std::optional<std::size_t> find_task(const std::string& task_id) const {
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> find_suggestion(
      const std::string& suggestion_id) const {
    auto it = suggestions_.find(suggestion_id);
    if (it == suggestions_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const EventLog& other) const {
    return events_ == other.events_;
  }

 private:
  void build_index() {
    for (std::size_t i = 1; i < events_.size(); ++i) {
      if (events_[i].ts_ms == events_[i - 1].ts_ms &&
          events_[i].seq == events_[i - 1].seq) {
        throw Error(ErrorKind::MalformedRecord,
                    "duplicate (ts_ms, seq) = (" +
                        std::to_string(events_[i].ts_ms) + ", " +
                        std::to_string(events_[i].seq) + ")");
      }
    }
    for (std::size_t i = 0; i < events_.size(); ++i) {
      const Event& e = events_[i];
      DocIndex& doc = docs_[e.doc_id];
      doc.events.push_back(i);
      if (e.is_text_change()) doc.text_changes.push_back(i);
      if (const auto* t = std::get_if<TaskCreated>(&e.payload)) {
        if (!tasks_.emplace(t->task_id, i).second) {
          throw Error(ErrorKind::MalformedRecord,
                      "duplicate task_id '" + t->task_id + "'");
        }
      } else if (const auto* d = std::get_if<SuggestionDelivered>(&e.payload)) {
        if (!suggestions_.emplace(d->suggestion_id, i).second) {
          throw Error(ErrorKind::MalformedRecord,
                      "duplicate suggestion_id '" + d->suggestion_id + "'");
        }
      }
    }
    for (const Event& e : events_) {
      if (const auto* d = std::get_if<SuggestionDelivered>(&e.payload)) {
        auto it = tasks_.find(d->task_id);
        if (it == tasks_.end() || events_[it->second].doc_id != e.doc_id) {
          throw Error(ErrorKind::DanglingReference,
                      "suggestion '" + d->suggestion_id +
                          "' references unknown task_id '" + d->task_id + "'");
        }
      } else if (const auto* r = std::get_if<SuggestionRead>(&e.payload)) {
        auto it = suggestions_.find(r->suggestion_id);
        if (it == suggestions_.end() || events_[it->second].doc_id != e.doc_id) {
          throw Error(ErrorKind::DanglingReference,
                      "read references unknown suggestion_id '" +
                          r->suggestion_id + "'");
        }
      }
    }
  }

  std::vector<Event> events_;
  std::map<std::string, DocIndex> docs_;
  std::unordered_map<std::string, std::size_t> tasks_;
  std::unordered_map<std::string, std::size_t> suggestions_;
};

/// Collects events from a single writer and assigns `seq` in (ts_ms, append
/// order) order when the log is built, so producers may append deliveries
/// scheduled in the future of the clock.
class EventLogBuilder {
 public:
  void append(Timestamp ts_ms, std::string doc_id, Payload payload) {
    pending_.push_back({0, ts_ms, std::move(doc_id), std::move(payload)});
  }

  std::size_t size() const noexcept { return pending_.size(); }

  EventLog build() const {
    std::vector<Event> events = pending_;
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) {
                       return a.ts_ms < b.ts_ms;
                     });
    for (std::size_t i = 0; i < events.size(); ++i) events[i].seq = i + 1;
    return EventLog::from_events(std::move(events));
  }

 private:
  std::vector<Event> pending_;
};

// ---------------------------------------------------------------------------
// JSONL codec

namespace detail {

using nlohmann::json;

inline std::uint64_t require_u64(const json& j, const char* key,
                                 std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorKind::MalformedRecord,
                std::string("missing field '") + key + "'", line);
  }
  if (it->is_number_integer() && !it->is_number_unsigned() &&
      it->get<std::int64_t>() < 0) {
    throw Error(ErrorKind::MalformedRecord,
                std::string("field '") + key + "' is negative", line);
  }
  if (!it->is_number_unsigned() && !it->is_number_integer()) {
    throw Error(ErrorKind::MalformedRecord,
                std::string("field '") + key + "' is not an integer", line);
  }
  return it->get<std::uint64_t>();
}

inline std::string require_string(const json& j, const char* key,
                                  std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorKind::MalformedRecord,
                std::string("missing or non-string field '") + key + "'", line);
  }
  return it->get<std::string>();
}

inline std::uint64_t op_count(const json& v, const char* key,
                              std::size_t line) {
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::MalformedRecord,
                std::string("'") + key + "' must be an integer", line);
  }
  if (v.is_number_integer() && !v.is_number_unsigned() &&
      v.get<std::int64_t>() < 0) {
    throw Error(ErrorKind::NegativeCount,
                std::string("'") + key + "' count " + v.dump() + " < 0", line);
  }
  return v.get<std::uint64_t>();
}

inline Delta parse_ops(const json& ops, std::size_t line) {
  if (!ops.is_array()) {
    throw Error(ErrorKind::MalformedRecord, "'ops' must be an array", line);
  }
  Delta delta;
  delta.ops.reserve(ops.size());
  for (const json& op : ops) {
    if (!op.is_object()) {
      throw Error(ErrorKind::MalformedRecord, "op must be an object", line);
    }
    const bool has_r = op.contains("retain");
    const bool has_i = op.contains("insert");
    const bool has_d = op.contains("delete");
    if (int(has_r) + int(has_i) + int(has_d) != 1) {
      throw Error(ErrorKind::MalformedRecord,
                  "op must have exactly one of retain/insert/delete", line);
    }
    // "attributes" (formatting) is accepted and dropped.
    if (has_r) {
      delta.retain(op_count(op["retain"], "retain", line));
    } else if (has_d) {
      delta.erase(op_count(op["delete"], "delete", line));
    } else {
      const json& s = op["insert"];
      if (!s.is_string()) {
        throw Error(ErrorKind::MalformedRecord, "insert must be a string",
                    line);
      }
      delta.insert(s.get<std::string>());
    }
  }
  return delta;
}

inline Event parse_record(std::string_view text, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedRecord, e.what(), line);
  }
  if (!j.is_object()) {
    throw Error(ErrorKind::MalformedRecord, "record is not an object", line);
  }
  Event ev;
  ev.seq = require_u64(j, "seq", line);
  const std::uint64_t ts = require_u64(j, "ts_ms", line);
  if (ts > static_cast<std::uint64_t>(INT64_MAX)) {
    throw Error(ErrorKind::MalformedRecord, "ts_ms out of range", line);
  }
  ev.ts_ms = static_cast<Timestamp>(ts);
  ev.doc_id = require_string(j, "doc", line);
  const std::string kind = require_string(j, "kind", line);

  if (kind == "text_change") {
    auto it = j.find("ops");
    if (it == j.end()) {
      throw Error(ErrorKind::MalformedRecord, "missing field 'ops'", line);
    }
    ev.payload = TextChange{parse_ops(*it, line)};
  } else if (kind == "task_created") {
    TaskCreated t;
    t.task_id = require_string(j, "task_id", line);
    const std::string type = require_string(j, "task_type", line);
    auto tt = parse_task_type(type);
    if (!tt) {
      throw Error(ErrorKind::MalformedRecord,
                  "unknown task_type '" + type + "'", line);
    }
    t.task_type = *tt;
    t.snippet_start = require_u64(j, "snippet_start", line);
    t.snippet_len = require_u64(j, "snippet_len", line);
    if (auto it = j.find("instruction"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw Error(ErrorKind::MalformedRecord, "instruction must be a string",
                    line);
      }
      t.instruction = it->get<std::string>();
    }
    if (auto it = j.find("num_ideas"); it != j.end() && !it->is_null()) {
      const std::uint64_t n = require_u64(j, "num_ideas", line);
      if (n == 0 || n > UINT32_MAX) {
        throw Error(ErrorKind::MalformedRecord, "num_ideas must be positive",
                    line);
      }
      t.num_ideas = static_cast<std::uint32_t>(n);
    }
    if (auto it = j.find("horizon"); it != j.end() && !it->is_null()) {
      auto h = it->is_string() ? parse_horizon(it->get<std::string>())
                               : std::nullopt;
      if (!h) {
        throw Error(ErrorKind::MalformedRecord, "horizon must be near|far",
                    line);
      }
      if (t.task_type != TaskType::story_plot) {
        throw Error(ErrorKind::MalformedRecord,
                    "horizon is only valid for story_plot tasks", line);
      }
      t.horizon = h;
    }
    ev.payload = std::move(t);
  } else if (kind == "suggestion_delivered") {
    SuggestionDelivered d;
    d.task_id = require_string(j, "task_id", line);
    d.suggestion_id = require_string(j, "suggestion_id", line);
    const std::uint64_t tab = require_u64(j, "tab_index", line);
    if (tab > UINT32_MAX) {
      throw Error(ErrorKind::MalformedRecord, "tab_index out of range", line);
    }
    d.tab_index = static_cast<std::uint32_t>(tab);
    d.text = require_string(j, "text", line);
    ev.payload = std::move(d);
  } else if (kind == "suggestion_read") {
    ev.payload = SuggestionRead{require_string(j, "suggestion_id", line)};
  } else {
    throw Error(ErrorKind::UnknownKind, "unknown kind '" + kind + "'", line);
  }
  return ev;
}

}  // namespace detail

/// Parses newline-delimited JSON records. Blank lines are skipped; line
/// numbers in errors are 1-based and count blank lines.
inline EventLog parse_event_log(std::string_view bytes) {
  std::vector<Event> events;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    events.push_back(detail::parse_record(line, line_no));
  }
  return EventLog::from_events(std::move(events));
}

inline nlohmann::ordered_json to_json(const Event& e) {
  nlohmann::ordered_json j;
  j["seq"] = e.seq;
  j["ts_ms"] = e.ts_ms;
  j["doc"] = e.doc_id;
  std::visit(
      [&j](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TextChange>) {
          j["kind"] = "text_change";
          auto ops = nlohmann::ordered_json::array();
          for (const auto& op : p.delta.ops) {
            nlohmann::ordered_json o;
            if (const auto* r = std::get_if<Retain>(&op)) {
              o["retain"] = r->count;
            } else if (const auto* i = std::get_if<Insert>(&op)) {
              o["insert"] = i->text;
            } else {
              o["delete"] = std::get<Delete>(op).count;
            }
            ops.push_back(std::move(o));
          }
          j["ops"] = std::move(ops);
        } else if constexpr (std::is_same_v<T, TaskCreated>) {
          j["kind"] = "task_created";
          j["task_id"] = p.task_id;
          j["task_type"] = to_string(p.task_type);
          j["snippet_start"] = p.snippet_start;
          j["snippet_len"] = p.snippet_len;
          if (p.instruction) j["instruction"] = *p.instruction;
          if (p.num_ideas) j["num_ideas"] = *p.num_ideas;
          if (p.horizon) j["horizon"] = to_string(*p.horizon);
        } else if constexpr (std::is_same_v<T, SuggestionDelivered>) {
          j["kind"] = "suggestion_delivered";
          j["task_id"] = p.task_id;
          j["suggestion_id"] = p.suggestion_id;
          j["tab_index"] = p.tab_index;
          j["text"] = p.text;
        } else {
          j["kind"] = "suggestion_read";
          j["suggestion_id"] = p.suggestion_id;
        }
      },
      e.payload);
  return j;
}

inline std::string serialize_event_log(const EventLog& log) {
  std::string out;
  for (const Event& e : log.events()) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction

struct DocumentState {
  std::string doc_id;
  Timestamp as_of_ms = 0;
  std::string text;
  bool operator==(const DocumentState&) const = default;
};

/// Forward-only replay of one document. Queries with non-decreasing times
/// reuse the previous fold; going backwards restarts from the empty string.
class DocumentReplayer {
 public:
  DocumentReplayer(const EventLog& log, const std::string& doc_id)
      : log_(&log), changes_(&log.document(doc_id).text_changes) {}

  /// Folds every text change with ts_ms <= t (inclusive upper bound).
  const std::u32string& advance_to(Timestamp t) {
    if (t < last_t_) {
      text_.clear();
      next_ = 0;
    }
    last_t_ = t;
    const auto& events = log_->events();
    while (next_ < changes_->size()) {
      const Event& e = events[(*changes_)[next_]];
      if (e.ts_ms > t) break;
      apply_delta_in_place(text_, std::get<TextChange>(e.payload).delta);
      ++next_;
    }
    return text_;
  }

  std::string text_at(Timestamp t) { return utf8::encode(advance_to(t)); }

 private:
  const EventLog* log_;
  const std::vector<std::size_t>* changes_;
  std::u32string text_;
  std::size_t next_ = 0;
  Timestamp last_t_ = INT64_MIN;
};

inline DocumentState reconstruct_at(const EventLog& log,
                                    const std::string& doc_id, Timestamp t_ms) {
  DocumentReplayer replay(log, doc_id);
  return {doc_id, t_ms, replay.text_at(t_ms)};
}

/// Draft at `t_ms` and `window_s` seconds later.
inline std::pair<std::string, std::string> snapshot_pair(
    const EventLog& log, const std::string& doc_id, Timestamp t_ms,
    double window_s) {
  DocumentReplayer replay(log, doc_id);
  std::string before = replay.text_at(t_ms);
  const auto later = t_ms + static_cast<Timestamp>(std::llround(window_s * 1000.0));
  return {std::move(before), replay.text_at(later)};
}

}  // namespace inkflux::oplog
