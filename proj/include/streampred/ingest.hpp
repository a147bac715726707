#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "streampred/core.hpp"

namespace streampred {

// File formats
//
// CSV   UTF-8, first line `case_id,activity` (an optional third `timestamp`
//       column is accepted and ignored). One event per row in arrival order.
//       Fields containing `,` `"` or a newline are double-quoted with `""`
//       escapes. Writers emit `\n` line endings and no stop rows; a case ends
//       at end of file or at an explicit `__STOP__` row.
// JSONL One object per line, `{"case_id":"c1","activity":"A"}`, keys in that
//       order. Same stop convention as CSV.
// XES   Read only. Case id is the trace's `concept:name`, activity the
//       event's `concept:name`; everything else is ignored. `.xes.gz` is
//       decompressed transparently.

EventLog parse_csv(std::istream& in);
EventLog read_csv(const std::filesystem::path& path);
void write_csv(const EventLog& log, std::ostream& out);
void write_csv(const EventLog& log, const std::filesystem::path& path);

EventLog parse_jsonl(std::istream& in);
EventLog read_jsonl(const std::filesystem::path& path);
void write_jsonl(const EventLog& log, std::ostream& out);
void write_jsonl(const EventLog& log, const std::filesystem::path& path);

EventLog parse_xes(std::string_view xml);
EventLog read_xes(const std::filesystem::path& path);

/// Dispatches on extension: .csv, .jsonl, .xes, .xes.gz.
EventLog read_log(const std::filesystem::path& path);
void write_log(const EventLog& log, const std::filesystem::path& path);

/// Dataset statistics; stops are excluded from activities and lengths.
struct LogStats {
  std::size_t n_activities = 0;
  std::size_t n_cases = 0;
  double avg_case_length = 0.0;
  std::size_t n_events = 0;

  friend bool operator==(const LogStats&, const LogStats&) = default;
};

LogStats stats(const EventLog& log);

}  // namespace streampred
