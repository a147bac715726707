#include "streampred/ingest.hpp"

#include <zlib.h>

#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

namespace streampred {

namespace {

/// Groups (case_id, activity) rows into traces in first-appearance order.
class LogBuilder {
 public:
  void add(const std::string& case_id, std::string_view activity) {
    auto [it, inserted] = open_.try_emplace(case_id, log_.cases.size());
    if (inserted) {
      if (closed_.count(case_id)) throw Error("activity after stop in case " + case_id);
      log_.cases.push_back(CaseTrace{case_id, {}});
    }
    auto& events = log_.cases[it->second].events;
    if (activity == kStopToken) {
      events.push_back(kStop);
      closed_.insert(case_id);
      open_.erase(it);
      return;
    }
    events.push_back(log_.alphabet.intern(activity));
  }

  EventLog finish() {
    for (const auto& [id, idx] : open_) log_.cases[idx].events.push_back(kStop);
    open_.clear();
    return std::move(log_);
  }

 private:
  EventLog log_;
  std::unordered_map<std::string, std::size_t> open_;
  std::unordered_set<std::string> closed_;
};

/// Reads one RFC 4180 record. Returns nullopt at end of input.
std::optional<std::vector<std::string>> read_record(std::istream& in, std::size_t& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false, any = false, was_quoted = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\n') {
      ++line;
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw Error("unterminated quote at line " + std::to_string(line));
  if (!any) return std::nullopt;
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

// --- CSV -------------------------------------------------------------------

EventLog parse_csv(std::istream& in) {
  std::size_t line = 1;
  auto header = read_record(in, line);
  if (!header) throw Error("empty file");
  if (!header->empty() && header->front().rfind("\xEF\xBB\xBF", 0) == 0) {
    header->front().erase(0, 3);
  }
  const auto& h = *header;
  const bool ok = (h.size() == 2 || (h.size() == 3 && h[2] == "timestamp")) &&
                  h[0] == "case_id" && h[1] == "activity";
  if (!ok) throw Error("missing header case_id,activity");

  LogBuilder builder;
  while (true) {
    const std::size_t at = line;
    auto rec = read_record(in, line);
    if (!rec) break;
    if (rec->size() == 1 && rec->front().empty()) continue;
    if (rec->size() != h.size()) {
      throw Error("wrong field count at line " + std::to_string(at));
    }
    builder.add((*rec)[0], (*rec)[1]);
  }
  return builder.finish();
}

EventLog read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_csv(in);
}

void write_csv(const EventLog& log, std::ostream& out) {
  out << "case_id,activity\n";
  for (const auto& trace : log.cases) {
    const std::string id = csv_field(trace.case_id);
    // A case without activities needs an explicit stop row to survive.
    if (trace.length() == 0) out << id << ',' << kStopToken << '\n';
    for (ActivityId a : trace.events) {
      if (a == kStop) continue;
      out << id << ',' << csv_field(log.alphabet.name(a)) << '\n';
    }
  }
}

void write_csv(const EventLog& log, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_csv(log, out);
}

// --- JSONL -----------------------------------------------------------------

EventLog parse_jsonl(std::istream& in) {
  LogBuilder builder;
  std::string text;
  std::size_t line = 0;
  bool any = false;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    any = true;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
      throw Error("malformed JSON at line " + std::to_string(line));
    }
    if (!j.is_object() || !j.contains("case_id") || !j.contains("activity") ||
        !j["activity"].is_string()) {
      throw Error("missing case_id/activity at line " + std::to_string(line));
    }
    const auto& cid = j["case_id"];
    builder.add(cid.is_string() ? cid.get<std::string>() : cid.dump(),
                j["activity"].get<std::string>());
  }
  if (!any) throw Error("empty file");
  return builder.finish();
}

EventLog read_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_jsonl(in);
}

void write_jsonl(const EventLog& log, std::ostream& out) {
  for (const auto& trace : log.cases) {
    for (ActivityId a : trace.events) {
      if (a == kStop && trace.length() > 0) continue;
      nlohmann::ordered_json j;
      j["case_id"] = trace.case_id;
      j["activity"] = a == kStop ? std::string(kStopToken) : log.alphabet.name(a);
      out << j.dump() << '\n';
    }
  }
}

void write_jsonl(const EventLog& log, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_jsonl(log, out);
}

// --- XES -------------------------------------------------------------------

namespace {

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos) throw Error("malformed XML: bad entity");
    const auto ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (!ent.empty() && ent[0] == '#') {
      const bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      const unsigned long cp = std::stoul(std::string(ent.substr(hex ? 2 : 1)), nullptr, hex ? 16 : 10);
      // UTF-8 encode
      if (cp < 0x80) {
        out += static_cast<char>(cp);
      } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      }
    } else {
      throw Error("malformed XML: unknown entity &" + std::string(ent) + ";");
    }
    i = semi;
  }
  return out;
}

struct Tag {
  std::string_view name;
  bool closing = false;
  bool self_closing = false;
  std::string key;    // attribute "key"
  std::string value;  // attribute "value"
};

/// Parses the inside of `<...>`.
Tag parse_tag(std::string_view body) {
  Tag t;
  std::size_t i = 0;
  if (!body.empty() && body[0] == '/') {
    t.closing = true;
    i = 1;
  }
  if (!body.empty() && body.back() == '/') {
    t.self_closing = true;
    body.remove_suffix(1);
  }
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  const std::size_t name_start = i;
  while (i < body.size() && !is_space(body[i])) ++i;
  t.name = body.substr(name_start, i - name_start);
  if (t.name.empty()) throw Error("malformed XML: empty tag");
  while (i < body.size()) {
    while (i < body.size() && is_space(body[i])) ++i;
    if (i >= body.size()) break;
    const auto eq = body.find('=', i);
    if (eq == std::string_view::npos) throw Error("malformed XML: attribute without value");
    std::string_view attr = body.substr(i, eq - i);
    while (!attr.empty() && is_space(attr.back())) attr.remove_suffix(1);
    i = eq + 1;
    while (i < body.size() && is_space(body[i])) ++i;
    if (i >= body.size() || (body[i] != '"' && body[i] != '\'')) {
      throw Error("malformed XML: unquoted attribute");
    }
    const char q = body[i];
    const auto end = body.find(q, i + 1);
    if (end == std::string_view::npos) throw Error("malformed XML: unterminated attribute");
    const auto raw = body.substr(i + 1, end - i - 1);
    if (attr == "key") t.key = decode_entities(raw);
    else if (attr == "value") t.value = decode_entities(raw);
    i = end + 1;
  }
  return t;
}

std::string slurp_gz(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw Error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw Error("corrupt gzip stream in " + path.string());
  return out;
}

}  // namespace

EventLog parse_xes(std::string_view xml) {
  EventLog log;
  std::vector<std::string_view> stack;
  std::size_t trace_index = 0;
  bool in_trace = false;
  std::optional<std::string> trace_name;
  std::optional<std::string> event_name;
  std::vector<std::string> pending_names;  // activities of the open trace

  auto fail = [&](const std::string& what) -> Error {
    return Error(what + " (trace " + std::to_string(trace_index) + ")");
  };

  std::size_t i = 0;
  while (true) {
    const auto lt = xml.find('<', i);
    if (lt == std::string_view::npos) break;
    if (xml.compare(lt, 4, "<!--") == 0) {
      const auto end = xml.find("-->", lt + 4);
      if (end == std::string_view::npos) throw Error("malformed XML: unterminated comment");
      i = end + 3;
      continue;
    }
    if (xml.compare(lt, 9, "<![CDATA[") == 0) {
      const auto end = xml.find("]]>", lt + 9);
      if (end == std::string_view::npos) throw Error("malformed XML: unterminated CDATA");
      i = end + 3;
      continue;
    }
    const auto gt = xml.find('>', lt + 1);
    if (gt == std::string_view::npos) throw Error("malformed XML: unterminated tag");
    i = gt + 1;
    const auto body = xml.substr(lt + 1, gt - lt - 1);
    if (!body.empty() && (body[0] == '?' || body[0] == '!')) continue;

    const Tag tag = parse_tag(body);
    if (tag.closing) {
      if (stack.empty() || stack.back() != tag.name) {
        throw fail("malformed XML: unexpected </" + std::string(tag.name) + ">");
      }
      stack.pop_back();
      if (tag.name == "event" && in_trace && stack.size() >= 1 && stack.back() == "trace") {
        if (!event_name) throw fail("event without concept:name");
        pending_names.push_back(std::move(*event_name));
        event_name.reset();
      } else if (tag.name == "trace" && in_trace) {
        if (!trace_name) throw fail("trace without concept:name");
        CaseTrace trace{std::move(*trace_name), {}};
        trace.events.reserve(pending_names.size() + 1);
        for (const auto& n : pending_names) {
          try {
            trace.events.push_back(log.alphabet.intern(n));
          } catch (const Error& e) {
            throw fail(e.what());
          }
        }
        trace.events.push_back(kStop);
        log.cases.push_back(std::move(trace));
        pending_names.clear();
        trace_name.reset();
        in_trace = false;
        ++trace_index;
      }
      continue;
    }

    const std::string_view parent = stack.empty() ? std::string_view{} : stack.back();
    if (tag.name == "trace") {
      if (in_trace) throw fail("malformed XML: nested trace");
      in_trace = true;
    } else if (tag.name == "event" && parent == "trace") {
      event_name.reset();
    } else if (tag.key == "concept:name" && in_trace) {
      if (parent == "trace" && stack.size() >= 1) trace_name = tag.value;
      if (parent == "event" && stack.size() >= 2 && stack[stack.size() - 2] == "trace") {
        event_name = tag.value;
      }
    }
    if (!tag.self_closing) stack.push_back(tag.name);
  }
  if (!stack.empty()) throw fail("malformed XML: unclosed <" + std::string(stack.back()) + ">");
  if (in_trace) throw fail("malformed XML: unterminated trace");
  return log;
}

EventLog read_xes(const std::filesystem::path& path) {
  std::string text;
  if (ends_with(path.string(), ".gz")) {
    text = slurp_gz(path);
  } else {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_xes(text);
}

// --- dispatch / stats ------------------------------------------------------

EventLog read_log(const std::filesystem::path& path) {
  const std::string p = path.string();
  if (ends_with(p, ".csv")) return read_csv(path);
  if (ends_with(p, ".jsonl")) return read_jsonl(path);
  if (ends_with(p, ".xes") || ends_with(p, ".xes.gz")) return read_xes(path);
  throw Error("unknown log format " + p + " (expected .csv, .jsonl, .xes, .xes.gz)");
}

void write_log(const EventLog& log, const std::filesystem::path& path) {
  const std::string p = path.string();
  if (ends_with(p, ".csv")) return write_csv(log, path);
  if (ends_with(p, ".jsonl")) return write_jsonl(log, path);
  throw Error("cannot write log format " + p + " (expected .csv or .jsonl)");
}

LogStats stats(const EventLog& log) {
  LogStats s;
  std::unordered_set<ActivityId> seen;
  s.n_cases = log.cases.size();
  for (const auto& trace : log.cases) {
    for (ActivityId a : trace.events) {
      if (a == kStop) continue;
      seen.insert(a);
      ++s.n_events;
    }
  }
  s.n_activities = seen.size();
  s.avg_case_length =
      s.n_cases == 0 ? 0.0 : static_cast<double>(s.n_events) / static_cast<double>(s.n_cases);
  return s;
}

}  // namespace streampred
