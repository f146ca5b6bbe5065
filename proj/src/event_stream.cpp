#include "streamcc/event_stream.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <thread>

#include "streamcc/errors.hpp"
#include "xml_dom.hpp"

namespace streamcc {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return true;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    std::string_view s = text;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);

    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!read_int(s, 0, 4, y) || s.size() < 16 || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' ||
        !read_int(s, 8, 2, d) || (s[10] != ' ' && s[10] != 'T') || !read_int(s, 11, 2, h) || s[13] != ':' ||
        !read_int(s, 14, 2, mi))
        return std::nullopt;
    std::size_t pos = 16;
    int millis = 0;
    if (pos < s.size() && s[pos] == ':') {
        if (!read_int(s, pos + 1, 2, sec)) return std::nullopt;
        pos += 3;
        if (pos < s.size() && s[pos] == '.') {
            std::size_t digits = 0;
            ++pos;
            int scale = 100;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
                if (digits < 3) millis += (s[pos] - '0') * scale;
                scale /= 10;
                ++digits;
                ++pos;
            }
            if (digits == 0) return std::nullopt;
        }
    }
    minutes offset{0};
    if (pos < s.size()) {
        if (s[pos] == 'Z' || s[pos] == 'z') {
            ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
            int oh = 0, om = 0;
            if (!read_int(s, pos + 1, 2, oh)) return std::nullopt;
            std::size_t mpos = pos + 3;
            if (mpos < s.size() && s[mpos] == ':') ++mpos;
            if (!read_int(s, mpos, 2, om)) return std::nullopt;
            offset = minutes(oh * 60 + om) * (s[pos] == '-' ? -1 : 1);
            pos = mpos + 2;
        }
    }
    if (pos != s.size()) return std::nullopt;

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
    return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{millis} - offset;
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day_point = floor<days>(ts);
    const year_month_day ymd{day_point};
    const hh_mm_ss<milliseconds> tod{ts - day_point};
    char buf[40];
    int n = std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                          static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                          static_cast<int>(tod.seconds().count()));
    std::string out(buf, static_cast<std::size_t>(n));
    if (auto ms = tod.subseconds().count()) {
        std::snprintf(buf, sizeof(buf), ".%03d", static_cast<int>(ms));
        out += buf;
    }
    return out + "Z";
}

namespace {

/// Reads one CSV record; returns false at end of input. `line` tracks physical lines.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string field;
    bool quoted = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++line;
            break;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line);
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("CSV header lacks column '" + name + "'", 1);
    return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

EventLog parse_csv_log(std::istream& source, const CsvColumns& columns) {
    std::size_t line = 1;
    std::vector<std::string> header;
    if (!read_record(source, header, line)) throw ParseError("empty CSV input: header row missing");
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
    for (auto& h : header) h = detail::trim(h);

    const std::size_t case_col = column_index(header, columns.case_id);
    const std::size_t activity_col = column_index(header, columns.activity);
    const std::size_t time_col = column_index(header, columns.timestamp);
    const std::size_t needed = std::max({case_col, activity_col, time_col}) + 1;

    EventLog log;
    std::vector<std::string> fields;
    std::size_t row = 0;
    while (true) {
        const std::size_t record_line = line;
        if (!read_record(source, fields, line)) break;
        ++row;
        if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
        if (fields.size() < needed)
            throw ParseError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                                 " fields, expected at least " + std::to_string(needed),
                             record_line);
        Event e;
        e.event_id = log.events.size() + 1;
        e.case_id = detail::trim(fields[case_col]);
        e.activity = detail::trim(fields[activity_col]);
        if (e.case_id.empty()) throw ParseError("row " + std::to_string(row) + " has an empty case id", record_line);
        if (e.activity.empty()) throw ParseError("row " + std::to_string(row) + " has an empty activity", record_line);
        auto ts = parse_timestamp(fields[time_col]);
        if (!ts)
            throw TimestampError("row " + std::to_string(row) + ": unparseable timestamp '" + fields[time_col] + "'",
                                 row);
        e.timestamp = *ts;
        log.events.push_back(std::move(e));
    }
    return log;
}

namespace {

std::optional<std::string> keyed_value(const detail::XmlElement& e, std::string_view key) {
    for (const auto& child : e.children) {
        auto k = child->attribute("key");
        if (k && *k == key) {
            if (auto v = child->attribute("value")) return std::string(*v);
        }
    }
    return std::nullopt;
}

}  // namespace

EventLog parse_xes_log(std::istream& source, std::vector<std::string>* rejected) {
    auto root = detail::parse_xml(source);
    if (root->name != "log") throw ParseError("XES root element must be <log>", root->line);

    EventLog log;
    std::vector<std::string> reports;
    std::size_t trace_number = 0;
    for (const detail::XmlElement* trace : root->children_named("trace")) {
        ++trace_number;
        auto case_id = keyed_value(*trace, "concept:name");
        if (!case_id) throw ParseError("trace #" + std::to_string(trace_number) + " lacks concept:name", trace->line);
        for (const detail::XmlElement* event : trace->children_named("event")) {
            auto activity = keyed_value(*event, "concept:name");
            auto time = keyed_value(*event, "time:timestamp");
            std::string problem;
            std::optional<Timestamp> ts;
            if (!activity || activity->empty()) {
                problem = "missing concept:name";
            } else if (!time) {
                problem = "missing time:timestamp";
            } else if (!(ts = parse_timestamp(*time))) {
                problem = "unparseable time:timestamp '" + *time + "'";
            }
            if (!problem.empty()) {
                reports.push_back("case '" + *case_id + "', event at line " + std::to_string(event->line) + ": " +
                                  problem);
                continue;
            }
            log.events.push_back(Event{log.events.size() + 1, *case_id, *activity, *ts});
        }
    }
    if (!reports.empty()) {
        if (!rejected) throw RejectedEventsError(std::move(reports));
        rejected->insert(rejected->end(), reports.begin(), reports.end());
    }
    return log;
}

EventLog load_log_file(const std::filesystem::path& path, const CsvColumns& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open log file '" + path.string() + "'");
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".xes") return parse_xes_log(in);
    return parse_csv_log(in, columns);
}

namespace {

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void write_csv_log(std::ostream& out, const EventLog& log) {
    out << "case_id,activity,timestamp\n";
    for (const Event& e : log.events)
        out << csv_field(e.case_id) << ',' << csv_field(e.activity) << ',' << format_timestamp(e.timestamp) << '\n';
}

EventStream::EventStream(const EventLog& log, std::size_t replications)
    : log_(&log), order_(log.events.size()), replications_(replications) {
    if (replications_ < 1) throw ValidationError("replication count must be at least 1");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        return log.events[a].timestamp < log.events[b].timestamp;
    });
}

void EventStream::set_paced(double speedup, std::chrono::milliseconds max_sleep) {
    if (!(speedup > 0)) throw ValidationError("pacing speedup must be positive");
    speedup_ = speedup;
    max_sleep_ = max_sleep;
}

std::optional<StreamEvent> EventStream::next() {
    if (position_ >= size()) return std::nullopt;
    const std::size_t copy = position_ / order_.size();
    const Event& e = log_->events[order_[position_ % order_.size()]];

    if (speedup_) {
        if (previous_ && e.timestamp > *previous_) {
            auto gap = std::chrono::duration<double, std::milli>(e.timestamp - *previous_) / *speedup_;
            auto wait = std::min(std::chrono::duration_cast<std::chrono::milliseconds>(gap), max_sleep_);
            std::this_thread::sleep_for(wait);
        }
        previous_ = e.timestamp;
    }

    StreamEvent out;
    out.case_id = copy == 0 ? e.case_id : e.case_id + "#" + std::to_string(copy);
    out.activity = e.activity;
    out.arrival_index = position_;
    out.event_id = e.event_id;
    out.timestamp = e.timestamp;
    ++position_;
    return out;
}

std::vector<StreamEvent> replicate_stream(const EventLog& log, std::size_t k) {
    EventStream stream(log, k);
    std::vector<StreamEvent> out;
    out.reserve(stream.size());
    while (auto e = stream.next()) out.push_back(std::move(*e));
    return out;
}

std::vector<StreamEvent> replay(const EventLog& log) { return replicate_stream(log, 1); }

}  // namespace streamcc
