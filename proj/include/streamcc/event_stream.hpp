#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "streamcc/petri_net.hpp"
#include "streamcc/policies.hpp"

namespace streamcc {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Parses `YYYY-MM-DD HH:MM[:SS[.fff]]` (taken as UTC) and RFC 3339 with `Z` or a
/// numeric offset, which is normalized to UTC. Returns nullopt on malformed input.
std::optional<Timestamp> parse_timestamp(std::string_view text);
/// RFC 3339 in UTC, with milliseconds only when non-zero.
std::string format_timestamp(Timestamp ts);

struct Event {
    std::uint64_t event_id = 0;
    CaseId case_id;
    ActivityLabel activity;
    Timestamp timestamp{};
};

struct EventLog {
    std::vector<Event> events;
};

struct StreamEvent {
    CaseId case_id;
    ActivityLabel activity;
    std::uint64_t arrival_index = 0;
    std::uint64_t event_id = 0;
    Timestamp timestamp{};

    CaseEvent as_case_event() const { return CaseEvent{case_id, activity, arrival_index}; }
};

struct CsvColumns {
    std::string case_id = "case_id";
    std::string activity = "activity";
    std::string timestamp = "timestamp";
};

/// Headered UTF-8 CSV (RFC 4180 quoting). Event ids are assigned 1, 2, ... in row order.
/// Throws ParseError naming the row for structural problems and TimestampError for bad timestamps.
EventLog parse_csv_log(std::istream& source, const CsvColumns& columns = {});

/// XES subset: `concept:name` on traces and events, `time:timestamp` on events.
/// Events lacking an activity or timestamp are rejected: with `rejected == nullptr`
/// the parse fails with RejectedEventsError listing every offender, otherwise they
/// are skipped and described in `rejected`.
EventLog parse_xes_log(std::istream& source, std::vector<std::string>* rejected = nullptr);

/// Dispatches on the file extension (`.xes` or CSV otherwise).
EventLog load_log_file(const std::filesystem::path& path, const CsvColumns& columns = {});

void write_csv_log(std::ostream& out, const EventLog& log);

/// Pull-based stream over a log sorted by (timestamp, log position), optionally replicated.
///
/// Copy 0 keeps the original case ids; copy j > 0 suffixes them with `#j`.
class EventStream {
public:
    explicit EventStream(const EventLog& log, std::size_t replications = 1);

    std::optional<StreamEvent> next();
    std::size_t size() const noexcept { return order_.size() * replications_; }
    std::size_t remaining() const noexcept { return size() - position_; }

    /// Sleeps before each event for the timestamp gap divided by `speedup`, capped at `max_sleep`.
    void set_paced(double speedup, std::chrono::milliseconds max_sleep = std::chrono::milliseconds(1000));

private:
    const EventLog* log_;
    std::vector<std::size_t> order_;
    std::size_t replications_;
    std::size_t position_ = 0;
    std::optional<double> speedup_;
    std::chrono::milliseconds max_sleep_{1000};
    std::optional<Timestamp> previous_;
};

std::vector<StreamEvent> replay(const EventLog& log);
std::vector<StreamEvent> replicate_stream(const EventLog& log, std::size_t k);

}  // namespace streamcc
