#pragma once

// Reading and writing snapshot logs and location catalogs.
//
//   JSONL: {"ts":"2013-04-12T00:00:00Z","loc":"los_angeles","trends":[{"t":"#abc","r":1,"p":false}]}
//   CSV:   ts,loc,rank,trend,promoted   (one row per entry, rows of a snapshot contiguous)
//   Catalog CSV: id,name,lat,lon,country_level

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "trendflow/model.hpp"

namespace trendflow {

enum class LogFormat { jsonl, csv };

LogFormat log_format_from_string(std::string_view name);
// Picks csv for a ".csv" suffix, jsonl otherwise.
LogFormat log_format_for_path(std::string_view path);

std::string format_timestamp(Timestamp ts);
// Accepts "YYYY-MM-DDTHH:MM:SSZ". Throws DataError.
Timestamp parse_timestamp(std::string_view text);

LocationCatalog read_catalog(std::istream& in);
void write_catalog(std::ostream& out, const LocationCatalog& catalog);

ObservationLog parse_log(std::istream& in, LogFormat format, const LocationCatalog& catalog,
                         Duration tick_interval = kDefaultTickInterval);
void write_log(std::ostream& out, const ObservationLog& log, LogFormat format);

struct Violation {
    std::size_t line = 0;
    std::string reason;
};

struct ValidationReport {
    std::size_t records = 0;    // lines (jsonl) or rows (csv) examined
    std::size_t snapshots = 0;  // snapshots accepted
    std::vector<Violation> violations;
    std::vector<std::string> notes;  // e.g. "no snapshots"

    bool clean() const { return violations.empty(); }
};

// Same checks as parse_log but keeps going past bad records.
ValidationReport validate_log(std::istream& in, LogFormat format, const LocationCatalog& catalog,
                              Duration tick_interval = kDefaultTickInterval);

// Minimal RFC 4180 helpers shared by the CSV readers and writers.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

}  // namespace trendflow
