#include "trendflow/log_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace trendflow {

namespace {

using json = nlohmann::json;

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& out) {
    if (s == "true" || s == "1" || s == "TRUE" || s == "True") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0" || s == "FALSE" || s == "False" || s.empty()) {
        out = false;
        return true;
    }
    return false;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

bool blank(std::string_view line) {
    for (char c : line) {
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

// Feeds snapshots to a builder. In strict mode the first error propagates;
// otherwise violations are collected and the offending record skipped.
class Ingest {
public:
    Ingest(const LocationCatalog& catalog, Duration tick, ValidationReport* report)
        : builder_(catalog, tick), report_(report) {}

    template <typename F>
    void guarded(std::size_t line, F&& f) {
        try {
            f();
        } catch (const DataError& e) {
            const std::size_t at = e.line() ? e.line() : line;
            if (!report_) throw DataError(e.reason(), at);
            report_->violations.push_back({at, e.reason()});
        }
    }

    LocationIndex location(std::string_view id, std::size_t line) const {
        auto idx = builder_.catalog().find(id);
        if (!idx) throw DataError("unknown location id '" + std::string(id) + "'", line);
        return *idx;
    }

    void add(TrendSnapshot snap, std::size_t line) {
        builder_.add_snapshot(std::move(snap), line);
        if (report_) ++report_->snapshots;
    }

    LogBuilder& builder() { return builder_; }

private:
    LogBuilder builder_;
    ValidationReport* report_;
};

void read_jsonl(std::istream& in, Ingest& ingest, ValidationReport* report) {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = strip_cr(raw);
        if (blank(line)) continue;
        if (report) ++report->records;
        ingest.guarded(line_no, [&] {
            json doc;
            try {
                doc = json::parse(line);
            } catch (const json::parse_error& e) {
                throw DataError(std::string("malformed JSON: ") + e.what(), line_no);
            }
            if (!doc.is_object()) throw DataError("malformed record: expected object", line_no);
            auto field = [&](const char* name) -> const json& {
                auto it = doc.find(name);
                if (it == doc.end()) throw DataError(std::string("malformed record: missing '") + name + "'", line_no);
                return *it;
            };
            const auto& ts = field("ts");
            const auto& loc = field("loc");
            const auto& trends = field("trends");
            if (!ts.is_string() || !loc.is_string() || !trends.is_array())
                throw DataError("malformed record: wrong field type", line_no);

            TrendSnapshot snap;
            snap.timestamp = parse_timestamp(ts.get_ref<const std::string&>());
            snap.location = ingest.location(loc.get_ref<const std::string&>(), line_no);
            for (const auto& t : trends) {
                if (!t.is_object()) throw DataError("malformed record: trend entry not an object", line_no);
                auto text = t.find("t");
                auto rank = t.find("r");
                if (text == t.end() || !text->is_string() || rank == t.end() || !rank->is_number_integer())
                    throw DataError("malformed record: trend entry needs string 't' and integer 'r'", line_no);
                bool promoted = false;
                if (auto p = t.find("p"); p != t.end()) {
                    if (!p->is_boolean()) throw DataError("malformed record: 'p' must be boolean", line_no);
                    promoted = p->get<bool>();
                }
                const auto r = rank->get<std::int64_t>();
                if (r < 1 || r > kMaxRank) throw DataError("rank out of range", line_no);
                TrendEntry entry;
                try {
                    entry.trend = ingest.builder().intern(text->get_ref<const std::string&>());
                } catch (const DataError& e) {
                    throw DataError(e.reason(), line_no);
                }
                entry.rank = static_cast<int>(r);
                entry.promoted = promoted;
                snap.entries.push_back(entry);
            }
            ingest.add(std::move(snap), line_no);
        });
    }
}

struct CsvRow {
    Timestamp ts;
    LocationIndex loc = 0;
    TrendEntry entry;
};

void read_csv(std::istream& in, Ingest& ingest, ValidationReport* report) {
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;

    std::optional<TrendSnapshot> pending;
    std::size_t pending_line = 0;
    auto flush = [&] {
        if (pending) ingest.guarded(pending_line, [&] { ingest.add(std::move(*pending), pending_line); });
        pending.reset();
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = strip_cr(raw);
        if (blank(line)) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.substr(0, 3) == "ts,") continue;  // header row
        }
        if (report) ++report->records;

        std::optional<CsvRow> row;
        ingest.guarded(line_no, [&] {
            auto cols = split_csv_line(line);
            if (cols.size() != 5) throw DataError("malformed record: expected 5 columns", line_no);
            CsvRow r;
            r.ts = parse_timestamp(cols[0]);
            r.loc = ingest.location(cols[1], line_no);
            int rank = 0;
            if (!parse_number(cols[2], rank)) throw DataError("malformed record: bad rank", line_no);
            if (rank < 1 || rank > kMaxRank) throw DataError("rank out of range", line_no);
            r.entry.rank = rank;
            if (!parse_bool(cols[4], r.entry.promoted)) throw DataError("malformed record: bad promoted flag", line_no);
            try {
                r.entry.trend = ingest.builder().intern(cols[3]);
            } catch (const DataError& e) {
                throw DataError(e.reason(), line_no);
            }
            row = r;
        });

        if (!row) continue;
        if (!pending || pending->timestamp != row->ts || pending->location != row->loc) {
            flush();
            pending = TrendSnapshot{row->loc, row->ts, {}};
            pending_line = line_no;
        }
        pending->entries.push_back(row->entry);
    }
    flush();
}

ObservationLog read_any(std::istream& in, LogFormat format, const LocationCatalog& catalog, Duration tick,
                        ValidationReport* report) {
    Ingest ingest(catalog, tick, report);
    if (format == LogFormat::jsonl) {
        read_jsonl(in, ingest, report);
    } else {
        read_csv(in, ingest, report);
    }
    return std::move(ingest.builder()).build();
}

}  // namespace

LogFormat log_format_from_string(std::string_view name) {
    if (name == "jsonl" || name == "json") return LogFormat::jsonl;
    if (name == "csv") return LogFormat::csv;
    throw std::invalid_argument("unknown log format '" + std::string(name) + "'");
}

LogFormat log_format_for_path(std::string_view path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return LogFormat::csv;
    return LogFormat::jsonl;
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day = floor<days>(ts);
    const year_month_day ymd{day};
    const hh_mm_ss hms{ts - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    // YYYY-MM-DDTHH:MM:SSZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z')
        throw DataError("malformed timestamp '" + std::string(text) + "'");
    int y = 0;
    unsigned mo = 0, d = 0;
    int h = 0, mi = 0, s = 0;
    if (!parse_number(text.substr(0, 4), y) || !parse_number(text.substr(5, 2), mo) ||
        !parse_number(text.substr(8, 2), d) || !parse_number(text.substr(11, 2), h) ||
        !parse_number(text.substr(14, 2), mi) || !parse_number(text.substr(17, 2), s))
        throw DataError("malformed timestamp '" + std::string(text) + "'");
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) throw DataError("malformed timestamp '" + std::string(text) + "'");
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) throw DataError("malformed record: unterminated quote");
    out.push_back(std::move(field));
    return out;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

LocationCatalog read_catalog(std::istream& in) {
    LocationCatalog catalog;
    std::string raw;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = strip_cr(raw);
        if (blank(line)) continue;
        std::vector<std::string> cols;
        try {
            cols = split_csv_line(line);
        } catch (const DataError& e) {
            throw DataError(e.reason(), line_no);
        }
        if (first) {
            first = false;
            if (!cols.empty() && cols[0] == "id") continue;
        }
        if (cols.size() != 5) throw DataError("catalog row needs 5 columns", line_no);
        Location loc;
        loc.id = cols[0];
        loc.display_name = cols[1];
        if (!parse_double(cols[2], loc.latitude) || !parse_double(cols[3], loc.longitude))
            throw DataError("bad coordinates", line_no);
        if (!parse_bool(cols[4], loc.is_country_level)) throw DataError("bad country_level flag", line_no);
        try {
            catalog.add(std::move(loc));
        } catch (const DataError& e) {
            throw DataError(e.reason(), line_no);
        }
    }
    return catalog;
}

void write_catalog(std::ostream& out, const LocationCatalog& catalog) {
    out << "id,name,lat,lon,country_level\n";
    for (const auto& loc : catalog.locations()) {
        char coords[64];
        std::snprintf(coords, sizeof coords, "%.6f,%.6f", loc.latitude, loc.longitude);
        out << csv_escape(loc.id) << ',' << csv_escape(loc.display_name) << ',' << coords << ','
            << (loc.is_country_level ? "true" : "false") << '\n';
    }
}

ObservationLog parse_log(std::istream& in, LogFormat format, const LocationCatalog& catalog, Duration tick_interval) {
    return read_any(in, format, catalog, tick_interval, nullptr);
}

ValidationReport validate_log(std::istream& in, LogFormat format, const LocationCatalog& catalog,
                              Duration tick_interval) {
    ValidationReport report;
    read_any(in, format, catalog, tick_interval, &report);
    if (report.snapshots == 0) report.notes.emplace_back("no snapshots");
    return report;
}

void write_log(std::ostream& out, const ObservationLog& log, LogFormat format) {
    const auto& catalog = log.catalog();
    if (format == LogFormat::jsonl) {
        for (const auto& snap : log.snapshots()) {
            nlohmann::ordered_json trends = nlohmann::ordered_json::array();
            for (const auto& e : snap.entries) {
                trends.push_back(nlohmann::ordered_json{{"t", log.trend(e.trend).text}, {"r", e.rank}, {"p", e.promoted}});
            }
            nlohmann::ordered_json doc{{"ts", format_timestamp(snap.timestamp)}, {"loc", catalog[snap.location].id}, {"trends", std::move(trends)}};
            out << doc.dump() << '\n';
        }
        return;
    }
    out << "ts,loc,rank,trend,promoted\n";
    for (const auto& snap : log.snapshots()) {
        const auto ts = format_timestamp(snap.timestamp);
        const auto loc = csv_escape(catalog[snap.location].id);
        for (const auto& e : snap.entries) {
            out << ts << ',' << loc << ',' << e.rank << ',' << csv_escape(log.trend(e.trend).text) << ','
                << (e.promoted ? "true" : "false") << '\n';
        }
    }
}

}  // namespace trendflow
