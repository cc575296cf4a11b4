#include "ccm/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "ccm/errors.hpp"

namespace ccm {
namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    if (!all_digits(s, 0, 4) || !all_digits(s, 5, 7) || !all_digits(s, 8, 10)) return false;
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

std::vector<std::string> split_fields(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_full_double(const std::string& s) {
    if (s.empty()) throw data_error("empty numeric field");
    std::size_t consumed = 0;
    double value;
    try {
        value = std::stod(s, &consumed);
    } catch (const std::exception&) {
        throw data_error("not a number: '" + s + "'");
    }
    if (consumed != s.size()) throw data_error("trailing junk in number: '" + s + "'");
    return value;
}

[[noreturn]] void fail_row(std::size_t line_no, const std::string& why) {
    throw data_error("row " + std::to_string(line_no) + ": " + why);
}

// Shared long-CSV reader; the value column is the only difference between
// the spread and intensity formats.
std::vector<SpreadRecord> read_long_csv(std::istream& in, const std::string& value_column,
                                        bool require_positive) {
    std::string line;
    std::vector<SpreadRecord> records;
    if (!std::getline(in, line)) return records;
    {
        const auto header = split_fields(line);
        if (header.size() != 3 || header[0] != "date" || header[1] != "entity" ||
            header[2] != value_column)
            throw data_error("expected header date,entity," + value_column);
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.size() != 3) fail_row(line_no, "expected 3 comma-separated fields");
        if (!valid_iso_date(fields[0])) fail_row(line_no, "bad ISO date '" + fields[0] + "'");
        if (fields[1].empty()) fail_row(line_no, "empty entity label");
        double value;
        try {
            value = parse_full_double(fields[2]);
        } catch (const data_error& e) {
            fail_row(line_no, e.what());
        }
        if (!std::isfinite(value)) fail_row(line_no, value_column + " must be finite");
        if (require_positive && !(value > 0.0)) fail_row(line_no, value_column + " must be > 0");
        if (!require_positive && value < 0.0) fail_row(line_no, value_column + " must be >= 0");
        records.push_back({fields[0], fields[1], value});
    }
    return records;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    return in;
}

void guard_csv_token(const std::string& token) {
    if (token.find_first_of(",\r\n") != std::string::npos)
        throw data_error("token not representable in CSV: '" + token + "'");
}

}  // namespace

double spread_to_intensity(double spread_bps, double recovery) {
    if (!(spread_bps > 0.0) || !std::isfinite(spread_bps))
        throw std::domain_error("spread_to_intensity: spread must be positive");
    if (!(recovery >= 0.0) || recovery >= 1.0)
        throw std::domain_error("spread_to_intensity: recovery must be in [0, 1)");
    return (spread_bps / 1e4) / (1.0 - recovery);
}

double survival_from_intensity(double mu, double horizon_years) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::domain_error("survival_from_intensity: intensity must be positive");
    if (!(horizon_years >= 0.0) || !std::isfinite(horizon_years))
        throw std::domain_error("survival_from_intensity: horizon must be >= 0");
    return std::exp(-mu * horizon_years);
}

IngestOutput ingest(const SpreadPanel& panel, const IngestConfig& cfg) {
    if (!(cfg.recovery >= 0.0) || cfg.recovery >= 1.0)
        throw std::domain_error("ingest: recovery must be in [0, 1)");
    if (!std::isfinite(cfg.affine_a) || !std::isfinite(cfg.affine_b))
        throw std::invalid_argument("ingest: affine coefficients must be finite");

    IngestOutput out;
    out.report.rows_read = panel.records.size();

    std::set<std::string> date_set, entity_set;
    std::map<std::pair<std::string, std::string>, double> cells;
    for (const auto& rec : panel.records) {
        if (!valid_iso_date(rec.date)) throw data_error("ingest: bad date '" + rec.date + "'");
        if (rec.entity.empty()) throw data_error("ingest: empty entity label");
        if (!(rec.spread_bps > 0.0) || !std::isfinite(rec.spread_bps))
            throw data_error("ingest: spread must be positive for " + rec.entity + " on " +
                             rec.date);
        if (!cells.emplace(std::make_pair(rec.date, rec.entity), rec.spread_bps).second)
            throw data_error("ingest: duplicate quote for " + rec.entity + " on " + rec.date);
        date_set.insert(rec.date);
        entity_set.insert(rec.entity);
        ++out.report.entities[rec.entity].rows_read;
    }
    if (entity_set.size() < 2)
        throw data_error("insufficient aligned data: " + std::to_string(entity_set.size()) +
                         " entities (need 2)");

    const std::vector<std::string> dates(date_set.begin(), date_set.end());
    const std::vector<std::string> labels(entity_set.begin(), entity_set.end());

    // value per (date index, entity index); NaN marks a hole.
    const double hole = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> grid(dates.size() * labels.size(), hole);
    std::vector<bool> filled(grid.size(), false);
    const auto at = [&](std::size_t t, std::size_t k) -> double& {
        return grid[t * labels.size() + k];
    };

    for (std::size_t t = 0; t < dates.size(); ++t)
        for (std::size_t k = 0; k < labels.size(); ++k) {
            const auto it = cells.find(std::make_pair(dates[t], labels[k]));
            if (it != cells.end()) at(t, k) = it->second;
        }

    if (cfg.policy == AlignPolicy::forward_fill) {
        // Bridge per-entity runs of missing dates no longer than the cap,
        // carrying the last quote forward.  Longer runs stay missing, as do
        // dates before an entity's first quote.
        for (std::size_t k = 0; k < labels.size(); ++k) {
            std::size_t t = 0;
            double last = hole;
            while (t < dates.size()) {
                if (!std::isnan(at(t, k))) {
                    last = at(t, k);
                    ++t;
                    continue;
                }
                std::size_t run_end = t;
                while (run_end < dates.size() && std::isnan(at(run_end, k))) ++run_end;
                if (!std::isnan(last) && run_end - t <= cfg.max_fill_gap) {
                    for (std::size_t i = t; i < run_end; ++i) {
                        at(i, k) = last;
                        filled[i * labels.size() + k] = true;
                    }
                }
                t = run_end;
            }
        }
    }

    std::vector<std::string> kept_dates;
    std::vector<double> values;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        bool complete = true;
        for (std::size_t k = 0; k < labels.size(); ++k)
            if (std::isnan(at(t, k))) {
                complete = false;
                break;
            }
        if (!complete) {
            out.report.dropped_dates.push_back(dates[t]);
            for (std::size_t k = 0; k < labels.size(); ++k)
                if (!std::isnan(at(t, k)) && !filled[t * labels.size() + k])
                    ++out.report.entities[labels[k]].rows_dropped;
            continue;
        }
        kept_dates.push_back(dates[t]);
        for (std::size_t k = 0; k < labels.size(); ++k) {
            const double mu =
                cfg.affine_a * spread_to_intensity(at(t, k), cfg.recovery) + cfg.affine_b;
            if (!(mu > 0.0) || !std::isfinite(mu))
                throw data_error("ingest: adjusted intensity must stay positive for " +
                                 labels[k] + " on " + dates[t]);
            values.push_back(mu);
            if (filled[t * labels.size() + k]) ++out.report.entities[labels[k]].cells_filled;
        }
    }

    if (kept_dates.size() < 30)
        throw data_error("insufficient aligned data: " + std::to_string(kept_dates.size()) +
                         " aligned dates of " + std::to_string(dates.size()) + " (need 30)");

    out.panel = IntensityPanel(std::move(kept_dates), labels, std::move(values));
    return out;
}

std::string to_json(const IngestReport& report) {
    nlohmann::json doc;
    doc["rows_read"] = report.rows_read;
    doc["dropped_dates"] = report.dropped_dates;
    auto& entities = doc["entities"] = nlohmann::json::object();
    for (const auto& [label, stats] : report.entities) {
        entities[label] = {{"rows_read", stats.rows_read},
                           {"rows_dropped", stats.rows_dropped},
                           {"cells_filled", stats.cells_filled}};
    }
    return doc.dump(2) + "\n";
}

SpreadPanel read_spread_csv(std::istream& in) {
    return {read_long_csv(in, "spread_bps", true)};
}

SpreadPanel read_spread_csv_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_spread_csv(in);
}

IntensityPanel read_intensity_csv(std::istream& in) {
    const auto records = read_long_csv(in, "intensity", false);
    std::set<std::string> date_set, entity_set;
    std::map<std::pair<std::string, std::string>, double> cells;
    for (const auto& rec : records) {
        if (!cells.emplace(std::make_pair(rec.date, rec.entity), rec.spread_bps).second)
            throw data_error("duplicate intensity for " + rec.entity + " on " + rec.date);
        date_set.insert(rec.date);
        entity_set.insert(rec.entity);
    }
    const std::vector<std::string> dates(date_set.begin(), date_set.end());
    const std::vector<std::string> labels(entity_set.begin(), entity_set.end());
    std::vector<double> values;
    values.reserve(dates.size() * labels.size());
    for (const auto& date : dates)
        for (const auto& label : labels) {
            const auto it = cells.find(std::make_pair(date, label));
            if (it == cells.end())
                throw data_error("intensity panel has a hole: " + label + " on " + date);
            values.push_back(it->second);
        }
    return IntensityPanel(dates, labels, values);
}

IntensityPanel read_intensity_csv_file(const std::string& path) {
    auto in = open_or_throw(path);
    return read_intensity_csv(in);
}

void write_intensity_csv(std::ostream& out, const IntensityPanel& panel) {
    out << "date,entity,intensity\n";
    char buf[40];
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        guard_csv_token(panel.dates[t]);
        for (std::size_t k = 0; k < panel.cols(); ++k) {
            guard_csv_token(panel.labels[k]);
            std::snprintf(buf, sizeof(buf), "%.17g", panel.at(t, k));
            out << panel.dates[t] << ',' << panel.labels[k] << ',' << buf << '\n';
        }
    }
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw io_error("short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("cannot move " + tmp + " into place: " + ec.message());
}

std::uint64_t fnv1a(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string digest_file(const std::string& path) {
    auto in = open_or_throw(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    char out[20];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes.data(), bytes.size())));
    return out;
}

}  // namespace ccm
