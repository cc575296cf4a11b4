#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ccm/estimator.hpp"

namespace ccm {

// One CDS quote: date (ISO-8601), entity label, spread in basis points
// per annum.
struct SpreadRecord {
    std::string date;
    std::string entity;
    double spread_bps;
};

struct SpreadPanel {
    std::vector<SpreadRecord> records;
};

// The credit-triangle simple rule: a flat default intensity implied by a
// running spread s and recovery R is s/(1-R).
double spread_to_intensity(double spread_bps, double recovery);

// e^(-mu * horizon) under the flat-intensity assumption.
double survival_from_intensity(double mu, double horizon_years);

enum class AlignPolicy { intersection, forward_fill };

struct IngestConfig {
    double recovery = 0.40;
    AlignPolicy policy = AlignPolicy::intersection;
    // Longest run of missing dates forward_fill may bridge per entity.
    std::size_t max_fill_gap = 5;
    // Optional rescaling of intensities, applied as a*mu + b.  The default
    // is the identity; results must stay positive.
    double affine_a = 1.0;
    double affine_b = 0.0;
};

struct EntityIngestStats {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::size_t cells_filled = 0;
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::vector<std::string> dropped_dates;
    std::map<std::string, EntityIngestStats> entities;
};

struct IngestOutput {
    IntensityPanel panel;
    IngestReport report;
};

// Convert a long-format quote set into a date-aligned intensity panel.
// Entities come out in sorted label order; dates ascending.  Requires at
// least two entities and thirty aligned dates after the policy runs.
IngestOutput ingest(const SpreadPanel& panel, const IngestConfig& cfg = {});

std::string to_json(const IngestReport& report);

// Long CSV with header `date,entity,spread_bps`.  Every row must parse;
// a malformed row aborts with its line number.
SpreadPanel read_spread_csv(std::istream& in);
SpreadPanel read_spread_csv_file(const std::string& path);

// Long CSV with header `date,entity,intensity`.  Reading requires a
// complete date-by-entity rectangle.
IntensityPanel read_intensity_csv(std::istream& in);
IntensityPanel read_intensity_csv_file(const std::string& path);
void write_intensity_csv(std::ostream& out, const IntensityPanel& panel);

// All file writes go through a temp file renamed into place, so readers
// never observe a half-written artifact.
void atomic_write_file(const std::string& path, const std::string& contents);

// FNV-1a over the raw bytes, as a 16-digit hex string.  Used to fingerprint
// inputs in run manifests.
std::uint64_t fnv1a(const void* data, std::size_t size);
std::string digest_file(const std::string& path);

}  // namespace ccm
