#pragma once

// CSV panel ingestion and export.
//
// Long format, one row per (station, hour), header mandatory:
//   station_id,timestamp,value[,<regressor>...]
// Timestamps are ISO-8601 on the hour ("2020-01-01T05:00:00", optional trailing "Z";
// a space may replace the "T"). Empty fields and "NA" are missing values.

#include "stlasso/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stlasso {

/// Whole hours since 1970-01-01T00:00:00 UTC. Throws IngestError on malformed input or
/// a timestamp that is not on the hour.
std::int64_t parse_timestamp(std::string_view text);
/// "YYYY-MM-DDTHH:00:00".
std::string format_timestamp(std::int64_t hours);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Strict full-field parse; throws IngestError naming `what`.
double parse_double(std::string_view text, std::string_view what);

struct StationInfo {
  std::string id;
  std::string name;
  double latitude = 0.0;
  double longitude = 0.0;
  std::string location_type;
};

/// Columns station_id,name,latitude,longitude,location_type.
std::vector<StationInfo> read_stations(std::istream& in);
void write_stations(std::ostream& out, const std::vector<StationInfo>& stations);

struct StationCompleteness {
  std::string id;
  Index observed = 0;
  Index expected = 0;
  double completeness = 0.0;
  bool kept = false;
};

struct IngestOptions {
  double completeness_threshold = 0.90;
  /// Grid window [start, end] in hours; defaults to the span of all parsed timestamps.
  std::optional<std::int64_t> start;
  std::optional<std::int64_t> end;
};

struct IngestResult {
  PanelData panel;
  std::vector<std::string> station_ids;  // panel row order (first appearance in the input)
  std::vector<std::string> regressor_names;
  std::int64_t start_hour = 0;
  std::vector<StationCompleteness> report;  // every station seen, input order
};

/// Parses long-format CSV text, aligns stations on the common hourly grid, drops stations
/// whose share of observed values is below the threshold and fills the remaining gaps with
/// impute_backward_forward. Regressor columns are filled the same way.
/// Errors: duplicate (station, timestamp) pairs, malformed rows, no surviving station.
IngestResult ingest(std::istream& in, const IngestOptions& opts = {});
IngestResult ingest_files(const std::vector<std::string>& paths, const IngestOptions& opts = {});

/// Backward fill (next observed value) then forward fill for trailing gaps.
/// Throws IngestError when nothing is observed.
std::vector<double> impute_backward_forward(const std::vector<std::optional<double>>& series);

/// Splits one CSV record; double quotes may wrap a field and "" escapes a quote.
/// Throws IngestError on an unterminated quote, naming `line_no`.
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no);
/// Quotes a field only when it holds a comma, quote or newline.
std::string quote_csv(const std::string& field);

/// Writes the panel in the long format above; x columns are named `regressor_names`
/// (default x1..xk). Doubles use format_double, so ingest() reads the file back bit-exactly.
void write_panel_csv(std::ostream& out, const PanelData& panel,
                     const std::vector<std::string>& station_ids, std::int64_t start_hour,
                     const std::vector<std::string>& regressor_names = {});

}  // namespace stlasso
