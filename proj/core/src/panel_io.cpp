#include "stlasso/errors.hpp"
#include "stlasso/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace stlasso {

namespace {

bool read_record(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty()) return true;
  }
  return false;
}

bool is_missing(const std::string& field) { return field.empty() || field == "NA" || field == "NaN"; }

struct StationRows {
  std::string id;
  // hour -> (value, regressors); missing entries are nullopt
  std::map<std::int64_t, std::vector<std::optional<double>>> rows;
};

}  // namespace

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw IngestError("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::vector<double> impute_backward_forward(const std::vector<std::optional<double>>& series) {
  std::vector<double> out(series.size());
  std::optional<double> next;
  std::vector<bool> filled(series.size(), false);
  for (std::size_t r = series.size(); r-- > 0;) {
    if (series[r]) next = series[r];
    if (next) {
      out[r] = *next;
      filled[r] = true;
    }
  }
  if (!next) throw IngestError("impute_backward_forward: series has no observed value");
  std::optional<double> prev;
  for (std::size_t r = 0; r < series.size(); ++r) {
    if (filled[r]) prev = out[r];
    else out[r] = *prev;  // trailing gap: a value exists before it
  }
  return out;
}

IngestResult ingest(std::istream& in, const IngestOptions& opts) {
  if (!(opts.completeness_threshold >= 0.0 && opts.completeness_threshold <= 1.0)) {
    throw ConfigError("ingest: completeness threshold must lie in [0, 1]");
  }
  std::string line;
  std::size_t line_no = 0;
  if (!read_record(in, line, line_no)) throw IngestError("ingest: empty input (header row is mandatory)");
  const auto header = split_csv(line, line_no);
  if (header.size() < 3 || header[0] != "station_id" || header[1] != "timestamp" || header[2] != "value") {
    throw IngestError("ingest: header must start with station_id,timestamp,value");
  }
  IngestResult res;
  res.regressor_names.assign(header.begin() + 3, header.end());
  const std::size_t k = res.regressor_names.size();

  std::vector<StationRows> stations;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> duplicates;
  std::optional<std::int64_t> lo, hi;
  while (read_record(in, line, line_no)) {
    const auto f = split_csv(line, line_no);
    if (f.size() != header.size()) {
      throw IngestError("ingest: line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                        " fields, header has " + std::to_string(header.size()));
    }
    std::int64_t hour = 0;
    try {
      hour = parse_timestamp(f[1]);
    } catch (const IngestError& e) {
      throw IngestError("ingest: line " + std::to_string(line_no) + ": " + e.what());
    }
    auto [it, inserted] = index.emplace(f[0], stations.size());
    if (inserted) stations.push_back({f[0], {}});
    StationRows& st = stations[it->second];
    std::vector<std::optional<double>> vals(k + 1);
    for (std::size_t c = 0; c <= k; ++c) {
      if (!is_missing(f[c + 2])) {
        vals[c] = parse_double(f[c + 2], "line " + std::to_string(line_no) + " column " + header[c + 2]);
      }
    }
    if (!st.rows.emplace(hour, std::move(vals)).second) duplicates.push_back(f[0] + "@" + f[1]);
    lo = lo ? std::min(*lo, hour) : hour;
    hi = hi ? std::max(*hi, hour) : hour;
  }
  if (!duplicates.empty()) {
    std::ostringstream os;
    os << "ingest: " << duplicates.size() << " duplicate (station, timestamp) pairs:";
    for (std::size_t d = 0; d < duplicates.size() && d < 20; ++d) os << ' ' << duplicates[d];
    if (duplicates.size() > 20) os << " ...";
    throw IngestError(os.str());
  }
  if (stations.empty()) throw IngestError("ingest: no data rows");

  const std::int64_t start = opts.start.value_or(*lo);
  const std::int64_t end = opts.end.value_or(*hi);
  if (end < start) throw IngestError("ingest: empty time window");
  const Index T = static_cast<Index>(end - start + 1);
  res.start_hour = start;

  std::vector<std::vector<std::vector<double>>> kept;  // station -> column -> series
  for (const auto& st : stations) {
    StationCompleteness rep;
    rep.id = st.id;
    rep.expected = T;
    std::vector<std::vector<std::optional<double>>> cols(k + 1, std::vector<std::optional<double>>(static_cast<std::size_t>(T)));
    for (const auto& [hour, vals] : st.rows) {
      if (hour < start || hour > end) continue;
      const auto t = static_cast<std::size_t>(hour - start);
      for (std::size_t c = 0; c <= k; ++c) cols[c][t] = vals[c];
      if (vals[0]) ++rep.observed;
    }
    rep.completeness = static_cast<double>(rep.observed) / static_cast<double>(T);
    rep.kept = rep.completeness >= opts.completeness_threshold && rep.observed > 0;
    if (rep.kept) {
      std::vector<std::vector<double>> filled;
      for (std::size_t c = 0; c <= k; ++c) {
        try {
          filled.push_back(impute_backward_forward(cols[c]));
        } catch (const IngestError&) {
          throw IngestError("ingest: station " + st.id + " has no observed " +
                            (c == 0 ? std::string("value") : res.regressor_names[c - 1]));
        }
      }
      kept.push_back(std::move(filled));
      res.station_ids.push_back(st.id);
    }
    res.report.push_back(rep);
  }
  if (kept.empty()) {
    std::ostringstream os;
    os << "ingest: no station reaches completeness " << opts.completeness_threshold << " (";
    for (std::size_t s = 0; s < res.report.size(); ++s) {
      os << (s ? ", " : "") << res.report[s].id << '=' << res.report[s].completeness;
    }
    os << ')';
    throw IngestError(os.str());
  }

  const Index n = static_cast<Index>(kept.size());
  Matrix y(n, T);
  std::vector<Matrix> x(static_cast<std::size_t>(T), Matrix(n, static_cast<Index>(k)));
  for (Index i = 0; i < n; ++i) {
    const auto& cols = kept[static_cast<std::size_t>(i)];
    for (Index t = 0; t < T; ++t) {
      y(i, t) = cols[0][static_cast<std::size_t>(t)];
      for (std::size_t c = 0; c < k; ++c) x[static_cast<std::size_t>(t)](i, static_cast<Index>(c)) = cols[c + 1][static_cast<std::size_t>(t)];
    }
  }
  res.panel = PanelData(std::move(y), std::move(x));
  return res;
}

IngestResult ingest_files(const std::vector<std::string>& paths, const IngestOptions& opts) {
  if (paths.empty()) throw IngestError("ingest: no input files");
  std::stringstream merged;
  std::string header;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw IngestError("ingest: cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    if (!read_record(in, line, line_no)) throw IngestError("ingest: " + path + " is empty");
    if (header.empty()) {
      header = line;
      merged << header << '\n';
    } else if (line != header) {
      throw IngestError("ingest: header of " + path + " differs from the first file");
    }
    merged << in.rdbuf();
    merged << '\n';
  }
  return ingest(merged, opts);
}

void write_panel_csv(std::ostream& out, const PanelData& panel, const std::vector<std::string>& station_ids,
                     std::int64_t start_hour, const std::vector<std::string>& regressor_names) {
  const Index n = panel.n();
  const Index k = panel.k();
  if (static_cast<Index>(station_ids.size()) != n) throw DimensionError("write_panel_csv: station id count != n");
  if (!regressor_names.empty() && static_cast<Index>(regressor_names.size()) != k) {
    throw DimensionError("write_panel_csv: regressor name count != k");
  }
  out << "station_id,timestamp,value";
  for (Index c = 0; c < k; ++c) {
    out << ',' << (regressor_names.empty() ? "x" + std::to_string(c + 1) : quote_csv(regressor_names[static_cast<std::size_t>(c)]));
  }
  out << '\n';
  for (Index i = 0; i < n; ++i) {
    const std::string id = quote_csv(station_ids[static_cast<std::size_t>(i)]);
    for (Index t = 0; t < panel.T(); ++t) {
      out << id << ',' << format_timestamp(start_hour + t) << ',' << format_double(panel.y(i, t));
      for (Index c = 0; c < k; ++c) out << ',' << format_double(panel.x[static_cast<std::size_t>(t)](i, c));
      out << '\n';
    }
  }
}

std::vector<StationInfo> read_stations(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!read_record(in, line, line_no)) throw IngestError("stations: empty input");
  const auto header = split_csv(line, line_no);
  const std::vector<std::string> expected{"station_id", "name", "latitude", "longitude", "location_type"};
  if (header != expected) {
    throw IngestError("stations: header must be station_id,name,latitude,longitude,location_type");
  }
  std::vector<StationInfo> out;
  while (read_record(in, line, line_no)) {
    const auto f = split_csv(line, line_no);
    if (f.size() != expected.size()) throw IngestError("stations: line " + std::to_string(line_no) + " has the wrong field count");
    out.push_back({f[0], f[1], parse_double(f[2], "latitude"), parse_double(f[3], "longitude"), f[4]});
  }
  return out;
}

void write_stations(std::ostream& out, const std::vector<StationInfo>& stations) {
  out << "station_id,name,latitude,longitude,location_type\n";
  for (const auto& s : stations) {
    out << quote_csv(s.id) << ',' << quote_csv(s.name) << ',' << format_double(s.latitude) << ','
        << format_double(s.longitude) << ',' << quote_csv(s.location_type) << '\n';
  }
}

}  // namespace stlasso
