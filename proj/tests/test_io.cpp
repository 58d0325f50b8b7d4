#include "support.hpp"

#include <stlasso/errors.hpp>
#include <stlasso/fourier.hpp>
#include <stlasso/io.hpp>

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

using namespace stlasso;
using namespace testkit;

namespace {

IngestResult ingest_text(const std::string& text, IngestOptions opts = {}) {
  std::istringstream in(text);
  return ingest(in, opts);
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("timestamps") {
    CHECK(parse_timestamp("1970-01-01T00:00:00") == 0);
    CHECK(parse_timestamp("1970-01-02T01:00:00Z") == 25);
    CHECK(parse_timestamp("2020-01-01 00:00:00") == 438288);
    CHECK(parse_timestamp("2020-03-01T05") == parse_timestamp("2020-03-01T05:00"));
    CHECK(format_timestamp(438288 + 24 * 60 + 5) == "2020-03-01T05:00:00");
    CHECK_THROWS_AS(parse_timestamp("2020-01-01T00:30:00"), IngestError);
    CHECK_THROWS_AS(parse_timestamp("2020-02-30T00:00:00"), IngestError);
    CHECK_THROWS_AS(parse_timestamp("yesterday"), IngestError);
    Rng rng(71);
    for (int i = 0; i < 500; ++i) {
      const std::int64_t h = pick(rng, -500000, 1000000);
      CHECK(parse_timestamp(format_timestamp(h)) == h);
    }
  }

  TEST_CASE("doubles round trip through text") {
    Rng rng(72);
    for (int i = 0; i < 1000; ++i) {
      const double v = normal(rng) * std::pow(10.0, uniform(rng, -20.0, 20.0));
      CHECK(parse_double(format_double(v), "v") == v);
    }
    CHECK_THROWS_AS(parse_double("1.5x", "v"), IngestError);
  }

  TEST_CASE("imputation rules") {
    using V = std::vector<std::optional<double>>;
    CHECK(impute_backward_forward(V{1.0, std::nullopt, 3.0}) == std::vector<double>{1.0, 3.0, 3.0});
    CHECK(impute_backward_forward(V{std::nullopt, 2.0}) == std::vector<double>{2.0, 2.0});
    CHECK(impute_backward_forward(V{2.0, std::nullopt, std::nullopt}) == std::vector<double>{2.0, 2.0, 2.0});
    CHECK_THROWS_AS(impute_backward_forward(V{std::nullopt, std::nullopt}), IngestError);
  }

  TEST_CASE("imputation matches a fill oracle and is idempotent") {
    Rng rng(73);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t len = static_cast<std::size_t>(pick(rng, 1, 300));
      std::vector<std::optional<double>> series(len);
      std::vector<double> full(len);
      for (std::size_t t = 0; t < len; ++t) {
        full[t] = normal(rng);
        if (uniform(rng, 0.0, 1.0) >= 0.1) series[t] = full[t];
      }
      if (!series[0]) series[0] = full[0];
      // oracle: scan each gap for the next observation, else the last one before it
      std::vector<double> expected(len);
      for (std::size_t t = 0; t < len; ++t) {
        std::optional<double> v = series[t];
        for (std::size_t s = t; !v && s < len; ++s) v = series[s];
        for (std::size_t s = t + 1; !v && s-- > 0;) v = series[s];
        expected[t] = *v;
      }
      const std::vector<double> filled = impute_backward_forward(series);
      CHECK(filled == expected);
      std::vector<std::optional<double>> again(filled.begin(), filled.end());
      CHECK(impute_backward_forward(again) == filled);
    }
  }

  TEST_CASE("incomplete station is dropped and reported") {
    std::ostringstream csv;
    csv << "station_id,timestamp,value\n";
    for (int t = 0; t < 20; ++t) {
      const std::string ts = format_timestamp(1000 + t);
      csv << "A," << ts << ',' << t << '\n';
      csv << "B," << ts << ',' << (t < 17 ? std::to_string(t) : "") << '\n';
      csv << "C," << ts << ',' << t * 2 << '\n';
    }
    const IngestResult r = ingest_text(csv.str());
    CHECK(r.station_ids == std::vector<std::string>{"A", "C"});
    REQUIRE(r.report.size() == 3);
    CHECK(r.report[1].id == "B");
    CHECK(r.report[1].completeness == doctest::Approx(0.85));
    CHECK_FALSE(r.report[1].kept);
    CHECK(r.panel.n() == 2);
    CHECK(r.panel.k() == 0);
  }

  TEST_CASE("complete panel round trips bit-exactly") {
    Rng rng(74);
    const PanelData panel = random_panel(rng, 3, 25, 2);
    std::ostringstream out;
    write_panel_csv(out, panel, {"s1", "s2", "s3"}, 438288, {"temp", "wind"});
    const IngestResult r = ingest_text(out.str());
    CHECK(r.panel.y == panel.y);
    for (Index t = 0; t < 25; ++t) CHECK(r.panel.x[static_cast<std::size_t>(t)] == panel.x[static_cast<std::size_t>(t)]);
    CHECK(r.regressor_names == std::vector<std::string>{"temp", "wind"});
    CHECK(r.start_hour == 438288);
    std::ostringstream again;
    write_panel_csv(again, r.panel, r.station_ids, r.start_hour, r.regressor_names);
    CHECK(again.str() == out.str());
  }

  TEST_CASE("alignment of gappy unsorted input on the hourly grid") {
    Rng rng(75);
    const std::int64_t start = parse_timestamp("2021-06-01T00:00:00");
    const std::vector<std::string> ids{"north", "south", "east"};
    std::map<std::pair<std::string, std::int64_t>, double> observed;
    std::vector<std::string> rows;
    for (const std::string& id : ids) {
      for (std::int64_t h = 0; h < 1000; ++h) {
        if (uniform(rng, 0.0, 1.0) < 0.05 && h > 0 && h < 999) continue;
        const double v = std::round(normal(rng) * 100.0) / 10.0;
        observed[{id, start + h}] = v;
        rows.push_back(id + "," + format_timestamp(start + h) + "," + format_double(v));
      }
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    std::string text = "station_id,timestamp,value\n";
    for (const std::string& r : rows) text += r + "\n";
    // the first station to appear fixes the row order
    std::vector<std::string> order;
    for (const std::string& r : rows) {
      const std::string id = r.substr(0, r.find(','));
      if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
    }
    const IngestResult res = ingest_text(text);
    REQUIRE(res.station_ids == order);
    REQUIRE(res.panel.T() == 1000);
    for (std::size_t s = 0; s < order.size(); ++s) {
      for (std::int64_t h = 0; h < 1000; ++h) {
        std::int64_t src = h;
        while (!observed.count({order[s], start + src})) ++src;
        CHECK(res.panel.y(static_cast<Index>(s), h) == observed[{order[s], start + src}]);
      }
    }
  }

  TEST_CASE("malformed input") {
    CHECK_THROWS_AS(ingest_text("station_id,timestamp,value\nA,2020-01-01T00:00:00,1\nA,2020-01-01T00:00:00,2\n"), IngestError);
    CHECK_THROWS_AS(ingest_text("id,time,value\n"), IngestError);
    CHECK_THROWS_AS(ingest_text("station_id,timestamp,value\nA,2020-01-01T00:00:00,abc\n"), IngestError);
    CHECK_THROWS_AS(ingest_text("station_id,timestamp,value\nA,2020-01-01T00:00:00\n"), IngestError);
  }

  TEST_CASE("station metadata round trip") {
    const std::vector<StationInfo> st{{"ST01", "Main, Square", 48.1, 11.5, "urban traffic"},
                                      {"ST02", "Hill \"top\"", 47.9, 10.25, "rural background"}};
    std::stringstream buf;
    write_stations(buf, st);
    const auto back = read_stations(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == "Main, Square");
    CHECK(back[1].name == "Hill \"top\"");
    CHECK(back[1].longitude == 10.25);
  }

  TEST_CASE("Fourier design values") {
    const auto x0 = fourier_design(1, 0, 2, default_periods());
    REQUIRE(x0[0].cols() == 8);
    for (Index c = 0; c < 8; c += 2) {
      CHECK(x0[0](0, c) == 0.0);
      CHECK(x0[0](1, c + 1) == 1.0);
    }
    const auto x6 = fourier_design(7, 0, 1, {kDailyPeriod});
    CHECK(x6[6](0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(x6[6](0, 1)) < 1e-15);
    CHECK(fourier_names({kYearlyPeriod, kDailyPeriod}) == std::vector<std::string>{"sin_24", "cos_24", "sin_8766", "cos_8766"});
    CHECK(fourier_design(3, 0, 2, {})[0].cols() == 0);
    CHECK_THROWS_AS(named_period("weekly"), ConfigError);
  }

  TEST_CASE("Fourier columns have zero mean over one period") {
    for (double period : {24.0, 168.0, 8766.0}) {
      const Index L = static_cast<Index>(period);
      const auto x = fourier_design(L, 438288 + 17, 1, {period});
      double s = 0.0, c = 0.0;
      for (const Matrix& m : x) {
        s += m(0, 0);
        c += m(0, 1);
      }
      CHECK(std::abs(s / period) < 1e-10);
      CHECK(std::abs(c / period) < 1e-10);
    }
  }

  TEST_CASE("Fourier columns have unit amplitude and the stated period") {
    const Index T = 24 * 40;
    const auto x = fourier_design(T, 12345, 1, {24.0, 168.0});
    for (Index col = 0; col < 4; ++col) {
      Vector v(T);
      for (Index t = 0; t < T; ++t) v[t] = x[static_cast<std::size_t>(t)](0, col);
      CHECK(v.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-6));
      const Index period = col < 2 ? 24 : 168;
      Index best = 0;
      double best_corr = -2.0;
      for (Index lag = period / 2; lag <= period + period / 2; ++lag) {
        const double corr = v.head(T - lag).dot(v.tail(T - lag)) / static_cast<double>(T - lag);
        if (corr > best_corr + 1e-12) {
          best_corr = corr;
          best = lag;
        }
      }
      CHECK(best == period);
    }
  }
}
