#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

#include "scribe/evaluation.hpp"
#include "support/random.hpp"

namespace scribe::evaluation {
namespace {

PenTrace trace_along(const Polyline& pts, double dt = 0.01, bool down = true, double t0 = 0.0) {
  PenTrace t;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t.push_back({t0 + static_cast<double>(i) * dt, pts[i].x, pts[i].y, down ? -0.5 : 2.0, down});
  }
  return t;
}

// Brute-force oracle: resample both sides, then scan every reference segment.
double brute_deviation(const std::vector<Polyline>& reference, const PenTrace& trace, double spacing) {
  std::vector<Polyline> ref;
  for (const auto& l : reference) ref.push_back(resample_by_arc_length(l, spacing));
  double worst = 0.0;
  for (const auto& path : pen_down_paths(trace)) {
    for (const Point2 p : resample_by_arc_length(path, spacing)) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& l : ref) {
        if (l.size() == 1) best = std::min(best, distance(p, l[0]));
        for (std::size_t i = 1; i < l.size(); ++i) best = std::min(best, point_segment_distance(p, l[i - 1], l[i]));
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

Polyline random_polyline(testing::Rng& rng, Point2 origin, int max_points) {
  Polyline l{origin};
  for (int i = 0, n = static_cast<int>(rng.integer(1, max_points)); i < n; ++i) {
    l.push_back({l.back().x + rng.real(-3, 3), l.back().y + rng.real(-3, 3)});
  }
  return l;
}

TEST(Geometry, ResampleKeepsEndsAndSpacing) {
  const Polyline l{{0, 0}, {1, 0}, {1, 0.33}};
  const auto r = resample_by_arc_length(l, 0.05);
  EXPECT_EQ(r.front(), l.front());
  EXPECT_EQ(r.back(), l.back());
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LE(distance(r[i], r[i - 1]), 0.05 + 1e-12);
  EXPECT_EQ(resample_by_arc_length({{2, 3}}, 0.05), (Polyline{{2, 3}}));
}

TEST(Geometry, PointSegmentDistance) {
  EXPECT_DOUBLE_EQ(point_segment_distance({5, 2}, {0, 0}, {10, 0}), 2.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({-3, 4}, {0, 0}, {10, 0}), 5.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({1, 1}, {0, 0}, {0, 0}), std::sqrt(2.0));
}

TEST(MaxDeviation, IdenticalPathsAreZero) {
  const Polyline l{{10, 10}, {20, 10}, {20, 15}, {12, 18}};
  EXPECT_NEAR(max_deviation({l}, trace_along(l)), 0.0, 1e-12);
}

TEST(MaxDeviation, ParallelOffset) {
  const Polyline ref{{0, 0}, {10, 0}};
  const Polyline drawn{{0, 0.2}, {10, 0.2}};
  EXPECT_NEAR(max_deviation({ref}, trace_along(drawn)), 0.2, 1e-12);
}

TEST(MaxDeviation, IsDirectedFromTraceToReference) {
  // A short trace on a long reference has no deviation; the reverse does.
  const Polyline ref{{0, 0}, {10, 0}};
  EXPECT_NEAR(max_deviation({ref}, trace_along({{2, 0}, {3, 0}})), 0.0, 1e-12);
  EXPECT_NEAR(max_deviation({{{2, 0}, {3, 0}}}, trace_along(ref)), 7.0, 1e-12);
}

TEST(MaxDeviation, PenUpSamplesAreIgnored) {
  const Polyline ref{{0, 0}, {10, 0}};
  auto t = trace_along(ref);
  auto far = trace_along({{50, 50}, {60, 60}}, 0.01, false, 1.0);
  t.insert(t.end(), far.begin(), far.end());
  EXPECT_NEAR(max_deviation({ref}, t), 0.0, 1e-12);
}

TEST(MaxDeviation, EmptyInputsThrow) {
  const Polyline ref{{0, 0}, {10, 0}};
  EXPECT_THROW(max_deviation({}, trace_along(ref)), EmptyInput);
  EXPECT_THROW(max_deviation({ref}, {}), EmptyInput);
  EXPECT_THROW(max_deviation({ref}, trace_along(ref, 0.01, false)), EmptyInput);
}

TEST(MaxDeviation, MatchesBruteForceOracle) {
  testing::Rng rng(71);
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<Polyline> ref;
    for (int i = 0, n = static_cast<int>(rng.integer(1, 4)); i < n; ++i)
      ref.push_back(random_polyline(rng, {rng.real(0, 20), rng.real(0, 20)}, 6));
    PenTrace t;
    double clock = 0.0;
    for (int i = 0, n = static_cast<int>(rng.integer(1, 3)); i < n; ++i) {
      auto part = trace_along(random_polyline(rng, {rng.real(0, 20), rng.real(0, 20)}, 5), 0.01, true, clock);
      clock = part.back().t + 0.01;
      t.insert(t.end(), part.begin(), part.end());
      t.push_back({clock, 0, 0, 1.0, false});
      clock += 0.01;
    }
    ASSERT_NEAR(max_deviation(ref, t), brute_deviation(ref, t, kResampleSpacingMm), 1e-9);
  }
}

TEST(MaxDeviation, TranslationInvariant) {
  testing::Rng rng(72);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ref = random_polyline(rng, {5, 5}, 8);
    const auto drawn = random_polyline(rng, {5.3, 4.8}, 8);
    const Point2 shift{rng.real(-50, 50), rng.real(-50, 50)};
    Polyline ref2, drawn2;
    for (auto p : ref) ref2.push_back(p + shift);
    for (auto p : drawn) drawn2.push_back(p + shift);
    ASSERT_NEAR(max_deviation({ref}, trace_along(drawn)), max_deviation({ref2}, trace_along(drawn2)), 1e-6);
  }
}

TEST(WritingSpeed, TenMillimetresInThreeSeconds) {
  const PenTrace t{{0.0, 0, 0, -0.5, true}, {3.0, 10, 0, -0.5, true}};
  // 10 mm / 3 s * 60 s/min.
  EXPECT_NEAR(writing_speed(t), 10.0 / 3.0 * 60.0, 1e-12);
  EXPECT_NEAR(writing_speed(t), 200.0, 1e-12);
}

TEST(WritingSpeed, StationaryPenIsZero) {
  const PenTrace t{{0.0, 4, 4, -0.5, true}, {1.0, 4, 4, -0.5, true}};
  EXPECT_EQ(writing_speed(t), 0.0);
}

TEST(WritingSpeed, PenUpTimeAndTravelAreExcluded) {
  const PenTrace t{{0.0, 0, 0, -0.5, true},  {1.0, 5, 0, -0.5, true},  {2.0, 40, 40, 2.0, false},
                   {50.0, 0, 5, -0.5, true}, {51.0, 5, 5, -0.5, true}};
  EXPECT_NEAR(writing_speed(t), 10.0 / 2.0 * 60.0, 1e-12);
}

TEST(WritingSpeed, TimeShiftInvariant) {
  testing::Rng rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    PenTrace t;
    double clock = 0.0;
    for (int i = 0, n = static_cast<int>(rng.integer(2, 30)); i < n; ++i) {
      clock += rng.real(0.001, 0.1);
      t.push_back({clock, rng.real(0, 10), rng.real(0, 10), 0.0, i < 2 || rng.chance(0.8)});
    }
    if (!t[1].pen_down) continue;
    const double shift = rng.real(-100, 100);
    auto shifted = t;
    for (auto& s : shifted) s.t += shift;
    ASSERT_NEAR(writing_speed(t), writing_speed(shifted), 1e-6 * writing_speed(t) + 1e-9);
  }
}

TEST(WritingSpeed, NoDrawSegmentsThrows) {
  EXPECT_THROW(writing_speed({}), NoDrawSegments);
  EXPECT_THROW(writing_speed({{0.0, 0, 0, -0.5, true}}), NoDrawSegments);
  EXPECT_THROW(writing_speed({{0.0, 0, 0, -0.5, true}, {1.0, 1, 0, 1.0, false}, {2.0, 2, 0, -0.5, true}}),
               NoDrawSegments);
}

TEST(DepthError, OnlyDrawTargetsCount) {
  using hostctl::PenState;
  const std::vector<hostctl::TargetPoint> targets{
      {0, 0, 0, PenState::Travel}, {0, 0, 0, PenState::Draw}, {0, 0, 0, PenState::Draw}, {0, 0, 0, PenState::Travel}};
  const std::vector<PenSample> completions{
      {0, 0, 0, 5.0, false}, {0, 0, 0, -0.5, true}, {0, 0, 0, -0.3, true}, {0, 0, 0, 2.0, false}};
  EXPECT_NEAR(max_depth_error(targets, completions, 0.5), 0.2, 1e-12);
  EXPECT_EQ(max_depth_error({}, {}, 0.5), 0.0);
}

TEST(Svg, EmptyInputGivesSkeleton) {
  const auto svg = render_svg({}, {});
  EXPECT_NE(svg.find("viewBox=\"0 0 0 0\""), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, IdenticalPathsDrawBothLayers) {
  const Polyline l{{10, 10}, {20, 10}, {20, 15}};
  const auto svg = render_svg({l}, trace_along(l));
  EXPECT_NE(svg.find("stroke=\"#1f4e9c\""), std::string::npos);
  EXPECT_NE(svg.find("stroke=\"#d62728\""), std::string::npos);
  EXPECT_NE(svg.find("max 0.000 mm"), std::string::npos);
  // Bounding box 10..20 x 10..15 plus a 2 mm margin, in 0.1 mm units.
  EXPECT_NE(svg.find("viewBox=\"80.00 80.00 140.00 90.00\""), std::string::npos) << svg;
}

TEST(Svg, HotspotsLabelTheWorstPoint) {
  const Polyline ref{{0, 0}, {30, 0}};
  const Polyline drawn{{0, 0.05}, {10, 0.05}, {15, 0.25}, {20, 0.05}, {30, 0.05}};
  const auto svg = render_svg({ref}, trace_along(drawn));
  EXPECT_NE(svg.find("max 0.250 mm"), std::string::npos);
  const std::regex circle("<circle ");
  const auto n = std::distance(std::sregex_iterator(svg.begin(), svg.end(), circle), std::sregex_iterator());
  EXPECT_GE(n, 1);
  EXPECT_LE(n, 50);
}

TEST(Svg, ByteForByteDeterministic) {
  testing::Rng rng(74);
  const auto ref = random_polyline(rng, {5, 5}, 30);
  const auto drawn = random_polyline(rng, {5, 5.1}, 30);
  EXPECT_EQ(render_svg({ref}, trace_along(drawn)), render_svg({ref}, trace_along(drawn)));
}

TEST(Cents, ParseAndFormat) {
  EXPECT_EQ(Cents::parse("56.09").value, 5609);
  EXPECT_EQ(Cents::parse("4").value, 400);
  EXPECT_EQ(Cents::parse("0.5").value, 50);
  EXPECT_EQ(Cents{5609}.str(), "56.09");
  EXPECT_EQ(Cents{7}.str(), "0.07");
  for (const char* bad : {"", ".5", "1.", "1.234", "-1.00", "1,00", "abc", "1.0x"})
    EXPECT_THROW(Cents::parse(bad), std::invalid_argument) << bad;
}

TEST(Bom, ShippedTableTotals) {
  const auto items = load_bom(std::string(SCRIBE_DATA_DIR) + "/bom.csv");
  ASSERT_EQ(items.size(), 8u);
  EXPECT_EQ(items[0], (BomItem{"Raspberry Pi Pico", 1, Cents{400}}));
  EXPECT_EQ(items[1], (BomItem{"Motors/Drivers", 6, Cents{1400}}));
  // 4.00 + 14.00 + 5.40 + 3.00 + 13.00 + 0.69 + 10.00 + 6.00
  EXPECT_EQ(bom_total(items).value, 400 + 1400 + 540 + 300 + 1300 + 69 + 1000 + 600);
  EXPECT_EQ(bom_total(items).str(), "56.09");
  const auto table = format_bom_table(items);
  EXPECT_NE(table.find("Limit Switch"), std::string::npos);
  EXPECT_NE(table.rfind("56.09"), std::string::npos);
}

TEST(Bom, EmptyListTotalsZero) {
  EXPECT_EQ(bom_total({}).str(), "0.00");
  EXPECT_TRUE(parse_bom("Component,Count,Total Cost (USD)\n").empty());
}

TEST(Bom, NamesMayContainCommas) {
  const auto items = parse_bom("Component,Count,Total Cost (USD)\nNuts, bolts, washers,3,1.25\n");
  ASSERT_EQ(items.size(), 1u);
  EXPECT_EQ(items[0].name, "Nuts, bolts, washers");
  EXPECT_EQ(items[0].count, 3);
}

TEST(Bom, RejectsMalformedRows) {
  for (const char* text : {"Name,Qty,Cost\n", "Component,Count,Total Cost (USD)\nA,1\n",
                           "Component,Count,Total Cost (USD)\nA,0,1.00\n", "Component,Count,Total Cost (USD)\nA,x,1.00\n",
                           "Component,Count,Total Cost (USD)\nA,1,1.001\n", "Component,Count,Total Cost (USD)\n,1,1.00\n"}) {
    EXPECT_THROW(parse_bom(text), std::invalid_argument) << text;
  }
}

TEST(Bom, TotalIsOrderIndependent) {
  testing::Rng rng(75);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<BomItem> items;
    std::int64_t sum = 0;
    for (int i = 0, n = static_cast<int>(rng.integer(0, 20)); i < n; ++i) {
      const auto c = rng.integer(0, 100000);
      sum += c;
      items.push_back({"part" + std::to_string(i), 1, Cents{c}});
    }
    std::shuffle(items.begin(), items.end(), rng.engine());
    ASSERT_EQ(bom_total(items).value, sum);
  }
}

}  // namespace
}  // namespace scribe::evaluation
