#include <random>
#include <string>
#include <vector>

#include "aad/errors.hpp"
#include "aad/object_map.hpp"
#include "doctest.h"

using namespace aad;

namespace {

DetectionRecord box(int frame, int class_id, double x0, double y0, double x1, double y1,
                    double score = 0.95) {
  DetectionRecord r;
  r.frame_index = frame;
  r.class_id = class_id;
  r.score = score;
  r.x0 = x0;
  r.y0 = y0;
  r.x1 = x1;
  r.y1 = y1;
  return r;
}

}  // namespace

TEST_CASE("parse_detections accepts a valid line") {
  const auto records =
      parse_detections(R"({"frame":0,"class_id":14,"score":0.95,"bbox":[10,10,50,90]})" "\n", 21);
  REQUIRE(records.size() == 1);
  CHECK(records[0].frame_index == 0);
  CHECK(records[0].class_id == 14);
  CHECK(records[0].score == 0.95);
  CHECK(records[0].x0 == 10.0);
  CHECK(records[0].y1 == 90.0);
}

TEST_CASE("parse_detections drops records below the score threshold") {
  const std::string line = R"({"frame":0,"class_id":14,"score":0.6,"bbox":[10,10,50,90]})" "\n";
  CHECK(parse_detections(line, 21).empty());

  // The threshold drops strictly-below scores only.
  const std::string edge = R"({"frame":0,"class_id":14,"score":0.8,"bbox":[10,10,50,90]})" "\n";
  CHECK(parse_detections(edge, 21).size() == 1);
}

TEST_CASE("parse_detections sorts records by frame, preserving in-frame order") {
  const std::string text =
      R"({"frame":7,"class_id":1,"score":0.9,"bbox":[0,0,4,4]})" "\n"
      R"({"frame":2,"class_id":2,"score":0.9,"bbox":[0,0,4,4]})" "\n"
      R"({"frame":7,"class_id":3,"score":0.9,"bbox":[0,0,4,4]})" "\n";
  const auto records = parse_detections(text, 21);
  REQUIRE(records.size() == 3);
  CHECK(records[0].frame_index == 2);
  CHECK(records[1].class_id == 1);  // stable order within frame 7
  CHECK(records[2].class_id == 3);
}

TEST_CASE("parse_detections reports malformed lines by number") {
  const std::string degenerate =
      R"({"frame":0,"class_id":1,"score":0.9,"bbox":[50,10,10,90]})" "\n";
  CHECK_THROWS_WITH_AS(parse_detections(degenerate, 21), doctest::Contains("line 1"),
                       FormatError);

  const std::string bad_class =
      R"({"frame":0,"class_id":1,"score":0.9,"bbox":[0,0,4,4]})" "\n"
      R"({"frame":0,"class_id":21,"score":0.9,"bbox":[0,0,4,4]})" "\n";
  CHECK_THROWS_WITH_AS(parse_detections(bad_class, 21), doctest::Contains("line 2"),
                       FormatError);

  CHECK_THROWS_AS(parse_detections("not json\n", 21), FormatError);
  CHECK_THROWS_AS(parse_detections(R"({"frame":0,"class_id":1,"score":1.5,"bbox":[0,0,4,4]})"
                                   "\n", 21),
                  FormatError);
  CHECK_THROWS_AS(parse_detections(R"({"frame":0,"class_id":1,"score":0.9,"bbox":[0,0,4]})"
                                   "\n", 21),
                  FormatError);
  CHECK_THROWS_AS(parse_detections(R"({"class_id":1,"score":0.9,"bbox":[0,0,4,4]})" "\n", 21),
                  FormatError);
}

TEST_CASE("parse_detections skips blank lines") {
  const std::string text =
      "\n" R"({"frame":1,"class_id":0,"score":0.9,"bbox":[0,0,2,2]})" "\n\n";
  CHECK(parse_detections(text, 21).size() == 1);
}

TEST_CASE("bbox_pixels maps fractional boxes to outer integer bounds") {
  const PixelRect r = bbox_pixels(box(0, 0, 0.2, 0.7, 3.8, 2.5), 100, 100);
  CHECK(r.x_begin == 0);
  CHECK(r.x_end == 4);
  CHECK(r.y_begin == 0);
  CHECK(r.y_end == 3);
  CHECK(r.pixel_count() == 12);

  const PixelRect clamped = bbox_pixels(box(0, 0, -5, -5, 3, 3), 100, 100);
  CHECK(clamped.x_begin == 0);
  CHECK(clamped.x_end == 3);

  CHECK(bbox_pixels(box(0, 0, 150, 150, 160, 160), 100, 100).empty());
}

TEST_CASE("accumulate stamps the class and total counters inside the box") {
  ObjectMap map(8, 8, 21);
  accumulate(map, {box(0, 3, 2, 2, 4, 4)});
  int touched = 0;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if (x >= 2 && x < 4 && y >= 2 && y < 4) {
        CHECK(map.class_count(x, y, 3) == 1);
        CHECK(map.total(x, y) == 1);
        ++touched;
      } else {
        CHECK(map.total(x, y) == 0);
      }
    }
  }
  CHECK(touched == 4);
}

TEST_CASE("accumulate adds overlapping boxes into the total") {
  ObjectMap map(10, 10, 21);
  accumulate(map, {box(0, 3, 0, 0, 6, 6), box(0, 7, 4, 4, 10, 10)});
  CHECK(map.total(5, 5) == 2);  // overlap region
  CHECK(map.class_count(5, 5, 3) == 1);
  CHECK(map.class_count(5, 5, 7) == 1);
  CHECK(map.total(1, 1) == 1);
  CHECK(map.total(9, 1) == 0);
}

TEST_CASE("total equals the class sum everywhere after random boxes") {
  std::mt19937_64 rng(8);
  ObjectMap map(32, 24, 5);
  std::vector<DetectionRecord> records;
  for (int i = 0; i < 1000; ++i) {
    const double x0 = static_cast<double>(rng() % 32);
    const double y0 = static_cast<double>(rng() % 24);
    records.push_back(box(i, static_cast<int>(rng() % 5), x0, y0,
                          x0 + 1 + static_cast<double>(rng() % 8),
                          y0 + 1 + static_cast<double>(rng() % 8)));
  }
  accumulate(map, records);

  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) {
      std::uint32_t sum = 0;
      for (int c = 0; c < 5; ++c) sum += map.class_count(x, y, c);
      CHECK(map.total(x, y) == sum);
    }
  }
}

TEST_CASE("class_probability is the counter ratio") {
  ObjectMap map(2, 1, 21);
  accumulate(map, {box(0, 14, 0, 0, 1, 1), box(1, 14, 0, 0, 1, 1), box(2, 3, 0, 0, 1, 1)});
  // 2 of 3 observations at (0,0) are class 14.
  CHECK(class_probability(map, 0, 0, 14) == doctest::Approx(2.0 / 3.0));
  CHECK(class_probability(map, 0, 0, 3) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(class_probability(map, 1, 0, 14), StateError);  // no history
}

TEST_CASE("a single observed class carries probability one") {
  ObjectMap map(4, 4, 21);
  accumulate(map, {box(0, 14, 0, 0, 4, 4)});
  CHECK(class_probability(map, 2, 2, 14) == 1.0);
  CHECK(class_probability(map, 2, 2, 3) == 0.0);
}

TEST_CASE("class probabilities sum to one wherever history exists") {
  std::mt19937_64 rng(77);
  ObjectMap map(16, 16, 4);
  std::vector<DetectionRecord> records;
  for (int i = 0; i < 200; ++i) {
    const double x0 = static_cast<double>(rng() % 14);
    const double y0 = static_cast<double>(rng() % 14);
    records.push_back(box(i, static_cast<int>(rng() % 4), x0, y0, x0 + 2, y0 + 2));
  }
  accumulate(map, records);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      if (map.total(x, y) == 0) continue;
      double sum = 0.0;
      for (int c = 0; c < 4; ++c) sum += class_probability(map, x, y, c);
      // The integer identity (class sum == total) is exact; the summed
      // double ratios carry at most a few ulps of rounding.
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("object_anomaly fires for a rare class over a well-observed region") {
  ObjectMap map(20, 20, 21);
  std::vector<DetectionRecord> history;
  for (int f = 0; f < 30; ++f) history.push_back(box(f, 14, 2, 2, 12, 12));
  accumulate(map, history);

  // Class 6 has never been seen there; 30 observations of class 14 qualify
  // every pixel of the smaller probe box.
  CHECK(object_anomaly(map, box(30, 6, 4, 4, 10, 10), 0.05, 20));
  // The familiar class stays normal.
  CHECK_FALSE(object_anomaly(map, box(30, 14, 4, 4, 10, 10), 0.05, 20));
}

TEST_CASE("object_anomaly stays silent without history") {
  const ObjectMap map(16, 16, 21);
  CHECK_FALSE(object_anomaly(map, box(0, 6, 2, 2, 10, 10), 0.05, 20));
}

TEST_CASE("object_anomaly needs half the box qualified before judging") {
  ObjectMap map(20, 10, 21);
  std::vector<DetectionRecord> history;
  for (int f = 0; f < 30; ++f) history.push_back(box(f, 14, 0, 0, 4, 10));
  accumulate(map, history);

  // Probe box spans x 0..10 but only x 0..4 has history: 40% qualified.
  CHECK_FALSE(object_anomaly(map, box(30, 6, 0, 0, 10, 10), 0.05, 20));
  // A probe contained in the observed strip qualifies fully and fires.
  CHECK(object_anomaly(map, box(30, 6, 0, 0, 4, 10), 0.05, 20));
}

TEST_CASE("accumulate is additive over record batches") {
  std::mt19937_64 rng(123);
  std::vector<DetectionRecord> a, b;
  for (int i = 0; i < 50; ++i) {
    const double x0 = static_cast<double>(rng() % 10);
    const double y0 = static_cast<double>(rng() % 10);
    auto& dst = (i % 2 == 0) ? a : b;
    dst.push_back(box(i, static_cast<int>(rng() % 3), x0, y0, x0 + 3, y0 + 3));
  }

  ObjectMap split(12, 12, 3);
  accumulate(split, a);
  accumulate(split, b);

  std::vector<DetectionRecord> both = a;
  both.insert(both.end(), b.begin(), b.end());
  ObjectMap joint(12, 12, 3);
  accumulate(joint, both);

  CHECK(split.counts == joint.counts);
}

TEST_CASE("repeated observation of one class never lowers its probability") {
  ObjectMap map(6, 6, 21);
  accumulate(map, {box(0, 2, 0, 0, 6, 6), box(1, 5, 0, 0, 6, 6)});
  double prev = class_probability(map, 3, 3, 5);
  for (int f = 2; f < 12; ++f) {
    accumulate(map, {box(f, 5, 0, 0, 6, 6)});
    const double now = class_probability(map, 3, 3, 5);
    CHECK(now >= prev);
    prev = now;
  }
}
