#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "percept/scan.hpp"
#include "percept/scan_io.hpp"

#include <random>
#include <sstream>

using namespace percept;

namespace {

SphericalScan make_scan() {
  SphericalScan scan(sensor_profile_16(), 3, 0.3);
  scan.ego_track().add(0.3, {{0.0, 0.0}, 0.0});
  scan.ego_track().add(0.4, {{1.0, 0.0}, 0.0});
  return scan;
}

}  // namespace

TEST_CASE("position_of maps azimuth to channels") {
  const SphericalScan scan = make_scan();
  auto p = scan.position_of(0.0, -15.0, 0);
  REQUIRE(p.has_value());
  CHECK(p->channel == 0);
  CHECK(p->layer == 0);

  p = scan.position_of(360.05, -15.0, 0);  // wraparound
  REQUIRE(p.has_value());
  CHECK(p->channel == 0);

  p = scan.position_of(359.9, -15.0, 0);
  REQUIRE(p.has_value());
  CHECK(p->channel == static_cast<int>(std::floor(359.9 / 0.2)));
  CHECK(p->channel == 1799);
}

TEST_CASE("position_of rejects out-of-fov elevations") {
  const SphericalScan scan = make_scan();
  // table spacing is 1.2 deg; beyond half of it past the table edges is out of fov
  CHECK_FALSE(scan.position_of(10.0, -15.7, 0).has_value());
  CHECK(scan.position_of(10.0, -15.0 + 0.5, 0).has_value());
  CHECK_FALSE(scan.position_of(10.0, 3.7, 0).has_value());
  CHECK_FALSE(scan.position_of(10.0, -15.0, 5).has_value());  // slice out of range

  // sparse non-uniform table: readings between far-apart entries are rejected
  SensorConfig sparse = sensor_profile_16();
  sparse.elevation_deg = {-10.0, -9.0, -1.0, 0.0};
  sparse.n_layers = 4;
  const SphericalScan s2(sparse);
  CHECK_FALSE(s2.position_of(10.0, -5.0, 0).has_value());  // 4 deg from both interior entries
  CHECK(s2.position_of(10.0, -9.4, 0).has_value());
}

TEST_CASE("position_of round-trips populated cell angles") {
  SphericalScan scan = make_scan();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uaz(0.0, 360.0);
  std::uniform_int_distribution<int> ulayer(0, 15);
  for (int i = 0; i < 200; ++i) {
    const int layer = ulayer(rng);
    const double az = uaz(rng);
    const int channel = static_cast<int>(std::floor(az / 0.2)) % 1800;
    Measurement m;
    m.range = 10.0;
    m.azimuth_deg = az;
    m.elevation_deg = scan.config().elevation_deg[layer];
    m.valid = true;
    scan.insert({layer, channel, 0}, m);
    const auto p = scan.position_of(m.azimuth_deg, m.elevation_deg, 0);
    REQUIRE(p.has_value());
    CHECK(p->layer == layer);
    CHECK(p->channel == channel);
  }
}

TEST_CASE("neighbors wraps channels and excludes self") {
  const SphericalScan scan = make_scan();
  const auto n = scan.neighbors({4, 0, 0}, 1, 0);
  REQUIRE(n.size() == 2);
  CHECK(((n[0].channel == 1799 && n[1].channel == 1) ||
         (n[0].channel == 1 && n[1].channel == 1799)));
  CHECK(n[0].layer == 4);

  CHECK(scan.neighbors({4, 7, 0}, 0, 0).empty());

  // interior position, window (2, 1): (2*2+1)*(2*1+1) - 1 = 14 positions
  const auto w = scan.neighbors({4, 100, 0}, 2, 1);
  CHECK(w.size() == 14);

  // brute-force enumeration oracle
  std::vector<LogicalPosition> brute;
  for (int layer = 0; layer < 16; ++layer) {
    for (int channel = 0; channel < 1800; ++channel) {
      if (layer == 4 && channel == 100) continue;
      const int dc = std::min(std::abs(channel - 100), 1800 - std::abs(channel - 100));
      if (std::abs(layer - 4) <= 1 && dc <= 2) brute.push_back({layer, channel, 0});
    }
  }
  CHECK(brute.size() == w.size());
}

TEST_CASE("neighbors is symmetric") {
  const SphericalScan scan = make_scan();
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> ulayer(0, 15), uchan(0, 1799), uwin(0, 3);
  for (int i = 0; i < 100; ++i) {
    const LogicalPosition p{ulayer(rng), uchan(rng), 0};
    const int cw = uwin(rng), lw = uwin(rng);
    for (const auto& q : scan.neighbors(p, cw, lw)) {
      const auto back = scan.neighbors(q, cw, lw);
      CHECK(std::find(back.begin(), back.end(), p) != back.end());
    }
  }
}

TEST_CASE("timestamp model is linear in channel") {
  const SensorConfig c = sensor_profile_16();
  CHECK(c.timestamp_of(0) == 0.0);
  CHECK(c.timestamp_of(900) == doctest::Approx(0.05));
  CHECK(c.timestamp_of(450) == doctest::Approx(0.1 * 450.0 / 1800.0));
  CHECK(c.timestamp_of(450) == doctest::Approx(0.025));
}

TEST_CASE("attributes exist for unpopulated positions and leave measurements untouched") {
  SphericalScan scan = make_scan();
  const uint64_t digest = scan.measurement_digest();
  AttributeSet& a = scan.attributes({7, 1234,  1});
  CHECK(a.ground_class == GroundClass::kUnknown);
  CHECK(a.cluster_label == -1);
  a.set(AttributeSet::kCurb);
  a.ground_class = GroundClass::kElevated;
  a.cluster_label = 42;
  CHECK(scan.measurement_digest() == digest);
}

TEST_CASE("scan file round-trip preserves all populated cells") {
  SphericalScan scan = make_scan();
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ur(0.5, 49.9), uaz(0.0, 360.0), ui(0.0, 1.0);
  std::uniform_int_distribution<int> ulayer(0, 15), uslice(0, 1);
  for (int i = 0; i < 500; ++i) {
    const int layer = ulayer(rng);
    const double az = uaz(rng);
    const int channel = static_cast<int>(std::floor(az / 0.2)) % 1800;
    Measurement m;
    m.range = ur(rng);
    m.azimuth_deg = az;
    m.elevation_deg = scan.config().elevation_deg[layer];
    m.intensity = ui(rng);
    m.t_offset = scan.config().timestamp_of(channel);
    const int slice = uslice(rng);
    m.target_index = static_cast<uint8_t>(slice);
    m.valid = true;
    scan.insert({layer, channel, slice}, m);
  }

  std::stringstream ss;
  write_scan(ss, scan);
  const std::string first = ss.str();
  SphericalScan loaded = read_scan(ss, "round");

  CHECK(loaded.populated_count() == scan.populated_count());
  CHECK(loaded.scan_index() == scan.scan_index());
  CHECK(loaded.t_start() == doctest::Approx(scan.t_start()));
  CHECK(loaded.ego_track().size() == scan.ego_track().size());

  // write(read(write(x))) is byte-identical to write(x)
  std::stringstream ss2;
  write_scan(ss2, loaded);
  CHECK(ss2.str() == first);
}

TEST_CASE("scan file with header only yields an empty scan") {
  SphericalScan scan(sensor_profile_16(), 0, 0.0);
  std::stringstream ss;
  write_scan(ss, scan);
  const SphericalScan loaded = read_scan(ss, "empty");
  CHECK(loaded.populated_count() == 0);
  CHECK(loaded.cell_count() == scan.cell_count());
}

TEST_CASE("truncated record reports the line number") {
  SphericalScan scan(sensor_profile_16(), 0, 0.0);
  std::stringstream ss;
  write_scan(ss, scan);
  ss.seekp(0, std::ios::end);
  ss << "0 3 100 0 12.5 20.0\n";  // too few fields
  ss.seekg(0);
  try {
    read_scan(ss, "bad");
    FAIL("expected parse error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad:11") != std::string::npos);
  }
}
