#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nport/touchstone.hpp"
#include "test_util.hpp"

using namespace nport;

TEST_CASE("1-port RI parsing") {
  const auto d = parse_touchstone("# GHz S RI R 50\n1.0 0.5 -0.5\n");
  CHECK(d.n_ports == 1);
  CHECK(d.reference_impedance == 50.0);
  REQUIRE(d.points.size() == 1);
  CHECK(d.points[0].frequency_hz == 1e9);
  CHECK(d.points[0].s(0, 0) == Complex(0.5, -0.5));
}

TEST_CASE("MA and DB decoding") {
  const auto ma = parse_touchstone("# MHz S MA R 50\n100 1.0 90\n");
  CHECK(ma.points[0].frequency_hz == 1e8);
  CHECK(std::abs(ma.points[0].s(0, 0) - Complex(0, 1)) < 1e-12);

  const auto db = parse_touchstone("# GHz S DB R 50\n2.0 0 0\n");
  CHECK(std::abs(db.points[0].s(0, 0) - Complex(1, 0)) < 1e-15);
}

TEST_CASE("option line defaults are GHz S MA R 50") {
  const auto d = parse_touchstone("#\n1.0 1.0 0\n");
  CHECK(d.reference_impedance == 50.0);
  CHECK(d.points[0].frequency_hz == 1e9);
  CHECK(std::abs(d.points[0].s(0, 0) - Complex(1, 0)) < 1e-15);
}

TEST_CASE("2-port column order is S11 S21 S12 S22") {
  // regression lock: position 2 is S21, position 3 is S12
  const auto d = parse_touchstone(
      "# Hz S RI R 50\n"
      "1 0.11 0 0.21 0 0.12 0 0.22 0\n");
  REQUIRE(d.n_ports == 2);
  const auto& s = d.points[0].s;
  CHECK(s(0, 0).real() == doctest::Approx(0.11));
  CHECK(s(1, 0).real() == doctest::Approx(0.21));
  CHECK(s(0, 1).real() == doctest::Approx(0.12));
  CHECK(s(1, 1).real() == doctest::Approx(0.22));
}

TEST_CASE("4-port block layout: rows on separate lines") {
  std::string text = "# Hz S RI R 50\n";
  // 1st line: freq + row 1; rows 2..4 follow
  text += "1 1 0 2 0 3 0 4 0\n";
  text += "5 0 6 0 7 0 8 0\n";
  text += "9 0 10 0 11 0 12 0\n";
  text += "13 0 14 0 15 0 16 0\n";
  const auto d = parse_touchstone(text);
  REQUIRE(d.n_ports == 4);
  const auto& s = d.points[0].s;
  CHECK(s(0, 0).real() == 1.0);
  CHECK(s(0, 3).real() == 4.0);
  CHECK(s(3, 0).real() == 13.0);
  CHECK(s(3, 3).real() == 16.0);
}

TEST_CASE("error paths") {
  CHECK_THROWS_AS(parse_touchstone("1.0 0.5 0.5\n"), FormatError);
  CHECK_THROWS_AS(parse_touchstone("# GHz Y RI R 50\n1 1 0\n"),
                  UnsupportedFormatError);
  CHECK_THROWS_AS(parse_touchstone("[Version] 2.0\n# GHz S RI R 50\n1 1 0\n"),
                  UnsupportedFormatError);
  // non-monotonic frequency (1-port)
  CHECK_THROWS_AS(parse_touchstone("# GHz S RI R 50\n2 1 0\n1 1 0\n"),
                  DataError);
  // wrong value count
  CHECK_THROWS_AS(parse_touchstone("# GHz S RI R 50\n1 0.5\n"), DataError);
  // non-positive frequency
  CHECK_THROWS_AS(parse_touchstone("# GHz S RI R 50\n0 1 0\n"), DataError);
}

TEST_CASE("noise-parameter section is skipped with a warning") {
  std::vector<std::string> warnings;
  const auto d = parse_touchstone(
      "# GHz S RI R 50\n"
      "1 0.1 0 0.2 0 0.3 0 0.4 0\n"
      "2 0.1 0 0.2 0 0.3 0 0.4 0\n"
      "1.5 2.0 0.4 110 0.8\n",  // noise line: f Fmin |Gopt| ang Rn
      0, &warnings);
  CHECK(d.points.size() == 2);
  REQUIRE(warnings.size() == 1);
}

TEST_CASE("parser survives arbitrary bytes with structured errors") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::string junk(rng() % 200, '\0');
    for (auto& ch : junk) ch = static_cast<char>(rng() % 256);
    try {
      (void)parse_touchstone(junk);
    } catch (const FormatError&) {
    } catch (const UnsupportedFormatError&) {
    } catch (const DataError&) {
    }
  }
  CHECK(true);
}

TEST_CASE("writer emits expected 1-port RI line") {
  ScatteringData d;
  d.n_ports = 1;
  d.points.push_back({1e9, ComplexMatrix::Constant(1, 1, Complex(0, 1))});
  TouchstoneOptions opts;
  opts.data_format = DataFormat::RI;
  opts.frequency_unit = FrequencyUnit::GHz;
  const auto text = write_touchstone(d, opts);
  CHECK(text.find("1 0 1") != std::string::npos);
}

namespace {

ScatteringData make_sweep_data(std::mt19937_64& rng, int n, int n_points) {
  ScatteringData d;
  d.n_ports = n;
  d.reference_impedance = 50.0;
  double f = 1e6;
  for (int i = 0; i < n_points; ++i) {
    f *= 1.01 + 0.3 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    d.points.push_back({f, nport::test::random_matrix(rng, n, n)});
  }
  return d;
}

}  // namespace

TEST_CASE("property: RI round-trip is bit exact (1, 2, 4 ports)") {
  std::mt19937_64 rng(3);
  TouchstoneOptions opts;
  opts.data_format = DataFormat::RI;
  // Hz keeps the frequency scale factor exact; other units round twice.
  opts.frequency_unit = FrequencyUnit::Hz;
  for (int n : {1, 2, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto d = make_sweep_data(rng, n, 5);
      const auto back = parse_touchstone(write_touchstone(d, opts));
      REQUIRE(back.n_ports == n);
      REQUIRE(back.points.size() == d.points.size());
      for (size_t i = 0; i < d.points.size(); ++i) {
        CHECK(back.points[i].frequency_hz == d.points[i].frequency_hz);
        CHECK(back.points[i].s == d.points[i].s);
      }
    }
  }
}

TEST_CASE("property: RI, MA and DB encodings agree within 1e-12") {
  std::mt19937_64 rng(5);
  for (int n : {1, 2, 3}) {
    const auto d = make_sweep_data(rng, n, 4);
    TouchstoneOptions opts;
    opts.data_format = DataFormat::RI;
    const auto ri = parse_touchstone(write_touchstone(d, opts));
    opts.data_format = DataFormat::MA;
    const auto ma = parse_touchstone(write_touchstone(d, opts));
    opts.data_format = DataFormat::DB;
    const auto db = parse_touchstone(write_touchstone(d, opts));
    for (size_t i = 0; i < d.points.size(); ++i) {
      CHECK((ri.points[i].s - ma.points[i].s).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((ri.points[i].s - db.points[i].s).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}
