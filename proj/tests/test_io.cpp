#include <doctest.h>

#include <cmath>

#include "kickrot/io.hpp"
#include "support/tempdir.hpp"

using namespace kickrot;
using namespace kickrot::io;

TEST_SUITE("io") {
  TEST_CASE("number formatting is fixed and folds negative zero") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(2.5e-20) == "2.5e-20");
  }

  TEST_CASE("csv round trip") {
    CsvTable t;
    t.header = {"kick", "value"};
    t.add_row({1, 0.5});
    t.add_row({2, -1.25e-7});
    const auto text = to_csv(t, {"a comment"});
    CHECK(text.rfind("# a comment\n", 0) == 0);
    const auto back = parse_csv(text);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.column("value")[1] == -1.25e-7);
    CHECK_THROWS(back.column("missing"));
    CHECK_THROWS(t.add_row({1.0}));
  }

  TEST_CASE("atomic writes and checksums") {
    const auto dir = support::fresh_dir("io");
    write_text_atomic(dir / "a.txt", "abc");
    CHECK(read_text(dir / "a.txt") == "abc");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_file(dir / "a.txt") == sha256_hex("abc"));
    write_text_atomic(dir / "a.txt", "");
    CHECK(sha256_file(dir / "a.txt") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("stats and histogram tables") {
    MomentumStats st;
    st.samples = 2;
    st.series.resize(2);
    st.series.mean_shift = {0.5, 1.0};
    st.histogram = Histogram(0.0, 1.0);
    st.histogram.add(0.2);
    st.histogram.add(1.9);
    const auto s = stats_table(st);
    CHECK(s.header == std::vector<std::string>{"kick", "mean_shift", "current", "sem", "second_moment", "variance"});
    CHECK(s.rows.size() == 2);
    CHECK(s.rows[1][0] == 2.0);
    const auto h = histogram_table(st.histogram);
    CHECK(h.header == std::vector<std::string>{"bin_lo", "bin_hi", "center", "weight", "mean"});
    CHECK(h.rows.size() == 2);
    CHECK(h.rows[1][2] == 2.0);
  }

  TEST_CASE("svg is a pure function of the csv") {
    const auto dir = support::fresh_dir("svg");
    CsvTable t;
    t.header = {"x", "y", "e"};
    for (int i = 0; i < 10; ++i) t.add_row({double(i), std::exp(-i), 0.01});
    write_text_atomic(dir / "d.csv", to_csv(t));
    PlotSpec spec{"title", "x", "y", false, {{dir / "d.csv", "x", "y", "e", "data", "#000000", true, true}}};
    const auto a = render_svg(spec);
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("polyline") != std::string::npos);
    CHECK(render_svg(spec) == a);
    spec.log_y = true;
    CHECK(render_svg(spec) != a);
    spec.log_y = false;
    t.rows[3][1] = 5.0;
    write_text_atomic(dir / "d.csv", to_csv(t));
    CHECK(render_svg(spec) != a);
  }
}
