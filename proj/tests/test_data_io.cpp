#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "popsize/data_io.hpp"
#include "popsize/errors.hpp"

#include "support.hpp"

using namespace popsize;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string &name, const std::string &content) {
    path = fs::temp_directory_path() /
           ("popsize_test_" + std::to_string(::getpid()) + "_" + name);
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

Schema age_schema() {
  Schema s;
  s.covariates.push_back({"age", CovariateKind::Continuous, {}, ""});
  return s;
}

} // namespace

TEST_CASE("individual reader: small file") {
  TempFile f("small.csv", "contacts,age\n1,23\n2,23\n1,40\n");
  const Dataset ds =
      read_individual_csv(f.path.string(), "contacts", age_schema());
  REQUIRE(ds.units.size() == 3);
  CHECK(ds.units[0].count == 1);
  CHECK(ds.units[1].count == 2);
  CHECK(std::get<double>(ds.units[2].values[0]) == 40.0);
}

TEST_CASE("individual reader: bundled heroin fixture margins") {
  const Dataset ds = testsupport::heroin_dataset();
  REQUIRE(ds.units.size() == 268);
  const FrequencyTable t = ds.frequency_table();
  CHECK(t[1] == 116);
  CHECK(t[2] == 44);
  CHECK(t[3] == 32);
  CHECK(t[4] == 76);
}

TEST_CASE("individual reader: bundled methamphetamine fixture margins") {
  const Dataset ds = testsupport::meth_dataset();
  REQUIRE(ds.units.size() == 274);
  const FrequencyTable t = ds.frequency_table();
  CHECK(t[1] == 261);
  CHECK(t[2] == 10);
  CHECK(t[3] == 2);
  CHECK(t[4] == 1);
}

TEST_CASE("individual reader: row-level validation") {
  SUBCASE("zero count names the line") {
    TempFile f("zero.csv", "contacts,age\n1,23\n0,25\n");
    try {
      read_individual_csv(f.path.string(), "contacts", age_schema());
      FAIL("expected ValidationError");
    } catch (const ValidationError &e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("missing column") {
    TempFile f("nocol.csv", "contacts,height\n1,23\n");
    CHECK_THROWS_WITH_AS(
        read_individual_csv(f.path.string(), "contacts", age_schema()),
        doctest::Contains("age"), ValidationError);
  }
  SUBCASE("non-integer count") {
    TempFile f("frac.csv", "contacts,age\n1.5,23\n");
    CHECK_THROWS_AS(
        read_individual_csv(f.path.string(), "contacts", age_schema()),
        ValidationError);
  }
  SUBCASE("blank cell") {
    TempFile f("blank.csv", "contacts,age\n1,\n");
    CHECK_THROWS_AS(
        read_individual_csv(f.path.string(), "contacts", age_schema()),
        ValidationError);
  }
  SUBCASE("unknown categorical level") {
    Schema s;
    s.covariates.push_back({"gender",
                            CovariateKind::Categorical,
                            {"female", "male"},
                            "female"});
    TempFile f("badlevel.csv", "contacts,gender\n1,male\n2,unknown\n");
    try {
      read_individual_csv(f.path.string(), "contacts", s);
      FAIL("expected ValidationError");
    } catch (const ValidationError &e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("unknown") != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(
        read_individual_csv("/nonexistent/nope.csv", "contacts",
                            age_schema()),
        ValidationError);
  }
}

TEST_CASE("frequency reader") {
  SUBCASE("bundled bangkok fixture") {
    const FrequencyTable t =
        read_frequency_csv(testsupport::data_path("table1.csv"));
    CHECK(t.n() == 3346);
    CHECK(t.total() == 3775);
    CHECK(t[1] == 3114);
    CHECK(t[12] == 1);
  }
  SUBCASE("single row") {
    TempFile f("one.csv", "count,freq\n1,10\n");
    CHECK(read_frequency_csv(f.path.string()).n() == 10);
  }
  SUBCASE("row order does not matter") {
    TempFile a("order_a.csv", "count,freq\n1,5\n2,3\n7,1\n");
    TempFile b("order_b.csv", "count,freq\n7,1\n1,5\n2,3\n");
    const FrequencyTable ta = read_frequency_csv(a.path.string());
    const FrequencyTable tb = read_frequency_csv(b.path.string());
    CHECK(ta.freq() == tb.freq());
  }
  SUBCASE("duplicate count value") {
    TempFile f("dup.csv", "count,freq\n1,5\n1,3\n");
    CHECK_THROWS_WITH_AS(read_frequency_csv(f.path.string()),
                         doctest::Contains("duplicate"), ValidationError);
  }
  SUBCASE("zero count present") {
    TempFile f("zero.csv", "count,freq\n0,12\n1,5\n");
    CHECK_THROWS_AS(read_frequency_csv(f.path.string()), ValidationError);
  }
  SUBCASE("wrong header") {
    TempFile f("hdr.csv", "y,f\n1,5\n");
    CHECK_THROWS_AS(read_frequency_csv(f.path.string()), ValidationError);
  }
  SUBCASE("negative frequency") {
    TempFile f("neg.csv", "count,freq\n1,-2\n");
    CHECK_THROWS_AS(read_frequency_csv(f.path.string()), ValidationError);
  }
}

TEST_CASE("round trips") {
  SUBCASE("frequency file") {
    const FrequencyTable t =
        read_frequency_csv(testsupport::data_path("table1.csv"));
    TempFile out("rt_freq.csv", "");
    write_frequency_csv(t, out.path.string());
    const FrequencyTable again = read_frequency_csv(out.path.string());
    CHECK(again.freq() == t.freq());

    // byte-identical once rows are in table order
    std::ifstream a(testsupport::data_path("table1.csv")),
        b(out.path.string());
    std::string sa((std::istreambuf_iterator<char>(a)),
                   std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)),
                   std::istreambuf_iterator<char>());
    CHECK(sa == sb);
  }
  SUBCASE("individual file") {
    const Dataset ds = testsupport::heroin_dataset();
    TempFile out("rt_ind.csv", "");
    write_individual_csv(ds, out.path.string(), "contacts");
    const Dataset again =
        read_individual_csv(out.path.string(), "contacts", ds.schema);
    REQUIRE(again.units.size() == ds.units.size());
    for (std::size_t i = 0; i < ds.units.size(); ++i) {
      CHECK(again.units[i].count == ds.units[i].count);
      CHECK(std::get<double>(again.units[i].values[0]) ==
            std::get<double>(ds.units[i].values[0]));
    }

    std::ifstream a(testsupport::data_path("table3.csv")),
        b(out.path.string());
    std::string sa((std::istreambuf_iterator<char>(a)),
                   std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)),
                   std::istreambuf_iterator<char>());
    CHECK(sa == sb);
  }
}

TEST_CASE("design matrix construction") {
  SUBCASE("intercept plus continuous age") {
    const Dataset ds = testsupport::heroin_dataset();
    const DesignMatrix dm = build_design(ds, {true, {"age"}});
    REQUIRE(dm.rows() == 268);
    REQUIRE(dm.cols() == 2);
    CHECK(dm.column_names[0] == "intercept");
    CHECK(dm.column_names[1] == "age");
    for (std::size_t i = 0; i < dm.rows(); ++i) {
      CHECK(dm.values(i, 0) == 1.0);
      CHECK(dm.values(i, 1) ==
            std::get<double>(ds.units[i].values[0]));
    }
  }
  SUBCASE("intercept only") {
    const Dataset ds = testsupport::heroin_dataset();
    const DesignMatrix dm = build_design(ds, {true, {}});
    REQUIRE(dm.cols() == 1);
    CHECK(dm.column_names[0] == "intercept");
  }
  SUBCASE("categorical dummies with a declared reference") {
    Schema s;
    s.covariates.push_back({"nation",
                            CovariateKind::Categorical,
                            {"Turkey", "North Africa", "Rest Africa",
                             "Surinam", "Asia", "America and Australia"},
                            "America and Australia"});
    Dataset ds;
    ds.schema = s;
    for (const char *level :
         {"Turkey", "Asia", "America and Australia", "North Africa"}) {
      ObservedUnit u;
      u.count = 1;
      u.values.emplace_back(std::string(level));
      ds.units.push_back(u);
    }
    const DesignMatrix dm = build_design(ds, {true, {"nation"}});
    REQUIRE(dm.cols() == 6);
    CHECK(dm.column_names[1] == "nation=Turkey");
    CHECK(dm.column_names[5] == "nation=Asia");
    CHECK(dm.values(0, 1) == 1.0);   // Turkey row
    CHECK(dm.values(2, 1) == 0.0);   // reference row: all dummies zero
    CHECK(dm.values(2, 2) == 0.0);
    CHECK(dm.values(2, 3) == 0.0);
    CHECK(dm.values(2, 4) == 0.0);
    CHECK(dm.values(2, 5) == 0.0);
    CHECK(dm.values(3, 2) == 1.0);   // North Africa dummy
  }
  SUBCASE("deterministic column order follows the schema") {
    Schema s;
    s.covariates.push_back({"a", CovariateKind::Continuous, {}, ""});
    s.covariates.push_back({"b", CovariateKind::Continuous, {}, ""});
    Dataset ds;
    ds.schema = s;
    ObservedUnit u;
    u.count = 1;
    u.values.emplace_back(1.5);
    u.values.emplace_back(2.5);
    ds.units.push_back(u);
    const DesignMatrix d1 = build_design(ds, {true, {"b", "a"}});
    const DesignMatrix d2 = build_design(ds, {true, {"a", "b"}});
    CHECK(d1.column_names == d2.column_names);
    CHECK(d1.values.data() == d2.values.data());
  }
  SUBCASE("bad specs") {
    const Dataset ds = testsupport::heroin_dataset();
    CHECK_THROWS_AS(build_design(ds, {true, {"height"}}), UsageError);
    CHECK_THROWS_AS(build_design(ds, {true, {"age", "age"}}), UsageError);
  }
}

TEST_CASE("dataset from bare counts") {
  const Dataset ds = dataset_from_counts({1, 2, 2, 5});
  CHECK(ds.units.size() == 4);
  CHECK(ds.schema.covariates.empty());
  const FrequencyTable t = ds.frequency_table();
  CHECK(t[2] == 2);
  CHECK_THROWS_AS(dataset_from_counts({1, 0}), ValidationError);
}
