#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "weakiv/estimators.hpp"
#include "weakiv/ingestion.hpp"

namespace {

weakiv::ColumnSpec wage_spec() {
  weakiv::ColumnSpec spec;
  spec.outcome = "lwage";
  spec.endogenous = {"educ"};
  spec.instrument_categoricals = {"qob"};
  return spec;
}

const char* kToyCsv =
    "lwage,educ,qob,junk\n"
    "5.1,12,1,a\n"
    "5.9,13,2,b\n"
    "6.3,14,3,c\n"
    "5.4,12,4,d\n"
    "6.0,13,1,e\n"
    "6.5,15,2,f\n"
    "5.2,12,3,g\n"
    "6.1,14,4,h\n";

weakiv::RawTable toy_table() {
  std::istringstream in(kToyCsv);
  return weakiv::read_csv(in, wage_spec());
}

}  // namespace

TEST_SUITE_BEGIN("ingestion");

TEST_CASE("read_csv pulls only the declared columns") {
  const weakiv::RawTable t = toy_table();
  CHECK(t.n_rows == 8);
  REQUIRE(t.numeric.count("lwage") == 1);
  REQUIRE(t.numeric.count("educ") == 1);
  CHECK(t.numeric.count("junk") == 0);
  REQUIRE(t.categorical.count("qob") == 1);
  CHECK(t.numeric.at("lwage")[0] == 5.1);
  CHECK(t.numeric.at("educ")[5] == 15.0);
  CHECK(t.categorical.at("qob")[2] == "3");
}

TEST_CASE("quoted cells carry commas, doubled quotes, and spacing") {
  weakiv::ColumnSpec spec;
  spec.outcome = "y";
  spec.endogenous = {"x"};
  spec.instrument_categoricals = {"g"};
  std::istringstream in(
      "y, x ,g\n"
      "1.0, 2.5 ,\"left,right\"\n"
      "2.0,3.5,\"say \"\"hi\"\"\"\n"
      "3.0,4.5,plain\n");
  const weakiv::RawTable t = weakiv::read_csv(in, spec);
  CHECK(t.n_rows == 3);
  CHECK(t.numeric.at("x")[0] == 2.5);
  CHECK(t.categorical.at("g")[0] == "left,right");
  CHECK(t.categorical.at("g")[1] == "say \"hi\"");
  CHECK(t.categorical.at("g")[2] == "plain");
}

TEST_CASE("CRLF line endings and blank lines are tolerated") {
  std::istringstream in(
      "lwage,educ,qob,junk\r\n"
      "5.1,12,1,a\r\n"
      "\r\n"
      "5.9,13,2,b\r\n"
      "\n"
      "6.3,14,1,c\r\n");
  const weakiv::RawTable t = weakiv::read_csv(in, wage_spec());
  CHECK(t.n_rows == 3);
  CHECK(t.categorical.at("qob")[1] == "2");
}

TEST_CASE("missing declared column fails the schema check") {
  std::istringstream in("lwage,educ,junk\n5.1,12,a\n");
  CHECK_THROWS_AS(weakiv::read_csv(in, wage_spec()),
                  weakiv::SchemaMismatch);
}

TEST_CASE("duplicated header for a declared column is rejected") {
  std::istringstream in("lwage,educ,qob,educ\n5.1,12,1,12\n");
  CHECK_THROWS_AS(weakiv::read_csv(in, wage_spec()),
                  weakiv::SchemaMismatch);
}

TEST_CASE("role collisions in the column spec are rejected") {
  weakiv::ColumnSpec spec = wage_spec();
  spec.control_categoricals = {"educ"};  // already endogenous
  std::istringstream in(kToyCsv);
  CHECK_THROWS_AS(weakiv::read_csv(in, spec), weakiv::SchemaMismatch);

  weakiv::ColumnSpec empty_outcome;
  empty_outcome.endogenous = {"educ"};
  std::istringstream in2(kToyCsv);
  CHECK_THROWS_AS(weakiv::read_csv(in2, empty_outcome),
                  weakiv::SchemaMismatch);
}

TEST_CASE("non-numeric cell reports its row and column") {
  std::istringstream in(
      "lwage,educ,qob,junk\n"
      "5.1,12,1,a\n"
      "5.9,13,2,b\n"
      "oops,14,3,c\n"
      "5.4,12,4,d\n");
  try {
    weakiv::read_csv(in, wage_spec());
    FAIL("expected ParseError");
  } catch (const weakiv::ParseError& e) {
    CHECK(e.row() == 3);
    CHECK(e.column() == "lwage");
    CHECK(std::string(e.what()).find("oops") != std::string::npos);
  }
}

TEST_CASE("ragged rows and empty categorical cells are parse errors") {
  std::istringstream ragged(
      "lwage,educ,qob,junk\n"
      "5.1,12,1\n");
  CHECK_THROWS_AS(weakiv::read_csv(ragged, wage_spec()), weakiv::ParseError);

  std::istringstream hole(
      "lwage,educ,qob,junk\n"
      "5.1,12,,a\n");
  CHECK_THROWS_AS(weakiv::read_csv(hole, wage_spec()), weakiv::ParseError);
}

TEST_CASE("infinite numerics are rejected") {
  std::istringstream in(
      "lwage,educ,qob,junk\n"
      "inf,12,1,a\n");
  CHECK_THROWS_AS(weakiv::read_csv(in, wage_spec()), weakiv::ParseError);
}

TEST_CASE("missing file throws FileNotFound") {
  CHECK_THROWS_AS(
      weakiv::read_csv(std::string("/nonexistent/nope.csv"), wage_spec()),
      weakiv::FileNotFound);
}

TEST_CASE("build_design lays out dummies with sorted-first reference") {
  const weakiv::BuiltDesign d = weakiv::build_design(toy_table(), wage_spec());
  const auto& ds = d.dataset;
  // x = [const, educ]; z = [const, qob=2, qob=3, qob=4].
  CHECK(ds.n_regressors() == 2);
  CHECK(ds.n_instruments() == 4);
  CHECK(ds.n_exog() == 1);
  CHECK(d.coef_index == 1);
  CHECK(d.n_excluded == 3);
  CHECK(ds.x_names()[0] == "const");
  CHECK(ds.x_names()[1] == "educ");
  CHECK(ds.z_names()[1] == "qob=2");
  CHECK(ds.z_names()[3] == "qob=4");
  REQUIRE(d.reference_levels.count("qob") == 1);
  CHECK(d.reference_levels.at("qob") == "1");

  // Row 0 has qob=1: all dummies zero. Row 1 has qob=2.
  CHECK(ds.z()(0, 1) == 0.0);
  CHECK(ds.z()(0, 2) == 0.0);
  CHECK(ds.z()(0, 3) == 0.0);
  CHECK(ds.z()(1, 1) == 1.0);
  CHECK(ds.z()(1, 2) == 0.0);
}

TEST_CASE("control categoricals enter both x and z") {
  weakiv::ColumnSpec spec;
  spec.outcome = "y";
  spec.endogenous = {"w"};
  spec.control_categoricals = {"g"};
  spec.instrument_categoricals = {"q"};
  std::istringstream in(
      "y,w,g,q\n"
      "1,0.5,a,1\n"
      "2,1.5,b,2\n"
      "3,0.7,a,2\n"
      "4,1.1,b,1\n"
      "5,0.9,a,1\n"
      "6,1.3,b,2\n"
      "7,1.0,a,2\n"
      "8,0.8,b,1\n");
  const auto t = weakiv::read_csv(in, spec);
  const auto d = weakiv::build_design(t, spec);
  // x = [const, g=b, w]; z = [const, g=b, q=2].
  CHECK(d.dataset.n_regressors() == 3);
  CHECK(d.dataset.n_exog() == 2);
  CHECK(d.dataset.x_names()[1] == "g=b");
  CHECK(d.dataset.x_names()[2] == "w");
  CHECK(d.coef_index == 2);
  CHECK(d.dataset.z_names()[2] == "q=2");
  CHECK(d.reference_levels.at("g") == "a");
}

TEST_CASE("interaction blocks cross retained dummies with every level") {
  using weakiv::MiniCensusOptions;
  MiniCensusOptions opt;
  opt.n = 600;
  opt.with_state = true;
  opt.n_states = 10;
  const auto t = weakiv::mini_census_table(opt);
  const auto spec = weakiv::mini_census_spec(true);
  const auto d = weakiv::build_design(t, spec);

  // qob has 4 levels -> 3 retained; state has 10 levels, all crossed.
  CHECK(d.n_excluded == 30);
  // z = [const | yob dummies | 30 interactions]; yob spans 10 cohorts.
  CHECK(d.dataset.n_instruments() == d.dataset.n_exog() + 30);
  const auto& zn = d.dataset.z_names();
  CHECK(zn[static_cast<std::size_t>(d.dataset.n_exog())] ==
        "qob=2*state=s01");
  CHECK(zn.back() == "qob=4*state=s10");
}

TEST_CASE("single-level categoricals are rejected") {
  weakiv::ColumnSpec spec = wage_spec();
  std::istringstream in(
      "lwage,educ,qob,junk\n"
      "5.1,12,1,a\n"
      "5.9,13,1,b\n"
      "6.3,14,1,c\n");
  const auto t = weakiv::read_csv(in, spec);
  CHECK_THROWS_AS(weakiv::build_design(t, spec),
                  weakiv::SingleLevelCategorical);
}

TEST_CASE("empty tables are rejected") {
  std::istringstream in("lwage,educ,qob,junk\n");
  const auto t = weakiv::read_csv(in, wage_spec());
  CHECK(t.n_rows == 0);
  CHECK_THROWS_AS(weakiv::build_design(t, wage_spec()),
                  weakiv::EmptyAfterFiltering);
}

TEST_CASE("no instrument blocks means self-instrumented least squares") {
  weakiv::ColumnSpec spec;
  spec.outcome = "lwage";
  spec.endogenous = {"educ"};
  std::istringstream in(kToyCsv);
  const auto t = weakiv::read_csv(in, spec);
  const auto d = weakiv::build_design(t, spec);
  CHECK(d.n_excluded == 0);
  CHECK(d.dataset.n_instruments() == d.dataset.n_regressors());
  CHECK((d.dataset.z() - d.dataset.x()).norm() == 0.0);

  const auto rep = weakiv::run_specification(
      d, {weakiv::Estimator::Ols, weakiv::Estimator::Tsls});
  REQUIRE(rep.lines.size() == 2);
  CHECK(rep.lines[0].estimate ==
        doctest::Approx(rep.lines[1].estimate).epsilon(1e-10));
  CHECK(rep.lines[0].std_error ==
        doctest::Approx(rep.lines[1].std_error).epsilon(1e-10));
  CHECK_FALSE(rep.first_stage.has_value());
  CHECK(rep.term == "educ");
  CHECK(rep.n_obs == 8);
}

TEST_CASE("endogenous coefficient ignores the reference-level choice") {
  // Relabeling the levels reorders the sort and so moves the dropped dummy;
  // the slope on the endogenous column must not move.
  const weakiv::ColumnSpec spec = wage_spec();
  weakiv::RawTable t = toy_table();
  const auto d1 = weakiv::build_design(t, spec);
  const auto r1 = weakiv::run_specification(d1, {weakiv::Estimator::Tsls});

  weakiv::RawTable relabeled = t;
  for (auto& v : relabeled.categorical.at("qob")) {
    if (v == "1") v = "z_was_1";  // sorts last; "2" becomes the reference
  }
  const auto d2 = weakiv::build_design(relabeled, spec);
  const auto r2 = weakiv::run_specification(d2, {weakiv::Estimator::Tsls});
  CHECK(d2.reference_levels.at("qob") == "2");
  CHECK(r1.lines[0].estimate ==
        doctest::Approx(r2.lines[0].estimate).epsilon(1e-8));
  CHECK(r1.lines[0].std_error ==
        doctest::Approx(r2.lines[0].std_error).epsilon(1e-8));
}

TEST_CASE("run_specification reports the first stage when identified") {
  const auto d = weakiv::build_design(toy_table(), wage_spec());
  const auto rep = weakiv::run_specification(
      d, {weakiv::Estimator::Ols, weakiv::Estimator::Tsls});
  REQUIRE(rep.first_stage.has_value());
  CHECK(rep.first_stage->k_excluded == 3);
  CHECK(rep.n_excluded == 3);
}

TEST_CASE("mini census text is deterministic and parses to itself") {
  weakiv::MiniCensusOptions opt;
  opt.n = 120;
  const std::string a = weakiv::mini_census_csv(opt);
  const std::string b = weakiv::mini_census_csv(opt);
  CHECK(a == b);
  opt.seed = 8;
  CHECK(weakiv::mini_census_csv(opt) != a);

  const auto t = weakiv::mini_census_table(opt);
  CHECK(t.n_rows == 120);
  CHECK(t.numeric.at("educ").size() == 120);
  CHECK(t.categorical.at("qob").size() == 120);
}

TEST_CASE("mini census options are validated") {
  weakiv::MiniCensusOptions opt;
  opt.n = 10;
  CHECK_THROWS_AS(weakiv::mini_census_csv(opt), weakiv::Error);
  opt.n = 100;
  opt.with_state = true;
  opt.n_states = 1;
  CHECK_THROWS_AS(weakiv::mini_census_csv(opt), weakiv::Error);
}

TEST_CASE("pipeline recovers the planted return from the mini census") {
  weakiv::MiniCensusOptions opt;  // n = 2000, seed 7, return 0.08
  const auto t = weakiv::mini_census_table(opt);
  const auto spec = weakiv::mini_census_spec(false);
  const auto design = weakiv::build_design(t, spec);
  const auto rep = weakiv::run_specification(
      design, {weakiv::Estimator::Ols, weakiv::Estimator::Tsls,
               weakiv::Estimator::Liml});

  REQUIRE(rep.lines.size() == 3);
  for (const auto& line : rep.lines) {
    CHECK(std::abs(line.estimate - opt.true_return) <=
          3.0 * line.std_error);
  }

  REQUIRE(rep.first_stage.has_value());
  CHECK(rep.first_stage->k_excluded == 3);
  CHECK(rep.first_stage->f_stat > 0.0);
}

TEST_CASE("ability channel surfaces as upward least-squares drift at scale") {
  // The planted confounder is mild, so the bias only separates cleanly
  // from sampling noise in a large draw: here roughly six standard errors
  // for least squares, while the instrumented estimate stays centered.
  weakiv::MiniCensusOptions opt;
  opt.n = 60000;
  const auto t = weakiv::mini_census_table(opt);
  const auto design = weakiv::build_design(t, weakiv::mini_census_spec(false));
  const auto rep = weakiv::run_specification(
      design, {weakiv::Estimator::Ols, weakiv::Estimator::Tsls});

  REQUIRE(rep.lines.size() == 2);
  const auto& ols = rep.lines[0];
  const auto& tsls = rep.lines[1];
  CHECK(ols.estimate > opt.true_return + 2.0 * ols.std_error);
  CHECK(std::abs(tsls.estimate - opt.true_return) <= 3.0 * tsls.std_error);
}

TEST_SUITE_END();
