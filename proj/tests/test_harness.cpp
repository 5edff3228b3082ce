#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fdlab/harness.hpp"

using namespace fdlab;

namespace {

const char* tiny_config = R"(# minimal scenario for harness tests
[scenario]
id = tiny
m = 0.5
d = 3
form = without-inverse-m
data = bump
bump_height = 1.0
data_radius = 1.0
domain_radius = 3.0
n_cells = 64
dt_init = 1e-7
dt_max = 1e-3
t_end = 10.0
p = 2.0
checks = flux_lemma, benilan, aleksandrov
)";

}  // namespace

TEST_CASE("config parsing: values, lists, errors with line numbers") {
    auto cfgs = parse_config(tiny_config);
    REQUIRE(cfgs.size() == 1);
    CHECK(cfgs[0].id == "tiny");
    CHECK(cfgs[0].params.m == 0.5);
    CHECK(cfgs[0].params.d == 3);
    CHECK(cfgs[0].checks == std::vector<std::string>{"flux_lemma", "benilan", "aleksandrov"});

    try {
        parse_config("[scenario]\nid = x\nbogus_key = 1\n");
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("m = 0.5\n"), std::runtime_error);  // key outside section
}

TEST_CASE("empty checks list yields an empty bundle") {
    std::string cfg = tiny_config;
    cfg.replace(cfg.find("checks = flux_lemma, benilan, aleksandrov"),
                std::string("checks = flux_lemma, benilan, aleksandrov").size(), "t_end = 1e-4");
    auto bundle = run_scenarios_text(cfg);
    CHECK(bundle.checked == 0);
    CHECK(bundle.scenarios.size() == 1);
    CHECK(bundle.scenarios[0].error.empty());
}

TEST_CASE("bundle accounting and deterministic csv") {
    auto b1 = run_scenarios_text(tiny_config);
    CHECK(b1.checked == b1.held + b1.failed + b1.skipped);
    CHECK(b1.checked > 0);
    CHECK(b1.failed == 0);
    auto b2 = run_scenarios_text(tiny_config);
    CHECK(reports_csv(b1) == reports_csv(b2));  // byte-identical on re-run
}

TEST_CASE("csv round-trips through the parser") {
    auto bundle = run_scenarios_text(tiny_config);
    const std::string csv = reports_csv(bundle);
    auto parsed = parse_reports_csv(csv);
    REQUIRE(parsed.scenarios.size() == bundle.scenarios.size());
    const auto& a = bundle.scenarios[0].reports;
    const auto& b = parsed.scenarios[0].reports;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].variant == b[i].variant);
        CHECK(a[i].lhs == b[i].lhs);  // %.17g preserves doubles exactly
        CHECK(a[i].rhs == b[i].rhs);
        CHECK(a[i].margin == b[i].margin);
        CHECK(a[i].holds == b[i].holds);
        CHECK(a[i].notes == b[i].notes);
    }
    CHECK(reports_csv(parsed) == csv);
}

TEST_CASE("emit writes csv, table and plotdata files") {
    namespace fs = std::filesystem;
    auto bundle = run_scenarios_text(tiny_config);
    const auto dir = fs::temp_directory_path() / "fdlab_emit_test";
    fs::remove_all(dir);
    auto csvs = emit(bundle, "csv", dir.string());
    auto tables = emit(bundle, "table", dir.string());
    auto plots = emit(bundle, "plotdata", dir.string());
    REQUIRE(csvs.size() == 1);
    REQUIRE(tables.size() == 1);
    CHECK(!plots.empty());
    CHECK(fs::exists(csvs[0]));
    std::ifstream is(plots[0]);
    std::string header;
    std::getline(is, header);
    CHECK(header == "# t lhs rhs");
    // a plotdata series carries the same values as the reports
    double t, lhs, rhs;
    REQUIRE((is >> t >> lhs >> rhs));
    bool found = false;
    for (const auto& r : bundle.scenarios[0].reports)
        if (r.t == t && r.lhs == lhs && r.rhs == rhs) found = true;
    CHECK(found);
    CHECK_THROWS_AS(emit(ReportBundle{}, "table", dir.string()), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("FDE_LAB_OUT overrides the output directory") {
    namespace fs = std::filesystem;
    auto bundle = run_scenarios_text(tiny_config);
    const auto dir = fs::temp_directory_path() / "fdlab_env_override";
    fs::remove_all(dir);
    setenv("FDE_LAB_OUT", dir.c_str(), 1);
    auto files = emit(bundle, "csv", "somewhere_else");
    unsetenv("FDE_LAB_OUT");
    REQUIRE(files.size() == 1);
    CHECK(files[0].find(dir.string()) == 0);
    fs::remove_all(dir);
}

TEST_CASE("a failing scenario does not abort the others") {
    std::string cfg = R"(
[scenario]
id = broken
m = 0.5
d = 3
data = custom-table
table_file = /nonexistent/file.csv
checks = benilan

[scenario]
id = fine
m = 0.5
d = 3
data = bump
n_cells = 48
dt_init = 1e-7
dt_max = 1e-3
domain_radius = 3.0
checks = benilan
)";
    auto bundle = run_scenarios_text(cfg);
    REQUIRE(bundle.scenarios.size() == 2);
    CHECK(!bundle.scenarios[0].error.empty());
    CHECK(bundle.scenarios[0].reports.empty());
    CHECK(bundle.scenarios[1].error.empty());
    CHECK(!bundle.scenarios[1].reports.empty());
    CHECK(bundle.skipped >= 1);
}

TEST_CASE("paper suite config parses and provenance hash is stable") {
    auto cfgs = parse_config(paper_suite_config());
    REQUIRE(cfgs.size() == 5);
    CHECK(cfgs[0].id == "good-range");
    CHECK(cfgs[1].id == "subcritical");
    CHECK(cfgs[2].id == "negative-m");
    CHECK(cfgs[3].id == "vss-sample");
    CHECK(cfgs[4].id == "obstruction-base");
    CHECK(detail::fnv1a("abc") == detail::fnv1a("abc"));
    CHECK(detail::fnv1a("abc") != detail::fnv1a("abd"));
}
