#include <doctest.h>

#include <filesystem>

#include "fracsum/config.hpp"
#include "fracsum/errors.hpp"
#include "fracsum/experiments.hpp"
#include "fracsum/plot_data.hpp"
#include "fracsum/text_format.hpp"

using namespace fracsum;
namespace fs = std::filesystem;

TEST_CASE("config round trip and overrides")
{
    for (auto kind : all_experiments())
    {
        auto c = ExperimentConfig::defaults(kind);
        c.seed = 77;
        auto const back = parse_config(format_config(c));
        CHECK(format_config(back) == format_config(c));
        CHECK(back.experiment == kind);
    }
    auto c = parse_config("version=1\n# comment\nexperiment=main_band\nseed=5\nm=1..2 # inline\n");
    CHECK(c.seed == 5);
    CHECK(c.get_ints("m") == std::vector<int>{1, 2});
    CHECK_THROWS_AS(parse_config("experiment=main_band\n"), ParseError);
    CHECK_THROWS_AS(parse_config("version=2\nexperiment=main_band\n"), ParseError);
    CHECK_THROWS_AS(parse_config("version=1\nseed=3\n"), ParseError);
    CHECK_THROWS_AS(parse_config("version=1\nexperiment=main_band\nbogus=1\n"), ParseError);
    CHECK_THROWS_AS(parse_experiment_kind("nope"), ParseError);
}

TEST_CASE("list parsing")
{
    CHECK(parse_int_list("1..3,7") == std::vector<int>{1, 2, 3, 7});
    CHECK(parse_double_list("0.5, 1") == std::vector<double>{0.5, 1});
    CHECK_THROWS_AS(parse_int_list("3..1"), ParseError);
    CHECK(parse_point("1,-2", 2) == LatticePoint{1, -2});
    CHECK(parse_point_list("0;4", 1).size() == 2);
    CHECK(format_point_list(parse_point_list("1,2;3,4", 2)) == "1,2;3,4");
    CHECK_THROWS_AS(parse_point("1", 2), ParseError);
    CHECK(parse_bool("yes"));
    CHECK_THROWS_AS(parse_bool("maybe"), ParseError);
}

TEST_CASE("small experiments run, assert and are reproducible")
{
    auto c = ExperimentConfig::defaults(ExperimentKind::main_band);
    c.trials = 2000;
    c.set("m", "1..2");
    c.set("n_max", "3");
    c.set("slope_n", "3");
    c.set("slope_tolerance", "10");
    auto const a = run_experiment(c);
    auto const b = run_experiment(c);
    CHECK(a.csv == b.csv);
    CHECK(a.exit_code() == (a.passed() ? 0 : 2));
    CHECK(parse_csv(a.csv).rows.size() > 3);

    auto pz = ExperimentConfig::defaults(ExperimentKind::pz_diag);
    auto const r = run_experiment(pz);
    CHECK(r.passed());
    CHECK(r.metrics.at("certified") == r.metrics.at("checks"));

    // An impossible band limit forces exit code 2.
    auto strict = ExperimentConfig::defaults(ExperimentKind::fp_cap_ratio);
    strict.set("dims", "1");
    strict.set("levels", "4..5");
    strict.band_limit = 1.0000001;
    auto const failed = run_experiment(strict);
    CHECK(failed.exit_code() == 2);
    strict.explore = true;
    CHECK(run_experiment(strict).exit_code() == 0);
}

TEST_CASE("tiny fixtures cover the product grid")
{
    auto const c = ExperimentConfig::defaults(ExperimentKind::pz_diag);
    CHECK(tiny_fixtures(c).size() == 2 * 3 * 4);
    CHECK(main_band_family("cube", 1).size() == 4);
    CHECK_THROWS(main_band_family("bogus", 1));
}

TEST_CASE("plot data files")
{
    fs::path const dir = fs::temp_directory_path() / "fracsum_plot_test";
    fs::remove_all(dir);
    std::string const csv = "m,v,lo,hi,family\n1,0.5,0.4,0.6,a\n2,0.25,0.2,0.3,a\n1,1,1,1,b\n";
    PlotSpec const spec{"t", "m", "v", "lo", "hi", {"family"}, false};
    auto const files = emit_plot_data(csv, spec, dir);
    REQUIRE(files.size() == 2);
    CHECK(read_text_file(files[0]) == "# m v yerr\n1 0.5 0.09999999999999998\n2 0.25 0.04999999999999999\n");
    PlotSpec const log_spec{"l", "m", "v", std::nullopt, std::nullopt, {}, true};
    auto const logs = emit_plot_data(csv, log_spec, dir);
    CHECK(read_text_file(logs[0]) == "# m log2(v)\n1 -1\n2 -2\n1 0\n");
    auto const empty = emit_plot_data("m,v\n", PlotSpec{"e", "m", "v", {}, {}, {}, false}, dir);
    CHECK(read_text_file(empty[0]) == "# m v\n");
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ParseError);
    fs::remove_all(dir);
}

TEST_CASE("golden verification detects drift")
{
    fs::path const dir = fs::temp_directory_path() / "fracsum_verify_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto c = ExperimentConfig::defaults(ExperimentKind::pz_diag);
    c.set("pq", "0.6:0.7");
    c.set("levels", "1:1");
    write_text_file(dir / "pz.cfg", format_config(c));
    write_text_file(dir / "pz.csv", run_experiment(c).csv);
    CHECK(verify_golden(dir).passed());
    write_text_file(dir / "pz.csv", "tampered\n");
    auto const bad = verify_golden(dir);
    CHECK_FALSE(bad.passed());
    CHECK(bad.mismatched.size() == 1);
    fs::remove_all(dir);
}
