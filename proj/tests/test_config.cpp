#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "blowup/config.hpp"
#include "blowup/runio.hpp"

using namespace blowup;
namespace fs = std::filesystem;

TEST_CASE("round trip is bit exact and hash is stable") {
    config::ExperimentConfig c;
    c.eps = 0.637;
    c.solver.dr = 0.0173;
    c.metric_eps_g = 1.0 / 3.0;
    const std::string s1 = c.to_json_string();
    const auto c2 = config::ExperimentConfig::from_json_string(s1);
    CHECK(c2.to_json_string() == s1);
    CHECK(c2.hash() == c.hash());

    auto c3 = c;
    c3.eps = 0.638;
    CHECK(c3.hash() != c.hash());
}

TEST_CASE("critical markers resolve") {
    config::ExperimentConfig c;
    CHECK(c.resolved_p() == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));
    CHECK(c.resolved_q() ==
          doctest::Approx(1.0 - 1.0 / (1.0 + std::sqrt(2.0))).epsilon(1e-14));
    CHECK(c.resolved_lambda0() == doctest::Approx(0.25));

    const auto parsed = config::ExperimentConfig::from_json_string(
        R"({"n": 2, "p": "critical", "testfn": {"q": "critical"}})");
    CHECK(parsed.resolved_p() == doctest::Approx(0.5 * (3.0 + std::sqrt(17.0))));
    CHECK(parsed.resolved_q() ==
          doctest::Approx(0.5 - 1.0 / parsed.resolved_p()).epsilon(1e-14));
}

TEST_CASE("validation failures raise ConfigError") {
    using config::ConfigError;
    using config::ExperimentConfig;
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_string(
                        R"({"metric": {"kind": "exp", "eps_g": 1.5}})"),
                    ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_string(R"({"solver": {"cfl": 0.95}})"),
                    ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_string(R"({"p": 0.5})"), ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_string(R"({"p": "positive"})"),
                    ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_string("not json"), ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_json_string(R"({"metric": {"kind": "odd"}})"),
                    ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::from_file("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("run records persist and reload losslessly") {
    config::ExperimentConfig c;
    c.eps = 0.4;
    c.solver.t_max = 3.0;
    c.solver.dr = 0.05;
    c.output_dir = (fs::temp_directory_path() / "blowuplab_test_runs").string();

    auto rec = wave::run_until_blowup(c.make_data(), c.make_metric(), c.resolved_p(), c.solver);
    const fs::path dir = runio::write_run(c, rec);
    CHECK(runio::run_exists(dir));

    const auto back = runio::load_run(dir);
    REQUIRE(back.series.size() == rec.series.size());
    REQUIRE(back.snapshots.size() == rec.snapshots.size());
    for (std::size_t k = 0; k < rec.series.size(); ++k) {
        CHECK(back.series[k].t == rec.series[k].t);
        CHECK(back.series[k].max_u == rec.series[k].max_u);
        CHECK(back.series[k].lp_integral == rec.series[k].lp_integral);
    }
    CHECK(back.snapshots.back().u == rec.snapshots.back().u);
    CHECK(back.p == rec.p);
    CHECK(back.metric.eps_g == rec.metric.eps_g);

    // determinism: writing again yields bit-identical files
    std::ifstream f1(dir / "record.json", std::ios::binary);
    std::string before((std::istreambuf_iterator<char>(f1)), {});
    runio::write_run(c, rec);
    std::ifstream f2(dir / "record.json", std::ios::binary);
    std::string after((std::istreambuf_iterator<char>(f2)), {});
    CHECK(before == after);

    const std::string csv = runio::series_csv(rec);
    CHECK(csv.find("t,max_u,l2,lp_integral,f_value,support_excess") == 0);

    fs::remove_all(c.output_dir);
}

TEST_CASE("BLOWUPLAB_OUT overrides the output root") {
    config::ExperimentConfig c;
    c.output_dir = "some/dir";
    CHECK(runio::output_root(c) == fs::path("some/dir"));
    ::setenv("BLOWUPLAB_OUT", "/tmp/blowuplab_env_out", 1);
    CHECK(runio::output_root(c) == fs::path("/tmp/blowuplab_env_out"));
    ::unsetenv("BLOWUPLAB_OUT");
}
