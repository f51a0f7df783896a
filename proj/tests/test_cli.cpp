#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rkm/config.hpp"
#include "rkm/error.hpp"
#include "rkm/experiment.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace rkm;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

// Fresh scratch directory per test, removed on destruction.
struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("rkm_test_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(RKM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSyncConfig = R"(# small synchronizing run
N = 6
sigma = 0.05
hurst = 0.45
T = 10
dt = 0.0078125
seed = 3
init.spread = 0.5
scenario = sync
)";

}  // namespace

TEST_CASE("key-value parsing") {
    const auto kv = config::parse_key_values("a = 1\n# comment\n\n  b=two words  # trailing\nc=\n");
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "two words");
    CHECK(kv.at("c").empty());
    CHECK_THROWS_AS(config::parse_key_values("a = 1\na = 2\n"), ParameterError);
    CHECK_THROWS_AS(config::parse_key_values("no separator\n"), ParameterError);
}

TEST_CASE("settings from keys") {
    auto s = config::settings_from_key_values(config::parse_key_values(kSyncConfig));
    CHECK(s.cfg.N() == 6);
    CHECK(s.cfg.K == 1.0);
    CHECK(s.cfg.sigma == 0.05);
    CHECK(s.cfg.steps() == 1280);
    CHECK(s.initKind == config::InitKind::spread);
    CHECK(s.scheme == integrator::Scheme::davie);

    // K defaults to N away from all-to-all coupling.
    auto ring = config::settings_from_key_values(config::parse_key_values("N = 5\ngraph.kind = cycle\n"));
    CHECK(ring.cfg.K == 5.0);
    auto explicitK = config::settings_from_key_values(config::parse_key_values("N = 5\ngraph.kind = cycle\nK=2\n"));
    CHECK(explicitK.cfg.K == 2.0);

    auto pi = config::settings_from_key_values(config::parse_key_values("N = 3\ndelta = pi/8\ninit.interval = -pi/8, pi/8\n"));
    CHECK(pi.cfg.delta == doctest::Approx(std::numbers::pi / 8));
    CHECK(pi.initKind == config::InitKind::interval);
    CHECK(pi.initLo == doctest::Approx(-std::numbers::pi / 8));

    CHECK_THROWS_AS(config::settings_from_key_values(config::parse_key_values("N = 3\nbogus = 1\n")), ParameterError);
    CHECK_THROWS_AS(config::settings_from_key_values(config::parse_key_values("N = 3\nsigma = x\n")), ParameterError);
    CHECK_THROWS_AS(
        config::settings_from_key_values(config::parse_key_values("N = 3\ninit.spread = 1\ninit.list = 0,1,2\n")),
        ParameterError);
}

TEST_CASE("initial phases") {
    auto s = config::settings_from_key_values(config::parse_key_values(kSyncConfig));
    const Eigen::VectorXd a = config::initial_phases(s);
    CHECK(a == config::initial_phases(s));
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 0.5 * std::numbers::pi);
    s.cfg.seed = 4;
    CHECK(a != config::initial_phases(s));

    auto list = config::settings_from_key_values(config::parse_key_values("N = 4\ninit.list = 0, pi, 0, pi\n"));
    const Eigen::VectorXd l = config::initial_phases(list);
    CHECK(l(1) == doctest::Approx(std::numbers::pi));
    CHECK_THROWS_AS(config::settings_from_key_values(config::parse_key_values("N = 4\ninit.list = 0, 1\n")),
                    ParameterError);
}

TEST_CASE("plan expansion") {
    const auto none = config::plan_from_key_values(config::parse_key_values(kSyncConfig));
    CHECK(none.sweeps.empty());
    CHECK(config::expand_plan(none).size() == 1);

    const auto plan = config::plan_from_key_values(
        config::parse_key_values(std::string(kSyncConfig) + "sweep.seed = 1..3\nsweep.sigma = 0.01, 0.02\n"));
    REQUIRE(plan.sweeps.size() == 2);
    CHECK(plan.sweeps[0].first == "seed");
    CHECK(plan.sweeps[1].first == "sigma");
    const auto points = config::expand_plan(plan);
    CHECK(points.size() == 6);
    for (const auto& p : points) {
        CHECK(p.count("sweep.seed") == 0);
        CHECK(p.count("seed") == 1);
    }
    CHECK(points.front().at("seed") == "1");
    CHECK(points.back().at("seed") == "3");

    const auto lists = config::plan_from_key_values(config::parse_key_values("N = 2\nsweep.init.list = 0,1;0,3\n"));
    const auto lp = config::expand_plan(lists);
    REQUIRE(lp.size() == 2);
    CHECK(lp[1].at("init.list") == "0,3");

    CHECK_THROWS_AS(config::plan_from_key_values(config::parse_key_values("N = 2\nsweep.bogus = 1,2\n")),
                    ParameterError);
}

TEST_CASE("run_point writes the sync artifacts") {
    Scratch s("point");
    const auto kv = config::parse_key_values(kSyncConfig);
    const Json rep = experiment::run_point(kv, s.dir / "a", {});
    CHECK(rep.at("scenario") == "sync");
    CHECK(rep.at("success").get<bool>());
    CHECK(rep.at("sync").at("verdicts").at("conserved").get<bool>());
    for (const char* f : {"report.json", "trajectory.csv", "phases.svg"}) CHECK(fs::exists(s.dir / "a" / f));
    CHECK(read_json(s.dir / "a" / "report.json") == rep);

    experiment::RunOptions json;
    json.format = experiment::TrajectoryFormat::json;
    experiment::run_point(kv, s.dir / "b", json);
    const Json traj = read_json(s.dir / "b" / "trajectory.json");
    CHECK(traj.at("t").size() == 1281);
    CHECK(traj.at("theta").size() == 1281);
    CHECK(traj.at("theta")[0].size() == 6);
    CHECK_THROWS_AS(experiment::format_from_string("xml"), ParameterError);
}

TEST_CASE("scenarios of the runner") {
    Scratch s("scenarios");
    auto kv = config::parse_key_values(kSyncConfig);

    kv["scenario"] = "hyperplane";
    const Json hp = experiment::run_point(kv, s.dir / "hp", {});
    CHECK(hp.at("success").get<bool>());
    CHECK(hp.at("sync").at("conservationResidual").get<double>() < 1e-8);
    CHECK(fs::exists(s.dir / "hp" / "hyperplane.svg"));

    auto split = kv;
    split["scenario"] = "splitting";
    split["graph.kind"] = "twoCommunity";
    split["N"] = "8";
    split["T"] = "8";
    const Json sp = experiment::run_point(split, s.dir / "sp", {});
    CHECK(sp.at("success").get<bool>());
    CHECK(sp.at("equivarianceError").get<double>() <= 1e-9);

    auto freq = kv;
    freq["scenario"] = "frequencies";
    freq["N"] = "4";
    freq["T"] = "10";
    freq["freqs.uniform"] = "-0.5, 0.5";
    freq.erase("init.spread");
    freq["init.interval"] = "-pi/8, pi/8";
    const Json fr = experiment::run_point(freq, s.dir / "fr", {});
    CHECK(fr.contains("frequency"));
    CHECK(fs::exists(s.dir / "fr" / "frequencies.svg"));
    CHECK(slurp(s.dir / "fr" / "trajectory.csv").find("varpi_3") != std::string::npos);

    const Json gi = experiment::run_point(config::parse_key_values("scenario = graphInfo\nN = 5\ngraph.kind = cycle\n"),
                                          s.dir / "gi", {});
    CHECK(gi.at("graph").at("spectrum").at("fiedler").get<double>() == doctest::Approx(2.0 - 2.0 * std::cos(2 * std::numbers::pi / 5)));

    auto bad = kv;
    bad["scenario"] = "nope";
    CHECK_THROWS_AS(experiment::run_point(bad, s.dir / "bad", {}), ParameterError);
}

TEST_CASE("seed sweep summary") {
    Scratch s("summary");
    auto kv = config::parse_key_values(kSyncConfig);
    kv["sigma"] = "0";
    kv["sweep.seed"] = "1..4";
    kv["init.list"] = "0.1, 0.2, 0.3, 0.4, 0.5, 0.6";
    kv.erase("init.spread");
    experiment::RunOptions o;
    o.jobs = 2;
    const auto result = experiment::run_plan(config::plan_from_key_values(kv), s.dir, o);
    CHECK(result.allOk);
    REQUIRE(result.runs.size() == 4);
    const Json& sum = result.summary;
    CHECK(sum.at("runs") == 4);
    CHECK(sum.at("succeeded") == 4);
    CHECK(sum.at("successFraction").get<double>() == 1.0);
    // Deterministic runs do not depend on the seed.
    CHECK(sum.at("fittedRate").at("iqr").get<double>() == 0.0);
    CHECK(slurp(s.dir / "run_0000" / "trajectory.csv") == slurp(s.dir / "run_0003" / "trajectory.csv"));

    const Json index = read_json(s.dir / "index.json");
    CHECK(index.at("runs").size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(index.at("runs")[i].at("index") == i);
        CHECK(index.at("runs")[i].at("status") == "ok");
    }

    const Json empty = experiment::seed_sweep_summary({});
    CHECK(empty.at("runs") == 0);
    CHECK(empty.at("successFraction").get<double>() == 0.0);
    CHECK(empty.at("fittedRate").at("median").is_null());
}

TEST_CASE("strong noise breaks synchronization in a sweep") {
    Scratch s("loud");
    auto kv = config::parse_key_values(kSyncConfig);
    kv["sigma"] = "2";
    kv["init.spread"] = "2";
    kv["sweep.seed"] = "1..4";
    const auto result = experiment::run_plan(config::plan_from_key_values(kv), s.dir, {});
    CHECK(result.summary.at("successFraction").get<double>() <= 0.25);
}

TEST_CASE("failed runs are recorded and the rest continue") {
    Scratch s("failing");
    auto kv = config::parse_key_values(kSyncConfig);
    kv["sweep.dt"] = "0.0078125, 0.3";
    const auto result = experiment::run_plan(config::plan_from_key_values(kv), s.dir, {});
    CHECK_FALSE(result.allOk);
    CHECK(result.runs[0].status == "ok");
    CHECK(result.runs[1].status == "failed");
    CHECK_FALSE(result.runs[1].error.empty());
    const Json index = read_json(s.dir / "index.json");
    CHECK(index.at("runs")[1].at("status") == "failed");
    CHECK(index.at("runs")[1].contains("error"));
}

TEST_CASE("command line: simulate") {
    Scratch s("cli_sim");
    const fs::path cfg = s.write("sync.cfg", kSyncConfig);
    const fs::path log = s.dir / "log.txt";

    CHECK(run_cli("simulate " + cfg.string() + " --out " + (s.dir / "o1").string(), log) == 0);
    CHECK(run_cli("simulate " + cfg.string() + " --out " + (s.dir / "o2").string(), log) == 0);
    for (const char* f : {"report.json", "trajectory.csv", "phases.svg"}) {
        REQUIRE(fs::exists(s.dir / "o1" / f));
        CHECK(slurp(s.dir / "o1" / f) == slurp(s.dir / "o2" / f));
    }

    CHECK(run_cli("simulate " + cfg.string() + " --seed 9 --scheme heun --format json --out " +
                      (s.dir / "o3").string(),
                  log) == 0);
    const Json rep = read_json(s.dir / "o3" / "report.json");
    CHECK(rep.at("scheme") == "heun");
    CHECK(rep.at("config").at("seed") == 9);
    CHECK(fs::exists(s.dir / "o3" / "trajectory.json"));

    CHECK(run_cli("simulate " + cfg.string() + " --scheme euler", log) != 0);
    CHECK(run_cli("simulate " + (s.dir / "missing.cfg").string() + " --out " + (s.dir / "o4").string(), log) == 2);
    const fs::path bad = s.write("bad.cfg", "N = 3\nsigma = -1\n");
    CHECK(run_cli("simulate " + bad.string() + " --out " + (s.dir / "o5").string(), log) == 2);
    CHECK(run_cli("", log) != 0);
}

TEST_CASE("command line: aborted integration") {
    Scratch s("cli_abort");
    const fs::path cfg = s.write("fast.cfg", "N = 3\nfreqs.identical = 1e9\nT = 1\ndt = 0.015625\n");
    const fs::path log = s.dir / "log.txt";
    CHECK(run_cli("simulate " + cfg.string() + " --out " + (s.dir / "o").string(), log) == 3);
    CHECK(slurp(log).find("aborted") != std::string::npos);
}

TEST_CASE("command line: sweep, graph-info, fbm-test, rate-bound") {
    Scratch s("cli_more");
    const fs::path log = s.dir / "log.txt";

    const fs::path plan = s.write("plan.cfg", std::string(kSyncConfig) + "sweep.seed = 1..3\n");
    CHECK(run_cli("sweep " + plan.string() + " --jobs 2 --out " + (s.dir / "sw1").string(), log) == 0);
    CHECK(run_cli("sweep " + plan.string() + " --jobs 1 --out " + (s.dir / "sw2").string(), log) == 0);
    for (const char* f : {"index.json", "summary.json", "run_0002/report.json", "run_0002/trajectory.csv"}) {
        REQUIRE(fs::exists(s.dir / "sw1" / f));
        CHECK(slurp(s.dir / "sw1" / f) == slurp(s.dir / "sw2" / f));
    }
    const fs::path failing = s.write("fail.cfg", std::string(kSyncConfig) + "sweep.dt = 0.0078125, 0.3\n");
    CHECK(run_cli("sweep " + failing.string() + " --out " + (s.dir / "sw3").string(), log) == 1);

    CHECK(run_cli("graph-info complete:6 --out " + (s.dir / "gi").string(), log) == 0);
    const Json gi = read_json(s.dir / "gi" / "graph_info.json");
    CHECK(gi.at("spectrum").at("fiedler").get<double>() == doctest::Approx(6.0));
    const fs::path edges = s.write("g.txt", "# path with one negative edge\n0 1 1\n1 2\n2 3 -1\n");
    CHECK(run_cli("graph-info " + edges.string(), log) == 0);
    CHECK(run_cli("graph-info nosuchfamily:3", log) == 2);

    const fs::path fbm = s.write("fbm.cfg", "hurst = 0.45\nsteps = 256\nsamples = 400\nseed = 2\n");
    CHECK(run_cli("fbm-test " + fbm.string() + " --out " + (s.dir / "fb").string(), log) == 0);
    CHECK(read_json(s.dir / "fb" / "fbm_test.json").at("success").get<bool>());

    const fs::path rb = s.write("rb.cfg", "N = 6\nsigma = 0.001\nhurst = 0.5\nT = 4\ndt = 0.0078125\ntrials = 30\n");
    CHECK(run_cli("rate-bound " + rb.string() + " --out " + (s.dir / "rb").string(), log) == 0);
    const Json rj = read_json(s.dir / "rb" / "rate_bound.json");
    CHECK(rj.at("rateBound").at("bound").get<double>() <= rj.at("rateBound").at("d").get<double>());
    CHECK(rj.contains("basin"));
}
