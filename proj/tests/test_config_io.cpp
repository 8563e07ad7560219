#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "activeirl/config_io.hpp"

using namespace airl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AIRL_IRL_BIN) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("airl_cfg_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(ConfigJson, RoundTrip) {
    ExperimentConfig c;
    c.environment = "random";
    c.method = Method::EigBo;
    c.steps = 7;
    c.beta = 0.5;
    c.seed = 42;
    c.initial_demos = InitialDemos::TopLeft;
    c.eig.n_rewards = 10;
    c.bo.kappa = 1.5;
    c.sampler.kind = SamplerKind::Metropolis;
    c.random.size = 5;
    c.structured.jail_reward = -3.0;
    const json j = to_json(c);
    ExperimentConfig d;
    apply_json(j, d);
    EXPECT_EQ(to_json(d), j);
    EXPECT_EQ(to_json(d).dump(), j.dump());
}

TEST(ConfigJson, SuiteRoundTrip) {
    auto s = preset("random-paper");
    s.methods = {Method::Random, Method::QEntropy};
    const auto back = suite_from_json(to_json(s));
    EXPECT_EQ(to_json(back), to_json(s));
    EXPECT_EQ(back.seeds.size(), 16u);
}

TEST(ConfigJson, UnknownKeysRejected) {
    ExperimentConfig c;
    EXPECT_THROW(apply_json(json{{"stepz", 3}}, c), ConfigError);
    EXPECT_THROW(apply_json(json{{"eig", {{"n_reward", 3}}}}, c), ConfigError);
    EXPECT_THROW(apply_json(json{{"steps", "many"}}, c), ConfigError);
    EXPECT_THROW(apply_json(json{{"method", "best"}}, c), ConfigError);
    EXPECT_THROW(suite_from_json(json{{"preset", "nope"}}), ConfigError);
    EXPECT_THROW(suite_from_json(json{{"seeds", json::array()}}), ConfigError);
}

TEST(ConfigJson, Presets) {
    const auto s = preset("structured-paper");
    EXPECT_EQ(s.seeds.size(), 10u);
    EXPECT_EQ(s.methods.size(), 7u);
    EXPECT_EQ(s.base.environment, "structured");
    const auto r = preset("random-paper");
    EXPECT_EQ(r.base.environment, "random");
    EXPECT_EQ(r.seeds.front(), 0u);
    EXPECT_EQ(r.seeds.back(), 15u);
}

TEST(ConfigJson, BareExperimentObject) {
    const auto s = suite_from_json(json{{"method", "random"}, {"seed", 3}, {"steps", 2}});
    ASSERT_EQ(s.methods.size(), 1u);
    EXPECT_EQ(s.methods[0], Method::Random);
    EXPECT_EQ(s.seeds, std::vector<std::uint64_t>{3});
}

TEST(ConfigJson, LoadWithComments) {
    const auto dir = scratch_dir("load");
    std::ofstream(dir / "c.json") << "{\n  // two seeds\n  \"preset\": \"structured-paper\", \"seeds\": [1, 2]\n}\n";
    const auto s = load_suite_config((dir / "c.json").string());
    EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{1, 2}));
    std::ofstream(dir / "bad.json") << "{ nope";
    EXPECT_THROW(load_suite_config((dir / "bad.json").string()), ConfigError);
    EXPECT_THROW(load_suite_config((dir / "missing.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST(Tables, MetricsRoundTrip) {
    RunRecord rec;
    for (int i = 1; i <= 3; ++i) {
        StepRecord r;
        r.step = i;
        r.xi = 10 + i;
        r.traj_len = i * 2;
        r.entropy_nats = 1.0 / 3.0 * i - 7.25;
        r.regret = 0.1 * i;
        r.t_acq_s = 1e-3 / i;
        r.t_mcmc_s = 0.25;
        rec.rows.push_back(r);
    }
    std::stringstream ss;
    write_metrics_csv(ss, rec);
    const auto back = read_metrics_csv(ss);
    ASSERT_EQ(back.size(), rec.rows.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].step, rec.rows[i].step);
        EXPECT_EQ(back[i].xi, rec.rows[i].xi);
        EXPECT_EQ(back[i].traj_len, rec.rows[i].traj_len);
        EXPECT_EQ(back[i].entropy_nats, rec.rows[i].entropy_nats);
        EXPECT_EQ(back[i].regret, rec.rows[i].regret);
        EXPECT_EQ(back[i].t_acq_s, rec.rows[i].t_acq_s);
        EXPECT_EQ(back[i].t_mcmc_s, rec.rows[i].t_mcmc_s);
    }
    std::stringstream bad("step,xi\n1,2\n");
    EXPECT_THROW(read_metrics_csv(bad), ConfigError);
}

TEST(Tables, HeatmapHasOneRowPerState) {
    std::vector<double> scores(36, 0.5);
    scores[5] = std::numeric_limits<double>::quiet_NaN();
    std::stringstream ss;
    write_heatmap_csv(ss, scores, 3);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "step,state,score");
    int rows = 0;
    while (std::getline(ss, line)) {
        if (rows == 5) EXPECT_EQ(line, "3,5,nan");
        ++rows;
    }
    EXPECT_EQ(rows, 36);
}

TEST(Cli, RunIsByteIdenticalWithoutTiming) {
    const auto a = scratch_dir("a"), b = scratch_dir("b");
    const std::string args = "run --preset structured-paper --method random --seed 4 --steps 3 --no-timing --heatmap-step 2";
    ASSERT_EQ(run_cli(args + " --out " + a.string()), 0);
    ASSERT_EQ(run_cli(args + " --out " + b.string()), 0);
    for (const char* f : {"random/seed_4.csv", "random/seed_4.diag.csv", "random/seed_4.heatmap.csv", "index.csv",
                          "summary.csv", "manifest.json"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    std::ifstream metrics(a / "random/seed_4.csv");
    EXPECT_EQ(read_metrics_csv(metrics).size(), 3u);

    // The manifest reproduces the run.
    const auto c = scratch_dir("c");
    ASSERT_EQ(run_cli("run --config " + (a / "manifest.json").string() + " --out " + c.string()), 0);
    EXPECT_EQ(slurp(a / "random/seed_4.csv"), slurp(c / "random/seed_4.csv"));

    std::ifstream hm(a / "random/seed_4.heatmap.csv");
    std::string line;
    int rows = -1;
    while (std::getline(hm, line)) ++rows;
    EXPECT_EQ(rows, 36);
    for (const auto& p : {a, b, c}) fs::remove_all(p);
}

TEST(Cli, SuiteWritesMethodDirectories) {
    const auto d = scratch_dir("suite");
    ASSERT_EQ(run_cli("suite --preset structured-paper --seed 0 1 --steps 1 --no-timing --out " + d.string()), 0);
    for (Method m : kAllMethods)
        for (int s : {0, 1}) EXPECT_TRUE(fs::exists(d / method_name(m) / ("seed_" + std::to_string(s) + ".csv")));
    fs::remove_all(d);
}

TEST(Cli, BadInputsExitNonZero) {
    const auto d = scratch_dir("bad");
    std::ofstream(d / "bad.json") << "{\"stepz\": 1}";
    EXPECT_NE(run_cli("run --config " + (d / "bad.json").string() + " --out " + d.string()), 0);
    EXPECT_NE(run_cli("run --preset nope --out " + d.string()), 0);
    EXPECT_NE(run_cli("run --method nope --out " + d.string()), 0);
    EXPECT_NE(run_cli("frobnicate"), 0);
    EXPECT_NE(run_cli("scale --sizes 3 --out " + d.string()), 0);
    fs::remove_all(d);
}

TEST(Cli, ScaleWritesTimingTable) {
    const auto d = scratch_dir("scale");
    ASSERT_EQ(run_cli("scale --sizes 5,6 --trials 1 --steps 1 --warmup 5 --samples 50 --no-bo --out " + d.string()), 0);
    std::ifstream t(d / "timing.csv");
    std::string line;
    int rows = -1;
    while (std::getline(t, line)) ++rows;
    EXPECT_EQ(rows, 4);
    EXPECT_TRUE(fs::exists(d / "fit.json"));
    fs::remove_all(d);
}
