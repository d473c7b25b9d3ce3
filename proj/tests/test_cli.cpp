#include <cstdlib>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "corpus.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(const std::string& args, const std::string& tag)
{
    const auto dir = corpus::scratch("cli_" + tag);
    const auto out = dir / "stdout", err = dir / "stderr";
    const std::string cmd = std::string(WOCC_BIN) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, corpus::slurp(out), corpus::slurp(err)};
}

std::string inputs()
{
    const auto& d = corpus::small_campus();
    return " --sessions " + (d / "sessions.csv").string() + " --timetable " + (d / "timetable.csv").string() +
           " --roster " + (d / "roster.csv").string() + " --inventory " + (d / "inventory.csv").string() + " --truth " +
           (d / "ground_truth_counts.csv").string() + " --seed 42";
}

} // namespace

TEST(Cli, MissingRosterIsUsageErrorNamingPath)
{
    const auto& d = corpus::small_campus();
    const auto r = run("map-aps --sessions " + (d / "sessions.csv").string() + " --timetable " +
                           (d / "timetable.csv").string() + " --roster /no/such/roster.csv --inventory " +
                           (d / "inventory.csv").string() + " --seed 1 -o " + corpus::scratch("cli_o").string(),
                       "noroster");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("/no/such/roster.csv"), std::string::npos) << r.err;
}

TEST(Cli, BadFlagIsUsageError)
{
    EXPECT_EQ(run("map-aps --frobnicate", "badflag").code, 1);
    EXPECT_EQ(run("", "nosub").code, 1);
}

TEST(Cli, UnknownAlgorithmIsUsageError)
{
    EXPECT_EQ(run("map-aps" + inputs() + " --algorithm dbscan -o " + corpus::scratch("alg").string(), "alg").code, 1);
}

TEST(Cli, RunThenEvaluateFromFile)
{
    const auto out = corpus::scratch("cli_run");
    const auto r = run("run" + inputs() + " -o " + out.string(), "run");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("evaluate:"), std::string::npos);
    EXPECT_TRUE(fs::exists(out / "estimates.csv"));

    const auto ev = corpus::scratch("cli_eval");
    const auto e = run("evaluate --estimates " + (out / "estimates.csv").string() + " --seed 42 -o " + ev.string(), "eval");
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(corpus::slurp(ev / "evaluation.json"), corpus::slurp(out / "evaluation.json"));
}

TEST(Cli, SimulateIsDeterministic)
{
    const auto cfg = corpus::scratch("simcfg") / "campus.cfg";
    {
        std::ofstream f(cfg);
        f << "weeks = 1\npopulation = 3000\n";
    }
    const auto a = corpus::scratch("sim_a"), b = corpus::scratch("sim_b");
    ASSERT_EQ(run("simulate -c " + cfg.string() + " -o " + a.string(), "sa").code, 0);
    ASSERT_EQ(run("simulate -c " + cfg.string() + " -o " + b.string(), "sb").code, 0);
    EXPECT_EQ(corpus::slurp(a / "sessions.csv"), corpus::slurp(b / "sessions.csv"));
    EXPECT_FALSE(corpus::slurp(a / "sessions.csv").empty());
}

TEST(Cli, BadSimConfigIsUsageError)
{
    const auto cfg = corpus::scratch("badsim") / "campus.cfg";
    {
        std::ofstream f(cfg);
        f << "non_connecting_probability = 2\n";
    }
    EXPECT_EQ(run("simulate -c " + cfg.string() + " -o " + corpus::scratch("badsim_o").string(), "badsim").code, 1);
}
