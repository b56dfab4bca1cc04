#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("genplan-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result run(const std::string& args) const {
        const auto log = (dir_ / "stdout.txt").string();
        const std::string cmd =
            std::string(GENPLAN_CLI) + " --out " + dir_.string() + " " + args + " > " + log + " 2>&1";
        const int status = std::system(cmd.c_str());
        Result r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        std::ifstream in(log);
        std::ostringstream text;
        text << in.rdbuf();
        r.output = text.str();
        return r;
    }

    std::string write(const std::string& name, const std::string& text) const {
        const auto path = (dir_ / name).string();
        std::ofstream(path) << text;
        return path;
    }

    fs::path dir_;
};

const std::string gripper_domain = support::data("domains/gripper.pddl");

} // namespace

TEST_F(CliTest, ParseValidDomain) {
    const auto r = run("parse --domain " + gripper_domain);
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("gripper-strips"), std::string::npos);
}

TEST_F(CliTest, ParseMalformedDomainExitsWithOne) {
    const auto bad = write("bad.pddl", "(define (domain x) (:predicates (p ?x))");
    const auto r = run("parse --domain " + bad);
    EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, MissingRequiredOptionExitsWithTwo) {
    const auto inst = write("g1.pddl", genplan::gen::gripper(1));
    EXPECT_EQ(run("parse --instance " + inst).code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(CliTest, ExpandOneBallGripper) {
    const auto inst = write("g1.pddl", genplan::gen::gripper(1));
    const auto r = run("expand --domain " + gripper_domain + " --instance " + inst + " --distances --cache");
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(std::regex_search(r.output, std::regex(R"((^|\n)states\s+8\n)"))) << r.output;
    bool cached = false;
    for (const auto& e : fs::directory_iterator(dir_))
        cached = cached || e.path().extension() == ".gpts";
    EXPECT_TRUE(cached);
}

TEST_F(CliTest, ExpandOverCapExitsWithOne) {
    const auto inst = write("g3.pddl", genplan::gen::gripper(3));
    EXPECT_EQ(run("expand --domain " + gripper_domain + " --instance " + inst + " --max-states 5").code, 1);
}

TEST_F(CliTest, Selftest) {
    const auto r = run("selftest");
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(r.output.find("FAIL"), std::string::npos) << r.output;
}

TEST_F(CliTest, GenerateDatasetTrainEval) {
    ASSERT_EQ(run("generate gripper --size 1").code, 0);
    ASSERT_EQ(run("generate gripper --size 2").code, 0);
    ASSERT_EQ(run("generate gripper --size 3").code, 0);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir_))
        if (e.path().extension() == ".pddl")
            files.push_back(e.path().string());
    ASSERT_EQ(files.size(), 3u);
    std::string list;
    for (const auto& f : files)
        list += " " + f;
    ASSERT_EQ(run("dataset --domain " + gripper_domain + " --instances" + list).code, 0);
    ASSERT_TRUE(fs::exists(dir_ / "manifest.json"));
    const auto manifest = (dir_ / "manifest.json").string();

    const auto train = run("train --manifest " + manifest + " --steps 20 --batch 4 --k 4 --layers 1");
    ASSERT_EQ(train.code, 0) << train.output;
    ASSERT_TRUE(fs::exists(dir_ / "model.gpck"));
    ASSERT_TRUE(fs::exists(dir_ / "metrics.jsonl"));

    const auto checkpoint = (dir_ / "model.gpck").string();
    const auto eval = run("eval --checkpoint " + checkpoint + " --manifest " + manifest + " --mode deterministic");
    EXPECT_EQ(eval.code, 0) << eval.output;
    EXPECT_NE(eval.output.find("Coverage"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "report-deterministic.json"));

    // The checkpoint belongs to gripper; evaluating it on blocks must fail.
    const auto blocks = write("b2.pddl", genplan::gen::blocks(2, 1, true));
    const auto wrong = run("eval --checkpoint " + checkpoint + " --domain " + support::data("domains/blocks.pddl") +
                           " --instances " + blocks);
    EXPECT_EQ(wrong.code, 1) << wrong.output;
}

TEST_F(CliTest, TrainWithoutTrainSplitExitsWithOne) {
    const auto inst = write("g1.pddl", genplan::gen::gripper(1));
    const auto manifest = write("manifest.json", R"({"domain": ")" + gripper_domain + R"(", "instances": [
        {"path": ")" + inst + R"(", "split": "test"}]})");
    const auto r = run("train --manifest " + manifest + " --steps 1");
    EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, ConfigFileOverridesFlags) {
    const auto inst = write("g1.pddl", genplan::gen::gripper(1));
    const auto manifest = write("manifest.json", R"({"domain": ")" + gripper_domain + R"(", "instances": [
        {"path": ")" + inst + R"(", "split": "train"}]})");
    const auto config = write("config.json", R"({"max_steps": 3, "batch_size": 2, "gnn": {"k": 4, "layers": 1}})");
    const auto r = run("train --manifest " + manifest + " --steps 5000 --config " + config);
    ASSERT_EQ(r.code, 0) << r.output;
    std::ifstream in(dir_ / "metrics.jsonl");
    std::string line, last;
    while (std::getline(in, line))
        last = line;
    EXPECT_NE(last.find("\"step\":3"), std::string::npos) << last;
}
