// Copyright 2026 The QOPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "qops/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run qops_run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = qops::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("qops_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        write("bell.qasm", "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n");
        write("flip.qasm", "OPENQASM 2.0;\nqreg q[2];\nh q[0];\ncx q[0],q[1];\nz q[1];\n");
        write("ghz.qasm", "OPENQASM 2.0;\nqreg q[3];\nh q[0];\ncx q[0],q[1];\ncx q[1],q[2];\n");
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }
    std::string read(const std::string& name) const {
        std::ifstream in(path(name));
        return {std::istreambuf_iterator<char>(in), {}};
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, partition_two_qubits) {
    const auto r = qops_run({"partition", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("families").size(), 5u);
    EXPECT_EQ(j.at("config").at("command"), "partition");
}

TEST_F(CliTest, self_test_passes_and_phase_flip_fails) {
    ASSERT_EQ(qops_run({"specgen", path("bell.qasm"), "-o", path("spec.json")}).code, 0);
    const auto spec = nlohmann::json::parse(read("spec.json"));
    EXPECT_EQ(spec.at("entries").size(), 5u);
    EXPECT_EQ(spec.at("config").at("families"), "all");

    const auto ok = qops_run({"test", path("bell.qasm"), "--spec", path("spec.json"), "-o", path("r0.json")});
    EXPECT_EQ(ok.code, 0) << ok.err;
    const auto r0 = nlohmann::json::parse(read("r0.json"));
    EXPECT_EQ(r0.at("failed"), 0);
    EXPECT_EQ(r0.at("config").at("budget"), 1000);
    EXPECT_EQ(r0.at("config").at("tau"), 0.01);
    EXPECT_EQ(r0.at("config").at("seed"), 42);

    const auto bad = qops_run({"test", path("flip.qasm"), "--spec", path("spec.json")});
    EXPECT_EQ(bad.code, 1);
    const auto r1 = nlohmann::json::parse(bad.out);
    EXPECT_EQ(r1.at("failing_families").size(), 2u);
}

TEST_F(CliTest, specgen_subset_of_families) {
    const auto r = qops_run({"specgen", path("bell.qasm"), "--families", "0,3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out).at("entries").size(), 2u);
    EXPECT_EQ(qops_run({"specgen", path("bell.qasm"), "--families", "0,x"}).code, 2);
    EXPECT_EQ(qops_run({"specgen", path("bell.qasm"), "--families", "9"}).code, 2);
}

TEST_F(CliTest, usage_and_config_errors_exit_two_with_one_line) {
    ASSERT_EQ(qops_run({"specgen", path("bell.qasm"), "-o", path("spec.json")}).code, 0);
    const std::vector<std::vector<std::string>> cases{
        {},
        {"frobnicate"},
        {"test", path("bell.qasm")},
        {"test", path("missing.qasm"), "--spec", path("spec.json")},
        {"test", path("bell.qasm"), "--spec", path("missing.json")},
        {"test", path("ghz.qasm"), "--spec", path("spec.json")},
        {"test", path("bell.qasm"), "--spec", path("spec.json"), "--mode", "psychic"},
        {"test", path("bell.qasm"), "--spec", path("spec.json"), "--tau", "-1"},
        {"test", path("bell.qasm"), "--spec", path("spec.json"), "--noise", "{\"p2\":0.01}"},
        {"test", path("bell.qasm"), "--spec", path("spec.json"), "--mode", "noisy", "--noise", "{\"p2\":0.01}"},
        {"partition", "0"},
        {"partition", "two"},
    };
    for (const auto& args : cases) {
        const auto r = qops_run(args);
        std::string joined;
        for (const auto& a : args) joined += a + " ";
        EXPECT_EQ(r.code, 2) << joined;
        EXPECT_FALSE(r.err.empty()) << joined;
        EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << joined << ": " << r.err;
    }
}

TEST_F(CliTest, stale_and_malformed_specs_are_rejected) {
    ASSERT_EQ(qops_run({"specgen", path("bell.qasm"), "-o", path("spec.json")}).code, 0);
    auto j = nlohmann::json::parse(read("spec.json"));
    j["entries"][1]["basis_fingerprint"] = "0123456789abcdef";
    write("stale.json", j.dump());
    const auto stale = qops_run({"test", path("bell.qasm"), "--spec", path("stale.json")});
    EXPECT_EQ(stale.code, 2);
    EXPECT_NE(stale.err.find("stale"), std::string::npos);
    write("broken.json", "{\"n\": 2");
    EXPECT_EQ(qops_run({"test", path("bell.qasm"), "--spec", path("broken.json")}).code, 2);
}

TEST_F(CliTest, shots_and_noisy_modes) {
    ASSERT_EQ(qops_run({"specgen", path("bell.qasm"), "-o", path("spec.json")}).code, 0);
    const auto shots = qops_run({"test", path("bell.qasm"), "--spec", path("spec.json"), "--mode", "shots",
                                 "--budget", "50", "--shots", "20000"});
    ASSERT_NE(shots.code, 2) << shots.err;
    EXPECT_EQ(nlohmann::json::parse(shots.out).at("config").at("shots"), 20000);

    write("noise.json", "{\"noise\": {\"p2\": 0.0}, \"mitigation\": {\"method\": \"zne-linear\"}}");
    const auto noisy = qops_run({"test", path("bell.qasm"), "--spec", path("spec.json"), "--mode", "noisy", "--noise",
                                 path("noise.json"), "--mitigation", path("noise.json"), "--se", "0.25", "--budget", "20"});
    ASSERT_NE(noisy.code, 2) << noisy.err;
    const auto cfg = nlohmann::json::parse(noisy.out).at("config");
    EXPECT_EQ(cfg.at("mitigation").at("method"), "zne-linear");
    EXPECT_EQ(cfg.at("standard_error"), 0.25);
}

TEST_F(CliTest, calibrate_reports_standard_error) {
    const auto r = qops_run({"calibrate", path("bell.qasm"), "--noise", "{\"p2\":0.0}", "--runs", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    // Without gate noise only shot noise remains.
    const double se = j.at("standard_error");
    EXPECT_GE(se, 0.0);
    EXPECT_LT(se, 0.05);
    EXPECT_EQ(j.at("config").at("runs"), 3);
}

TEST_F(CliTest, mutate_writes_parseable_mutants_and_manifest) {
    const auto r = qops_run({"mutate", path("bell.qasm"), "-o", path("mutants"), "--pool", "X,CX"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto manifest = nlohmann::json::parse(read("mutants/manifest.json"));
    const auto& list = manifest.at("mutants");
    EXPECT_EQ(list.size(), 2u + 3u * (2 + 2) + 1u);
    for (const auto& m : list) {
        EXPECT_NO_THROW(qops::load_qasm(path("mutants/" + m.at("file").get<std::string>())));
    }
    EXPECT_EQ(qops_run({"mutate", path("bell.qasm"), "-o", path("m2"), "--pool", "CCX"}).code, 2);
}

TEST_F(CliTest, bench_is_byte_identical_across_jobs) {
    fs::create_directories(dir_ / "circuits");
    fs::copy_file(path("bell.qasm"), dir_ / "circuits" / "bell.qasm");
    fs::copy_file(path("ghz.qasm"), dir_ / "circuits" / "ghz.qasm");
    const auto a = qops_run({"bench", "--circuits", path("circuits"), "--budget", "100", "-o", path("a.csv"),
                             "--summary", path("a.json"), "--select", "10"});
    ASSERT_EQ(a.code, 0) << a.err;
    const auto b = qops_run({"bench", "--circuits", path("circuits"), "--budget", "100", "-o", path("b.csv"),
                             "--summary", path("b.json"), "--select", "10", "--jobs", "4"});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(read("a.csv"), read("b.csv"));
    const auto summary = nlohmann::json::parse(read("a.json"));
    EXPECT_EQ(summary.at("faulty_positive").at("f1"), 1.0);
    EXPECT_EQ(summary.at("selections").size(), 2u);
    EXPECT_EQ(qops_run({"bench", "--circuits", path("nowhere")}).code, 2);
    EXPECT_EQ(qops_run({"bench", "--circuits", path("circuits"), "--ground-truth", "vibes"}).code, 2);
}

TEST_F(CliTest, help_exits_zero) {
    const auto r = qops_run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("specgen"), std::string::npos);
}
