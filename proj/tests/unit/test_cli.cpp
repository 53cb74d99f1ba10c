#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "sphrs/io.hpp"
#include "sphrs/synthetic.hpp"

namespace {

using namespace sphrs;
namespace fs = std::filesystem;

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

std::vector<std::string> fields(const std::string& row) {
    std::vector<std::string> v;
    std::istringstream in(row);
    for (std::string f; std::getline(in, f, ',');) v.push_back(f);
    return v;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sphrs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        erp_ = (dir_ / "erp.png").string();
        save_image(harmonic_image(ProjectionFormat::erp(128, 64), 4, 16), erp_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
    std::string erp_;
};

void expect_single_line_error(const CliRun& r, int code) {
    EXPECT_EQ(r.code, code);
    ASSERT_FALSE(r.err.empty());
    EXPECT_EQ(lines(r.err).size(), 1u) << r.err;
}

TEST_F(CliTest, ConvertUsesFaceSizeHeuristic) {
    save_image(harmonic_image(ProjectionFormat::erp(256, 128), 4, 16), path("big.png"));
    const CliRun r = run({"convert", "--in", path("big.png"), "--out", path("c.png"), "--from", "erp", "--to", "cmp",
                       "--resampler", "cubic", "--var", "on", "--threads", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const ImageBuffer out = load_image(path("c.png"));
    EXPECT_EQ(out.width(), 3 * 80);
    EXPECT_EQ(out.height(), 2 * 80);
    EXPECT_NE(r.out.find(" s\n"), std::string::npos) << "prints the elapsed time";
}

TEST_F(CliTest, ConvertClassicalFsmrAndBack) {
    ASSERT_EQ(run({"convert", "--in", erp_, "--out", path("c.pgm"), "--from", "erp", "--to", "cmp", "--face-size",
                   "16", "--var", "off", "--resampler", "fsmr"})
                  .code,
              0);
    const CliRun r = run({"convert", "--in", path("c.pgm"), "--out", path("e.png"), "--from", "cmp", "--to", "erp",
                       "--erp-width", "128"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(load_image(path("e.png")).width(), 128);
}

TEST_F(CliTest, MissingFromIsUsageError) {
    expect_single_line_error(run({"convert", "--in", erp_, "--out", path("c.png"), "--to", "cmp"}), cli::kExitUsage);
}

TEST_F(CliTest, InvalidChoicesAreUsageErrors) {
    expect_single_line_error(run({"convert", "--in", erp_, "--out", path("c.png"), "--from", "erp", "--to", "cmp",
                                  "--resampler", "bicubic"}),
                             cli::kExitUsage);
    expect_single_line_error(run({"roundtrip", "--in", erp_, "--var", "maybe"}), cli::kExitUsage);
    expect_single_line_error(run({"roundtrip", "--in", erp_, "--sweep", "kernel=x"}), cli::kExitUsage);
    expect_single_line_error(run({"selftest", "--suite", "everything"}), cli::kExitUsage);
    expect_single_line_error(run({}), cli::kExitUsage);
}

TEST_F(CliTest, RuntimeFailuresExitOne) {
    expect_single_line_error(run({"roundtrip", "--in", path("missing.png")}), cli::kExitFailure);
    expect_single_line_error(run({"convert", "--in", erp_, "--out", path("c.png"), "--from", "erp", "--to", "erp",
                                  "--block-size", "64"}),
                             cli::kExitFailure);
    expect_single_line_error(run({"convert", "--in", erp_, "--out", path("c.png"), "--from", "cmp", "--to", "erp"}),
                             cli::kExitFailure);
}

TEST_F(CliTest, RoundtripRowHasAllColumns) {
    const CliRun r = run({"roundtrip", "--in", erp_, "--resampler", "cubic", "--var", "on"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0], "image,src_res,tar_res,resampler,var,block,psnr_db,wspsnr_db,ssim,seconds");
    const auto f = fields(l[1]);
    ASSERT_EQ(f.size(), 10u);
    EXPECT_EQ(f[0], "erp.png");
    EXPECT_EQ(f[1], "128x64");
    EXPECT_EQ(f[3], "cubic");
    EXPECT_EQ(f[4], "on");
    EXPECT_EQ(f[5], "32");
    EXPECT_GT(std::stod(f[9]), 0.0);
}

TEST_F(CliTest, SweepReproducesTableLayout) {
    const CliRun r = run({"roundtrip", "--in", erp_, "--sweep", "resampler=nearest,linear,cubic,fsmr", "--var",
                       "on,off", "--csv", path("t.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 9u);
    const std::vector<std::pair<std::string, std::string>> expected{
        {"nearest", "on"}, {"nearest", "off"}, {"linear", "on"}, {"linear", "off"},
        {"cubic", "on"},   {"cubic", "off"},   {"fsmr", "on"},   {"fsmr", "off"}};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto f = fields(l[i + 1]);
        EXPECT_EQ(f[3], expected[i].first);
        EXPECT_EQ(f[4], expected[i].second);
    }
    std::ifstream csv(path("t.csv"));
    std::stringstream content;
    content << csv.rdbuf();
    EXPECT_EQ(content.str(), r.out);
}

TEST_F(CliTest, CsvAppendWritesHeaderOnce) {
    for (int i = 0; i < 2; ++i) {
        ASSERT_EQ(run({"roundtrip", "--in", erp_, "--resampler", "linear", "--csv", path("a.csv")}).code, 0);
    }
    std::ifstream csv(path("a.csv"));
    std::stringstream content;
    content << csv.rdbuf();
    const auto l = lines(content.str());
    ASSERT_EQ(l.size(), 3u);
    EXPECT_EQ(l[0].rfind("image,", 0), 0u);
    EXPECT_EQ(l[1].rfind("erp.png,", 0), 0u);
}

TEST_F(CliTest, JsonMirrorsCsv) {
    const CliRun r = run({"roundtrip", "--in", erp_, "--resampler", "nearest", "--var", "on,off", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["resampler"], "nearest");
    EXPECT_EQ(j[1]["var"], "off");
    EXPECT_TRUE(j[0]["wspsnr_db"].is_number());
}

TEST_F(CliTest, RoundtripIsIndependentOfThreadCount) {
    auto rows_without_seconds = [&](const std::string& threads) {
        const CliRun r = run({"roundtrip", "--in", erp_, "--sweep", "resampler=linear,fsmr", "--var", "on,off",
                           "--threads", threads, "--save-dir", dir_.string()});
        EXPECT_EQ(r.code, 0) << r.err;
        std::vector<std::string> rows;
        for (const auto& l : lines(r.out)) rows.push_back(l.substr(0, l.rfind(',')));
        return rows;
    };
    const auto one = rows_without_seconds("1");
    const auto one_img = load_image(path("erp_fsmr_varon_b8_reconstructed.png"));
    const auto eight = rows_without_seconds("8");
    EXPECT_EQ(one, eight);
    EXPECT_EQ(one_img, load_image(path("erp_fsmr_varon_b8_reconstructed.png")));
}

TEST_F(CliTest, MetricsOfIdenticalImages) {
    const CliRun r = run({"metrics", "--in", erp_, "--ref", erp_});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "psnr_db=999.0000 wspsnr_db=999.0000 ssim=1.000000\n");
}

TEST_F(CliTest, SelftestSingleSuite) {
    const CliRun r = run({"selftest", "--suite", "nearest-oracle", "--threads", "2"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("suite nearest-oracle: pass"), std::string::npos);
    EXPECT_EQ(r.out.find("candidate-filter"), std::string::npos);
}

TEST_F(CliTest, HelpExitsZero) {
    const CliRun r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("roundtrip"), std::string::npos);
}

}  // namespace
