#include "doctest.h"

#include "cli.hpp"
#include "fixtures.hpp"
#include "splatguard/image_io.hpp"
#include "splatguard/perturb.hpp"
#include "splatguard/wavelet.hpp"

#include <json.hpp>

#include <sstream>

using namespace splatguard;
namespace fs = std::filesystem;
using nlohmann::json;
using testing::read_text;
using testing::temp_dir;
using testing::write_text;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

json load_json(const fs::path& p) { return json::parse(read_text(p)); }

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension();
        if (ext == ".json" || ext == ".csv") files[fs::relative(e.path(), dir).string()] = read_text(e.path());
    }
    return files;
}

} // namespace

TEST_CASE("cli: help exits 0 and unknown commands exit 2") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("cli defend: constant image survives and the summary is written") {
    const auto dir = temp_dir("defend_const");
    fs::create_directories(dir / "in");
    save_png(Image(10, 6, 0.4), dir / "in" / "a.png");
    const auto r = run({"defend", (dir / "in").string(), "--out", (dir / "out").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const Image in = load_png(dir / "in" / "a.png");
    const Image out = load_png(dir / "out" / "a.png");
    CHECK(max_abs_diff(in, out) <= 1.0 / 510.0);
    const json s = load_json(dir / "out" / "defend_summary.json");
    CHECK(s["images"][0]["status"] == "ok");
    CHECK(s["images"][0]["width"] == 10);
    CHECK(s.contains("config"));
    CHECK(s["manifest_hash"].get<std::string>().size() == 16);
}

TEST_CASE("cli defend: checker-perturbed views come out as the filtered clean views") {
    const auto dir = temp_dir("defend_checker");
    const auto views = testing::write_dataset(dir, 3, 40, 11);
    const auto pr = run({"perturb", (dir / "images").string(), "--mode", "checker", "--epsilon", "0.0627450980392",
                         "--out", (dir / "pert").string()});
    REQUIRE(pr.code == 0);
    const auto dr = run({"defend", (dir / "pert").string(), "--out", (dir / "def").string()});
    REQUIRE(dr.code == 0);
    for (std::size_t i = 0; i < views.names.size(); ++i) {
        const Image got = load_png(dir / "def" / views.names[i]);
        CHECK(max_abs_diff(got, filter_high_freq(views.images[i])) <= 1.0 / 255.0);
    }
}

TEST_CASE("cli defend: missing or empty dataset exits 2, unreadable file exits 1") {
    const auto dir = temp_dir("defend_errors");
    auto r = run({"defend", (dir / "nope").string(), "--out", (dir / "o").string()});
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
    fs::create_directories(dir / "empty");
    CHECK(run({"defend", (dir / "empty").string(), "--out", (dir / "o").string()}).code == 2);

    fs::create_directories(dir / "mixed");
    save_png(Image(8, 8, 0.5), dir / "mixed" / "good.png");
    write_text(dir / "mixed" / "bad.png", "not a png at all");
    r = run({"defend", (dir / "mixed").string(), "--out", (dir / "o2").string()});
    CHECK(r.code == 1);
    const json s = load_json(dir / "o2" / "defend_summary.json");
    CHECK(s["failed"] == 1);
    CHECK(s["images"][0]["name"] == "bad.png");
    CHECK(s["images"][0]["status"] == "error");
    CHECK(fs::exists(dir / "o2" / "good.png"));
}

TEST_CASE("cli order: writes the trajectory for a pose file") {
    const auto dir = temp_dir("order");
    const auto views = testing::write_dataset(dir, 6, 32, 3);
    const auto r = run({"order", "--poses", (dir / "images.txt").string(), "--out", (dir / "o").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const json t = load_json(dir / "o" / "trajectory.json");
    CHECK(t["trajectory"]["order"].size() == 6);
    CHECK(t["trajectory"]["exact"] == true);
    CHECK(t["matrix"]["pose_loss"].size() == 6);
}

TEST_CASE("cli analyze: 20-view scene, reports, and a clean-vs-perturbed diff") {
    const auto dir = temp_dir("analyze20");
    testing::write_dataset(dir, 20, 128, 42);
    REQUIRE(run({"perturb", (dir / "images").string(), "--mode", "per-view-independent", "--seed", "5", "--out",
                 (dir / "pert").string()})
                .code == 0);
    const auto r = run({"analyze", (dir / "images").string(), "--poses", (dir / "images.txt").string(), "--compare",
                        (dir / "pert").string(), "--out", (dir / "o").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const json m = load_json(dir / "o" / "match_report.json");
    for (const char* band : {"LL", "LH", "HL"}) {
        const double rate = m["matches"]["bands"][band]["rate"]["rate"];
        CHECK(rate >= 0.0);
        CHECK(rate <= 1.0);
    }
    CHECK(m["matches"]["window"] == 3);
    CHECK(m["matches"]["denominator"] == "max");
    const json e = load_json(dir / "o" / "energy_report.json");
    double sum = 0.0;
    for (const char* band : {"LL", "LH", "HL", "HH"}) sum += e["dataset_mean"][band].get<double>();
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fs::exists(dir / "o" / "energy_report.csv"));
    CHECK(fs::exists(dir / "o" / "match_report.csv"));
    CHECK(fs::exists(dir / "o" / "subbands" / (fs::path(m["matches"]["trajectory"][0].get<std::string>()).stem().string() + "_subbands.png")));
    const json d = load_json(dir / "o" / "match_diff.json");
    CHECK(d["high_drop_exceeds_ll_drop"] == true);
}

TEST_CASE("cli analyze: two views give one pair and a length-two trajectory") {
    const auto dir = temp_dir("analyze2");
    testing::write_dataset(dir, 2, 64, 8);
    const auto r = run({"analyze", (dir / "images").string(), "--poses", (dir / "images.txt").string(), "--out",
                        (dir / "o").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const json t = load_json(dir / "o" / "trajectory.json");
    CHECK(t["trajectory"]["order"].size() == 2);
    const json m = load_json(dir / "o" / "match_report.json");
    CHECK(m["matches"]["bands"]["LL"]["pairs"].size() == 1);
}

TEST_CASE("cli analyze: unparseable or inconsistent poses exit 2") {
    const auto dir = temp_dir("analyze_bad");
    testing::write_dataset(dir, 3, 40, 1);
    write_text(dir / "bad.txt", "1 0.5 0.5 nope\n");
    CHECK(run({"analyze", (dir / "images").string(), "--poses", (dir / "bad.txt").string(), "--out",
               (dir / "o").string()})
              .code == 2);
    write_text(dir / "unknown.txt", "1 1 0 0 0 0 0 0 1 view_00.png\n\n2 1 0 0 0 1 0 0 1 ghost.png\n\n");
    CHECK(run({"analyze", (dir / "images").string(), "--poses", (dir / "unknown.txt").string(), "--out",
               (dir / "o").string()})
              .code == 2);
}

TEST_CASE("cli analyze: external match CSV is aggregated with the same rule") {
    const auto dir = temp_dir("analyze_ext");
    testing::write_dataset(dir, 3, 64, 2);
    write_text(dir / "m.csv", "view_a,view_b,extracted_a,extracted_b,matched\nview_00.png,view_01.png,1000,900,450\n");
    const auto r = run({"analyze", (dir / "images").string(), "--poses", (dir / "images.txt").string(), "--matches",
                        (dir / "m.csv").string(), "--out", (dir / "o").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const json m = load_json(dir / "o" / "match_report.json");
    CHECK(m["external"]["rate"]["rate"].get<double>() == doctest::Approx(0.45));
    write_text(dir / "bad.csv", "view_a,view_b,extracted_a,extracted_b,matched\na,b,10,10,11\n");
    CHECK(run({"analyze", (dir / "images").string(), "--poses", (dir / "images.txt").string(), "--matches",
               (dir / "bad.csv").string(), "--out", (dir / "o").string()})
              .code == 2);
}

TEST_CASE("cli scaleloss: the (1,1,10) anchor passes end to end and lambda scales linearly") {
    const auto dir = temp_dir("scaleloss");
    write_text(dir / "c.ply", testing::ascii_ply(testing::cloud_from_scales({{1, 1, 10}, {1, 10, 10}, {2, 2, 2}})));
    auto r = run({"scaleloss", (dir / "c.ply").string(), "--lambda", "1", "--out", (dir / "a").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const json a = load_json(dir / "a" / "scale_loss.json");
    CHECK(a["scale_loss"]["count_above_tau"] == 1);
    CHECK(a["scale_loss"]["max_nu"].get<double>() == doctest::Approx(1.6875).epsilon(1e-12));
    const std::string csv = read_text(dir / "a" / "nu.csv");
    CHECK(csv.rfind("index,nu,loss\n0,1.68750000000000", 0) == 0);
    r = run({"scaleloss", (dir / "c.ply").string(), "--lambda", "3", "--out", (dir / "b").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const json b = load_json(dir / "b" / "scale_loss.json");
    CHECK(b["scale_loss"]["mean_loss"].get<double>() ==
          doctest::Approx(3.0 * a["scale_loss"]["mean_loss"].get<double>()).epsilon(1e-12));
}

TEST_CASE("cli scaleloss: empty or malformed PLY exits 2") {
    const auto dir = temp_dir("scaleloss_bad");
    write_text(dir / "empty.ply", testing::ascii_ply(GaussianCloud{}, false));
    CHECK(run({"scaleloss", (dir / "empty.ply").string(), "--out", (dir / "o").string()}).code == 2);
    write_text(dir / "junk.ply", "hello");
    CHECK(run({"scaleloss", (dir / "junk.ply").string(), "--out", (dir / "o").string()}).code == 2);
    CHECK(run({"scaleloss", (dir / "missing.ply").string(), "--out", (dir / "o").string()}).code == 2);
}

TEST_CASE("cli minisplat: one iteration gives one trace row") {
    const auto dir = temp_dir("mini_one");
    write_text(dir / "cfg.json", R"({"minisplat": {"gaussians": 4, "width": 16, "height": 16, "views": 1, "iterations": 1}})");
    const auto r = run({"minisplat", "--config", (dir / "cfg.json").string(), "--out", (dir / "o").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const std::string trace = read_text(dir / "o" / "fit" / "trace.csv");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 2);
    CHECK(trace.rfind("iter,l1,scale_loss,total,psnr,ssim,max_nu\n", 0) == 0);
    CHECK(r.out.find("run=fit psnr=") != std::string::npos);
    CHECK(fs::exists(dir / "o" / "fit" / "render.png"));
    const json ck = load_json(dir / "o" / "fit" / "checkpoint.json");
    CHECK(ck["scene"]["gaussians"].size() == 4);
}

TEST_CASE("cli minisplat: invalid configs exit 2 naming the field") {
    const auto dir = temp_dir("mini_bad");
    write_text(dir / "seed.json", R"({"seed": "abc"})");
    auto r = run({"minisplat", "--config", (dir / "seed.json").string(), "--out", (dir / "o").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("'seed'") != std::string::npos);
    write_text(dir / "lr.json", R"({"minisplat": {"lr": {"color": -1}}})");
    r = run({"minisplat", "--config", (dir / "lr.json").string(), "--out", (dir / "o").string()});
    CHECK(r.code == 2);
    write_text(dir / "extra.json", R"({"minisplat": {"iterashuns": 3}})");
    r = run({"minisplat", "--config", (dir / "extra.json").string(), "--out", (dir / "o").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("minisplat.iterashuns") != std::string::npos);
    write_text(dir / "broken.json", "{");
    CHECK(run({"minisplat", "--config", (dir / "broken.json").string()}).code == 2);
}

TEST_CASE("cli minisplat: defense A/B gives three traces and a consistent summary") {
    const auto dir = temp_dir("mini_ab");
    write_text(dir / "cfg.json",
               R"({"seed": 3, "minisplat": {"experiment": "defense-ab", "gaussians": 16, "width": 32, "height": 32,
                   "views": 1, "iterations": 300, "track_ssim": false}})");
    const auto r = run({"minisplat", "--config", (dir / "cfg.json").string(), "--out", (dir / "o").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    for (const char* run_name : {"clean", "perturbed", "filtered"}) {
        CHECK(fs::exists(dir / "o" / run_name / "trace.csv"));
    }
    const json s = load_json(dir / "o" / "minisplat_summary.json");
    CHECK(s["filtered_minus_perturbed_psnr"].get<double>() ==
          doctest::Approx(s["runs"]["filtered"]["psnr_to_clean"].get<double>() -
                          s["runs"]["perturbed"]["psnr_to_clean"].get<double>()));
}

TEST_CASE("cli: analyze and minisplat outputs are byte-identical across reruns") {
    const auto dir = temp_dir("determinism");
    testing::write_dataset(dir, 5, 64, 17);
    const std::vector<std::string> analyze{"analyze", (dir / "images").string(), "--poses",
                                           (dir / "images.txt").string(), "--out", (dir / "a").string()};
    REQUIRE(run(analyze).code == 0);
    const auto first = snapshot(dir / "a");
    fs::remove_all(dir / "a");
    REQUIRE(run(analyze).code == 0);
    CHECK(first == snapshot(dir / "a"));

    write_text(dir / "cfg.json", R"({"seed": 9, "minisplat": {"gaussians": 6, "width": 16, "height": 16, "views": 2, "iterations": 25}})");
    const std::vector<std::string> mini{"minisplat", "--config", (dir / "cfg.json").string(), "--out",
                                        (dir / "m").string()};
    REQUIRE(run(mini).code == 0);
    const auto m1 = snapshot(dir / "m");
    fs::remove_all(dir / "m");
    REQUIRE(run(mini).code == 0);
    CHECK(m1 == snapshot(dir / "m"));
    CHECK(!m1.empty());
}
