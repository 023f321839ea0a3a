#include "doctest.h"

#include "splatguard/config.hpp"
#include "splatguard/error.hpp"
#include "splatguard/reports.hpp"
#include "support.hpp"

using namespace splatguard;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
    try {
        run_config_from_json(j).validate();
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidConfig);
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("config: defaults validate and survive a JSON round trip") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.matching.window == 3);
    CHECK(c.scale.tau == 1.6);
    CHECK(c.scale.lambda == 1e5);

    c.seed = 12345678901234ULL;
    c.pose.mode = TourMode::ClosedTour;
    c.pose.solver = TspSolver::LinKernighan;
    c.matching.denominator = RateDenominator::Mean;
    c.perturb.mode = PerturbMode::Checker;
    c.minisplat.experiment = Experiment::DefenseAB;
    c.minisplat.scene = SceneKind::ThinBar;
    c.minisplat.train.lr.opacity = 0.125;
    c.minisplat.background = {0.25, 0.5, 1.0};
    const json j = json::parse(to_json(c).dump());
    const RunConfig back = run_config_from_json(j);
    CHECK(to_json(back) == to_json(c));
    CHECK(back.seed == c.seed);
    CHECK(back.minisplat.train.lr.opacity == 0.125);
}

TEST_CASE("config: partial overlays keep the base values") {
    RunConfig base;
    base.matching.window = 5;
    const RunConfig r = run_config_from_json(json::parse(R"({"scale": {"tau": 2.0}})"), base);
    CHECK(r.scale.tau == 2.0);
    CHECK(r.matching.window == 5);
    CHECK(r.scale.lambda == 1e5);
}

TEST_CASE("config: type errors, unknown keys and range errors name the field") {
    CHECK(config_error(json::parse(R"({"seed": "abc"})")).find("'seed'") != std::string::npos);
    CHECK(config_error(json::parse(R"({"seed": -3})")).find("'seed'") != std::string::npos);
    CHECK(config_error(json::parse(R"({"matching": {"window": 2.5}})")).find("matching.window") != std::string::npos);
    CHECK(config_error(json::parse(R"({"matching": {"colour": 1}})")).find("matching.colour") != std::string::npos);
    CHECK(config_error(json::parse(R"({"pose": {"mode": "spiral"}})")).find("pose.mode") != std::string::npos);
    CHECK(config_error(json::parse(R"({"matching": {"window": 0}})")).find("matching.window") != std::string::npos);
    CHECK(config_error(json::parse(R"({"matching": {"ratio": 1.5}})")).find("matching.ratio") != std::string::npos);
    CHECK(config_error(json::parse(R"({"perturb": {"epsilon": 2}})")).find("perturb.epsilon") != std::string::npos);
    CHECK(config_error(json::parse(R"({"scale": {"lambda": -1}})")).find("scale.lambda") != std::string::npos);
    CHECK(config_error(json::parse(R"({"minisplat": {"width": 4}})")).find("minisplat") != std::string::npos);
    CHECK(config_error(json::parse(R"({"minisplat": {"background": [0, 0, 2]}})")).find("background") !=
          std::string::npos);
    CHECK(!config_error(json::parse("[1, 2]")).empty());
}

TEST_CASE("reports: number formatting is shortest round-trip and handles non-finite values") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.6875) == "1.6875");
    CHECK(format_number(1e-300) == "1e-300");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(number(2.5) == 2.5);
}

TEST_CASE("reports: hashes depend on content and names, not on directory listing order") {
    const auto dir = testing::temp_dir("reports_hash");
    testing::write_text(dir / "b.png", "bbb");
    testing::write_text(dir / "a.ppm", "aaa");
    testing::write_text(dir / "notes.txt", "ignored");
    const DatasetManifest m = scan_dataset(dir);
    REQUIRE(m.images.size() == 2);
    CHECK(m.images[0].name == "a.ppm");
    CHECK(m.find("b.png") != nullptr);
    CHECK(m.find("notes.txt") == nullptr);
    const std::string h = manifest_hash(m);
    CHECK(h.size() == 16);
    CHECK(h == manifest_hash(scan_dataset(dir)));
    testing::write_text(dir / "b.png", "bbc");
    CHECK(h != manifest_hash(scan_dataset(dir)));
    CHECK(hash_text("") == "cbf29ce484222325");
    CHECK(hash_text("a") == "af63dc4c8601ec8c");
    CHECK_THROWS_AS(scan_dataset(dir / "missing"), Error);
}

TEST_CASE("reports: envelope embeds the config and CSV layouts are stable") {
    RunConfig c;
    c.seed = 7;
    const auto e = envelope("analyze", c, "0123456789abcdef");
    CHECK(e["tool"] == "splatguard");
    CHECK(e["config"]["seed"] == 7);
    CHECK(e["manifest_hash"] == "0123456789abcdef");
    CHECK(dump(e).back() == '\n');

    TraceRow row;
    row.iter = 3;
    row.l1 = 0.5;
    row.psnr = std::numeric_limits<double>::infinity();
    CHECK(trace_csv({row}) == "iter,l1,scale_loss,total,psnr,ssim,max_nu\n3,0.5,0,0,inf,0,0\n");

    ScaleLossReport r;
    r.nu = {1.6875};
    r.loss = {0.0875};
    CHECK(nu_csv(r) == "index,nu,loss\n0,1.6875,0.0875\n");
}

TEST_CASE("reports: write_file creates parent directories") {
    const auto dir = testing::temp_dir("reports_write");
    write_file(dir / "x" / "y" / "z.txt", "hello");
    CHECK(read_file(dir / "x" / "y" / "z.txt") == "hello");
    CHECK_THROWS_AS(read_file(dir / "nope.txt"), Error);
}
