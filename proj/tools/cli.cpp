#include "cli.hpp"

#include "commands.hpp"
#include "splatguard/error.hpp"
#include "splatguard/reports.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <optional>
#include <ostream>
#include <sstream>

namespace splatguard::cli {

namespace {

template <class T>
void apply(const std::optional<T>& v, T& target) {
    if (v) target = *v;
}

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<int> level;
    // pose
    std::optional<double> w_g, w_t;
    bool normalize_translations = false;
    std::optional<std::string> tour_mode;
    // matching
    std::optional<int> window, max_keypoints;
    std::optional<std::string> denominator;
    bool include_hh = false;
    // scale
    std::optional<double> tau, lambda;
    // perturb
    std::optional<std::string> perturb_mode;
    std::optional<double> epsilon;
    // minisplat
    std::optional<int> iterations;
    std::optional<std::string> experiment;
};

RunConfig build_config(const Overrides& o) {
    nlohmann::json patch = nlohmann::json::object();
    RunConfig cfg;
    if (o.config) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(*o.config));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::InvalidConfig, "config " + *o.config + ": " + e.what());
        }
        cfg = run_config_from_json(j);
    }
    apply(o.seed, cfg.seed);
    apply(o.out, cfg.out);
    apply(o.jobs, cfg.jobs);
    apply(o.level, cfg.wavelet_level);
    apply(o.w_g, cfg.pose.w_g);
    apply(o.w_t, cfg.pose.w_t);
    if (o.normalize_translations) cfg.pose.normalize_translations = true;
    apply(o.window, cfg.matching.window);
    apply(o.max_keypoints, cfg.matching.max_keypoints);
    if (o.include_hh) cfg.matching.include_hh = true;
    apply(o.tau, cfg.scale.tau);
    apply(o.lambda, cfg.scale.lambda);
    apply(o.epsilon, cfg.perturb.epsilon);
    apply(o.iterations, cfg.minisplat.train.iterations);
    // Enumerations go through the JSON reader so they share its diagnostics.
    if (o.tour_mode) patch["pose"]["mode"] = *o.tour_mode;
    if (o.denominator) patch["matching"]["denominator"] = *o.denominator;
    if (o.perturb_mode) patch["perturb"]["mode"] = *o.perturb_mode;
    if (o.experiment) patch["minisplat"]["experiment"] = *o.experiment;
    if (!patch.empty()) cfg = run_config_from_json(patch, cfg);
    cfg.validate();
    return cfg;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"splatguard: frequency-aware defense and analysis tools for Gaussian splatting inputs"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    Overrides o;
    app.add_option("--config", o.config, "RunConfig JSON file")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "Seed for every randomized step");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");

    DefendArgs defend;
    auto* c_defend = app.add_subcommand("defend", "Remove high-frequency subbands from every image of a dataset");
    c_defend->add_option("dataset", defend.dataset, "Directory of PNG/PPM images")->required();
    c_defend->add_option("--level", o.level, "Wavelet decomposition level");

    PerturbArgs perturb;
    auto* c_perturb = app.add_subcommand("perturb", "Write a synthetically perturbed copy of a dataset");
    c_perturb->add_option("dataset", perturb.dataset, "Directory of PNG/PPM images")->required();
    c_perturb->add_option("--mode", o.perturb_mode, "uniform | checker | per-view-independent");
    c_perturb->add_option("--epsilon", o.epsilon, "Amplitude in [0,1]");

    OrderArgs order;
    auto* c_order = app.add_subcommand("order", "Order views along a TSP trajectory of pairwise pose loss");
    c_order->add_option("--poses", order.poses, "COLMAP images.txt")->required();
    c_order->add_option("--w-g", o.w_g, "Geodesic weight");
    c_order->add_option("--w-t", o.w_t, "Translation weight");
    c_order->add_option("--tour", o.tour_mode, "open | closed");
    c_order->add_flag("--normalize-translations", o.normalize_translations, "Rescale translations to unit RMS");

    AnalyzeArgs analyze;
    auto* c_analyze = app.add_subcommand("analyze", "Trajectory, per-subband matching rates and energy ratios");
    c_analyze->add_option("dataset", analyze.dataset, "Directory of PNG/PPM images")->required();
    c_analyze->add_option("--poses", analyze.poses, "COLMAP images.txt")->required();
    c_analyze->add_option("--matches", analyze.matches, "External match CSV");
    c_analyze->add_option("--compare", analyze.compare, "Perturbed copy of the dataset to diff against");
    c_analyze->add_option("--grid-views", analyze.grid_views, "Views rendered into subband grids");
    c_analyze->add_option("--w-g", o.w_g, "Geodesic weight");
    c_analyze->add_option("--w-t", o.w_t, "Translation weight");
    c_analyze->add_flag("--normalize-translations", o.normalize_translations, "Rescale translations to unit RMS");
    c_analyze->add_option("--window", o.window, "Subsequent views matched per view");
    c_analyze->add_option("--denominator", o.denominator, "max | min | mean");
    c_analyze->add_option("--max-keypoints", o.max_keypoints, "Keypoint budget per image");
    c_analyze->add_flag("--include-hh", o.include_hh, "Also report the HH subband");

    ScaleLossArgs scale;
    bool no_nu_csv = false;
    auto* c_scale = app.add_subcommand("scaleloss", "Normalized-variance scale loss of a 3DGS PLY cloud");
    c_scale->add_option("ply", scale.ply, "PLY file")->required();
    c_scale->add_option("--tau", o.tau, "Threshold");
    c_scale->add_option("--lambda", o.lambda, "Weight");
    c_scale->add_flag("--no-nu-csv", no_nu_csv, "Skip the per-Gaussian CSV");

    auto* c_mini = app.add_subcommand("minisplat", "Fit a small differentiable splat scene");
    c_mini->add_option("--iterations", o.iterations, "Optimizer steps");
    c_mini->add_option("--experiment", o.experiment, "fit | defense-ab");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        const int code = app.exit(e, msg, msg);
        (code == 0 ? out : err) << msg.str();
        return code == 0 ? kOk : kInvalid;
    }

    RunConfig cfg;
    try {
        cfg = build_config(o);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);

    const Io io{out, err};
    try {
        if (*c_defend) return cmd_defend(defend, cfg, io);
        if (*c_perturb) return cmd_perturb(perturb, cfg, io);
        if (*c_order) return cmd_order(order, cfg, io);
        if (*c_analyze) return cmd_analyze(analyze, cfg, io);
        if (*c_scale) {
            scale.write_nu_csv = !no_nu_csv;
            return cmd_scaleloss(scale, cfg, io);
        }
        if (*c_mini) return cmd_minisplat(cfg, io);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("splatguard");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace splatguard::cli
