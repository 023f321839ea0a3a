#include "commands.hpp"

#include "cli.hpp"
#include "splatguard/error.hpp"
#include "splatguard/gsply.hpp"
#include "splatguard/image_io.hpp"
#include "splatguard/matching.hpp"
#include "splatguard/metrics.hpp"
#include "splatguard/minisplat.hpp"
#include "splatguard/perturb.hpp"
#include "splatguard/reports.hpp"
#include "splatguard/synthetic.hpp"
#include "splatguard/tsp.hpp"
#include "splatguard/wavelet.hpp"

#include <map>
#include <ostream>
#include <set>

namespace splatguard::cli {

namespace fs = std::filesystem;

namespace {

struct FileResult {
    bool ok = false;
    std::string error;
    int width = 0;
    int height = 0;
    double energy_removed = 0.0;
    bool zero_energy = false;
};

DatasetManifest require_dataset(const fs::path& dir) {
    DatasetManifest m = scan_dataset(dir);
    if (m.images.empty()) throw Error(ErrorKind::InvalidArgument, "no PNG/PPM images in " + dir.string());
    return m;
}

fs::path out_dir(const RunConfig& cfg) {
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    return dir;
}

ordered_json file_entry(const ManifestEntry& e, const FileResult& r) {
    ordered_json j;
    j["name"] = e.name;
    j["status"] = r.ok ? "ok" : "error";
    if (r.ok) {
        j["width"] = r.width;
        j["height"] = r.height;
    } else {
        j["error"] = r.error;
    }
    return j;
}

double detail_energy_fraction(const Image& img, bool& zero) {
    try {
        const EnergyReport r = energy_report(img);
        zero = false;
        return 1.0 - r.mean[static_cast<int>(Subband::LL)];
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroEnergy) throw;
        zero = true;
        return 0.0;
    }
}

int finish(std::size_t failures, std::ostream& out, const std::string& what) {
    out << what << (failures ? " (" + std::to_string(failures) + " failed)" : std::string()) << "\n";
    return failures ? kPartial : kOk;
}

} // namespace

int cmd_defend(const DefendArgs& a, const RunConfig& cfg, Io io) {
    const DatasetManifest m = require_dataset(a.dataset);
    const fs::path out = out_dir(cfg);
    std::vector<FileResult> results(m.images.size());
    const int n = static_cast<int>(m.images.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        FileResult& r = results[i];
        try {
            const Image img = load_image(m.images[i].path);
            const Image filtered = filter_high_freq(img, cfg.wavelet_level);
            save_image(filtered, out / m.images[i].name);
            r.width = img.width();
            r.height = img.height();
            r.energy_removed = detail_energy_fraction(img, r.zero_energy);
            r.ok = true;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    }
    ordered_json j = envelope("defend", cfg, manifest_hash(m));
    ordered_json files = ordered_json::array();
    std::size_t failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        ordered_json f = file_entry(m.images[i], results[i]);
        if (results[i].ok) {
            f["energy_removed"] = results[i].energy_removed;
            f["zero_energy"] = results[i].zero_energy;
        } else {
            ++failures;
            io.err << "error: " << m.images[i].name << ": " << results[i].error << "\n";
        }
        files.push_back(f);
    }
    j["images"] = files;
    j["processed"] = results.size() - failures;
    j["failed"] = failures;
    write_file(out / "defend_summary.json", dump(j));
    return finish(failures, io.out, "defended " + std::to_string(results.size() - failures) + " images");
}

int cmd_perturb(const PerturbArgs& a, const RunConfig& cfg, Io io) {
    const DatasetManifest m = require_dataset(a.dataset);
    const fs::path out = out_dir(cfg);
    std::vector<FileResult> results(m.images.size());
    const int n = static_cast<int>(m.images.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        FileResult& r = results[i];
        try {
            const Image img = load_image(m.images[i].path);
            save_image(perturb(img, cfg.perturb.mode, cfg.perturb.epsilon, cfg.seed, i), out / m.images[i].name);
            r.width = img.width();
            r.height = img.height();
            r.ok = true;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    }
    ordered_json j = envelope("perturb", cfg, manifest_hash(m));
    ordered_json files = ordered_json::array();
    std::size_t failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok) {
            ++failures;
            io.err << "error: " << m.images[i].name << ": " << results[i].error << "\n";
        }
        files.push_back(file_entry(m.images[i], results[i]));
    }
    j["images"] = files;
    write_file(out / "perturb_summary.json", dump(j));
    return finish(failures, io.out, "perturbed " + std::to_string(results.size() - failures) + " images");
}

namespace {

struct PosePlan {
    std::vector<CameraPose> poses;
    DistanceMatrix matrix;
    Trajectory trajectory;
};

PosePlan plan_trajectory(const fs::path& poses_file, const RunConfig& cfg) {
    PosePlan p;
    p.poses = load_colmap_images(poses_file);
    if (p.poses.size() < 2) throw Error(ErrorKind::EmptyTrajectory, "need at least two poses");
    const auto poses = cfg.pose.normalize_translations ? normalize_translations(p.poses) : p.poses;
    p.matrix = pose_loss_matrix(poses, cfg.pose_weights());
    p.trajectory = order_trajectory(poses, p.matrix, cfg.pose.mode, cfg.pose.solver);
    return p;
}

ordered_json trajectory_json(const PosePlan& p, const RunConfig& cfg, const std::string& hash, bool with_matrix) {
    ordered_json j = envelope("order", cfg, hash);
    j["trajectory"] = to_json(p.trajectory);
    if (with_matrix) {
        ordered_json names = ordered_json::array();
        for (const auto& pose : p.poses) names.push_back(pose.view_id);
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < p.matrix.size(); ++i) {
            ordered_json row = ordered_json::array();
            for (int k = 0; k < p.matrix.size(); ++k) row.push_back(p.matrix(i, k));
            rows.push_back(row);
        }
        j["matrix"] = {{"views", names}, {"pose_loss", rows}};
    }
    return j;
}

} // namespace

int cmd_order(const OrderArgs& a, const RunConfig& cfg, Io io) {
    const PosePlan p = plan_trajectory(a.poses, cfg);
    const fs::path out = out_dir(cfg);
    write_file(out / "trajectory.json", dump(trajectory_json(p, cfg, hash_files({a.poses}), true)));
    io.out << "ordered " << p.trajectory.order.size() << " views, cost " << format_number(p.trajectory.total_cost)
           << (p.trajectory.exact ? " (exact)" : " (lin-kernighan)") << "\n";
    return kOk;
}

namespace {

/// 2x2 grid [LL LH; HL HH] of subband visualizations.
Image subband_grid(const Decomposition& d) {
    const auto ll = subband_to_image(gather_band(d, Subband::LL)).image;
    const int w = ll.width();
    const int h = ll.height();
    Image grid(2 * w, 2 * h);
    const Subband order[4] = {Subband::LL, Subband::LH, Subband::HL, Subband::HH};
    for (int q = 0; q < 4; ++q) {
        const Image tile = subband_to_image(gather_band(d, order[q])).image;
        const int ox = (q % 2) * w;
        const int oy = (q / 2) * h;
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) grid.set(c, ox + x, oy + y, tile.at(c, x, y));
    }
    return grid;
}

std::optional<double> band_rate(const MatchReport& r, Subband b) {
    const auto it = r.bands.find(b);
    if (it == r.bands.end() || !it->second.summary) return std::nullopt;
    return it->second.summary->rate;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? number(*v) : ordered_json(nullptr); }

} // namespace

int cmd_analyze(const AnalyzeArgs& a, const RunConfig& cfg, Io io) {
    const DatasetManifest m = require_dataset(a.dataset);
    const PosePlan plan = plan_trajectory(a.poses, cfg);
    {
        std::set<std::string> posed;
        for (const auto& p : plan.poses) {
            if (!m.find(p.view_id)) throw Error(ErrorKind::SchemaError, "pose references unknown image " + p.view_id);
            posed.insert(p.view_id);
        }
        for (const auto& e : m.images) {
            if (!posed.count(e.name)) throw Error(ErrorKind::SchemaError, "image without a pose: " + e.name);
        }
    }
    std::vector<fs::path> extra{a.poses};
    if (a.matches) extra.push_back(*a.matches);
    std::string hash = manifest_hash(m, extra);
    std::optional<DatasetManifest> cmp;
    if (a.compare) {
        cmp = require_dataset(*a.compare);
        hash = manifest_hash(m, extra) + "-" + manifest_hash(*cmp);
    }
    const fs::path out = out_dir(cfg);
    write_file(out / "trajectory.json", dump(trajectory_json(plan, cfg, hash, true)));

    // Load in trajectory order; unreadable views are dropped and reported.
    std::vector<std::string> names;
    std::vector<Image> images;
    std::vector<std::string> problems;
    for (const auto& name : plan.trajectory.order) {
        try {
            images.push_back(load_image(m.find(name)->path));
            names.push_back(name);
        } catch (const Error& e) {
            problems.push_back(name + ": " + e.what());
            io.err << "error: " << name << ": " << e.what() << "\n";
        }
    }
    if (images.size() < 2) throw Error(ErrorKind::EmptyTrajectory, "fewer than two readable images");

    const MatchingOptions opts = cfg.matching_options();
    MatchReport report = build_match_report(images, names, opts);
    ordered_json mj = envelope("analyze", cfg, hash);
    mj["matches"] = to_json(report);
    if (a.matches) {
        const auto pairs = ingest_matches(*a.matches);
        ordered_json ext;
        try {
            ext["rate"] = to_json(aggregate_rate(pairs, cfg.matching.denominator));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::AllPairsDegenerate) throw;
            ext["rate"] = nullptr;
            report.warnings.push_back("external matches: every pair is degenerate");
        }
        ordered_json rows = ordered_json::array();
        for (const auto& p : pairs) {
            rows.push_back({{"view_i", p.view_i},
                            {"view_j", p.view_j},
                            {"extracted_i", p.extracted_i},
                            {"extracted_j", p.extracted_j},
                            {"matched", p.matched}});
        }
        ext["pairs"] = rows;
        mj["external"] = ext;
    }
    mj["unreadable"] = problems;
    write_file(out / "match_report.json", dump(mj));
    write_file(out / "match_report.csv", match_csv(report));

    std::vector<std::pair<std::string, EnergyReport>> energies;
    ordered_json ej = envelope("analyze", cfg, hash);
    ordered_json views = ordered_json::array();
    std::array<double, 4> mean{};
    int counted = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        ordered_json v;
        v["name"] = names[i];
        try {
            const EnergyReport r = energy_report(images[i]);
            energies.emplace_back(names[i], r);
            v["energy"] = to_json(r);
            for (int b = 0; b < 4; ++b) mean[b] += r.mean[b];
            ++counted;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroEnergy) throw;
            v["energy"] = nullptr;
        }
        views.push_back(v);
    }
    ordered_json dataset_mean;
    for (int b = 0; b < 4; ++b) {
        dataset_mean[std::string(to_string(static_cast<Subband>(b)))] = counted ? mean[b] / counted : 0.0;
    }
    ej["dataset_mean"] = dataset_mean;
    ej["views"] = views;
    write_file(out / "energy_report.json", dump(ej));
    write_file(out / "energy_report.csv", energy_csv(energies));

    const int grids = std::min<int>(std::max(0, a.grid_views), static_cast<int>(images.size()));
    if (grids > 0) fs::create_directories(out / "subbands");
    for (int i = 0; i < grids; ++i) {
        const fs::path stem = fs::path(names[i]).stem();
        save_png(subband_grid(dwt2(images[i])), out / "subbands" / (stem.string() + "_subbands.png"));
    }

    if (cmp) {
        std::vector<Image> pert;
        std::vector<std::string> pert_names;
        for (const auto& name : names) {
            const ManifestEntry* e = cmp->find(name);
            if (!e) throw Error(ErrorKind::SchemaError, "comparison dataset lacks " + name);
            pert.push_back(load_image(e->path));
            pert_names.push_back(name);
        }
        const MatchReport pr = build_match_report(pert, pert_names, opts);
        ordered_json cj = envelope("analyze", cfg, hash);
        cj["matches"] = to_json(pr);
        write_file(out / "match_report_compare.json", dump(cj));

        ordered_json dj = envelope("analyze", cfg, hash);
        const auto ll_a = band_rate(report, Subband::LL);
        const auto ll_b = band_rate(pr, Subband::LL);
        dj["clean"] = {{"LL", optional_number(ll_a)}, {"high", optional_number(report.high_rate)}};
        dj["perturbed"] = {{"LL", optional_number(ll_b)}, {"high", optional_number(pr.high_rate)}};
        std::optional<double> ll_drop, high_drop;
        if (ll_a && ll_b) ll_drop = *ll_a - *ll_b;
        if (report.high_rate && pr.high_rate) high_drop = *report.high_rate - *pr.high_rate;
        dj["drop"] = {{"LL", optional_number(ll_drop)}, {"high", optional_number(high_drop)}};
        dj["high_drop_exceeds_ll_drop"] =
            (ll_drop && high_drop) ? ordered_json(*high_drop > *ll_drop) : ordered_json(nullptr);
        write_file(out / "match_diff.json", dump(dj));
        if (ll_drop && high_drop) {
            io.out << "rate drop: LL " << format_number(*ll_drop) << ", high " << format_number(*high_drop) << "\n";
        }
    }
    for (const auto& w : report.warnings) io.err << "warning: " << w << "\n";
    return finish(problems.size(), io.out,
                  "analyzed " + std::to_string(images.size()) + " views along the trajectory");
}

int cmd_scaleloss(const ScaleLossArgs& a, const RunConfig& cfg, Io io) {
    const GaussianCloud cloud = load_gaussian_ply(a.ply);
    const ScaleLossReport r = scale_loss(cloud, cfg.scale.tau, cfg.scale.lambda);
    const fs::path out = out_dir(cfg);
    ordered_json j = envelope("scaleloss", cfg, hash_files({a.ply}));
    j["scale_loss"] = to_json(r);
    write_file(out / "scale_loss.json", dump(j));
    if (a.write_nu_csv) write_file(out / "nu.csv", nu_csv(r));
    io.out << "gaussians " << r.nu.size() << ", mean loss " << format_number(r.mean_loss) << ", above tau "
           << r.count_above_tau << ", max nu " << format_number(r.max_nu) << "\n";
    return kOk;
}

namespace {

struct RunOutcome {
    std::string name;
    FitResult result;
};

View view_offset(int v, double shift) { return View{{(v % 2) * shift, (v / 2) * shift}}; }

} // namespace

int cmd_minisplat(const RunConfig& cfg, Io io) {
    const auto& mc = cfg.minisplat;
    std::vector<TargetView> clean;
    MiniSplatScene init;
    if (mc.scene == SceneKind::Smooth) {
        MiniSplatScene gt = synthetic_splat_scene(mc.gaussians, mc.width, mc.height, cfg.seed);
        gt.background = mc.background;
        for (int v = 0; v < mc.views; ++v) {
            const View view = view_offset(v, mc.view_shift);
            clean.push_back({render(gt, view), view});
        }
        init = make_initial_scene(mc.gaussians, mc.width, mc.height, cfg.seed + 1, mc.background);
    } else {
        const Image bar = thin_bar_image(mc.width, mc.height);
        for (int v = 0; v < mc.views; ++v) clean.push_back({bar, {}});
        init = thin_bar_initial_scene(mc.gaussians, mc.width, mc.height, cfg.seed + 1);
        init.background = mc.background;
    }
    TrainConfig train = mc.train;
    train.seed = cfg.seed;
    const Image& reference = clean.front().image;

    std::vector<std::pair<std::string, std::vector<TargetView>>> runs;
    if (mc.experiment == Experiment::Fit) {
        runs.emplace_back("fit", clean);
    } else {
        std::vector<TargetView> perturbed, filtered;
        for (std::size_t v = 0; v < clean.size(); ++v) {
            const Image p = perturb(clean[v].image, cfg.perturb.mode, cfg.perturb.epsilon, cfg.seed, static_cast<int>(v));
            perturbed.push_back({p, clean[v].view});
            filtered.push_back({filter_high_freq(p, cfg.wavelet_level), clean[v].view});
        }
        runs.emplace_back("clean", clean);
        runs.emplace_back("perturbed", std::move(perturbed));
        runs.emplace_back("filtered", std::move(filtered));
    }

    const fs::path out = out_dir(cfg);
    const std::string hash = hash_text(dump(to_json(cfg)));
    ordered_json summary = envelope("minisplat", cfg, hash);
    ordered_json runs_json = ordered_json::object();
    std::map<std::string, double> final_psnr;
    for (const auto& [name, targets] : runs) {
        const FitResult r = fit(init, targets, train, reference);
        const fs::path dir = out / name;
        write_file(dir / "trace.csv", trace_csv(r.trace));
        ordered_json ck = envelope("minisplat", cfg, hash);
        ck["run"] = name;
        ck["seed"] = cfg.seed;
        ck["scene"] = to_json(r.scene);
        write_file(dir / "checkpoint.json", dump(ck));
        save_png(render(r.scene, targets.front().view), dir / "render.png");

        ordered_json rj;
        rj["psnr_to_clean"] = number(r.reference->psnr);
        rj["ssim_to_clean"] = number(r.reference->ssim);
        ordered_json per = ordered_json::array();
        for (const auto& t : r.per_target) per.push_back({{"psnr", number(t.psnr)}, {"ssim", number(t.ssim)}});
        rj["per_target"] = per;
        rj["max_nu"] = r.max_nu;
        rj["final_total_loss"] = r.trace.back().total;
        runs_json[name] = rj;
        final_psnr[name] = r.reference->psnr;
        io.out << "run=" << name << " psnr=" << format_number(r.reference->psnr)
               << " ssim=" << format_number(r.reference->ssim) << " max_nu=" << format_number(r.max_nu) << "\n";
    }
    summary["runs"] = runs_json;
    if (mc.experiment == Experiment::DefenseAB) {
        summary["filtered_minus_perturbed_psnr"] = number(final_psnr["filtered"] - final_psnr["perturbed"]);
    }
    write_file(out / "minisplat_summary.json", dump(summary));
    return kOk;
}

} // namespace splatguard::cli
