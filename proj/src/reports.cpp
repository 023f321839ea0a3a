#include "splatguard/reports.hpp"

#include "splatguard/error.hpp"
#include "splatguard/image_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace splatguard {

namespace fs = std::filesystem;

const ManifestEntry* DatasetManifest::find(std::string_view name) const {
    for (const auto& e : images)
        if (e.name == name) return &e;
    return nullptr;
}

DatasetManifest scan_dataset(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::FileNotFound, "dataset directory not found: " + dir.string());
    DatasetManifest m;
    m.root = dir;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || !is_supported_image(entry.path())) continue;
        m.images.push_back({entry.path().filename().string(), entry.path(), 0, 0});
    }
    std::sort(m.images.begin(), m.images.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return m;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t mix_file(std::uint64_t h, const std::string& label, const fs::path& path) {
    h = fnv1a(label, h);
    h = fnv1a(std::string_view("\0", 1), h);
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) {
        h = fnv1a(read_file(path), h);
    } else {
        h = fnv1a("<missing>", h);
    }
    return fnv1a(std::string_view("\0", 1), h);
}

} // namespace

std::string manifest_hash(const DatasetManifest& m, const std::vector<fs::path>& extra_inputs) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& e : m.images) h = mix_file(h, e.name, e.path);
    for (const auto& p : extra_inputs) h = mix_file(h, p.filename().string(), p);
    return hex64(h);
}

std::string hash_files(const std::vector<fs::path>& files) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& p : files) h = mix_file(h, p.filename().string(), p);
    return hex64(h);
}

std::string hash_text(std::string_view bytes) { return hex64(fnv1a(bytes)); }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::string_view bytes) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

ordered_json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json envelope(std::string_view command, const RunConfig& cfg, const std::string& hash) {
    ordered_json j;
    j["tool"] = "splatguard";
    j["command"] = command;
    j["config"] = to_json(cfg);
    j["manifest_hash"] = hash;
    return j;
}

ordered_json to_json(const EnergyReport& r) {
    const auto fractions = [](const std::array<double, 4>& a) {
        ordered_json o;
        for (int b = 0; b < 4; ++b) o[std::string(to_string(static_cast<Subband>(b)))] = a[b];
        return o;
    };
    ordered_json j;
    j["mean"] = fractions(r.mean);
    ordered_json channels = ordered_json::array();
    for (int c = 0; c < Image::kChannels; ++c) {
        ordered_json ch;
        ch["channel"] = c;
        ch["zero_energy"] = static_cast<bool>(r.channel_zero[c]);
        ch["fractions"] = fractions(r.per_channel[c]);
        ch["energy"] = fractions(r.energy[c]);
        channels.push_back(ch);
    }
    j["channels"] = channels;
    return j;
}

std::string energy_csv(const std::vector<std::pair<std::string, EnergyReport>>& rows) {
    std::string out = "view,channel,LL,LH,HL,HH\n";
    for (const auto& [name, r] : rows) {
        const auto line = [&](const std::string& channel, const std::array<double, 4>& f) {
            out += name + "," + channel;
            for (double v : f) out += "," + format_number(v);
            out += "\n";
        };
        for (int c = 0; c < Image::kChannels; ++c) line(std::to_string(c), r.per_channel[c]);
        line("mean", r.mean);
    }
    return out;
}

ordered_json to_json(const RateSummary& s) {
    return {{"rate", s.rate}, {"pairs_used", s.pairs_used}, {"pairs_excluded", s.pairs_excluded}};
}

ordered_json to_json(const MatchReport& r) {
    ordered_json j;
    j["trajectory"] = r.trajectory;
    j["window"] = r.window;
    j["denominator"] = to_string(r.denominator);
    j["max_keypoints"] = r.max_keypoints;
    j["high_rate"] = r.high_rate ? ordered_json(*r.high_rate) : ordered_json(nullptr);
    ordered_json bands;
    for (const auto& [band, br] : r.bands) {
        ordered_json b;
        b["rate"] = br.summary ? to_json(*br.summary) : ordered_json(nullptr);
        b["empty_views"] = br.empty_views;
        ordered_json pairs = ordered_json::array();
        for (const auto& p : br.pairs) {
            pairs.push_back({{"view_i", p.view_i},
                             {"view_j", p.view_j},
                             {"extracted_i", p.extracted_i},
                             {"extracted_j", p.extracted_j},
                             {"matched", p.matched}});
        }
        b["pairs"] = pairs;
        bands[std::string(to_string(band))] = b;
    }
    j["bands"] = bands;
    j["warnings"] = r.warnings;
    return j;
}

std::string match_csv(const MatchReport& r) {
    std::string out = "band,view_i,view_j,extracted_i,extracted_j,matched,rate\n";
    for (const auto& [band, br] : r.bands) {
        for (const auto& p : br.pairs) {
            const bool usable = p.extracted_i > 0 && p.extracted_j > 0;
            out += std::string(to_string(band)) + "," + p.view_i + "," + p.view_j + "," +
                   std::to_string(p.extracted_i) + "," + std::to_string(p.extracted_j) + "," +
                   std::to_string(p.matched) + "," + (usable ? format_number(pair_rate(p, r.denominator)) : "") +
                   "\n";
        }
    }
    return out;
}

ordered_json to_json(const Trajectory& t) {
    ordered_json j;
    j["order"] = t.order;
    j["total_cost"] = t.total_cost;
    j["mode"] = t.mode == TourMode::OpenPath ? "open" : "closed";
    j["exact"] = t.exact;
    return j;
}

ordered_json to_json(const ScaleLossReport& r) {
    ordered_json j;
    j["count"] = r.nu.size();
    j["tau"] = r.tau;
    j["lambda"] = r.lambda;
    j["mean_loss"] = r.mean_loss;
    j["count_above_tau"] = r.count_above_tau;
    j["max_nu"] = r.max_nu;
    ordered_json hist;
    hist["range"] = {0.0, kHistogramRange};
    hist["bins"] = kHistogramBins;
    hist["counts"] = std::vector<std::size_t>(r.histogram.begin(), r.histogram.begin() + kHistogramBins);
    hist["overflow"] = r.histogram[kHistogramBins];
    j["histogram"] = hist;
    return j;
}

std::string nu_csv(const ScaleLossReport& r) {
    std::string out = "index,nu,loss\n";
    for (std::size_t i = 0; i < r.nu.size(); ++i) {
        out += std::to_string(i) + "," + format_number(r.nu[i]) + "," + format_number(r.loss[i]) + "\n";
    }
    return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string out = "iter,l1,scale_loss,total,psnr,ssim,max_nu\n";
    for (const auto& t : trace) {
        out += std::to_string(t.iter) + "," + format_number(t.l1) + "," + format_number(t.scale_loss) + "," +
               format_number(t.total) + "," + format_number(t.psnr) + "," + format_number(t.ssim) + "," +
               format_number(t.max_nu) + "\n";
    }
    return out;
}

ordered_json to_json(const MiniSplatScene& s) {
    ordered_json j;
    j["width"] = s.width;
    j["height"] = s.height;
    j["background"] = s.background;
    ordered_json gs = ordered_json::array();
    for (const auto& g : s.gaussians) {
        gs.push_back({{"position", g.position},
                      {"log_scales", g.log_scales},
                      {"rotation", g.rotation},
                      {"color_logit", g.color_logit},
                      {"opacity_logit", g.opacity_logit}});
    }
    j["gaussians"] = gs;
    return j;
}

} // namespace splatguard
