#pragma once

#include "splatguard/config.hpp"
#include "splatguard/gsply.hpp"
#include "splatguard/matching.hpp"
#include "splatguard/minisplat.hpp"
#include "splatguard/tsp.hpp"
#include "splatguard/wavelet.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splatguard {

using nlohmann::ordered_json;

struct ManifestEntry {
    std::string name;
    std::filesystem::path path;
    int width = 0;
    int height = 0;
};

/// Images of a dataset directory, sorted by file name.
struct DatasetManifest {
    std::filesystem::path root;
    std::vector<ManifestEntry> images;
    std::optional<std::vector<std::string>> trajectory;

    const ManifestEntry* find(std::string_view name) const;
};

/// Lists the PNG/PPM files directly inside `dir`. Throws FileNotFound when the
/// directory does not exist.
DatasetManifest scan_dataset(const std::filesystem::path& dir);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Hash over every entry's name and file bytes, plus any extra named inputs
/// (pose files, match CSVs), as 16 lowercase hex digits.
std::string manifest_hash(const DatasetManifest& m,
                          const std::vector<std::filesystem::path>& extra_inputs = {});
std::string hash_files(const std::vector<std::filesystem::path>& files);
std::string hash_text(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate and write in binary mode.
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Finite values as numbers; inf and nan as the strings "inf", "-inf", "nan".
ordered_json number(double v);
/// Shortest round-trip text for CSV cells, with the same inf/nan spelling.
std::string format_number(double v);

std::string dump(const ordered_json& j);

/// Standard envelope: {"tool", "command", "config", "manifest_hash", ...body}.
ordered_json envelope(std::string_view command, const RunConfig& cfg, const std::string& hash);

ordered_json to_json(const EnergyReport& r);
std::string energy_csv(const std::vector<std::pair<std::string, EnergyReport>>& rows);

ordered_json to_json(const RateSummary& s);
ordered_json to_json(const MatchReport& r);
std::string match_csv(const MatchReport& r);

ordered_json to_json(const Trajectory& t);

ordered_json to_json(const ScaleLossReport& r);
std::string nu_csv(const ScaleLossReport& r);

std::string trace_csv(const std::vector<TraceRow>& trace);
ordered_json to_json(const MiniSplatScene& s);

} // namespace splatguard
