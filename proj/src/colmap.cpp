#include "splatguard/error.hpp"
#include "splatguard/pose.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace splatguard {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<CameraPose> parse_colmap_images(const std::string& text) {
    std::vector<std::pair<int, std::string>> lines;
    {
        std::istringstream in(text);
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            const std::string t = trim(line);
            if (!t.empty() && t[0] == '#') continue;
            lines.emplace_back(no, t);
        }
    }

    std::vector<CameraPose> poses;
    std::set<std::string> seen;
    std::size_t i = 0;
    while (i < lines.size()) {
        const auto& [no, t] = lines[i];
        if (t.empty()) {
            ++i;
            continue;
        }
        std::istringstream ls(t);
        long long image_id = 0;
        long long camera_id = 0;
        double qw, qx, qy, qz, tx, ty, tz;
        if (!(ls >> image_id >> qw >> qx >> qy >> qz >> tx >> ty >> tz >> camera_id)) {
            throw Error(ErrorKind::SchemaError, "images.txt line " + std::to_string(no) +
                                                    ": expected IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME");
        }
        std::string name;
        std::getline(ls, name);
        name = trim(name);
        if (name.empty()) throw Error(ErrorKind::SchemaError, "images.txt line " + std::to_string(no) + ": missing NAME");
        if (!seen.insert(name).second) {
            throw Error(ErrorKind::SchemaError, "images.txt line " + std::to_string(no) + ": duplicate image name " + name);
        }
        CameraPose p;
        try {
            p.rotation = rotation_from_quaternion(qw, qx, qy, qz);
        } catch (const Error& e) {
            throw Error(ErrorKind::SchemaError, "images.txt line " + std::to_string(no) + ": " + e.what());
        }
        p.translation = Eigen::Vector3d(tx, ty, tz);
        p.view_id = name;
        poses.push_back(std::move(p));
        // The following line holds the POINTS2D list, possibly empty.
        i += 2;
    }
    return poses;
}

std::vector<CameraPose> load_colmap_images(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_colmap_images(ss.str());
}

} // namespace splatguard
