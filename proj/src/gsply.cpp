#include "splatguard/gsply.hpp"

#include "splatguard/error.hpp"
#include "splatguard/numeric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace splatguard {

std::array<double, 3> GaussianCloud::activated_scales(std::size_t i) const {
    return {std::exp(log_scales[i][0]), std::exp(log_scales[i][1]), std::exp(log_scales[i][2])};
}

namespace {

enum class ScalarType { I8, U8, I16, U16, I32, U32, F32, F64 };

std::optional<ScalarType> parse_type(const std::string& t) {
    static const std::map<std::string, ScalarType> kTypes{
        {"char", ScalarType::I8},    {"int8", ScalarType::I8},     {"uchar", ScalarType::U8},
        {"uint8", ScalarType::U8},   {"short", ScalarType::I16},   {"int16", ScalarType::I16},
        {"ushort", ScalarType::U16}, {"uint16", ScalarType::U16},  {"int", ScalarType::I32},
        {"int32", ScalarType::I32},  {"uint", ScalarType::U32},    {"uint32", ScalarType::U32},
        {"float", ScalarType::F32},  {"float32", ScalarType::F32}, {"double", ScalarType::F64},
        {"float64", ScalarType::F64},
    };
    const auto it = kTypes.find(t);
    if (it == kTypes.end()) return std::nullopt;
    return it->second;
}

std::size_t type_size(ScalarType t) {
    switch (t) {
    case ScalarType::I8:
    case ScalarType::U8: return 1;
    case ScalarType::I16:
    case ScalarType::U16: return 2;
    case ScalarType::I32:
    case ScalarType::U32:
    case ScalarType::F32: return 4;
    case ScalarType::F64: return 8;
    }
    return 0;
}

struct Property {
    std::string name;
    ScalarType type = ScalarType::F32;
    bool is_list = false;
    ScalarType count_type = ScalarType::U8;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> props;
};

// Little-endian binary cursor over the PLY body.
class BinaryReader {
public:
    BinaryReader(const std::string& bytes, std::size_t offset) : bytes_(bytes), pos_(offset) {}

    double read(ScalarType t) {
        const std::size_t n = type_size(t);
        if (pos_ + n > bytes_.size()) throw Error(ErrorKind::CorruptData, "PLY body is truncated");
        const char* p = bytes_.data() + pos_;
        pos_ += n;
        static_assert(std::endian::native == std::endian::little, "binary PLY reader assumes a little-endian host");
        switch (t) {
        case ScalarType::I8: return static_cast<double>(static_cast<std::int8_t>(*p));
        case ScalarType::U8: return static_cast<double>(static_cast<std::uint8_t>(*p));
        case ScalarType::I16: return load<std::int16_t>(p);
        case ScalarType::U16: return load<std::uint16_t>(p);
        case ScalarType::I32: return load<std::int32_t>(p);
        case ScalarType::U32: return load<std::uint32_t>(p);
        case ScalarType::F32: return load<float>(p);
        case ScalarType::F64: return load<double>(p);
        }
        return 0.0;
    }

private:
    template <typename T>
    static double load(const char* p) {
        T v;
        std::memcpy(&v, p, sizeof(T));
        return static_cast<double>(v);
    }

    const std::string& bytes_;
    std::size_t pos_;
};

class AsciiReader {
public:
    AsciiReader(const std::string& bytes, std::size_t offset) : in_(bytes.substr(offset)) {}

    double read(ScalarType) {
        std::string tok;
        if (!(in_ >> tok)) throw Error(ErrorKind::CorruptData, "PLY body is truncated");
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorKind::CorruptData, "bad PLY value '" + tok + "'");
        }
    }

private:
    std::istringstream in_;
};

constexpr std::array<const char*, 14> kRequired{
    "x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "opacity", "scale_0", "scale_1", "scale_2",
    "rot_0", "rot_1", "rot_2", "rot_3",
};

template <typename Reader>
GaussianCloud read_body(Reader& reader, const std::vector<Element>& elements) {
    GaussianCloud cloud;
    for (const auto& el : elements) {
        const bool is_vertex = el.name == "vertex";
        std::array<int, kRequired.size()> slot{};
        if (is_vertex) {
            for (std::size_t r = 0; r < kRequired.size(); ++r) {
                const auto it = std::find_if(el.props.begin(), el.props.end(),
                                             [&](const Property& p) { return p.name == kRequired[r]; });
                if (it == el.props.end()) throw Error(ErrorKind::MissingProperty, kRequired[r]);
                if (it->is_list) throw Error(ErrorKind::CorruptData, std::string(kRequired[r]) + " is a list property");
                slot[r] = static_cast<int>(it - el.props.begin());
            }
            cloud.position.resize(el.count);
            cloud.log_scales.resize(el.count);
            cloud.rotation.resize(el.count);
            cloud.opacity_logit.resize(el.count);
            cloud.color_dc.resize(el.count);
        }
        std::vector<double> values(el.props.size());
        for (std::size_t i = 0; i < el.count; ++i) {
            for (std::size_t k = 0; k < el.props.size(); ++k) {
                const Property& p = el.props[k];
                if (p.is_list) {
                    const double n = reader.read(p.count_type);
                    if (n < 0) throw Error(ErrorKind::CorruptData, "negative list length");
                    for (long long e = 0; e < static_cast<long long>(n); ++e) reader.read(p.type);
                    values[k] = 0.0;
                } else {
                    values[k] = reader.read(p.type);
                }
            }
            if (!is_vertex) continue;
            const auto v = [&](int r) { return values[slot[r]]; };
            cloud.position[i] = {v(0), v(1), v(2)};
            cloud.color_dc[i] = {v(3), v(4), v(5)};
            cloud.opacity_logit[i] = v(6);
            cloud.log_scales[i] = {v(7), v(8), v(9)};
            cloud.rotation[i] = {v(10), v(11), v(12), v(13)};
        }
    }
    return cloud;
}

} // namespace

GaussianCloud parse_gaussian_ply(const std::string& bytes) {
    if (bytes.compare(0, 3, "ply") != 0 || (bytes.size() > 3 && bytes[3] != '\n' && bytes[3] != '\r')) {
        throw Error(ErrorKind::NotPly, "missing 'ply' magic");
    }
    const std::size_t end = bytes.find("end_header");
    if (end == std::string::npos) throw Error(ErrorKind::CorruptData, "PLY header has no end_header");
    std::size_t body = bytes.find('\n', end);
    if (body == std::string::npos) throw Error(ErrorKind::CorruptData, "PLY header is truncated");
    ++body;

    std::istringstream header(bytes.substr(0, end));
    std::string line;
    std::string format;
    std::vector<Element> elements;
    std::getline(header, line); // "ply"
    int line_no = 1;
    while (std::getline(header, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "comment" || kw == "obj_info") continue;
        if (kw == "format") {
            std::string version;
            ls >> format >> version;
        } else if (kw == "element") {
            Element el;
            long long count = -1;
            if (!(ls >> el.name >> count) || count < 0) {
                throw Error(ErrorKind::CorruptData, "bad element line " + std::to_string(line_no));
            }
            el.count = static_cast<std::size_t>(count);
            elements.push_back(std::move(el));
        } else if (kw == "property") {
            if (elements.empty()) throw Error(ErrorKind::CorruptData, "property before element");
            Property p;
            std::string t;
            ls >> t;
            if (t == "list") {
                std::string ct, it;
                ls >> ct >> it >> p.name;
                const auto c = parse_type(ct);
                const auto i = parse_type(it);
                if (!c || !i) throw Error(ErrorKind::CorruptData, "unknown list type on line " + std::to_string(line_no));
                p.is_list = true;
                p.count_type = *c;
                p.type = *i;
            } else {
                ls >> p.name;
                const auto ty = parse_type(t);
                if (!ty) throw Error(ErrorKind::CorruptData, "unknown property type '" + t + "'");
                p.type = *ty;
            }
            elements.back().props.push_back(std::move(p));
        } else {
            throw Error(ErrorKind::CorruptData, "unexpected header keyword '" + kw + "'");
        }
    }

    const auto vertex = std::find_if(elements.begin(), elements.end(), [](const Element& e) { return e.name == "vertex"; });
    if (vertex == elements.end()) throw Error(ErrorKind::MissingProperty, "vertex");

    GaussianCloud cloud;
    if (format == "ascii") {
        AsciiReader r(bytes, body);
        cloud = read_body(r, elements);
    } else if (format == "binary_little_endian") {
        BinaryReader r(bytes, body);
        cloud = read_body(r, elements);
    } else if (format == "binary_big_endian") {
        throw Error(ErrorKind::UnsupportedEncoding, "big-endian PLY is not supported");
    } else {
        throw Error(ErrorKind::CorruptData, "unknown PLY format '" + format + "'");
    }
    if (cloud.count() == 0) throw Error(ErrorKind::InvalidArgument, "PLY contains no Gaussians");
    return cloud;
}

GaussianCloud load_gaussian_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_gaussian_ply(bytes);
}

double normalized_variance(const std::array<double, 3>& s) {
    for (double v : s) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::NonPositiveScale, "scales must be finite and > 0");
    }
    const double mean = (s[0] + s[1] + s[2]) / 3.0;
    const double d0 = s[0] - mean;
    const double d1 = s[1] - mean;
    const double d2 = s[2] - mean;
    // Sample variance (n - 1 = 2): this is what makes (1,1,10) come out at 1.6875.
    const double var = (d0 * d0 + d1 * d1 + d2 * d2) / 2.0;
    return var / (mean * mean);
}

std::array<double, 3> normalized_variance_gradient(const std::array<double, 3>& s) {
    const double mean = (s[0] + s[1] + s[2]) / 3.0;
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= 2.0;
    const double m2 = mean * mean;
    const double common = 2.0 * var / (3.0 * m2 * mean);
    return {(s[0] - mean) / m2 - common, (s[1] - mean) / m2 - common, (s[2] - mean) / m2 - common};
}

ScaleLossReport scale_loss(const GaussianCloud& cloud, double tau, double lambda) {
    if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be >= 0");
    if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be >= 0");
    if (cloud.count() == 0) throw Error(ErrorKind::InvalidArgument, "empty Gaussian cloud");
    const long long n = static_cast<long long>(cloud.count());
    ScaleLossReport r;
    r.tau = tau;
    r.lambda = lambda;
    r.nu.resize(cloud.count());
    r.loss.resize(cloud.count());
    bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
    for (long long i = 0; i < n; ++i) {
        const auto s = cloud.activated_scales(static_cast<std::size_t>(i));
        if (!(s[0] > 0.0 && s[1] > 0.0 && s[2] > 0.0) || !std::isfinite(s[0] + s[1] + s[2])) {
            bad = true;
            continue;
        }
        r.nu[i] = normalized_variance(s);
        r.loss[i] = std::max(0.0, r.nu[i] - tau);
    }
    if (bad) throw Error(ErrorKind::NonPositiveScale, "activated scales must be finite and > 0");
    r.mean_loss = lambda * pairwise_sum(r.loss) / static_cast<double>(n);
    for (std::size_t i = 0; i < r.nu.size(); ++i) {
        const double v = r.nu[i];
        if (v > tau) ++r.count_above_tau;
        r.max_nu = std::max(r.max_nu, v);
        const int bin = v >= kHistogramRange ? kHistogramBins
                                             : static_cast<int>(std::floor(v / kHistogramRange * kHistogramBins));
        ++r.histogram[std::clamp(bin, 0, kHistogramBins)];
    }
    return r;
}

} // namespace splatguard
