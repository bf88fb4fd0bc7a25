#include "dbscanpp/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "dbscanpp/rng.hpp"

namespace dbscanpp {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string_view trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return {s.data() + b, e - b};
}

bool parse_double(std::string_view text, double& out) {
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end && !text.empty();
}

std::size_t pick_component(Xoshiro256& rng, const std::vector<double>& weights) {
    const double u = rng.next_double();
    double cumulative = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        cumulative += weights[k];
        if (u < cumulative) return k;
    }
    return weights.size() - 1;
}

void check_weights(const std::vector<double>& weights, std::size_t k) {
    if (weights.size() != k)
        throw std::invalid_argument("mixture: one weight per component required");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("mixture: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("mixture: weights must sum to 1");
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path, bool has_header,
                        const std::optional<std::string>& label_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path.string());

    std::vector<std::string> header;
    std::string line;
    std::size_t line_no = 0;
    if (has_header) {
        if (!std::getline(in, line))
            throw std::runtime_error("CSV file is empty: " + path.string());
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        header = split_row(line);
    }

    // Resolve the label column: digits mean a 0-based index, anything else
    // is looked up in the header.
    std::optional<std::size_t> label_index;
    if (label_column) {
        std::size_t parsed = 0;
        const auto text = trimmed(*label_column);
        const auto [ptr, ec] =
            std::from_chars(text.data(), text.data() + text.size(), parsed);
        if (ec == std::errc() && ptr == text.data() + text.size()) {
            label_index = parsed;
        } else {
            if (!has_header)
                throw std::runtime_error(
                    "label column given by name but the CSV has no header");
            for (std::size_t c = 0; c < header.size(); ++c)
                if (std::string(trimmed(header[c])) == *label_column) label_index = c;
            if (!label_index)
                throw std::runtime_error("label column not found: " + *label_column);
        }
    }

    std::vector<double> coords;
    std::vector<std::int32_t> truth_ids;
    std::unordered_map<std::string, std::int32_t> truth_codes;
    std::size_t columns = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_row(line);
        if (columns == 0) {
            columns = cells.size();
            if (label_index && *label_index >= columns)
                throw std::runtime_error("label column index out of range");
        } else if (cells.size() != columns) {
            throw std::runtime_error("ragged CSV row at line " +
                                     std::to_string(line_no));
        }
        for (std::size_t c = 0; c < columns; ++c) {
            if (label_index && c == *label_index) {
                const std::string key(trimmed(cells[c]));
                const auto [it, fresh] = truth_codes.emplace(
                    key, static_cast<std::int32_t>(truth_codes.size()));
                truth_ids.push_back(it->second);
                continue;
            }
            double value = 0.0;
            if (!parse_double(trimmed(cells[c]), value))
                throw std::runtime_error("non-numeric cell at line " +
                                         std::to_string(line_no) + ", column " +
                                         std::to_string(c + 1));
            coords.push_back(value);
        }
    }

    if (coords.empty()) throw std::runtime_error("CSV has no data rows: " + path.string());
    const std::size_t feature_columns = label_index ? columns - 1 : columns;
    if (feature_columns == 0)
        throw std::runtime_error("CSV has no feature columns: " + path.string());

    LabeledDataset result{Dataset(std::move(coords), feature_columns), std::nullopt};
    if (label_index) result.truth = labels_from_ids(std::move(truth_ids));
    return result;
}

void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::optional<ClusterLabels>& truth) {
    if (truth && truth->size() != data.size())
        throw std::invalid_argument("write_csv: truth length mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path.string());

    char buffer[40];
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        for (std::size_t d = 0; d < p.size(); ++d) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", p[d]);
            if (d) out << ',';
            out << buffer;
        }
        if (truth) out << ',' << truth->ids[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing CSV file: " + path.string());
}

LabeledDataset gaussian_mixture(std::size_t n, std::size_t dim,
                                const std::vector<std::vector<double>>& means,
                                const std::vector<double>& scales,
                                const std::vector<double>& weights,
                                std::uint64_t seed) {
    const std::size_t k = means.size();
    if (k == 0) throw std::invalid_argument("gaussian_mixture: needs >= 1 component");
    check_weights(weights, k);
    if (scales.size() != k)
        throw std::invalid_argument("gaussian_mixture: one scale per component");
    for (double s : scales)
        if (s < 0.0) throw std::invalid_argument("gaussian_mixture: scales must be >= 0");
    for (const auto& mean : means)
        if (mean.size() != dim)
            throw std::invalid_argument("gaussian_mixture: mean dimension mismatch");
    if (n == 0) throw std::invalid_argument("gaussian_mixture: n must be >= 1");

    Xoshiro256 rng(seed);
    std::vector<double> coords(n * dim);
    std::vector<std::int32_t> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t component = pick_component(rng, weights);
        truth[i] = static_cast<std::int32_t>(component);
        for (std::size_t d = 0; d < dim; ++d)
            coords[i * dim + d] =
                means[component][d] + scales[component] * rng.next_normal();
    }
    return LabeledDataset{Dataset(std::move(coords), dim),
                          labels_from_ids(std::move(truth))};
}

LabeledDataset uniform_mixture(std::size_t n, std::size_t dim,
                               const std::vector<Box>& boxes,
                               const std::vector<double>& weights,
                               std::uint64_t seed) {
    const std::size_t k = boxes.size();
    if (k == 0) throw std::invalid_argument("uniform_mixture: needs >= 1 box");
    check_weights(weights, k);
    for (const auto& box : boxes) {
        if (box.lower.size() != dim || box.upper.size() != dim)
            throw std::invalid_argument("uniform_mixture: box dimension mismatch");
        for (std::size_t d = 0; d < dim; ++d)
            if (box.lower[d] > box.upper[d])
                throw std::invalid_argument("uniform_mixture: degenerate box (lower > upper)");
    }
    if (n == 0) throw std::invalid_argument("uniform_mixture: n must be >= 1");

    Xoshiro256 rng(seed);
    std::vector<double> coords(n * dim);
    std::vector<std::int32_t> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t component = pick_component(rng, weights);
        truth[i] = static_cast<std::int32_t>(component);
        const Box& box = boxes[component];
        for (std::size_t d = 0; d < dim; ++d)
            coords[i * dim + d] =
                box.lower[d] + rng.next_double() * (box.upper[d] - box.lower[d]);
    }
    return LabeledDataset{Dataset(std::move(coords), dim),
                          labels_from_ids(std::move(truth))};
}

namespace {

// Reads one whitespace-delimited PPM header token, skipping '#' comments.
// Consumes exactly one trailing whitespace byte, as the format requires.
std::string ppm_token(std::istream& in) {
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#')
            while (c != EOF && c != '\n') c = in.get();
        c = in.get();
    }
    std::string token;
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return token;
}

}  // namespace

ImageDataset load_image_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image: " + path.string());

    if (ppm_token(in) != "P6")
        throw std::runtime_error("not a binary PPM (P6) file: " + path.string());

    auto header_number = [&](const char* what) {
        const std::string token = ppm_token(in);
        std::size_t value = 0;
        const auto [ptr, ec] =
            std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size() || value == 0)
            throw std::runtime_error(std::string("bad PPM ") + what + ": " +
                                     path.string());
        return value;
    };
    const std::size_t width = header_number("width");
    const std::size_t height = header_number("height");
    const std::size_t maxval = header_number("maxval");
    if (maxval != 255)
        throw std::runtime_error("only 8-bit PPM images are supported: " + path.string());

    std::vector<char> payload(width * height * 3);
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size())
        throw std::runtime_error("truncated PPM payload: " + path.string());

    std::vector<double> coords(width * height * 5);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const std::size_t pixel = y * width + x;
            double* out = coords.data() + pixel * 5;
            out[0] = static_cast<double>(x);
            out[1] = static_cast<double>(y);
            for (std::size_t ch = 0; ch < 3; ++ch)
                out[2 + ch] = static_cast<double>(
                    static_cast<unsigned char>(payload[pixel * 3 + ch]));
        }
    }
    return ImageDataset{Dataset(std::move(coords), 5), width, height};
}

void labels_to_image(const ClusterLabels& labels, std::size_t width,
                     std::size_t height, const std::filesystem::path& path) {
    if (labels.size() != width * height)
        throw std::invalid_argument("labels_to_image: label count != width * height");

    static constexpr unsigned char kPalette[][3] = {
        {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
        {245, 130, 48}, {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
        {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
        {170, 110, 40}, {255, 250, 200}, {128, 0, 0},    {170, 255, 195},
        {128, 128, 0},  {255, 215, 180}, {0, 0, 128},    {128, 128, 128}};
    constexpr std::size_t kPaletteSize = std::size(kPalette);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image: " + path.string());
    out << "P6\n" << width << ' ' << height << "\n255\n";
    std::vector<char> payload(width * height * 3);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::int32_t id = labels.ids[i];
        for (std::size_t ch = 0; ch < 3; ++ch)
            payload[i * 3 + ch] =
                id == kNoise
                    ? 0
                    : static_cast<char>(kPalette[static_cast<std::size_t>(id) %
                                                 kPaletteSize][ch]);
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("failed writing image: " + path.string());
}

Dataset standardize(const Dataset& data) {
    const std::size_t n = data.size();
    const std::size_t dim = data.dim();
    std::vector<double> mean(dim, 0.0), var(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = data.point(i);
        for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
    }
    for (std::size_t d = 0; d < dim; ++d) mean[d] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = data.point(i);
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = p[d] - mean[d];
            var[d] += diff * diff;
        }
    }
    std::vector<double> coords(n * dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const double sd = std::sqrt(var[d] / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double value = data.coords()[i * dim + d];
            coords[i * dim + d] = sd > 0.0 ? (value - mean[d]) / sd : 0.0;
        }
    }
    return Dataset(std::move(coords), dim);
}

std::string dataset_metadata_json(const Dataset& data, bool has_truth,
                                  const std::string& source) {
    nlohmann::json j;
    j["n"] = data.size();
    j["d"] = data.dim();
    j["has_truth"] = has_truth;
    j["source"] = source;
    return j.dump(2);
}

}  // namespace dbscanpp
