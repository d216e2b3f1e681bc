// SPDX-License-Identifier: Apache-2.0

#include "blockmerge/io.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "blockmerge/error.hpp"
#include "blockmerge/merge_v2.hpp"

namespace blockmerge {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

bool skippable(std::string_view line) {
    const auto tokens = tokenize(line);
    return tokens.empty() || tokens.front().front() == '#';
}

double to_double(std::string_view tok, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw Error(ErrorCode::ParseError, "expected a number, got '" + std::string(tok) + "'", line);
    }
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, "non-finite value '" + std::string(tok) + "'", line);
    }
    return v;
}

std::int64_t to_int(std::string_view tok, std::size_t line) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw Error(ErrorCode::ParseError, "expected an integer, got '" + std::string(tok) + "'", line);
    }
    return v;
}

std::uint8_t to_channel(std::string_view tok, std::size_t line) {
    const std::int64_t v = to_int(tok, line);
    if (v < 0 || v > 255) {
        throw Error(ErrorCode::ParseError, "colour channel out of [0,255]: " + std::string(tok), line);
    }
    return static_cast<std::uint8_t>(v);
}

InstanceLabel to_label(std::string_view tok, std::size_t line) {
    const std::int64_t v = to_int(tok, line);
    if (v < -1) {
        throw Error(ErrorCode::ParseError, "labels must be >= -1", line);
    }
    return InstanceLabel{v};
}

void append_double(std::string& out, double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), ptr);
}

void append_int(std::string& out, std::int64_t v) {
    std::array<char, 24> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), ptr);
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    return in;
}

PointCloud parse_tsv(std::istream& in) {
    PointCloud cloud;
    std::string line;
    std::size_t lineno = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) {
            continue;
        }
        const auto tok = tokenize(line);
        if (tok.size() < 3) {
            throw Error(ErrorCode::MissingColumn, "expected at least x y z", lineno);
        }
        if (columns == 0) {
            if (tok.size() != 3 && tok.size() != 4 && tok.size() != 6 && tok.size() != 7) {
                throw Error(ErrorCode::ParseError,
                            "expected 3, 4, 6 or 7 columns, got " + std::to_string(tok.size()), lineno);
            }
            columns = tok.size();
        } else if (tok.size() != columns) {
            throw Error(tok.size() < columns ? ErrorCode::MissingColumn : ErrorCode::ParseError,
                        "expected " + std::to_string(columns) + " columns, got " + std::to_string(tok.size()),
                        lineno);
        }
        cloud.points.push_back({to_double(tok[0], lineno), to_double(tok[1], lineno), to_double(tok[2], lineno)});
        if (columns >= 6) {
            cloud.colors.push_back(
                {to_channel(tok[3], lineno), to_channel(tok[4], lineno), to_channel(tok[5], lineno)});
        }
        if (columns == 4 || columns == 7) {
            cloud.gt_labels.push_back(to_label(tok[columns - 1], lineno));
        }
    }
    return cloud;
}

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
    std::size_t header_line = 0;
};

PointCloud parse_ply(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) {
            return false;
        }
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    };

    if (!next_line() || tokenize(line) != std::vector<std::string_view>{"ply"}) {
        throw Error(ErrorCode::ParseError, "missing 'ply' magic", lineno == 0 ? 1 : lineno);
    }
    std::vector<PlyElement> elements;
    bool ended = false;
    while (next_line()) {
        const auto tok = tokenize(line);
        if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") {
            continue;
        }
        if (tok[0] == "format") {
            if (tok.size() < 2 || tok[1] != "ascii") {
                throw Error(ErrorCode::ParseError, "only ASCII PLY is supported", lineno);
            }
        } else if (tok[0] == "element") {
            if (tok.size() != 3) {
                throw Error(ErrorCode::ParseError, "malformed element line", lineno);
            }
            const auto count = to_int(tok[2], lineno);
            if (count < 0) {
                throw Error(ErrorCode::ParseError, "negative element count", lineno);
            }
            elements.push_back({std::string(tok[1]), static_cast<std::size_t>(count), {}, lineno});
        } else if (tok[0] == "property") {
            if (elements.empty() || tok.size() < 3) {
                throw Error(ErrorCode::ParseError, "property outside an element", lineno);
            }
            if (tok[1] == "list") {
                if (elements.back().name == "vertex") {
                    throw Error(ErrorCode::ParseError, "list properties on vertices are not supported", lineno);
                }
                elements.back().properties.emplace_back("list");
            } else {
                elements.back().properties.emplace_back(tok.back());
            }
        } else if (tok[0] == "end_header") {
            ended = true;
            break;
        } else {
            throw Error(ErrorCode::ParseError, "unknown header keyword '" + std::string(tok[0]) + "'", lineno);
        }
    }
    if (!ended) {
        throw Error(ErrorCode::ParseError, "missing end_header", lineno);
    }

    PointCloud cloud;
    bool seen_vertex = false;
    for (const auto& el : elements) {
        if (el.name != "vertex") {
            for (std::size_t i = 0; i < el.count; ++i) {
                if (!next_line()) {
                    throw Error(ErrorCode::ParseError, "unexpected end of file in element " + el.name, lineno + 1);
                }
            }
            continue;
        }
        seen_vertex = true;
        auto find = [&](std::string_view name) -> std::ptrdiff_t {
            for (std::size_t i = 0; i < el.properties.size(); ++i) {
                if (el.properties[i] == name) {
                    return static_cast<std::ptrdiff_t>(i);
                }
            }
            return -1;
        };
        const auto ix = find("x");
        const auto iy = find("y");
        const auto iz = find("z");
        if (ix < 0 || iy < 0 || iz < 0) {
            throw Error(ErrorCode::MissingColumn, "vertex element lacks x, y or z", el.header_line);
        }
        const auto ir = find("red");
        const auto ig = find("green");
        const auto ib = find("blue");
        const bool colour = ir >= 0 && ig >= 0 && ib >= 0;
        const auto il = find("gt_label");

        cloud.points.reserve(el.count);
        for (std::size_t i = 0; i < el.count; ++i) {
            if (!next_line()) {
                throw Error(ErrorCode::ParseError, "unexpected end of file: vertex data truncated", lineno + 1);
            }
            const auto tok = tokenize(line);
            if (tok.size() < el.properties.size()) {
                throw Error(ErrorCode::MissingColumn,
                            "vertex has " + std::to_string(tok.size()) + " values, expected " +
                                std::to_string(el.properties.size()),
                            lineno);
            }
            if (tok.size() > el.properties.size()) {
                throw Error(ErrorCode::ParseError, "too many values on vertex line", lineno);
            }
            cloud.points.push_back({to_double(tok[ix], lineno), to_double(tok[iy], lineno), to_double(tok[iz], lineno)});
            if (colour) {
                cloud.colors.push_back({to_channel(tok[ir], lineno), to_channel(tok[ig], lineno), to_channel(tok[ib], lineno)});
            }
            if (il >= 0) {
                cloud.gt_labels.push_back(to_label(tok[il], lineno));
            }
        }
    }
    if (!seen_vertex) {
        throw Error(ErrorCode::MissingColumn, "no vertex element", lineno);
    }
    return cloud;
}

}  // namespace

CloudFormat parse_cloud_format(std::string_view name) {
    if (name == "ply") return CloudFormat::Ply;
    if (name == "tsv") return CloudFormat::Tsv;
    throw Error(ErrorCode::InvalidArgument, "unknown point cloud format '" + std::string(name) + "'");
}

std::string_view to_string(CloudFormat format) {
    return format == CloudFormat::Ply ? "ply" : "tsv";
}

PointCloud parse_point_cloud(std::istream& in, CloudFormat format) {
    PointCloud cloud = format == CloudFormat::Ply ? parse_ply(in) : parse_tsv(in);
    cloud.validate();
    return cloud;
}

PointCloud read_point_cloud(const fs::path& path, CloudFormat format) {
    auto in = open_input(path);
    return parse_point_cloud(in, format);
}

std::string format_point_cloud(const PointCloud& cloud, CloudFormat format, std::span<const InstanceLabel> pred_labels) {
    cloud.validate();
    if (!pred_labels.empty() && pred_labels.size() != cloud.size()) {
        throw Error(ErrorCode::InvalidArgument, "pred label count does not match the cloud");
    }
    std::string out;
    out.reserve(cloud.size() * 48);
    if (format == CloudFormat::Ply) {
        out += "ply\nformat ascii 1.0\nelement vertex ";
        append_int(out, static_cast<std::int64_t>(cloud.size()));
        out += "\nproperty double x\nproperty double y\nproperty double z\n";
        if (cloud.has_colors()) {
            out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
        }
        if (cloud.has_gt()) {
            out += "property int gt_label\n";
        }
        if (!pred_labels.empty()) {
            out += "property int pred_label\n";
        }
        out += "end_header\n";
    }
    const char sep = format == CloudFormat::Ply ? ' ' : '\t';
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        const auto& p = cloud.points[n];
        append_double(out, p.x);
        out += sep;
        append_double(out, p.y);
        out += sep;
        append_double(out, p.z);
        if (cloud.has_colors()) {
            for (const auto c : {cloud.colors[n].r, cloud.colors[n].g, cloud.colors[n].b}) {
                out += sep;
                append_int(out, c);
            }
        }
        if (cloud.has_gt()) {
            out += sep;
            append_int(out, cloud.gt_labels[n].value());
        }
        if (!pred_labels.empty()) {
            out += sep;
            append_int(out, pred_labels[n].value());
        }
        out += '\n';
    }
    return out;
}

void write_point_cloud(const fs::path& path, const PointCloud& cloud, CloudFormat format,
                       std::span<const InstanceLabel> pred_labels) {
    atomic_write(path, format_point_cloud(cloud, format, pred_labels));
}

std::string format_labels(std::span<const InstanceLabel> labels) {
    std::string out;
    out.reserve(labels.size() * 4);
    for (const auto l : labels) {
        append_int(out, l.value());
        out += '\n';
    }
    return out;
}

std::vector<InstanceLabel> parse_labels(std::istream& in) {
    std::vector<InstanceLabel> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = tokenize(line);
        if (tok.empty()) {
            continue;
        }
        if (tok.size() != 1) {
            throw Error(ErrorCode::ParseError, "expected one label per line", lineno);
        }
        out.push_back(to_label(tok[0], lineno));
    }
    return out;
}

void write_labels(const fs::path& path, std::span<const InstanceLabel> labels) {
    atomic_write(path, format_labels(labels));
}

std::vector<InstanceLabel> read_labels(const fs::path& path) {
    auto in = open_input(path);
    return parse_labels(in);
}

std::string format_block_predictions(std::span<const BlockPrediction> preds) {
    std::string out;
    for (const auto& p : preds) {
        out += "block ";
        append_int(out, p.block.ordinal);
        out += ' ';
        append_double(out, p.block.origin_x);
        out += ' ';
        append_double(out, p.block.origin_y);
        out += '\n';
        for (const auto& inst : p.instances) {
            if (inst.points.empty()) {
                throw Error(ErrorCode::InvalidArgument, "cannot serialize an instance without points");
            }
            out += "inst ";
            append_int(out, inst.local_id);
            for (const auto n : inst.points) {
                out += ' ';
                append_int(out, n);
            }
            out += '\n';
        }
    }
    return out;
}

std::vector<BlockPrediction> parse_block_predictions(std::istream& in, double block_side) {
    std::vector<BlockPrediction> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) {
            continue;
        }
        const auto tok = tokenize(line);
        if (tok[0] == "block") {
            if (tok.size() != 4) {
                throw Error(ErrorCode::ParseError, "expected 'block <ordinal> <origin_x> <origin_y>'", lineno);
            }
            const auto ordinal = to_int(tok[1], lineno);
            if (ordinal != static_cast<std::int64_t>(out.size())) {
                throw Error(ErrorCode::OrdinalGap,
                            "expected block ordinal " + std::to_string(out.size()) + ", got " + std::string(tok[1]),
                            lineno);
            }
            BlockPrediction p;
            p.block.ordinal = static_cast<int>(ordinal);
            p.block.origin_x = to_double(tok[2], lineno);
            p.block.origin_y = to_double(tok[3], lineno);
            p.block.side = block_side;
            out.push_back(std::move(p));
        } else if (tok[0] == "inst") {
            if (out.empty()) {
                throw Error(ErrorCode::ParseError, "instance line before any block line", lineno);
            }
            if (tok.size() < 3) {
                throw Error(ErrorCode::ParseError, "expected 'inst <local_id> <point_index>+'", lineno);
            }
            LocalInstance inst;
            inst.local_id = to_int(tok[1], lineno);
            if (inst.local_id < 0) {
                throw Error(ErrorCode::ParseError, "local instance ids must be non-negative", lineno);
            }
            inst.points.reserve(tok.size() - 2);
            for (std::size_t i = 2; i < tok.size(); ++i) {
                const auto n = to_int(tok[i], lineno);
                if (n < 0 || n > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max())) {
                    throw Error(ErrorCode::ParseError, "point index out of range", lineno);
                }
                inst.points.push_back(static_cast<std::uint32_t>(n));
            }
            out.back().instances.push_back(std::move(inst));
        } else {
            throw Error(ErrorCode::ParseError, "unknown record '" + std::string(tok[0]) + "'", lineno);
        }
    }
    return out;
}

void write_block_predictions(const fs::path& path, std::span<const BlockPrediction> preds) {
    atomic_write(path, format_block_predictions(preds));
}

std::vector<BlockPrediction> read_block_predictions(const fs::path& path, double block_side) {
    auto in = open_input(path);
    return parse_block_predictions(in, block_side);
}

std::string format_metrics_csv(std::span<const MetricsRow> rows) {
    std::string out(kMetricsHeader);
    out += '\n';
    char buf[128];
    for (const auto& r : rows) {
        const std::string tau2 = r.tau2 == kInfiniteTau ? "inf" : std::to_string(r.tau2);
        std::snprintf(buf, sizeof buf, ",%.1f,%.1f,%.1f,%.1f\n", r.report.m_rec, r.report.m_prec,
                      100.0 * r.report.m_cov, 100.0 * r.report.m_wcov);
        out += r.algo + "," + std::to_string(r.grid) + "," + std::to_string(r.tau1) + "," + tau2 + "," +
               std::to_string(r.seed) + buf;
    }
    return out;
}

void write_metrics_csv(const fs::path& path, std::span<const MetricsRow> rows) {
    atomic_write(path, format_metrics_csv(rows));
}

void atomic_write(const fs::path& path, std::string_view content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw Error(ErrorCode::Io, "failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot move output into place at " + path.string());
    }
}

}  // namespace blockmerge
