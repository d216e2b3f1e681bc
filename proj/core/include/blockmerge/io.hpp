// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_IO_HPP
#define BLOCKMERGE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blockmerge/grid.hpp"
#include "blockmerge/labels.hpp"
#include "blockmerge/metrics.hpp"
#include "blockmerge/scene.hpp"

namespace blockmerge {

enum class CloudFormat { Ply, Tsv };

CloudFormat parse_cloud_format(std::string_view name);
std::string_view to_string(CloudFormat format);

// Text formats. Every reader throws Error with ParseError (and the 1-based
// line), MissingColumn, OrdinalGap or Io; none of them crash on bad input.
//
// TSV point clouds: whitespace-separated `x y z [r g b] [gt_label]`, so 3, 4,
// 6 or 7 columns, fixed for the whole file. Blank lines and lines starting
// with '#' are ignored.
//
// PLY: ASCII only. The vertex element needs x, y, z; red/green/blue and an
// integer gt_label are picked up when present, other properties and elements
// are skipped.
PointCloud parse_point_cloud(std::istream& in, CloudFormat format);
PointCloud read_point_cloud(const std::filesystem::path& path, CloudFormat format);

// `pred_labels` (optional) is written as an extra `pred_label` property/column.
std::string format_point_cloud(const PointCloud& cloud, CloudFormat format,
                               std::span<const InstanceLabel> pred_labels = {});
void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud, CloudFormat format,
                       std::span<const InstanceLabel> pred_labels = {});

// One integer per line, -1 for Unlabelled.
std::string format_labels(std::span<const InstanceLabel> labels);
std::vector<InstanceLabel> parse_labels(std::istream& in);
void write_labels(const std::filesystem::path& path, std::span<const InstanceLabel> labels);
std::vector<InstanceLabel> read_labels(const std::filesystem::path& path);

// "block <ordinal> <origin_x> <origin_y>" followed by one
// "inst <local_id> <point_index>..." line per local instance. Ordinals must
// run 0, 1, 2, ... without gaps. Blocks read back get `block_side` and open
// upper edges; use partition_blocks to recover the closed flags.
std::string format_block_predictions(std::span<const BlockPrediction> preds);
std::vector<BlockPrediction> parse_block_predictions(std::istream& in, double block_side = 1.0);
void write_block_predictions(const std::filesystem::path& path, std::span<const BlockPrediction> preds);
std::vector<BlockPrediction> read_block_predictions(const std::filesystem::path& path, double block_side = 1.0);

struct MetricsRow {
    std::string algo;
    int grid = 0;
    std::int64_t tau1 = 0;
    std::int64_t tau2 = 0;  // kInfiniteTau is written as "inf"
    std::uint64_t seed = 0;
    MetricsReport report;
};

inline constexpr std::string_view kMetricsHeader = "algo,grid,tau1,tau2,seed,m_rec,m_prec,m_cov,m_wcov";

// Header plus one row per entry, in the given order; metrics as percentages
// with one decimal.
std::string format_metrics_csv(std::span<const MetricsRow> rows);
void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

}  // namespace blockmerge

#endif  // BLOCKMERGE_IO_HPP
