#pragma once

#include <filesystem>

#include "seatrend/grid.hpp"
#include "seatrend/segmentation.hpp"

namespace seatrend {

// 16-bit grayscale PGM. Gray 0 marks land; ocean values map linearly onto
// 1..65535 between vmin and vmax (written into a header comment), so the
// image is invertible up to one quantization step.
void write_heatmap_pgm(const Field& f, const OceanMask& mask,
                       const std::filesystem::path& path);

// Decode a PGM written by write_heatmap_pgm back into values (NaN for land).
Field read_heatmap_pgm(const std::filesystem::path& path, const Grid& grid);

// 8-bit PPM with a blue-white-red diverging palette centered on zero; land is
// dark gray. For quick inspection only.
void write_heatmap_ppm(const Field& f, const OceanMask& mask,
                       const std::filesystem::path& path);

// Cluster labels as distinct colors.
void write_partition_ppm(const Partition& p, const std::filesystem::path& path);

} // namespace seatrend
