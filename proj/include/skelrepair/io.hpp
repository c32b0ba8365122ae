#pragma once

#include "skelrepair/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

namespace skelrepair::io {

/// Raster size, used to bounds-check loaded points.
struct Dims {
  int width = 0;
  int height = 0;
};

// Field files.
//
// LSF1 layout: "LSF1", u32 LE width, u32 LE height, then width*height float32 LE
// values in row-major order. LSF1 values are used verbatim; a loaded LSF1 field
// is flagged as a probability field when every value lies in [0, 1].
// 8-bit PGM (P5) and PNG inputs are mapped to value/255 and always flagged.

Field load_field(const std::filesystem::path& path);
void save_field(const Field& field, const std::filesystem::path& path);

/// Decodes LSF1 from memory. Errors name the byte offset of the fault.
Field decode_lsf1(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_lsf1(const Field& field);

// Masks: PGM P5, maxval 255. Any nonzero sample is foreground on load; save writes {0, 255}.

BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

// Points: JSON lines with keys x, y, kind, score.

PointSet load_points(const std::filesystem::path& path, std::optional<Dims> expected = std::nullopt);
void save_points(const PointSet& points, const std::filesystem::path& path);

/// 8-bit RGB PNG, row-major interleaved samples.
void save_png_rgb(const std::filesystem::path& path, int width, int height, std::span<const std::uint8_t> rgb);

/// Exact file contents.
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace skelrepair::io
