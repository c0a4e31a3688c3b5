#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovcd/raster.hpp"

namespace ovcd::io {

// PNG files. Readers accept any PNG colour type and convert to the requested
// layout; masks are single-channel with 0 = background, 255 = foreground
// (any non-zero value reads as foreground).
RasterImage read_rgb_png(const std::filesystem::path& path);
void write_rgb_png(const std::filesystem::path& path, const RasterImage& image);
BitMask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const BitMask& mask);

std::vector<std::uint8_t> encode_rgb_png(const RasterImage& image);
std::vector<std::uint8_t> encode_mask_png(const BitMask& mask);
RasterImage decode_rgb_png(std::span<const std::uint8_t> bytes);
BitMask decode_mask_png(std::span<const std::uint8_t> bytes);

// Raw logit grid: "OVCD", u32 width, u32 height, u32 reserved, then
// width*height little-endian float32 values in row-major order.
void write_logit_grid(const std::filesystem::path& path, const ScalarMap& map);
ScalarMap read_logit_grid(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_logit_grid(const ScalarMap& map);
ScalarMap decode_logit_grid(std::span<const std::uint8_t> bytes);

// Little-endian float32 arrays without header (wire payloads).
std::vector<std::uint8_t> floats_to_le_bytes(std::span<const float> values);
std::vector<float> le_bytes_to_floats(std::span<const std::uint8_t> bytes);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace ovcd::io
