#include "ovcd/image_io.hpp"

#include <png.h>

#include <bit>
#include <boost/beast/core/detail/base64.hpp>
#include <cstring>
#include <fstream>

#include "ovcd/error.hpp"

namespace ovcd::io {

namespace {

namespace b64 = boost::beast::detail::base64;

constexpr char kGridMagic[4] = {'O', 'V', 'C', 'D'};
constexpr std::size_t kGridHeader = 16;

std::vector<std::uint8_t> decode_png(std::span<const std::uint8_t> bytes,
                                     png_uint_32 format, int& width,
                                     int& height, const std::string& origin) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError("cannot decode PNG " + origin + ": " + image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode PNG " + origin + ": " + image.message);
  }
  width = static_cast<int>(image.width);
  height = static_cast<int>(image.height);
  return pixels;
}

std::vector<std::uint8_t> encode_png(const std::uint8_t* pixels, int width,
                                     int height, png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, pixels, 0, nullptr)) {
    throw IoError(std::string("cannot size PNG buffer: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0,
                                 nullptr)) {
    throw IoError(std::string("cannot encode PNG: ") + image.message);
  }
  out.resize(size);
  return out;
}

void put_u32(std::uint8_t* dst, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) dst[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* src) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(src[i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

RasterImage decode_rgb_png(std::span<const std::uint8_t> bytes) {
  int w = 0, h = 0;
  auto pixels = decode_png(bytes, PNG_FORMAT_RGB, w, h, "buffer");
  return RasterImage(w, h, std::move(pixels));
}

BitMask decode_mask_png(std::span<const std::uint8_t> bytes) {
  int w = 0, h = 0;
  auto pixels = decode_png(bytes, PNG_FORMAT_GRAY, w, h, "buffer");
  BitMask mask(w, h);
  for (std::size_t i = 0; i < pixels.size(); ++i) mask.set(i, pixels[i] != 0);
  return mask;
}

RasterImage read_rgb_png(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  int w = 0, h = 0;
  auto pixels = decode_png(bytes, PNG_FORMAT_RGB, w, h, path.string());
  return RasterImage(w, h, std::move(pixels));
}

BitMask read_mask_png(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  int w = 0, h = 0;
  auto pixels = decode_png(bytes, PNG_FORMAT_GRAY, w, h, path.string());
  BitMask mask(w, h);
  for (std::size_t i = 0; i < pixels.size(); ++i) mask.set(i, pixels[i] != 0);
  return mask;
}

std::vector<std::uint8_t> encode_rgb_png(const RasterImage& image) {
  return encode_png(image.data().data(), image.width(), image.height(),
                    PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_mask_png(const BitMask& mask) {
  std::vector<std::uint8_t> gray(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) gray[i] = mask[i] ? 255 : 0;
  return encode_png(gray.data(), mask.width(), mask.height(), PNG_FORMAT_GRAY);
}

void write_rgb_png(const std::filesystem::path& path, const RasterImage& image) {
  write_file(path, encode_rgb_png(image));
}

void write_mask_png(const std::filesystem::path& path, const BitMask& mask) {
  write_file(path, encode_mask_png(mask));
}

std::vector<std::uint8_t> floats_to_le_bytes(std::span<const float> values) {
  std::vector<std::uint8_t> out(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    put_u32(out.data() + 4 * i, std::bit_cast<std::uint32_t>(values[i]));
  }
  return out;
}

std::vector<float> le_bytes_to_floats(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) {
    throw IoError("float payload length is not a multiple of 4");
  }
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<float>(get_u32(bytes.data() + 4 * i));
  }
  return out;
}

std::vector<std::uint8_t> encode_logit_grid(const ScalarMap& map) {
  std::vector<std::uint8_t> out(kGridHeader);
  std::memcpy(out.data(), kGridMagic, 4);
  put_u32(out.data() + 4, static_cast<std::uint32_t>(map.width()));
  put_u32(out.data() + 8, static_cast<std::uint32_t>(map.height()));
  put_u32(out.data() + 12, 0);
  const auto payload = floats_to_le_bytes(map.values());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

ScalarMap decode_logit_grid(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kGridHeader || std::memcmp(bytes.data(), kGridMagic, 4) != 0) {
    throw IoError("not an OVCD logit grid");
  }
  const std::uint32_t w = get_u32(bytes.data() + 4);
  const std::uint32_t h = get_u32(bytes.data() + 8);
  const std::size_t expected = kGridHeader + static_cast<std::size_t>(w) * h * 4;
  if (bytes.size() != expected) {
    throw IoError("logit grid payload size does not match header");
  }
  return ScalarMap(static_cast<int>(w), static_cast<int>(h),
                   le_bytes_to_floats(bytes.subspan(kGridHeader)));
}

void write_logit_grid(const std::filesystem::path& path, const ScalarMap& map) {
  write_file(path, encode_logit_grid(map));
}

ScalarMap read_logit_grid(const std::filesystem::path& path) {
  return decode_logit_grid(read_file(path));
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
  const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
  if (text.find_first_not_of('=', read) != std::string_view::npos) {
    throw IoError("invalid base64 payload");
  }
  out.resize(written);
  return out;
}

}  // namespace ovcd::io
