#include "skelrepair/io.hpp"

#include "skelrepair/errors.hpp"

#include <png.h>

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace skelrepair::io {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void format_error(const fs::path& path, const std::string& what) {
  throw FormatError(path.string() + ": " + what);
}

std::string at_offset(std::size_t offset) { return " at byte offset " + std::to_string(offset); }

std::uint32_t read_u32_le(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) | (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Gray8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;
};

// Binary PGM header: magic, width, height, maxval, each separated by whitespace,
// '#' comments allowed before maxval; exactly one whitespace byte precedes the raster.
Gray8 decode_pgm(std::span<const std::uint8_t> b) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < b.size()) {
      if (b[pos] == '#') {
        while (pos < b.size() && b[pos] != '\n') ++pos;
      } else if (std::isspace(b[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char* name) {
    skip_space();
    const std::size_t start = pos;
    long value = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
      value = value * 10 + (b[pos] - '0');
      if (value > (1L << 24)) throw FormatError(std::string("PGM ") + name + " too large" + at_offset(start));
      ++pos;
    }
    if (pos == start) throw FormatError(std::string("PGM header: expected ") + name + at_offset(start));
    return static_cast<int>(value);
  };
  Gray8 img;
  img.width = read_int("width");
  img.height = read_int("height");
  const std::size_t maxval_at = pos;
  const int maxval = read_int("maxval");
  if (maxval != 255) throw FormatError("PGM maxval must be 255" + at_offset(maxval_at));
  if (img.width <= 0 || img.height <= 0) throw FormatError("PGM dimensions must be positive" + at_offset(0));
  if (pos >= b.size() || !std::isspace(b[pos])) throw FormatError("PGM header not terminated" + at_offset(pos));
  ++pos;
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  if (b.size() - pos < n) throw FormatError("PGM payload truncated" + at_offset(b.size()));
  img.samples.assign(b.begin() + static_cast<std::ptrdiff_t>(pos), b.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->bytes.size() - st->pos < len) png_error(png, "truncated PNG");
  std::memcpy(out, st->bytes.data() + st->pos, len);
  st->pos += len;
}

[[noreturn]] void png_throw(png_structp, png_const_charp msg) { throw FormatError(std::string("PNG: ") + msg); }
void png_warn(png_structp, png_const_charp) {}

Gray8 decode_png(std::span<const std::uint8_t> b) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn);
  if (!png) throw FormatError("PNG: cannot allocate decoder");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};

  PngReadState st{b, 0};
  png_set_read_fn(png, &st, png_read_from_span);
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  Gray8 img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(img.width)) throw FormatError("PNG: unsupported layout");
  img.samples.resize(static_cast<std::size_t>(img.width) * img.height);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) rows[y] = img.samples.data() + static_cast<std::size_t>(y) * img.width;
  png_read_image(png, rows.data());
  return img;
}

bool has_prefix(std::span<const std::uint8_t> b, std::string_view magic) {
  return b.size() >= magic.size() && std::memcmp(b.data(), magic.data(), magic.size()) == 0;
}

Gray8 decode_gray8(std::span<const std::uint8_t> bytes) {
  if (has_prefix(bytes, "P5")) return decode_pgm(bytes);
  if (has_prefix(bytes, "\x89PNG")) return decode_png(bytes);
  throw FormatError("unrecognised image format" + at_offset(0));
}

}  // namespace

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_text(const fs::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Field decode_lsf1(std::span<const std::uint8_t> b) {
  if (b.size() < 12) throw FormatError("LSF1 header truncated" + at_offset(b.size()));
  if (!has_prefix(b, "LSF1")) throw FormatError("bad LSF1 magic" + at_offset(0));
  const std::uint32_t width = read_u32_le(b, 4);
  const std::uint32_t height = read_u32_le(b, 8);
  if (width == 0 || height == 0 || width > (1u << 16) || height > (1u << 16))
    throw FormatError("LSF1 dimensions out of range" + at_offset(4));
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (b.size() - 12 < 4 * n) throw FormatError("LSF1 payload truncated" + at_offset(b.size()));
  if (b.size() - 12 > 4 * n) throw FormatError("trailing bytes after LSF1 payload" + at_offset(12 + 4 * n));

  Field::Values values(static_cast<Eigen::Index>(height), static_cast<Eigen::Index>(width));
  bool unit_range = true;
  for (std::size_t i = 0; i < n; ++i) {
    const float v = std::bit_cast<float>(read_u32_le(b, 12 + 4 * i));
    if (!std::isfinite(v)) throw FormatError("non-finite LSF1 value" + at_offset(12 + 4 * i));
    unit_range = unit_range && v >= 0.0f && v <= 1.0f;
    values.data()[i] = v;
  }
  return Field(std::move(values), unit_range);
}

std::vector<std::uint8_t> encode_lsf1(const Field& field) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + 4 * static_cast<std::size_t>(field.values().size()));
  for (char c : {'L', 'S', 'F', '1'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32_le(out, static_cast<std::uint32_t>(field.width()));
  put_u32_le(out, static_cast<std::uint32_t>(field.height()));
  const auto& v = field.values();
  for (Eigen::Index i = 0; i < v.size(); ++i) put_u32_le(out, std::bit_cast<std::uint32_t>(v.data()[i]));
  return out;
}

Field load_field(const fs::path& path) {
  const auto bytes = read_bytes(path);
  try {
    if (has_prefix(bytes, "LSF1")) return decode_lsf1(bytes);
    const Gray8 img = decode_gray8(bytes);
    Field::Values values(img.height, img.width);
    for (std::size_t i = 0; i < img.samples.size(); ++i) values.data()[i] = static_cast<float>(img.samples[i]) / 255.0f;
    return Field(std::move(values), true);
  } catch (const FormatError& e) {
    format_error(path, e.what());
  }
}

void save_field(const Field& field, const fs::path& path) { write_bytes(path, encode_lsf1(field)); }

BinaryMask load_mask(const fs::path& path) {
  const auto bytes = read_bytes(path);
  try {
    const Gray8 img = decode_gray8(bytes);
    BinaryMask::Bits bits(img.height, img.width);
    for (std::size_t i = 0; i < img.samples.size(); ++i) bits.data()[i] = img.samples[i] != 0;
    return BinaryMask(std::move(bits));
  } catch (const FormatError& e) {
    format_error(path, e.what());
  }
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  const std::string header = "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto& bits = mask.bits();
  for (Eigen::Index i = 0; i < bits.size(); ++i) out.push_back(bits.data()[i] ? 255 : 0);
  write_bytes(path, out);
}

PointSet load_points(const fs::path& path, std::optional<Dims> expected) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  PointSet points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      format_error(path, where + e.what());
    }
    if (!obj.is_object()) format_error(path, where + "expected a JSON object");
    for (const char* key : {"x", "y", "kind", "score"})
      if (!obj.contains(key)) format_error(path, where + "missing key '" + key + "'");
    if (!obj["x"].is_number_integer() || !obj["y"].is_number_integer())
      format_error(path, where + "x and y must be integers");
    if (!obj["kind"].is_string()) format_error(path, where + "kind must be a string");
    if (!obj["score"].is_number()) format_error(path, where + "score must be a number");

    Point p;
    p.x = obj["x"].get<int>();
    p.y = obj["y"].get<int>();
    p.score = obj["score"].get<double>();
    try {
      p.kind = point_kind_from_string(obj["kind"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      format_error(path, where + e.what());
    }
    if (!(p.score >= 0.0 && p.score <= 1.0)) format_error(path, where + "score outside [0,1]");
    if (p.x < 0 || p.y < 0) format_error(path, where + "negative coordinate");
    if (expected && (p.x >= expected->width || p.y >= expected->height))
      format_error(path, where + "point outside " + std::to_string(expected->width) + "x" +
                             std::to_string(expected->height) + " raster");
    try {
      points.add(p);
    } catch (const std::invalid_argument& e) {
      format_error(path, where + e.what());
    }
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  return points;
}

void save_points(const PointSet& points, const fs::path& path) {
  std::ostringstream out;
  for (const Point& p : points) {
    json obj = {{"x", p.x}, {"y", p.y}, {"kind", std::string(to_string(p.kind))}, {"score", p.score}};
    out << obj.dump() << '\n';
  }
  write_text(path, out.str());
}

void save_png_rgb(const fs::path& path, int width, int height, std::span<const std::uint8_t> rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw std::invalid_argument("RGB buffer size mismatch");
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot open for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn);
  if (!png) throw IoError("PNG: cannot allocate encoder");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};

  try {
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
      png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * width * 3));
    png_write_end(png, nullptr);
  } catch (const FormatError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (std::fflush(fp.get()) != 0) throw IoError("write failed: " + path.string());
}

}  // namespace skelrepair::io
