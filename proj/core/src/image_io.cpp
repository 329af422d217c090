#include "fpm/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "fpm/error.hpp"

namespace fpm {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Skips whitespace and '#' comments between PGM header tokens.
void skip_pgm_space(std::istream& in) {
  while (in) {
    const int c = in.peek();
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
}

LoadedImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") {
    throw IoError("'" + path.string() + "' is not a grayscale PGM (P2/P5)");
  }
  std::size_t width = 0, height = 0;
  unsigned maxval = 0;
  skip_pgm_space(in);
  in >> width;
  skip_pgm_space(in);
  in >> height;
  skip_pgm_space(in);
  in >> maxval;
  if (!in || width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    throw IoError("'" + path.string() + "' has a malformed PGM header");
  }
  const double white = static_cast<double>(maxval);
  std::vector<double> values(width * height);
  if (magic == "P2") {
    for (double& v : values) {
      unsigned s = 0;
      in >> s;
      v = s;
    }
  } else {
    in.get();  // single whitespace byte after maxval
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(values.size() * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw IoError("'" + path.string() + "' has a truncated PGM payload");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = bytes_per == 2 ? static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1])
                                 : static_cast<double>(raw[i]);
    }
  }
  if (!in) {
    throw IoError("'" + path.string() + "' has a truncated PGM payload");
  }
  return {RealImage(width, height, std::move(values)), white};
}

LoadedImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw IoError("cannot decode PNG '" + path.string() + "': " + image.message);
  }
  const bool deep = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0 ||
                    PNG_IMAGE_SAMPLE_COMPONENT_SIZE(image.format) == 2;
  // 8-bit sources stay in sRGB-coded 8-bit gray; 16-bit sources are read linear.
  image.format = deep ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY;
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  std::vector<double> values(n);
  if (deep) {
    std::vector<png_uint_16> buffer(n);
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
      throw IoError("cannot decode PNG '" + path.string() + "': " + image.message);
    }
    std::ranges::copy(buffer, values.begin());
  } else {
    std::vector<png_byte> buffer(n);
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
      throw IoError("cannot decode PNG '" + path.string() + "': " + image.message);
    }
    std::ranges::copy(buffer, values.begin());
  }
  return {RealImage(image.width, image.height, std::move(values)), deep ? 65535.0 : 255.0};
}

void write_pgm(const RealImage& image, const std::filesystem::path& path, unsigned maxval) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << "P5\n" << image.width() << " " << image.height() << "\n" << maxval << "\n";
  std::vector<unsigned char> raw;
  raw.reserve(image.size() * (maxval > 255 ? 2 : 1));
  for (double v : image.values()) {
    const auto s = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
    if (maxval > 255) {
      raw.push_back(static_cast<unsigned char>(s >> 8));
    }
    raw.push_back(static_cast<unsigned char>(s & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

}  // namespace

LoadedImage read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("no such file '" + path.string() + "'");
  }
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    return read_png(path);
  }
  if (ext == ".pgm" || ext == ".pnm") {
    return read_pgm(path);
  }
  throw IoError("unsupported image format '" + ext + "' (expected .pgm or .png)");
}

void write_pgm16(const RealImage& image, const std::filesystem::path& path) {
  write_pgm(image, path, 65535);
}

void write_pgm8(const RealImage& image, const std::filesystem::path& path) {
  write_pgm(image, path, 255);
}

}  // namespace fpm
