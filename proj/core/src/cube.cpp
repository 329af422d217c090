#include "fpm/cube.hpp"

#include <boost/crc.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "fpm/random.hpp"

namespace fpm {
namespace {

constexpr std::array<unsigned char, 8> kMagic = {'F', 'P', 'C', 'U', 'B', 'E', '1', '\0'};
constexpr std::uint32_t kFlagUpsampled = 1u;

using Crc64Xz = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, 0xFFFFFFFFFFFFFFFFULL,
                                   0xFFFFFFFFFFFFFFFFULL, true, true>;

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::span<const unsigned char> bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  }
  return static_cast<T>(v);
}

std::vector<unsigned char> payload_bytes(std::span<const float> data) {
  std::vector<unsigned char> out;
  out.reserve(data.size() * 4);
  for (float f : data) {
    put_le(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

nlohmann::json meta_to_json(const CubeMeta& m) {
  return nlohmann::json{
      {"spacing", m.spacing},
      {"pupil_radius", m.pupil_radius},
      {"overlap_target", m.overlap_target},
      {"overlap_achieved", m.overlap_achieved},
      {"noise_std", m.noise_std},
      {"noise_seed", m.noise_seed},
      {"shuffle_seed", m.shuffle_seed},
      {"permutation", m.permutation},
      {"norm", m.norm},
      {"source_id", m.source_id},
      {"ground_truth", m.ground_truth},
      {"n_side", m.n_side},
      {"hires_side", m.hires_side},
      {"pupil_edge", m.pupil_edge == PupilEdge::Hard ? "hard" : "ramp"},
  };
}

CubeMeta meta_from_json(const nlohmann::json& j) {
  CubeMeta m;
  j.at("spacing").get_to(m.spacing);
  j.at("pupil_radius").get_to(m.pupil_radius);
  m.overlap_target = j.value("overlap_target", 0.0);
  j.at("overlap_achieved").get_to(m.overlap_achieved);
  j.at("noise_std").get_to(m.noise_std);
  m.noise_seed = j.value("noise_seed", std::uint64_t{0});
  j.at("shuffle_seed").get_to(m.shuffle_seed);
  j.at("permutation").get_to(m.permutation);
  j.at("norm").get_to(m.norm);
  j.at("source_id").get_to(m.source_id);
  j.at("ground_truth").get_to(m.ground_truth);
  m.n_side = j.value("n_side", std::size_t{0});
  m.hires_side = j.value("hires_side", std::size_t{0});
  const std::string edge = j.value("pupil_edge", std::string("ramp"));
  if (edge != "ramp" && edge != "hard") {
    throw FormatError(FormatErrorCode::BadMetadata, "unknown pupil_edge '" + edge + "'");
  }
  m.pupil_edge = edge == "hard" ? PupilEdge::Hard : PupilEdge::Ramp;
  return m;
}

}  // namespace

IntensityCube::IntensityCube(std::size_t side, std::size_t channels, bool upsampled,
                             std::vector<float> data, CubeMeta meta)
    : side_(side),
      channels_(channels),
      upsampled_(upsampled),
      data_(std::move(data)),
      meta_(std::move(meta)) {
  if (side == 0 || channels == 0) {
    throw ValidationError("cube side and channel count must be positive");
  }
  if (data_.size() != side * side * channels) {
    throw ValidationError("cube data length does not match side x side x channels");
  }
  if (meta_.permutation.size() != channels || !is_permutation_of_iota(meta_.permutation)) {
    throw ValidationError("cube permutation is not a permutation of its channels");
  }
  if (meta_.norm.size() != channels) {
    throw ValidationError("cube needs one normalization constant per channel");
  }
  if (!(meta_.overlap_achieved >= 0.0 && meta_.overlap_achieved <= 1.0)) {
    throw ValidationError("achieved overlap must lie in [0, 1]");
  }
}

std::span<const float> IntensityCube::channel_data(std::size_t slot) const {
  if (slot >= channels_) {
    throw ValidationError("cube channel index out of range");
  }
  return std::span<const float>(data_).subspan(slot * side_ * side_, side_ * side_);
}

RealImage IntensityCube::channel(std::size_t slot) const {
  const auto values = channel_data(slot);
  return RealImage(side_, side_, std::vector<double>(values.begin(), values.end()));
}

IntensityCube make_image_cube(const RealImage& image, const std::string& source_id) {
  if (image.width() != image.height()) {
    throw ValidationError("cube images must be square");
  }
  std::vector<float> data(image.values().begin(), image.values().end());
  CubeMeta meta;
  meta.permutation = {0};
  meta.norm = {1.0};
  meta.source_id = source_id;
  meta.hires_side = image.width();
  return IntensityCube(image.width(), 1, false, std::move(data), std::move(meta));
}

std::uint64_t crc64(std::span<const unsigned char> bytes) noexcept {
  Crc64Xz crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::uint64_t payload_checksum(const IntensityCube& cube) {
  return crc64(payload_bytes(cube.data()));
}

std::vector<unsigned char> encode_cube(const IntensityCube& cube) {
  const std::string meta = meta_to_json(cube.meta()).dump();
  const auto payload = payload_bytes(cube.data());
  std::vector<unsigned char> out;
  out.reserve(kCubeFixedHeaderBytes + meta.size() + payload.size() + 8);
  std::ranges::copy(kMagic, std::back_inserter(out));
  put_le(out, kCubeFormatVersion);
  put_le(out, static_cast<std::uint32_t>(cube.side()));
  put_le(out, static_cast<std::uint32_t>(cube.channels()));
  put_le(out, cube.upsampled() ? kFlagUpsampled : 0u);
  put_le(out, static_cast<std::uint64_t>(meta.size()));
  out.insert(out.end(), meta.begin(), meta.end());
  out.insert(out.end(), payload.begin(), payload.end());
  put_le(out, crc64(payload));
  return out;
}

IntensityCube decode_cube(std::span<const unsigned char> bytes) {
  const std::size_t magic_len = std::min(bytes.size(), kMagic.size());
  if (!std::equal(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(magic_len),
                  kMagic.begin())) {
    throw FormatError(FormatErrorCode::BadMagic, "bad magic: not an FPCUBE1 file");
  }
  if (bytes.size() < kCubeFixedHeaderBytes) {
    throw FormatError(FormatErrorCode::Truncated, "truncated header");
  }
  const auto version = get_le<std::uint32_t>(bytes, 8);
  if (version != kCubeFormatVersion) {
    throw FormatError(FormatErrorCode::VersionMismatch,
                      "version mismatch: file is v" + std::to_string(version) + ", reader is v" +
                          std::to_string(kCubeFormatVersion));
  }
  const std::uint64_t side = get_le<std::uint32_t>(bytes, 12);
  const std::uint64_t channels = get_le<std::uint32_t>(bytes, 16);
  const auto flags = get_le<std::uint32_t>(bytes, 20);
  const auto meta_len = get_le<std::uint64_t>(bytes, 24);

  const std::uint64_t available = bytes.size() - kCubeFixedHeaderBytes;
  if (meta_len > available) {
    throw FormatError(FormatErrorCode::Truncated, "truncated metadata");
  }
  // side <= 2^32 and channels <= 2^32: the product below cannot overflow
  // before it is compared against the (much smaller) remaining length.
  const std::uint64_t remaining = available - meta_len;
  const std::uint64_t pixels = side * side;
  if (channels != 0 && pixels > remaining / 4 / channels) {
    throw FormatError(FormatErrorCode::Truncated, "truncated payload");
  }
  const std::uint64_t payload_len = pixels * channels * 4;
  if (remaining < payload_len + 8) {
    throw FormatError(FormatErrorCode::Truncated, "truncated payload or checksum");
  }
  if (remaining > payload_len + 8) {
    throw FormatError(FormatErrorCode::TrailingData, "unexpected bytes after checksum");
  }

  const std::size_t meta_at = kCubeFixedHeaderBytes;
  const std::size_t payload_at = meta_at + meta_len;
  const std::size_t checksum_at = payload_at + payload_len;
  const auto payload = bytes.subspan(payload_at, payload_len);
  const auto stored = get_le<std::uint64_t>(bytes, checksum_at);
  if (crc64(payload) != stored) {
    throw FormatError(FormatErrorCode::ChecksumMismatch, "checksum failure: payload CRC-64 mismatch");
  }

  CubeMeta meta;
  try {
    const std::string text(bytes.begin() + static_cast<std::ptrdiff_t>(meta_at),
                           bytes.begin() + static_cast<std::ptrdiff_t>(payload_at));
    meta = meta_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatErrorCode::BadMetadata, std::string("bad metadata: ") + e.what());
  }

  std::vector<float> data(pixels * channels);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, payload_at + 4 * i));
  }
  try {
    return IntensityCube(side, channels, (flags & kFlagUpsampled) != 0, std::move(data),
                         std::move(meta));
  } catch (const ValidationError& e) {
    throw FormatError(FormatErrorCode::BadMetadata, std::string("bad metadata: ") + e.what());
  }
}

void write_cube(const IntensityCube& cube, const std::filesystem::path& path) {
  const auto bytes = encode_cube(cube);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

IntensityCube read_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  try {
    return decode_cube(bytes);
  } catch (const FormatError& e) {
    throw FormatError(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace fpm
