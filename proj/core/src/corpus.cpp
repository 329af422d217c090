#include "fpm/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fpm/cube.hpp"
#include "fpm/dataset.hpp"
#include "fpm/image_io.hpp"
#include "fpm/parallel.hpp"
#include "fpm/random.hpp"

namespace fpm {
namespace {

struct Tile {
  std::string source_id;
  ComplexField object;
};

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cube_file_name(const std::string& source, const CorpusSetting& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "__ov%.4f__ns%.3e.fpc", s.overlap, s.noise_std);
  return source + buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') {
      out += '"';
    }
  }
  return out + "\"";
}

double parse_double(const std::string& text, const char* what) {
  char* stop = nullptr;
  const double value = std::strtod(text.c_str(), &stop);
  if (text.empty() || stop != text.c_str() + text.size()) {
    throw FormatError(FormatErrorCode::BadMetadata,
                      std::string("manifest: bad ") + what + " '" + text + "'");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& text, int base, const char* what) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw FormatError(FormatErrorCode::BadMetadata,
                      std::string("manifest: bad ") + what + " '" + text + "'");
  }
  return value;
}

std::vector<Tile> make_tiles(const SourceImage& source, const CorpusConfig& cfg,
                             const WarningSink& warn) {
  constexpr std::size_t side = kGroundTruthSide;
  std::vector<Tile> tiles;
  const RealImage& img = source.image;
  if (img.width() < side || img.height() < side) {
    warn(source.id + ": image smaller than 128x128, skipped");
    return tiles;
  }
  if (cfg.crop_stride == 0) {
    throw ValidationError("crop stride must be positive");
  }
  std::vector<std::pair<std::size_t, std::size_t>> origins;
  for (std::size_t y = 0; y + side <= img.height(); y += cfg.crop_stride) {
    for (std::size_t x = 0; x + side <= img.width(); x += cfg.crop_stride) {
      origins.emplace_back(x, y);
    }
  }
  if (cfg.max_tiles_per_image > 0 && origins.size() > cfg.max_tiles_per_image) {
    origins.resize(cfg.max_tiles_per_image);
  }
  for (std::size_t k = 0; k < origins.size(); ++k) {
    const auto [x0, y0] = origins[k];
    RealImage crop(side, side);
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        crop(x, y) = img(x0 + x, y0 + y);
      }
    }
    std::string id = origins.size() == 1 ? source.id : source.id + "_t" + std::to_string(k);
    tiles.push_back({std::move(id), prepare_ground_truth(crop, source.white_level)});
  }
  return tiles;
}

void write_corpus_json(const CorpusConfig& cfg, const std::filesystem::path& path) {
  nlohmann::json settings = nlohmann::json::array();
  for (const auto& s : cfg.settings) {
    settings.push_back({{"overlap", s.overlap}, {"noise_std", s.noise_std}});
  }
  const nlohmann::json j = {
      {"geometry_mode", to_string(cfg.geometry.mode)},
      {"n_side", cfg.geometry.n_side},
      {"pupil_radius", cfg.geometry.pupil_radius},
      {"anchor_overlap", cfg.geometry.anchor_overlap},
      {"hires_side", cfg.geometry.hires_side},
      {"lowres_side", cfg.geometry.lowres_side},
      {"pupil_edge", cfg.geometry.edge == PupilEdge::Hard ? "hard" : "ramp"},
      {"noise_seed", cfg.noise_seed},
      {"shuffle_seed", cfg.shuffle_seed},
      {"crop_stride", cfg.crop_stride},
      {"max_tiles_per_image", cfg.max_tiles_per_image},
      {"upsampled_siblings", cfg.write_upsampled},
      {"settings", settings},
  };
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << j.dump(2) << "\n";
}

}  // namespace

void warn_to_stderr(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

std::string checksum_hex(std::uint64_t checksum) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t tile_seed(std::uint64_t base, const std::string& source_id) noexcept {
  if (base == 0) {
    return 0;
  }
  const std::uint64_t s = mix64(base ^ fnv1a64(source_id));
  return s == 0 ? 1 : s;
}

Manifest build_corpus(std::span<const SourceImage> images, const CorpusConfig& cfg,
                      const std::filesystem::path& out_dir, const WarningSink& warn) {
  if (images.empty()) {
    throw ValidationError("build_corpus needs at least one image");
  }
  if (cfg.settings.empty()) {
    throw ValidationError("build_corpus needs at least one (overlap, noise) setting");
  }
  // Geometry is validated up front so a bad setting fails before any output.
  std::vector<IlluminationGrid> grids;
  for (const auto& s : cfg.settings) {
    if (!(s.noise_std >= 0.0)) {
      throw ValidationError("noise std must be non-negative");
    }
    grids.push_back(make_grid(cfg.geometry, s.overlap));
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "cubes", ec);
  std::filesystem::create_directories(out_dir / "gt", ec);
  if (ec) {
    throw IoError("cannot create corpus directories under '" + out_dir.string() + "'");
  }

  std::vector<Tile> tiles;
  for (const auto& source : images) {
    auto more = make_tiles(source, cfg, warn);
    std::ranges::move(more, std::back_inserter(tiles));
  }
  for (const auto& tile : tiles) {
    write_cube(make_image_cube(ground_truth_amplitude(tile.object), tile.source_id),
               out_dir / "gt" / (tile.source_id + ".fpc"));
  }

  const std::size_t n_settings = cfg.settings.size();
  std::vector<ManifestRow> rows(tiles.size() * n_settings);
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t task) {
    const Tile& tile = tiles[task / n_settings];
    const std::size_t si = task % n_settings;
    const CorpusSetting& setting = cfg.settings[si];
    const IlluminationGrid& grid = grids[si];
    const Pupil pupil = grid.make_pupil(cfg.geometry.edge);
    const std::uint64_t noise_seed = tile_seed(cfg.noise_seed, tile.source_id);
    const std::uint64_t shuffle = tile_seed(cfg.shuffle_seed, tile.source_id + "/shuffle");

    CubeProvenance prov;
    prov.source_id = tile.source_id;
    prov.ground_truth = "gt/" + tile.source_id + ".fpc";
    prov.overlap_target = setting.overlap;
    const IntensityCube cube =
        build_cube(tile.object, grid, pupil, NoiseSpec{setting.noise_std, noise_seed}, shuffle, prov);
    const std::string rel = "cubes/" + cube_file_name(tile.source_id, setting);
    write_cube(cube, out_dir / rel);
    if (cfg.write_upsampled) {
      std::filesystem::path up = out_dir / rel;
      up.replace_extension(".up.fpc");
      write_cube(upsample_cube(cube, cfg.geometry.hires_side), up);
    }
    rows[task] = ManifestRow{rel, tile.source_id, setting.overlap, setting.noise_std, noise_seed,
                             payload_checksum(cube)};
  });

  Manifest manifest;
  manifest.rows = std::move(rows);
  write_manifest(manifest, out_dir / kManifestFileName);
  write_corpus_json(cfg, out_dir / "corpus.json");
  return manifest;
}

Manifest build_corpus(std::span<const std::filesystem::path> image_paths, const CorpusConfig& cfg,
                      const std::filesystem::path& out_dir, const WarningSink& warn) {
  if (image_paths.empty()) {
    throw ValidationError("build_corpus needs at least one image");
  }
  std::vector<SourceImage> images;
  std::vector<std::string> skipped;
  for (const auto& path : image_paths) {
    try {
      LoadedImage loaded = read_image(path);
      images.push_back({path.stem().string(), std::move(loaded.image), loaded.white_level});
    } catch (const Error& e) {
      warn(std::string("skipping ") + e.what());
      skipped.push_back(path.string() + ": " + e.what());
    }
  }
  if (images.empty()) {
    throw IoError("none of the input images could be read");
  }
  Manifest manifest = build_corpus(images, cfg, out_dir, warn);
  manifest.skipped = std::move(skipped);
  if (!manifest.skipped.empty()) {
    write_manifest(manifest, out_dir / kManifestFileName);
  }
  return manifest;
}

void write_manifest(const Manifest& manifest, std::ostream& out) {
  out << kManifestHeader << "\n";
  for (const auto& row : manifest.rows) {
    out << csv_escape(row.cube_path) << "," << csv_escape(row.source) << ","
        << format_double(row.overlap) << "," << format_double(row.noise_std) << "," << row.seed
        << "," << checksum_hex(row.checksum) << "\n";
  }
  for (const auto& s : manifest.skipped) {
    std::string line = s;
    std::ranges::replace(line, '\n', ' ');
    out << "# skipped: " << line << "\n";
  }
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write manifest '" + path.string() + "'");
  }
  write_manifest(manifest, out);
  if (!out) {
    throw IoError("failed writing manifest '" + path.string() + "'");
  }
}

Manifest read_manifest(std::istream& in) {
  Manifest manifest;
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kManifestHeader)) {
    throw FormatError(FormatErrorCode::BadMetadata, "manifest: missing or wrong header");
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    if (line.starts_with("# skipped: ")) {
      manifest.skipped.push_back(line.substr(11));
      continue;
    }
    if (line.starts_with("#")) {
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw FormatError(FormatErrorCode::BadMetadata, "manifest: expected 6 fields in '" + line + "'");
    }
    ManifestRow row;
    row.cube_path = f[0];
    row.source = f[1];
    row.overlap = parse_double(f[2], "overlap");
    row.noise_std = parse_double(f[3], "noise_std");
    row.seed = parse_u64(f[4], 10, "seed");
    row.checksum = parse_u64(f[5], 16, "checksum");
    manifest.rows.push_back(std::move(row));
  }
  return manifest;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open manifest '" + path.string() + "'");
  }
  return read_manifest(in);
}

}  // namespace fpm
