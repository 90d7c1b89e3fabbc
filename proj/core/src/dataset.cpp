#include "sumdca/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sumdca/binary_io.hpp"
#include "sumdca/errors.hpp"

namespace sumdca {
namespace {

constexpr std::string_view kVideoMagic = "SDCAVID1";
constexpr std::string_view kEndTag = "END!";

enum Flag : std::uint32_t {
  kFlagBinary = 1u << 0,
  kFlagScores = 1u << 1,
  kFlagUsers = 1u << 2,
  kFlagChangePoints = 1u << 3,
  kFlagPicks = 1u << 4,
};

DataError shape_error(const std::string& msg) { return DataError(DataErrorKind::kShapeInconsistency, msg); }

void check_binary(const std::vector<std::uint8_t>& v, const std::string& what) {
  for (std::size_t t = 0; t < v.size(); ++t)
    if (v[t] > 1)
      throw DataError(DataErrorKind::kMalformed,
                      what + " frame " + std::to_string(t) + " holds " + std::to_string(v[t]) + ", expected 0 or 1");
}

}  // namespace

void VideoRecord::validate() const {
  const std::size_t t = frame_count();
  const std::string who = "video '" + id + "'";
  if (t == 0) throw shape_error(who + " has no frames");
  if (feature_dim() == 0) throw shape_error(who + " has zero feature dimension");
  for (std::size_t r = 0; r < features.rows(); ++r)
    for (std::size_t c = 0; c < features.cols(); ++c)
      if (!std::isfinite(features(r, c)))
        throw DataError(DataErrorKind::kNonFinite, who + " feature (" + std::to_string(r) + ", " +
                                                       std::to_string(c) + ") is not finite");
  auto check_len = [&](std::size_t n, const char* what) {
    if (n != t)
      throw shape_error(who + " " + what + " has " + std::to_string(n) + " entries, expected " + std::to_string(t));
  };
  if (gt_binary) {
    check_len(gt_binary->size(), "gt_binary");
    check_binary(*gt_binary, who + " gt_binary");
  }
  if (gt_scores) {
    check_len(gt_scores->size(), "gt_scores");
    for (double v : *gt_scores)
      if (!std::isfinite(v)) throw DataError(DataErrorKind::kNonFinite, who + " gt_scores contain NaN/Inf");
  }
  for (std::size_t u = 0; u < user_summaries.size(); ++u) {
    check_len(user_summaries[u].size(), "user summary");
    check_binary(user_summaries[u], who + " user summary " + std::to_string(u));
  }
  if (change_points) {
    try {
      change_points->validate(t);
    } catch (const ContractError& e) {
      throw shape_error(who + " change points: " + e.what());
    }
  }
  if (picks) check_len(picks->size(), "picks");
}

void Dataset::validate() const {
  for (const VideoRecord& v : videos) {
    v.validate();
    if (v.feature_dim() != feature_dim)
      throw shape_error("dataset '" + name + "' declares d=" + std::to_string(feature_dim) + " but video '" + v.id +
                        "' has d=" + std::to_string(v.feature_dim()));
  }
}

void write_video(std::ostream& out, const VideoRecord& v) {
  v.validate();
  BinaryWriter w(out);
  std::uint32_t flags = 0;
  if (v.gt_binary) flags |= kFlagBinary;
  if (v.gt_scores) flags |= kFlagScores;
  if (!v.user_summaries.empty()) flags |= kFlagUsers;
  if (v.change_points) flags |= kFlagChangePoints;
  if (v.picks) flags |= kFlagPicks;
  const std::size_t t = v.frame_count();

  w.raw(kVideoMagic);
  w.u32(kVideoFormatVersion);
  w.u32(flags);
  w.u64(t);
  w.u64(v.feature_dim());
  w.string(v.id);
  w.string(v.corpus);
  for (double x : v.features.data()) w.f64(x);

  if (v.gt_binary) {
    w.raw("GTBN");
    w.u64(t);
    w.bytes(*v.gt_binary);
  }
  if (v.gt_scores) {
    w.raw("GTSC");
    w.u64(8 * t);
    for (double x : *v.gt_scores) w.f64(x);
  }
  if (!v.user_summaries.empty()) {
    w.raw("USER");
    w.u64(4 + v.user_summaries.size() * t);
    w.u32(static_cast<std::uint32_t>(v.user_summaries.size()));
    for (const auto& u : v.user_summaries) w.bytes(u);
  }
  if (v.change_points) {
    w.raw("CHPT");
    w.u64(8 + 8 * v.change_points->shot_count());
    w.u64(v.change_points->shot_count());
    for (std::size_t s : v.change_points->starts) w.u64(s);
  }
  if (v.picks) {
    w.raw("PICK");
    w.u64(8 * t);
    for (std::uint64_t p : *v.picks) w.u64(p);
  }
  w.raw(kEndTag);
}

VideoRecord read_video(std::istream& in, const std::string& source) {
  BinaryReader r(in, source);
  if (r.raw(kVideoMagic.size()) != kVideoMagic)
    throw DataError(DataErrorKind::kBadMagic, source + ": not a video file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kVideoFormatVersion)
    throw DataError(DataErrorKind::kVersionMismatch, source + ": video format version " + std::to_string(version) +
                                                         ", expected " + std::to_string(kVideoFormatVersion));
  const std::uint32_t flags = r.u32();
  const std::uint64_t t = r.u64();
  const std::uint64_t d = r.u64();
  if (t == 0 || d == 0 || t > (1ull << 32) || d > (1ull << 20))
    throw shape_error(source + ": implausible header shape T=" + std::to_string(t) + " d=" + std::to_string(d));

  VideoRecord v;
  v.id = r.string();
  v.corpus = r.string();
  r.section("features");
  v.features = Matrix(t, d);
  for (double& x : v.features.data()) x = r.f64();

  std::uint32_t seen = 0;
  while (true) {
    r.section("section tag");
    const std::string tag = r.raw(4);
    if (tag == kEndTag) break;
    r.section(tag);
    const std::uint64_t bytes = r.u64();
    auto expect = [&](std::uint64_t n) {
      if (bytes != n)
        throw shape_error(source + ": section " + tag + " holds " + std::to_string(bytes) + " bytes, expected " +
                          std::to_string(n));
    };
    std::uint32_t bit = 0;
    if (tag == "GTBN") {
      bit = kFlagBinary;
      expect(t);
      v.gt_binary = r.bytes(t);
    } else if (tag == "GTSC") {
      bit = kFlagScores;
      expect(8 * t);
      std::vector<double> s(t);
      for (double& x : s) x = r.f64();
      v.gt_scores = std::move(s);
    } else if (tag == "USER") {
      bit = kFlagUsers;
      const std::uint32_t n = r.u32();
      expect(4 + static_cast<std::uint64_t>(n) * t);
      for (std::uint32_t u = 0; u < n; ++u) v.user_summaries.push_back(r.bytes(t));
    } else if (tag == "CHPT") {
      bit = kFlagChangePoints;
      const std::uint64_t s = r.u64();
      expect(8 + 8 * s);
      std::vector<std::size_t> starts(s);
      for (auto& x : starts) x = r.u64();
      try {
        v.change_points = ShotPartition::from_starts(std::move(starts), t);
      } catch (const ContractError& e) {
        throw shape_error(source + ": change points: " + e.what());
      }
    } else if (tag == "PICK") {
      bit = kFlagPicks;
      expect(8 * t);
      std::vector<std::uint64_t> p(t);
      for (auto& x : p) x = r.u64();
      v.picks = std::move(p);
    } else {
      throw DataError(DataErrorKind::kMalformed, source + ": unknown section tag '" + tag + "'");
    }
    if (seen & bit) throw DataError(DataErrorKind::kMalformed, source + ": duplicate section " + tag);
    seen |= bit;
  }
  if (seen != flags)
    throw DataError(DataErrorKind::kMalformed, source + ": header flags do not match the sections present");
  try {
    v.validate();
  } catch (const DataError& e) {
    throw DataError(e.kind(), source + ": " + e.what());
  }
  return v;
}

void save_video(const std::filesystem::path& path, const VideoRecord& video) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::kIo, "cannot write '" + path.string() + "'");
  write_video(out, video);
  if (!out) throw DataError(DataErrorKind::kIo, "failed writing '" + path.string() + "'");
}

VideoRecord load_video(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open video file '" + path.string() + "'");
  return read_video(in, path.string());
}

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  dataset.validate();
  std::filesystem::create_directories(dir / "videos");
  nlohmann::ordered_json manifest;
  manifest["format_version"] = kDatasetFormatVersion;
  manifest["name"] = dataset.name;
  manifest["feature_dim"] = dataset.feature_dim;
  manifest["aggregation"] = std::string(to_string(dataset.aggregation));
  manifest["videos"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < dataset.videos.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "videos/%04zu.sdv", i);
    save_video(dir / name, dataset.videos[i]);
    manifest["videos"].push_back({{"id", dataset.videos[i].id}, {"corpus", dataset.videos[i].corpus}, {"file", name}});
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::kIo, "cannot write manifest in '" + dir.string() + "'");
  out << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& input) {
  std::filesystem::path path = resolve_data_path(input);
  if (std::filesystem::is_directory(path)) path /= "manifest.json";
  std::ifstream in(path);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open manifest '" + path.string() + "'");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kMalformed, path.string() + ": " + e.what());
  }

  Dataset ds;
  try {
    const auto version = manifest.at("format_version").get<std::uint32_t>();
    if (version != kDatasetFormatVersion)
      throw DataError(DataErrorKind::kVersionMismatch, path.string() + ": manifest version " + std::to_string(version) +
                                                           ", expected " + std::to_string(kDatasetFormatVersion));
    ds.name = manifest.value("name", std::string("dataset"));
    ds.feature_dim = manifest.at("feature_dim").get<std::size_t>();
    ds.aggregation = parse_aggregation(manifest.value("aggregation", std::string("max")));
    const std::filesystem::path base = path.parent_path();
    for (const auto& entry : manifest.at("videos")) {
      VideoRecord v = load_video(base / entry.at("file").get<std::string>());
      if (entry.contains("id") && entry["id"].get<std::string>() != v.id)
        throw shape_error(path.string() + ": manifest id '" + entry["id"].get<std::string>() +
                          "' does not match file id '" + v.id + "'");
      if (entry.contains("corpus")) v.corpus = entry["corpus"].get<std::string>();
      if (v.feature_dim() != ds.feature_dim)
        throw shape_error(path.string() + ": manifest declares d=" + std::to_string(ds.feature_dim) + " but '" +
                          entry.at("file").get<std::string>() + "' has d=" + std::to_string(v.feature_dim()));
      ds.videos.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kMalformed, path.string() + ": " + e.what());
  } catch (const ContractError& e) {
    throw DataError(DataErrorKind::kMalformed, path.string() + ": " + e.what());
  }
  return ds;
}

std::filesystem::path resolve_data_path(const std::filesystem::path& path) {
  if (path.is_absolute() || std::filesystem::exists(path)) return path;
  if (const char* dir = std::getenv("SUMDCA_DATA_DIR"); dir && *dir) {
    const std::filesystem::path candidate = std::filesystem::path(dir) / path;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return path;
}

}  // namespace sumdca
