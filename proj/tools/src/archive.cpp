#include "archive.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

#include "spinthermo/error.hpp"

namespace spinthermo::cli {

namespace fs = std::filesystem;

fs::path archive_root(const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (const char* env = std::getenv("SPINTHERMO_OUT"); env && *env) return env;
  return "runs";
}

std::string file_stem(const std::string& name) {
  std::string s;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
              c == '_' || c == '.';
    s += ok ? c : '_';
  }
  return s.empty() ? "run" : s;
}

Archive::Archive(fs::path dir) : dir_(std::move(dir)) {
  log_.open(dir_ / "log.txt", std::ios::out | std::ios::trunc);
  if (!log_) throw Error("cannot open " + (dir_ / "log.txt").string());
}

Archive Archive::create(const fs::path& root, const std::string& name) {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
  fs::create_directories(root);
  const std::string base = std::string(stamp) + "-" + file_stem(name);
  fs::path dir = root / base;
  for (int k = 2; fs::exists(dir); ++k) dir = root / (base + "-" + std::to_string(k));
  fs::create_directories(dir / "curves");
  return Archive(dir);
}

void Archive::write_json(const std::string& file, const Json& j) const {
  const fs::path p = dir_ / file;
  if (fs::exists(p)) throw Error("refusing to overwrite " + p.string());
  std::ofstream os(p, std::ios::binary);
  os << j.dump(2) << '\n';
  if (!os) throw Error("cannot write " + p.string());
}

std::string Archive::write_curve(const ScalingCurve& c, const Json& provenance) const {
  const std::string stem = file_stem(c.name);
  const fs::path csv = dir_ / "curves" / (stem + ".csv");
  if (fs::exists(csv)) throw Error("refusing to overwrite " + csv.string());
  write_curve_csv_file(csv.string(), c);
  write_json("curves/" + stem + ".provenance.json", provenance);
  return "curves/" + stem + ".csv";
}

void Archive::log(const std::string& line) {
  log_ << line << '\n';
  log_.flush();
}

Json read_json_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace spinthermo::cli
