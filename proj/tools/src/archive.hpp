#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "spinthermo/serialize.hpp"

namespace spinthermo::cli {

// Archive root: --out, else $SPINTHERMO_OUT, else "runs".
std::filesystem::path archive_root(const std::string& out_flag);

// runs/<UTC timestamp>-<name>/ holding config.json, result.json,
// curves/*.csv and log.txt. Files are written once.
class Archive {
 public:
  static Archive create(const std::filesystem::path& root, const std::string& name);

  const std::filesystem::path& dir() const { return dir_; }
  void write_json(const std::string& file, const Json& j) const;
  // curves/<name>.csv plus a curves/<name>.provenance.json sidecar.
  std::string write_curve(const ScalingCurve& c, const Json& provenance) const;
  // Appends and flushes at once so aborted runs keep their diagnostics.
  void log(const std::string& line);

 private:
  explicit Archive(std::filesystem::path dir);
  std::filesystem::path dir_;
  std::ofstream log_;
};

std::string file_stem(const std::string& name);
Json read_json_file(const std::filesystem::path& path);

}  // namespace spinthermo::cli
