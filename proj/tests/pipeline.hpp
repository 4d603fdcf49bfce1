#pragma once

// The canonical fixture pipeline shared by the CLI tests and the acceptance
// runner: simulate, sessions, rq1, rq2, rq3 (edit) into one directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace pipeline {

namespace fs = std::filesystem;

inline const std::vector<std::string>& golden_files() {
  static const std::vector<std::string> files = {
      "sweep.csv",         "sessions.csv",         "latency.csv",
      "usage.csv",         "usage_by_doc.csv",     "progress.csv",
      "kde_progress_300s.csv", "kde_progress_180s.csv", "influence.csv",
      "kde_influence_edit.csv"};
  return files;
}

inline std::vector<std::vector<std::string>> canonical_steps(const fs::path& dir,
                                                             const std::string& config) {
  const std::string log = (dir / "log.jsonl").string();
  const std::string out = dir.string();
  return {{"simulate", config, "--out", log, "--seed", "7"},
          {"sessions", log, "--out", out},
          {"rq1", log, "--out", out},
          {"rq2", log, "--out", out, "--seed", "7"},
          {"rq3", log, "--out", out, "--seed", "7", "--metric", "edit"}};
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       (name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Runs the pipeline through the installed CLI binary; returns the first
/// non-zero exit status, or 0.
inline int run_binary(const std::string& cli, const fs::path& dir, const std::string& config) {
  for (const auto& step : canonical_steps(dir, config)) {
    std::string cmd = "'" + cli + "'";
    for (const auto& a : step) cmd += " '" + a + "'";
    cmd += " > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return rc;
  }
  return 0;
}

}  // namespace pipeline
