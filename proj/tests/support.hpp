#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "polarsim/agent.hpp"
#include "polarsim/metrics.hpp"

namespace polarsim::testing {

inline std::filesystem::path presets_dir() { return POLARSIM_PRESETS_DIR; }

inline Agent make_agent(const std::string& id, const std::string& standpoint = "Republican", bool observer = false) {
  return Agent(AgentId(id), PersonaProfile{"You are " + id + ", a persona used in tests.", "age: 40",
                                           standpoint, observer});
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("polarsim-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << content;
}

// Relative path -> content for every regular file under dir.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file())
      files[std::filesystem::relative(entry.path(), dir).string()] = read_file(entry.path());
  return files;
}

inline const GroupId kR{"Republican"};
inline const GroupId kD{"Democrat"};

inline GroupScores scores(int love_r, int hate_r, int love_d, int hate_d) {
  return GroupScores{{{kR, love_r}, {kD, love_d}}, {{kR, hate_r}, {kD, hate_d}}};
}

}  // namespace polarsim::testing
