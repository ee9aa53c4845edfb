#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "onboard/corpus.hpp"
#include "onboard/roles.hpp"
#include "onboard/rng.hpp"
#include "onboard/sparse.hpp"
#include "oracles.hpp"

namespace fixture {

onboard::Timestamp ts(const std::string& rfc3339);

onboard::Issue resolved_issue(const std::string& id, const std::string& resolver, const std::string& resolved_at,
                              const std::string& title = "title", const std::string& description = "");
onboard::Issue open_issue(const std::string& id, const std::string& title = "title",
                          const std::string& description = "");

/// Random resolution log: a mix of steady contributors (consecutive months
/// with several resolutions each) and occasional ones, with day-granular
/// timestamps so that equal resolution times occur.
std::vector<oracle::Event> random_events(onboard::Rng& rng, std::size_t max_events);

onboard::Dataset dataset_from_events(const std::vector<oracle::Event>& events, const std::string& project = "p");

onboard::SparseMatrix to_sparse(const std::vector<std::vector<double>>& dense);
std::vector<onboard::Label> to_labels(const std::vector<int>& y);

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

}  // namespace fixture
