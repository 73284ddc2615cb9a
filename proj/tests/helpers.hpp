#pragma once

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "vast/vast.hpp"

namespace vast::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("vast_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

template <typename F>
Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a vast::Error";
  return Errc::Io;
}

#define EXPECT_VAST_ERROR(stmt, errc) EXPECT_EQ(::vast::testing::error_code_of([&] { stmt; }), (errc))

// Dump from explicit per-word vectors: words[i] gets tensors[i] laid out [layer][subtoken][dim].
inline EmbeddingDump dump_of(const std::vector<std::string>& words, const std::vector<int>& subtokens, int layers,
                             int dim, const std::vector<std::vector<float>>& tensors,
                             Setting setting = Setting::Bleached) {
  DumpManifest m;
  m.model_id = "test";
  m.num_layers = layers;
  m.hidden_dim = dim;
  m.setting = setting;
  for (std::size_t i = 0; i < words.size(); ++i) m.words.push_back({words[i], std::nullopt, subtokens[i], 0});
  assign_offsets(m);
  return make_dump(std::move(m), tensors);
}

// Single-layer, single-subtoken dump from double vectors.
inline EmbeddingDump flat_dump(const std::vector<std::string>& words, const std::vector<Vec>& vs,
                               Setting setting = Setting::Bleached) {
  std::vector<std::vector<float>> t;
  for (const auto& v : vs) t.emplace_back(v.begin(), v.end());
  return dump_of(words, std::vector<int>(words.size(), 1), 1, static_cast<int>(vs.front().size()), t, setting);
}

}  // namespace vast::testing
