#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qgpt/llm_gateway.h"

namespace qgpt::testing {

inline std::string FixturePath(const std::string& name) {
  return std::string(QGPT_FIXTURE_DIR) + "/" + name;
}

inline std::string AssetPath(const std::string& name) { return AssetDir() + "/" + name; }

inline std::string Fixture(const std::string& name) { return ReadFile(FixturePath(name)); }

// (template_id, response) pairs; ordinals are assigned per template id.
inline std::shared_ptr<ScriptedProvider> Script(
    const std::vector<std::pair<std::string, std::string>>& replies) {
  std::vector<TranscriptRecord> records;
  std::map<std::string, int> ordinals;
  for (const auto& [tid, text] : replies) {
    records.push_back({tid, ordinals[tid]++, "", text});
  }
  return std::make_shared<ScriptedProvider>(std::move(records));
}

}  // namespace qgpt::testing
