#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "vulnbench/corpus.hpp"
#include "vulnbench/error.hpp"
#include "vulnbench/system_prompt.hpp"

namespace vulnbench {

struct PromptBundle {
  std::string system_message;
  std::string user_message;
  std::string project_id;
  bool operator==(const PromptBundle&) const = default;
};

inline std::string file_header(const std::string& path) { return "// File: " + path; }

/// One aggregated prompt per project: each file in path order as
/// "// File: <path>\n<content>\n\n". Source lines are not numbered.
inline PromptBundle build_prompt(const ProjectSource& src) {
  if (src.files.empty()) throw Error(ErrorCode::EmptyProject, "project has no files", src.project_id);
  PromptBundle bundle;
  bundle.system_message = std::string(kSystemPrompt);
  bundle.project_id = src.project_id;

  std::vector<const SourceFile*> ordered;
  std::size_t total = 0;
  for (const auto& f : src.files) {
    ordered.push_back(&f);
    total += f.path.size() + f.content.size() + 12;
  }
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->path < b->path; });

  bundle.user_message.reserve(total);
  for (const SourceFile* fp : ordered) {
    const SourceFile& f = *fp;
    bundle.user_message += file_header(f.path);
    bundle.user_message += '\n';
    bundle.user_message += f.content;
    bundle.user_message += "\n\n";
  }
  return bundle;
}

}  // namespace vulnbench
