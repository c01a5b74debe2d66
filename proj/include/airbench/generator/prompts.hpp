#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "airbench/errors.hpp"
#include "airbench/types.hpp"

namespace airbench::gen {

namespace default_templates {

inline constexpr std::string_view kCharacter =
    R"(You are helping build a search evaluation dataset.

Given the document below, list 3 distinct characters who might find this document useful.

Document title: {{title}}
Document:
{{document}}

Answer with one short character description per line inside a fenced code block (```), and nothing else.)";

inline constexpr std::string_view kScenario =
    R"(Given the document and the character below, describe one scenario in which the character might find the document useful.

Document title: {{title}}
Document:
{{document}}

Character: {{character}}

Answer with a single one-line scenario description inside a fenced code block (```), and nothing else.)";

inline constexpr std::string_view kQuery =
    R"(Given the document, the character, and the scenario below, generate one search query that the character would issue in that scenario and that the document satisfies.

Document title: {{title}}
Document:
{{document}}

Character: {{character}}
Scenario: {{scenario}}

Requirements:
- The query must be {{type_instruction}}.
- The query must contain {{length_instruction}}.
- The query must be formulated {{info_instruction}}.

Answer with the query alone inside a fenced code block (```), and nothing else.)";

inline constexpr std::string_view kRewrite =
    R"(Rewrite the search query below in a {{style}} style. Keep the meaning unchanged, and avoid reusing tokens that appear in the document.

Query: {{query}}

Document:
{{document}}

Answer with the rewritten query alone inside a fenced code block (```), and nothing else.)";

inline constexpr std::string_view kHardNegative =
    R"(Given the search query and the relevant document below, generate {{count}} hard negative documents. Each hard negative must look superficially similar to the relevant document but must not satisfy the query, and must differ from the relevant document.

Query: {{query}}

Relevant document:
{{document}}

Answer inside a fenced code block (```), with exactly one hard negative document per line, and nothing else.)";

// 4-level relevance judgment. The wording of this prompt is load-bearing:
// downstream parsing expects a bare number 0-3.
inline constexpr std::string_view kJudge =
    R"(For the following query and document, judge whether the document is relevant to the query.

Query:
```
{{query}}
'''

Document:
```
{{doc}}
'''

Your output must be one of the following:
- 0: The document is not relevant to the query.
- 1: The document is superficially relevant but actually not relevant to the query.
- 2: The document is somewhat relevant to the query.
- 3: The document is relevant to the query.

Do not explain your answer in the output. Your output must be a single number.)";

inline constexpr std::string_view kDiversityType =
    R"(Select the most suitable type for the query below from the optional types.

Query: {{query}}

Optional types: how, what, when, where, which, who, why, yes/no, claim, others.

Answer with the type alone, and nothing else.)";

inline constexpr std::string_view kDiversityStyle =
    R"(Select the most suitable style for the query below from the optional styles.

Query: {{query}}

Optional styles: formal, informal, professional, casual, complicated, concise, academic, others.

Answer with the style alone, and nothing else.)";

}  // namespace default_templates

/// Replaces every {{key}} slot in `text` with its value. Unknown slots are
/// an error so template typos fail loudly.
inline std::string render_template(
    std::string_view text, const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw ConfigError("unterminated {{ in prompt template");
    }
    const std::string key(text.substr(open + 2, close - open - 2));
    auto it = slots.find(key);
    if (it == slots.end()) {
      throw ConfigError("prompt template slot has no value: " + key);
    }
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

/// The versioned set of prompt templates. Defaults are embedded; a template
/// directory with a manifest.json ({"version": ..., "templates": {name:
/// file}}) overrides them.
class PromptLibrary {
 public:
  static PromptLibrary defaults() {
    PromptLibrary lib;
    lib.version_ = "builtin-1";
    lib.templates_["character"] = std::string(default_templates::kCharacter);
    lib.templates_["scenario"] = std::string(default_templates::kScenario);
    lib.templates_["query"] = std::string(default_templates::kQuery);
    lib.templates_["rewrite"] = std::string(default_templates::kRewrite);
    lib.templates_["hard_negative"] =
        std::string(default_templates::kHardNegative);
    lib.templates_["judge"] = std::string(default_templates::kJudge);
    lib.templates_["diversity_type"] =
        std::string(default_templates::kDiversityType);
    lib.templates_["diversity_style"] =
        std::string(default_templates::kDiversityStyle);
    return lib;
  }

  static PromptLibrary load(const std::filesystem::path& dir) {
    std::ifstream manifest_in(dir / "manifest.json");
    if (!manifest_in) {
      throw InputError("cannot open template manifest: " +
                       (dir / "manifest.json").string());
    }
    nlohmann::json manifest =
        nlohmann::json::parse(manifest_in, nullptr, false);
    if (manifest.is_discarded()) {
      throw InputError("template manifest is not valid JSON");
    }
    PromptLibrary lib = defaults();
    lib.version_ = manifest.value("version", std::string("unversioned"));
    for (const auto& [name, file] : manifest.at("templates").items()) {
      std::ifstream in(dir / file.get<std::string>(), std::ios::binary);
      if (!in) {
        throw InputError("cannot open template file: " +
                         (dir / file.get<std::string>()).string());
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      std::string text = buf.str();
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
        text.pop_back();
      }
      lib.templates_[name] = std::move(text);
    }
    return lib;
  }

  const std::string& version() const { return version_; }

  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& slots) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) {
      throw ConfigError("no prompt template named " + name);
    }
    return render_template(it->second, slots);
  }

 private:
  std::string version_;
  std::map<std::string, std::string> templates_;
};

// --- attribute slot fills ---------------------------------------------------

inline std::string length_instruction(LengthBucket bucket) {
  switch (bucket) {
    case LengthBucket::Under5: return "less than 5 words";
    case LengthBucket::From5To9: return "less than 10 words";
    case LengthBucket::From10To20: return "10 to 20 words";
    case LengthBucket::Over20: return "at least 20 words";
  }
  return "less than 10 words";
}

inline std::string type_instruction(QueryType type) {
  switch (type) {
    case QueryType::Question: return "a question";
    case QueryType::Problem: return "a problem";
    case QueryType::Claim: return "a claim";
  }
  return "a question";
}

inline std::string info_instruction(InfoType info) {
  return info == InfoType::Overall
             ? "based on the overall information in the document"
             : "based on partial information beyond the main topic of the "
               "document";
}

// --- reply parsing -----------------------------------------------------------

/// Extracts the line-delimited payload of a reply. If the reply contains a
/// fenced code block, only the first block counts; otherwise the whole
/// reply is treated as the payload (chatty-model fallback). Lines are
/// trimmed and list markers like "1." or "-" are stripped.
inline std::vector<std::string> parse_fenced_lines(const std::string& reply) {
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    const std::size_t first = s.find_first_not_of(ws);
    if (first == std::string::npos) return std::string{};
    const std::size_t last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
  };
  auto strip_marker = [&](std::string s) {
    if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && s[1] == ' ') {
      return trim(s.substr(2));
    }
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) {
      return trim(s.substr(i + 1));
    }
    return s;
  };

  std::vector<std::string> all_lines;
  std::istringstream in(reply);
  std::string line;
  while (std::getline(in, line)) all_lines.push_back(line);

  std::vector<std::string> payload;
  std::size_t fence_open = all_lines.size();
  for (std::size_t i = 0; i < all_lines.size(); ++i) {
    if (trim(all_lines[i]).rfind("```", 0) == 0) {
      fence_open = i;
      break;
    }
  }
  if (fence_open < all_lines.size()) {
    for (std::size_t i = fence_open + 1; i < all_lines.size(); ++i) {
      if (trim(all_lines[i]).rfind("```", 0) == 0) break;
      payload.push_back(all_lines[i]);
    }
  } else {
    payload = all_lines;
  }

  std::vector<std::string> items;
  for (const std::string& raw : payload) {
    std::string item = strip_marker(trim(raw));
    if (!item.empty()) items.push_back(std::move(item));
  }
  return items;
}

}  // namespace airbench::gen
