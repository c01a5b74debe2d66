#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "airbench/errors.hpp"

namespace airbench {

struct TokenSpan {
  std::size_t begin = 0;  // byte offset of the first token byte
  std::size_t end = 0;    // one past the last token byte
};

/// Deterministic text -> token-list contract. Two builtin splitters:
///   "unicode"    - tokens are maximal runs of alphanumeric ASCII or
///                  non-ASCII codepoints; ASCII punctuation and all
///                  whitespace (incl. common Unicode spaces) split.
///                  ASCII letters are lowercased.
///   "whitespace" - tokens are maximal runs of non-whitespace bytes,
///                  lowercased the same way.
class Tokenizer {
 public:
  explicit Tokenizer(std::string name = "unicode") : name_(std::move(name)) {
    if (name_ != "unicode" && name_ != "whitespace") {
      throw ConfigError("unknown tokenizer: " + name_);
    }
  }

  const std::string& name() const noexcept { return name_; }

  std::vector<TokenSpan> token_spans(std::string_view text) const {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
      std::size_t cp_len = 0;
      bool is_token = token_char_at(text, i, cp_len);
      if (!is_token) {
        i += cp_len;
        continue;
      }
      std::size_t begin = i;
      while (i < n && token_char_at(text, i, cp_len)) i += cp_len;
      spans.push_back(TokenSpan{begin, i});
    }
    return spans;
  }

  std::vector<std::string> tokenize(std::string_view text) const {
    std::vector<std::string> tokens;
    for (const TokenSpan& span : token_spans(text)) {
      std::string token(text.substr(span.begin, span.end - span.begin));
      for (char& c : token) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      tokens.push_back(std::move(token));
    }
    return tokens;
  }

  std::size_t count(std::string_view text) const {
    return token_spans(text).size();
  }

 private:
  // Classifies the codepoint starting at byte i; cp_len receives its byte
  // length (at least 1, also on malformed UTF-8 so scanning always advances).
  bool token_char_at(std::string_view text, std::size_t i,
                     std::size_t& cp_len) const {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      cp_len = 1;
      if (name_ == "whitespace") {
        return std::isspace(c) == 0;
      }
      return std::isalnum(c) != 0;
    }
    std::uint32_t cp = 0;
    cp_len = decode_utf8(text, i, cp);
    if (name_ == "whitespace") {
      return !is_unicode_space(cp);
    }
    return !is_unicode_space(cp) && !is_unicode_punct(cp);
  }

  static std::size_t decode_utf8(std::string_view text, std::size_t i,
                                 std::uint32_t& cp) {
    const unsigned char c0 = static_cast<unsigned char>(text[i]);
    std::size_t len;
    if ((c0 & 0xE0) == 0xC0) {
      len = 2;
      cp = c0 & 0x1F;
    } else if ((c0 & 0xF0) == 0xE0) {
      len = 3;
      cp = c0 & 0x0F;
    } else if ((c0 & 0xF8) == 0xF0) {
      len = 4;
      cp = c0 & 0x07;
    } else {
      cp = 0xFFFD;
      return 1;
    }
    if (i + len > text.size()) {
      cp = 0xFFFD;
      return 1;
    }
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char ck = static_cast<unsigned char>(text[i + k]);
      if ((ck & 0xC0) != 0x80) {
        cp = 0xFFFD;
        return 1;
      }
      cp = (cp << 6) | (ck & 0x3F);
    }
    return len;
  }

  static bool is_unicode_space(std::uint32_t cp) {
    return cp == 0x00A0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200B) ||
           cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
           cp == 0x3000 || cp == 0xFEFF;
  }

  static bool is_unicode_punct(std::uint32_t cp) {
    // General punctuation, CJK symbols/punctuation, fullwidth forms.
    return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
           (cp >= 0x3001 && cp <= 0x303F) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
           (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
           (cp >= 0xFF5B && cp <= 0xFF65) || cp == 0xFFFD;
  }

  std::string name_;
};

/// Token count for `text` under `tokenizer`.
inline std::size_t count_tokens(std::string_view text,
                                const Tokenizer& tokenizer) {
  return tokenizer.count(text);
}

/// Jaccard similarity of the two texts' token sets: |A∩B| / |A∪B|.
/// Two empty token sets count as identical (1.0).
inline double token_set_jaccard(std::string_view a, std::string_view b,
                                const Tokenizer& tokenizer) {
  auto ta = tokenizer.tokenize(a);
  auto tb = tokenizer.tokenize(b);
  std::vector<std::string> sa(ta.begin(), ta.end());
  std::vector<std::string> sb(tb.begin(), tb.end());
  std::sort(sa.begin(), sa.end());
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  std::sort(sb.begin(), sb.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = sa.begin();
  auto ib = sb.begin();
  while (ia != sa.end() && ib != sb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t unioned = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(unioned);
}

}  // namespace airbench
