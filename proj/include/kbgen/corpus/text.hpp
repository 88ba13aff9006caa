// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kbgen/corpus/types.hpp"

namespace kbgen::corpus {

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source string
  std::size_t end = 0;
};

/// Lowercases ASCII letters, splits on whitespace and emits every ASCII
/// punctuation character as its own token. Non-ASCII bytes stay inside words.
std::vector<Token> tokenize(std::string_view text);
std::vector<std::string> tokenize_words(std::string_view text);

/// Token pattern used to find a slot value in text: tokenized value with
/// trailing sentence punctuation removed.
std::vector<std::string> value_pattern(std::string_view value);

/// "⟨value⟩": a whole slot value treated as one token.
std::string unit_token(std::string_view value);
bool is_unit_token(std::string_view token);
/// Surface string of a unit token; the token itself otherwise.
std::string unit_value(std::string_view token);

bool is_punctuation(std::string_view token);
inline bool is_sentence_end(std::string_view token) { return token == "."; }

struct ValueMatch {
  std::size_t value = 0;  // index into the searched value list
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
  std::size_t char_begin = 0;
  std::size_t char_end = 0;
  std::size_t sentence = 0;  // 0-based, period-delimited
};

/// Left-to-right scan that at each position takes the longest value whose
/// pattern matches, then skips past it. Periods outside matches advance the
/// sentence counter.
std::vector<ValueMatch> find_values(const std::vector<Token>& tokens, const std::vector<std::string>& values);

/// Tokenizes `text` and replaces each occurrence of a KB slot value by its
/// unit token (longest value first, case-insensitive).
std::vector<std::string> collapse_values(std::string_view text, const KnowledgeBase& kb);

/// Joins tokens with single spaces, unit tokens rendered as their surface.
std::string render(const std::vector<std::string>& tokens);

/// Sentences split on "." tokens; empty sentences are dropped.
std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens);

}  // namespace kbgen::corpus
