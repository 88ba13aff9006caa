// SPDX-License-Identifier: Apache-2.0
#include "kbgen/corpus/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace kbgen::corpus {

namespace {

constexpr std::string_view kOpen = "\xE2\x9F\xA8";   // U+27E8
constexpr std::string_view kClose = "\xE2\x9F\xA9";  // U+27E9

bool ascii_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }
bool ascii_punct(unsigned char c) { return c < 128 && std::ispunct(c); }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (ascii_space(c)) {
      ++i;
      continue;
    }
    if (ascii_punct(c)) {
      out.push_back({std::string(1, static_cast<char>(c)), i, i + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string word;
    while (j < text.size()) {
      const auto d = static_cast<unsigned char>(text[j]);
      if (ascii_space(d) || ascii_punct(d)) break;
      word.push_back(d < 128 ? static_cast<char>(std::tolower(d)) : static_cast<char>(d));
      ++j;
    }
    out.push_back({std::move(word), i, j});
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(std::move(t.text));
  return out;
}

bool is_punctuation(std::string_view token) {
  return token.size() == 1 && ascii_punct(static_cast<unsigned char>(token[0]));
}

std::vector<std::string> value_pattern(std::string_view value) {
  auto words = tokenize_words(value);
  while (!words.empty()) {
    const auto& w = words.back();
    if (w == "." || w == "," || w == ";" || w == ":" || w == "!" || w == "?") {
      words.pop_back();
    } else {
      break;
    }
  }
  return words;
}

std::string unit_token(std::string_view value) {
  std::string out;
  out.reserve(value.size() + kOpen.size() + kClose.size());
  out.append(kOpen).append(value).append(kClose);
  return out;
}

bool is_unit_token(std::string_view token) {
  return token.size() > kOpen.size() + kClose.size() && token.starts_with(kOpen) && token.ends_with(kClose);
}

std::string unit_value(std::string_view token) {
  if (!is_unit_token(token)) return std::string(token);
  return std::string(token.substr(kOpen.size(), token.size() - kOpen.size() - kClose.size()));
}

std::vector<ValueMatch> find_values(const std::vector<Token>& tokens, const std::vector<std::string>& values) {
  // First token -> (pattern, value index), longest pattern first. Values
  // that normalize identically keep the earliest index.
  std::map<std::string, std::vector<std::pair<std::vector<std::string>, std::size_t>>> index;
  std::map<std::vector<std::string>, std::size_t> seen;
  for (std::size_t v = 0; v < values.size(); ++v) {
    auto pattern = value_pattern(values[v]);
    if (pattern.empty() || seen.contains(pattern)) continue;
    seen.emplace(pattern, v);
    index[pattern.front()].emplace_back(std::move(pattern), v);
  }
  for (auto& [first, list] : index) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  }

  std::vector<ValueMatch> out;
  std::size_t sentence = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    if (auto it = index.find(tokens[i].text); it != index.end()) {
      for (const auto& [pattern, v] : it->second) {
        if (i + pattern.size() > tokens.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < pattern.size() && ok; ++k) ok = tokens[i + k].text == pattern[k];
        if (!ok) continue;
        const std::size_t end = i + pattern.size();
        out.push_back({v, i, end, tokens[i].begin, tokens[end - 1].end, sentence});
        i = end;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (is_sentence_end(tokens[i].text)) ++sentence;
    ++i;
  }
  return out;
}

std::vector<std::string> collapse_values(std::string_view text, const KnowledgeBase& kb) {
  const auto tokens = tokenize(text);
  const auto values = kb.unique_values();
  const auto matches = find_values(tokens, values);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  for (const auto& m : matches) {
    for (; i < m.token_begin; ++i) out.push_back(tokens[i].text);
    out.push_back(unit_token(values[m.value]));
    i = m.token_end;
  }
  for (; i < tokens.size(); ++i) out.push_back(tokens[i].text);
  return out;
}

std::string render(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += unit_value(t);
  }
  return out;
}

std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  for (const auto& t : tokens) {
    if (is_sentence_end(t)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(t);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

}  // namespace kbgen::corpus
