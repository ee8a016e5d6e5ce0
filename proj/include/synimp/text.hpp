#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace synimp {

std::string_view trim(std::string_view s);

// Whitespace-delimited words, original spelling preserved.
std::vector<std::string> split_words(std::string_view text);

std::string join_words(const std::vector<std::string>& words);

// Lowercased words with ASCII punctuation removed. Tokens that become empty
// are dropped. Non-ASCII bytes pass through unchanged.
std::vector<std::string> normalized_words(std::string_view text);

}  // namespace synimp
