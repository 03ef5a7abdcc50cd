#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace graphtale::text {

using TokenSet = std::set<std::string>;

// The shipped English stopword list (~180 entries). Every token-based metric
// and the snippet scorer run against this one list; reports embed its hash so
// a silent edit shows up in the output.
const TokenSet& default_stopwords();
std::uint64_t stopword_list_hash();

// Lowercased content tokens: punctuation collapsed to spaces, tokens split on
// apostrophes with single-character fragments dropped, stopwords removed.
std::vector<std::string> content_tokens(std::string_view text, const TokenSet& stopwords);
TokenSet content_token_set(std::string_view text, const TokenSet& stopwords);

// Whitespace-delimited words carrying at least one alphanumeric character,
// outer punctuation trimmed. This is the word count for readability.
std::vector<std::string> words(std::string_view text);

// Sentence segmentation: terminal punctuation followed by whitespace and an
// uppercase letter or quote, with an abbreviation exception list. The
// generator and the evaluator must segment identically, so both call this.
std::vector<std::string> split_sentences(std::string_view text);

// Frozen syllable heuristic: vowel groups (aeiouy), silent terminal 'e'
// dropped unless the word ends in consonant+"le", minimum 1 per word.
int syllable_count(std::string_view word);

std::string lowercase(std::string_view s);

// "RogerTaylor" -> "Roger Taylor", "LiveAid1985" -> "Live Aid 1985".
std::string camel_split(std::string_view s);

// Word-boundary, case-insensitive containment ("Queen" in "queen played").
bool contains_phrase(std::string_view text, std::string_view phrase);

}  // namespace graphtale::text
