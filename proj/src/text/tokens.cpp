#include "graphtale/text/tokens.hpp"

#include <algorithm>
#include <cctype>

#include "graphtale/util/rng.hpp"

namespace graphtale::text {

namespace {

const char* kStopwords[] = {
    "a", "about", "above", "across", "after", "again", "against", "all", "along",
    "also", "although", "am", "among", "an", "and", "any", "are", "aren", "around",
    "as", "at", "back", "be", "because", "been", "before", "behind", "being",
    "below", "between", "beyond", "both", "but", "by", "can", "cannot", "could",
    "couldn", "despite", "did", "didn", "do", "does", "doesn", "doing", "don",
    "down", "during", "each", "either", "else", "ever", "few", "for", "from",
    "further", "had", "hadn", "has", "hasn", "have", "haven", "having", "he",
    "her", "here", "hers", "herself", "him", "himself", "his", "how", "however",
    "i", "if", "in", "into", "is", "isn", "it", "its", "itself", "just", "ll",
    "may", "me", "might", "more", "most", "must", "mustn", "my", "myself",
    "neither", "never", "no", "nor", "not", "now", "o", "of", "off", "often",
    "on", "once", "only", "onto", "or", "other", "our", "ours", "ourselves",
    "out", "over", "own", "per", "re", "s", "same", "shall", "shan", "she",
    "should", "shouldn", "since", "so", "some", "such", "t", "than", "that",
    "the", "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "though", "through", "thus", "to", "too", "toward",
    "towards", "under", "until", "unto", "up", "upon", "us", "ve", "very", "via",
    "was", "wasn", "we", "were", "weren", "what", "when", "where", "whether",
    "which", "while", "who", "whom", "why", "will", "with", "within", "without",
    "won", "would", "wouldn", "yet", "you", "your", "yours", "yourself",
    "yourselves",
};

const TokenSet kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs",
    "etc", "eg", "ie", "no", "vol", "fig", "approx", "ft",
};

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool is_quote(char c) { return c == '"' || c == '\'' || c == '`'; }

// Replaces UTF-8 right single quotes with ASCII apostrophes so the apostrophe
// rule sees them.
std::string normalize_apostrophes(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xe2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(text[i + 2]) == 0x98 ||
             static_cast<unsigned char>(text[i + 2]) == 0x99)) {
            out.push_back('\'');
            i += 2;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

}  // namespace

const TokenSet& default_stopwords() {
    static const TokenSet set(std::begin(kStopwords), std::end(kStopwords));
    return set;
}

std::uint64_t stopword_list_hash() {
    static const std::uint64_t hash = [] {
        std::uint64_t h = util::kFnvOffset;
        for (const auto& w : default_stopwords()) {
            h = util::fnv1a(w, h);
            h = util::fnv1a("\n", h);
        }
        return h;
    }();
    return hash;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> content_tokens(std::string_view text, const TokenSet& stopwords) {
    std::string normalized = normalize_apostrophes(text);
    std::vector<std::string> out;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        // Apostrophe rule: split and drop single-character fragments.
        std::vector<std::string> parts;
        std::string part;
        for (char c : token) {
            if (c == '\'') {
                parts.push_back(part);
                part.clear();
            } else {
                part.push_back(c);
            }
        }
        parts.push_back(part);
        for (auto& p : parts) {
            if (parts.size() > 1 && p.size() <= 1) continue;
            if (p.empty()) continue;
            if (!stopwords.count(p)) out.push_back(p);
        }
        token.clear();
    };
    for (char raw : normalized) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else if (raw == '\'') {
            if (!token.empty()) token.push_back('\'');
        } else {
            flush();
        }
    }
    flush();
    return out;
}

TokenSet content_token_set(std::string_view text, const TokenSet& stopwords) {
    auto toks = content_tokens(text, stopwords);
    return TokenSet(toks.begin(), toks.end());
}

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        while (!cur.empty() && !std::isalnum(static_cast<unsigned char>(cur.front())))
            cur.erase(cur.begin());
        while (!cur.empty() && !std::isalnum(static_cast<unsigned char>(cur.back())))
            cur.pop_back();
        bool has_alnum = std::any_of(cur.begin(), cur.end(), [](unsigned char c) {
            return std::isalnum(c) != 0;
        });
        if (!cur.empty() && has_alnum) out.push_back(cur);
        cur.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)))
            flush();
        else
            cur.push_back(c);
    }
    flush();
    return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto flush = [&] {
        std::size_t b = cur.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) {
            cur.clear();
            return;
        }
        std::size_t e = cur.find_last_not_of(" \t\r\n");
        out.push_back(cur.substr(b, e - b + 1));
        cur.clear();
    };
    while (i < n) {
        char c = text[i];
        cur.push_back(c);
        if (c == '.' || c == '!' || c == '?') {
            // Swallow runs of terminal punctuation ("?!", "...").
            while (i + 1 < n && (text[i + 1] == '.' || text[i + 1] == '!' || text[i + 1] == '?')) {
                cur.push_back(text[++i]);
            }
            // Previous word, for the abbreviation check.
            std::string prev;
            for (std::size_t j = cur.size(); j-- > 0;) {
                char p = cur[j];
                if (std::isspace(static_cast<unsigned char>(p))) break;
                if (std::isalpha(static_cast<unsigned char>(p)))
                    prev.insert(prev.begin(), static_cast<char>(std::tolower(p)));
            }
            bool abbreviation = c == '.' && kAbbreviations.count(prev) > 0;
            // Closing quote may directly follow the punctuation.
            std::size_t k = i + 1;
            while (k < n && is_quote(text[k])) ++k;
            bool had_space = false;
            while (k < n && std::isspace(static_cast<unsigned char>(text[k]))) {
                had_space = true;
                ++k;
            }
            bool starts_new = k >= n || (had_space && (std::isupper(static_cast<unsigned char>(text[k])) ||
                                                       is_quote(text[k]) ||
                                                       std::isdigit(static_cast<unsigned char>(text[k]))));
            if (!abbreviation && starts_new) {
                while (i + 1 < n && is_quote(text[i + 1])) cur.push_back(text[++i]);
                flush();
            }
        }
        ++i;
    }
    flush();
    return out;
}

int syllable_count(std::string_view word) {
    std::string w;
    for (char c : word)
        if (std::isalpha(static_cast<unsigned char>(c)))
            w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (w.empty()) return 1;
    int groups = 0;
    bool in_group = false;
    for (char c : w) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    if (w.back() == 'e') {
        bool consonant_le = w.size() >= 3 && w[w.size() - 1] == 'e' && w[w.size() - 2] == 'l' &&
                            !is_vowel(w[w.size() - 3]);
        if (!consonant_le && groups > 1) --groups;
    }
    return std::max(groups, 1);
}

std::string camel_split(std::string_view s) {
    std::string out;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (i > 0) {
            unsigned char prev = static_cast<unsigned char>(s[i - 1]);
            bool lower_to_upper = std::isupper(c) && std::islower(prev);
            bool acronym_end = std::isupper(c) && std::isupper(prev) && i + 1 < n &&
                               std::islower(static_cast<unsigned char>(s[i + 1]));
            bool letter_to_digit = std::isdigit(c) && std::isalpha(prev);
            bool digit_to_letter = std::isalpha(c) && std::isdigit(prev);
            if (lower_to_upper || acronym_end || letter_to_digit || digit_to_letter)
                out.push_back(' ');
        }
        out.push_back(static_cast<char>(c));
    }
    return out;
}

bool contains_phrase(std::string_view text, std::string_view phrase) {
    if (phrase.empty()) return false;
    std::string t = lowercase(text);
    std::string p = lowercase(phrase);
    std::size_t pos = 0;
    while ((pos = t.find(p, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(t[pos - 1]));
        std::size_t end = pos + p.size();
        bool right_ok = end >= t.size() || !std::isalnum(static_cast<unsigned char>(t[end]));
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

}  // namespace graphtale::text
