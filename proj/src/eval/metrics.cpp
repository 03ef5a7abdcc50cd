#include "graphtale/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace graphtale::eval {

namespace {

std::size_t shared_token_count(const text::TokenSet& a, const text::TokenSet& b) {
    std::size_t n = 0;
    for (const auto& t : a)
        if (b.count(t)) ++n;
    return n;
}

using LabelTable = std::vector<std::pair<std::string, std::string>>;  // (iri, surface form)

std::vector<std::pair<std::string, std::string>> mentions_in(const std::string& text,
                                                             const LabelTable& table) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [iri, form] : table)
        if (text::contains_phrase(text, form)) out.emplace_back(iri, form);
    return out;
}

// The label a triple position presents to the reader: lexical form for
// literals, display label (or IRI local name) for entities.
std::string presented_label(const rdf::Term& t,
                            const std::map<std::string, std::string>& labels) {
    if (t.is_literal()) return t.value;
    auto it = labels.find(t.value);
    if (it != labels.end()) return it->second;
    return t.local_name();
}

bool label_mentioned(const std::string& sentence, const std::string& label) {
    if (label.empty()) return false;
    if (text::contains_phrase(sentence, label)) return true;
    std::string split = text::camel_split(label);
    return split != label && text::contains_phrase(sentence, split);
}

// Explicit date mentions, in reading order: ISO dates as y*10000+m*100+d,
// bare 4-digit years 1000-2999 as y*10000. Word-boundary delimited.
std::vector<long> date_mentions(const std::string& text)
{
    std::vector<long> out;
    std::size_t i = 0;
    auto digit = [&](std::size_t k) {
        return k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]));
    };
    auto wordch = [&](std::size_t k) {
        return k < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[k])) || text[k] == '_');
    };
    while (i < text.size()) {
        if (!digit(i)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (digit(j)) ++j;
        std::size_t len = j - i;
        bool at_start = i == 0 || !wordch(i - 1);
        if (len == 4 && at_start) {
            long year = std::stol(text.substr(i, 4));
            if (year >= 1000 && year <= 2999) {
                if (j < text.size() && text[j] == '-' && digit(j + 1) && digit(j + 2) &&
                    j + 3 < text.size() && text[j + 3] == '-' && digit(j + 4) && digit(j + 5) &&
                    !wordch(j + 6)) {
                    long month = std::stol(text.substr(j + 1, 2));
                    long day = std::stol(text.substr(j + 4, 2));
                    out.push_back(year * 10000 + month * 100 + day);
                    i = j + 6;
                    continue;
                }
                if (!wordch(j)) out.push_back(year * 10000);
            }
        }
        i = j;
    }
    return out;
}

}  // namespace

SupportMode support_mode_from_string(const std::string& name) {
    if (name == "factlet") return SupportMode::Factlet;
    if (name == "triple") return SupportMode::Triple;
    if (name == "fallback") return SupportMode::Fallback;
    throw std::invalid_argument("unknown support mode: " + name);
}

std::string to_string(SupportMode mode) {
    switch (mode) {
        case SupportMode::Factlet: return "factlet";
        case SupportMode::Triple: return "triple";
        case SupportMode::Fallback: return "fallback";
    }
    return "factlet";
}

std::vector<std::string> content_tokens(const std::string& text, const MetricConfig& config) {
    return text::content_tokens(text, config.stopwords);
}

text::TokenSet content_token_set(const std::string& text, const MetricConfig& config) {
    return text::content_token_set(text, config.stopwords);
}

double jaccard(const text::TokenSet& a, const text::TokenSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = shared_token_count(a, b);
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::pair<std::string, std::string>> entity_mentions(
    const std::string& text, const retrieve::EvidencePack& pack) {
    return mentions_in(text, pack.labelled_entities());
}

bool factlet_supports(const std::string& sentence, const std::string& factlet_text,
                      const MetricConfig& config) {
    auto st = content_token_set(sentence, config);
    auto ft = content_token_set(factlet_text, config);
    if (shared_token_count(st, ft) < static_cast<std::size_t>(config.support_min_shared_tokens))
        return false;
    return jaccard(st, ft) >= config.support_jaccard_min;
}

bool sentence_supported(const std::string& sentence, const retrieve::EvidencePack& pack,
                        SupportMode mode, const MetricConfig& config) {
    switch (mode) {
        case SupportMode::Factlet: {
            for (const auto& f : pack.factlets)
                if (factlet_supports(sentence, f.text, config)) return true;
            return false;
        }
        case SupportMode::Triple: {
            for (const auto& t : pack.triples) {
                std::string s_label = presented_label(t.subject, pack.entity_labels);
                std::string o_label = presented_label(t.object, pack.entity_labels);
                if (label_mentioned(sentence, s_label) && label_mentioned(sentence, o_label))
                    return true;
            }
            return false;
        }
        case SupportMode::Fallback: {
            std::set<std::string> iris;
            for (const auto& [iri, form] : entity_mentions(sentence, pack)) iris.insert(iri);
            return iris.size() >= 2;
        }
    }
    return false;
}

double support_ratio(const std::vector<std::string>& sentences,
                     const retrieve::EvidencePack& pack, SupportMode mode,
                     const MetricConfig& config) {
    if (sentences.empty()) throw EmptySection();
    std::size_t supported = 0;
    for (const auto& s : sentences)
        if (sentence_supported(s, pack, mode, config)) ++supported;
    return static_cast<double>(supported) / static_cast<double>(sentences.size());
}

double coverage(const std::string& text, const retrieve::EvidencePack& pack, SupportMode mode,
                const MetricConfig& config) {
    if (mode == SupportMode::Triple) {
        // Rank entity terms by degree within the evidence triples; check the
        // top-N labels against the output text.
        std::map<std::string, int> degree;  // IRI -> incident triple count
        for (const auto& t : pack.triples) {
            if (!t.subject.is_literal()) degree[t.subject.value]++;
            if (!t.object.is_literal()) degree[t.object.value]++;
        }
        if (degree.empty()) throw NoEvidence();
        std::vector<std::pair<std::string, int>> ranked(degree.begin(), degree.end());
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::size_t n = std::min<std::size_t>(ranked.size(),
                                              static_cast<std::size_t>(
                                                  config.top_degree_entity_count));
        std::size_t named = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto it = pack.entity_labels.find(ranked[i].first);
            std::string label = it != pack.entity_labels.end()
                                    ? it->second
                                    : rdf::Term::iri(ranked[i].first).local_name();
            if (label_mentioned(text, label)) ++named;
        }
        return static_cast<double>(named) / static_cast<double>(n);
    }
    // Factlet mode (fallback evaluates like factlet mode: the factlets are
    // the only text-form evidence).
    if (pack.factlets.empty()) throw NoEvidence();
    auto st = content_token_set(text, config);
    std::size_t used = 0;
    for (const auto& f : pack.factlets) {
        auto ft = content_token_set(f.text, config);
        if (shared_token_count(st, ft) >=
            static_cast<std::size_t>(config.support_min_shared_tokens))
            ++used;
    }
    return static_cast<double>(used) / static_cast<double>(pack.factlets.size());
}

double fre(const std::string& text, const MetricConfig& config) {
    auto sentence_list = text::split_sentences(text);
    auto word_list = text::words(text);
    if (word_list.empty() || sentence_list.empty()) throw EmptyText();
    long syllables = 0;
    for (const auto& w : word_list) syllables += text::syllable_count(w);
    double W = static_cast<double>(word_list.size());
    double S = static_cast<double>(sentence_list.size());
    double Y = static_cast<double>(syllables);
    return config.fre_base - config.fre_per_sentence * (W / S) -
           config.fre_per_syllable * (Y / W);
}

double local_cohesion(const std::vector<std::string>& sentences, const MetricConfig& config) {
    if (sentences.size() < 2) return 0.0;
    std::size_t banded = 0;
    for (std::size_t i = 0; i + 1 < sentences.size(); ++i) {
        double j = jaccard(content_token_set(sentences[i], config),
                           content_token_set(sentences[i + 1], config));
        if (j >= config.local_band_low && j <= config.local_band_high) ++banded;
    }
    return static_cast<double>(banded) / static_cast<double>(sentences.size() - 1);
}

double weighted_global_cohesion(const CohesionSignals& s, const MetricConfig& config) {
    const auto& w = config.global_weights;
    return w.local * s.local + w.entity_flow * s.entity_flow + w.bridge * s.bridge_rate +
           w.temporal * s.temporal_consistency + w.reference * s.reference_stability;
}

CohesionSignals cohesion_signals(const std::vector<std::vector<std::string>>& beat_sentences,
                                 const std::vector<const retrieve::EvidencePack*>& packs,
                                 const MetricConfig& config) {
    CohesionSignals out;
    std::size_t beats = beat_sentences.size();

    // One story-level label table: mention-based signals all read from it.
    LabelTable table;
    {
        std::map<std::string, std::string> labels;
        for (const auto* p : packs)
            if (p) labels.insert(p->entity_labels.begin(), p->entity_labels.end());
        for (const auto& [iri, label] : labels) {
            table.emplace_back(iri, label);
            std::string split = text::camel_split(label);
            if (split != label) table.emplace_back(iri, split);
        }
    }

    auto beat_text = [&](std::size_t b) {
        std::string t;
        for (const auto& s : beat_sentences[b]) {
            if (!t.empty()) t += " ";
            t += s;
        }
        return t;
    };

    // local: mean of per-beat banded adjacent-sentence similarity.
    double local_sum = 0.0;
    for (const auto& sentences : beat_sentences) local_sum += local_cohesion(sentences, config);
    out.local = beats ? local_sum / static_cast<double>(beats) : 0.0;

    // entity_flow: adjacent beats sharing >=1 mentioned entity; vacuously 1
    // for single-beat stories.
    std::vector<std::set<std::string>> beat_entities(beats);
    for (std::size_t b = 0; b < beats; ++b)
        for (const auto& [iri, form] : mentions_in(beat_text(b), table))
            beat_entities[b].insert(iri);
    if (beats < 2) {
        out.entity_flow = 1.0;
    } else {
        std::size_t flowing = 0;
        for (std::size_t b = 0; b + 1 < beats; ++b) {
            bool shared = false;
            for (const auto& e : beat_entities[b])
                if (beat_entities[b + 1].count(e)) shared = true;
            if (shared) ++flowing;
        }
        out.entity_flow = static_cast<double>(flowing) / static_cast<double>(beats - 1);
    }

    // bridge_rate: beats after the first whose opening sentence mentions an
    // entity already mentioned earlier; vacuously 1 with <2 beats.
    if (beats < 2) {
        out.bridge_rate = 1.0;
    } else {
        std::set<std::string> earlier;
        std::size_t bridged = 0;
        earlier.insert(beat_entities[0].begin(), beat_entities[0].end());
        for (std::size_t b = 1; b < beats; ++b) {
            bool bridge = false;
            if (!beat_sentences[b].empty())
                for (const auto& [iri, form] : mentions_in(beat_sentences[b][0], table))
                    if (earlier.count(iri)) bridge = true;
            if (bridge) ++bridged;
            earlier.insert(beat_entities[b].begin(), beat_entities[b].end());
        }
        out.bridge_rate = static_cast<double>(bridged) / static_cast<double>(beats - 1);
    }

    // temporal_consistency: explicit dates appear in non-decreasing order;
    // 1 with fewer than two dated mentions.
    std::vector<long> dates;
    for (std::size_t b = 0; b < beats; ++b)
        for (const auto& s : beat_sentences[b])
            for (long d : date_mentions(s)) dates.push_back(d);
    if (dates.size() < 2) {
        out.temporal_consistency = 1.0;
    } else {
        std::size_t ordered = 0;
        for (std::size_t i = 0; i + 1 < dates.size(); ++i)
            if (dates[i] <= dates[i + 1]) ++ordered;
        out.temporal_consistency =
            static_cast<double>(ordered) / static_cast<double>(dates.size() - 1);
    }

    // reference_stability: entities mentioned in >=2 sentences should keep
    // one surface form; 1 when no entity recurs.
    std::map<std::string, std::set<std::string>> forms;   // iri -> surface forms
    std::map<std::string, std::size_t> mention_counts;    // iri -> #sentences mentioning it
    for (std::size_t b = 0; b < beats; ++b)
        for (const auto& s : beat_sentences[b]) {
            std::map<std::string, std::set<std::string>> here;
            for (const auto& [iri, form] : mentions_in(s, table)) here[iri].insert(form);
            for (const auto& [iri, fs] : here) {
                mention_counts[iri]++;
                forms[iri].insert(fs.begin(), fs.end());
            }
        }
    double stability_sum = 0.0;
    std::size_t recurrent = 0;
    for (const auto& [iri, count] : mention_counts) {
        if (count < 2) continue;
        ++recurrent;
        double f = static_cast<double>(forms[iri].size());
        double m = static_cast<double>(count);
        double stability = 1.0 - (f - 1.0) / (m - 1.0);
        stability_sum += std::clamp(stability, 0.0, 1.0);
    }
    out.reference_stability = recurrent ? stability_sum / static_cast<double>(recurrent) : 1.0;

    return out;
}

double global_cohesion(const std::vector<std::vector<std::string>>& beat_sentences,
                       const std::vector<const retrieve::EvidencePack*>& packs,
                       const MetricConfig& config) {
    return weighted_global_cohesion(cohesion_signals(beat_sentences, packs, config), config);
}

}  // namespace graphtale::eval
