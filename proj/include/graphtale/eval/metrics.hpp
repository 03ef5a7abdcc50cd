#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "graphtale/retrieve/pack.hpp"
#include "graphtale/text/tokens.hpp"

namespace graphtale::eval {

struct EmptySection : std::runtime_error {
    EmptySection() : std::runtime_error("section has no sentences") {}
};
struct NoEvidence : std::runtime_error {
    NoEvidence() : std::runtime_error("evidence denominator set is empty") {}
};
struct EmptyText : std::runtime_error {
    EmptyText() : std::runtime_error("text has no words") {}
};

enum class SupportMode { Factlet, Triple, Fallback };

SupportMode support_mode_from_string(const std::string& name);  // "factlet"|"triple"|"fallback"
std::string to_string(SupportMode mode);

struct MetricConfig {
    double support_jaccard_min = 0.22;
    int support_min_shared_tokens = 2;
    double local_band_low = 0.15;
    double local_band_high = 0.65;
    struct GlobalWeights {
        double local = 0.35;
        double entity_flow = 0.25;
        double bridge = 0.15;
        double temporal = 0.15;
        double reference = 0.10;
    } global_weights;
    text::TokenSet stopwords = text::default_stopwords();
    double fre_base = 206.835;
    double fre_per_sentence = 1.015;
    double fre_per_syllable = 84.6;
    int top_degree_entity_count = 10;
};

// The single content-token function behind every token-based metric.
std::vector<std::string> content_tokens(const std::string& text, const MetricConfig& config);
text::TokenSet content_token_set(const std::string& text, const MetricConfig& config);

// |a ∩ b| / |a ∪ b|, 0 when both sets are empty.
double jaccard(const text::TokenSet& a, const text::TokenSet& b);

// True when the factlet grounds the sentence: at least
// support_min_shared_tokens shared content tokens and token Jaccard >=
// support_jaccard_min. The generator's evidence gate calls this too, so
// enforcement and measurement cannot drift apart.
bool factlet_supports(const std::string& sentence, const std::string& factlet_text,
                      const MetricConfig& config);

bool sentence_supported(const std::string& sentence, const retrieve::EvidencePack& pack,
                        SupportMode mode, const MetricConfig& config);

// Mean supported flag over the section's sentences. Throws EmptySection.
double support_ratio(const std::vector<std::string>& sentences,
                     const retrieve::EvidencePack& pack, SupportMode mode,
                     const MetricConfig& config);

// Factlet mode: fraction of factlets sharing >= support_min_shared_tokens
// content tokens with the section text. Triple mode: fraction of the
// top-degree evidence entities whose label appears in the text. Throws
// NoEvidence when the denominator is empty.
double coverage(const std::string& text, const retrieve::EvidencePack& pack, SupportMode mode,
                const MetricConfig& config);

// Flesch Reading Ease under the frozen syllable heuristic. Throws EmptyText.
double fre(const std::string& text, const MetricConfig& config);

// Fraction of adjacent sentence pairs with banded Jaccard similarity;
// 0 for single-sentence sections (no adjacent pairs).
double local_cohesion(const std::vector<std::string>& sentences, const MetricConfig& config);

struct CohesionSignals {
    double local = 0.0;
    double entity_flow = 0.0;
    double bridge_rate = 0.0;
    double temporal_consistency = 0.0;
    double reference_stability = 0.0;
};

double weighted_global_cohesion(const CohesionSignals& signals, const MetricConfig& config);

// Computes the five sub-signals over the story's non-suppressed beats.
// Sub-signal definitions are substitutes documented at the definition site;
// only the weights are externally fixed.
CohesionSignals cohesion_signals(const std::vector<std::vector<std::string>>& beat_sentences,
                                 const std::vector<const retrieve::EvidencePack*>& packs,
                                 const MetricConfig& config);

double global_cohesion(const std::vector<std::vector<std::string>>& beat_sentences,
                       const std::vector<const retrieve::EvidencePack*>& packs,
                       const MetricConfig& config);

// Mention detection used by fallback support and the cohesion sub-signals:
// exact word-boundary label matching plus camel-case-split variants.
// Returns matched (entity IRI, surface form) pairs.
std::vector<std::pair<std::string, std::string>> entity_mentions(
    const std::string& text, const retrieve::EvidencePack& pack);

}  // namespace graphtale::eval
