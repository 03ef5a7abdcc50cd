#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphtale/eval/metrics.hpp"
#include "graphtale/plan/planner.hpp"
#include "graphtale/retrieve/pack.hpp"

namespace graphtale::gen {

struct BackendUnavailable : std::runtime_error {
    explicit BackendUnavailable(const std::string& why)
        : std::runtime_error("text backend unavailable: " + why) {}
};

struct BackendOverflow : std::runtime_error {
    std::size_t prompt_chars;
    std::size_t limit;
    BackendOverflow(std::size_t chars, std::size_t limit_)
        : std::runtime_error("prompt of " + std::to_string(chars) + " chars exceeds backend limit " +
                             std::to_string(limit_)),
          prompt_chars(chars),
          limit(limit_) {}
};

// text in -> text out, plus an identity string and the generation parameters
// recorded into run metadata.
class TextBackend {
public:
    virtual ~TextBackend() = default;
    virtual std::string id() const = 0;
    virtual std::map<std::string, std::string> parameters() const = 0;
    virtual std::string generate(const std::string& prompt) = 0;
};

// Deterministic offline backend: echoes every "- " fact line of the prompt
// verbatim, one sentence per fact. Keeps the whole pipeline testable without
// a hosted model.
class MockBackend : public TextBackend {
public:
    explicit MockBackend(std::size_t max_prompt_chars = 0) : limit_(max_prompt_chars) {}
    std::string id() const override { return "mock"; }
    std::map<std::string, std::string> parameters() const override { return {}; }
    std::string generate(const std::string& prompt) override;

private:
    std::size_t limit_;  // 0 = unlimited
};

struct HttpBackendConfig {
    std::string base_url;             // scheme://host[:port]
    std::string path = "/v1/generate";
    std::string model;
    std::string api_key_env = "GRAPHTALE_API_KEY";
    std::size_t max_prompt_chars = 24000;
    int timeout_seconds = 60;
};

// POSTs {"model", "prompt"} with a bearer token from the environment and
// expects {"text": ...} back. Generation parameters stay at API defaults.
class HttpBackend : public TextBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    std::string id() const override;
    std::map<std::string, std::string> parameters() const override;
    std::string generate(const std::string& prompt) override;

private:
    HttpBackendConfig config_;
};

struct StyleDirectives {
    std::vector<std::string> tone;
    int sentence_target = 3;  // 1..3
    std::string reading_level;

    bool operator==(const StyleDirectives&) const = default;
};

struct MicroOutline {
    int beat_index = 0;
    std::vector<std::size_t> ordered_facts;  // indices into the pack's factlets, pack order
    StyleDirectives style;

    bool operator==(const MicroOutline&) const = default;
};

struct BeatText {
    std::vector<std::string> sentences;
    std::vector<std::vector<std::size_t>> evidence_map;  // per sentence -> factlet indices
    bool suppressed = false;
    std::string suppression_reason;
    std::vector<std::string> log;  // dropped/trimmed sentences, retrim notes

    bool operator==(const BeatText&) const = default;
};

struct StoryOutput {
    std::string persona_id;
    std::string length;
    std::uint64_t seed = 0;
    std::string strategy;
    std::string backend_id;
    std::map<std::string, std::string> backend_parameters;
    std::vector<std::string> beat_tags;  // plan order
    std::vector<BeatText> beats;         // aligned with beat_tags

    bool operator==(const StoryOutput&) const = default;
};

struct GeneratorConfig {
    std::size_t budget = 6;     // factlets per beat outline
    std::size_t min_facts = 1;  // below this the beat is suppressed
    std::string prompt_template;  // empty -> default_prompt_template()
    eval::MetricConfig metrics;   // grounding predicate constants
};

const std::string& default_prompt_template();
std::string load_prompt_template(const std::filesystem::path& file);

// Salience selection: most distinct plan-bound entities mentioned first, then
// snippet-backed over triple-backed, then pack order; the selected subset is
// emitted in pack order.
MicroOutline content_pass(const retrieve::EvidencePack& pack, const plan::Persona& persona,
                          std::size_t budget = 6,
                          const eval::MetricConfig& metrics = eval::MetricConfig{});

std::string build_prompt(const MicroOutline& outline, const retrieve::EvidencePack& pack,
                         const plan::Persona& persona, const std::string& beat_tag,
                         const std::string& prompt_template);

// Realizes the outline through the backend, segments the output, grounds each
// sentence against the outline's factlets with the evaluator's predicate,
// drops ungrounded sentences and keeps at most the first three grounded ones.
// All sentences dropped -> suppressed with reason "ungrounded output". A
// BackendOverflow triggers one outline re-trim before propagating.
BeatText surface_pass(const MicroOutline& outline, const retrieve::EvidencePack& pack,
                      const plan::Persona& persona, TextBackend& backend,
                      const GeneratorConfig& config, const std::string& beat_tag = "");

BeatText generate_beat(const retrieve::EvidencePack& pack, const plan::Persona& persona,
                       TextBackend& backend, const GeneratorConfig& config,
                       const std::string& beat_tag = "");

// One pack per plan beat, generated in plan order.
StoryOutput generate_story(const plan::BeatPlan& plan,
                           const std::vector<retrieve::EvidencePack>& packs,
                           const plan::Persona& persona, TextBackend& backend,
                           const GeneratorConfig& config);

struct LintFinding {
    enum class Kind { AliasLeakage, IdentifierArtifact, FusionRisk, Repetition };
    Kind kind = Kind::AliasLeakage;
    int beat_index = 0;
    int sentence_index = 0;
    std::string message;

    bool operator==(const LintFinding&) const = default;
};

std::string to_string(LintFinding::Kind kind);

// Advisory output checks: query-alias leakage, camel-cased identifier
// artifacts matching KG local names, fusion risk (a sentence drawing on more
// than two distinct evidence subjects), near-duplicate sentences in adjacent
// beats. Never mutates the story.
std::vector<LintFinding> lint_story(const StoryOutput& story,
                                    const std::vector<retrieve::EvidencePack>& packs,
                                    const eval::MetricConfig& metrics = eval::MetricConfig{});

// Canonical JSON round-trip for persisted stories.
std::string story_to_json(const StoryOutput& story);
StoryOutput story_from_json(const std::string& json_text);

}  // namespace graphtale::gen
