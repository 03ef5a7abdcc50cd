#include "graphtale/gen/generator.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "graphtale/text/tokens.hpp"
#include "json.hpp"

namespace graphtale::gen {

using nlohmann::json;

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos;
         pos += to.size()) {
        text.replace(pos, from.size(), to);
    }
    return text;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

BeatText suppressed_beat(std::string reason) {
    BeatText beat;
    beat.suppressed = true;
    beat.suppression_reason = std::move(reason);
    return beat;
}

bool snippet_backed(const retrieve::Factlet& f) {
    return std::any_of(f.supporting_items.begin(), f.supporting_items.end(),
                       [](const retrieve::SupportRef& r) {
                           return r.kind == retrieve::SupportRef::Kind::Snippet;
                       });
}

// Distinct plan-bound entities whose label (or camel-split variant) appears
// in the factlet text.
std::size_t bound_entity_mentions(const retrieve::EvidencePack& pack, const std::string& text) {
    std::set<std::string> bound;
    for (const auto& [slot, iri] : pack.bound_entities) bound.insert(iri);
    std::set<std::string> mentioned;
    for (const auto& [iri, form] : eval::entity_mentions(text, pack))
        if (bound.count(iri)) mentioned.insert(iri);
    return mentioned.size();
}

}  // namespace

std::string MockBackend::generate(const std::string& prompt) {
    if (limit_ > 0 && prompt.size() > limit_) throw BackendOverflow(prompt.size(), limit_);
    std::istringstream in(prompt);
    std::vector<std::string> facts;
    for (std::string line; std::getline(in, line);)
        if (line.rfind("- ", 0) == 0) facts.push_back(line.substr(2));
    return join(facts, " ");
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw BackendUnavailable("no endpoint configured");
}

std::string HttpBackend::id() const {
    return config_.model.empty() ? "http" : "http:" + config_.model;
}

std::map<std::string, std::string> HttpBackend::parameters() const {
    return {{"endpoint", config_.base_url + config_.path},
            {"model", config_.model},
            {"generation", "api-defaults"}};
}

const std::string& default_prompt_template() {
    static const std::string kTemplate =
        "You are writing one beat of a short cultural-heritage story for {persona_name}.\n"
        "Voice and tone: {tone}.\n"
        "Do: {dos}\n"
        "Avoid: {donts}\n"
        "Reading level: {reading_level}.\n"
        "Story beat: {beat_tag}\n"
        "\n"
        "Write at most {sentence_budget} sentences. Use only the facts listed below.\n"
        "Do not introduce entities, dates, numbers, or claims that are not in the facts.\n"
        "Prefer plain names over identifiers and connect the facts naturally.\n"
        "\n"
        "Facts:\n"
        "{facts}\n";
    return kTemplate;
}

std::string load_prompt_template(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read prompt template: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

MicroOutline content_pass(const retrieve::EvidencePack& pack, const plan::Persona& persona,
                          std::size_t budget, const eval::MetricConfig& metrics) {
    (void)metrics;
    MicroOutline outline;
    outline.beat_index = pack.beat_index;
    outline.style.tone = persona.tone;
    outline.style.reading_level = persona.reading_level;

    struct Ranked {
        std::size_t mentions;
        bool snippet;
        std::size_t index;
    };
    std::vector<Ranked> ranked;
    for (std::size_t i = 0; i < pack.factlets.size(); ++i)
        ranked.push_back({bound_entity_mentions(pack, pack.factlets[i].text),
                          snippet_backed(pack.factlets[i]), i});
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.mentions != b.mentions) return a.mentions > b.mentions;
        if (a.snippet != b.snippet) return a.snippet;
        return a.index < b.index;
    });
    if (ranked.size() > budget) ranked.resize(budget);

    for (const auto& r : ranked) outline.ordered_facts.push_back(r.index);
    std::sort(outline.ordered_facts.begin(), outline.ordered_facts.end());  // pack-order-stable

    auto n = static_cast<int>(outline.ordered_facts.size());
    outline.style.sentence_target = std::clamp(n, 1, 3);
    return outline;
}

std::string build_prompt(const MicroOutline& outline, const retrieve::EvidencePack& pack,
                         const plan::Persona& persona, const std::string& beat_tag,
                         const std::string& prompt_template) {
    std::string facts;
    for (std::size_t i : outline.ordered_facts) facts += "- " + pack.factlets.at(i).text + "\n";

    std::string prompt = prompt_template.empty() ? default_prompt_template() : prompt_template;
    prompt = replace_all(prompt, "{persona_name}", persona.name);
    prompt = replace_all(prompt, "{tone}", join(persona.tone, ", "));
    prompt = replace_all(prompt, "{dos}", persona.dos);
    prompt = replace_all(prompt, "{donts}", persona.donts);
    prompt = replace_all(prompt, "{reading_level}", persona.reading_level);
    prompt = replace_all(prompt, "{beat_tag}", beat_tag);
    prompt = replace_all(prompt, "{sentence_budget}",
                         std::to_string(outline.style.sentence_target));
    prompt = replace_all(prompt, "{facts}", facts);
    return prompt;
}

BeatText surface_pass(const MicroOutline& outline, const retrieve::EvidencePack& pack,
                      const plan::Persona& persona, TextBackend& backend,
                      const GeneratorConfig& config, const std::string& beat_tag) {
    BeatText beat;
    MicroOutline attempt = outline;
    std::string raw;
    for (int round = 0;; ++round) {
        try {
            raw = backend.generate(
                build_prompt(attempt, pack, persona, beat_tag, config.prompt_template));
            break;
        } catch (const BackendOverflow&) {
            if (round > 0 || attempt.ordered_facts.size() <= 1) throw;
            attempt.ordered_facts.resize((attempt.ordered_facts.size() + 1) / 2);
            beat.log.push_back("prompt overflow: outline re-trimmed to " +
                               std::to_string(attempt.ordered_facts.size()) + " facts");
        }
    }

    for (const auto& sentence : text::split_sentences(raw)) {
        std::vector<std::size_t> evidence;
        for (std::size_t i : attempt.ordered_facts)
            if (eval::factlet_supports(sentence, pack.factlets.at(i).text, config.metrics))
                evidence.push_back(i);
        if (evidence.empty()) {
            beat.log.push_back("dropped ungrounded sentence: " + sentence);
            continue;
        }
        if (beat.sentences.size() >= 3) {
            beat.log.push_back("trimmed sentence beyond budget: " + sentence);
            continue;
        }
        beat.sentences.push_back(sentence);
        beat.evidence_map.push_back(std::move(evidence));
    }

    if (beat.sentences.empty()) {
        auto log = std::move(beat.log);
        beat = suppressed_beat("ungrounded output");
        beat.log = std::move(log);
    }
    return beat;
}

BeatText generate_beat(const retrieve::EvidencePack& pack, const plan::Persona& persona,
                       TextBackend& backend, const GeneratorConfig& config,
                       const std::string& beat_tag) {
    if (pack.factlets.size() < config.min_facts || pack.factlets.empty())
        return suppressed_beat("sparse evidence (" + std::to_string(pack.factlets.size()) +
                               " factlets)");
    auto outline = content_pass(pack, persona, config.budget, config.metrics);
    return surface_pass(outline, pack, persona, backend, config, beat_tag);
}

StoryOutput generate_story(const plan::BeatPlan& plan,
                           const std::vector<retrieve::EvidencePack>& packs,
                           const plan::Persona& persona, TextBackend& backend,
                           const GeneratorConfig& config) {
    if (packs.size() != plan.beats.size())
        throw std::invalid_argument("one evidence pack per plan beat required (" +
                                    std::to_string(packs.size()) + " packs, " +
                                    std::to_string(plan.beats.size()) + " beats)");
    StoryOutput story;
    story.persona_id = plan.persona_id;
    story.length = plan.length;
    story.seed = plan.seed;
    story.strategy = packs.empty() ? "" : packs.front().strategy;
    story.backend_id = backend.id();
    story.backend_parameters = backend.parameters();
    for (std::size_t i = 0; i < plan.beats.size(); ++i) {
        story.beat_tags.push_back(plan.beats[i].beat_tag);
        story.beats.push_back(
            generate_beat(packs[i], persona, backend, config, plan.beats[i].beat_tag));
    }
    return story;
}

std::string to_string(LintFinding::Kind kind) {
    switch (kind) {
        case LintFinding::Kind::AliasLeakage: return "alias-leakage";
        case LintFinding::Kind::IdentifierArtifact: return "identifier-artifact";
        case LintFinding::Kind::FusionRisk: return "fusion-risk";
        case LintFinding::Kind::Repetition: return "repetition";
    }
    return "unknown";
}

std::vector<LintFinding> lint_story(const StoryOutput& story,
                                    const std::vector<retrieve::EvidencePack>& packs,
                                    const eval::MetricConfig& metrics) {
    static const std::vector<std::string> kAliases = {"eventName", "locationName", "allWorkName"};

    std::vector<LintFinding> findings;

    // Known KG identifiers: local names of every labelled entity in any pack.
    std::set<std::string> local_names;
    for (const auto& pack : packs)
        for (const auto& [iri, label] : pack.entity_labels)
            local_names.insert(rdf::Term::iri(iri).local_name());

    auto strip_possessive = [](std::string w) {
        for (const char* suffix : {"'s", "\xe2\x80\x99s"}) {
            std::string s(suffix);
            if (w.size() > s.size() && w.compare(w.size() - s.size(), s.size(), s) == 0)
                return w.substr(0, w.size() - s.size());
        }
        return w;
    };
    auto camel_cased = [](const std::string& w) {
        for (std::size_t i = 1; i < w.size(); ++i)
            if (std::islower(static_cast<unsigned char>(w[i - 1])) &&
                std::isupper(static_cast<unsigned char>(w[i])))
                return true;
        return false;
    };

    for (std::size_t b = 0; b < story.beats.size(); ++b) {
        const auto& beat = story.beats[b];
        for (std::size_t s = 0; s < beat.sentences.size(); ++s) {
            const auto& sentence = beat.sentences[s];

            for (const auto& alias : kAliases)
                if (text::contains_phrase(sentence, alias))
                    findings.push_back({LintFinding::Kind::AliasLeakage, static_cast<int>(b),
                                        static_cast<int>(s),
                                        "query alias \"" + alias + "\" leaked into output"});

            for (const auto& word : text::words(sentence)) {
                auto bare = strip_possessive(word);
                if (camel_cased(bare) && local_names.count(bare))
                    findings.push_back({LintFinding::Kind::IdentifierArtifact,
                                        static_cast<int>(b), static_cast<int>(s),
                                        "identifier \"" + bare + "\" rendered verbatim"});
            }

            if (b < packs.size() && s < beat.evidence_map.size()) {
                std::set<rdf::Term> subjects;
                for (std::size_t f : beat.evidence_map[s]) {
                    if (f >= packs[b].factlets.size()) continue;
                    for (const auto& ref : packs[b].factlets[f].supporting_items)
                        if (ref.kind == retrieve::SupportRef::Kind::Triple &&
                            ref.index < packs[b].triples.size())
                            subjects.insert(packs[b].triples[ref.index].subject);
                }
                if (subjects.size() > 2)
                    findings.push_back({LintFinding::Kind::FusionRisk, static_cast<int>(b),
                                        static_cast<int>(s),
                                        "sentence draws on " + std::to_string(subjects.size()) +
                                            " distinct subjects"});
            }
        }

        if (b + 1 < story.beats.size()) {
            const auto& next = story.beats[b + 1];
            for (std::size_t s = 0; s < beat.sentences.size(); ++s) {
                auto a = eval::content_token_set(beat.sentences[s], metrics);
                for (std::size_t t = 0; t < next.sentences.size(); ++t) {
                    auto c = eval::content_token_set(next.sentences[t], metrics);
                    if (eval::jaccard(a, c) > 0.8)
                        findings.push_back(
                            {LintFinding::Kind::Repetition, static_cast<int>(b + 1),
                             static_cast<int>(t),
                             "near-duplicate of beat " + std::to_string(b) + " sentence " +
                                 std::to_string(s)});
                }
            }
        }
    }
    return findings;
}

std::string story_to_json(const StoryOutput& story) {
    json beats = json::array();
    for (std::size_t i = 0; i < story.beats.size(); ++i) {
        const auto& b = story.beats[i];
        beats.push_back(json{{"beat_tag", story.beat_tags[i]},
                             {"sentences", b.sentences},
                             {"evidence_map", b.evidence_map},
                             {"suppressed", b.suppressed},
                             {"suppression_reason", b.suppression_reason},
                             {"log", b.log}});
    }
    json j{{"persona_id", story.persona_id}, {"length", story.length},
           {"seed", story.seed},             {"strategy", story.strategy},
           {"backend_id", story.backend_id}, {"backend_parameters", story.backend_parameters},
           {"beats", beats}};
    return j.dump(2) + "\n";
}

StoryOutput story_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    StoryOutput story;
    story.persona_id = j.at("persona_id").get<std::string>();
    story.length = j.at("length").get<std::string>();
    story.seed = j.at("seed").get<std::uint64_t>();
    story.strategy = j.at("strategy").get<std::string>();
    story.backend_id = j.at("backend_id").get<std::string>();
    story.backend_parameters =
        j.at("backend_parameters").get<std::map<std::string, std::string>>();
    for (const auto& e : j.at("beats")) {
        story.beat_tags.push_back(e.at("beat_tag").get<std::string>());
        BeatText b;
        b.sentences = e.at("sentences").get<std::vector<std::string>>();
        b.evidence_map = e.at("evidence_map").get<std::vector<std::vector<std::size_t>>>();
        b.suppressed = e.at("suppressed").get<bool>();
        b.suppression_reason = e.at("suppression_reason").get<std::string>();
        b.log = e.at("log").get<std::vector<std::string>>();
        story.beats.push_back(std::move(b));
    }
    return story;
}

}  // namespace graphtale::gen
