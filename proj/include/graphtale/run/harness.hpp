#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphtale/cq/library.hpp"
#include "graphtale/eval/report.hpp"
#include "graphtale/gen/generator.hpp"
#include "graphtale/plan/planner.hpp"
#include "graphtale/rdf/graph.hpp"
#include "graphtale/retrieve/retrievers.hpp"

namespace graphtale::run {

inline constexpr const char* kVersion = "1.0.0";

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& message)
        : std::runtime_error("experiment config: " + message) {}
};

struct GraphStrategySettings {
    std::set<std::string> relation_allowlist;
    int hop_limit = 1;
    std::size_t node_cap = 64;
};

// File paths referenced by a config resolve against the config file's
// directory, so a config snapshot stays meaningful wherever it is replayed.
struct ExperimentConfig {
    std::vector<std::string> personas;    // persona ids, files under personas_dir
    std::vector<std::string> lengths;     // Small | Medium | Long
    std::vector<std::string> strategies;  // kg | hybrid | graph
    std::map<std::string, int> runs_per_cell;  // persona id -> run count
    std::uint64_t base_seed = 0;
    std::string backend = "mock";  // mock | http
    std::size_t kg_cap = 25;
    std::size_t snippet_k = 3;
    int generation_budget = 6;
    std::size_t min_facts = 1;
    GraphStrategySettings graph;
    gen::HttpBackendConfig http;

    std::string kg_file;
    std::string cq_dir;
    std::string personas_dir;
    std::string snippets_dir;
    std::string beats_file;
    std::string slot_domains_file;
    std::string verbalization_file;
    std::string prompt_file;
    std::string out_dir = "runs-out";

    std::string snapshot;  // verbatim config JSON, embedded in manifests

    static ExperimentConfig load(const std::string& file);
};

// Pure function of its arguments: an FNV-1a chain over the base seed and the
// cell coordinates. Stable across platforms and releases.
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& persona,
                          const std::string& length, const std::string& strategy,
                          int run_index);

struct RunSpec {
    std::string run_id;  // <persona>-<length>-<strategy>-r<index>
    std::string persona;
    std::string length;
    std::string strategy;
    int run_index = 0;
    std::uint64_t seed = 0;
};

// The full matrix in deterministic order: personas x lengths x strategies,
// run indices innermost.
std::vector<RunSpec> expand_matrix(const ExperimentConfig& config);

// Read-only corpus shared by all workers.
struct Corpus {
    rdf::Graph graph;
    cq::Library library;
    std::map<std::string, plan::Persona> personas;
    retrieve::SnippetIndex snippets;
    plan::BeatTemplates beat_templates;
    plan::SlotDomains slot_domains;
    retrieve::PredicateTemplates verbalization;
    std::string prompt_template;
    eval::MetricConfig metrics;

    static Corpus load(const ExperimentConfig& config);
};

struct RunOutcome {
    RunSpec spec;
    bool ok = false;
    std::string error;  // set when !ok
    eval::MetricReport report;
};

// Strategy dispatch for one plan: direct query packs, query-plus-snippets, or
// seeded neighbourhood expansion. Beat indices follow plan order; the run
// seed drives Graph-RAG tie-breaking.
std::vector<retrieve::EvidencePack> retrieve_packs(const Corpus& corpus,
                                                   const ExperimentConfig& config,
                                                   const plan::BeatPlan& story_plan,
                                                   const std::string& strategy,
                                                   std::uint64_t run_seed);

// Executes one run end to end and writes plan/packs/story/report/manifest
// under <out_dir>/runs/<run_id>/. Throws on failure; artifacts written before
// the failure stay on disk.
eval::MetricReport execute_run(const Corpus& corpus, const ExperimentConfig& config,
                               const RunSpec& spec, gen::TextBackend& backend);

// Runs the whole matrix with up to `workers` threads, then writes
// aggregate.csv, report.md and failures.json under out_dir. Per-run failures
// are recorded and skipped.
std::vector<RunOutcome> run_experiment(const Corpus& corpus, const ExperimentConfig& config,
                                       gen::TextBackend& backend, std::size_t workers = 0);

// Cell means in the two-table layout; runs with no evaluable sections are
// excluded from means and footnoted.
std::string render_markdown(const std::vector<eval::MetricReport>& reports,
                            const std::vector<std::string>& suppressed_run_ids,
                            const std::vector<std::string>& missing_files = {});

std::uint64_t hash_file(const std::string& path);       // FNV-1a over bytes
std::uint64_t hash_directory(const std::string& path);  // chained over sorted files

}  // namespace graphtale::run
