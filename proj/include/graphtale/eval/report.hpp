#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphtale/eval/metrics.hpp"
#include "graphtale/gen/generator.hpp"
#include "graphtale/retrieve/pack.hpp"

namespace graphtale::eval {

struct RunMismatch : std::runtime_error {
    RunMismatch(std::size_t beats, std::size_t packs)
        : std::runtime_error("story has " + std::to_string(beats) + " beats but " +
                             std::to_string(packs) + " evidence packs") {}
};

struct SectionEval {
    int section_index = 0;
    double support_ratio = 0.0;  // [0,1]
    double coverage = 0.0;       // [0,1]
    double fre = 0.0;
    double local_cohesion = 0.0;
    std::vector<bool> sentence_supported;

    bool operator==(const SectionEval&) const = default;
};

struct MetricReport {
    std::string run_id;
    std::string persona;
    std::string length;
    std::string strategy;
    std::string support_mode;
    std::uint64_t stopword_hash = 0;  // silent stopword edits show up here
    double support_pct_mean = 0.0;    // percent, 2 decimals
    double coverage_pct_mean = 0.0;   // percent, 2 decimals
    double fre_mean = 0.0;
    double local_cohesion_mean = 0.0;
    double global_cohesion = 0.0;
    bool no_evaluable_sections = false;
    std::vector<SectionEval> sections;  // non-suppressed beats only

    bool operator==(const MetricReport&) const = default;
};

// kg/hybrid stories score against factlets, graph stories against raw
// triples; anything else falls back to mined-entity co-mention.
SupportMode mode_for_strategy(const std::string& strategy);

// Per-section metrics over the run's non-suppressed beats plus the weighted
// story-level cohesion. Throws RunMismatch when beat and pack counts differ.
MetricReport evaluate_run(const gen::StoryOutput& story,
                          const std::vector<retrieve::EvidencePack>& packs,
                          const MetricConfig& config, const std::string& run_id = "");

std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& json_text);

// One row per (persona, length, strategy) cell, metrics averaged over the
// cell's runs, rows sorted by the key columns.
std::string aggregate_csv(const std::vector<MetricReport>& reports);

}  // namespace graphtale::eval
