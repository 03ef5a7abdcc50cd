#include "graphtale/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace graphtale::eval {

namespace {

double round2(double value) { return std::round(value * 100.0) / 100.0; }

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

std::string join_sentences(const std::vector<std::string>& sentences) {
    std::string text;
    for (const auto& s : sentences) {
        if (!text.empty()) text += ' ';
        text += s;
    }
    return text;
}

std::string format2(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

}  // namespace

SupportMode mode_for_strategy(const std::string& strategy) {
    if (strategy == "kg" || strategy == "hybrid") return SupportMode::Factlet;
    if (strategy == "graph") return SupportMode::Triple;
    return SupportMode::Fallback;
}

MetricReport evaluate_run(const gen::StoryOutput& story,
                          const std::vector<retrieve::EvidencePack>& packs,
                          const MetricConfig& config, const std::string& run_id) {
    if (story.beats.size() != packs.size())
        throw RunMismatch(story.beats.size(), packs.size());

    MetricReport report;
    report.run_id = run_id;
    report.persona = story.persona_id;
    report.length = story.length;
    report.strategy = story.strategy;
    const SupportMode mode = mode_for_strategy(story.strategy);
    report.support_mode = to_string(mode);
    report.stopword_hash = text::stopword_list_hash();

    std::vector<double> supports;
    std::vector<double> coverages;
    std::vector<double> fres;
    std::vector<double> locals;
    std::vector<std::vector<std::string>> live_sentences;
    std::vector<const retrieve::EvidencePack*> live_packs;

    for (std::size_t i = 0; i < story.beats.size(); ++i) {
        const auto& beat = story.beats[i];
        if (beat.suppressed) continue;

        SectionEval section;
        section.section_index = static_cast<int>(i);
        for (const auto& sentence : beat.sentences)
            section.sentence_supported.push_back(
                sentence_supported(sentence, packs[i], mode, config));
        section.support_ratio = support_ratio(beat.sentences, packs[i], mode, config);
        const std::string text = join_sentences(beat.sentences);
        section.coverage = coverage(text, packs[i], mode, config);
        section.fre = fre(text, config);
        section.local_cohesion = local_cohesion(beat.sentences, config);

        supports.push_back(section.support_ratio);
        coverages.push_back(section.coverage);
        fres.push_back(section.fre);
        locals.push_back(section.local_cohesion);
        live_sentences.push_back(beat.sentences);
        live_packs.push_back(&packs[i]);
        report.sections.push_back(std::move(section));
    }

    if (report.sections.empty()) {
        report.no_evaluable_sections = true;
        return report;
    }

    report.support_pct_mean = round2(mean(supports) * 100.0);
    report.coverage_pct_mean = round2(mean(coverages) * 100.0);
    report.fre_mean = mean(fres);
    report.local_cohesion_mean = mean(locals);
    report.global_cohesion = global_cohesion(live_sentences, live_packs, config);
    return report;
}

std::string report_to_json(const MetricReport& report) {
    nlohmann::ordered_json j;
    j["run_id"] = report.run_id;
    j["persona"] = report.persona;
    j["length"] = report.length;
    j["strategy"] = report.strategy;
    j["support_mode"] = report.support_mode;
    j["stopword_hash"] = report.stopword_hash;
    j["support_pct_mean"] = report.support_pct_mean;
    j["coverage_pct_mean"] = report.coverage_pct_mean;
    j["fre_mean"] = report.fre_mean;
    j["local_cohesion_mean"] = report.local_cohesion_mean;
    j["global_cohesion"] = report.global_cohesion;
    j["no_evaluable_sections"] = report.no_evaluable_sections;
    j["sections"] = nlohmann::ordered_json::array();
    for (const auto& section : report.sections) {
        nlohmann::ordered_json s;
        s["section_index"] = section.section_index;
        s["support_ratio"] = section.support_ratio;
        s["coverage"] = section.coverage;
        s["fre"] = section.fre;
        s["local_cohesion"] = section.local_cohesion;
        s["sentence_supported"] = section.sentence_supported;
        j["sections"].push_back(std::move(s));
    }
    return j.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    MetricReport report;
    report.run_id = j.at("run_id").get<std::string>();
    report.persona = j.at("persona").get<std::string>();
    report.length = j.at("length").get<std::string>();
    report.strategy = j.at("strategy").get<std::string>();
    report.support_mode = j.at("support_mode").get<std::string>();
    report.stopword_hash = j.at("stopword_hash").get<std::uint64_t>();
    report.support_pct_mean = j.at("support_pct_mean").get<double>();
    report.coverage_pct_mean = j.at("coverage_pct_mean").get<double>();
    report.fre_mean = j.at("fre_mean").get<double>();
    report.local_cohesion_mean = j.at("local_cohesion_mean").get<double>();
    report.global_cohesion = j.at("global_cohesion").get<double>();
    report.no_evaluable_sections = j.at("no_evaluable_sections").get<bool>();
    for (const auto& s : j.at("sections")) {
        SectionEval section;
        section.section_index = s.at("section_index").get<int>();
        section.support_ratio = s.at("support_ratio").get<double>();
        section.coverage = s.at("coverage").get<double>();
        section.fre = s.at("fre").get<double>();
        section.local_cohesion = s.at("local_cohesion").get<double>();
        section.sentence_supported = s.at("sentence_supported").get<std::vector<bool>>();
        report.sections.push_back(std::move(section));
    }
    return report;
}

std::string aggregate_csv(const std::vector<MetricReport>& reports) {
    struct Cell {
        std::vector<double> support, coverage, fre, global, local;
    };
    std::map<std::tuple<std::string, std::string, std::string>, Cell> cells;
    for (const auto& r : reports) {
        auto& cell = cells[{r.persona, r.length, r.strategy}];
        cell.support.push_back(r.support_pct_mean);
        cell.coverage.push_back(r.coverage_pct_mean);
        cell.fre.push_back(r.fre_mean);
        cell.global.push_back(r.global_cohesion);
        cell.local.push_back(r.local_cohesion_mean);
    }

    std::ostringstream out;
    out << "persona,length,strategy,support_pct,coverage_pct,fre,global_cohesion,"
           "local_cohesion\n";
    for (const auto& [key, cell] : cells) {
        out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
            << format2(mean(cell.support)) << ',' << format2(mean(cell.coverage)) << ','
            << format2(mean(cell.fre)) << ',' << format2(mean(cell.global)) << ','
            << format2(mean(cell.local)) << '\n';
    }
    return out.str();
}

}  // namespace graphtale::eval
