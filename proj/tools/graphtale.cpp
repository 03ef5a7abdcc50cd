#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphtale/eval/report.hpp"
#include "graphtale/gen/generator.hpp"
#include "graphtale/rdf/turtle.hpp"
#include "graphtale/retrieve/pack.hpp"
#include "graphtale/run/harness.hpp"
#include "graphtale/validate/validator.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace graphtale;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInputError = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spill(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::vector<retrieve::EvidencePack> read_packs(const std::string& path) {
    std::istringstream lines(slurp(path));
    std::vector<retrieve::EvidencePack> packs;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) packs.push_back(retrieve::pack_from_json(line));
    return packs;
}

std::string packs_to_jsonl(const std::vector<retrieve::EvidencePack>& packs) {
    std::string jsonl;
    for (const auto& pack : packs)
        jsonl += nlohmann::json::parse(retrieve::pack_to_json(pack)).dump() + "\n";
    return jsonl;
}

std::string profile_to_json(const rdf::GraphProfile& profile) {
    nlohmann::ordered_json j;
    j["total_triples"] = profile.total_triples;
    j["distinct_classes"] = profile.distinct_classes;
    j["distinct_predicates_excl_type"] = profile.distinct_predicates_excl_type;
    j["typed_subjects"] = profile.typed_subjects;
    j["dual_typed_subjects"] = profile.dual_typed_subjects;
    return j.dump(2) + "\n";
}

std::unique_ptr<gen::TextBackend> make_backend(const run::ExperimentConfig& config) {
    if (config.backend == "http")
        return std::make_unique<gen::HttpBackend>(config.http);
    return std::make_unique<gen::MockBackend>();
}

int cmd_ingest(const std::string& kg, const std::string& out) {
    rdf::Graph graph;
    try {
        graph = rdf::parse_turtle_file(kg);
    } catch (const rdf::SyntaxError& e) {
        std::cerr << kg << ":" << e.line << ":" << e.column << ": " << e.message << "\n";
        return kExitInputError;
    } catch (const rdf::UnknownPrefix& e) {
        std::cerr << kg << ":" << e.line << ":" << e.column << ": " << e.what() << "\n";
        return kExitInputError;
    } catch (const rdf::UnsupportedSyntax& e) {
        std::cerr << kg << ":" << e.line << ":" << e.column << ": " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    }
    const std::string profile = profile_to_json(graph.profile());
    std::cout << profile;
    if (!out.empty()) {
        spill(fs::path(out) / "profile.json", profile);
        spill(fs::path(out) / "graph.ttl", graph.to_turtle());
    }
    return kExitOk;
}

int cmd_validate(const std::string& kg, const std::string& cq_dir,
                 const std::string& registry_file, const std::string& bindings_file,
                 const std::string& pattern, const std::string& out) {
    rdf::Graph graph;
    validate::VocabularyRegistry registry;
    cq::Library library;
    validate::FixtureBindings bindings;
    try {
        graph = rdf::parse_turtle_file(kg);
        registry = validate::VocabularyRegistry::load(registry_file);
        library = cq::Library::load(cq_dir);
        bindings = validate::load_fixture_bindings(bindings_file);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    }
    auto report = validate::run_gate(graph, registry, pattern, library, bindings);
    const std::string json = validate::report_to_json(report);
    std::cout << json;
    spill(fs::path(out.empty() ? "." : out) / "validation_report.json", json);
    return report.overall ? kExitOk : kExitCheckFailure;
}

int cmd_plan(const std::string& config_file, const std::string& persona,
             const std::string& length, std::uint64_t seed, const std::string& out_file) {
    auto config = run::ExperimentConfig::load(config_file);
    if (std::find(config.personas.begin(), config.personas.end(), persona) ==
        config.personas.end())
        config.personas.push_back(persona);
    auto corpus = run::Corpus::load(config);
    auto story_plan =
        plan::build_beat_plan(corpus.personas.at(persona), length, seed, corpus.library,
                              corpus.graph, corpus.beat_templates, corpus.slot_domains);
    const std::string json = plan::serialize_plan(story_plan);
    if (out_file.empty())
        std::cout << json;
    else
        spill(out_file, json);
    return kExitOk;
}

int cmd_retrieve(const std::string& config_file, const std::string& plan_file,
                 const std::string& strategy, const std::string& out_file) {
    auto config = run::ExperimentConfig::load(config_file);
    auto corpus = run::Corpus::load(config);
    auto story_plan = plan::deserialize_plan(slurp(plan_file), corpus.library);
    auto packs = run::retrieve_packs(corpus, config, story_plan, strategy, story_plan.seed);
    const std::string jsonl = packs_to_jsonl(packs);
    if (out_file.empty())
        std::cout << jsonl;
    else
        spill(out_file, jsonl);
    return kExitOk;
}

int cmd_generate(const std::string& config_file, const std::string& plan_file,
                 const std::string& packs_file, const std::string& backend_override,
                 const std::string& out_file) {
    auto config = run::ExperimentConfig::load(config_file);
    if (!backend_override.empty()) config.backend = backend_override;
    auto corpus = run::Corpus::load(config);
    auto story_plan = plan::deserialize_plan(slurp(plan_file), corpus.library);
    auto packs = read_packs(packs_file);
    auto backend = make_backend(config);

    gen::GeneratorConfig gen_config;
    gen_config.budget = config.generation_budget;
    gen_config.min_facts = config.min_facts;
    gen_config.prompt_template = corpus.prompt_template;
    gen_config.metrics = corpus.metrics;
    auto story = gen::generate_story(story_plan, packs,
                                     corpus.personas.at(story_plan.persona_id), *backend,
                                     gen_config);
    const std::string json = gen::story_to_json(story);
    if (out_file.empty())
        std::cout << json;
    else
        spill(out_file, json);
    return kExitOk;
}

int cmd_evaluate(const std::string& story_file, const std::string& packs_file,
                 const std::string& run_id, const std::string& out_file) {
    auto story = gen::story_from_json(slurp(story_file));
    auto packs = read_packs(packs_file);
    eval::MetricConfig metrics;
    auto report = eval::evaluate_run(story, packs, metrics, run_id);
    const std::string json = eval::report_to_json(report);
    if (out_file.empty())
        std::cout << json;
    else
        spill(out_file, json);
    return kExitOk;
}

int cmd_run_experiment(const std::string& config_file, const std::string& kg,
                       const std::string& cq_dir, const std::string& personas,
                       const std::string& snippets, const std::string& out,
                       const std::string& backend_override, std::size_t workers) {
    auto config = run::ExperimentConfig::load(config_file);
    if (!kg.empty()) config.kg_file = kg;
    if (!cq_dir.empty()) config.cq_dir = cq_dir;
    if (!personas.empty()) config.personas_dir = personas;
    if (!snippets.empty()) config.snippets_dir = snippets;
    if (!out.empty()) config.out_dir = out;
    if (!backend_override.empty()) config.backend = backend_override;
    if (config.backend != "mock" && config.backend != "http")
        throw run::ConfigError("unknown backend: " + config.backend);

    auto corpus = run::Corpus::load(config);
    auto backend = make_backend(config);
    auto outcomes = run::run_experiment(corpus, config, *backend, workers);

    std::size_t failed = 0;
    for (const auto& outcome : outcomes)
        if (!outcome.ok) {
            ++failed;
            std::cerr << outcome.spec.run_id << " failed: " << outcome.error << "\n";
        }
    std::cout << outcomes.size() - failed << "/" << outcomes.size() << " runs completed; "
              << "aggregate written to " << (fs::path(config.out_dir) / "aggregate.csv").string()
              << "\n";
    return failed == 0 ? kExitOk : kExitCheckFailure;
}

int cmd_report(const std::string& runs_dir, const std::string& out) {
    fs::path base(runs_dir);
    if (fs::exists(base / "runs")) base /= "runs";
    if (!fs::exists(base)) {
        std::cerr << "no runs directory at " << runs_dir << "\n";
        return kExitInputError;
    }

    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(base))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());

    std::vector<eval::MetricReport> reports;
    std::vector<std::string> suppressed;
    std::vector<std::string> missing;
    for (const auto& dir : dirs) {
        const fs::path file = dir / "report.json";
        if (!fs::exists(file)) {
            missing.push_back(file.string());
            continue;
        }
        auto report = eval::report_from_json(slurp(file.string()));
        if (report.no_evaluable_sections)
            suppressed.push_back(report.run_id);
        else
            reports.push_back(std::move(report));
    }
    if (reports.empty() && suppressed.empty()) {
        std::cerr << "no completed runs under " << base.string() << "\n";
        return kExitInputError;
    }
    for (const auto& file : missing) std::cerr << "missing report: " << file << "\n";

    const fs::path out_dir = out.empty() ? fs::path(runs_dir) : fs::path(out);
    spill(out_dir / "aggregate.csv", eval::aggregate_csv(reports));
    spill(out_dir / "report.md", run::render_markdown(reports, suppressed, missing));
    std::cout << "report written to " << (out_dir / "report.md").string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph-grounded storytelling pipeline"};
    app.require_subcommand(1);

    std::string config_file, kg, cq_dir, personas, snippets, out;
    std::string registry_file, bindings_file, plan_file, packs_file, story_file;
    std::string persona, length, strategy, backend, run_id, runs_dir;
    std::string pattern = R"(^http://wembrewind\.live/ex#[A-Za-z][A-Za-z0-9]*$)";
    std::uint64_t seed = 0;
    std::size_t workers = 0;

    auto* ingest = app.add_subcommand("ingest", "Load a Turtle file and profile it");
    ingest->add_option("--kg", kg, "Turtle file")->required();
    ingest->add_option("--out", out, "Directory for profile.json and graph.ttl");

    auto* validate_cmd =
        app.add_subcommand("validate", "Run the release gate over a graph and query library");
    validate_cmd->add_option("--kg", kg, "Turtle file")->required();
    validate_cmd->add_option("--cq-dir", cq_dir, "Question library directory")->required();
    validate_cmd->add_option("--registry", registry_file, "Vocabulary registry JSON")
        ->required();
    validate_cmd->add_option("--bindings", bindings_file, "Fixture bindings JSON")
        ->required();
    validate_cmd->add_option("--pattern", pattern, "Identifier regular expression");
    validate_cmd->add_option("--out", out, "Directory for validation_report.json");

    auto* plan_cmd = app.add_subcommand("plan", "Build a seeded beat plan");
    plan_cmd->add_option("--config", config_file, "Experiment config JSON")->required();
    plan_cmd->add_option("--persona", persona, "Persona id")->required();
    plan_cmd->add_option("--length", length, "Length tier")->required();
    plan_cmd->add_option("--seed", seed, "Plan seed")->required();
    plan_cmd->add_option("--out", out, "Output plan.json (stdout when omitted)");

    auto* retrieve_cmd = app.add_subcommand("retrieve", "Build evidence packs for a plan");
    retrieve_cmd->add_option("--config", config_file, "Experiment config JSON")->required();
    retrieve_cmd->add_option("--plan", plan_file, "plan.json")->required();
    retrieve_cmd->add_option("--strategy", strategy, "kg | hybrid | graph")->required();
    retrieve_cmd->add_option("--out", out, "Output packs.jsonl (stdout when omitted)");

    auto* generate_cmd = app.add_subcommand("generate", "Generate a story from packs");
    generate_cmd->add_option("--config", config_file, "Experiment config JSON")->required();
    generate_cmd->add_option("--plan", plan_file, "plan.json")->required();
    generate_cmd->add_option("--packs", packs_file, "packs.jsonl")->required();
    generate_cmd->add_option("--backend", backend, "mock | http");
    generate_cmd->add_option("--out", out, "Output story.json (stdout when omitted)");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a story against its packs");
    evaluate_cmd->add_option("--story", story_file, "story.json")->required();
    evaluate_cmd->add_option("--packs", packs_file, "packs.jsonl")->required();
    evaluate_cmd->add_option("--run-id", run_id, "Run id recorded in the report");
    evaluate_cmd->add_option("--out", out, "Output report.json (stdout when omitted)");

    auto* run_cmd = app.add_subcommand("run-experiment", "Run the full experiment matrix");
    run_cmd->add_option("--config", config_file, "Experiment config JSON")->required();
    run_cmd->add_option("--kg", kg, "Override the config's Turtle file");
    run_cmd->add_option("--cq-dir", cq_dir, "Override the question library directory");
    run_cmd->add_option("--personas", personas, "Override the personas directory");
    run_cmd->add_option("--snippets", snippets, "Override the snippets directory");
    run_cmd->add_option("--out", out, "Override the output directory");
    run_cmd->add_option("--backend", backend, "mock | http");
    run_cmd->add_option("--workers", workers, "Worker thread cap (0 = hardware)");

    auto* report_cmd = app.add_subcommand("report", "Aggregate run reports into tables");
    report_cmd->add_option("--runs", runs_dir, "Experiment output directory")->required();
    report_cmd->add_option("--out", out, "Directory for report.md and aggregate.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(kg, out);
        if (validate_cmd->parsed())
            return cmd_validate(kg, cq_dir, registry_file, bindings_file, pattern, out);
        if (plan_cmd->parsed()) return cmd_plan(config_file, persona, length, seed, out);
        if (retrieve_cmd->parsed()) return cmd_retrieve(config_file, plan_file, strategy, out);
        if (generate_cmd->parsed())
            return cmd_generate(config_file, plan_file, packs_file, backend, out);
        if (evaluate_cmd->parsed()) return cmd_evaluate(story_file, packs_file, run_id, out);
        if (run_cmd->parsed())
            return cmd_run_experiment(config_file, kg, cq_dir, personas, snippets, out,
                                      backend, workers);
        if (report_cmd->parsed()) return cmd_report(runs_dir, out);
    } catch (const gen::BackendUnavailable& e) {
        std::cerr << e.what() << "\n";
        return kExitCheckFailure;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
