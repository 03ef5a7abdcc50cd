#include "graphtale/run/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "graphtale/rdf/turtle.hpp"
#include "graphtale/sparql/engine.hpp"
#include "graphtale/util/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace graphtale::run {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string to_hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format2(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

// Resolves a config-relative path against the config file's directory.
std::string resolve(const fs::path& base, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    return p.is_absolute() ? p.string() : (base / p).lexically_normal().string();
}

std::string run_directory(const ExperimentConfig& config, const RunSpec& spec) {
    return (fs::path(config.out_dir) / "runs" / spec.run_id).string();
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& file) {
    std::string raw;
    try {
        raw = read_file(file);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(file + ": " + e.what());
    }

    ExperimentConfig config;
    config.snapshot = raw;
    try {
        config.personas = j.at("personas").get<std::vector<std::string>>();
        config.lengths = j.at("lengths").get<std::vector<std::string>>();
        config.strategies = j.at("strategies").get<std::vector<std::string>>();
        for (const auto& [persona, n] : j.at("runs_per_cell").items())
            config.runs_per_cell[persona] = n.get<int>();
        config.base_seed = j.at("base_seed").get<std::uint64_t>();
        config.backend = j.value("backend", std::string("mock"));
        config.kg_cap = j.value("kg_cap", std::size_t{25});
        config.snippet_k = j.value("snippet_k", std::size_t{3});
        config.generation_budget = j.value("generation_budget", 6);
        config.min_facts = j.value("min_facts", std::size_t{1});
        if (j.contains("graph")) {
            const auto& g = j.at("graph");
            for (const auto& iri : g.value("relation_allowlist", std::vector<std::string>{}))
                config.graph.relation_allowlist.insert(iri);
            config.graph.hop_limit = g.value("hop_limit", 1);
            config.graph.node_cap = g.value("node_cap", std::size_t{64});
        }
        if (j.contains("http")) {
            const auto& h = j.at("http");
            config.http.base_url = h.value("base_url", std::string());
            config.http.path = h.value("path", std::string("/v1/generate"));
            config.http.model = h.value("model", std::string());
            config.http.api_key_env = h.value("api_key_env", std::string("GRAPHTALE_API_KEY"));
            config.http.max_prompt_chars = h.value("max_prompt_chars", std::size_t{24000});
            config.http.timeout_seconds = h.value("timeout_seconds", 60);
        }
        const auto& assets = j.at("assets");
        const fs::path base = fs::path(file).parent_path();
        config.kg_file = resolve(base, assets.at("kg").get<std::string>());
        config.cq_dir = resolve(base, assets.at("cq_dir").get<std::string>());
        config.personas_dir = resolve(base, assets.at("personas_dir").get<std::string>());
        config.snippets_dir = resolve(base, assets.value("snippets_dir", std::string()));
        config.beats_file = resolve(base, assets.at("beats").get<std::string>());
        config.slot_domains_file =
            resolve(base, assets.at("slot_domains").get<std::string>());
        config.verbalization_file =
            resolve(base, assets.value("verbalization", std::string()));
        config.prompt_file = resolve(base, assets.value("prompt", std::string()));
        config.out_dir = j.value("out_dir", std::string("runs-out"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(file + ": " + e.what());
    }

    if (config.personas.empty()) throw ConfigError("personas must be non-empty");
    if (config.lengths.empty()) throw ConfigError("lengths must be non-empty");
    if (config.strategies.empty()) throw ConfigError("strategies must be non-empty");
    for (const auto& s : config.strategies)
        if (s != "kg" && s != "hybrid" && s != "graph")
            throw ConfigError("unknown strategy: " + s);
    if (config.backend != "mock" && config.backend != "http")
        throw ConfigError("unknown backend: " + config.backend);
    for (const auto& persona : config.personas) {
        auto it = config.runs_per_cell.find(persona);
        if (it == config.runs_per_cell.end())
            throw ConfigError("runs_per_cell missing persona: " + persona);
        if (it->second < 1) throw ConfigError("runs_per_cell must be >= 1 for " + persona);
    }
    return config;
}

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& persona,
                          const std::string& length, const std::string& strategy,
                          int run_index) {
    std::uint64_t h = util::fnv1a_u64(base_seed);
    h = util::fnv1a(persona, h);
    h = util::fnv1a("\x1f", h);
    h = util::fnv1a(length, h);
    h = util::fnv1a("\x1f", h);
    h = util::fnv1a(strategy, h);
    h = util::fnv1a_u64(static_cast<std::uint64_t>(run_index), h);
    return h;
}

std::vector<RunSpec> expand_matrix(const ExperimentConfig& config) {
    std::vector<RunSpec> specs;
    for (const auto& persona : config.personas)
        for (const auto& length : config.lengths)
            for (const auto& strategy : config.strategies)
                for (int r = 0; r < config.runs_per_cell.at(persona); ++r) {
                    RunSpec spec;
                    char index[16];
                    std::snprintf(index, sizeof(index), "r%02d", r);
                    spec.run_id = persona + "-" + length + "-" + strategy + "-" + index;
                    spec.persona = persona;
                    spec.length = length;
                    spec.strategy = strategy;
                    spec.run_index = r;
                    spec.seed =
                        derive_seed(config.base_seed, persona, length, strategy, r);
                    specs.push_back(std::move(spec));
                }
    return specs;
}

Corpus Corpus::load(const ExperimentConfig& config) {
    Corpus corpus;
    corpus.graph = rdf::parse_turtle_file(config.kg_file);
    corpus.graph.freeze();  // workers share the graph read-only
    corpus.library = cq::Library::load(config.cq_dir);
    for (const auto& persona : config.personas)
        corpus.personas[persona] =
            plan::load_persona(fs::path(config.personas_dir) / (persona + ".json"));
    if (!config.snippets_dir.empty())
        corpus.snippets = retrieve::SnippetIndex::build(config.snippets_dir);
    corpus.beat_templates = plan::load_beat_templates(config.beats_file);
    corpus.slot_domains = plan::load_slot_domains(config.slot_domains_file);
    if (!config.verbalization_file.empty())
        corpus.verbalization = retrieve::load_predicate_templates(config.verbalization_file);
    corpus.prompt_template = config.prompt_file.empty()
                                 ? gen::default_prompt_template()
                                 : gen::load_prompt_template(config.prompt_file);
    return corpus;
}

std::uint64_t hash_file(const std::string& path) { return util::fnv1a(read_file(path)); }

std::uint64_t hash_directory(const std::string& path) {
    std::uint64_t h = util::kFnvOffset;
    if (path.empty() || !fs::exists(path)) return h;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        h = util::fnv1a(fs::relative(file, path).generic_string(), h);
        h = util::fnv1a(read_file(file.string()), h);
    }
    return h;
}

std::vector<retrieve::EvidencePack> retrieve_packs(const Corpus& corpus,
                                                   const ExperimentConfig& config,
                                                   const plan::BeatPlan& story_plan,
                                                   const std::string& strategy,
                                                   std::uint64_t run_seed) {
    std::vector<retrieve::EvidencePack> packs;
    for (std::size_t i = 0; i < story_plan.beats.size(); ++i) {
        const auto& beat = story_plan.beats[i];
        const auto& tmpl = corpus.library.require(beat.bound_cq.template_id);
        retrieve::EvidencePack pack;
        if (strategy == "kg") {
            pack = retrieve::retrieve_kg(beat.bound_cq, corpus.graph, config.kg_cap,
                                         tmpl.query_file);
        } else if (strategy == "hybrid") {
            pack = retrieve::retrieve_hybrid(beat.bound_cq, corpus.graph, corpus.snippets,
                                             tmpl.needs_enrichment, config.snippet_k,
                                             config.kg_cap, tmpl.query_file);
        } else if (strategy == "graph") {
            retrieve::GraphRagConfig graph_config;
            graph_config.relation_allowlist = config.graph.relation_allowlist;
            graph_config.hop_limit = config.graph.hop_limit;
            graph_config.node_cap = config.graph.node_cap;
            graph_config.seed = util::fnv1a_u64(i, util::fnv1a_u64(run_seed));
            pack = retrieve::retrieve_graph(beat.bound_cq, corpus.graph, graph_config,
                                            corpus.verbalization);
        } else {
            throw ConfigError("unknown strategy: " + strategy);
        }
        pack.beat_index = static_cast<int>(i);
        packs.push_back(std::move(pack));
    }
    return packs;
}

eval::MetricReport execute_run(const Corpus& corpus, const ExperimentConfig& config,
                               const RunSpec& spec, gen::TextBackend& backend) {
    const std::string started = iso_now();
    const fs::path dir = run_directory(config, spec);
    fs::create_directories(dir);

    auto story_plan = plan::build_beat_plan(corpus.personas.at(spec.persona), spec.length,
                                            spec.seed, corpus.library, corpus.graph,
                                            corpus.beat_templates, corpus.slot_domains);
    write_file(dir / "plan.json", plan::serialize_plan(story_plan));

    auto packs = retrieve_packs(corpus, config, story_plan, spec.strategy, spec.seed);
    std::string jsonl;
    for (const auto& pack : packs)
        jsonl += nlohmann::json::parse(retrieve::pack_to_json(pack)).dump() + "\n";
    write_file(dir / "packs.jsonl", jsonl);

    gen::GeneratorConfig gen_config;
    gen_config.budget = config.generation_budget;
    gen_config.min_facts = config.min_facts;
    gen_config.prompt_template = corpus.prompt_template;
    gen_config.metrics = corpus.metrics;
    auto story = gen::generate_story(story_plan, packs, corpus.personas.at(spec.persona),
                                     backend, gen_config);
    write_file(dir / "story.json", gen::story_to_json(story));

    auto report = eval::evaluate_run(story, packs, corpus.metrics, spec.run_id);
    write_file(dir / "report.json", eval::report_to_json(report));

    nlohmann::ordered_json manifest;
    manifest["run_id"] = spec.run_id;
    manifest["version"] = kVersion;
    manifest["started_at"] = started;
    manifest["finished_at"] = iso_now();
    manifest["persona"] = spec.persona;
    manifest["length"] = spec.length;
    manifest["strategy"] = spec.strategy;
    manifest["run_index"] = spec.run_index;
    manifest["seed"] = spec.seed;
    manifest["config"] = nlohmann::ordered_json::parse(config.snapshot);
    // Flags may override the loaded file; record what actually applied.
    manifest["effective"] = {{"backend", config.backend},
                             {"out_dir", config.out_dir},
                             {"runs_per_cell", config.runs_per_cell},
                             {"base_seed", config.base_seed}};
    manifest["input_hashes"] = {
        {"kg", to_hex(hash_file(config.kg_file))},
        {"cq_dir", to_hex(hash_directory(config.cq_dir))},
        {"personas_dir", to_hex(hash_directory(config.personas_dir))},
        {"snippets_dir", to_hex(hash_directory(config.snippets_dir))},
        {"beats", to_hex(hash_file(config.beats_file))},
        {"slot_domains", to_hex(hash_file(config.slot_domains_file))},
        {"verbalization", to_hex(config.verbalization_file.empty()
                                     ? util::kFnvOffset
                                     : hash_file(config.verbalization_file))},
        {"prompt", to_hex(config.prompt_file.empty() ? util::kFnvOffset
                                                     : hash_file(config.prompt_file))},
    };
    manifest["artifacts"] = {"plan.json", "packs.jsonl", "story.json", "report.json"};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return report;
}

std::vector<RunOutcome> run_experiment(const Corpus& corpus, const ExperimentConfig& config,
                                       gen::TextBackend& backend, std::size_t workers) {
    const auto specs = expand_matrix(config);
    std::vector<RunOutcome> outcomes(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) outcomes[i].spec = specs[i];

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, specs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < specs.size(); i = next.fetch_add(1)) {
            try {
                outcomes[i].report = execute_run(corpus, config, specs[i], backend);
                outcomes[i].ok = true;
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<eval::MetricReport> evaluable;
    std::vector<std::string> suppressed;
    for (const auto& outcome : outcomes) {
        if (!outcome.ok) continue;
        if (outcome.report.no_evaluable_sections)
            suppressed.push_back(outcome.spec.run_id);
        else
            evaluable.push_back(outcome.report);
    }

    fs::create_directories(config.out_dir);
    write_file(fs::path(config.out_dir) / "aggregate.csv", eval::aggregate_csv(evaluable));
    write_file(fs::path(config.out_dir) / "report.md",
               render_markdown(evaluable, suppressed));

    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& outcome : outcomes)
        if (!outcome.ok)
            failures.push_back({{"run_id", outcome.spec.run_id}, {"error", outcome.error}});
    write_file(fs::path(config.out_dir) / "failures.json", failures.dump(2) + "\n");
    return outcomes;
}

std::string render_markdown(const std::vector<eval::MetricReport>& reports,
                            const std::vector<std::string>& suppressed_run_ids,
                            const std::vector<std::string>& missing_files) {
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
    auto mean = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
    };

    std::ostringstream out;
    out << "# Story Experiment Report\n\n";
    out << "Cell values are means over " << reports.size() << " evaluable runs.\n\n";
    out << "## Grounding\n\n";
    out << "| Persona | Length | Strategy | Runs | Support % | Coverage % |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& [key, cell] : cells)
        out << "| " << std::get<0>(key) << " | " << std::get<1>(key) << " | "
            << std::get<2>(key) << " | " << cell.support.size() << " | "
            << format2(mean(cell.support)) << " | " << format2(mean(cell.coverage))
            << " |\n";
    out << "\n## Readability & Cohesion\n\n";
    out << "| Persona | Length | Strategy | Runs | FRE | Global | Local |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& [key, cell] : cells)
        out << "| " << std::get<0>(key) << " | " << std::get<1>(key) << " | "
            << std::get<2>(key) << " | " << cell.fre.size() << " | "
            << format2(mean(cell.fre)) << " | " << format2(mean(cell.global)) << " | "
            << format2(mean(cell.local)) << " |\n";
    if (!suppressed_run_ids.empty()) {
        out << "\nRuns with no evaluable sections (excluded from means):";
        for (const auto& id : suppressed_run_ids) out << " " << id;
        out << "\n";
    }
    if (!missing_files.empty()) {
        out << "\nMissing report files:";
        for (const auto& file : missing_files) out << " " << file;
        out << "\n";
    }
    return out.str();
}

}  // namespace graphtale::run
