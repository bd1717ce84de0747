#include "mgen/pipeline.hpp"

#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/text.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace mgen {

namespace {

constexpr const char* kClassesFile = "classes.jsonl";
constexpr const char* kMutantsFile = "mutants.jsonl";
constexpr const char* kVerdictsFile = "verdicts.jsonl";
constexpr const char* kTestsFile = "tests.jsonl";
constexpr const char* kCertifiedDir = "certified";

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::jthread> pool;
    const unsigned count = std::min<unsigned>(workers, static_cast<unsigned>(n));
    for (unsigned w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::vector<json> out;
    if (!fs::exists(path)) return out;
    const auto lines = text::split_lines(read_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (text::trim(lines[i]).empty()) continue;
        try {
            out.push_back(json::parse(lines[i]));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::IoFailure, path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

void write_jsonl(const fs::path& path, const std::vector<json>& records) {
    std::string body;
    for (const auto& r : records) body += r.dump() + "\n";
    write_file(path, body);
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

std::string basename(const std::string& path) { return fs::path(path).filename().string(); }

json nullable(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

json coverage_json(const CoverageMap& map) {
    json j = json::object();
    for (const auto& [file, lines] : map) j[file] = std::vector<int>(lines.begin(), lines.end());
    return j;
}

struct Loaded {
    Corpus corpus;
    std::vector<StoredMutant> mutants;
};

bool is_stale(const MutantCandidate& m, const ClassUnderTest& cut) {
    return m.original_digest != sha256_hex(cut.source_text);
}

}  // namespace

void StageStatus::merge(const StageStatus& other) {
    partial = partial || other.partial;
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

// ---- configuration -----------------------------------------------------------

RunConfig RunConfig::load(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigInvalid, e.what());
    }
    const fs::path base = path.parent_path();
    RunConfig c;
    try {
        c.manifest = resolve(base, j.at("manifest").get<std::string>());
        c.issue = resolve(base, j.at("issue").get<std::string>());
        const auto& adapter = j.at("adapter");
        c.adapter = adapter.is_string() ? TargetAdapter::from_json(json::parse(read_file(resolve(base, adapter.get<std::string>()))))
                                        : TargetAdapter::from_json(adapter);
        if (j.contains("llm")) {
            const auto& l = j["llm"];
            c.llm.mode = parse_gateway_mode(l.value("mode", std::string("replay")));
            if (l.contains("transcript")) c.llm.transcript = resolve(base, l["transcript"].get<std::string>());
            c.llm.endpoint = l.value("endpoint", std::string());
            c.llm.token_env = l.value("token_env", c.llm.token_env);
            c.llm.gateway.model = l.value("model", c.llm.gateway.model);
            c.llm.gateway.params.temperature = l.value("temperature", c.llm.gateway.params.temperature);
            c.llm.gateway.params.max_tokens = l.value("max_tokens", c.llm.gateway.params.max_tokens);
            c.llm.gateway.request_cap = l.value("request_cap", c.llm.gateway.request_cap);
            c.llm.gateway.in_flight = l.value("in_flight", c.llm.gateway.in_flight);
            c.llm.gateway.retries = l.value("retries", c.llm.gateway.retries);
        }
        if (j.contains("budgets")) {
            const auto& b = j["budgets"];
            c.mutants_per_class = b.value("mutants_per_class", c.mutants_per_class);
            c.stop_on_first_survivor = b.value("stop_on_first_survivor", c.stop_on_first_survivor);
            c.retries = b.value("retries", c.retries);
            c.repeats = b.value("repeats", c.repeats);
        }
        c.test_no_answer = j.value("test_no_answer", c.test_no_answer);
        c.workers = j.value("workers", c.workers);
        c.out = resolve(base, j.value("out", std::string("out")));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
    }
    c.llm.gateway.mode = c.llm.mode;
    return c;
}

void RunConfig::validate() const {
    if (llm.mode == GatewayMode::Replay && !llm.transcript) {
        throw Error(ErrorCode::ConfigInvalid, "replay mode needs llm.transcript");
    }
    if (llm.mode != GatewayMode::Replay && llm.endpoint.empty()) {
        throw Error(ErrorCode::ConfigInvalid,
                    std::string(to_string(llm.mode)) + " mode needs llm.endpoint to be set");
    }
    if (llm.mode == GatewayMode::Record && !llm.transcript) {
        throw Error(ErrorCode::ConfigInvalid, "record mode needs llm.transcript");
    }
    if (mutants_per_class < 1 || retries < 1 || repeats < 1) {
        throw Error(ErrorCode::ConfigInvalid, "budgets must be at least 1");
    }
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& config) {
    config.validate();
    GatewayConfig gc = config.llm.gateway;
    gc.mode = config.llm.mode;
    TranscriptStore store;
    if (config.llm.transcript) {
        if (gc.mode == GatewayMode::Replay && !fs::exists(*config.llm.transcript)) {
            throw Error(ErrorCode::ConfigInvalid, "transcript not found: " + config.llm.transcript->string());
        }
        store = TranscriptStore::load(*config.llm.transcript);
        if (gc.mode == GatewayMode::Record) store.open_sink(*config.llm.transcript, false);
    }
    std::unique_ptr<CompletionBackend> backend;
    if (gc.mode != GatewayMode::Replay) {
        const char* token = std::getenv(config.llm.token_env.c_str());
        backend = std::make_unique<HttpChatBackend>(config.llm.endpoint, token ? token : "");
    }
    return std::make_unique<Gateway>(gc, std::move(backend), std::move(store));
}

// ---- stores ------------------------------------------------------------------

std::vector<StoredMutant> load_mutants(const fs::path& out_dir) {
    std::vector<StoredMutant> out;
    for (const auto& j : read_jsonl(out_dir / kMutantsFile)) {
        StoredMutant s;
        auto& m = s.candidate;
        m.mutant_id = j.at("mutant_id").get<std::string>();
        m.class_id = j.at("class_id").get<std::string>();
        m.status = parse_mutant_status(j.at("status").get<std::string>());
        for (const auto& r : j.at("regions")) m.regions.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
        m.invalid_reason = j.value("reason", std::string());
        m.provenance = j.value("provenance", std::string());
        m.original_digest = j.value("original_digest", std::string());
        s.group = j.value("group", std::string("default"));
        s.cause = j.value("cause", std::string());
        if (j.contains("source_file") && j["source_file"].is_string()) {
            m.mutated_source = read_file(out_dir / j["source_file"].get<std::string>());
            if (sha256_hex(m.mutated_source) != j.value("source_digest", std::string())) {
                throw Error(ErrorCode::IoFailure, "stored source for " + m.mutant_id + " does not match its digest");
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<StoredVerdict> load_verdicts(const fs::path& verdicts_file) {
    std::vector<StoredVerdict> out;
    for (const auto& j : read_jsonl(verdicts_file)) {
        StoredVerdict s;
        s.mutant_id = j.at("mutant_id").get<std::string>();
        s.class_id = j.value("class_id", std::string());
        s.verdict.decision = parse_decision(j.at("decision").get<std::string>());
        s.verdict.stage = parse_stage(j.at("stage").get<std::string>());
        if (j.contains("explanation") && j["explanation"].is_string()) s.verdict.judge_explanation = j["explanation"];
        if (j.contains("cause") && j["cause"].is_string()) s.verdict.cause = j["cause"];
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<GroundTruth> load_labels(const fs::path& labels_file) {
    if (!fs::exists(labels_file)) throw Error(ErrorCode::IoFailure, "labels file not found: " + labels_file.string());
    std::vector<GroundTruth> out;
    for (const auto& j : read_jsonl(labels_file)) {
        GroundTruth g;
        g.mutant_id = j.at("mutant_id").get<std::string>();
        const auto label = j.at("label").get<std::string>();
        if (label == "equivalent") g.equivalent = true;
        else if (label != "non-equivalent") throw Error(ErrorCode::InvalidArgument, "label must be equivalent or non-equivalent");
        g.note = j.value("note", std::string());
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<LabeledVerdict> join_labels(const std::vector<StoredVerdict>& verdicts,
                                        const std::vector<GroundTruth>& labels, std::size_t* unmatched) {
    std::map<std::string, bool> truth;
    for (const auto& l : labels) truth[l.mutant_id] = l.equivalent;
    std::vector<LabeledVerdict> out;
    std::size_t missing = 0;
    for (const auto& v : verdicts) {
        const auto it = truth.find(v.mutant_id);
        if (it == truth.end()) {
            ++missing;
            continue;
        }
        out.push_back({v.verdict, it->second});
    }
    if (unmatched) *unmatched = missing;
    return out;
}

RunRecords load_run_records(const fs::path& out_dir) {
    RunRecords r;
    for (const auto& j : read_jsonl(out_dir / kClassesFile)) {
        r.classes.push_back({j.at("class_id").get<std::string>(), j.value("group", std::string("default"))});
    }
    for (const auto& j : read_jsonl(out_dir / kMutantsFile)) {
        r.mutants.push_back({j.at("mutant_id").get<std::string>(), j.at("class_id").get<std::string>(),
                             j.value("group", std::string("default")),
                             parse_mutant_status(j.at("status").get<std::string>())});
    }
    for (const auto& v : load_verdicts(out_dir / kVerdictsFile)) {
        r.verdicts.push_back({v.mutant_id, v.verdict.decision, v.verdict.stage});
    }
    for (const auto& j : read_jsonl(out_dir / kTestsFile)) {
        TestRecord t;
        t.candidate_id = j.value("candidate_id", std::string());
        t.mutant_id = j.at("mutant_id").get<std::string>();
        t.class_id = j.at("class_id").get<std::string>();
        t.group = j.value("group", std::string("default"));
        t.certified = j.value("verdict", std::string()) == "Certified";
        t.coverage_measured = j.contains("coverage_delta") && j["coverage_delta"].is_object();
        if (t.coverage_measured) {
            for (const auto& [_, lines] : j["coverage_delta"].items()) t.added_lines += lines.size();
        }
        r.tests.push_back(std::move(t));
    }
    return r;
}

// ---- stages ------------------------------------------------------------------

StageStatus run_mutate(const RunConfig& config, Gateway& gateway) {
    StageStatus status;
    const auto corpus = discover_targets(config.manifest, config.adapter.test_file_convention);
    for (const auto& w : corpus.warnings) status.warnings.push_back(w.class_id + ": " + w.message);
    const auto issue = IssueSpec::load(config.issue);

    std::vector<HarvestResult> results(corpus.classes.size());
    const HarvestOptions options{config.mutants_per_class, config.stop_on_first_survivor};
    parallel_for(corpus.classes.size(), config.workers, [&](std::size_t i) {
        results[i] = harvest_class(issue, corpus, corpus.classes[i], config.adapter, gateway, options);
    });

    for (const char* stale : {kMutantsFile, kVerdictsFile, kTestsFile}) fs::remove(config.out / stale);
    fs::remove_all(config.out / "mutants");
    fs::remove_all(config.out / kCertifiedDir);
    fs::create_directories(config.out);

    std::vector<json> classes;
    std::vector<json> mutants;
    for (std::size_t i = 0; i < corpus.classes.size(); ++i) {
        const auto& cut = corpus.classes[i];
        classes.push_back({{"class_id", cut.id},
                           {"group", cut.group},
                           {"source_digest", sha256_hex(cut.source_text)},
                           {"has_tests", !cut.test_class_text.empty()}});
        const auto& h = results[i];
        if (h.budget_exhausted || !h.errors.empty()) status.partial = true;
        for (const auto& e : h.errors) status.warnings.push_back(cut.id + ": " + e);
        for (const auto& o : h.outcomes) {
            const auto& m = o.candidate;
            json regions = json::array();
            for (const auto& r : m.regions) regions.push_back({r.first, r.last});
            json source_file = nullptr;
            if (!m.mutated_source.empty()) {
                const std::string rel = "mutants/" + m.mutant_id + "/" + basename(cut.source_path);
                write_file(config.out / rel, m.mutated_source);
                source_file = rel;
            }
            mutants.push_back({{"mutant_id", m.mutant_id},
                               {"class_id", m.class_id},
                               {"group", cut.group},
                               {"status", to_string(m.status)},
                               {"regions", regions},
                               {"source_file", source_file},
                               {"source_digest", sha256_hex(m.mutated_source)},
                               {"original_digest", m.original_digest},
                               {"provenance", m.provenance},
                               {"reason", m.invalid_reason},
                               {"cause", o.cause}});
        }
    }
    write_jsonl(config.out / kClassesFile, classes);
    write_jsonl(config.out / kMutantsFile, mutants);
    return status;
}

StageStatus run_screen(const RunConfig& config, Gateway& gateway) {
    StageStatus status;
    const auto corpus = discover_targets(config.manifest, config.adapter.test_file_convention);
    const auto stored = load_mutants(config.out);

    std::vector<const StoredMutant*> targets;
    for (const auto& s : stored) {
        if (s.candidate.status != MutantStatus::BuildsAndPasses) continue;
        const auto* cut = corpus.find(s.candidate.class_id);
        if (!cut) {
            status.warnings.push_back(s.candidate.mutant_id + ": class no longer in the manifest");
            continue;
        }
        if (is_stale(s.candidate, *cut)) {
            status.warnings.push_back(s.candidate.mutant_id + ": refused, class source changed since generation");
            continue;
        }
        targets.push_back(&s);
    }

    std::vector<EquivalenceVerdict> verdicts(targets.size());
    parallel_for(targets.size(), config.workers, [&](std::size_t i) {
        const auto& m = targets[i]->candidate;
        verdicts[i] = screen(corpus.find(m.class_id)->source_text, m, config.adapter.comment_grammar, gateway);
    });

    std::vector<json> records;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& m = targets[i]->candidate;
        const auto& v = verdicts[i];
        records.push_back({{"mutant_id", m.mutant_id},
                           {"class_id", m.class_id},
                           {"decision", to_string(v.decision)},
                           {"stage", to_string(v.stage)},
                           {"explanation", nullable(v.judge_explanation)},
                           {"cause", nullable(v.cause)}});
        if (v.cause) status.warnings.push_back(m.mutant_id + ": judge unavailable: " + *v.cause);
    }
    fs::remove(config.out / kTestsFile);
    fs::remove_all(config.out / kCertifiedDir);
    write_jsonl(config.out / kVerdictsFile, records);
    if (gateway.budget_exhausted()) status.partial = true;
    return status;
}

StageStatus run_gentest(const RunConfig& config, Gateway& gateway) {
    StageStatus status;
    const auto corpus = discover_targets(config.manifest, config.adapter.test_file_convention);
    const auto stored = load_mutants(config.out);
    const auto verdicts = load_verdicts(config.out / kVerdictsFile);
    std::map<std::string, Decision> decision_of;
    for (const auto& v : verdicts) decision_of[v.mutant_id] = v.verdict.decision;

    std::vector<const StoredMutant*> targets;
    for (const auto& s : stored) {
        const auto it = decision_of.find(s.candidate.mutant_id);
        if (it == decision_of.end()) continue;
        const bool wanted = it->second == Decision::NonEquivalent ||
                            (it->second == Decision::NoAnswer && config.test_no_answer);
        if (!wanted) continue;
        const auto* cut = corpus.find(s.candidate.class_id);
        if (!cut || is_stale(s.candidate, *cut)) {
            status.warnings.push_back(s.candidate.mutant_id + ": refused, class source changed since generation");
            continue;
        }
        targets.push_back(&s);
    }

    std::vector<HardenResult> results(targets.size());
    const HardenOptions options{config.retries, AssureOptions{config.repeats, true}};
    parallel_for(targets.size(), config.workers, [&](std::size_t i) {
        const auto& m = targets[i]->candidate;
        results[i] = harden(m, corpus, *corpus.find(m.class_id), config.adapter, gateway, options);
    });

    fs::remove_all(config.out / kCertifiedDir);
    std::vector<json> records;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& s = *targets[i];
        const auto& m = s.candidate;
        const auto& cut = *corpus.find(m.class_id);
        if (results[i].budget_exhausted) status.partial = true;
        for (std::size_t k = 0; k < results[i].attempts.size(); ++k) {
            const auto& a = results[i].attempts[k];
            const std::string id = m.mutant_id + "-t" + std::to_string(k + 1);
            json rec{{"candidate_id", id},
                     {"mutant_id", m.mutant_id},
                     {"class_id", m.class_id},
                     {"group", s.group},
                     {"cycle", k + 1}};
            const bool certified = a.report && a.report->certified();
            rec["verdict"] = certified ? "Certified" : "Rejected";
            rec["reason"] = a.rejection;
            rec["new_test_names"] = a.candidate ? a.candidate->new_test_names : std::vector<std::string>{};
            if (a.report) {
                const auto& r = *a.report;
                rec["buildable"] = r.buildable;
                rec["passes_on_original"] = r.passes_on_original;
                rec["run_count"] = r.run_count;
                rec["kills_mutant"] = r.kills_mutant;
                rec["failing_new_tests"] = r.failing_new_tests;
                rec["coverage_delta"] = r.coverage_delta ? coverage_json(*r.coverage_delta) : json(nullptr);
            }
            if (certified) {
                const fs::path dir = config.out / kCertifiedDir / id;
                write_file(dir / basename(cut.test_class_path), a.candidate->extended_test_class);
                write_file(dir / "mutant" / basename(cut.source_path), m.mutated_source);
                json assurance = rec;
                assurance["mutant_regions"] = json::array();
                for (const auto& r : m.regions) assurance["mutant_regions"].push_back({r.first, r.last});
                assurance["repeats"] = config.repeats;
                write_file(dir / "assurance.json", assurance.dump(2) + "\n");
                write_file(dir / "summary.txt", render_diff_summary(*a.candidate, *a.report, m, cut));
            }
            records.push_back(std::move(rec));
        }
    }
    write_jsonl(config.out / kTestsFile, records);
    return status;
}

StageStatus run_report(const RunConfig& config, std::string* table_out) {
    const auto summary = summarize(load_run_records(config.out));
    const auto table = render_summary_table(summary);
    write_file(config.out / "summary.txt", table);
    write_file(config.out / "summary.json", summary_to_json(summary).dump(2) + "\n");
    if (table_out) *table_out = table;
    return {};
}

StageStatus run_pipeline(const RunConfig& config, Gateway& gateway) {
    StageStatus status = run_mutate(config, gateway);
    status.merge(run_screen(config, gateway));
    status.merge(run_gentest(config, gateway));
    status.merge(run_report(config));
    return status;
}

}  // namespace mgen
