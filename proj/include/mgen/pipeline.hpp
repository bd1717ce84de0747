#pragma once

#include "mgen/corpus.hpp"
#include "mgen/equiv.hpp"
#include "mgen/llm.hpp"
#include "mgen/mutagen.hpp"
#include "mgen/report.hpp"
#include "mgen/testgen.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mgen {

struct LlmSettings {
    GatewayMode mode = GatewayMode::Replay;
    std::optional<std::filesystem::path> transcript;
    std::string endpoint;
    std::string token_env = "MGEN_LLM_TOKEN";
    GatewayConfig gateway;
};

struct RunConfig {
    std::filesystem::path manifest;
    TargetAdapter adapter;
    std::filesystem::path issue;
    LlmSettings llm;
    int mutants_per_class = 3;
    bool stop_on_first_survivor = true;
    int retries = 3;
    int repeats = 5;
    bool test_no_answer = true;
    unsigned workers = 1;
    std::filesystem::path out = "out";

    /// Relative paths resolve against the config file's directory.
    static RunConfig load(const std::filesystem::path& path);
    /// Replay needs a transcript; live and record need `llm.endpoint`.
    void validate() const;
};

/// Builds the completion gateway the config describes.
std::unique_ptr<Gateway> make_gateway(const RunConfig& config);

/// Outcome of a stage; `partial` means the request budget or backend gave out.
struct StageStatus {
    bool partial = false;
    std::vector<std::string> warnings;

    void merge(const StageStatus& other);
};

StageStatus run_mutate(const RunConfig& config, Gateway& gateway);
StageStatus run_screen(const RunConfig& config, Gateway& gateway);
StageStatus run_gentest(const RunConfig& config, Gateway& gateway);
StageStatus run_report(const RunConfig& config, std::string* table_out = nullptr);
StageStatus run_pipeline(const RunConfig& config, Gateway& gateway);

// ---- stored records ----------------------------------------------------------

struct StoredMutant {
    MutantCandidate candidate;
    std::string group;
    std::string cause;
};

struct StoredVerdict {
    std::string mutant_id;
    std::string class_id;
    EquivalenceVerdict verdict;
};

std::vector<StoredMutant> load_mutants(const std::filesystem::path& out_dir);
std::vector<StoredVerdict> load_verdicts(const std::filesystem::path& verdicts_file);
RunRecords load_run_records(const std::filesystem::path& out_dir);

struct GroundTruth {
    std::string mutant_id;
    bool equivalent = false;
    std::string note;
};

std::vector<GroundTruth> load_labels(const std::filesystem::path& labels_file);

/// Joins verdicts to labels by mutant id; unlabeled verdicts are skipped.
std::vector<LabeledVerdict> join_labels(const std::vector<StoredVerdict>& verdicts,
                                        const std::vector<GroundTruth>& labels, std::size_t* unmatched = nullptr);

}  // namespace mgen
