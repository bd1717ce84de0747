#include "mgen/mutagen.hpp"

#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/text.hpp"

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace mgen {

namespace {

bool is_marker(std::string_view line, std::string_view marker) { return text::trim(line) == marker; }

bool mentions_marker(std::string_view line) {
    return line.find("MUTANT <START>") != std::string_view::npos ||
           line.find("MUTANT <END>") != std::string_view::npos;
}

std::vector<std::string> significant_lines(const std::vector<std::string>& lines, std::size_t begin,
                                           std::size_t end) {
    std::vector<std::string> out;
    for (std::size_t i = begin; i < end; ++i) {
        auto c = text::collapse_whitespace(lines[i]);
        if (!c.empty()) out.push_back(std::move(c));
    }
    return out;
}

bool matches_at(const std::vector<std::string>& hay, std::size_t pos, const std::vector<std::string>& needle) {
    if (pos + needle.size() > hay.size()) return false;
    for (std::size_t i = 0; i < needle.size(); ++i) {
        if (hay[pos + i] != needle[i]) return false;
    }
    return true;
}

// True when the original can be written as seg0 X1 seg1 X2 ... segN, where the
// X are arbitrary (possibly empty) replaced spans. Greedy leftmost placement of
// the middle segments leaves the most room for the rest.
bool outside_regions_unchanged(const std::vector<std::vector<std::string>>& segments,
                               const std::vector<std::string>& original) {
    if (segments.empty()) return true;
    const auto& head = segments.front();
    if (!matches_at(original, 0, head)) return false;
    std::size_t pos = head.size();
    for (std::size_t s = 1; s + 1 < segments.size(); ++s) {
        bool placed = false;
        for (std::size_t p = pos; p + segments[s].size() <= original.size(); ++p) {
            if (matches_at(original, p, segments[s])) {
                pos = p + segments[s].size();
                placed = true;
                break;
            }
        }
        if (!placed) return false;
    }
    if (segments.size() == 1) return true;
    const auto& tail = segments.back();
    if (tail.size() > original.size() - pos) return false;
    return matches_at(original, original.size() - tail.size(), tail);
}

}  // namespace

void IssueSpec::validate() const {
    if (text::trim(concern_context).empty()) throw Error(ErrorCode::ConfigInvalid, "issue concern_context is empty");
    if (example_diffs.empty()) throw Error(ErrorCode::ConfigInvalid, "issue needs at least one example diff");
}

IssueSpec IssueSpec::load(const fs::path& path) {
    IssueSpec issue;
    try {
        const auto j = json::parse(read_file(path));
        issue.label = j.value("label", std::string());
        issue.concern_context = j.at("concern_context").get<std::string>();
        for (const auto& d : j.at("example_diffs")) {
            if (d.is_string()) {
                issue.example_diffs.push_back(d.get<std::string>());
            } else {
                // {"file": "relative/path.diff"}
                issue.example_diffs.push_back(read_file(path.parent_path() / d.at("file").get<std::string>()));
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
    }
    issue.validate();
    return issue;
}

std::string_view to_string(MutantStatus s) noexcept {
    switch (s) {
        case MutantStatus::Generated: return "Generated";
        case MutantStatus::MarkerInvalid: return "MarkerInvalid";
        case MutantStatus::BuildFailed: return "BuildFailed";
        case MutantStatus::KilledByExistingTests: return "KilledByExistingTests";
        case MutantStatus::BuildsAndPasses: return "BuildsAndPasses";
    }
    return "?";
}

MutantStatus parse_mutant_status(std::string_view s) {
    for (auto st : {MutantStatus::Generated, MutantStatus::MarkerInvalid, MutantStatus::BuildFailed,
                    MutantStatus::KilledByExistingTests, MutantStatus::BuildsAndPasses}) {
        if (to_string(st) == s) return st;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown mutant status '" + std::string(s) + "'");
}

std::string MutantCandidate::unmarked_source() const {
    std::string out;
    std::size_t pos = 0;
    while (pos < mutated_source.size()) {
        auto nl = mutated_source.find('\n', pos);
        const auto end = nl == std::string::npos ? mutated_source.size() : nl + 1;
        const std::string_view line(mutated_source.data() + pos, end - pos);
        if (!is_marker(line, kMutantStart) && !is_marker(line, kMutantEnd)) out.append(line);
        pos = end;
    }
    return out;
}

std::string build_fault_prompt(const IssueSpec& issue, const ClassUnderTest& cut, const std::string& diff) {
    if (cut.source_text.empty()) throw Error(ErrorCode::InvalidArgument, "class under test has no source");
    return render(shipped_template(TemplateName::MakeFault), {{"context_about_concern", issue.concern_context},
                                                             {"class_under_test", cut.source_text},
                                                             {"existing_test_class", cut.test_class_text},
                                                             {"diff", diff}});
}

MutantCandidate parse_mutant(std::string_view response, const ClassUnderTest& original) {
    const auto blocks = extract_fenced_code(response);
    if (blocks.empty()) throw Error(ErrorCode::NoCodeBlock, "response for " + original.id + " has no fenced code");

    MutantCandidate m;
    m.class_id = original.id;
    m.original_digest = sha256_hex(original.source_text);
    m.mutated_source = blocks.front().text;
    if (!original.source_text.empty() && original.source_text.back() == '\n') m.mutated_source.push_back('\n');

    auto invalid = [&](std::string why) {
        m.status = MutantStatus::MarkerInvalid;
        m.invalid_reason = std::move(why);
        m.regions.clear();
        return m;
    };

    const auto lines = text::split_lines(m.mutated_source);
    std::optional<std::size_t> open;  // 0-based index of the START marker
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_marker(lines[i], kMutantStart)) {
            if (open) return invalid("nested MUTANT <START> at line " + std::to_string(i + 1));
            open = i;
        } else if (is_marker(lines[i], kMutantEnd)) {
            if (!open) return invalid("MUTANT <END> without START at line " + std::to_string(i + 1));
            pairs.emplace_back(*open, i);
            open.reset();
        } else if (mentions_marker(lines[i])) {
            return invalid("marker must sit on its own line (line " + std::to_string(i + 1) + ")");
        }
    }
    if (open) return invalid("MUTANT <START> at line " + std::to_string(*open + 1) + " is never closed");
    if (pairs.empty()) return invalid("no MUTANT marker pair");

    std::vector<std::vector<std::string>> segments;
    std::size_t cursor = 0;
    for (const auto& [start, end] : pairs) {
        segments.push_back(significant_lines(lines, cursor, start));
        m.regions.push_back({static_cast<int>(start) + 2, static_cast<int>(end)});
        cursor = end + 1;
    }
    segments.push_back(significant_lines(lines, cursor, lines.size()));
    const auto original_lines = text::split_lines(original.source_text);
    if (!outside_regions_unchanged(segments, significant_lines(original_lines, 0, original_lines.size()))) {
        return invalid("code outside the marked regions differs from the original");
    }
    m.status = MutantStatus::Generated;
    return m;
}

MutantGateOutcome gate_candidate(MutantCandidate candidate, const Corpus& corpus, const ClassUnderTest& cut,
                                 const TargetAdapter& adapter) {
    if (candidate.status != MutantStatus::Generated) {
        throw Error(ErrorCode::InvalidArgument, "only Generated candidates can be gated");
    }
    MutantGateOutcome out{std::move(candidate), std::nullopt, std::nullopt, {}};
    auto& m = out.candidate;
    try {
        auto ws = materialize_workspace(corpus, cut, {{cut.source_path, m.mutated_source}},
                                        MutatedVariant{m.mutant_id});
        out.build_result = run_build(ws, adapter);
        if (out.build_result->outcome != Outcome::AllPassed) {
            m.status = MutantStatus::BuildFailed;
            if (out.build_result->outcome == Outcome::Timeout) out.cause = "build timed out";
            return out;
        }
        out.existing_test_result = run_tests(ws, adapter);
        switch (out.existing_test_result->outcome) {
            case Outcome::AllPassed: m.status = MutantStatus::BuildsAndPasses; break;
            case Outcome::Timeout:
                out.cause = "existing tests timed out";
                m.status = MutantStatus::KilledByExistingTests;
                break;
            default: m.status = MutantStatus::KilledByExistingTests; break;
        }
    } catch (const Error& e) {
        m.status = MutantStatus::BuildFailed;
        out.cause = e.what();
    }
    return out;
}

const MutantGateOutcome* HarvestResult::survivor() const {
    for (const auto& o : outcomes) {
        if (o.candidate.status == MutantStatus::BuildsAndPasses) return &o;
    }
    return nullptr;
}

HarvestResult harvest_class(const IssueSpec& issue, const Corpus& corpus, const ClassUnderTest& cut,
                            const TargetAdapter& adapter, Gateway& gateway, const HarvestOptions& options) {
    if (options.budget < 1) throw Error(ErrorCode::InvalidArgument, "mutant budget must be at least 1");
    issue.validate();
    HarvestResult result;
    for (int attempt = 0; attempt < options.budget; ++attempt) {
        const auto& diff = issue.example_diffs[static_cast<std::size_t>(attempt) % issue.example_diffs.size()];
        const std::string prompt = build_fault_prompt(issue, cut, diff);
        std::string response;
        try {
            response = gateway.complete(prompt);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::BudgetExceeded) {
                result.budget_exhausted = true;
                break;
            }
            if (e.code() == ErrorCode::BackendUnavailable) {
                result.errors.push_back(e.what());
                break;
            }
            throw;
        }
        MutantCandidate candidate;
        try {
            candidate = parse_mutant(response, cut);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoCodeBlock) throw;
            candidate.class_id = cut.id;
            candidate.original_digest = sha256_hex(cut.source_text);
            candidate.status = MutantStatus::MarkerInvalid;
            candidate.invalid_reason = "response has no fenced code block";
        }
        candidate.mutant_id = cut.id + "-m" + std::to_string(attempt + 1);
        candidate.provenance = request_digest({gateway.config().model, prompt, gateway.config().params});
        if (candidate.status == MutantStatus::MarkerInvalid) {
            result.outcomes.push_back({std::move(candidate), std::nullopt, std::nullopt, {}});
            continue;
        }
        result.outcomes.push_back(gate_candidate(std::move(candidate), corpus, cut, adapter));
        if (options.stop_on_first_survivor && result.outcomes.back().candidate.status == MutantStatus::BuildsAndPasses) {
            break;
        }
    }
    return result;
}

}  // namespace mgen
