#include "mgen/cli.hpp"

#include "mgen/digest.hpp"
#include "mgen/error.hpp"
#include "mgen/pipeline.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace mgen::cli {

namespace {

struct Overrides {
    std::string config;
    std::string mode;
    std::string transcript;
    std::string out;
    unsigned workers = 0;
    int budget_mutants = 0;
    int retries = 0;
    int repeats = 0;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--mode", o.mode, "live, record or replay")
        ->check(CLI::IsMember({"live", "record", "replay"}));
    cmd->add_option("--transcript", o.transcript, "transcript file for record/replay");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--workers", o.workers, "concurrent class pipelines")->check(CLI::PositiveNumber);
    cmd->add_option("--budget-mutants", o.budget_mutants, "mutant attempts per class")->check(CLI::PositiveNumber);
    cmd->add_option("--retries", o.retries, "test generation cycles per mutant")->check(CLI::PositiveNumber);
    cmd->add_option("--repeats", o.repeats, "passing runs required on the original")->check(CLI::PositiveNumber);
}

RunConfig load_config(const Overrides& o) {
    auto c = RunConfig::load(o.config);
    if (!o.mode.empty()) {
        c.llm.mode = parse_gateway_mode(o.mode);
        c.llm.gateway.mode = c.llm.mode;
    }
    if (!o.transcript.empty()) c.llm.transcript = fs::absolute(o.transcript);
    if (!o.out.empty()) c.out = fs::absolute(o.out);
    if (o.workers) c.workers = o.workers;
    if (o.budget_mutants) c.mutants_per_class = o.budget_mutants;
    if (o.retries) c.retries = o.retries;
    if (o.repeats) c.repeats = o.repeats;
    c.validate();
    return c;
}

std::string fmt2(const std::optional<double>& v) {
    if (!v) return "n/a";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << round_half_up(*v, 2);
    return os.str();
}

int finish(const StageStatus& status, std::ostream& err) {
    for (const auto& w : status.warnings) err << "warning: " << w << '\n';
    if (status.partial) {
        err << "partial result: request budget exhausted or backend unavailable\n";
        return kPartial;
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mutation-guided test generation"};
    app.name("mgen");
    app.require_subcommand(1);

    Overrides mutate_o, screen_o, gentest_o, pipeline_o, report_o;
    auto* mutate = app.add_subcommand("mutate", "generate and gate mutants");
    auto* screen = app.add_subcommand("screen", "equivalence verdicts for stored mutants");
    auto* gentest = app.add_subcommand("gentest", "generate and certify tests for surviving mutants");
    auto* pipeline = app.add_subcommand("pipeline", "all stages");
    auto* report = app.add_subcommand("report", "summaries from stored records");
    add_common(mutate, mutate_o);
    add_common(screen, screen_o);
    add_common(gentest, gentest_o);
    add_common(pipeline, pipeline_o);
    report->add_option("--config", report_o.config, "run configuration (JSON)")->check(CLI::ExistingFile);
    report->add_option("--out", report_o.out, "output directory");

    std::string labels, verdicts_path, eval_config;
    auto* eval = app.add_subcommand("eval-equiv", "score equivalence verdicts against labels");
    eval->add_option("--labels", labels, "ground-truth labels (JSONL)")->required()->check(CLI::ExistingFile);
    eval->add_option("--verdicts", verdicts_path, "verdicts file (JSONL)")->check(CLI::ExistingFile);
    eval->add_option("--config", eval_config, "run configuration; verdicts default to <out>/verdicts.jsonl")
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        auto staged = [&](Overrides& o, auto stage) {
            const auto config = load_config(o);
            auto gateway = make_gateway(config);
            const auto status = stage(config, *gateway);
            err << "gateway requests: " << gateway->requests() << ", backend calls: " << gateway->backend_calls()
                << '\n';
            return finish(status, err);
        };
        if (mutate->parsed()) return staged(mutate_o, run_mutate);
        if (screen->parsed()) return staged(screen_o, run_screen);
        if (gentest->parsed()) return staged(gentest_o, run_gentest);
        if (pipeline->parsed()) {
            return staged(pipeline_o, [&](const RunConfig& c, Gateway& g) {
                auto status = run_pipeline(c, g);
                out << read_file(c.out / "summary.txt");
                return status;
            });
        }
        if (report->parsed()) {
            RunConfig config;
            if (!report_o.config.empty()) config = RunConfig::load(report_o.config);
            if (!report_o.out.empty()) config.out = fs::absolute(report_o.out);
            if (report_o.config.empty() && report_o.out.empty()) {
                err << "usage error: report needs --config or --out\n";
                return kUsage;
            }
            std::string table;
            run_report(config, &table);
            out << table;
            return kOk;
        }
        if (eval->parsed()) {
            fs::path vpath = verdicts_path;
            if (vpath.empty()) {
                if (eval_config.empty()) {
                    err << "usage error: eval-equiv needs --verdicts or --config\n";
                    return kUsage;
                }
                vpath = RunConfig::load(eval_config).out / "verdicts.jsonl";
            }
            std::size_t unmatched = 0;
            const auto items = join_labels(load_verdicts(vpath), load_labels(labels), &unmatched);
            if (unmatched) err << "warning: " << unmatched << " verdicts have no label and were skipped\n";
            for (const auto mode : kAllEvalModes) {
                out << std::left << std::setw(19) << to_string(mode);
                try {
                    const auto s = score(items, mode);
                    out << " tp=" << s.matrix.tp << " fp=" << s.matrix.fp << " tn=" << s.matrix.tn
                        << " fn=" << s.matrix.fn << " precision=" << fmt2(s.precision)
                        << " recall=" << fmt2(s.recall) << '\n';
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::EmptyAfterExclusion) throw;
                    out << " no items counted\n";
                }
            }
            return kOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidArgument ? kUsage : kEnvironment;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kEnvironment;
    }
    return kUsage;
}

}  // namespace mgen::cli
