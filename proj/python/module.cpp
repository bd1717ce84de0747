#include "mgen/cli.hpp"
#include "mgen/corpus.hpp"
#include "mgen/equiv.hpp"
#include "mgen/error.hpp"
#include "mgen/llm.hpp"
#include "mgen/mutagen.hpp"
#include "mgen/pipeline.hpp"
#include "mgen/report.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using nlohmann::json;

namespace {

mgen::TemplateName template_named(const std::string& name) {
    for (auto t : {mgen::TemplateName::MakeFault, mgen::TemplateName::EquivalenceDetector,
                   mgen::TemplateName::MakeTest}) {
        if (mgen::to_string(t) == name) return t;
    }
    throw mgen::Error(mgen::ErrorCode::InvalidArgument, "unknown template '" + name + "'");
}

mgen::CommentGrammar grammar_from(const std::optional<std::string>& adapter_json) {
    if (!adapter_json) return {};
    return mgen::TargetAdapter::from_json(json::parse(*adapter_json)).comment_grammar;
}

template <typename E, std::size_t N>
E enum_named(const std::string& name, const E (&all)[N], const char* what) {
    for (auto e : all) {
        if (mgen::to_string(e) == name) return e;
    }
    throw mgen::Error(mgen::ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + name + "'");
}

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mutation-guided test generation core";
    static py::exception<mgen::Error> error(m, "MgenError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const mgen::Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
            exc.attr("code") = std::string(mgen::to_string(e.code()));
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    m.def("render", [](const std::string& name, const std::map<std::string, std::string>& bindings) {
        return mgen::render(mgen::shipped_template(template_named(name)), bindings);
    }, py::arg("template"), py::arg("bindings"));

    m.def("placeholders", [](const std::string& name) {
        return mgen::shipped_template(template_named(name)).placeholders();
    }, py::arg("template"));

    m.def("extract_fenced_code", [](const std::string& text) {
        py::list out;
        for (const auto& b : mgen::extract_fenced_code(text)) {
            py::dict d;
            d["language"] = b.language;
            d["text"] = b.text;
            d["unterminated"] = b.unterminated;
            out.append(d);
        }
        return out;
    }, py::arg("text"));

    m.def("extract_braced_token", [](const std::string& text) {
        const auto a = mgen::extract_braced_token(text);
        return py::make_tuple(std::string(mgen::to_string(a.token)), a.explanation);
    }, py::arg("text"));

    m.def("strip_comments", [](const std::string& source, const std::optional<std::string>& adapter_json) {
        return mgen::strip_comments(source, grammar_from(adapter_json)).token_text;
    }, py::arg("source"), py::arg("adapter_json") = py::none());

    m.def("parse_mutant", [](const std::string& response, const std::string& original, const std::string& class_id) {
        mgen::ClassUnderTest cut;
        cut.id = class_id;
        cut.source_text = original;
        const auto c = mgen::parse_mutant(response, cut);
        py::list regions;
        for (const auto& r : c.regions) regions.append(py::make_tuple(r.first, r.last));
        py::dict d;
        d["status"] = std::string(mgen::to_string(c.status));
        d["regions"] = regions;
        d["mutated_source"] = c.mutated_source;
        d["unmarked_source"] = c.unmarked_source();
        d["invalid_reason"] = c.invalid_reason;
        return d;
    }, py::arg("response"), py::arg("original"), py::arg("class_id") = "C");

    m.def("score", [](const std::vector<std::tuple<std::string, std::string, bool>>& items, const std::string& mode) {
        static const mgen::Stage stages[] = {mgen::Stage::ByteIdentity, mgen::Stage::StrippedIdentity,
                                             mgen::Stage::Judge};
        static const mgen::Decision decisions[] = {mgen::Decision::Equivalent, mgen::Decision::NonEquivalent,
                                                   mgen::Decision::NoAnswer};
        std::vector<mgen::LabeledVerdict> labeled;
        for (const auto& [stage, decision, truth] : items) {
            mgen::LabeledVerdict v;
            v.verdict.stage = enum_named(stage, stages, "stage");
            v.verdict.decision = enum_named(decision, decisions, "decision");
            v.truly_equivalent = truth;
            labeled.push_back(v);
        }
        const auto s = mgen::score(labeled, enum_named(mode, mgen::kAllEvalModes, "mode"));
        py::dict d;
        d["tp"] = s.matrix.tp;
        d["fp"] = s.matrix.fp;
        d["tn"] = s.matrix.tn;
        d["fn"] = s.matrix.fn;
        d["precision"] = s.precision;
        d["recall"] = s.recall;
        return d;
    }, py::arg("items"), py::arg("mode"));

    m.def("round_half_up", &mgen::round_half_up, py::arg("value"), py::arg("places"));
    m.def("percent_half_up", &mgen::percent_half_up, py::arg("num"), py::arg("den"));

    m.def("summarize", [](const std::string& out_dir) {
        return to_python(mgen::summary_to_json(mgen::summarize(mgen::load_run_records(out_dir))));
    }, py::arg("out_dir"));

    m.def("summary_table", [](const std::string& out_dir) {
        return mgen::render_summary_table(mgen::summarize(mgen::load_run_records(out_dir)));
    }, py::arg("out_dir"));

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::vector<std::string> argv{"mgen"};
        argv.insert(argv.end(), args.begin(), args.end());
        std::vector<const char*> ptrs;
        for (const auto& a : argv) ptrs.push_back(a.c_str());
        std::ostringstream out;
        std::ostringstream err;
        int code = 0;
        {
            py::gil_scoped_release release;
            code = mgen::cli::run(static_cast<int>(ptrs.size()), ptrs.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
