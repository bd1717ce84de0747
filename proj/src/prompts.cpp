#include "mgen/error.hpp"
#include "mgen/llm.hpp"
#include "mgen/text.hpp"

#include <cctype>

namespace mgen {

namespace {

const PromptTemplate kMakeFault{
    TemplateName::MakeFault,
    "CONTEXT: {context_about_concern} INSTRUCTION: Here is a Kotlin class and a test class with some unit "
    "tests for the class under test ```{class_under_test}```. ```{existing_test_class}```. Write a new version "
    "of the class under test in which each method is replaced by a new version of that method that contains a "
    "typical bug that introduces a privacy violation similar to {diff}. Delimit the mutated part using the "
    "comment-pair `// MUTANT <START>` and `// MUTANT <END>`"};

const PromptTemplate kEquivalenceDetector{
    TemplateName::EquivalenceDetector,
    "I'm going to show you two slightly different versions of a Kotlin class. Here is the first version of the "
    "Kotlin class:```{class_version1}```. Here is the second version of the Kotlin class:```{class_version2}```. "
    "INSTRUCTION: If the first version of the class will always do exactly the same thing as the second version "
    "of the class, just respond with `{{yes}}`. However, if the two versions of the class are not equivalent, "
    "respond with `{{no}}`, and give an explanation of how execution of the first version can produce a "
    "different behaviour to execution of the second version."};

const PromptTemplate kMakeTest{
    TemplateName::MakeTest,
    "What follows is two versions of a Kotlin class under test. An original correct class and a mutated version "
    "of that class that contains one mutant per method, each of which represents a bug. Each bug is delimited by "
    "the comment-pair `// MUTANT <START>` and `// MUTANT <END>`. The original class and its mutant are followed "
    "by a test class that contains unit tests for the original correct class under test. This is the original "
    "version of the class under test:```{original_class}```. This is the mutated version of the class under "
    "test:```{mutated_class}```. Here is the existing test class:```{existing_test_class}```. Write an extended "
    "version of the test class that contains extra test cases that will fail on the mutant version of the class, "
    "but would pass on the correct version."};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of a `{ident}` slot starting at body[i], or 0.
std::size_t slot_length(std::string_view body, std::size_t i) {
    if (body[i] != '{' || i + 1 >= body.size() || !ident_start(body[i + 1])) return 0;
    std::size_t j = i + 1;
    while (j < body.size() && ident_char(body[j])) ++j;
    return (j < body.size() && body[j] == '}') ? j - i + 1 : 0;
}

template <typename OnText, typename OnSlot>
void scan_template(std::string_view body, OnText on_text, OnSlot on_slot) {
    std::size_t i = 0;
    while (i < body.size()) {
        if (body.compare(i, 2, "{{") == 0) {
            on_text('{');
            i += 2;
        } else if (body.compare(i, 2, "}}") == 0) {
            on_text('}');
            i += 2;
        } else if (const auto len = slot_length(body, i)) {
            on_slot(std::string(body.substr(i + 1, len - 2)));
            i += len;
        } else {
            on_text(body[i]);
            ++i;
        }
    }
}

}  // namespace

std::string_view to_string(TemplateName name) noexcept {
    switch (name) {
        case TemplateName::MakeFault: return "MakeFault";
        case TemplateName::EquivalenceDetector: return "EquivalenceDetector";
        case TemplateName::MakeTest: return "MakeTest";
    }
    return "?";
}

const PromptTemplate& shipped_template(TemplateName name) {
    switch (name) {
        case TemplateName::MakeFault: return kMakeFault;
        case TemplateName::EquivalenceDetector: return kEquivalenceDetector;
        case TemplateName::MakeTest: return kMakeTest;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown template");
}

std::set<std::string> PromptTemplate::placeholders() const {
    std::set<std::string> names;
    scan_template(body, [](char) {}, [&](std::string n) { names.insert(std::move(n)); });
    return names;
}

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
    const auto slots = tmpl.placeholders();
    for (const auto& [key, _] : bindings) {
        if (!slots.count(key)) throw Error(ErrorCode::UnknownPlaceholder, key);
    }
    for (const auto& slot : slots) {
        if (!bindings.count(slot)) throw Error(ErrorCode::UnboundPlaceholder, slot);
    }
    std::string out;
    out.reserve(tmpl.body.size());
    scan_template(
        tmpl.body, [&](char c) { out.push_back(c); }, [&](const std::string& n) { out += bindings.at(n); });
    return out;
}

std::vector<CodeBlock> extract_fenced_code(std::string_view response) {
    std::vector<CodeBlock> blocks;
    std::optional<CodeBlock> open;
    std::vector<std::string> body;
    for (const auto& line : text::split_lines(response)) {
        const auto t = text::trim(line);
        if (!open) {
            if (t.rfind("```", 0) == 0) {
                open = CodeBlock{};
                open->language = std::string(text::trim(t.substr(3)));
                body.clear();
            }
            continue;
        }
        if (t == "```") {
            open->text = text::join_lines(body, 0, body.size());
            blocks.push_back(std::move(*open));
            open.reset();
            continue;
        }
        body.push_back(line);
    }
    if (open) {
        open->text = text::join_lines(body, 0, body.size());
        open->unterminated = true;
        blocks.push_back(std::move(*open));
    }
    return blocks;
}

std::string_view to_string(BracedToken t) noexcept {
    switch (t) {
        case BracedToken::Yes: return "yes";
        case BracedToken::No: return "no";
        case BracedToken::NoAnswer: return "no-answer";
    }
    return "?";
}

BracedAnswer extract_braced_token(std::string_view response) {
    const std::string lower = text::to_lower(response);
    const auto yes = lower.find("{yes}");
    const auto no = lower.find("{no}");
    BracedAnswer answer;
    if (yes == std::string::npos && no == std::string::npos) return answer;
    if (no == std::string::npos || (yes != std::string::npos && yes < no)) {
        answer.token = BracedToken::Yes;
        return answer;
    }
    answer.token = BracedToken::No;
    std::string_view rest = response.substr(no + 4);
    rest = text::trim(rest);
    while (!rest.empty() && (rest.front() == '`' || rest.front() == ',' || rest.front() == '.' ||
                             rest.front() == ':' || rest.front() == '-')) {
        rest.remove_prefix(1);
        rest = text::trim(rest);
    }
    answer.explanation = std::string(rest);
    return answer;
}

}  // namespace mgen
