#include "orderbench/prompts.hpp"

#include "orderbench/digest.hpp"

#include <array>
#include <map>

namespace orderbench {

namespace {

constexpr std::string_view kBaseInstruction = "Answer with one of the options.";
constexpr std::string_view kAnswerFirst =
    "Please give out the correct option in the first sentence and then give out the logic.";
constexpr std::string_view kLogicFirst =
    "Please give out the reasoning logic first and then answer the question by selecting the options.";
constexpr std::string_view kReflexive =
    "Original Question: {question}\n"
    "\n"
    "Each time I asked you twice, once I asked you to give me the answer first then the logic, once I asked you "
    "to give me the logic first then the answer, and sometimes the two answers are different. Here I want you to "
    "review the logic of the two results and give me the final answer.\n"
    "\n"
    "Result 1: {result_1}\n"
    "\n"
    "Result 2: {result_2}";

constexpr std::array<std::string_view, 3> kPlaceholders = {"question", "result_1", "result_2"};

std::string read_template(const std::filesystem::path& path)
{
    if (!std::filesystem::is_regular_file(path)) {
        throw PromptError(PromptError::Kind::TemplateMissing, "missing template " + path.string());
    }
    auto text = read_file(path);
    if (!text.empty() && text.back() == '\n') {
        text.pop_back();
    }
    return text;
}

// Single left-to-right pass, so placeholder-like text inside substituted
// values is never expanded.
std::string substitute(std::string_view tpl, const std::map<std::string_view, std::string_view>& values)
{
    std::string out;
    out.reserve(tpl.size() + 256);
    std::size_t i = 0;
    while (i < tpl.size()) {
        if (tpl[i] == '{') {
            const auto close = tpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                const auto name = tpl.substr(i + 1, close - i - 1);
                if (auto it = values.find(name); it != values.end()) {
                    out.append(it->second);
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tpl[i]);
        ++i;
    }
    return out;
}

void check_reflexive_template(std::string_view tpl)
{
    for (auto name : kPlaceholders) {
        const std::string token = "{" + std::string(name) + "}";
        const auto first = tpl.find(token);
        if (first == std::string_view::npos || tpl.find(token, first + 1) != std::string_view::npos) {
            throw PromptError(PromptError::Kind::TemplateMalformed,
                              "reflexive template must contain " + token + " exactly once");
        }
    }
    if (tpl.find("{result_1}") > tpl.find("{result_2}")) {
        throw PromptError(PromptError::Kind::TemplateMalformed, "reflexive template must place {result_1} first");
    }
}

} // namespace

std::string to_string(PromptOrder order)
{
    switch (order) {
    case PromptOrder::Raw:
        return "raw";
    case PromptOrder::AnswerFirst:
        return "answer_first";
    case PromptOrder::LogicFirst:
        return "logic_first";
    case PromptOrder::Reflexive:
        return "reflexive";
    }
    return "unknown";
}

std::optional<PromptOrder> parse_prompt_order(std::string_view name)
{
    for (auto o : kAllOrders) {
        if (to_string(o) == name) {
            return o;
        }
    }
    return std::nullopt;
}

TemplateSet TemplateSet::canonical()
{
    return {std::string(kBaseInstruction), std::string(kAnswerFirst), std::string(kLogicFirst),
            std::string(kReflexive)};
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir)
{
    TemplateSet t{read_template(dir / "base_instruction.txt"), read_template(dir / "answer_first.txt"),
                  read_template(dir / "logic_first.txt"), read_template(dir / "reflexive.txt")};
    check_reflexive_template(t.reflexive);
    return t;
}

void TemplateSet::save(const std::filesystem::path& dir) const
{
    write_file_atomic(dir / "base_instruction.txt", base_instruction + "\n");
    write_file_atomic(dir / "answer_first.txt", answer_first_suffix + "\n");
    write_file_atomic(dir / "logic_first.txt", logic_first_suffix + "\n");
    write_file_atomic(dir / "reflexive.txt", reflexive + "\n");
}

std::string TemplateSet::version() const
{
    std::string blob;
    for (const auto* part : {&base_instruction, &answer_first_suffix, &logic_first_suffix, &reflexive}) {
        blob += std::to_string(part->size());
        blob += ':';
        blob += *part;
    }
    return "tpl-" + sha256_hex(blob).substr(0, 12);
}

std::vector<std::string> template_mismatches(const TemplateSet& templates)
{
    const auto ref = TemplateSet::canonical();
    std::vector<std::string> out;
    if (templates.base_instruction != ref.base_instruction) {
        out.emplace_back("base_instruction");
    }
    if (templates.answer_first_suffix != ref.answer_first_suffix) {
        out.emplace_back("answer_first");
    }
    if (templates.logic_first_suffix != ref.logic_first_suffix) {
        out.emplace_back("logic_first");
    }
    if (templates.reflexive != ref.reflexive) {
        out.emplace_back("reflexive");
    }
    return out;
}

PromptRenderer::PromptRenderer(TemplateSet templates)
    : templates_(std::move(templates)), version_(templates_.version())
{
    check_reflexive_template(templates_.reflexive);
}

std::string PromptRenderer::render_base(const Question& q) const
{
    std::string out = q.stem;
    out += "\n\n";
    for (const auto& o : q.options) {
        out += o.label;
        out += ". ";
        out += o.text;
        out += '\n';
    }
    out += templates_.base_instruction;
    return out;
}

RenderedPrompt PromptRenderer::render_variant(const Question& q, PromptOrder order) const
{
    RenderedPrompt p{q.id, order, render_base(q), version_};
    switch (order) {
    case PromptOrder::Raw:
        break;
    case PromptOrder::AnswerFirst:
        p.text += '\n';
        p.text += templates_.answer_first_suffix;
        break;
    case PromptOrder::LogicFirst:
        p.text += '\n';
        p.text += templates_.logic_first_suffix;
        break;
    case PromptOrder::Reflexive:
        throw PromptError(PromptError::Kind::InvalidOrder, "reflexive prompts need both variant results");
    }
    return p;
}

RenderedPrompt PromptRenderer::render_reflexive(const Question& q, std::string_view result_answer_first,
                                                std::string_view result_logic_first) const
{
    if (result_answer_first.empty() || result_logic_first.empty()) {
        throw PromptError(PromptError::Kind::EmptyResult, "reflexive prompt for " + q.id + " needs two nonempty results");
    }
    const auto base = render_base(q);
    const std::map<std::string_view, std::string_view> values = {
        {"question", base}, {"result_1", result_answer_first}, {"result_2", result_logic_first}};
    return {q.id, PromptOrder::Reflexive, substitute(templates_.reflexive, values), version_};
}

} // namespace orderbench
