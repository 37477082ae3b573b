#pragma once

#include "orderbench/dataset.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace orderbench {

enum class PromptOrder { Raw, AnswerFirst, LogicFirst, Reflexive };

inline constexpr PromptOrder kAllOrders[] = {PromptOrder::Raw, PromptOrder::AnswerFirst, PromptOrder::LogicFirst,
                                             PromptOrder::Reflexive};

// "raw", "answer_first", "logic_first", "reflexive"
std::string to_string(PromptOrder order);
std::optional<PromptOrder> parse_prompt_order(std::string_view name);

struct RenderedPrompt {
    std::string question_id;
    PromptOrder order = PromptOrder::Raw;
    std::string text;
    std::string template_version;

    bool operator==(const RenderedPrompt&) const = default;
};

class PromptError : public std::runtime_error {
public:
    enum class Kind { InvalidOrder, EmptyResult, TemplateMissing, TemplateMalformed };

    PromptError(Kind kind, const std::string& detail) : std::runtime_error(detail), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// The instruction texts behind every variant. The canonical set is compiled
// in and mirrored by the files under templates/; a directory of the same four
// files can replace it for ablations.
struct TemplateSet {
    std::string base_instruction;
    std::string answer_first_suffix;
    std::string logic_first_suffix;
    // Contains the placeholders {question}, {result_1} and {result_2}.
    std::string reflexive;

    static TemplateSet canonical();
    // Reads base_instruction.txt, answer_first.txt, logic_first.txt and
    // reflexive.txt; one trailing newline per file is dropped.
    static TemplateSet load(const std::filesystem::path& dir);

    // Writes the four files (each with a trailing newline).
    void save(const std::filesystem::path& dir) const;

    // "tpl-" + first 12 hex digits of a digest over all four texts.
    std::string version() const;

    bool operator==(const TemplateSet&) const = default;
};

// Names of template fields that differ from the canonical set.
std::vector<std::string> template_mismatches(const TemplateSet& templates);

class PromptRenderer {
public:
    explicit PromptRenderer(TemplateSet templates = TemplateSet::canonical());

    const TemplateSet& templates() const noexcept { return templates_; }
    const std::string& template_version() const noexcept { return version_; }

    // stem, blank line, "A. text" per option, then the base instruction line.
    std::string render_base(const Question& q) const;

    // Raw, AnswerFirst or LogicFirst; the variants append a newline and the
    // order sentence to the base text.
    RenderedPrompt render_variant(const Question& q, PromptOrder order) const;

    // Result 1 is always the answer-first response, Result 2 the logic-first one.
    RenderedPrompt render_reflexive(const Question& q, std::string_view result_answer_first,
                                    std::string_view result_logic_first) const;

private:
    TemplateSet templates_;
    std::string version_;
};

} // namespace orderbench
