#pragma once

#include "orderbench/prompts.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orderbench {

struct ExtractedAnswer {
    enum class Status { Parsed, Unparsed };

    Status status = Status::Unparsed;
    std::optional<std::string> label;
    // "marker:<phrase>", "line_label", "option_text" or "none"
    std::string rule_fired = "none";
    std::size_t span_begin = 0;
    std::size_t span_end = 0;

    bool parsed() const noexcept { return status == Status::Parsed; }
    bool operator==(const ExtractedAnswer&) const = default;
};

// Rule-1 marker phrases in precedence order, matched case-insensitively.
struct MarkerList {
    std::vector<std::string> phrases;

    static MarkerList defaults();
    // One phrase per line; blank lines and lines starting with '#' are skipped.
    static MarkerList load(const std::filesystem::path& path);
};

// Rules, in strict precedence:
//  1. a marker phrase followed within 10 characters by an option label,
//     optionally parenthesized or emphasized;
//  2. an option label standing alone at the start of a line;
//  3. a case-insensitive, word-bounded occurrence of a full option text.
// The first rule that matches anywhere decides. Within it, AnswerFirst and
// Reflexive take the first occurrence, LogicFirst and Raw the last.
ExtractedAnswer extract_answer(std::string_view text, const std::vector<std::string>& option_labels,
                               const std::vector<std::string>& option_texts, PromptOrder order_hint,
                               const MarkerList& markers = MarkerList::defaults());

} // namespace orderbench
