#pragma once

#include "orderbench/extract.hpp"
#include "orderbench/prompts.hpp"
#include "orderbench/provider.hpp"

#include <string>

namespace orderbench {

enum class UnparsedPolicy {
    Strict,  // an Unparsed answer is incorrect and never consistent
    Lenient, // as Strict, except two Unparsed variant answers count as consistent
};

std::string to_string(UnparsedPolicy policy);
std::optional<UnparsedPolicy> parse_unparsed_policy(std::string_view name);

// Outcome of one (question, model, order) query.
struct TrialRecord {
    std::string question_id;
    std::string dataset_name;
    std::string model_name;
    PromptOrder order = PromptOrder::Raw;
    std::string prompt_fingerprint;
    std::string template_version;
    std::string response_text;
    FinishReason finish_reason = FinishReason::Stop;
    ExtractedAnswer extracted;
    std::string gold_label;
    bool correct = false;
    int attempt_count = 0;

    // Kept out of records.jsonl so record files stay byte-stable across runs.
    std::string started_at;
    std::string finished_at;
    bool from_cache = false;
};

// Answer-first / logic-first comparison for one question.
struct ConsistencyPair {
    std::string question_id;
    TrialRecord record_answer_first;
    TrialRecord record_logic_first;
    bool consistent = false;
};

bool is_correct(const ExtractedAnswer& extracted, const std::string& gold_label);
bool answers_agree(const ExtractedAnswer& answer_first, const ExtractedAnswer& logic_first, UnparsedPolicy policy);

// Question excluded from metrics because one of its queries failed.
struct TrialFailure {
    std::string model_name;
    std::string dataset_name;
    std::string question_id;
    PromptOrder order = PromptOrder::Raw;
    std::string kind;
    std::string detail;
};

} // namespace orderbench
