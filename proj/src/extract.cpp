#include "orderbench/extract.hpp"

#include "orderbench/digest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace orderbench {

namespace {

constexpr std::size_t kMarkerWindow = 10;

// Words that may sit between a marker and its label ("the answer is option C").
constexpr std::array<std::string_view, 7> kFillers = {"is", "option", "choice", "be", "letter", "was", "would"};

struct Candidate {
    std::size_t begin;
    std::size_t end;
    std::string label;
};

bool is_alnum(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

char lower_char(char c)
{
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower_char);
    return out;
}

bool takes_first(PromptOrder hint)
{
    return hint == PromptOrder::AnswerFirst || hint == PromptOrder::Reflexive;
}

bool is_label(std::string_view word, const std::vector<std::string>& labels)
{
    return std::find(labels.begin(), labels.end(), word) != labels.end();
}

std::optional<Candidate> pick(const std::vector<Candidate>& cands, PromptOrder hint)
{
    if (cands.empty()) {
        return std::nullopt;
    }
    return takes_first(hint) ? cands.front() : cands.back();
}

// Label right after a marker ending at `from`, within the window.
std::optional<Candidate> label_after_marker(std::string_view text, std::size_t from,
                                            const std::vector<std::string>& labels)
{
    std::size_t i = from;
    while (i < text.size() && i - from <= kMarkerWindow) {
        if (!is_alnum(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_alnum(text[j])) {
            ++j;
        }
        const auto word = text.substr(i, j - i);
        if (is_label(word, labels)) {
            return Candidate{i, j, std::string(word)};
        }
        if (std::find(kFillers.begin(), kFillers.end(), lower(word)) == kFillers.end()) {
            return std::nullopt;
        }
        i = j;
    }
    return std::nullopt;
}

std::vector<Candidate> marker_candidates(std::string_view text, const std::string& lowered, std::string_view phrase,
                                         const std::vector<std::string>& labels)
{
    std::vector<Candidate> out;
    const auto needle = lower(phrase);
    if (needle.empty()) {
        return out;
    }
    for (auto pos = lowered.find(needle); pos != std::string::npos; pos = lowered.find(needle, pos + 1)) {
        if (pos > 0 && is_alnum(lowered[pos - 1]) && is_alnum(needle.front())) {
            continue;
        }
        if (auto c = label_after_marker(text, pos + needle.size(), labels)) {
            out.push_back(*c);
        }
    }
    return out;
}

std::vector<Candidate> line_label_candidates(std::string_view text, const std::vector<std::string>& labels)
{
    std::vector<Candidate> out;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        auto line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) {
            line_end = text.size();
        }
        std::size_t i = line_start;
        auto skippable = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '*' || c == '#' || c == '>' || c == '_'; };
        while (i < line_end && skippable(text[i])) {
            ++i;
        }
        const bool paren = i < line_end && text[i] == '(';
        if (paren) {
            ++i;
        }
        std::size_t j = i;
        while (j < line_end && is_alnum(text[j])) {
            ++j;
        }
        const auto word = text.substr(i, j - i);
        if (j > i && is_label(word, labels)) {
            bool delimited = false;
            if (paren) {
                delimited = j < line_end && text[j] == ')';
            } else if (j == line_end || text[j] == '\r') {
                delimited = true;
            } else if (std::string_view(".):,;*").find(text[j]) != std::string_view::npos) {
                delimited = true;
            } else if (text[j] == ' ' || text[j] == '\t') {
                // "A good idea" is prose, "A - because" or "A (Paris)" is a label.
                std::size_t k = j;
                while (k < line_end && (text[k] == ' ' || text[k] == '\t')) {
                    ++k;
                }
                delimited = k == line_end || !std::isalpha(static_cast<unsigned char>(text[k]));
            }
            if (delimited) {
                out.push_back({i, j, std::string(word)});
            }
        }
        if (line_end == text.size()) {
            break;
        }
        line_start = line_end + 1;
    }
    return out;
}

std::vector<Candidate> option_text_candidates(const std::string& lowered, const std::vector<std::string>& labels,
                                              const std::vector<std::string>& texts)
{
    std::vector<Candidate> all;
    const auto n = std::min(labels.size(), texts.size());
    for (std::size_t k = 0; k < n; ++k) {
        const auto needle = lower(texts[k]);
        if (needle.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        for (auto pos = lowered.find(needle); pos != std::string::npos; pos = lowered.find(needle, pos + 1)) {
            const auto end = pos + needle.size();
            const bool left_ok = pos == 0 || !is_alnum(lowered[pos - 1]) || !is_alnum(needle.front());
            const bool right_ok = end == lowered.size() || !is_alnum(lowered[end]) || !is_alnum(needle.back());
            if (left_ok && right_ok) {
                all.push_back({pos, end, labels[k]});
            }
        }
    }
    // Drop matches nested inside a longer match ("Paris" within "Paris, Texas").
    std::vector<Candidate> out;
    for (const auto& c : all) {
        const bool nested = std::any_of(all.begin(), all.end(), [&](const Candidate& o) {
            return o.begin <= c.begin && c.end <= o.end && (o.end - o.begin) > (c.end - c.begin);
        });
        if (!nested) {
            out.push_back(c);
        }
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
    });
    return out;
}

ExtractedAnswer parsed(const Candidate& c, std::string rule)
{
    ExtractedAnswer a;
    a.status = ExtractedAnswer::Status::Parsed;
    a.label = c.label;
    a.rule_fired = std::move(rule);
    a.span_begin = c.begin;
    a.span_end = c.end;
    return a;
}

} // namespace

MarkerList MarkerList::defaults()
{
    return {{"final answer", "correct answer is", "the answer is", "answer is", "correct option is",
             "correct choice is", "i choose", "answer:"}};
}

MarkerList MarkerList::load(const std::filesystem::path& path)
{
    MarkerList m;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        m.phrases.push_back(line);
    }
    return m;
}

ExtractedAnswer extract_answer(std::string_view text, const std::vector<std::string>& option_labels,
                               const std::vector<std::string>& option_texts, PromptOrder order_hint,
                               const MarkerList& markers)
{
    const auto lowered = lower(text);

    for (const auto& phrase : markers.phrases) {
        if (auto c = pick(marker_candidates(text, lowered, phrase, option_labels), order_hint)) {
            return parsed(*c, "marker:" + phrase);
        }
    }
    if (auto c = pick(line_label_candidates(text, option_labels), order_hint)) {
        return parsed(*c, "line_label");
    }
    if (auto c = pick(option_text_candidates(lowered, option_labels, option_texts), order_hint)) {
        return parsed(*c, "option_text");
    }
    return {};
}

} // namespace orderbench
