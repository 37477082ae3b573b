#include "orderbench/dataset.hpp"

#include "orderbench/csv.hpp"
#include "orderbench/digest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace orderbench {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s)
{
    for (auto& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_single_letter(std::string_view s)
{
    return s.size() == 1 && std::isalpha(static_cast<unsigned char>(s[0]));
}

[[noreturn]] void mismatch(const std::string& detail, std::size_t row)
{
    throw DatasetError(DatasetErrorKind::FormatMismatch, detail, row);
}

// Sets gold_index or gold_label from an answer cell: digits are a zero-based
// index, a single letter is a label.
void assign_gold(RawRecord& raw, const std::string& answer)
{
    const auto a = trim(answer);
    raw.metadata["original_gold"] = a;
    if (all_digits(a)) {
        raw.gold_index = static_cast<std::size_t>(std::stoul(a));
    } else if (!a.empty()) {
        raw.gold_label = a;
    }
}

// ---- MMLU ------------------------------------------------------------------

std::vector<RawRecord> parse_mmlu(const std::string& text, std::size_t limit)
{
    std::vector<CsvRow> rows;
    try {
        rows = parse_csv(text);
    } catch (const CsvError& e) {
        throw DatasetError(DatasetErrorKind::FormatMismatch, std::string("mmlu_csv: ") + e.what() + " at line " +
                                                                  std::to_string(e.line));
    }
    if (rows.empty()) {
        return {};
    }

    std::map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < rows.front().cells.size(); ++i) {
        header.emplace(lower(trim(rows.front().cells[i])), i);
    }
    const bool has_header = header.contains("question") && header.contains("answer");

    std::vector<RawRecord> out;
    const std::size_t first = has_header ? 1 : 0;
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (limit > 0 && out.size() >= limit) {
            break;
        }
        const auto& cells = rows[r].cells;
        const std::size_t index = r - first;
        RawRecord raw;
        raw.source_index = index;
        if (has_header) {
            if (cells.size() != rows.front().cells.size()) {
                mismatch("mmlu_csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(rows.front().cells.size()),
                         index);
            }
            raw.stem = cells[header.at("question")];
            if (auto it = header.find("subject"); it != header.end()) {
                raw.metadata["category"] = cells[it->second];
            }
            if (auto it = header.find("choices"); it != header.end()) {
                const auto parsed = nlohmann::json::parse(cells[it->second], nullptr, false);
                if (parsed.is_discarded() || !parsed.is_array()) {
                    mismatch("mmlu_csv: choices column is not a JSON array", index);
                }
                for (const auto& c : parsed) {
                    if (!c.is_string()) {
                        mismatch("mmlu_csv: non-string choice", index);
                    }
                    raw.options.emplace_back("", c.get<std::string>());
                }
            } else {
                for (char l = 'a'; l <= 'z'; ++l) {
                    auto it = header.find(std::string(1, l));
                    if (it == header.end()) {
                        break;
                    }
                    raw.options.emplace_back(std::string(1, static_cast<char>(std::toupper(l))), cells[it->second]);
                }
            }
            assign_gold(raw, cells[header.at("answer")]);
        } else {
            // question, option..., answer letter
            if (cells.size() < 4 || !is_single_letter(trim(cells.back()))) {
                mismatch("mmlu_csv: expected question, options..., answer letter", index);
            }
            raw.stem = cells.front();
            for (std::size_t c = 1; c + 1 < cells.size(); ++c) {
                raw.options.emplace_back(canonical_label(c - 1), cells[c]);
            }
            assign_gold(raw, cells.back());
        }
        if (raw.options.empty()) {
            mismatch("mmlu_csv: no option columns", index);
        }
        out.push_back(std::move(raw));
    }
    return out;
}

// ---- TruthfulQA ------------------------------------------------------------

RawRecord truthfulqa_item(const ordered_json& item, std::size_t index)
{
    if (!item.is_object() || !item.contains("question") || !item["question"].is_string() ||
        !item.contains("mc1_targets")) {
        mismatch("truthfulqa_mc: record needs string 'question' and 'mc1_targets'", index);
    }
    RawRecord raw;
    raw.source_index = index;
    raw.stem = item["question"].get<std::string>();
    if (item.contains("category") && item["category"].is_string()) {
        raw.metadata["category"] = item["category"].get<std::string>();
    }
    raw.metadata["task"] = "mc1";

    const auto& targets = item["mc1_targets"];
    std::vector<int> flags;
    if (targets.is_object() && targets.contains("choices") && targets.contains("labels")) {
        const auto& choices = targets["choices"];
        const auto& labels = targets["labels"];
        if (!choices.is_array() || !labels.is_array() || choices.size() != labels.size()) {
            mismatch("truthfulqa_mc: choices/labels must be equal-length arrays", index);
        }
        for (std::size_t i = 0; i < choices.size(); ++i) {
            if (!choices[i].is_string() || !labels[i].is_number_integer()) {
                mismatch("truthfulqa_mc: bad choice/label entry", index);
            }
            raw.options.emplace_back("", choices[i].get<std::string>());
            flags.push_back(labels[i].get<int>());
        }
    } else if (targets.is_object()) {
        // {"choice text": 1, "other": 0, ...} in source order
        for (const auto& [text, flag] : targets.items()) {
            if (!flag.is_number_integer()) {
                mismatch("truthfulqa_mc: target flag must be 0 or 1", index);
            }
            raw.options.emplace_back("", text);
            flags.push_back(flag.get<int>());
        }
    } else {
        mismatch("truthfulqa_mc: mc1_targets must be an object", index);
    }
    const auto ones = std::count(flags.begin(), flags.end(), 1);
    if (ones > 1) {
        mismatch("truthfulqa_mc: mc1 has more than one correct target", index);
    }
    if (ones == 1) {
        const auto pos = static_cast<std::size_t>(std::find(flags.begin(), flags.end(), 1) - flags.begin());
        raw.gold_index = pos;
        raw.metadata["original_gold"] = std::to_string(pos);
    }
    return raw;
}

std::vector<RawRecord> parse_truthfulqa(const std::string& text, std::size_t limit)
{
    std::vector<RawRecord> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        const auto doc = ordered_json::parse(text, nullptr, false);
        if (doc.is_discarded()) {
            mismatch("truthfulqa_mc: invalid JSON array", 0);
        }
        for (std::size_t i = 0; i < doc.size(); ++i) {
            if (limit > 0 && out.size() >= limit) {
                break;
            }
            out.push_back(truthfulqa_item(doc[i], i));
        }
        return out;
    }
    std::istringstream in(text);
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        if (limit > 0 && out.size() >= limit) {
            break;
        }
        const auto item = ordered_json::parse(line, nullptr, false);
        if (item.is_discarded()) {
            mismatch("truthfulqa_mc: invalid JSON line", index);
        }
        out.push_back(truthfulqa_item(item, index));
        ++index;
    }
    return out;
}

// ---- LogiQA ----------------------------------------------------------------

// Blank-line separated blocks: answer key, context, question, then options
// written as "A.text".
std::vector<RawRecord> parse_logiqa(const std::string& text, std::size_t limit)
{
    std::vector<std::vector<std::string>> blocks;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> current;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            if (!current.empty()) {
                blocks.push_back(std::move(current));
                current.clear();
                if (limit > 0 && blocks.size() >= limit) {
                    break;
                }
            }
            continue;
        }
        current.push_back(line);
    }
    if (!current.empty() && (limit == 0 || blocks.size() < limit)) {
        blocks.push_back(std::move(current));
    }

    std::vector<RawRecord> out;
    out.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& lines = blocks[b];
        if (lines.size() < 5) {
            mismatch("logiqa_txt: record needs answer, context, question and >= 2 options", b);
        }
        const auto key = trim(lines[0]);
        if (!is_single_letter(key)) {
            mismatch("logiqa_txt: first line must be a single answer letter, got '" + key + "'", b);
        }
        RawRecord raw;
        raw.source_index = b;
        raw.stem = trim(lines[1]) + "\n" + trim(lines[2]);
        for (std::size_t i = 3; i < lines.size(); ++i) {
            const auto opt = trim(lines[i]);
            if (opt.size() < 2 || !std::isalpha(static_cast<unsigned char>(opt[0])) ||
                (opt[1] != '.' && opt[1] != ')' && opt[1] != ':')) {
                mismatch("logiqa_txt: option line must look like 'A.text'", b);
            }
            raw.options.emplace_back(opt.substr(0, 1), trim(opt.substr(2)));
        }
        raw.gold_label = key;
        raw.metadata["original_gold"] = key;
        out.push_back(std::move(raw));
    }
    return out;
}

// ---- canonical -------------------------------------------------------------

void check_question(const Question& q, std::size_t row)
{
    if (q.options.size() < 2) {
        throw DatasetError(DatasetErrorKind::OptionCountOutOfRange, "question " + q.id + " has fewer than 2 options",
                           row);
    }
    for (std::size_t i = 0; i < q.options.size(); ++i) {
        if (q.options[i].label != canonical_label(i)) {
            mismatch("question " + q.id + ": option labels must be A, B, C, ... in order", row);
        }
    }
    const auto labels = q.labels();
    if (std::find(labels.begin(), labels.end(), q.gold_label) == labels.end()) {
        throw DatasetError(DatasetErrorKind::MissingGold, "question " + q.id + ": gold '" + q.gold_label +
                                                              "' is not an option label",
                           row);
    }
}

std::vector<Question> parse_canonical(const std::string& text, std::size_t limit)
{
    std::vector<Question> out;
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        if (limit > 0 && out.size() >= limit) {
            break;
        }
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            mismatch("canonical_jsonl: line is not a JSON object", row);
        }
        try {
            Question q;
            q.id = j.at("id").get<std::string>();
            q.dataset_name = j.at("dataset").get<std::string>();
            q.stem = j.at("stem").get<std::string>();
            for (const auto& o : j.at("options")) {
                q.options.push_back({o.at("label").get<std::string>(), o.at("text").get<std::string>()});
            }
            q.gold_label = j.at("gold").get<std::string>();
            for (const auto& [k, v] : j.at("meta").items()) {
                q.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
            }
            check_question(q, row);
            out.push_back(std::move(q));
        } catch (const nlohmann::json::exception& e) {
            mismatch(std::string("canonical_jsonl: ") + e.what(), row);
        }
        ++row;
    }
    return out;
}

} // namespace

std::vector<std::string> Question::labels() const
{
    std::vector<std::string> out;
    out.reserve(options.size());
    for (const auto& o : options) {
        out.push_back(o.label);
    }
    return out;
}

std::vector<std::string> Question::option_texts() const
{
    std::vector<std::string> out;
    out.reserve(options.size());
    for (const auto& o : options) {
        out.push_back(o.text);
    }
    return out;
}

std::string to_string(DatasetFormat format)
{
    switch (format) {
    case DatasetFormat::MmluCsv:
        return "mmlu_csv";
    case DatasetFormat::TruthfulQaMc:
        return "truthfulqa_mc";
    case DatasetFormat::LogiQaTxt:
        return "logiqa_txt";
    case DatasetFormat::CanonicalJsonl:
        return "canonical_jsonl";
    }
    return "unknown";
}

std::optional<DatasetFormat> parse_dataset_format(std::string_view name)
{
    for (auto f : {DatasetFormat::MmluCsv, DatasetFormat::TruthfulQaMc, DatasetFormat::LogiQaTxt,
                   DatasetFormat::CanonicalJsonl}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

std::string to_string(DatasetErrorKind kind)
{
    switch (kind) {
    case DatasetErrorKind::FileMissing:
        return "FileMissing";
    case DatasetErrorKind::FormatMismatch:
        return "FormatMismatch";
    case DatasetErrorKind::EmptyDataset:
        return "EmptyDataset";
    case DatasetErrorKind::MissingGold:
        return "MissingGold";
    case DatasetErrorKind::OptionCountOutOfRange:
        return "OptionCountOutOfRange";
    case DatasetErrorKind::IoFailure:
        return "IoFailure";
    }
    return "Unknown";
}

DatasetError::DatasetError(DatasetErrorKind kind, const std::string& detail, std::optional<std::size_t> row)
    : std::runtime_error(to_string(kind) + ": " + detail + (row ? " (row " + std::to_string(*row) + ")" : "")),
      kind_(kind), row_(row)
{
}

std::string canonical_label(std::size_t index)
{
    if (index >= 26) {
        throw DatasetError(DatasetErrorKind::OptionCountOutOfRange, "more than 26 options");
    }
    return std::string(1, static_cast<char>('A' + index));
}

Question normalize_record(const RawRecord& raw, DatasetFormat format, const std::string& dataset_name)
{
    if (raw.options.size() < 2 || raw.options.size() > 26) {
        throw DatasetError(DatasetErrorKind::OptionCountOutOfRange,
                           std::to_string(raw.options.size()) + " options (need 2..26)", raw.source_index);
    }
    Question q;
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "%05zu", raw.source_index);
    q.id = dataset_name + "-" + idbuf;
    q.dataset_name = dataset_name;
    q.stem = raw.stem;
    q.metadata = raw.metadata;
    q.metadata["source_index"] = std::to_string(raw.source_index);
    q.metadata["source_format"] = to_string(format);

    std::string original_labels;
    std::optional<std::size_t> gold = raw.gold_index;
    for (std::size_t i = 0; i < raw.options.size(); ++i) {
        const auto& [orig, text] = raw.options[i];
        q.options.push_back({canonical_label(i), text});
        if (!orig.empty()) {
            if (!original_labels.empty()) {
                original_labels += ",";
            }
            original_labels += orig;
        }
        if (!gold && raw.gold_label && !orig.empty() && lower(orig) == lower(*raw.gold_label)) {
            gold = i;
        }
    }
    if (!original_labels.empty()) {
        q.metadata["original_labels"] = original_labels;
    }
    if (!gold || *gold >= raw.options.size()) {
        throw DatasetError(DatasetErrorKind::MissingGold, "no gold answer maps onto an option", raw.source_index);
    }
    q.gold_label = canonical_label(*gold);
    return q;
}

DatasetDescriptor describe_dataset(std::string name, DatasetFormat format, std::string source_path, std::size_t limit)
{
    DatasetDescriptor d{std::move(name), format, std::move(source_path), limit, {}};
    if (!std::filesystem::exists(d.source_path)) {
        throw DatasetError(DatasetErrorKind::FileMissing, d.source_path);
    }
    d.content_hash = sha256_file(d.source_path);
    return d;
}

std::vector<Question> load_dataset(const DatasetDescriptor& descriptor)
{
    if (!std::filesystem::is_regular_file(descriptor.source_path)) {
        throw DatasetError(DatasetErrorKind::FileMissing, descriptor.source_path);
    }
    std::string text;
    try {
        text = read_file(descriptor.source_path);
    } catch (const std::runtime_error& e) {
        throw DatasetError(DatasetErrorKind::IoFailure, e.what());
    }

    std::vector<Question> out;
    if (descriptor.format == DatasetFormat::CanonicalJsonl) {
        out = parse_canonical(text, descriptor.limit);
    } else {
        std::vector<RawRecord> raws;
        switch (descriptor.format) {
        case DatasetFormat::MmluCsv:
            raws = parse_mmlu(text, descriptor.limit);
            break;
        case DatasetFormat::TruthfulQaMc:
            raws = parse_truthfulqa(text, descriptor.limit);
            break;
        case DatasetFormat::LogiQaTxt:
            raws = parse_logiqa(text, descriptor.limit);
            break;
        case DatasetFormat::CanonicalJsonl:
            break;
        }
        out.reserve(raws.size());
        for (const auto& raw : raws) {
            out.push_back(normalize_record(raw, descriptor.format, descriptor.name));
        }
    }
    if (out.empty()) {
        throw DatasetError(DatasetErrorKind::EmptyDataset, descriptor.source_path);
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!seen.insert(out[i].id).second) {
            mismatch("duplicate question id " + out[i].id, i);
        }
    }
    return out;
}

std::string to_canonical_json(const Question& q)
{
    ordered_json j;
    j["id"] = q.id;
    j["dataset"] = q.dataset_name;
    j["stem"] = q.stem;
    j["options"] = ordered_json::array();
    for (const auto& o : q.options) {
        ordered_json oj;
        oj["label"] = o.label;
        oj["text"] = o.text;
        j["options"].push_back(std::move(oj));
    }
    j["gold"] = q.gold_label;
    j["meta"] = ordered_json::object();
    for (const auto& [k, v] : q.metadata) {
        j["meta"][k] = v;
    }
    return j.dump();
}

std::size_t export_canonical(const std::vector<Question>& questions, const std::filesystem::path& path)
{
    if (questions.empty()) {
        throw DatasetError(DatasetErrorKind::EmptyDataset, "nothing to export");
    }
    std::string body;
    for (const auto& q : questions) {
        try {
            body += to_canonical_json(q);
        } catch (const nlohmann::json::exception& e) {
            throw DatasetError(DatasetErrorKind::FormatMismatch, "question " + q.id + ": " + e.what());
        }
        body += '\n';
    }
    try {
        write_file_atomic(path, body);
    } catch (const std::exception& e) {
        throw DatasetError(DatasetErrorKind::IoFailure, e.what());
    }
    return questions.size();
}

} // namespace orderbench
