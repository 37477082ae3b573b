#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace orderbench {

struct Option {
    std::string label;
    std::string text;

    bool operator==(const Option&) const = default;
};

// One normalized multiple-choice item. Labels are always A, B, C, ... in
// source order and gold_label is one of them.
struct Question {
    std::string id;
    std::string dataset_name;
    std::string stem;
    std::vector<Option> options;
    std::string gold_label;
    std::map<std::string, std::string> metadata;

    std::vector<std::string> labels() const;
    std::vector<std::string> option_texts() const;

    bool operator==(const Question&) const = default;
};

enum class DatasetFormat { MmluCsv, TruthfulQaMc, LogiQaTxt, CanonicalJsonl };

std::string to_string(DatasetFormat format);
// Accepts the snake_case names: mmlu_csv, truthfulqa_mc, logiqa_txt, canonical_jsonl.
std::optional<DatasetFormat> parse_dataset_format(std::string_view name);

struct DatasetDescriptor {
    std::string name;
    DatasetFormat format = DatasetFormat::CanonicalJsonl;
    std::string source_path;
    std::size_t limit = 0; // 0 = no limit
    std::string content_hash; // sha256 of the raw source bytes

    bool operator==(const DatasetDescriptor&) const = default;
};

enum class DatasetErrorKind {
    FileMissing,
    FormatMismatch,
    EmptyDataset,
    MissingGold,
    OptionCountOutOfRange,
    IoFailure,
};

std::string to_string(DatasetErrorKind kind);

class DatasetError : public std::runtime_error {
public:
    DatasetError(DatasetErrorKind kind, const std::string& detail, std::optional<std::size_t> row = std::nullopt);

    DatasetErrorKind kind() const noexcept { return kind_; }
    // Zero-based record index within the source file, when known.
    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    DatasetErrorKind kind_;
    std::optional<std::size_t> row_;
};

// A record as it comes out of a source format, before label canonicalization.
struct RawRecord {
    std::string stem;
    // (original label, text); the original label may be empty when the source
    // lists options positionally.
    std::vector<std::pair<std::string, std::string>> options;
    std::optional<std::size_t> gold_index;
    std::optional<std::string> gold_label; // original label, matched case-insensitively
    std::map<std::string, std::string> metadata;
    std::size_t source_index = 0;
};

// Canonical label for a zero-based option position: 0 -> "A", 1 -> "B", ...
std::string canonical_label(std::size_t index);

// Builds a Question from a source record: relabels options A, B, C, ...,
// maps the gold answer onto its canonical label and keeps original labels in
// metadata. The id is "<dataset_name>-<source_index, 5 digits>".
Question normalize_record(const RawRecord& raw, DatasetFormat format, const std::string& dataset_name);

// Fills content_hash from the file at source_path.
DatasetDescriptor describe_dataset(std::string name, DatasetFormat format, std::string source_path,
                                   std::size_t limit = 0);

// Loads questions in source-file order, truncated to the first `limit` when
// limit > 0.
std::vector<Question> load_dataset(const DatasetDescriptor& descriptor);

// Writes one canonical JSON record per line; returns the number written.
std::size_t export_canonical(const std::vector<Question>& questions, const std::filesystem::path& path);

// Single-line canonical JSON for one question (no trailing newline).
std::string to_canonical_json(const Question& q);

} // namespace orderbench
