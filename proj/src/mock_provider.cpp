#include "orderbench/mock_provider.hpp"

#include "orderbench/digest.hpp"

#include <json.hpp>

#include <sstream>

namespace orderbench {

MockProvider::MockProvider(std::map<MockKey, MockEntry> script) : script_(std::move(script)) {}

ModelResponse MockProvider::complete(const ModelSpec& spec, const RenderedPrompt& prompt)
{
    ++calls_;
    const auto it = script_.find({prompt.question_id, prompt.order});
    if (it == script_.end()) {
        throw ProviderError(ProviderErrorKind::Malformed,
                            "mock has no entry for (" + prompt.question_id + ", " + to_string(prompt.order) + ")");
    }
    ModelResponse r;
    r.text = it->second.text;
    r.finish_reason = it->second.finish_reason;
    r.request_fingerprint = request_fingerprint(spec, prompt);
    r.from_cache = false;
    r.attempt_count = 1;
    r.attempt_log = {"attempt 1: ok"};
    return r;
}

void MockProvider::dump(const std::filesystem::path& path) const
{
    std::string out;
    for (const auto& [key, entry] : script_) {
        nlohmann::ordered_json j;
        j["question_id"] = key.first;
        j["order"] = to_string(key.second);
        j["text"] = entry.text;
        j["finish_reason"] = to_string(entry.finish_reason);
        out += j.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::shared_ptr<MockProvider> mock_provider_from_fixture(const std::filesystem::path& path)
{
    if (!std::filesystem::is_regular_file(path)) {
        throw MockFixtureError(MockFixtureError::Kind::FileMissing, "mock fixture not found: " + path.string());
    }
    std::istringstream in(read_file(path));
    std::map<MockKey, MockEntry> script;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto j = nlohmann::json::parse(line, nullptr, false);
        const auto where = path.string() + ":" + std::to_string(lineno);
        if (j.is_discarded() || !j.is_object() || !j.contains("question_id") || !j.contains("order") ||
            !j.contains("text") || !j["question_id"].is_string() || !j["order"].is_string() || !j["text"].is_string()) {
            throw MockFixtureError(MockFixtureError::Kind::Malformed, where + ": need question_id, order, text");
        }
        const auto order = parse_prompt_order(j["order"].get<std::string>());
        if (!order) {
            throw MockFixtureError(MockFixtureError::Kind::Malformed, where + ": unknown order");
        }
        MockEntry entry{j["text"].get<std::string>(), FinishReason::Stop};
        if (j.contains("finish_reason") && j["finish_reason"].is_string()) {
            entry.finish_reason = parse_finish_reason(j["finish_reason"].get<std::string>());
        }
        MockKey key{j["question_id"].get<std::string>(), *order};
        if (!script.emplace(key, std::move(entry)).second) {
            throw MockFixtureError(MockFixtureError::Kind::DuplicateKey,
                                   where + ": duplicate key (" + key.first + ", " + to_string(key.second) + ")");
        }
    }
    return std::make_shared<MockProvider>(std::move(script));
}

} // namespace orderbench
