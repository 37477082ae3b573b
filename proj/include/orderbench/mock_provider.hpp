#pragma once

#include "orderbench/provider.hpp"

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace orderbench {

struct MockEntry {
    std::string text;
    FinishReason finish_reason = FinishReason::Stop;

    bool operator==(const MockEntry&) const = default;
};

using MockKey = std::pair<std::string, PromptOrder>; // (question_id, order)

class MockFixtureError : public std::runtime_error {
public:
    enum class Kind { FileMissing, DuplicateKey, Malformed };

    MockFixtureError(Kind kind, const std::string& detail) : std::runtime_error(detail), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Scripted provider: complete() is a pure lookup on (question_id, order).
// The script is immutable after construction; only the call counter changes.
class MockProvider : public Provider {
public:
    explicit MockProvider(std::map<MockKey, MockEntry> script);

    ModelResponse complete(const ModelSpec& spec, const RenderedPrompt& prompt) override;

    const std::map<MockKey, MockEntry>& script() const noexcept { return script_; }
    std::size_t calls() const noexcept { return calls_.load(); }

    // JSON lines sorted by key: {"question_id", "order", "text", "finish_reason"}.
    void dump(const std::filesystem::path& path) const;

private:
    std::map<MockKey, MockEntry> script_;
    std::atomic<std::size_t> calls_{0};
};

// Fixture lines: {"question_id": ..., "order": "answer_first", "text": ...,
// "finish_reason": optional}. Unknown fields are ignored.
std::shared_ptr<MockProvider> mock_provider_from_fixture(const std::filesystem::path& path);

} // namespace orderbench
