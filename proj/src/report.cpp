#include "orderbench/report.hpp"

#include "orderbench/digest.hpp"
#include "orderbench/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace orderbench {

namespace {

ReportCell value_cell(double v, std::string run_id)
{
    ReportCell c;
    c.kind = ReportCell::Kind::Value;
    c.value = v;
    c.run_id = std::move(run_id);
    return c;
}

std::string strategy_heading(const std::string& id)
{
    if (id == "raw") {
        return "Raw Prompt";
    }
    if (id == "answer_first") {
        return "Answer First";
    }
    if (id == "logic_first") {
        return "Logic First";
    }
    if (id == "reflexive") {
        return "Reflexive Prompt";
    }
    return id;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string md_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '|') {
            out += '\\';
        }
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

std::string md_table(const ReportTable& t, const std::string& corner, bool bold_row_max, bool strategy_cols)
{
    std::string out = "| " + md_escape(corner);
    for (const auto& c : t.cols) {
        out += " | " + md_escape(strategy_cols ? strategy_heading(c) : c);
    }
    out += " |\n|---";
    for (std::size_t i = 0; i < t.cols.size(); ++i) {
        out += "|---";
    }
    out += "|\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.cells[r];
        // Maxima are compared at display precision so equal-looking cells bold together.
        auto shown = [](double v) { return std::llround(v * 1000.0); };
        std::optional<long long> best;
        for (const auto& c : row) {
            if (c.kind == ReportCell::Kind::Value && (!best || shown(c.value) > *best)) {
                best = shown(c.value);
            }
        }
        out += "| " + md_escape(t.rows[r]);
        for (const auto& c : row) {
            auto text = format_cell(c);
            if (bold_row_max && c.kind == ReportCell::Kind::Value && best && shown(c.value) == *best) {
                text = "**" + text + "**";
            }
            out += " | " + text;
        }
        out += " |\n";
    }
    return out;
}

std::string csv_table(const ReportTable& t, const std::string& corner)
{
    std::string out = csv_field(corner);
    for (const auto& c : t.cols) {
        out += "," + csv_field(c);
    }
    out += "\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out += csv_field(t.rows[r]);
        for (const auto& c : t.cells[r]) {
            out += "," + csv_field(format_cell(c));
        }
        out += "\n";
    }
    return out;
}

ordered_json cell_json(const ReportCell& c)
{
    ordered_json j;
    j["kind"] = c.kind == ReportCell::Kind::Value ? "value" : c.kind == ReportCell::Kind::Missing ? "missing" : "flagged";
    j["value"] = c.kind == ReportCell::Kind::Value ? ordered_json(c.value) : ordered_json(nullptr);
    j["flag"] = c.flag;
    j["run_id"] = c.run_id;
    j["n_models"] = c.n_models;
    return j;
}

ReportCell cell_from_json(const nlohmann::json& j)
{
    ReportCell c;
    const auto kind = j.at("kind").get<std::string>();
    c.kind = kind == "value" ? ReportCell::Kind::Value : kind == "missing" ? ReportCell::Kind::Missing
                                                                           : ReportCell::Kind::Flagged;
    if (c.kind == ReportCell::Kind::Value) {
        c.value = j.at("value").get<double>();
    }
    c.flag = j.at("flag").get<std::string>();
    c.run_id = j.at("run_id").get<std::string>();
    c.n_models = j.at("n_models").get<std::size_t>();
    return c;
}

ordered_json table_json(const std::string& type, const ReportTable& t)
{
    ordered_json j;
    j["type"] = type;
    j["title"] = t.title;
    j["rows"] = t.rows;
    j["cols"] = t.cols;
    j["cells"] = ordered_json::array();
    for (const auto& row : t.cells) {
        ordered_json rj = ordered_json::array();
        for (const auto& c : row) {
            rj.push_back(cell_json(c));
        }
        j["cells"].push_back(std::move(rj));
    }
    return j;
}

ReportTable table_from_json(const nlohmann::json& j)
{
    ReportTable t;
    t.title = j.at("title").get<std::string>();
    t.rows = j.at("rows").get<std::vector<std::string>>();
    t.cols = j.at("cols").get<std::vector<std::string>>();
    for (const auto& row : j.at("cells")) {
        std::vector<ReportCell> cells;
        for (const auto& c : row) {
            cells.push_back(cell_from_json(c));
        }
        t.cells.push_back(std::move(cells));
    }
    return t;
}

} // namespace

std::string format_cell(const ReportCell& cell)
{
    switch (cell.kind) {
    case ReportCell::Kind::Value: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", cell.value);
        return buf;
    }
    case ReportCell::Kind::Missing:
        return "n/a";
    case ReportCell::Kind::Flagged:
        return "—(" + cell.flag + ")";
    }
    return "n/a";
}

ReportBundle build_report(const std::vector<RunSummary>& summaries, const std::vector<CorrelationCell>& cells,
                          const ReportOptions& options)
{
    if (summaries.empty()) {
        throw StatsError(StatsError::Kind::EmptyInput, "report needs at least one run summary");
    }
    ReportBundle b;
    b.generated_at = options.generated_at.empty() ? utc_timestamp() : options.generated_at;

    std::vector<std::string> datasets;
    for (const auto& d : options.dataset_order) {
        if (std::any_of(summaries.begin(), summaries.end(), [&](const RunSummary& s) { return s.dataset_name == d; })) {
            datasets.push_back(d);
        }
    }
    std::set<std::string> model_set;
    std::set<std::string> run_ids;
    std::set<PromptOrder> strategy_set;
    std::map<std::pair<std::string, std::string>, const RunSummary*> by_key;
    for (const auto& s : summaries) {
        if (std::find(datasets.begin(), datasets.end(), s.dataset_name) == datasets.end()) {
            datasets.push_back(s.dataset_name);
        }
        model_set.insert(s.model_name);
        run_ids.insert(s.run_id);
        for (const auto& [o, _] : s.accuracy_by_strategy) {
            strategy_set.insert(o);
        }
        if (!by_key.emplace(std::make_pair(s.model_name, s.dataset_name), &s).second) {
            throw std::invalid_argument("duplicate summary for " + s.model_name + " on " + s.dataset_name);
        }
        if (s.excluded > 0) {
            b.notes.push_back(s.model_name + " on " + s.dataset_name + ": " + std::to_string(s.excluded) +
                              " question(s) excluded after failed queries");
        }
    }
    const std::vector<std::string> models(model_set.begin(), model_set.end());
    const std::vector<PromptOrder> strategies(strategy_set.begin(), strategy_set.end());
    std::vector<std::string> strategy_ids;
    for (auto o : strategies) {
        strategy_ids.push_back(to_string(o));
    }
    b.run_ids.assign(run_ids.begin(), run_ids.end());

    for (const auto& ds : datasets) {
        ReportTable t{"Accuracy: " + ds, models, strategy_ids, {}};
        for (const auto& m : models) {
            std::vector<ReportCell> row;
            const auto it = by_key.find({m, ds});
            for (auto o : strategies) {
                if (it != by_key.end()) {
                    if (auto a = it->second->accuracy_by_strategy.find(o); a != it->second->accuracy_by_strategy.end()) {
                        row.push_back(value_cell(a->second, it->second->run_id));
                        continue;
                    }
                }
                row.push_back({});
            }
            t.cells.push_back(std::move(row));
        }
        b.table_accuracy.push_back(std::move(t));
    }

    b.table_consistency = {"Consistency", models, datasets, {}};
    for (const auto& m : models) {
        std::vector<ReportCell> row;
        for (const auto& ds : datasets) {
            const auto it = by_key.find({m, ds});
            if (it != by_key.end() && it->second->consistency) {
                row.push_back(value_cell(*it->second->consistency, it->second->run_id));
            } else {
                row.push_back({});
            }
        }
        b.table_consistency.cells.push_back(std::move(row));
    }

    b.table_correlation = {"Pearson correlation between consistency and accuracy", {}, strategy_ids, {}};
    for (const auto& ds : datasets) {
        std::vector<const CorrelationCell*> ds_cells;
        for (const auto& c : cells) {
            if (c.dataset_name == ds) {
                ds_cells.push_back(&c);
            }
        }
        if (ds_cells.empty()) {
            b.notes.push_back("correlation for " + ds + ": InsufficientModels (needs at least 2 models)");
            continue;
        }
        std::set<std::string> ds_runs;
        for (const auto& s : summaries) {
            if (s.dataset_name == ds) {
                ds_runs.insert(s.run_id);
            }
        }
        std::string sources;
        for (const auto& r : ds_runs) {
            sources += (sources.empty() ? "" : ",") + r;
        }
        std::vector<ReportCell> row;
        for (auto o : strategies) {
            const auto it = std::find_if(ds_cells.begin(), ds_cells.end(),
                                         [&](const CorrelationCell* c) { return c->strategy == o; });
            ReportCell rc;
            if (it != ds_cells.end()) {
                if ((*it)->r) {
                    rc = value_cell(*(*it)->r, sources);
                } else {
                    rc.kind = ReportCell::Kind::Flagged;
                    rc.flag = to_string((*it)->flag);
                    rc.run_id = sources;
                }
                rc.n_models = (*it)->n_models;
            }
            row.push_back(rc);
        }
        b.table_correlation.rows.push_back(ds);
        b.table_correlation.cells.push_back(std::move(row));
    }
    return b;
}

ReportBundle build_report_from_summaries(const std::vector<RunSummary>& summaries, const ReportOptions& options)
{
    std::vector<std::string> datasets;
    for (const auto& s : summaries) {
        if (std::find(datasets.begin(), datasets.end(), s.dataset_name) == datasets.end()) {
            datasets.push_back(s.dataset_name);
        }
    }
    std::vector<CorrelationCell> cells;
    for (const auto& ds : datasets) {
        std::vector<RunSummary> group;
        std::copy_if(summaries.begin(), summaries.end(), std::back_inserter(group),
                     [&](const RunSummary& s) { return s.dataset_name == ds; });
        try {
            auto c = correlation_table(group);
            cells.insert(cells.end(), c.begin(), c.end());
        } catch (const StatsError& e) {
            if (e.kind() != StatsError::Kind::InsufficientModels) {
                throw;
            }
        }
    }
    return build_report(summaries, cells, options);
}

std::vector<std::pair<std::string, std::string>> render(const ReportBundle& b, ReportFormat format)
{
    std::vector<std::pair<std::string, std::string>> files;
    switch (format) {
    case ReportFormat::Markdown: {
        std::string acc;
        for (const auto& t : b.table_accuracy) {
            if (!acc.empty()) {
                acc += "\n";
            }
            acc += "## " + t.title + "\n\n" + md_table(t, "model", true, true);
        }
        files.emplace_back("accuracy.md", acc);
        files.emplace_back("consistency.md", "## " + b.table_consistency.title + "\n\n" +
                                                 md_table(b.table_consistency, "model", false, false));
        std::string corr = "## " + b.table_correlation.title + "\n\n" +
                           md_table(b.table_correlation, "dataset", false, true);
        if (!b.notes.empty()) {
            corr += "\nNotes:\n";
            for (const auto& n : b.notes) {
                corr += "- " + n + "\n";
            }
        }
        files.emplace_back("correlation.md", corr);
        break;
    }
    case ReportFormat::Csv: {
        std::string acc = "dataset,model";
        const auto& cols = b.table_accuracy.empty() ? std::vector<std::string>{} : b.table_accuracy.front().cols;
        for (const auto& c : cols) {
            acc += "," + csv_field(c);
        }
        acc += "\n";
        for (const auto& t : b.table_accuracy) {
            const auto ds = t.title.substr(std::string("Accuracy: ").size());
            for (std::size_t r = 0; r < t.rows.size(); ++r) {
                acc += csv_field(ds) + "," + csv_field(t.rows[r]);
                for (const auto& c : t.cells[r]) {
                    acc += "," + csv_field(format_cell(c));
                }
                acc += "\n";
            }
        }
        files.emplace_back("accuracy.csv", acc);
        files.emplace_back("consistency.csv", csv_table(b.table_consistency, "model"));
        files.emplace_back("correlation.csv", csv_table(b.table_correlation, "dataset"));
        break;
    }
    case ReportFormat::JsonLines: {
        std::string out;
        ordered_json meta;
        meta["type"] = "meta";
        meta["generated_at"] = b.generated_at;
        meta["run_ids"] = b.run_ids;
        meta["notes"] = b.notes;
        out += meta.dump() + "\n";
        for (const auto& t : b.table_accuracy) {
            out += table_json("accuracy", t).dump() + "\n";
        }
        out += table_json("consistency", b.table_consistency).dump() + "\n";
        out += table_json("correlation", b.table_correlation).dump() + "\n";
        files.emplace_back("bundle.jsonl", out);
        break;
    }
    }
    return files;
}

std::size_t emit(const ReportBundle& bundle, ReportFormat format, const std::filesystem::path& dir)
{
    std::size_t bytes = 0;
    for (const auto& [name, content] : render(bundle, format)) {
        write_file_atomic(dir / name, content);
        bytes += content.size();
    }
    return bytes;
}

std::size_t emit_all(const ReportBundle& bundle, const std::filesystem::path& dir)
{
    return emit(bundle, ReportFormat::Markdown, dir) + emit(bundle, ReportFormat::Csv, dir) +
           emit(bundle, ReportFormat::JsonLines, dir);
}

ReportBundle load_bundle_jsonl(const std::filesystem::path& path)
{
    ReportBundle b;
    for (const auto& j : read_jsonl(path)) {
        const auto type = j.at("type").get<std::string>();
        if (type == "meta") {
            b.generated_at = j.at("generated_at").get<std::string>();
            b.run_ids = j.at("run_ids").get<std::vector<std::string>>();
            b.notes = j.at("notes").get<std::vector<std::string>>();
        } else if (type == "accuracy") {
            b.table_accuracy.push_back(table_from_json(j));
        } else if (type == "consistency") {
            b.table_consistency = table_from_json(j);
        } else if (type == "correlation") {
            b.table_correlation = table_from_json(j);
        } else {
            throw std::invalid_argument("unknown bundle line type " + type);
        }
    }
    return b;
}

} // namespace orderbench
