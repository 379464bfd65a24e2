#include "afv/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace afv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string row_context(const CsvTable& table, std::size_t row) {
    // row is 0-based into table.rows; +2 accounts for the header line.
    return table.path.filename().string() + ":" + std::to_string(row + 2);
}

int parse_int(const CsvTable& table, std::size_t row, const std::string& value,
              const std::string& column) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ValidationError(row_context(table, row) + ": column '" + column +
                              "' must be an integer, got '" + value + "'");
    }
    return out;
}

double parse_double(const CsvTable& table, std::size_t row, const std::string& value,
                    const std::string& column) {
    try {
        std::size_t consumed = 0;
        const double out = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ValidationError(row_context(table, row) + ": column '" + column +
                              "' must be a number, got '" + value + "'");
    }
}

void require_columns(const CsvTable& table, const std::vector<std::string>& required) {
    if (table.header.size() < required.size()) {
        throw ValidationError(table.path.filename().string() + ": header must start with " +
                              std::to_string(required.size()) + " required columns");
    }
    for (std::size_t i = 0; i < required.size(); ++i) {
        if (table.header[i] != required[i]) {
            throw ValidationError(table.path.filename().string() + ": expected column " +
                                  std::to_string(i + 1) + " to be '" + required[i] +
                                  "', got '" + table.header[i] + "'");
        }
    }
}

void require_width(const CsvTable& table, std::size_t row) {
    if (table.rows[row].size() != table.header.size()) {
        throw ValidationError(row_context(table, row) + ": expected " +
                              std::to_string(table.header.size()) + " fields, got " +
                              std::to_string(table.rows[row].size()));
    }
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path.string());
    CsvTable table;
    table.path = path;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            table.header = split_fields(line);
            first = false;
        } else {
            table.rows.push_back(split_fields(line));
        }
    }
    if (first) throw ValidationError(path.filename().string() + ": empty CSV file");
    return table;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    require_columns(table, {"video_id", "class_label", "split", "source_path"});
    const bool has_meta = table.header.size() >= 7 && table.header[4] == "frame_count" &&
                          table.header[5] == "width" && table.header[6] == "height";
    if (table.header.size() > 4 && !has_meta) {
        throw ValidationError(path.filename().string() +
                              ": optional columns must be frame_count,width,height");
    }

    std::vector<ManifestEntry> entries;
    entries.reserve(table.rows.size());
    std::vector<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require_width(table, r);
        const auto& row = table.rows[r];
        ManifestEntry e;
        e.video_id = row[0];
        if (e.video_id.empty()) {
            throw ValidationError(row_context(table, r) + ": empty video_id");
        }
        if (std::find(seen.begin(), seen.end(), e.video_id) != seen.end()) {
            throw ValidationError(row_context(table, r) + ": duplicate video_id '" +
                                  e.video_id + "'");
        }
        seen.push_back(e.video_id);
        e.class_label = parse_int(table, r, row[1], "class_label");
        if (e.class_label < 0) {
            throw ValidationError(row_context(table, r) + ": class_label must be >= 0");
        }
        e.split = row[2];
        if (e.split != "train" && e.split != "test") {
            throw ValidationError(row_context(table, r) +
                                  ": split must be 'train' or 'test', got '" + e.split + "'");
        }
        e.source_path = row[3];
        if (has_meta) {
            e.frame_count = parse_int(table, r, row[4], "frame_count");
            e.width = parse_int(table, r, row[5], "width");
            e.height = parse_int(table, r, row[6], "height");
            if (e.frame_count < 0 || e.width < 0 || e.height < 0) {
                throw ValidationError(row_context(table, r) + ": negative metadata value");
            }
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw ValidationError(path.filename().string() + ": no videos listed");
    return entries;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    require_columns(table, {"video_id", "dataset", "true_label", "predicted_label"});
    if (table.header.size() != 4) {
        throw ValidationError(path.filename().string() + ": unexpected extra columns");
    }
    std::vector<PredictionRecord> records;
    records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require_width(table, r);
        const auto& row = table.rows[r];
        PredictionRecord rec;
        rec.video_id = row[0];
        try {
            rec.dataset = dataset_from_string(row[1]);
        } catch (const ValidationError& e) {
            throw ValidationError(row_context(table, r) + ": " + e.what());
        }
        rec.true_label = parse_int(table, r, row[2], "true_label");
        rec.predicted_label = parse_int(table, r, row[3], "predicted_label");
        if (rec.true_label < 0 || rec.predicted_label < 0) {
            throw ValidationError(row_context(table, r) + ": labels must be >= 0");
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) {
        throw ValidationError(path.filename().string() + ": no prediction rows");
    }
    return records;
}

ResponseTable load_responses(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    require_columns(table,
                    {"participant", "condition", "trial", "true_label", "response", "correct"});
    ResponseTable out;
    int rt_col = -1, order_col = -1;
    for (std::size_t i = 6; i < table.header.size(); ++i) {
        if (table.header[i] == "rt_ms" && rt_col < 0) {
            rt_col = static_cast<int>(i);
        } else if (table.header[i] == "order" && order_col < 0) {
            order_col = static_cast<int>(i);
        } else {
            throw ValidationError(path.filename().string() + ": unknown column '" +
                                  table.header[i] + "' (optional columns: rt_ms, order)");
        }
    }
    out.has_rt = rt_col >= 0;
    out.has_order = order_col >= 0;

    out.rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require_width(table, r);
        const auto& row = table.rows[r];
        ResponseRow rec;
        rec.participant = row[0];
        rec.condition = row[1];
        if (rec.participant.empty() || rec.condition.empty()) {
            throw ValidationError(row_context(table, r) + ": empty participant or condition");
        }
        rec.trial = parse_int(table, r, row[2], "trial");
        rec.true_label = row[3];
        rec.response = row[4];
        if (row[5] != "0" && row[5] != "1") {
            throw ValidationError(row_context(table, r) +
                                  ": column 'correct' must be 0 or 1, got '" + row[5] + "'");
        }
        rec.correct = row[5] == "1";
        if (rt_col >= 0 && !row[rt_col].empty()) {
            rec.rt_ms = parse_double(table, r, row[rt_col], "rt_ms");
            if (rec.rt_ms < 0.0) {
                throw ValidationError(row_context(table, r) + ": rt_ms must be >= 0");
            }
        }
        if (order_col >= 0) rec.order = row[order_col];
        out.rows.push_back(std::move(rec));
    }
    if (out.rows.empty()) {
        throw ValidationError(path.filename().string() + ": no response rows");
    }
    return out;
}

}  // namespace afv
