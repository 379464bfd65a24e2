#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "afv/metrics.hpp"
#include "afv/statistics.hpp"

namespace afv {

// Plain comma-separated files with a header row. Fields are not quoted and
// must not contain commas; a trailing \r is tolerated. Diagnostics carry the
// file name and 1-based row number.

struct CsvTable {
    std::filesystem::path path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // excluding the header
};

CsvTable read_csv(const std::filesystem::path& path);

// One video of the corpus. class_label is a 0-based integer index; split is
// "train" or "test". frame_count/width/height are optional metadata columns.
struct ManifestEntry {
    std::string video_id;
    int class_label = 0;
    std::string split;
    std::filesystem::path source_path;
    int frame_count = 0;  // 0 when not stated
    int width = 0;
    int height = 0;
};

// Columns: video_id,class_label,split,source_path[,frame_count,width,height]
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

// Columns: video_id,dataset,true_label,predicted_label
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

// Columns: participant,condition,trial,true_label,response,correct[,rt_ms][,order]
ResponseTable load_responses(const std::filesystem::path& path);

}  // namespace afv
