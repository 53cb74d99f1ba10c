#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sphrs/pipeline.hpp"

namespace sphrs {

/// One round-trip measurement, one CSV row.
struct RunRecord {
    std::string image;
    std::string src_res;
    std::string tar_res;
    std::string resampler;
    bool var{true};
    /// Block size of block-based paths; 0 for the classical global mesh.
    int block{0};
    double psnr_db{0.0};
    double wspsnr_db{0.0};
    double ssim{0.0};
    double seconds{0.0};
};

/// "image,src_res,tar_res,resampler,var,block,psnr_db,wspsnr_db,ssim,seconds"
const std::string& csv_header();

/// Fixed-precision row without a line terminator: dB to 4 decimals, SSIM to 6,
/// seconds to 3. Image ids containing commas or quotes are quoted.
std::string csv_row(const RunRecord& r);

/// Header plus one line per record.
std::string to_csv(const std::vector<RunRecord>& records);

/// JSON array of objects keyed like the CSV columns.
std::string to_json(const std::vector<RunRecord>& records);

/// Appends rows, writing the header first when the file is new or empty.
void append_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);

/// "WxH".
std::string resolution(const ProjectionFormat& fmt);

/// Block size that `cfg` resolves to, 0 when the path is not block-based.
int effective_block(const ConversionConfig& cfg);

struct RoundtripRun {
    RunRecord record;
    RoundtripResult result;
};

/// Round trip src -> tar -> src scored against `img` with all three metrics.
RoundtripRun measure_roundtrip(const std::string& image_id, const ImageBuffer& img, const ProjectionFormat& src,
                               const ProjectionFormat& tar, const ConversionConfig& cfg,
                               const ExecutionOptions& exec = {});

}  // namespace sphrs
