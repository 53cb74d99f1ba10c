#include "sphrs/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "sphrs/errors.hpp"
#include "sphrs/metrics.hpp"

namespace sphrs {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

const std::string& csv_header() {
    static const std::string header = "image,src_res,tar_res,resampler,var,block,psnr_db,wspsnr_db,ssim,seconds";
    return header;
}

std::string csv_row(const RunRecord& r) {
    return csv_field(r.image) + "," + r.src_res + "," + r.tar_res + "," + r.resampler + "," + (r.var ? "on" : "off") +
           "," + std::to_string(r.block) + "," + fixed(r.psnr_db, 4) + "," + fixed(r.wspsnr_db, 4) + "," +
           fixed(r.ssim, 6) + "," + fixed(r.seconds, 3);
}

std::string to_csv(const std::vector<RunRecord>& records) {
    std::string out = csv_header() + "\n";
    for (const auto& r : records) out += csv_row(r) + "\n";
    return out;
}

std::string to_json(const std::vector<RunRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        arr.push_back({{"image", r.image},
                       {"src_res", r.src_res},
                       {"tar_res", r.tar_res},
                       {"resampler", r.resampler},
                       {"var", r.var ? "on" : "off"},
                       {"block", r.block},
                       {"psnr_db", r.psnr_db},
                       {"wspsnr_db", r.wspsnr_db},
                       {"ssim", r.ssim},
                       {"seconds", r.seconds}});
    }
    return arr.dump(2);
}

void append_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open '" + path.string() + "' for appending");
    if (fresh) out << csv_header() << "\n";
    for (const auto& r : records) out << csv_row(r) << "\n";
    out.flush();
    if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::string resolution(const ProjectionFormat& fmt) {
    return std::to_string(fmt.width()) + "x" + std::to_string(fmt.height());
}

int effective_block(const ConversionConfig& cfg) {
    if (cfg.mode == PipelineMode::Var) return cfg.var_config().block_size;
    if (cfg.resampler == ResamplerKind::FSMR) return cfg.classical_config().fsmr_block_size;
    return 0;
}

RoundtripRun measure_roundtrip(const std::string& image_id, const ImageBuffer& img, const ProjectionFormat& src,
                               const ProjectionFormat& tar, const ConversionConfig& cfg,
                               const ExecutionOptions& exec) {
    const auto start = std::chrono::steady_clock::now();
    RoundtripResult result = roundtrip(img, src, tar, cfg, exec);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    RunRecord r;
    r.image = image_id;
    r.src_res = resolution(src);
    r.tar_res = resolution(tar);
    r.resampler = std::string(to_string(cfg.resampler));
    r.var = cfg.mode == PipelineMode::Var;
    r.block = effective_block(cfg);
    r.psnr_db = psnr(img, result.reconstructed);
    r.wspsnr_db = ws_psnr(img, result.reconstructed, src);
    r.ssim = ssim(img, result.reconstructed);
    r.seconds = seconds;
    return {std::move(r), std::move(result)};
}

}  // namespace sphrs
