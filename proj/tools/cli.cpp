#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sphrs/errors.hpp"
#include "sphrs/io.hpp"
#include "sphrs/metrics.hpp"
#include "sphrs/pipeline.hpp"
#include "sphrs/report.hpp"
#include "sphrs/selftest.hpp"
#include "sphrs/synthetic.hpp"

namespace sphrs::cli {

namespace {

const std::vector<std::string> kProjections{"erp", "cmp"};
const std::vector<std::string> kResamplers{"nearest", "linear", "cubic", "fsmr"};
const std::vector<std::string> kSwitch{"on", "off"};

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// Options shared by convert and roundtrip.
struct MethodOptions {
    int block_size{0};
    int margin{4};
    std::string baseline{"target"};
    int threads{0};

    void add_to(CLI::App& app) {
        app.add_option("--block-size", block_size, "Block size of block-based paths (0: 8 for fsmr, 32 otherwise)")
            ->check(CLI::Range(0, 4096));
        app.add_option("--margin", margin, "Candidate margin around each block, in target pixels")
            ->check(CLI::Range(0, 4096));
        app.add_option("--baseline", baseline, "Domain of the classical path")
            ->check(CLI::IsMember({"target", "source"}));
        app.add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::Range(0, 1024));
    }

    ConversionConfig config(const std::string& kind, bool var) const {
        ConversionConfig cfg;
        cfg.mode = var ? PipelineMode::Var : PipelineMode::Classical;
        cfg.resampler = parse_resampler_kind(kind);
        cfg.block_size = block_size;
        cfg.margin = margin;
        cfg.baseline = baseline == "source" ? BaselineDomain::Source : BaselineDomain::Target;
        return cfg;
    }

    ExecutionOptions exec() const { return {threads, true}; }
};

struct TargetOptions {
    int face_size{0};
    int erp_width{0};

    void add_to(CLI::App& app) {
        app.add_option("--face-size", face_size, "CMP face size (0: derived from the ERP size)")
            ->check(CLI::Range(0, 1 << 15));
        app.add_option("--erp-width", erp_width, "ERP width of ERP targets (0: derived from the source)")
            ->check(CLI::Range(0, 1 << 16));
    }

    ProjectionFormat resolve(const ProjectionFormat& src, ProjectionKind to) const {
        if (to == ProjectionKind::CMP) {
            if (face_size > 0) return ProjectionFormat::cmp(face_size);
            if (src.kind() == ProjectionKind::CMP) return src;
            return ProjectionFormat::cmp(cmp_face_size_for(src.width(), src.height()));
        }
        if (erp_width > 0) {
            if (erp_width % 2 != 0) throw ConfigError("--erp-width must be even");
            return ProjectionFormat::erp(erp_width, erp_width / 2);
        }
        if (src.kind() == ProjectionKind::ERP) return src;
        // ERP height whose area matches six faces, rounded to a multiple of 8.
        const long h = std::max(8L, std::lround(src.face_size() * std::sqrt(3.0) / 8.0) * 8);
        return ProjectionFormat::erp(static_cast<int>(2 * h), static_cast<int>(h));
    }
};

int cmd_convert(const std::string& in, const std::string& out_path, const std::string& from, const std::string& to,
                const std::string& resampler, const std::string& var, bool color, const MethodOptions& method,
                const TargetOptions& target, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    ImageChannels img = load_channels(in);
    if (!color) {
        ImageBuffer y = luma(img);
        img.planes.assign(1, std::move(y));
    }
    const ImageBuffer& first = img.planes.front();
    const auto src = ProjectionFormat::make(parse_projection_kind(from), first.width(), first.height());
    const auto tar = target.resolve(src, parse_projection_kind(to));
    const ConversionConfig cfg = method.config(resampler, var == "on");
    ImageChannels result;
    for (const auto& plane : img.planes) result.planes.push_back(convert(plane, src, tar, cfg, method.exec()));
    save_channels(result, out_path);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << "wrote " << out_path << " (" << to_string(tar.kind()) << " " << resolution(tar) << ", "
        << to_string(cfg.resampler) << ", var " << var << ") in " << fixed(seconds, 3) << " s\n";
    return kExitOk;
}

struct Sweep {
    std::vector<std::string> resamplers;
    std::vector<int> blocks;
};

Sweep parse_sweeps(const std::vector<std::string>& specs) {
    Sweep s;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--sweep", "expected KEY=V1,V2,... got '" + spec + "'");
        const std::string key = spec.substr(0, eq);
        std::stringstream values(spec.substr(eq + 1));
        std::string v;
        while (std::getline(values, v, ',')) {
            if (v.empty()) continue;
            if (key == "resampler") {
                if (std::find(kResamplers.begin(), kResamplers.end(), v) == kResamplers.end()) {
                    throw CLI::ValidationError("--sweep", "unknown resampler '" + v + "'");
                }
                s.resamplers.push_back(v);
            } else if (key == "block") {
                try {
                    s.blocks.push_back(std::stoi(v));
                } catch (const std::exception&) {
                    throw CLI::ValidationError("--sweep", "invalid block size '" + v + "'");
                }
            } else {
                throw CLI::ValidationError("--sweep", "unknown key '" + key + "' (expected resampler or block)");
            }
        }
    }
    return s;
}

struct RoundtripArgs {
    std::vector<std::string> inputs;
    std::vector<std::uint64_t> synthetic;
    int band_limit{0};
    std::string from{"erp"};
    std::string to{"cmp"};
    std::string resampler{"cubic"};
    std::vector<std::string> var{"on"};
    std::vector<std::string> sweep;
    std::string csv;
    bool json{false};
    std::string save_dir;
};

int cmd_roundtrip(const RoundtripArgs& a, const MethodOptions& method, const TargetOptions& target,
                  std::ostream& out) {
    if (a.inputs.empty() && a.synthetic.empty()) {
        throw CLI::RequiredError("roundtrip needs --in or --synthetic");
    }
    const Sweep sweep = parse_sweeps(a.sweep);
    const std::vector<std::string> resamplers = sweep.resamplers.empty() ? std::vector{a.resampler} : sweep.resamplers;
    const std::vector<int> blocks = sweep.blocks.empty() ? std::vector{method.block_size} : sweep.blocks;

    struct Input {
        std::string id;
        ImageBuffer img;
        ProjectionFormat fmt;
    };
    std::vector<Input> inputs;
    const auto from = parse_projection_kind(a.from);
    for (const auto& path : a.inputs) {
        ImageBuffer img = load_image(path);
        const auto fmt = ProjectionFormat::make(from, img.width(), img.height());
        inputs.push_back({std::filesystem::path(path).filename().string(), std::move(img), fmt});
    }
    for (std::uint64_t seed : a.synthetic) {
        if (from != ProjectionKind::ERP) throw ConfigError("--synthetic generates ERP images");
        const int w = target.erp_width > 0 ? target.erp_width : 512;
        if (w % 2 != 0) throw ConfigError("--erp-width must be even");
        const auto fmt = ProjectionFormat::erp(w, w / 2);
        const int band = a.band_limit > 0 ? a.band_limit : w / 4;
        inputs.push_back({"harmonic-" + std::to_string(seed), harmonic_image(fmt, seed, band), fmt});
    }

    std::vector<RunRecord> records;
    for (const auto& input : inputs) {
        TargetOptions t = target;
        if (!a.synthetic.empty()) t.erp_width = 0;
        const auto tar = t.resolve(input.fmt, parse_projection_kind(a.to));
        for (const auto& kind : resamplers) {
            for (int block : blocks) {
                for (const auto& v : a.var) {
                    MethodOptions m = method;
                    m.block_size = block;
                    const auto run = measure_roundtrip(input.id, input.img, input.fmt, tar, m.config(kind, v == "on"),
                                                       m.exec());
                    if (!a.save_dir.empty()) {
                        const std::filesystem::path dir(a.save_dir);
                        const std::string stem = std::filesystem::path(input.id).stem().string() + "_" + kind + "_var" +
                                                 v + "_b" + std::to_string(run.record.block);
                        save_image(run.result.intermediate, dir / (stem + "_intermediate.png"));
                        save_image(run.result.reconstructed, dir / (stem + "_reconstructed.png"));
                    }
                    records.push_back(run.record);
                }
            }
        }
    }
    if (!a.csv.empty()) append_csv(a.csv, records);
    if (a.json) {
        out << to_json(records) << "\n";
    } else {
        out << to_csv(records);
    }
    return kExitOk;
}

int cmd_metrics(const std::string& in, const std::string& ref, const std::string& from, bool json,
                std::ostream& out) {
    const ImageBuffer a = load_image(in);
    const ImageBuffer b = load_image(ref);
    const auto fmt = ProjectionFormat::make(parse_projection_kind(from), b.width(), b.height());
    const double p = psnr(a, b);
    const double w = ws_psnr(a, b, fmt);
    const double s = ssim(a, b);
    if (json) {
        nlohmann::ordered_json j{{"psnr_db", p}, {"wspsnr_db", w}, {"ssim", s}};
        out << j.dump(2) << "\n";
    } else {
        out << "psnr_db=" << fixed(p, 4) << " wspsnr_db=" << fixed(w, 4) << " ssim=" << fixed(s, 6) << "\n";
    }
    return kExitOk;
}

int cmd_selftest(const std::vector<std::string>& suites, int threads, std::uint64_t seed, std::ostream& out,
                 std::ostream& err) {
    const std::vector<std::string>& chosen = suites.empty() ? selftest_suites() : suites;
    std::size_t total = 0;
    std::size_t passed = 0;
    std::string first_failure;
    for (const auto& name : chosen) {
        const SelftestReport report = run_selftest(name, {threads, true}, seed);
        for (const auto& c : report.cases) {
            ++total;
            if (c.passed) ++passed;
            out << (c.passed ? "[PASS] " : "[FAIL] ") << report.suite << "/" << c.name << ": " << c.detail << "\n";
            if (!c.passed && first_failure.empty()) first_failure = report.suite + "/" + c.name + " (" + c.detail + ")";
        }
        out << "suite " << report.suite << ": " << (report.passed() ? "pass" : "FAIL") << "\n";
    }
    out << "selftest: " << passed << "/" << total << " cases passed\n";
    if (passed != total) {
        err << "selftest failed: " << first_failure << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SPHRS_SEED"); env != nullptr && *env != '\0') return std::stoull(env);
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spherical image projection conversion with viewport-adaptive resampling", "sphrs"};
    app.require_subcommand(1);

    // convert
    auto* convert_cmd = app.add_subcommand("convert", "Convert an image between ERP and CMP");
    std::string c_in;
    std::string c_out;
    std::string c_from;
    std::string c_to;
    std::string c_resampler = "cubic";
    std::string c_var = "on";
    bool c_color = false;
    MethodOptions c_method;
    TargetOptions c_target;
    convert_cmd->add_option("--in", c_in, "Input PNG or PGM")->required();
    convert_cmd->add_option("--out", c_out, "Output PNG or PGM")->required();
    convert_cmd->add_option("--from", c_from, "Input projection")->required()->check(CLI::IsMember(kProjections));
    convert_cmd->add_option("--to", c_to, "Output projection")->required()->check(CLI::IsMember(kProjections));
    convert_cmd->add_option("--resampler", c_resampler, "Resampler")->check(CLI::IsMember(kResamplers));
    convert_cmd->add_option("--var", c_var, "Viewport-adaptive resampling")->check(CLI::IsMember(kSwitch));
    convert_cmd->add_flag("--color", c_color, "Convert color channels separately instead of luma");
    c_method.add_to(*convert_cmd);
    c_target.add_to(*convert_cmd);

    // roundtrip
    auto* rt_cmd = app.add_subcommand("roundtrip", "Convert there and back and score against the input");
    RoundtripArgs rt;
    MethodOptions rt_method;
    TargetOptions rt_target;
    rt_cmd->add_option("--in", rt.inputs, "Input images");
    rt_cmd->add_option("--synthetic", rt.synthetic, "Seeds of synthetic spherical-harmonic ERP inputs")
        ->delimiter(',');
    rt_cmd->add_option("--band-limit", rt.band_limit, "Degree limit of synthetic inputs (0: ERP width / 4)")
        ->check(CLI::Range(0, 4096));
    rt_cmd->add_option("--from", rt.from, "Input projection")->check(CLI::IsMember(kProjections));
    rt_cmd->add_option("--to", rt.to, "Intermediate projection")->check(CLI::IsMember(kProjections));
    rt_cmd->add_option("--resampler", rt.resampler, "Resampler")->check(CLI::IsMember(kResamplers));
    rt_cmd->add_option("--var", rt.var, "on, off or on,off")->delimiter(',')->check(CLI::IsMember(kSwitch));
    rt_cmd->add_option("--sweep", rt.sweep, "resampler=LIST or block=LIST");
    rt_cmd->add_option("--csv", rt.csv, "Append rows to this CSV file");
    rt_cmd->add_flag("--json", rt.json, "Print JSON instead of CSV");
    rt_cmd->add_option("--save-dir", rt.save_dir, "Save intermediate and reconstructed images here")
        ->check(CLI::ExistingDirectory);
    rt_method.add_to(*rt_cmd);
    rt_target.add_to(*rt_cmd);

    // metrics
    auto* m_cmd = app.add_subcommand("metrics", "PSNR, WS-PSNR and SSIM of an image against a reference");
    std::string m_in;
    std::string m_ref;
    std::string m_from = "erp";
    bool m_json = false;
    m_cmd->add_option("--in", m_in, "Test image")->required();
    m_cmd->add_option("--ref", m_ref, "Reference image")->required();
    m_cmd->add_option("--from", m_from, "Projection of both images")->check(CLI::IsMember(kProjections));
    m_cmd->add_flag("--json", m_json, "Print JSON");

    // selftest
    auto* s_cmd = app.add_subcommand("selftest", "Run the built-in oracle suites");
    std::vector<std::string> s_suites;
    int s_threads = 0;
    std::uint64_t s_seed = default_seed();
    s_cmd->add_option("--suite", s_suites, "Suite to run (repeatable; default all)")
        ->check(CLI::IsMember(selftest_suites()));
    s_cmd->add_option("--threads", s_threads, "Worker threads (0: all cores)")->check(CLI::Range(0, 1024));
    s_cmd->add_option("--seed", s_seed, "Seed of randomized cases (default: SPHRS_SEED or 1)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (convert_cmd->parsed()) {
            return cmd_convert(c_in, c_out, c_from, c_to, c_resampler, c_var, c_color, c_method, c_target, out);
        }
        if (rt_cmd->parsed()) return cmd_roundtrip(rt, rt_method, rt_target, out);
        if (m_cmd->parsed()) return cmd_metrics(m_in, m_ref, m_from, m_json, out);
        return cmd_selftest(s_suites, s_threads, s_seed, out, err);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (const auto* sub : app.get_subcommands()) target = sub;
        out << target->help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << one_line(e.what()) << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << one_line(e.what()) << "\n";
        return kExitFailure;
    }
}

}  // namespace sphrs::cli
