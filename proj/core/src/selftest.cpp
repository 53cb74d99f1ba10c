#include "sphrs/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "sphrs/errors.hpp"
#include "sphrs/synthetic.hpp"

namespace sphrs {

namespace {

constexpr double kTieTolerance = 1e-12;

std::string fmt_name(const ProjectionFormat& f) {
    return std::string(to_string(f.kind())) + " " + std::to_string(f.width()) + "x" + std::to_string(f.height());
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

ImageBuffer labeled_image(const ProjectionFormat& fmt) {
    std::vector<double> labels(fmt.pixel_count());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<double>(i);
    const double v_max = std::max(1.0, static_cast<double>(labels.size() - 1));
    return {fmt.width(), fmt.height(), v_max, std::move(labels)};
}

std::vector<SphereVec> pixel_directions(const ProjectionFormat& fmt) {
    std::vector<SphereVec> dirs;
    dirs.reserve(fmt.pixel_count());
    for (int y = 0; y < fmt.height(); ++y) {
        for (int x = 0; x < fmt.width(); ++x) dirs.push_back(to_sphere({x + 0.5, y + 0.5}, fmt));
    }
    return dirs;
}

double label_agreement(const ImageBuffer& out, const ProjectionFormat& tar, const std::vector<SphereVec>& src_dirs) {
    std::size_t hits = 0;
    for (int y = 0; y < tar.height(); ++y) {
        for (int x = 0; x < tar.width(); ++x) {
            const SphereVec t = to_sphere({x + 0.5, y + 0.5}, tar);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : src_dirs) best = std::min(best, great_circle_distance(t, s));
            const auto label = static_cast<std::size_t>(out.at(x, y));
            if (label < src_dirs.size() && great_circle_distance(t, src_dirs[label]) <= best + kTieTolerance) ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(tar.pixel_count());
}

double rms(const ImageBuffer& a, const ImageBuffer& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = a.data()[i] - b.data()[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

SelftestReport nearest_suite(const ExecutionOptions& exec) {
    const auto erp = ProjectionFormat::erp(64, 32);
    const auto cmp = ProjectionFormat::cmp(16);
    SelftestReport report{"nearest-oracle", {}};

    VarConfig small = VarConfig::for_resampler(ResamplerKind::Nearest);
    small.block_size = 4;
    ClassicalConfig source;
    source.resampler = ResamplerKind::Nearest;
    source.domain = BaselineDomain::Source;
    const auto a = nearest_oracle_agreement(erp, cmp, small, source, exec);
    report.cases.push_back({"var-block4-vs-sphere", a.var >= 0.99, "agreement " + fixed(a.var, 4) + " (>= 0.99)"});
    report.cases.push_back(
        {"classical-source-vs-sphere", a.classical >= 0.95, "agreement " + fixed(a.classical, 4) + " (>= 0.95)"});

    const VarConfig standard = VarConfig::for_resampler(ResamplerKind::Nearest);
    const double plane = nearest_plane_agreement(erp, cmp, standard, exec);
    report.cases.push_back({"var-default-vs-plane", plane == 1.0, "agreement " + fixed(plane, 4) + " (== 1)"});

    const auto back = nearest_oracle_agreement(cmp, erp, small, source, exec);
    report.cases.push_back(
        {"var-block4-cmp-to-erp", back.var >= 0.99, "agreement " + fixed(back.var, 4) + " (>= 0.99)"});
    return report;
}

SelftestReport filter_suite(const ExecutionOptions& exec, std::uint64_t seed) {
    SelftestReport report{"candidate-filter", {}};
    const auto cases = random_filter_cases(20, seed);
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const bool ok = filter_paths_agree(cases[i], exec);
        report.cases.push_back({"case-" + std::to_string(i + 1), ok, cases[i].describe()});
    }
    return report;
}

SelftestReport convergence_suite(const ExecutionOptions& exec) {
    SelftestReport report{"convergence", {}};
    const std::vector<int> widths{64, 128, 256};
    double finest_linear = 0.0;
    double finest_cubic = 0.0;
    for (auto kind : {ResamplerKind::Linear, ResamplerKind::Cubic}) {
        for (auto mode : {PipelineMode::Var, PipelineMode::Classical}) {
            ConversionConfig cfg;
            cfg.mode = mode;
            cfg.resampler = kind;
            const auto errors = convergence_errors(cfg, widths, exec);
            bool decreasing = true;
            std::string detail = "rms";
            for (std::size_t i = 0; i < errors.size(); ++i) {
                detail += " " + fixed(errors[i], 4);
                if (i > 0 && !(errors[i] < errors[i - 1])) decreasing = false;
            }
            const std::string name =
                std::string(mode == PipelineMode::Var ? "var-" : "classical-") + std::string(to_string(kind));
            report.cases.push_back({name + "-decreasing", decreasing, detail});
            if (mode == PipelineMode::Var) (kind == ResamplerKind::Linear ? finest_linear : finest_cubic) = errors.back();
        }
    }
    report.cases.push_back({"var-cubic-below-linear", finest_cubic < finest_linear,
                            "rms " + fixed(finest_cubic, 4) + " < " + fixed(finest_linear, 4)});
    return report;
}

}  // namespace

NearestAgreement nearest_oracle_agreement(const ProjectionFormat& src, const ProjectionFormat& tar,
                                          const VarConfig& var, const ClassicalConfig& classical,
                                          const ExecutionOptions& exec) {
    const ImageBuffer labels = labeled_image(src);
    const auto dirs = pixel_directions(src);
    VarConfig v = var;
    v.resampler = ResamplerKind::Nearest;
    ClassicalConfig c = classical;
    c.resampler = ResamplerKind::Nearest;
    NearestAgreement out;
    out.pixels = tar.pixel_count();
    out.var = label_agreement(var_resample(labels, src, tar, v, exec), tar, dirs);
    out.classical = label_agreement(classical_resample(labels, src, tar, c, exec), tar, dirs);
    return out;
}

double nearest_plane_agreement(const ProjectionFormat& src, const ProjectionFormat& tar, const VarConfig& var,
                               const ExecutionOptions& exec) {
    const ImageBuffer labels = labeled_image(src);
    const auto dirs = pixel_directions(src);
    VarConfig v = var;
    v.resampler = ResamplerKind::Nearest;
    const ImageBuffer out = var_resample(labels, src, tar, v, exec);
    std::size_t hits = 0;
    std::vector<PixelCoord> plane(dirs.size());
    std::vector<char> front(dirs.size());
    for (const auto& block : plan_blocks(tar, v.block_size)) {
        const BlockGeometry g = block_geometry(block, tar, v.margin);
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const SphereVec r = rotate(g.rotation, dirs[i]);
            front[i] = r.x() > kFrontEpsilon;
            if (front[i]) plane[i] = perspective_project(r);
        }
        for (int j = 0; j < block.bh; ++j) {
            for (int i = 0; i < block.bw; ++i) {
                const PixelCoord q = g.queries[static_cast<std::size_t>(j) * block.bw + i];
                auto dist = [&](std::size_t k) { return std::hypot(plane[k].u - q.u, plane[k].v - q.v); };
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < dirs.size(); ++k) {
                    if (front[k]) best = std::min(best, dist(k));
                }
                const auto label = static_cast<std::size_t>(out.at(block.x0 + i, block.y0 + j));
                if (label < dirs.size() && front[label] && dist(label) <= best + kTieTolerance) ++hits;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(tar.pixel_count());
}

std::string FilterCase::describe() const {
    return fmt_name(src) + " -> " + fmt_name(tar) + " resampler=" + std::string(to_string(config.resampler)) +
           " block=" + std::to_string(config.block_size) + " margin=" + std::to_string(config.margin) +
           " image_seed=" + std::to_string(image_seed);
}

std::vector<FilterCase> random_filter_cases(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    std::vector<FilterCase> cases;
    for (int i = 0; i < count; ++i) {
        const int h = 8 * pick(2, 6);
        const auto erp = ProjectionFormat::erp(2 * h, h);
        const auto cmp = ProjectionFormat::cmp(4 * pick(2, 6));
        const bool to_cmp = (i / 2) % 2 == 0;
        VarConfig cfg = VarConfig::for_resampler(kAllResamplers[static_cast<std::size_t>(i % 4)]);
        cfg.block_size = pick(4, 16);
        cfg.margin = pick(0, 6);
        if (!to_cmp) {
            // Keep the expanded block within about 40 degrees of its center.
            const int reach = erp.width() / 9;
            cfg.block_size = std::clamp(cfg.block_size, 4, std::max(4, 2 * (reach - cfg.margin)));
            cfg.margin = std::min(cfg.margin, std::max(0, reach - cfg.block_size / 2));
        } else {
            cfg.margin = std::min(cfg.margin, cmp.face_size() / 4);
        }
        cases.push_back({to_cmp ? erp : cmp, to_cmp ? cmp : erp, cfg, rng()});
    }
    return cases;
}

ImageBuffer filter_case_image(const FilterCase& c) {
    std::mt19937_64 rng(c.image_seed);
    std::uniform_int_distribution<int> level(0, 255);
    std::vector<double> data(c.src.pixel_count());
    for (double& v : data) v = level(rng);
    return {c.src.width(), c.src.height(), 255.0, std::move(data)};
}

bool filter_paths_agree(const FilterCase& c, const ExecutionOptions& exec) {
    const ImageBuffer img = filter_case_image(c);
    ExecutionOptions filtered = exec;
    filtered.filter_candidates = true;
    ExecutionOptions full = exec;
    full.filter_candidates = false;
    const ImageBuffer a = var_resample(img, c.src, c.tar, c.config, filtered);
    const ImageBuffer b = var_resample(img, c.src, c.tar, c.config, full);
    return std::ranges::equal(a.data(), b.data());
}

std::vector<double> convergence_errors(const ConversionConfig& cfg, const std::vector<int>& widths,
                                       const ExecutionOptions& exec) {
    HarmonicSpec spec;
    spec.band_limit = 6;
    spec.seed = 7;
    spec.quantize = false;
    const HarmonicField field(spec);
    std::vector<double> errors;
    for (int w : widths) {
        const auto erp = ProjectionFormat::erp(w, w / 2);
        const auto cmp = ProjectionFormat::cmp(w / 4);
        const ImageBuffer out = convert(field.render(erp), erp, cmp, cfg, exec);
        errors.push_back(rms(out, field.render(cmp)));
    }
    return errors;
}

bool SelftestReport::passed() const noexcept {
    return std::all_of(cases.begin(), cases.end(), [](const SelftestCase& c) { return c.passed; });
}

const std::vector<std::string>& selftest_suites() {
    static const std::vector<std::string> names{"nearest-oracle", "candidate-filter", "convergence"};
    return names;
}

SelftestReport run_selftest(std::string_view suite, const ExecutionOptions& exec, std::uint64_t seed) {
    if (suite == "nearest-oracle") return nearest_suite(exec);
    if (suite == "candidate-filter") return filter_suite(exec, seed);
    if (suite == "convergence") return convergence_suite(exec);
    throw ConfigError("unknown selftest suite '" + std::string(suite) + "'");
}

}  // namespace sphrs
