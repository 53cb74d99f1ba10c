// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sphrs/geometry.hpp"
#include "sphrs/io.hpp"
#include "sphrs/kdtree.hpp"
#include "sphrs/metrics.hpp"
#include "sphrs/pipeline.hpp"
#include "sphrs/projections.hpp"
#include "sphrs/report.hpp"
#include "sphrs/resamplers.hpp"
#include "sphrs/selftest.hpp"
#include "sphrs/synthetic.hpp"
#include "sphrs/triangulation.hpp"

namespace {

using namespace sphrs;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

SphereVec random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const double x = n(rng), y = n(rng), z = n(rng);
        if (x * x + y * y + z * z > 1e-8) return SphereVec::normalized(x, y, z);
    }
}

Outcome geometry_invariants() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1);
    double align_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const SphereVec s = random_unit(rng);
        const SphereVec r = rotate(alignment_rotation(s), s);
        align_err = std::max({align_err, std::abs(r.x() - 1.0), std::abs(r.y()), std::abs(r.z())});
    }
    const auto erp = ProjectionFormat::erp(4096, 2048);
    const auto cmp = ProjectionFormat::cmp(1152);
    std::uniform_real_distribution<double> eu(0.5, 4095.5), ev(0.5, 2047.5), fu(0.01, 1151.99);
    std::uniform_int_distribution<int> slot(0, 5);
    double trip_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const PixelCoord p{eu(rng), ev(rng)};
        const PixelCoord q = sphere_to_erp(erp_to_sphere(p, erp), erp);
        trip_err = std::max({trip_err, std::abs(q.u - p.u), std::abs(q.v - p.v)});
        const int k = slot(rng);
        const PixelCoord c{(k % 3) * 1152 + fu(rng), (k / 3) * 1152 + fu(rng)};
        const PixelCoord d = sphere_to_cmp(cmp_to_sphere(c, cmp), cmp);
        trip_err = std::max({trip_err, std::abs(d.u - c.u), std::abs(d.v - c.v)});
    }
    const double t = seconds_since(t0);
    return {align_err <= 1e-10 && trip_err <= 1e-9 && t < 5.0,
            "max |R s - x| " + fmt("%.2e", align_err) + ", round-trip " + fmt("%.2e", trip_err) + " px, " +
                fmt("%.2f", t) + " s"};
}

Outcome nearest_oracle() {
    const auto t0 = Clock::now();
    const auto erp = ProjectionFormat::erp(64, 32);
    const auto cmp = ProjectionFormat::cmp(16);
    const ExecutionOptions exec{1, true};
    const auto standard = nearest_oracle_agreement(erp, cmp, VarConfig::for_resampler(ResamplerKind::Nearest),
                                                   ClassicalConfig{}, exec);
    VarConfig small = VarConfig::for_resampler(ResamplerKind::Nearest);
    small.block_size = 4;
    ClassicalConfig source;
    source.domain = BaselineDomain::Source;
    const auto alt = nearest_oracle_agreement(erp, cmp, small, source, exec);
    const double t = seconds_since(t0);
    const bool pass = standard.var >= 0.99 && standard.classical >= 0.95 && t < 30.0;
    return {pass, "defaults: var " + fmt("%.4f", standard.var) + " classical " + fmt("%.4f", standard.classical) +
                      " (need 0.99/0.95); block 4: var " + fmt("%.4f", alt.var) + "; source-domain classical " +
                      fmt("%.4f", alt.classical) + "; " + fmt("%.2f", t) + " s"};
}

Outcome interpolant_exactness() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(0.0, 10.0), inner(1.0, 9.0), coef(-5.0, 5.0);
    double worst = 0.0;
    std::size_t queries = 0;
    bool nearest_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const double a = coef(rng), b = coef(rng), c = 20.0 * coef(rng);
        std::vector<PixelCoord> pts;
        std::vector<double> vals;
        for (int i = 0; i < 40 + trial; ++i) {
            pts.push_back({coord(rng), coord(rng)});
            vals.push_back(a * pts.back().u + b * pts.back().v + c);
        }
        const MeshSamples mesh(pts, vals);
        const Triangulation tri(mesh.positions());
        const CloughTocher ct(tri, mesh.values());
        const NearestIndex index(pts);
        for (int k = 0; k < 50; ++k) {
            const PixelCoord q{inner(rng), inner(rng)};
            const auto lin = interpolate_linear(tri, mesh.values(), q);
            const auto cub = interpolate_cubic(ct, q);
            if (lin && cub) {
                const double exact = a * q.u + b * q.v + c;
                worst = std::max({worst, std::abs(*lin - exact), std::abs(*cub - exact)});
                ++queries;
            }
            int best = 0;
            double best_d2 = INFINITY;
            for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
                const double d2 = (pts[i].u - q.u) * (pts[i].u - q.u) + (pts[i].v - q.v) * (pts[i].v - q.v);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = i;
                }
            }
            nearest_ok = nearest_ok && index.nearest(q) == best;
        }
    }
    return {worst <= 1e-6 && nearest_ok && queries > 0,
            "max affine error " + fmt("%.2e", worst) + " over " + std::to_string(queries) +
                " interior queries; nearest " + (nearest_ok ? "matches" : "differs from") + " brute force"};
}

Outcome constant_preservation() {
    const auto erp = ProjectionFormat::erp(256, 128);
    const auto cmp = ProjectionFormat::cmp(cmp_face_size_for(256, 128));
    const ImageBuffer flat(256, 128, 255.0, 137.0);
    std::string failures;
    for (auto kind : kAllResamplers) {
        for (auto mode : {PipelineMode::Var, PipelineMode::Classical}) {
            ConversionConfig cfg;
            cfg.mode = mode;
            cfg.resampler = kind;
            const auto r = roundtrip(flat, erp, cmp, cfg, {1, true});
            const auto exact = [](const ImageBuffer& img) {
                for (double v : img.data())
                    if (v != 137.0) return false;
                return true;
            };
            if (!exact(r.intermediate) || !exact(r.reconstructed))
                failures += std::string(" ") + std::string(to_string(kind)) + (mode == PipelineMode::Var ? "/var" : "/classical");
        }
    }
    return {failures.empty(), failures.empty() ? "8 configurations exact at 256x128" : "inexact:" + failures};
}

struct SuiteScores {
    std::map<std::pair<ResamplerKind, PipelineMode>, double> mean_ws;
    double seconds{0.0};
};

SuiteScores run_suite() {
    const auto erp = ProjectionFormat::erp(512, 256);
    const auto cmp = ProjectionFormat::cmp(cmp_face_size_for(512, 256));
    SuiteScores s;
    const auto t0 = Clock::now();
    constexpr int kImages = 10;
    for (int seed = 1; seed <= kImages; ++seed) {
        const ImageBuffer img = harmonic_image(erp, static_cast<std::uint64_t>(seed), 128);
        for (auto kind : {ResamplerKind::Linear, ResamplerKind::Cubic, ResamplerKind::FSMR}) {
            for (auto mode : {PipelineMode::Var, PipelineMode::Classical}) {
                ConversionConfig cfg;
                cfg.mode = mode;
                cfg.resampler = kind;
                const auto r = roundtrip(img, erp, cmp, cfg, {1, true});
                s.mean_ws[{kind, mode}] += ws_psnr(img, r.reconstructed, erp) / kImages;
            }
        }
        std::printf("  suite image %d/%d done (%.1f s)\n", seed, kImages, seconds_since(t0));
        std::fflush(stdout);
    }
    s.seconds = seconds_since(t0);
    return s;
}

Outcome suite_direction(const SuiteScores& s) {
    bool pass = s.seconds < 600.0;
    std::string detail;
    for (auto kind : {ResamplerKind::Linear, ResamplerKind::Cubic, ResamplerKind::FSMR}) {
        const double v = s.mean_ws.at({kind, PipelineMode::Var});
        const double c = s.mean_ws.at({kind, PipelineMode::Classical});
        pass = pass && v > c;
        detail += std::string(to_string(kind)) + " " + fmt("%.2f", c) + " -> " + fmt("%.2f", v) + " dB; ";
    }
    const double vf = s.mean_ws.at({ResamplerKind::FSMR, PipelineMode::Var});
    const double vc = s.mean_ws.at({ResamplerKind::Cubic, PipelineMode::Var});
    pass = pass && vf >= vc;
    return {pass, detail + "var fsmr - var cubic " + fmt("%+.2f", vf - vc) + " dB; " + fmt("%.1f", s.seconds) + " s"};
}

Outcome fsmr_inversion(const SuiteScores& s) {
    const double cf = s.mean_ws.at({ResamplerKind::FSMR, PipelineMode::Classical});
    const double cc = s.mean_ws.at({ResamplerKind::Cubic, PipelineMode::Classical});
    const double vf = s.mean_ws.at({ResamplerKind::FSMR, PipelineMode::Var});
    const double vc = s.mean_ws.at({ResamplerKind::Cubic, PipelineMode::Var});
    return {cf < cc && vf > vc, "classical fsmr " + fmt("%.2f", cf) + " < cubic " + fmt("%.2f", cc) +
                                    "; var fsmr " + fmt("%.2f", vf) + " > cubic " + fmt("%.2f", vc)};
}

Outcome metric_goldens() {
    const auto erp = ProjectionFormat::erp(64, 32);
    std::vector<double> a(64 * 32), b(64 * 32);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = static_cast<double>((i * 37) % 200);
        b[i] = a[i] + 1.0;
    }
    const ImageBuffer ia(64, 32, 255.0, a);
    const ImageBuffer ib(64, 32, 255.0, b);
    const double p = psnr(ia, ib);
    const double w = ws_psnr(ia, ib, erp);
    const double s = ssim(ia, ia);
    return {std::abs(p - 48.1308) <= 1e-3 && std::abs(w - 48.1308) <= 1e-3 && s == 1.0,
            "psnr " + fmt("%.4f", p) + " ws-psnr " + fmt("%.4f", w) + " ssim(identical) " + fmt("%.17g", s)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "sphrs_acceptance_determinism";
    fs::remove_all(root);
    struct Result {
        int code;
        std::vector<std::string> rows;
        std::map<std::string, std::string> files;
    };
    auto run = [&](const std::string& threads) {
        const fs::path dir = root / threads;
        fs::create_directories(dir);
        std::ostringstream out, err;
        Result r;
        r.code = cli::run_cli({"roundtrip", "--synthetic", "1,2", "--erp-width", "256", "--sweep",
                               "resampler=nearest,linear,cubic,fsmr", "--var", "on,off", "--threads", threads,
                               "--save-dir", dir.string()},
                              out, err);
        std::istringstream lines(out.str());
        for (std::string l; std::getline(lines, l);) r.rows.push_back(l.substr(0, l.rfind(',')));
        for (const auto& e : fs::directory_iterator(dir)) r.files[e.path().filename().string()] = slurp(e.path());
        return r;
    };
    const Result one = run("1");
    const Result eight = run("8");
    fs::remove_all(root);
    const bool pass = one.code == 0 && eight.code == 0 && one.rows.size() == 17 && one.rows == eight.rows &&
                      !one.files.empty() && one.files == eight.files;
    return {pass, std::to_string(one.rows.size() - 1) + " CSV rows (seconds column excluded) and " +
                      std::to_string(one.files.size()) + " images compared across --threads 1 and 8"};
}

Outcome filter_equivalence() {
    const auto cases = random_filter_cases(20, 9);
    int agree = 0;
    for (const auto& c : cases) agree += filter_paths_agree(c, {1, true}) ? 1 : 0;
    return {agree == 20, std::to_string(agree) + "/20 randomized configurations bit-identical"};
}

Outcome face_sizes() {
    const int a = cmp_face_size_for(4096, 2048);
    const int b = cmp_face_size_for(2048, 1024);
    return {a == 1152 && b == 608, "4096x2048 -> " + std::to_string(a) + " (" + std::to_string(3 * a) + "x" +
                                       std::to_string(2 * a) + "), 2048x1024 -> " + std::to_string(b) + " (" +
                                       std::to_string(3 * b) + "x" + std::to_string(2 * b) + ")"};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
    };
    report(1, "geometry invariants", geometry_invariants);
    report(2, "nearest-neighbor oracle", nearest_oracle);
    report(3, "interpolant exactness", interpolant_exactness);
    report(4, "constant-image preservation", constant_preservation);
    SuiteScores suite;
    bool suite_ok = true;
    std::string suite_error;
    try {
        suite = run_suite();
    } catch (const std::exception& e) {
        suite_ok = false;
        suite_error = e.what();
    }
    auto from_suite = [&](Outcome (*fn)(const SuiteScores&)) {
        return [&, fn]() -> Outcome {
            if (!suite_ok) return {false, "suite failed: " + suite_error};
            return fn(suite);
        };
    };
    report(5, "VAR beats classical on the synthetic suite", from_suite(suite_direction));
    report(6, "FSMR inversion", from_suite(fsmr_inversion));
    report(7, "metric golden values", metric_goldens);
    report(8, "thread-count determinism", determinism);
    report(9, "candidate-filter equivalence", filter_equivalence);
    report(10, "face-size heuristic", face_sizes);
    std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
