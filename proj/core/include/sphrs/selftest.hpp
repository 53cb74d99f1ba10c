#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sphrs/pipeline.hpp"

namespace sphrs {

/// Fraction of target pixels on which a nearest-neighbor conversion picks the
/// source sample closest in great-circle distance (ties count as agreement).
/// The source carries unique labels so the chosen sample is recoverable.
struct NearestAgreement {
    double var{0.0};
    double classical{0.0};
    std::size_t pixels{0};
};

NearestAgreement nearest_oracle_agreement(const ProjectionFormat& src, const ProjectionFormat& tar,
                                          const VarConfig& var, const ClassicalConfig& classical,
                                          const ExecutionOptions& exec = {});

/// Fraction of target pixels on which VAR-Nearest picks the candidate closest
/// on the block's tangent plane among all front-facing source samples.
double nearest_plane_agreement(const ProjectionFormat& src, const ProjectionFormat& tar, const VarConfig& var,
                               const ExecutionOptions& exec = {});

/// One randomized conversion setup for the candidate-filter comparison.
struct FilterCase {
    ProjectionFormat src;
    ProjectionFormat tar;
    VarConfig config;
    std::uint64_t image_seed{0};

    std::string describe() const;
};

/// Deterministic list of `count` small random setups covering both directions,
/// all resamplers, and a range of block sizes and margins.
std::vector<FilterCase> random_filter_cases(int count, std::uint64_t seed);

/// Random image with values in [0, 255] for a filter case.
ImageBuffer filter_case_image(const FilterCase& c);

/// True when the filtered and full candidate paths agree bit for bit.
bool filter_paths_agree(const FilterCase& c, const ExecutionOptions& exec = {});

/// RMS error of ERP -> CMP conversion of a smooth harmonic field against the
/// field sampled directly on the CMP grid, for ERP widths `widths`.
std::vector<double> convergence_errors(const ConversionConfig& cfg, const std::vector<int>& widths,
                                       const ExecutionOptions& exec = {});

struct SelftestCase {
    std::string name;
    bool passed{false};
    std::string detail;
};

struct SelftestReport {
    std::string suite;
    std::vector<SelftestCase> cases;

    bool passed() const noexcept;
};

/// Names accepted by run_selftest, in execution order.
const std::vector<std::string>& selftest_suites();

/// Throws ConfigError for an unknown suite name.
SelftestReport run_selftest(std::string_view suite, const ExecutionOptions& exec = {}, std::uint64_t seed = 1);

}  // namespace sphrs
