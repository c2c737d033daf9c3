#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cgtomo/reconstruct_mle.hpp"

namespace cgtomo {

enum class Method { DirectKnown, DirectUnknown, Mle };

const char* method_name(Method m);

/// One sweep cell. Columns not meaningful for a cell stay NaN / empty.
struct SweepRecord {
    std::string experiment;
    std::string input;
    double sigma = 0.0;
    double phi_i = std::numeric_limits<double>::quiet_NaN();
    Method method = Method::DirectUnknown;
    double fidelity = std::numeric_limits<double>::quiet_NaN();
    double nonclassicality = std::numeric_limits<double>::quiet_NaN();  // r_nc or E_N
    double angle_dev = std::numeric_limits<double>::quiet_NaN();
    double y = std::numeric_limits<double>::quiet_NaN();
    bool nonphysical = false;
    std::string error;
};

struct SingleInput {
    double nbar = 0.0;
    double r = 1.0;
};

struct SweepConfig {
    std::string experiment = "fig4";
    std::vector<double> sigma_grid;      // empty -> default_sigma_grid()
    std::vector<SingleInput> inputs;     // empty -> {(0,1),(1,1),(0,2)}
    double input_phi = 0.0;              // squeezing angle of the Known/MLE curves
    int frame_grid = 36;                 // phi averaging grid for DirectUnknown
    int fig2c_phi_grid = 48;             // phi_i grid of the fig2c surface
    MleConfig mle;
    std::uint64_t seed = 42;
    int threads = 0;                     // 0 -> hardware concurrency
    std::string out_dir = "out";
};

/// 40 log-spaced points on [0.01, 2.0] plus sigma = 0.1.
std::vector<double> default_sigma_grid();

/// Parse a JSON config document (snake_case keys mirror SweepConfig).
/// Throws std::invalid_argument on malformed input.
SweepConfig config_from_json(const std::string& text);

std::vector<SweepRecord> run_fig2c(const SweepConfig& cfg);
std::vector<SweepRecord> run_fig3(const SweepConfig& cfg);
std::vector<SweepRecord> run_fig4(const SweepConfig& cfg);
std::vector<SweepRecord> run_fig5(const SweepConfig& cfg);

/// Dispatch on cfg.experiment ("fig2c", "fig3", "fig4", "fig5").
std::vector<SweepRecord> run_experiment(const SweepConfig& cfg);

/// RFC-4180-style CSV, header row, '\n' endings, deterministic formatting.
void emit_csv(const std::vector<SweepRecord>& records, const std::string& path);

/// Static SVG line charts for the experiment; writes one file per metric
/// into out_dir and returns the paths.
std::vector<std::string> emit_svg(const std::string& experiment,
                                  const std::vector<SweepRecord>& records,
                                  const std::string& out_dir);

/// Oracle suites and limit invariants; prints one line per check.
/// Returns the number of failures.
int selftest();

}  // namespace cgtomo
