#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlh/params.hpp"

namespace nlh::cli {

enum class Command { Denoise, EstimateNoise, AddNoise, Metrics, NssStats, Bench };
enum class ReportFormat { Text, Csv, Json };

struct RunConfig {
    Command command = Command::Denoise;
    std::string input;
    std::string output;
    std::string basic_path;      // denoise: optional stage-1 output
    std::string reference_path;  // denoise: optional clean image for metrics
    std::string locals_csv;      // estimate-noise: optional sigma_l dump
    std::string patch_csv;       // nss-stats outputs
    std::string pixel_csv;
    std::string report_path;     // bench: write the report here instead of stdout

    Profile profile = Profile::Real;
    NlhParams params;        // resolved profile defaults + overrides
    double sigma = -1.0;     // >= 0 enables non-blind mode ([0,255] scale)
    uint64_t seed = 0;
    int workers = 0;         // 0 = auto
    bool bench_denoise = false;
    ReportFormat format = ReportFormat::Text;
};

// Executes one command; prints results and returns the process exit code
// (0 iff every requested output was produced).
int run(const RunConfig& cfg);

// Parses argv (excluding argv[0]) and runs. Exposed for in-process testing.
int parse_and_run(const std::vector<std::string>& args);

int main_entry(int argc, char** argv);

// Minimal CSV reader used to validate the schemas this tool emits.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace nlh::cli
