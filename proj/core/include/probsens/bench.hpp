#pragma once

#include "probsens/analysis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace probsens {

struct BenchRow {
    std::string name;
    std::string program;  // resolved path
    std::string target;
    std::string wrt;
    Method method = Method::Auto;
    std::optional<std::size_t> expected_rec;
    bool hard = false;  // expectation is asserted, not just reported
};

struct BenchResult {
    enum class Status { Match, Mismatch, SoftMatch, SoftMismatch, Reported, Timeout, CapExceeded, Failed };

    BenchRow row;
    Status status = Status::Failed;
    std::optional<std::size_t> rec;
    double seconds = 0.0;
    int exit_code = 0;
    std::string message;
};

const char* to_string(BenchResult::Status s);

/// JSON manifest: {"rows": [{"name", "program", "target", "wrt", "method",
/// "expected_rec", "hard"}]}; program paths are relative to the manifest.
std::vector<BenchRow> load_manifest(const std::string& path);

struct BenchOptions {
    double timeout_seconds = 120.0;
    unsigned jobs = 1;
    std::size_t cap = equation_cap();
};

/// Runs every row in a child process with a wall-clock timeout.
std::vector<BenchResult> run_bench(const std::vector<BenchRow>& rows, const BenchOptions& options = {});

std::string bench_table(const std::vector<BenchResult>& results);
std::string bench_json(const std::vector<BenchResult>& results);
/// False when some hard row did not reproduce its expected Rec.
bool bench_passed(const std::vector<BenchResult>& results);

}  // namespace probsens
